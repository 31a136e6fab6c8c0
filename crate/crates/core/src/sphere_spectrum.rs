//! Closed-form spectra of geodesic spheres `S(r)`.
//!
//! For a geodesic sphere of radius `r` about any point, the coordinate functions
//! of the normal coordinate system restrict to first eigenfunctions of the
//! sphere Laplacian, with eigenvalue
//!
//! ```text
//! compact:     (kn - 1) / (4 sin^2(r/2))  + (k - 1) / (4 cos^2(r/2))
//! noncompact:  (kn - 1) / (4 sinh^2(r/2)) - (k - 1) / (4 cosh^2(r/2))
//! euclidean:   (n - 1) / r^2
//! ```
//!
//! The shape operator of `S(r)` has eigenvalue `cot r` (resp. `coth r`) on the
//! `k - 1` fibre directions and `cot(r/2) / 2` (resp. `coth(r/2) / 2`) on the
//! remaining `k(n - 1)` directions. Tracing the Riccati equation
//! `A' + A^2 + R = 0` gives `-Tr A'(r) = |A(r)|^2 + Ric = lambda_1(S(r))`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spaces::{ricci_constant, Kind, SpaceSpec};

/// One principal curvature with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrincipalCurvature {
    pub value: f64,
    pub multiplicity: usize,
}

/// Everything known in closed form about one geodesic sphere.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphereSpectrumRow {
    pub spec: SpaceSpec,
    pub r: f64,
    pub lambda1: f64,
    pub weingarten_eigs: Vec<PrincipalCurvature>,
    pub trace_a: f64,
    pub norm_a_sq: f64,
}

impl SphereSpectrumRow {
    pub fn compute(spec: &SpaceSpec, r: f64) -> Result<Self> {
        let lambda1 = lambda1_geodesic_sphere(spec, r)?;
        let weingarten_eigs = weingarten_spectrum(spec, r)?;
        Ok(SphereSpectrumRow {
            spec: *spec,
            r,
            lambda1,
            trace_a: trace(&weingarten_eigs),
            norm_a_sq: squared_norm(&weingarten_eigs),
            weingarten_eigs,
        })
    }
}

fn check_radius(spec: &SpaceSpec, r: f64) -> Result<()> {
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::DomainError(format!("radius must be positive, got {r}")));
    }
    if spec.kind() == Kind::Compact {
        let limit = if spec.k() == 1 { 2.0 * PI } else { PI };
        if r >= limit {
            return Err(Error::DomainError(format!(
                "radius {r} is not below {limit} in {spec}"
            )));
        }
    }
    Ok(())
}

/// Radius at which the fibre-direction eigenvalue overtakes the base eigenvalue
/// `2kn / (4 sin^2(r/2))`; `+inf` when `k = 1`.
pub fn crossing_threshold(spec: &SpaceSpec) -> Result<f64> {
    if spec.kind() != Kind::Compact {
        return Err(Error::KindError { expected: "compact" });
    }
    let k = spec.k() as f64;
    if spec.k() == 1 {
        return Ok(f64::INFINITY);
    }
    let kn = spec.dim() as f64;
    Ok(2.0 * ((kn + 1.0) / (k - 1.0)).sqrt().atan())
}

/// First nonzero eigenvalue of the Laplacian of the geodesic sphere of radius `r`.
pub fn lambda1_geodesic_sphere(spec: &SpaceSpec, r: f64) -> Result<f64> {
    check_radius(spec, r)?;
    let k = spec.k() as f64;
    let kn = spec.dim() as f64;
    let half = 0.5 * r;
    Ok(match spec.kind() {
        Kind::Euclidean => (kn - 1.0) / (r * r),
        Kind::Compact => {
            let threshold = crossing_threshold(spec)?;
            if r >= threshold {
                return Err(Error::CrossingViolation { r, threshold });
            }
            let (s, c) = half.sin_cos();
            (kn - 1.0) / (4.0 * s * s) + (k - 1.0) / (4.0 * c * c)
        }
        Kind::Noncompact => {
            let (s, c) = (half.sinh(), half.cosh());
            (kn - 1.0) / (4.0 * s * s) - (k - 1.0) / (4.0 * c * c)
        }
    })
}

/// Principal curvatures of `S(r)`, sorted by value descending, zero
/// multiplicities omitted.
pub fn weingarten_spectrum(spec: &SpaceSpec, r: f64) -> Result<Vec<PrincipalCurvature>> {
    check_radius(spec, r)?;
    let k = spec.k();
    let n = spec.n();
    let raw = match spec.kind() {
        Kind::Euclidean => vec![(1.0 / r, n - 1)],
        Kind::Compact => vec![
            (1.0 / r.tan(), k - 1),
            (0.5 / (0.5 * r).tan(), k * (n - 1)),
        ],
        Kind::Noncompact => vec![
            (1.0 / r.tanh(), k - 1),
            (0.5 / (0.5 * r).tanh(), k * (n - 1)),
        ],
    };
    let mut eigs: Vec<PrincipalCurvature> = raw
        .into_iter()
        .filter(|&(_, m)| m > 0)
        .map(|(value, multiplicity)| PrincipalCurvature { value, multiplicity })
        .collect();
    eigs.sort_by(|a, b| b.value.total_cmp(&a.value));
    Ok(eigs)
}

fn trace(eigs: &[PrincipalCurvature]) -> f64 {
    eigs.iter().map(|e| e.value * e.multiplicity as f64).sum()
}

fn squared_norm(eigs: &[PrincipalCurvature]) -> f64 {
    eigs.iter()
        .map(|e| e.value * e.value * e.multiplicity as f64)
        .sum()
}

/// Mean-curvature trace `Tr A(r)`.
pub fn trace_a(spec: &SpaceSpec, r: f64) -> Result<f64> {
    Ok(trace(&weingarten_spectrum(spec, r)?))
}

/// Squared length of the second fundamental form `|A(r)|^2`.
pub fn norm_a_sq(spec: &SpaceSpec, r: f64) -> Result<f64> {
    Ok(squared_norm(&weingarten_spectrum(spec, r)?))
}

/// Central-difference check of the traced Riccati equation:
/// `| -(Tr A(r+h) - Tr A(r-h)) / 2h - (|A(r)|^2 + Ric) |`.
pub fn riccati_residual(spec: &SpaceSpec, r: f64, h: f64) -> Result<f64> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::DomainError(format!("step must be positive, got {h}")));
    }
    let forward = trace_a(spec, r + h)?;
    let backward = trace_a(spec, r - h)?;
    let derivative = -(forward - backward) / (2.0 * h);
    Ok((derivative - (norm_a_sq(spec, r)? + ricci_constant(spec))).abs())
}

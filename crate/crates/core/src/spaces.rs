//! Rank-1 symmetric spaces and their realized models.
//!
//! Curvature is normalized so that compact spaces have sectional curvature in
//! `[1/4, 1]` and non-compact duals in `[-1, -1/4]`:
//!
//! | spec            | model                                   | ambient            |
//! |-----------------|-----------------------------------------|--------------------|
//! | `R`, euclidean  | `R^n`                                   | `R^n`              |
//! | `R`, compact    | `S^n`, radius 2                         | `|x| = 2` in `R^{n+1}` |
//! | `R`, noncompact | `H^n`, hyperboloid                      | `<x,x>_M = -4`, `x_0 > 0` |
//! | `C`, compact    | `CP^n`, doubled Fubini-Study distance   | unit `z` in `C^{n+1}` mod phase |
//! | `C`, noncompact | `CH^n`                                  | `<z,z> = -1` in `C^{n,1}` mod phase |
//!
//! `H` (quaternionic) and `Ca` (Cayley) spaces are formula-only: they carry a
//! [`SpaceSpec`] and feed the closed forms in [`crate::sphere_spectrum`], but
//! every geometric operation rejects them with [`Error::UnrealizedSpace`].
//!
//! Complex coordinates are stored interleaved (`re_0, im_0, re_1, im_1, ...`).
//! Tangent vectors are stored in ambient coordinates scaled so that the
//! ambient (pseudo-)Euclidean norm is the Riemannian norm. For the projective
//! models this means a tangent vector is twice the horizontal velocity of the
//! representative curve.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for ambient constraints on points and tangent vectors.
pub const AMBIENT_TOL: f64 = 1e-12;

/// Tolerance for frame orthonormality.
pub const FRAME_TOL: f64 = 1e-10;

/// Two points closer than this are treated as the cut point's antipode guard.
pub const CUT_LOCUS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    R,
    C,
    H,
    Ca,
}

impl Field {
    /// Real dimension of the division algebra.
    pub fn k(self) -> usize {
        match self {
            Field::R => 1,
            Field::C => 2,
            Field::H => 4,
            Field::Ca => 8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Compact,
    Noncompact,
    Euclidean,
}

#[derive(Deserialize)]
struct RawSpec {
    field: Field,
    n: usize,
    kind: Kind,
}

/// Which rank-1 symmetric space (or Euclidean space) we are working in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct SpaceSpec {
    field: Field,
    n: usize,
    kind: Kind,
}

impl TryFrom<RawSpec> for SpaceSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        SpaceSpec::new(raw.field, raw.n, raw.kind)
    }
}

impl SpaceSpec {
    pub fn new(field: Field, n: usize, kind: Kind) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("n must be positive".into()));
        }
        if field.k() * n < 2 {
            return Err(Error::InvalidSpec(format!(
                "real dimension {} is below 2",
                field.k() * n
            )));
        }
        if field == Field::Ca && n != 2 {
            return Err(Error::InvalidSpec(
                "the Cayley field only admits n = 2".into(),
            ));
        }
        if kind == Kind::Euclidean && field != Field::R {
            return Err(Error::InvalidSpec(
                "euclidean kind requires field R".into(),
            ));
        }
        Ok(SpaceSpec { field, n, kind })
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(Field::R, n, Kind::Euclidean)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.field.k()
    }

    /// Total real dimension `k * n`.
    pub fn dim(&self) -> usize {
        self.k() * self.n
    }

    pub fn is_realized(&self) -> bool {
        matches!(self.field, Field::R | Field::C)
    }

    pub fn model(&self) -> Result<Model> {
        match (self.field, self.kind) {
            (Field::R, Kind::Euclidean) => Ok(Model::Euclidean),
            (Field::R, Kind::Compact) => Ok(Model::Sphere),
            (Field::R, Kind::Noncompact) => Ok(Model::Hyperbolic),
            (Field::C, Kind::Compact) => Ok(Model::ComplexProjective),
            (Field::C, Kind::Noncompact) => Ok(Model::ComplexHyperbolic),
            _ => Err(Error::UnrealizedSpace(self.to_string())),
        }
    }

    /// Length of the ambient coordinate vector of a point.
    pub fn ambient_dim(&self) -> Result<usize> {
        Ok(match self.model()? {
            Model::Euclidean => self.n,
            Model::Sphere | Model::Hyperbolic => self.n + 1,
            Model::ComplexProjective | Model::ComplexHyperbolic => 2 * (self.n + 1),
        })
    }

    /// Injectivity radius under the fixed curvature normalization.
    pub fn injectivity_radius(&self) -> f64 {
        match (self.field, self.kind) {
            (_, Kind::Euclidean) | (_, Kind::Noncompact) => f64::INFINITY,
            (Field::R, Kind::Compact) => 2.0 * PI,
            (_, Kind::Compact) => PI,
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.field {
            Field::R => "",
            Field::C => "C",
            Field::H => "H",
            Field::Ca => "Ca",
        };
        match (self.field, self.kind) {
            (_, Kind::Euclidean) => write!(f, "R^{}", self.n),
            (Field::R, Kind::Compact) => write!(f, "S^{}", self.n),
            (Field::R, Kind::Noncompact) => write!(f, "H^{}", self.n),
            (_, Kind::Compact) => write!(f, "{letter}P^{}", self.n),
            (_, Kind::Noncompact) => write!(f, "{letter}H^{}", self.n),
        }
    }
}

/// The concrete model behind a realized [`SpaceSpec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Euclidean,
    Sphere,
    Hyperbolic,
    ComplexProjective,
    ComplexHyperbolic,
}

/// Constant Ricci curvature `Ric(u, u)` for a unit vector `u`.
///
/// Along a unit geodesic the curvature endomorphism has eigenvalue `±1` on the
/// `k - 1` directions `J gamma'` and `±1/4` on the remaining `k(n - 1)`
/// directions, so the trace is `±(kn + 3k - 4) / 4`.
pub fn ricci_constant(spec: &SpaceSpec) -> f64 {
    let k = spec.k() as f64;
    let kn = spec.dim() as f64;
    let magnitude = (kn + 3.0 * k - 4.0) / 4.0;
    match spec.kind {
        Kind::Compact => magnitude,
        Kind::Noncompact => -magnitude,
        Kind::Euclidean => 0.0,
    }
}

// ---------------------------------------------------------------------------
// raw kernels on ambient slices

fn complex_at(v: &[f64], i: usize) -> Complex64 {
    Complex64::new(v[2 * i], v[2 * i + 1])
}

/// `sum a_i conj(b_i)`, with the first term negated for the pseudo-Hermitian form.
fn hermitian(a: &[f64], b: &[f64], pseudo: bool) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.len() / 2 {
        let term = complex_at(a, i) * complex_at(b, i).conj();
        if pseudo && i == 0 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    acc
}

/// `c * v` for a complex scalar on an interleaved vector.
fn complex_scale(v: &[f64], c: Complex64) -> DVector<f64> {
    let mut out = DVector::zeros(v.len());
    for i in 0..v.len() / 2 {
        let z = complex_at(v, i) * c;
        out[2 * i] = z.re;
        out[2 * i + 1] = z.im;
    }
    out
}

impl Model {
    /// Number of leading ambient coordinates with negative signature.
    fn negative_coords(self) -> usize {
        match self {
            Model::Hyperbolic => 1,
            Model::ComplexHyperbolic => 2,
            _ => 0,
        }
    }

    /// The (pseudo-)Euclidean ambient pairing, which restricts to the
    /// Riemannian metric on tangent vectors.
    pub fn inner(self, a: &[f64], b: &[f64]) -> f64 {
        let neg = self.negative_coords();
        let mut acc = 0.0;
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            if i < neg {
                acc -= x * y;
            } else {
                acc += x * y;
            }
        }
        acc
    }

    fn norm(self, v: &[f64]) -> f64 {
        self.inner(v, v).max(0.0).sqrt()
    }

    /// Relative violation of the point constraint.
    fn constraint_residual(self, x: &[f64]) -> f64 {
        let sq: f64 = x.iter().map(|c| c * c).sum();
        match self {
            Model::Euclidean => 0.0,
            Model::Sphere => (sq - 4.0).abs() / 4.0,
            Model::Hyperbolic => (self.inner(x, x) + 4.0).abs() / sq.max(4.0),
            Model::ComplexProjective => (sq - 1.0).abs(),
            Model::ComplexHyperbolic => (self.inner(x, x) + 1.0).abs() / sq.max(1.0),
        }
    }

    /// Rescale onto the constraint set.
    fn renormalize(self, x: &mut DVector<f64>) {
        match self {
            Model::Euclidean => {}
            Model::Sphere => {
                let s = x.norm();
                *x *= 2.0 / s;
            }
            Model::Hyperbolic => {
                let s = (-self.inner(x.as_slice(), x.as_slice())).sqrt();
                *x *= 2.0 / s;
            }
            Model::ComplexProjective => {
                let s = x.norm();
                *x /= s;
            }
            Model::ComplexHyperbolic => {
                let s = (-self.inner(x.as_slice(), x.as_slice())).sqrt();
                *x /= s;
            }
        }
    }

    /// Projection of an ambient vector onto the (horizontal) tangent space at `p`.
    fn project_tangent(self, p: &[f64], v: &[f64]) -> DVector<f64> {
        let pv = DVector::from_column_slice(p);
        let vv = DVector::from_column_slice(v);
        match self {
            Model::Euclidean => vv,
            Model::Sphere => &vv - &pv * (self.inner(v, p) / 4.0),
            Model::Hyperbolic => &vv + &pv * (self.inner(v, p) / 4.0),
            Model::ComplexProjective => &vv - complex_scale(p, hermitian(v, p, false)),
            Model::ComplexHyperbolic => &vv + complex_scale(p, hermitian(v, p, true)),
        }
    }

    /// Relative violation of tangency at `p`.
    fn tangent_residual(self, p: &[f64], v: &[f64]) -> f64 {
        let scale = v.iter().map(|c| c * c).sum::<f64>().sqrt().max(1.0)
            * p.iter().map(|c| c * c).sum::<f64>().sqrt().max(1.0);
        let raw = match self {
            Model::Euclidean => 0.0,
            Model::Sphere | Model::Hyperbolic => self.inner(v, p).abs(),
            Model::ComplexProjective => hermitian(v, p, false).norm(),
            Model::ComplexHyperbolic => hermitian(v, p, true).norm(),
        };
        raw / scale
    }

    /// Geodesic endpoint `exp_p(v)`; `v` must be tangent at `p`.
    fn exp(self, p: &[f64], v: &[f64]) -> DVector<f64> {
        let theta = self.norm(v);
        let pv = DVector::from_column_slice(p);
        let vv = DVector::from_column_slice(v);
        if theta == 0.0 {
            return pv;
        }
        let half = 0.5 * theta;
        let mut out = match self {
            Model::Euclidean => pv + vv,
            Model::Sphere => pv * half.cos() + vv * (2.0 * half.sin() / theta),
            Model::Hyperbolic => pv * half.cosh() + vv * (2.0 * half.sinh() / theta),
            Model::ComplexProjective => pv * half.cos() + vv * (half.sin() / theta),
            Model::ComplexHyperbolic => pv * half.cosh() + vv * (half.sinh() / theta),
        };
        self.renormalize(&mut out);
        out
    }

    /// Geodesic distance without allocating; agrees with [`Model::log_and_distance`].
    pub(crate) fn distance_raw(self, p: &[f64], q: &[f64]) -> f64 {
        match self {
            Model::Euclidean => p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
            Model::Sphere => {
                let c = self.inner(p, q) / 4.0;
                let u2: f64 = p.iter().zip(q).map(|(a, b)| (b - c * a) * (b - c * a)).sum();
                2.0 * (0.5 * u2.sqrt()).atan2(c)
            }
            Model::Hyperbolic => {
                let c = -self.inner(p, q) / 4.0;
                let mut u2 = 0.0;
                for (i, (a, b)) in p.iter().zip(q).enumerate() {
                    let d = b - c * a;
                    u2 += if i == 0 { -d * d } else { d * d };
                }
                2.0 * (0.5 * u2.max(0.0).sqrt()).asinh()
            }
            Model::ComplexProjective | Model::ComplexHyperbolic => {
                let pseudo = self == Model::ComplexHyperbolic;
                let c = hermitian(q, p, pseudo);
                let modulus = c.norm();
                let phase = if pseudo {
                    -c.conj() / modulus
                } else if modulus > 0.0 {
                    c.conj() / modulus
                } else {
                    Complex64::new(1.0, 0.0)
                };
                let mut u2 = 0.0;
                for i in 0..p.len() / 2 {
                    let d = (complex_at(q, i) * phase - complex_at(p, i) * modulus).norm_sqr();
                    u2 += if pseudo && i == 0 { -d } else { d };
                }
                let un = u2.max(0.0).sqrt();
                if pseudo {
                    2.0 * un.asinh()
                } else {
                    2.0 * un.atan2(modulus)
                }
            }
        }
    }

    /// `(log_p(q), d(p, q))` without cut-locus checks.
    fn log_and_distance(self, p: &[f64], q: &[f64]) -> (DVector<f64>, f64) {
        let pv = DVector::from_column_slice(p);
        let qv = DVector::from_column_slice(q);
        // u is the component of (a phase-aligned) q orthogonal to p and
        // dist is recovered from |u| and the aligned cosine via atan2/asinh
        let (u, dist) = match self {
            Model::Euclidean => {
                let u = qv - pv;
                let d = u.norm();
                return (u, d);
            }
            Model::Sphere => {
                let c = self.inner(p, q) / 4.0;
                let u = qv - &pv * c;
                let d = 2.0 * (0.5 * u.norm()).atan2(c);
                (u, d)
            }
            Model::Hyperbolic => {
                let c = -self.inner(p, q) / 4.0;
                let u = qv - &pv * c;
                let d = 2.0 * (0.5 * self.norm(u.as_slice())).asinh();
                (u, d)
            }
            Model::ComplexProjective => {
                let c = hermitian(q, p, false);
                let modulus = c.norm();
                let phase = if modulus > 0.0 {
                    c.conj() / modulus
                } else {
                    Complex64::new(1.0, 0.0)
                };
                let aligned = complex_scale(q, phase);
                let u = aligned - &pv * modulus;
                let d = 2.0 * u.norm().atan2(modulus);
                (u, d)
            }
            Model::ComplexHyperbolic => {
                let c = hermitian(q, p, true);
                let modulus = c.norm();
                let phase = -c.conj() / modulus;
                let aligned = complex_scale(q, phase);
                let u = aligned - &pv * modulus;
                let d = 2.0 * self.norm(u.as_slice()).asinh();
                (u, d)
            }
        };
        let un = self.norm(u.as_slice());
        if un == 0.0 || dist == 0.0 {
            return (DVector::zeros(p.len()), 0.0);
        }
        let mut log = u * (dist / un);
        // strip the rounding-level normal component
        if self != Model::Euclidean {
            log = self.project_tangent(p, log.as_slice());
            let ln = self.norm(log.as_slice());
            if ln > 0.0 {
                log *= dist / ln;
            }
        }
        (log, dist)
    }
}

// ---------------------------------------------------------------------------
// points, tangent vectors, frames

/// A point of a realized model space in ambient coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    space: SpaceSpec,
    coords: DVector<f64>,
}

impl Point {
    /// Validates the ambient constraint to [`AMBIENT_TOL`].
    pub fn new(space: SpaceSpec, coords: impl Into<Vec<f64>>) -> Result<Self> {
        let coords: Vec<f64> = coords.into();
        let model = space.model()?;
        let expected = space.ambient_dim()?;
        if coords.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        let residual = model.constraint_residual(&coords);
        if residual > AMBIENT_TOL {
            return Err(Error::InvalidPoint(format!(
                "ambient constraint of {space} violated by {residual:e}"
            )));
        }
        if model == Model::Hyperbolic && coords[0] <= 0.0 {
            return Err(Error::InvalidPoint("hyperboloid point on the lower sheet".into()));
        }
        Ok(Point {
            space,
            coords: DVector::from_vec(coords),
        })
    }

    /// Rescales `coords` onto the model before validating; useful for data
    /// read from text files.
    pub fn normalized(space: SpaceSpec, coords: impl Into<Vec<f64>>) -> Result<Self> {
        let model = space.model()?;
        let mut v = DVector::from_vec(coords.into());
        let expected = space.ambient_dim()?;
        if v.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: v.len(),
            });
        }
        if matches!(model, Model::Hyperbolic | Model::ComplexHyperbolic)
            && model.inner(v.as_slice(), v.as_slice()) >= 0.0
        {
            return Err(Error::InvalidPoint("vector is not timelike".into()));
        }
        if model != Model::Euclidean && v.norm() == 0.0 {
            return Err(Error::InvalidPoint("zero vector".into()));
        }
        model.renormalize(&mut v);
        Point::new(space, v.as_slice().to_vec())
    }

    /// The canonical base point: origin, north pole `(2, 0, ...)`, or `[1 : 0 : ...]`.
    pub fn base(space: SpaceSpec) -> Result<Self> {
        let model = space.model()?;
        let mut coords = vec![0.0; space.ambient_dim()?];
        match model {
            Model::Euclidean => {}
            Model::Sphere | Model::Hyperbolic => coords[0] = 2.0,
            Model::ComplexProjective | Model::ComplexHyperbolic => coords[0] = 1.0,
        }
        Point::new(space, coords)
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn coords(&self) -> &[f64] {
        self.coords.as_slice()
    }

    pub(crate) fn model(&self) -> Model {
        self.space.model().expect("points only exist in realized spaces")
    }

    /// Equality as points of the space; projective models compare modulo phase.
    pub fn approx_eq(&self, other: &Point, tol: f64) -> bool {
        if self.space != other.space {
            return false;
        }
        match self.model() {
            Model::ComplexProjective => {
                (hermitian(self.coords(), other.coords(), false).norm() - 1.0).abs() <= tol
            }
            Model::ComplexHyperbolic => {
                (hermitian(self.coords(), other.coords(), true).norm() - 1.0).abs() <= tol
            }
            _ => (&self.coords - &other.coords).amax() <= tol,
        }
    }
}

impl Serialize for Point {
    /// Serializes the ambient coordinates only; the space travels separately.
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coords.iter())
    }
}

/// A tangent vector at `base`, in ambient coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    base: Point,
    components: DVector<f64>,
}

impl TangentVector {
    /// Validates tangency (and horizontality for projective models).
    pub fn new(base: Point, components: impl Into<Vec<f64>>) -> Result<Self> {
        let components: Vec<f64> = components.into();
        if components.len() != base.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: base.coords.len(),
                got: components.len(),
            });
        }
        let residual = base.model().tangent_residual(base.coords(), &components);
        if residual > AMBIENT_TOL {
            return Err(Error::InvalidPoint(format!(
                "vector is not tangent at the base point (residual {residual:e})"
            )));
        }
        Ok(TangentVector {
            base,
            components: DVector::from_vec(components),
        })
    }

    /// Orthogonal projection of an arbitrary ambient vector.
    pub fn project(base: &Point, ambient: &[f64]) -> Result<Self> {
        if ambient.len() != base.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: base.coords.len(),
                got: ambient.len(),
            });
        }
        let components = base.model().project_tangent(base.coords(), ambient);
        Ok(TangentVector {
            base: base.clone(),
            components,
        })
    }

    pub fn zero(base: &Point) -> Self {
        TangentVector {
            base: base.clone(),
            components: DVector::zeros(base.coords.len()),
        }
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn components(&self) -> &[f64] {
        self.components.as_slice()
    }

    pub fn inner(&self, other: &TangentVector) -> f64 {
        self.base.model().inner(self.components(), other.components())
    }

    pub fn norm(&self) -> f64 {
        self.base.model().norm(self.components())
    }

    pub fn scaled(&self, s: f64) -> TangentVector {
        TangentVector {
            base: self.base.clone(),
            components: &self.components * s,
        }
    }

    pub(crate) fn add_scaled(&mut self, other: &[f64], s: f64) {
        for (c, o) in self.components.iter_mut().zip(other) {
            *c += s * o;
        }
    }

    pub(crate) fn from_raw(base: Point, components: DVector<f64>) -> Self {
        TangentVector { base, components }
    }
}

/// An orthonormal basis of the tangent space at `base`; defines normal coordinates.
#[derive(Clone, Debug)]
pub struct Frame {
    base: Point,
    vectors: Vec<TangentVector>,
}

impl Frame {
    /// Gram-Schmidt (two passes) over `candidates` after projecting each to the
    /// tangent space. Candidates that collapse are skipped.
    pub fn gram_schmidt(base: &Point, candidates: &[Vec<f64>]) -> Result<Self> {
        let model = base.model();
        let dim = base.space.dim();
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(dim);
        for cand in candidates {
            if basis.len() == dim {
                break;
            }
            if cand.len() != base.coords.len() {
                return Err(Error::DimensionMismatch {
                    expected: base.coords.len(),
                    got: cand.len(),
                });
            }
            let mut v = model.project_tangent(base.coords(), cand);
            let original = model.norm(v.as_slice());
            if original == 0.0 {
                continue;
            }
            for _ in 0..2 {
                for e in &basis {
                    let c = model.inner(v.as_slice(), e.as_slice());
                    v -= e * c;
                }
            }
            let nv = model.norm(v.as_slice());
            if nv <= 1e-8 * original {
                continue;
            }
            v /= nv;
            basis.push(v);
        }
        if basis.len() != dim {
            return Err(Error::InvalidPoint(format!(
                "candidates span only {} of {} tangent directions",
                basis.len(),
                dim
            )));
        }
        let frame = Frame {
            base: base.clone(),
            vectors: basis
                .into_iter()
                .map(|c| TangentVector::from_raw(base.clone(), c))
                .collect(),
        };
        debug_assert!(frame.orthonormality_error() <= FRAME_TOL);
        Ok(frame)
    }

    /// Frame obtained from the ambient coordinate axes.
    pub fn standard(base: &Point) -> Result<Self> {
        let m = base.coords.len();
        let axes: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let mut e = vec![0.0; m];
                e[i] = 1.0;
                e
            })
            .collect();
        Self::gram_schmidt(base, &axes)
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn vectors(&self) -> &[TangentVector] {
        &self.vectors
    }

    /// `max |<e_i, e_j> - delta_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b) - target).abs());
            }
        }
        worst
    }

    /// The tangent vector `sum_i x_i e_i`.
    pub fn combine(&self, coeffs: &[f64]) -> Result<TangentVector> {
        if coeffs.len() != self.vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vectors.len(),
                got: coeffs.len(),
            });
        }
        let mut out = TangentVector::zero(&self.base);
        for (c, e) in coeffs.iter().zip(&self.vectors) {
            out.add_scaled(e.components(), *c);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// operations

fn check_same_space(p: &Point, q: &Point) -> Result<()> {
    if p.space != q.space {
        return Err(Error::InvalidPoint(format!(
            "points live in different spaces ({} vs {})",
            p.space, q.space
        )));
    }
    Ok(())
}

/// Endpoint of the unit-speed geodesic from `p` with initial velocity `v`.
pub fn exp_map(p: &Point, v: &TangentVector) -> Result<Point> {
    check_same_space(p, &v.base)?;
    let model = p.space.model()?;
    let length = v.norm();
    let radius = p.space.injectivity_radius();
    if length > radius * (1.0 + 1e-12) {
        return Err(Error::BeyondInjectivityRadius { length, radius });
    }
    let coords = model.exp(p.coords(), v.components());
    Ok(Point { space: p.space, coords })
}

/// Inverse of [`exp_map`]: the unique minimizing initial velocity from `p` to `q`.
pub fn log_map(p: &Point, q: &Point) -> Result<TangentVector> {
    check_same_space(p, q)?;
    let model = p.space.model()?;
    let (log, distance) = model.log_and_distance(p.coords(), q.coords());
    if distance >= p.space.injectivity_radius() - CUT_LOCUS_TOL {
        return Err(Error::CutLocus { distance });
    }
    Ok(TangentVector::from_raw(p.clone(), log))
}

/// Geodesic distance.
pub fn distance(p: &Point, q: &Point) -> Result<f64> {
    check_same_space(p, q)?;
    let model = p.space.model()?;
    Ok(model.distance_raw(p.coords(), q.coords()))
}

/// Closed-form distance formulas, used as an independent cross-check of [`distance`].
pub fn distance_closed_form(p: &Point, q: &Point) -> Result<f64> {
    check_same_space(p, q)?;
    let model = p.space.model()?;
    let (a, b) = (p.coords(), q.coords());
    Ok(match model {
        Model::Euclidean => (&p.coords - &q.coords).norm(),
        Model::Sphere => 2.0 * (model.inner(a, b) / 4.0).clamp(-1.0, 1.0).acos(),
        Model::Hyperbolic => 2.0 * (-model.inner(a, b) / 4.0).max(1.0).acosh(),
        Model::ComplexProjective => 2.0 * hermitian(a, b, false).norm().min(1.0).acos(),
        Model::ComplexHyperbolic => 2.0 * hermitian(a, b, true).norm().max(1.0).acosh(),
    })
}

/// Components of `log_{p0}(q)` in `frame`; `|X| = d(p0, q)`.
pub fn normal_coordinates(p0: &Point, frame: &Frame, q: &Point) -> Result<Vec<f64>> {
    if frame.base.space != p0.space || (&frame.base.coords - &p0.coords).amax() > AMBIENT_TOL {
        return Err(Error::InvalidPoint("frame is not based at p0".into()));
    }
    let log = log_map(p0, q)?;
    Ok(frame.vectors.iter().map(|e| e.inner(&log)).collect())
}

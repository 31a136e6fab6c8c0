//! End-to-end check of `lambda_1(M) <= 1/vol(M) * sum_j M_jj lambda_1(S(r_j))`
//! on meshed hypersurfaces.
//!
//! Pipeline: mesh -> operators -> center of mass `p0` of the vertices
//! (weights = lumped mass, `G(t) = 1/t`) -> right-hand side at the vertex
//! distances from `p0` -> discrete `lambda_1` -> Rayleigh quotients of the
//! coordinate test functions `f_i = x_i / r` in normal coordinates at `p0`.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::center_of_mass::{default_tolerance, solve_com, MassDistribution, WeightedPointCloud, DEFAULT_MAX_ITER};
use crate::discrete_laplace::{
    build_operators, first_eigenvalue_with, generate_shape, DiscreteOperators, EigenOptions, ShapeFamily,
    SurfaceMesh,
};
use crate::error::{Error, Result};
use crate::spaces::{distance, normal_coordinates, Frame, Kind, Point, SpaceSpec};
use crate::sphere_spectrum::lambda1_geodesic_sphere;

/// Vertices closer than this to `p0` make the test functions undefined.
pub const VERTEX_AT_CENTER_EPS: f64 = 1e-8;

/// Relative rounding allowance for the variational Rayleigh inequality.
pub const RAYLEIGH_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Tolerances {
    /// `C` in `tol(h) = C h max(rhs_average, 1)`.
    pub c: f64,
    /// Center-of-mass stopping tolerance; defaults to `1e-10 (1 + diameter)`.
    pub com_tol: Option<f64>,
    pub com_max_iter: usize,
    pub eigen: EigenOptions,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            c: 0.5,
            com_tol: None,
            com_max_iter: DEFAULT_MAX_ITER,
            eigen: EigenOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EqualityClass {
    EqualityWithinTol,
    Strict,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &'static str, value: f64, threshold: f64) -> Self {
        Check {
            name,
            value,
            threshold,
            pass: value <= threshold,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub space: SpaceSpec,
    /// `None` for meshes read from a file.
    pub shape: Option<ShapeFamily>,
    pub subdiv: Option<usize>,
    pub vertices: usize,
    pub min_edge: f64,
    pub max_edge: f64,
    pub total_volume: f64,
    pub p0: Point,
    pub com_residual: f64,
    pub com_iterations: usize,
    /// Distance from `p0` to the construction center of generated shapes.
    pub center_offset: Option<f64>,
    pub max_distance: f64,
    pub lambda1_mesh: f64,
    pub eigen_residual: f64,
    pub rhs_integral: f64,
    pub rhs_average: f64,
    pub gap: f64,
    pub relative_gap: f64,
    pub tolerance: f64,
    pub relative_tolerance: f64,
    pub rayleigh_sum: f64,
    pub rayleigh_mass_sum: f64,
    /// `sqrt(sum_i mean_M(f_i)^2)` removed before the Rayleigh checks.
    pub centering_magnitude: f64,
    pub bound_holds: bool,
    pub equality_class: EqualityClass,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `f_i(v) = x_i(v) / |x(v)|` with `x` the normal coordinates of `v` at `p0`.
/// Returns one vector of vertex values per frame direction.
pub fn test_functions(mesh: &SurfaceMesh, p0: &Point, frame: &Frame) -> Result<Vec<Vec<f64>>> {
    let dim = frame.vectors().len();
    let mut f = vec![vec![0.0; mesh.num_vertices()]; dim];
    for (j, v) in mesh.vertices().iter().enumerate() {
        let x = normal_coordinates(p0, frame, v)?;
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r < VERTEX_AT_CENTER_EPS {
            return Err(Error::VertexAtCenter { vertex: j, distance: r });
        }
        for (fi, xi) in f.iter_mut().zip(&x) {
            fi[j] = xi / r;
        }
    }
    Ok(f)
}

/// Generates the shape and verifies the bound on it.
pub fn verify_bound(
    space: SpaceSpec,
    shape: ShapeFamily,
    subdiv: usize,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let mesh = generate_shape(space, shape, subdiv)?;
    let mut report = verify_mesh(&mesh, tol)?;
    report.shape = Some(shape);
    report.subdiv = Some(subdiv);
    let center = Point::base(space)?;
    let offset = distance(&report.p0, &center)?;
    report.center_offset = Some(offset);
    if shape.is_geodesic_sphere() {
        let com_tol = tol.com_tol.unwrap_or_else(|| default_tolerance(2.0 * report.max_distance));
        report
            .checks
            .push(Check::at_most("center_consistency", offset, 10.0 * com_tol));
    }
    Ok(report)
}

/// Verifies the bound on an arbitrary closed mesh.
pub fn verify_mesh(mesh: &SurfaceMesh, tol: &Tolerances) -> Result<VerificationReport> {
    let space = mesh.space();
    let ops = build_operators(mesh)?;

    let cloud = WeightedPointCloud::new(space, mesh.vertices().to_vec(), ops.mass.clone())?;
    let com_tol = match tol.com_tol {
        Some(t) => t,
        None => default_tolerance(cloud.diameter()),
    };
    let com = solve_com(&cloud, &MassDistribution::InverseT, com_tol, tol.com_max_iter)?.into_converged()?;
    let p0 = com.p0.clone();

    let distances = mesh
        .vertices()
        .iter()
        .map(|v| distance(&p0, v))
        .collect::<Result<Vec<_>>>()?;
    let max_distance = distances.iter().copied().fold(0.0, f64::max);
    if space.kind() == Kind::Compact && !(max_distance < FRAC_PI_2) {
        return Err(Error::BallViolation {
            max_distance,
            bound: FRAC_PI_2,
        });
    }

    let rhs_terms = distances
        .iter()
        .zip(&ops.mass)
        .map(|(r, m)| Ok(m * lambda1_geodesic_sphere(&space, *r)?))
        .collect::<Result<Vec<f64>>>()?;
    let rhs_integral = crate::discrete_laplace::operators::pairwise_sum(&rhs_terms);
    let rhs_average = rhs_integral / ops.total_volume;

    let eig = first_eigenvalue_with(&ops, &tol.eigen)?;
    let lambda1 = eig.lambda1;

    let frame = Frame::standard(&p0)?;
    let fs = test_functions(mesh, &p0, &frame)?;
    let chain = RayleighChain::compute(&ops, fs);

    let h = mesh.max_edge();
    let scale = rhs_average.max(1.0);
    let relative_tolerance = tol.c * h;
    let tolerance = relative_tolerance * scale;
    let gap = rhs_average - lambda1;
    let relative_gap = gap / scale;
    let bound_holds = lambda1 <= rhs_average + tolerance;
    let equality_class = if !bound_holds {
        EqualityClass::Violated
    } else if relative_gap.abs() <= relative_tolerance {
        EqualityClass::EqualityWithinTol
    } else {
        EqualityClass::Strict
    };

    let checks = vec![
        Check::at_most("main_bound", lambda1 - rhs_average, tolerance),
        Check::at_most(
            "rayleigh_variational",
            lambda1 * chain.mass_sum - chain.energy_sum,
            RAYLEIGH_SLACK * chain.energy_sum.abs(),
        ),
        Check::at_most(
            "rayleigh_vs_rhs",
            chain.energy_sum - rhs_integral,
            tolerance * ops.total_volume,
        ),
        Check::at_most(
            "pointwise_normalization",
            (chain.raw_mass_sum - ops.total_volume).abs(),
            1e-12 * ops.total_volume,
        ),
        Check::at_most("com_residual", com.residual, com_tol),
        Check::at_most("eigen_residual", eig.residual, tol.eigen.tol),
    ];

    Ok(VerificationReport {
        space,
        shape: None,
        subdiv: None,
        vertices: mesh.num_vertices(),
        min_edge: mesh.min_edge(),
        max_edge: h,
        total_volume: ops.total_volume,
        p0,
        com_residual: com.residual,
        com_iterations: com.iterations,
        center_offset: None,
        max_distance,
        lambda1_mesh: lambda1,
        eigen_residual: eig.residual,
        rhs_integral,
        rhs_average,
        gap,
        relative_gap,
        tolerance,
        relative_tolerance,
        rayleigh_sum: chain.energy_sum,
        rayleigh_mass_sum: chain.mass_sum,
        centering_magnitude: chain.centering,
        bound_holds,
        equality_class,
        checks,
    })
}

struct RayleighChain {
    /// `sum_i f_i^T M f_i` before re-centering.
    raw_mass_sum: f64,
    /// `sum_i g_i^T M g_i` with `g_i = f_i - mean_M(f_i)`.
    mass_sum: f64,
    energy_sum: f64,
    centering: f64,
}

impl RayleighChain {
    fn compute(ops: &DiscreteOperators, fs: Vec<Vec<f64>>) -> Self {
        let mut raw_mass_sum = 0.0;
        let mut mass_sum = 0.0;
        let mut energy_sum = 0.0;
        let mut centering = 0.0;
        for mut f in fs {
            raw_mass_sum += ops.mass_norm_sq(&f);
            let mean = ops.mass_mean(&f);
            centering += mean * mean;
            for x in f.iter_mut() {
                *x -= mean;
            }
            mass_sum += ops.mass_norm_sq(&f);
            energy_sum += ops.stiffness.quadratic_form(&f);
        }
        RayleighChain {
            raw_mass_sum,
            mass_sum,
            energy_sum,
            centering: centering.sqrt(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementStudy {
    pub reports: Vec<VerificationReport>,
    /// Least-squares slope of `log |relative_gap|` against `log h` over all
    /// levels; `None` when the gap is at rounding level somewhere.
    pub gap_order: Option<f64>,
    /// `|gap_last - gap_prev| / |gap_last|` for the two finest levels.
    pub gap_change: f64,
    pub bound_holds_all: bool,
}

/// Verifies the shape at each subdivision level (at least three).
pub fn refinement_study(
    space: SpaceSpec,
    shape: ShapeFamily,
    subdivs: &[usize],
    tol: &Tolerances,
) -> Result<RefinementStudy> {
    if subdivs.len() < 3 {
        return Err(Error::DomainError(format!(
            "a refinement study needs at least 3 levels, got {}",
            subdivs.len()
        )));
    }
    let reports = subdivs
        .iter()
        .map(|&s| verify_bound(space, shape, s, tol))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(f64, f64)> = reports
        .iter()
        .map(|r| (r.max_edge, r.relative_gap.abs()))
        .collect();
    let last = &reports[reports.len() - 1];
    let prev = &reports[reports.len() - 2];
    Ok(RefinementStudy {
        gap_order: observed_order(&points),
        gap_change: (last.gap - prev.gap).abs() / last.gap.abs(),
        bound_holds_all: reports.iter().all(|r| r.bound_holds),
        reports,
    })
}

/// Slope of `log e` against `log h`; `None` if any error is below `1e-12`.
pub fn observed_order(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|(_, e)| !(*e > 1e-12)) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(h, e)| (h.ln(), e.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

//! Center of mass of a weighted point cloud with respect to a mass
//! distribution `G`.
//!
//! The center of mass is a zero of the tangent field
//! `v(q) = sum_j w_j G(d(q, p_j)) log_q(p_j)`. It is found by the damped
//! fixed-point iteration `q <- exp_q(delta v(q) / W)` with `W = sum_j w_j`,
//! halving `delta` until the residual `|v| / W` decreases.
//!
//! For `G(t) = 1/t` the field is the sum of weighted unit vectors pointing at
//! the data, so the center is a Riemannian geometric median.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{exp_map, log_map, Kind, Point, SpaceSpec, TangentVector};

/// Data points closer than this to the evaluation point are left out of the field.
pub const COINCIDENCE_EPS: f64 = 1e-12;

/// Slack on the compact-space diameter bound `pi`.
pub const DIAMETER_SLACK: f64 = 1e-9;

/// Size of the one-off kick applied when the iteration stalls on a data point.
pub const STALL_PERTURBATION: f64 = 1e-8;

pub const DEFAULT_MAX_ITER: usize = 10_000;

/// A finite measure: points with positive weights.
#[derive(Clone, Debug)]
pub struct WeightedPointCloud {
    space: SpaceSpec,
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl WeightedPointCloud {
    /// Checks the cheap invariants (one realized space, positive weights, at
    /// least one point). The compact-space diameter bound is quadratic to
    /// check and is enforced by [`solve_com`] or [`Self::check_diameter`].
    pub fn new(space: SpaceSpec, points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        space.model()?;
        if points.is_empty() {
            return Err(Error::InvalidCloud("cloud has no points".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidCloud(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(p) = points.iter().find(|p| p.space() != space) {
            return Err(Error::InvalidCloud(format!(
                "point in {} inside a cloud over {space}",
                p.space()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidCloud(format!("weight {w} is not positive")));
        }
        Ok(WeightedPointCloud { space, points, weights })
    }

    pub fn uniform(space: SpaceSpec, points: Vec<Point>) -> Result<Self> {
        let weights = vec![1.0; points.len()];
        Self::new(space, points, weights)
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `max_ij d(p_i, p_j)`.
    pub fn diameter(&self) -> f64 {
        self.scan().diameter
    }

    pub fn check_diameter(&self) -> Result<()> {
        check_diameter(self.space, self.diameter())
    }

    /// One quadratic pass: diameter and the weighted 1-median among cloud members.
    fn scan(&self) -> Scan {
        let model = self.space.model().expect("validated at construction");
        let n = self.points.len();
        let mut cost = vec![0.0; n];
        let mut diameter: f64 = 0.0;
        for i in 0..n {
            let pi = self.points[i].coords();
            for j in (i + 1)..n {
                let d = model.distance_raw(pi, self.points[j].coords());
                cost[i] += self.weights[j] * d;
                cost[j] += self.weights[i] * d;
                diameter = diameter.max(d);
            }
        }
        let medoid = cost
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        Scan { diameter, medoid }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: CloudFile = serde_json::from_str(text)?;
        file.into_cloud()
    }

    pub fn to_json_string(&self) -> Result<String> {
        let file = CloudFile {
            space: self.space,
            points: self.points.iter().map(|p| p.coords().to_vec()).collect(),
            weights: Some(self.weights.clone()),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }
}

struct Scan {
    diameter: f64,
    medoid: usize,
}

fn check_diameter(space: SpaceSpec, diameter: f64) -> Result<()> {
    if space.kind() == Kind::Compact {
        let bound = std::f64::consts::PI - DIAMETER_SLACK;
        if diameter > bound {
            return Err(Error::DiameterViolation { diameter, bound });
        }
    }
    Ok(())
}

/// On-disk point-cloud schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CloudFile {
    pub space: SpaceSpec,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl CloudFile {
    /// Points are renormalized onto the model; coordinates more than 1e-6 off
    /// the constraint are rejected.
    pub fn into_cloud(self) -> Result<WeightedPointCloud> {
        let points = self
            .points
            .into_iter()
            .map(|c| parse_point(self.space, c))
            .collect::<Result<Vec<_>>>()?;
        let weights = self.weights.unwrap_or_else(|| vec![1.0; points.len()]);
        WeightedPointCloud::new(self.space, points, weights)
    }
}

pub(crate) fn parse_point(space: SpaceSpec, coords: Vec<f64>) -> Result<Point> {
    let normalized = Point::normalized(space, coords.clone())?;
    let drift = normalized
        .coords()
        .iter()
        .zip(&coords)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let scale = coords.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    if drift > 1e-6 * scale {
        return Err(Error::InvalidPoint(format!(
            "coordinates are {drift:e} away from {space}"
        )));
    }
    Ok(normalized)
}

/// Mass distribution function `G` on `[0, domain]`.
#[derive(Clone, Debug, PartialEq)]
pub enum MassDistribution {
    /// `G(t) = 1/t`
    InverseT,
    /// `G(t) = 1`
    Constant,
    /// Piecewise-linear interpolation of `(t, G(t))` knots, starting at `t = 0`,
    /// held constant past the last knot.
    Tabulated(Vec<(f64, f64)>),
}

impl MassDistribution {
    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::DomainError("a tabulated G needs at least two knots".into()));
        }
        if knots[0].0 != 0.0 {
            return Err(Error::DomainError("the first knot must sit at t = 0".into()));
        }
        if knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::DomainError("knots must be strictly increasing".into()));
        }
        if knots.iter().any(|k| !k.0.is_finite() || !k.1.is_finite()) {
            return Err(Error::DomainError("knots must be finite".into()));
        }
        if knots[0].1 < 0.0 || knots[1..].iter().any(|k| k.1 <= 0.0) {
            return Err(Error::DomainError("G must be positive on the open interval".into()));
        }
        Ok(MassDistribution::Tabulated(knots))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            MassDistribution::InverseT => 1.0 / t,
            MassDistribution::Constant => 1.0,
            MassDistribution::Tabulated(knots) => {
                let idx = knots.partition_point(|k| k.0 <= t);
                if idx >= knots.len() {
                    return knots[knots.len() - 1].1;
                }
                let (t0, g0) = knots[idx - 1];
                let (t1, g1) = knots[idx];
                g0 + (g1 - g0) * (t - t0) / (t1 - t0)
            }
        }
    }
}

/// Outcome of [`solve_com`]. `converged` implies `residual <= tol`.
#[derive(Clone, Debug, Serialize)]
pub struct ComResult {
    pub p0: Point,
    /// `|v(p0)| / sum_j w_j`
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl ComResult {
    /// Turns an unconverged result into [`Error::NonConvergence`].
    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence {
                iterations: self.iterations,
                residual: self.residual,
            })
        }
    }
}

/// `v(q) = sum_j w_j G(d(q, p_j)) log_q(p_j)`; data points within
/// [`COINCIDENCE_EPS`] of `q` contribute nothing.
pub fn com_field(
    cloud: &WeightedPointCloud,
    g: &MassDistribution,
    q: &Point,
) -> Result<TangentVector> {
    if q.space() != cloud.space {
        return Err(Error::InvalidPoint(format!(
            "evaluation point in {} for a cloud over {}",
            q.space(),
            cloud.space
        )));
    }
    let mut field = TangentVector::zero(q);
    for (p, w) in cloud.points.iter().zip(&cloud.weights) {
        let log = log_map(q, p)?;
        let t = log.norm();
        if t < COINCIDENCE_EPS {
            continue;
        }
        field.add_scaled(log.components(), w * g.eval(t));
    }
    Ok(field)
}

fn residual_at(cloud: &WeightedPointCloud, g: &MassDistribution, q: &Point) -> Result<(TangentVector, f64)> {
    let v = com_field(cloud, g, q)?;
    let r = v.norm() / cloud.total_weight();
    Ok((v, r))
}

/// Default stopping tolerance `1e-10 (1 + diameter)`.
pub fn default_tolerance(diameter: f64) -> f64 {
    1e-10 * (1.0 + diameter)
}

/// [`solve_com`] with the default tolerance and iteration cap.
pub fn solve_com_default(cloud: &WeightedPointCloud, g: &MassDistribution) -> Result<ComResult> {
    let scan = cloud.scan();
    check_diameter(cloud.space, scan.diameter)?;
    iterate(cloud, g, default_tolerance(scan.diameter), DEFAULT_MAX_ITER, scan.medoid)
}

/// Damped fixed-point iteration for the center of mass, started from the
/// cloud member minimizing `sum_j w_j d(., p_j)`.
///
/// Hitting `max_iter` (or a step size underflow) is reported through
/// `converged = false` with the best iterate, not as an error.
pub fn solve_com(
    cloud: &WeightedPointCloud,
    g: &MassDistribution,
    tol: f64,
    max_iter: usize,
) -> Result<ComResult> {
    if !(tol > 0.0) {
        return Err(Error::DomainError(format!("tolerance must be positive, got {tol}")));
    }
    let scan = cloud.scan();
    check_diameter(cloud.space, scan.diameter)?;
    iterate(cloud, g, tol, max_iter, scan.medoid)
}

fn iterate(
    cloud: &WeightedPointCloud,
    g: &MassDistribution,
    tol: f64,
    max_iter: usize,
    start: usize,
) -> Result<ComResult> {
    const MIN_STEP: f64 = 1e-14;
    let model = cloud.space.model()?;
    let total = cloud.total_weight();
    let mut q = cloud.points[start].clone();
    let (mut v, mut res) = residual_at(cloud, g, &q)?;
    let mut perturbed = false;
    let mut iterations = 0;

    while res > tol && iterations < max_iter {
        iterations += 1;
        let mut delta = 1.0;
        let mut accepted = None;
        while delta >= MIN_STEP {
            let step = v.scaled(delta / total);
            if let Ok(candidate) = exp_map(&q, &step) {
                if let Ok((cv, cres)) = residual_at(cloud, g, &candidate) {
                    if cres < res {
                        accepted = Some((candidate, cv, cres));
                        break;
                    }
                }
            }
            delta *= 0.5;
        }
        match accepted {
            Some((candidate, cv, cres)) => {
                q = candidate;
                v = cv;
                res = cres;
            }
            None => {
                let on_data_point = cloud
                    .points
                    .iter()
                    .any(|p| model.distance_raw(p.coords(), q.coords()) < COINCIDENCE_EPS);
                if perturbed || !on_data_point {
                    break;
                }
                perturbed = true;
                q = kick(&q)?;
                let (kv, kres) = residual_at(cloud, g, &q)?;
                v = kv;
                res = kres;
            }
        }
    }
    Ok(ComResult {
        p0: q,
        residual: res,
        iterations,
        converged: res <= tol,
    })
}

/// Moves `q` by [`STALL_PERTURBATION`] in a fixed pseudo-random tangent direction.
fn kick(q: &Point) -> Result<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let ambient: Vec<f64> = q.coords().iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    let dir = TangentVector::project(q, &ambient)?;
    let n = dir.norm();
    exp_map(q, &dir.scaled(STALL_PERTURBATION / n))
}

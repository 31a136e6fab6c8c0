use crate::error::{Error, Result};

use super::mesh::{Cells, SurfaceMesh};
use super::sparse::CsrMatrix;

/// Stiffness and lumped mass of the piecewise-linear Laplace-Beltrami operator.
///
/// `f^T L f` is the Dirichlet energy of the interpolant of `f`; the
/// generalized eigenproblem `L u = lambda M u` discretizes `Delta_M u = lambda u`.
#[derive(Clone, Debug)]
pub struct DiscreteOperators {
    pub stiffness: CsrMatrix,
    pub mass: Vec<f64>,
    pub total_volume: f64,
}

/// Area of a triangle from its side lengths (Kahan's stable Heron formula).
pub fn triangle_area(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * q.max(0.0).sqrt()
}

/// Cotangents of the angles opposite sides `a`, `b`, `c`.
pub fn cotangents_from_lengths(a: f64, b: f64, c: f64) -> [f64; 3] {
    let area4 = 4.0 * triangle_area(a, b, c);
    let (a2, b2, c2) = (a * a, b * b, c * c);
    [
        (b2 + c2 - a2) / area4,
        (a2 + c2 - b2) / area4,
        (a2 + b2 - c2) / area4,
    ]
}

/// Intrinsic cotangent stiffness and barycentric lumped mass from the mesh's
/// geodesic edge lengths. Polylines use `1/length` edge weights and half the
/// incident lengths as mass.
pub fn build_operators(mesh: &SurfaceMesh) -> Result<DiscreteOperators> {
    let n = mesh.num_vertices();
    let lengths = mesh.edge_lengths();
    let mut mass = vec![0.0; n];
    let mut offdiag: Vec<(usize, usize, f64)> = Vec::new();

    match mesh.cells() {
        Cells::Triangles(tris) => {
            for (cell, (t, ce)) in tris.iter().zip(mesh.cell_edges()).enumerate() {
                let [a, b, c] = ce.map(|e| lengths[e]);
                let area = triangle_area(a, b, c);
                if !(area > 0.0) {
                    return Err(Error::DegenerateTriangle { cell, slack: 0.0 });
                }
                let cot = cotangents_from_lengths(a, b, c);
                // corner k is opposite the edge joining the other two corners
                for k in 0..3 {
                    let (i, j) = (t[(k + 1) % 3], t[(k + 2) % 3]);
                    let w = -0.5 * cot[k];
                    offdiag.push((i, j, w));
                    offdiag.push((j, i, w));
                }
                for &v in t {
                    mass[v] += area / 3.0;
                }
            }
        }
        Cells::Segments(segs) => {
            for (s, e) in segs.iter().zip(segment_edges(mesh, segs)) {
                let len = lengths[e];
                let w = -1.0 / len;
                offdiag.push((s[0], s[1], w));
                offdiag.push((s[1], s[0], w));
                mass[s[0]] += 0.5 * len;
                mass[s[1]] += 0.5 * len;
            }
        }
    }

    // merge off-diagonals first so the diagonal is the exact negated row sum
    let merged = CsrMatrix::from_triplets(n, offdiag);
    let mut triplets = Vec::with_capacity(merged.nnz() + n);
    for i in 0..n {
        let mut row_sum = 0.0;
        for (j, v) in merged.row(i) {
            triplets.push((i, j, v));
            row_sum += v;
        }
        triplets.push((i, i, -row_sum));
    }
    let stiffness = CsrMatrix::from_triplets(n, triplets);
    let total_volume = pairwise_sum(&mass);
    Ok(DiscreteOperators {
        stiffness,
        mass,
        total_volume,
    })
}

fn segment_edges(mesh: &SurfaceMesh, segs: &[[usize; 2]]) -> Vec<usize> {
    let index: std::collections::HashMap<[usize; 2], usize> = mesh
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| (*e, i))
        .collect();
    segs.iter()
        .map(|s| index[&[s[0].min(s[1]), s[0].max(s[1])]])
        .collect()
}

/// Pairwise summation, deterministic and accurate for long vectors.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 16 {
        return x.iter().sum();
    }
    let mid = x.len() / 2;
    pairwise_sum(&x[..mid]) + pairwise_sum(&x[mid..])
}

impl DiscreteOperators {
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    /// `f^T M f` for the diagonal mass.
    pub fn mass_norm_sq(&self, f: &[f64]) -> f64 {
        let terms: Vec<f64> = f.iter().zip(&self.mass).map(|(x, m)| m * x * x).collect();
        pairwise_sum(&terms)
    }

    /// Mass-weighted mean `sum_j M_jj f_j / vol`.
    pub fn mass_mean(&self, f: &[f64]) -> f64 {
        let terms: Vec<f64> = f.iter().zip(&self.mass).map(|(x, m)| m * x).collect();
        pairwise_sum(&terms) / self.total_volume
    }
}

/// `(f^T L f) / (f^T M f)`.
pub fn rayleigh_quotient(ops: &DiscreteOperators, f: &[f64]) -> Result<f64> {
    if f.len() != ops.dim() {
        return Err(Error::DimensionMismatch {
            expected: ops.dim(),
            got: f.len(),
        });
    }
    let denom = ops.mass_norm_sq(f);
    if !(denom > 0.0) {
        return Err(Error::ZeroFunction);
    }
    Ok(ops.stiffness.quadratic_form(f) / denom)
}

//! Compressed sparse row storage and an envelope (skyline) Cholesky
//! factorization under a reverse Cuthill-McKee ordering.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Square sparse matrix in CSR form with sorted column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed in
    /// input order, so the result is deterministic for a fixed triplet order.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(col, value)` pairs of one row.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|(c, _)| *c == j).map(|(_, v)| v).unwrap_or(0.0)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// `x^T A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| (self.get(j, i) - v).abs() <= tol))
    }
}

/// Reverse Cuthill-McKee ordering of the matrix graph; `order[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j != i).collect())
        .collect();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    while order.len() < n {
        let seed = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree[i], i))
            .expect("unvisited vertex remains");
        let start = pseudo_peripheral(&adj, &degree, seed);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Repeated BFS from the last, lowest-degree vertex of the deepest level.
fn pseudo_peripheral(adj: &[Vec<usize>], degree: &[usize], seed: usize) -> usize {
    let mut current = seed;
    let mut depth = 0;
    for _ in 0..8 {
        let levels = bfs_levels(adj, current);
        let ecc = *levels.iter().flatten().max().unwrap_or(&0);
        let candidate = levels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == Some(ecc))
            .map(|(i, _)| i)
            .min_by_key(|&i| (degree[i], i))
            .unwrap_or(current);
        if ecc <= depth {
            break;
        }
        depth = ecc;
        current = candidate;
    }
    current
}

fn bfs_levels(adj: &[Vec<usize>], start: usize) -> Vec<Option<usize>> {
    let mut level = vec![None; adj.len()];
    level[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        let lv = level[v].expect("queued vertices are levelled");
        for &w in &adj[v] {
            if level[w].is_none() {
                level[w] = Some(lv + 1);
                queue.push_back(w);
            }
        }
    }
    level
}

/// Cholesky factor `P A P^T = L L^T` stored row-wise over the envelope.
#[derive(Clone, Debug)]
pub struct EnvelopeCholesky {
    order: Vec<usize>,
    position: Vec<usize>,
    first: Vec<usize>,
    row_start: Vec<usize>,
    data: Vec<f64>,
}

impl EnvelopeCholesky {
    /// Factors `a + diag(shift)`; fails if the matrix is not positive definite.
    pub fn factor(a: &CsrMatrix, shift: &[f64]) -> Result<Self> {
        let n = a.dim();
        let order = reverse_cuthill_mckee(a);
        let mut position = vec![0usize; n];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for old in 0..n {
            let i = position[old];
            for (c, _) in a.row(old) {
                let j = position[c];
                if j < i {
                    first[i] = first[i].min(j);
                }
            }
        }
        let mut row_start = vec![0usize; n + 1];
        for i in 0..n {
            row_start[i + 1] = row_start[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; row_start[n]];
        for old in 0..n {
            let i = position[old];
            for (c, v) in a.row(old) {
                let j = position[c];
                if j <= i {
                    data[row_start[i] + j - first[i]] += v;
                }
            }
            data[row_start[i] + i - first[i]] += shift[old];
        }

        for i in 0..n {
            let fi = first[i];
            let si = row_start[i];
            for j in fi..i {
                let fj = first[j];
                let sj = row_start[j];
                let lo = fi.max(fj);
                let mut s = data[si + j - fi];
                let ri = &data[si + lo - fi..si + j - fi];
                let rj = &data[sj + lo - fj..sj + j - fj];
                s -= ri.iter().zip(rj).map(|(x, y)| x * y).sum::<f64>();
                data[si + j - fi] = s / data[sj + j - fj];
            }
            let row = &data[si..si + i - fi];
            let d = data[si + i - fi] - row.iter().map(|x| x * x).sum::<f64>();
            if !(d > 0.0) {
                return Err(Error::SolverNonConvergence {
                    iterations: 0,
                    residual: d,
                });
            }
            data[si + i - fi] = d.sqrt();
        }
        Ok(EnvelopeCholesky {
            order,
            position,
            first,
            row_start,
            data,
        })
    }

    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.order.len();
        let mut y: Vec<f64> = self.order.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let si = self.row_start[i];
            let row = &self.data[si..si + i - fi];
            let s: f64 = row.iter().zip(&y[fi..i]).map(|(l, x)| l * x).sum();
            y[i] = (y[i] - s) / self.data[si + i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let si = self.row_start[i];
            y[i] /= self.data[si + i - fi];
            let xi = y[i];
            for (k, l) in self.data[si..si + i - fi].iter().enumerate() {
                y[fi + k] -= l * xi;
            }
        }
        (0..n).map(|old| y[self.position[old]]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_laplacian(n: usize, shift: f64) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 + shift));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn triplets_merge_duplicates() {
        let m = CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (1, 0, 2.0), (0, 0, 0.5), (0, 1, 2.0)]);
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 0), 1.5);
        assert_eq!(m.mul_vec(&[1.0, 1.0]), vec![3.5, 2.0]);
        assert!(m.is_symmetric(0.0));
    }

    #[test]
    fn rcm_is_a_permutation() {
        let m = path_laplacian(30, 0.0);
        let mut order = reverse_cuthill_mckee(&m);
        order.sort();
        assert_eq!(order, (0..30).collect::<Vec<_>>());
    }

    #[test]
    fn cholesky_solves_shuffled_system() {
        // a cycle graph with scrambled labels, shifted to be definite
        let n = 40;
        let label = |i: usize| (i * 17) % n;
        let mut t = Vec::new();
        for i in 0..n {
            let (a, b) = (label(i), label((i + 1) % n));
            t.push((a, b, -1.0));
            t.push((b, a, -1.0));
            t.push((a, a, 2.0));
        }
        let m = CsrMatrix::from_triplets(n, t);
        let shift = vec![0.1; n];
        let f = EnvelopeCholesky::factor(&m, &shift).unwrap();
        // envelope of a cycle under RCM stays narrow
        assert!(f.envelope_size() <= 4 * n);
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b = m.mul_vec(&x_true);
        for (bi, xi) in b.iter_mut().zip(&x_true) {
            *bi += 0.1 * xi;
        }
        let x = f.solve(&b);
        for (a, e) in x.iter().zip(&x_true) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_matrix_rejected() {
        let m = path_laplacian(5, -3.0);
        assert!(EnvelopeCholesky::factor(&m, &[0.0; 5]).is_err());
    }
}

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::spaces::{distance, Point, SpaceSpec};

/// Cells of a closed hypersurface mesh: triangles in 3-dimensional spaces,
/// segments of a closed polyline in 2-dimensional spaces.
#[derive(Clone, Debug, PartialEq)]
pub enum Cells {
    Triangles(Vec<[usize; 3]>),
    Segments(Vec<[usize; 2]>),
}

impl Cells {
    pub fn len(&self) -> usize {
        match self {
            Cells::Triangles(t) => t.len(),
            Cells::Segments(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A closed, connected hypersurface mesh with geodesic edge lengths.
#[derive(Clone, Debug)]
pub struct SurfaceMesh {
    space: SpaceSpec,
    vertices: Vec<Point>,
    cells: Cells,
    edges: Vec<[usize; 2]>,
    edge_lengths: Vec<f64>,
    /// For triangles: index into `edges` of the edge opposite each corner.
    cell_edges: Vec<[usize; 3]>,
}

impl SurfaceMesh {
    pub fn new(space: SpaceSpec, vertices: Vec<Point>, cells: Cells) -> Result<Self> {
        space.model()?;
        let expected_dim = match cells {
            Cells::Triangles(_) => 3,
            Cells::Segments(_) => 2,
        };
        if space.dim() != expected_dim {
            return Err(Error::NonManifold(format!(
                "{} cells need a {expected_dim}-dimensional space, got {space}",
                if expected_dim == 3 { "triangle" } else { "segment" }
            )));
        }
        if let Some(p) = vertices.iter().find(|p| p.space() != space) {
            return Err(Error::InvalidPoint(format!("vertex in {} for a mesh in {space}", p.space())));
        }
        if cells.is_empty() {
            return Err(Error::NonManifold("mesh has no cells".into()));
        }
        let nv = vertices.len();
        let check_index = |i: usize| {
            if i >= nv {
                Err(Error::NonManifold(format!("vertex index {i} out of range ({nv} vertices)")))
            } else {
                Ok(())
            }
        };

        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges: Vec<[usize; 2]> = Vec::new();
        let mut edge_use: Vec<usize> = Vec::new();
        let mut intern = |a: usize, b: usize| {
            let key = if a < b { [a, b] } else { [b, a] };
            let id = *edge_index.entry(key).or_insert_with(|| {
                edges.push(key);
                edge_use.push(0);
                edges.len() - 1
            });
            edge_use[id] += 1;
            id
        };

        let mut cell_edges = Vec::new();
        let mut degree = vec![0usize; nv];
        match &cells {
            Cells::Triangles(tris) => {
                for t in tris {
                    for &i in t {
                        check_index(i)?;
                    }
                    if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                        return Err(Error::NonManifold(format!("triangle {t:?} repeats a vertex")));
                    }
                    cell_edges.push([intern(t[1], t[2]), intern(t[2], t[0]), intern(t[0], t[1])]);
                }
            }
            Cells::Segments(segs) => {
                for s in segs {
                    check_index(s[0])?;
                    check_index(s[1])?;
                    if s[0] == s[1] {
                        return Err(Error::NonManifold(format!("segment {s:?} is a loop")));
                    }
                    intern(s[0], s[1]);
                    degree[s[0]] += 1;
                    degree[s[1]] += 1;
                }
            }
        }

        match &cells {
            Cells::Triangles(_) => {
                if let Some((e, uses)) = edges.iter().zip(&edge_use).find(|(_, u)| **u != 2) {
                    return Err(Error::NonManifold(format!(
                        "edge {e:?} borders {uses} triangles"
                    )));
                }
            }
            Cells::Segments(_) => {
                if let Some(&u) = edge_use.iter().find(|u| **u != 1) {
                    return Err(Error::NonManifold(format!("segment repeated {u} times")));
                }
                if let Some(v) = degree.iter().position(|d| *d != 2) {
                    return Err(Error::NonManifold(format!(
                        "vertex {v} has degree {}",
                        degree[v]
                    )));
                }
            }
        }
        check_connected(nv, &edges)?;

        let edge_lengths = edges
            .iter()
            .map(|e| distance(&vertices[e[0]], &vertices[e[1]]))
            .collect::<Result<Vec<_>>>()?;
        if let Some(i) = edge_lengths.iter().position(|l| !(*l > 0.0)) {
            return Err(Error::NonManifold(format!("edge {:?} has zero length", edges[i])));
        }
        for (cell, ce) in cell_edges.iter().enumerate() {
            let [a, b, c] = ce.map(|e| edge_lengths[e]);
            let longest = a.max(b).max(c);
            let slack = (b + c - a).min(a + c - b).min(a + b - c) / longest;
            if slack < 1e-12 {
                return Err(Error::DegenerateTriangle { cell, slack });
            }
        }

        Ok(SurfaceMesh {
            space,
            vertices,
            cells,
            edges,
            edge_lengths,
            cell_edges,
        })
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &Cells {
        &self.cells
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }

    pub(crate) fn cell_edges(&self) -> &[[usize; 3]] {
        &self.cell_edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn min_edge(&self) -> f64 {
        self.edge_lengths.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_edge(&self) -> f64 {
        self.edge_lengths.iter().copied().fold(0.0, f64::max)
    }

    /// `V - E + F` (for polylines `V - E`, always 0).
    pub fn euler_characteristic(&self) -> i64 {
        let v = self.vertices.len() as i64;
        let e = self.edges.len() as i64;
        match &self.cells {
            Cells::Triangles(t) => v - e + t.len() as i64,
            Cells::Segments(_) => v - e,
        }
    }
}

fn check_connected(nv: usize, edges: &[[usize; 2]]) -> Result<()> {
    let mut adj = vec![Vec::new(); nv];
    for e in edges {
        adj[e[0]].push(e[1]);
        adj[e[1]].push(e[0]);
    }
    let mut seen = vec![false; nv];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    if count != nv {
        return Err(Error::NonManifold(format!(
            "mesh has {} vertices outside the component of vertex 0",
            nv - count
        )));
    }
    Ok(())
}

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{exp_map, Frame, Point, SpaceSpec};

use super::mesh::{Cells, SurfaceMesh};

/// Largest accepted icosphere level (40962 vertices).
pub const MAX_ICOSPHERE_LEVEL: usize = 6;

/// Test shapes, all built as radial graphs over the unit directions at the
/// base point of the space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ShapeFamily {
    /// Distance sphere of the given radius about the base point.
    GeodesicSphere { radius: f64 },
    /// `exp(a u_1 e_1 + b u_2 e_2 + c u_3 e_3)` over unit `u`; a true
    /// ellipsoid in flat space.
    Ellipsoid { a: f64, b: f64, c: f64 },
    /// Closed curve `exp(a cos t e_1 + b sin t e_2)`.
    Ellipse { a: f64, b: f64 },
    /// Radial graph `rho(u) = radius (1 + epsilon Y(u))` with the zonal
    /// harmonic `Y = (3 u_3^2 - 1)/2` on 2-spheres and `Y = cos 2t` on circles.
    PerturbedSphere { radius: f64, epsilon: f64 },
}

impl ShapeFamily {
    /// Builds a family from a CLI-style name and `key=value` parameters.
    pub fn from_params(name: &str, params: &[(String, f64)]) -> Result<Self> {
        let lookup: HashMap<&str, f64> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        let allowed: &[&str] = match name {
            "geodesic-sphere" | "circle" => &["r"],
            "ellipsoid" => &["a", "b", "c"],
            "ellipse" => &["a", "b"],
            "perturbed-sphere" => &["r", "eps"],
            other => return Err(Error::UnsupportedFamily(format!("unknown shape `{other}`"))),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(Error::UnsupportedFamily(format!(
                "shape `{name}` has no parameter `{k}` (expected {})",
                allowed.join(", ")
            )));
        }
        let get = |k: &str| {
            lookup
                .get(k)
                .copied()
                .ok_or_else(|| Error::UnsupportedFamily(format!("shape `{name}` needs parameter `{k}`")))
        };
        let family = match name {
            "geodesic-sphere" | "circle" => ShapeFamily::GeodesicSphere { radius: get("r")? },
            "ellipsoid" => ShapeFamily::Ellipsoid {
                a: get("a")?,
                b: get("b")?,
                c: get("c")?,
            },
            "ellipse" => ShapeFamily::Ellipse {
                a: get("a")?,
                b: get("b")?,
            },
            _ => ShapeFamily::PerturbedSphere {
                radius: get("r")?,
                epsilon: get("eps")?,
            },
        };
        Ok(family)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ShapeFamily::GeodesicSphere { .. } => "geodesic-sphere",
            ShapeFamily::Ellipsoid { .. } => "ellipsoid",
            ShapeFamily::Ellipse { .. } => "ellipse",
            ShapeFamily::PerturbedSphere { .. } => "perturbed-sphere",
        }
    }

    pub fn is_geodesic_sphere(&self) -> bool {
        match *self {
            ShapeFamily::GeodesicSphere { .. } => true,
            ShapeFamily::Ellipse { a, b } => a == b,
            ShapeFamily::Ellipsoid { a, b, c } => a == b && b == c,
            ShapeFamily::PerturbedSphere { epsilon, .. } => epsilon == 0.0,
        }
    }

    /// Distance from the base point along direction `u` (`|u| = 1`).
    fn radial(&self, u: &[f64]) -> Vec<f64> {
        match *self {
            ShapeFamily::GeodesicSphere { radius } => u.iter().map(|x| radius * x).collect(),
            ShapeFamily::Ellipsoid { a, b, c } => vec![a * u[0], b * u[1], c * u[2]],
            ShapeFamily::Ellipse { a, b } => vec![a * u[0], b * u[1]],
            ShapeFamily::PerturbedSphere { radius, epsilon } => {
                let y = if u.len() == 3 {
                    0.5 * (3.0 * u[2] * u[2] - 1.0)
                } else {
                    // cos 2t = cos^2 t - sin^2 t
                    u[0] * u[0] - u[1] * u[1]
                };
                let rho = radius * (1.0 + epsilon * y);
                u.iter().map(|x| rho * x).collect()
            }
        }
    }

    fn validate(&self, space: &SpaceSpec) -> Result<()> {
        let dim = space.dim();
        let (params, dims): (Vec<f64>, &[usize]) = match *self {
            ShapeFamily::GeodesicSphere { radius } => (vec![radius], &[2, 3]),
            ShapeFamily::Ellipsoid { a, b, c } => (vec![a, b, c], &[3]),
            ShapeFamily::Ellipse { a, b } => (vec![a, b], &[2]),
            ShapeFamily::PerturbedSphere { radius, epsilon } => {
                if !(epsilon.abs() < 1.0) {
                    return Err(Error::DomainError(format!(
                        "perturbation amplitude {epsilon} must satisfy |eps| < 1"
                    )));
                }
                (vec![radius * (1.0 + epsilon.abs())], &[2, 3])
            }
        };
        if !dims.contains(&dim) {
            return Err(Error::UnsupportedFamily(format!(
                "{} is not a hypersurface family in the {dim}-dimensional space {space}",
                self.name()
            )));
        }
        let limit = space.injectivity_radius();
        if let Some(p) = params.iter().find(|p| !(**p > 0.0 && **p < limit)) {
            return Err(Error::DomainError(format!(
                "{} extent {p} must lie in (0, {limit})",
                self.name()
            )));
        }
        Ok(())
    }
}

/// Unit icosphere: the icosahedron refined `level` times by edge midpoints
/// projected back to the sphere. Triangles are outward oriented.
pub fn icosphere(level: usize) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut verts: Vec<[f64; 3]> = raw.iter().map(|v| unit(*v)).collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(unit([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    (verts, faces)
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Mesh of `family` about the base point of `space`. For surfaces `subdiv` is
/// the icosphere level, for curves the number of segments.
pub fn generate_shape(space: SpaceSpec, family: ShapeFamily, subdiv: usize) -> Result<SurfaceMesh> {
    space.model()?;
    family.validate(&space)?;
    let center = Point::base(space)?;
    let frame = Frame::standard(&center)?;
    let place = |u: &[f64]| exp_map(&center, &frame.combine(&family.radial(u))?);

    match space.dim() {
        3 => {
            if subdiv > MAX_ICOSPHERE_LEVEL {
                return Err(Error::DomainError(format!(
                    "icosphere level {subdiv} exceeds {MAX_ICOSPHERE_LEVEL}"
                )));
            }
            let (dirs, faces) = icosphere(subdiv);
            let vertices = dirs.iter().map(|u| place(u)).collect::<Result<Vec<_>>>()?;
            SurfaceMesh::new(space, vertices, Cells::Triangles(faces))
        }
        _ => {
            if subdiv < 3 {
                return Err(Error::DomainError(format!(
                    "a closed polyline needs at least 3 segments, got {subdiv}"
                )));
            }
            let vertices = (0..subdiv)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / subdiv as f64;
                    place(&[t.cos(), t.sin()])
                })
                .collect::<Result<Vec<_>>>()?;
            let segs = (0..subdiv).map(|i| [i, (i + 1) % subdiv]).collect();
            SurfaceMesh::new(space, vertices, Cells::Segments(segs))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{distance, Field, Kind};

    #[test]
    fn icosphere_counts() {
        for level in 0..4 {
            let (v, f) = icosphere(level);
            assert_eq!(v.len(), 10 * 4usize.pow(level as u32) + 2);
            assert_eq!(f.len(), 20 * 4usize.pow(level as u32));
        }
    }

    #[test]
    fn icosphere_is_outward_oriented() {
        let (v, f) = icosphere(1);
        for [a, b, c] in f {
            let (p, q, r) = (v[a], v[b], v[c]);
            let e1 = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
            let e2 = [r[0] - p[0], r[1] - p[1], r[2] - p[2]];
            let n = [
                e1[1] * e2[2] - e1[2] * e2[1],
                e1[2] * e2[0] - e1[0] * e2[2],
                e1[0] * e2[1] - e1[1] * e2[0],
            ];
            assert!(n[0] * p[0] + n[1] * p[1] + n[2] * p[2] > 0.0);
        }
    }

    #[test]
    fn flat_geodesic_sphere_radius() {
        let s = SpaceSpec::euclidean(3).unwrap();
        let m = generate_shape(s, ShapeFamily::GeodesicSphere { radius: 1.0 }, 4).unwrap();
        let c = Point::base(s).unwrap();
        for v in m.vertices() {
            assert!((distance(&c, v).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn curved_geodesic_sphere_radius() {
        for kind in [Kind::Compact, Kind::Noncompact] {
            let s = SpaceSpec::new(Field::R, 3, kind).unwrap();
            let m = generate_shape(s, ShapeFamily::GeodesicSphere { radius: 1.0 }, 2).unwrap();
            let c = Point::base(s).unwrap();
            for v in m.vertices() {
                assert!((distance(&c, v).unwrap() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ellipsoid_is_genus_zero() {
        let s = SpaceSpec::euclidean(3).unwrap();
        let m = generate_shape(s, ShapeFamily::Ellipsoid { a: 1.2, b: 1.0, c: 0.9 }, 3).unwrap();
        assert_eq!(m.euler_characteristic(), 2);
    }

    #[test]
    fn generation_is_deterministic() {
        let s = SpaceSpec::new(Field::R, 3, Kind::Compact).unwrap();
        let f = ShapeFamily::PerturbedSphere { radius: 1.0, epsilon: 0.15 };
        let a = generate_shape(s, f, 3).unwrap();
        let b = generate_shape(s, f, 3).unwrap();
        for (p, q) in a.vertices().iter().zip(b.vertices()) {
            assert_eq!(p.coords(), q.coords());
        }
        assert_eq!(a.cells(), b.cells());
    }

    #[test]
    fn family_and_dimension_mismatch() {
        let r2 = SpaceSpec::euclidean(2).unwrap();
        let r3 = SpaceSpec::euclidean(3).unwrap();
        let r4 = SpaceSpec::euclidean(4).unwrap();
        let ellipsoid = ShapeFamily::Ellipsoid { a: 1.0, b: 1.0, c: 1.0 };
        assert!(matches!(generate_shape(r2, ellipsoid, 3), Err(Error::UnsupportedFamily(_))));
        assert!(matches!(
            generate_shape(r3, ShapeFamily::Ellipse { a: 1.0, b: 2.0 }, 3),
            Err(Error::UnsupportedFamily(_))
        ));
        assert!(generate_shape(r4, ShapeFamily::GeodesicSphere { radius: 1.0 }, 2).is_err());
        assert!(matches!(
            generate_shape(r3, ShapeFamily::GeodesicSphere { radius: -1.0 }, 2),
            Err(Error::DomainError(_))
        ));
        let cp1 = SpaceSpec::new(Field::C, 1, Kind::Compact).unwrap();
        assert!(generate_shape(cp1, ShapeFamily::GeodesicSphere { radius: 3.2 }, 16).is_err());
    }

    #[test]
    fn params_parse() {
        let p = |k: &str, v: f64| (k.to_string(), v);
        assert_eq!(
            ShapeFamily::from_params("ellipse", &[p("a", 2.0), p("b", 1.0)]).unwrap(),
            ShapeFamily::Ellipse { a: 2.0, b: 1.0 }
        );
        assert!(ShapeFamily::from_params("ellipse", &[p("a", 2.0)]).is_err());
        assert!(ShapeFamily::from_params("torus", &[]).is_err());
        assert!(ShapeFamily::from_params("circle", &[p("r", 1.0), p("z", 0.0)]).is_err());
    }
}

//! Mesh files: ASCII OFF for flat 3-space, and JSON (the point-cloud schema
//! plus a `cells` array) for any realized space.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::center_of_mass::parse_point;
use crate::error::{Error, Result};
use crate::spaces::{Kind, Point, SpaceSpec};

use super::mesh::{Cells, SurfaceMesh};

pub fn read_off(text: &str) -> Result<SurfaceMesh> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    let mut next = |what: &str| {
        tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("OFF: unexpected end of file reading {what}")))
    };
    let header = next("header")?;
    if header != "OFF" {
        return Err(Error::Parse(format!("OFF: expected header `OFF`, found `{header}`")));
    }
    let count = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Parse(format!("OFF: bad count `{s}`")))
    };
    let nv = count(next("vertex count")?)?;
    let nf = count(next("face count")?)?;
    let _ne = count(next("edge count")?)?;
    let space = SpaceSpec::euclidean(3)?;
    let mut vertices = Vec::with_capacity(nv);
    for i in 0..nv {
        let mut c = [0.0; 3];
        for x in c.iter_mut() {
            let s = next("vertex coordinate")?;
            *x = s
                .parse()
                .map_err(|_| Error::Parse(format!("OFF: vertex {i}: bad coordinate `{s}`")))?;
        }
        vertices.push(Point::new(space, c.to_vec())?);
    }
    let mut faces = Vec::with_capacity(nf);
    for i in 0..nf {
        let arity = count(next("face size")?)?;
        if arity != 3 {
            return Err(Error::Parse(format!("OFF: face {i} has {arity} corners, only triangles are supported")));
        }
        let mut f = [0usize; 3];
        for x in f.iter_mut() {
            *x = count(next("face index")?)?;
        }
        faces.push(f);
    }
    SurfaceMesh::new(space, vertices, Cells::Triangles(faces))
}

pub fn write_off(mesh: &SurfaceMesh) -> Result<String> {
    let space = mesh.space();
    let Cells::Triangles(faces) = mesh.cells() else {
        return Err(Error::Parse("OFF holds triangle meshes only".into()));
    };
    if space.kind() != Kind::Euclidean || space.dim() != 3 {
        return Err(Error::Parse(format!("OFF holds meshes in R^3 only, not {space}")));
    }
    let mut out = String::new();
    let _ = writeln!(out, "OFF\n{} {} {}", mesh.num_vertices(), faces.len(), mesh.edges().len());
    for v in mesh.vertices() {
        let c = v.coords();
        let _ = writeln!(out, "{:?} {:?} {:?}", c[0], c[1], c[2]);
    }
    for [a, b, c] in faces {
        let _ = writeln!(out, "3 {a} {b} {c}");
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct MeshFile {
    space: SpaceSpec,
    points: Vec<Vec<f64>>,
    cells: Vec<Vec<usize>>,
}

pub fn read_json_mesh(text: &str) -> Result<SurfaceMesh> {
    let file: MeshFile = serde_json::from_str(text)?;
    let vertices = file
        .points
        .into_iter()
        .map(|c| parse_point(file.space, c))
        .collect::<Result<Vec<_>>>()?;
    let arity = file.cells.first().map(Vec::len).unwrap_or(0);
    if let Some(bad) = file.cells.iter().find(|c| c.len() != arity) {
        return Err(Error::Parse(format!("mixed cell sizes {arity} and {}", bad.len())));
    }
    let cells = match arity {
        3 => Cells::Triangles(file.cells.iter().map(|c| [c[0], c[1], c[2]]).collect()),
        2 => Cells::Segments(file.cells.iter().map(|c| [c[0], c[1]]).collect()),
        other => return Err(Error::Parse(format!("cells must have 2 or 3 vertices, not {other}"))),
    };
    SurfaceMesh::new(file.space, vertices, cells)
}

pub fn write_json_mesh(mesh: &SurfaceMesh) -> Result<String> {
    let cells = match mesh.cells() {
        Cells::Triangles(t) => t.iter().map(|c| c.to_vec()).collect(),
        Cells::Segments(s) => s.iter().map(|c| c.to_vec()).collect(),
    };
    let file = MeshFile {
        space: mesh.space(),
        points: mesh.vertices().iter().map(|p| p.coords().to_vec()).collect(),
        cells,
    };
    Ok(serde_json::to_string(&file)?)
}

/// Reads a mesh, choosing the format from the extension (`.off` or JSON).
pub fn read_mesh_file(path: &Path) -> Result<SurfaceMesh> {
    let text = std::fs::read_to_string(path)?;
    let is_off = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("off"));
    if is_off {
        read_off(&text)
    } else {
        read_json_mesh(&text)
    }
}

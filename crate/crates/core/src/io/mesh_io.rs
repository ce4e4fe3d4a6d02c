//! Plain-text mesh files.
//!
//! ```text
//! ndim=2 nv=4 nt=2 nf=4
//! 0.0000000000000000e0 0.0000000000000000e0
//! ...
//! 1 2 0 0        # v0 v1 v2 material
//! ...
//! 0 1 D          # boundary edge and tag
//! ```
//!
//! Vertex 0 of each triangle is its newest vertex, so bisection state
//! survives a round trip. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::mesh::{BoundaryTag, ElementGeometry, Mesh, Point};
use crate::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn field<T: FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot read {what} from `{tok}`")))
}

pub fn read_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty mesh file"))?;
    let mut counts = [None::<usize>; 3];
    let mut ndim = None;
    for tok in header.split_whitespace() {
        let (key, val) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(hline, format!("expected key=value in header, got `{tok}`")))?;
        let slot = match key {
            "ndim" => &mut ndim,
            "nv" => &mut counts[0],
            "nt" => &mut counts[1],
            "nf" => &mut counts[2],
            _ => return Err(parse_err(hline, format!("unknown header key `{key}`"))),
        };
        *slot = Some(field(val, hline, key)?);
    }
    if ndim != Some(2) {
        return Err(parse_err(hline, "header must declare ndim=2"));
    }
    let [nv, nt, nf] = counts.map(|c| c.ok_or_else(|| parse_err(hline, "header needs nv, nt and nf")));
    let (nv, nt, nf) = (nv?, nt?, nf?);

    let mut next = |what: &str, expect: usize| -> Result<(usize, Vec<&str>)> {
        let (n, l) = lines
            .next()
            .ok_or_else(|| parse_err(text.lines().count(), format!("file ends before all {what} were read")))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != expect {
            return Err(parse_err(
                n,
                format!("{what} line needs {expect} fields, found {}", toks.len()),
            ));
        }
        Ok((n, toks))
    };

    let mut vertices: Vec<Point> = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, t) = next("vertex", 2)?;
        let p = [field(t[0], n, "x")?, field(t[1], n, "y")?];
        if !p.iter().all(|c: &f64| c.is_finite()) {
            return Err(parse_err(n, "vertex coordinates must be finite"));
        }
        vertices.push(p);
    }
    let vertex = |tok: &str, n: usize| -> Result<usize> {
        let v: usize = field(tok, n, "vertex index")?;
        if v >= nv {
            return Err(parse_err(n, format!("vertex index {v} out of range (nv={nv})")));
        }
        Ok(v)
    };

    let mut triangles = Vec::with_capacity(nt);
    let mut materials = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (n, t) = next("triangle", 4)?;
        let tri = [vertex(t[0], n)?, vertex(t[1], n)?, vertex(t[2], n)?];
        let det = ElementGeometry::new(tri.map(|v| vertices[v])).det;
        if !(det > 0.0) {
            return Err(parse_err(
                n,
                "triangle has non-positive signed area (vertices must be counterclockwise)",
            ));
        }
        triangles.push(tri);
        materials.push(field(t[3], n, "material id")?);
    }

    let mut tags = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (n, t) = next("boundary edge", 3)?;
        let tag = match t[2] {
            "D" => BoundaryTag::Dirichlet,
            "N" => BoundaryTag::Neumann,
            other => return Err(parse_err(n, format!("boundary tag must be D or N, got `{other}`"))),
        };
        tags.push(([vertex(t[0], n)?, vertex(t[1], n)?], tag));
    }
    if let Some((n, _)) = lines.next() {
        return Err(parse_err(n, "unexpected content after the declared entities"));
    }
    Mesh::new(vertices, triangles, materials, tags)
}

/// 17 significant digits.
fn coord(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_mesh(mesh: &Mesh) -> String {
    let tags = mesh.boundary_tags();
    let mut out = format!(
        "ndim=2 nv={} nt={} nf={}\n",
        mesh.n_vertices(),
        mesh.n_elements(),
        tags.len()
    );
    for p in mesh.vertices() {
        let _ = writeln!(out, "{} {}", coord(p[0]), coord(p[1]));
    }
    for (tri, id) in mesh.triangles().iter().zip(mesh.materials()) {
        let _ = writeln!(out, "{} {} {} {id}", tri[0], tri[1], tri[2]);
    }
    for ([a, b], tag) in tags {
        let t = match tag {
            BoundaryTag::Dirichlet => 'D',
            BoundaryTag::Neumann => 'N',
        };
        let _ = writeln!(out, "{a} {b} {t}");
    }
    out
}

pub fn load_mesh(path: &Path) -> Result<Mesh> {
    read_mesh(&std::fs::read_to_string(path)?)
}

pub fn save_mesh(path: &Path, mesh: &Mesh) -> Result<()> {
    std::fs::write(path, write_mesh(mesh))?;
    Ok(())
}

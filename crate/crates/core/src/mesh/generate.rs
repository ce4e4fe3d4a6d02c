use serde::{Deserialize, Serialize};

use super::{BoundaryTag, Mesh, Point};
use crate::{Error, Result};

/// Boundary tag per side of the unit square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideTags {
    pub bottom: BoundaryTag,
    pub right: BoundaryTag,
    pub top: BoundaryTag,
    pub left: BoundaryTag,
}

impl SideTags {
    pub fn all(tag: BoundaryTag) -> Self {
        Self {
            bottom: tag,
            right: tag,
            top: tag,
            left: tag,
        }
    }

    /// Clamped at `y = 0`, traction-free elsewhere.
    pub fn bottom_clamped() -> Self {
        Self {
            bottom: BoundaryTag::Dirichlet,
            ..Self::all(BoundaryTag::Neumann)
        }
    }

    /// Clamped at `x = 0` and `x = 1`, traction-free elsewhere.
    pub fn sides_clamped() -> Self {
        Self {
            left: BoundaryTag::Dirichlet,
            right: BoundaryTag::Dirichlet,
            ..Self::all(BoundaryTag::Neumann)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitAxis {
    /// Interface along `y = at`.
    Horizontal,
    /// Interface along `x = at`.
    Vertical,
}

/// Two-material subdivision of the square along a grid line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaterialSplit {
    pub axis: SplitAxis,
    pub at: f64,
    /// Material below (horizontal) or left of (vertical) the interface.
    pub first: u32,
    pub second: u32,
}

/// Structured mesh of the unit square with `2 n^2` triangles.
///
/// Each grid cell is cut along one diagonal, alternating direction in a
/// checkerboard pattern. The hypotenuse of every triangle is its refinement
/// edge.
pub fn generate_unit_square(n: usize, sides: SideTags, split: Option<MaterialSplit>) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("grid size n must be at least 1".into()));
    }
    if let Some(s) = split {
        let scaled = s.at * n as f64;
        if !(s.at > 0.0 && s.at < 1.0) || (scaled - scaled.round()).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "material split at {} does not lie on an interior line of the {n}x{n} grid \
                 (needs at*n to be an integer between 1 and n-1)",
                s.at
            )));
        }
    }

    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices: Vec<Point> = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 / n as f64, j as f64 / n as f64]);
        }
    }

    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let a = idx(i, j);
            let b = idx(i + 1, j);
            let c = idx(i + 1, j + 1);
            let d = idx(i, j + 1);
            // right-angle vertex first so the hypotenuse is local edge 0
            if (i + j) % 2 == 0 {
                triangles.push([b, c, a]);
                triangles.push([d, a, c]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([c, d, b]);
            }
        }
    }

    let materials = triangles
        .iter()
        .map(|tri| match split {
            None => 0,
            Some(s) => {
                let centroid: Point = [
                    tri.iter().map(|&v| vertices[v][0]).sum::<f64>() / 3.0,
                    tri.iter().map(|&v| vertices[v][1]).sum::<f64>() / 3.0,
                ];
                let coord = match s.axis {
                    SplitAxis::Horizontal => centroid[1],
                    SplitAxis::Vertical => centroid[0],
                };
                if coord < s.at {
                    s.first
                } else {
                    s.second
                }
            }
        })
        .collect();

    let mut tags = Vec::with_capacity(4 * n);
    for i in 0..n {
        tags.push(([idx(i, 0), idx(i + 1, 0)], sides.bottom));
        tags.push(([idx(n, i), idx(n, i + 1)], sides.right));
        tags.push(([idx(i, n), idx(i + 1, n)], sides.top));
        tags.push(([idx(0, i), idx(0, i + 1)], sides.left));
    }

    Mesh::new(vertices, triangles, materials, tags)
}

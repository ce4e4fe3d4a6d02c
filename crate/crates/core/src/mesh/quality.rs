use super::{Mesh, Point};

/// Worst-case shape measures over a mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeRegularity {
    /// Smallest interior angle, in degrees.
    pub min_angle: f64,
    /// Largest ratio of diameter to inscribed-circle diameter.
    pub max_ratio: f64,
}

/// Interior angles of a triangle, in degrees.
pub fn triangle_angles(v: [Point; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, angle) in out.iter_mut().enumerate() {
        let p = v[i];
        let a = v[(i + 1) % 3];
        let b = v[(i + 2) % 3];
        let da = [a[0] - p[0], a[1] - p[1]];
        let db = [b[0] - p[0], b[1] - p[1]];
        let cross = da[0] * db[1] - da[1] * db[0];
        let dot = da[0] * db[0] + da[1] * db[1];
        *angle = cross.abs().atan2(dot).to_degrees();
    }
    out
}

pub fn shape_regularity(mesh: &Mesh) -> ShapeRegularity {
    let mut min_angle = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    for e in 0..mesh.n_elements() {
        let v = mesh.element_vertices(e);
        for a in triangle_angles(v) {
            min_angle = min_angle.min(a);
        }
        let perimeter: f64 = (0..3)
            .map(|i| {
                let p = v[i];
                let q = v[(i + 1) % 3];
                (p[0] - q[0]).hypot(p[1] - q[1])
            })
            .sum();
        let inscribed_diameter = 4.0 * mesh.area(e) / perimeter;
        max_ratio = max_ratio.max(mesh.diameter(e) / inscribed_diameter);
    }
    ShapeRegularity { min_angle, max_ratio }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_unit_square, BoundaryTag, SideTags};

    #[test]
    fn right_and_equilateral_triangles() {
        let right = triangle_angles([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let min = right.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((min - 45.0).abs() < 1e-12);
        let eq = triangle_angles([[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]]);
        for a in eq {
            assert!((a - 60.0).abs() < 1e-12);
        }
    }

    #[test]
    fn structured_square_has_45_degree_minimum() {
        let m = generate_unit_square(4, SideTags::all(BoundaryTag::Neumann), None).unwrap();
        let q = shape_regularity(&m);
        assert!((q.min_angle - 45.0).abs() < 1e-12);
        // right isosceles: h / (2r) = sqrt(2) / (2 - sqrt(2))
        let expected = 2f64.sqrt() / (2.0 - 2f64.sqrt());
        assert!((q.max_ratio - expected).abs() < 1e-12);
    }
}

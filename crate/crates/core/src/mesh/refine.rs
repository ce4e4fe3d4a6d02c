use std::collections::{HashMap, HashSet};

use super::{edge_key, local_edge, Mesh, Point};
use crate::{Error, Result};

/// Newest-vertex bisection of the marked elements with conformity closure.
///
/// Every edge of a marked element is halved (three bisections, four
/// children). Neighbours are bisected as far as needed to stay conforming.
/// Material ids and boundary tags are inherited by the children.
pub fn refine(mesh: &Mesh, marked: &[usize]) -> Result<Mesh> {
    if mesh.n_elements() == 0 {
        return Err(Error::Mesh("cannot refine an empty mesh".into()));
    }
    if let Some(&bad) = marked.iter().find(|&&e| e >= mesh.n_elements()) {
        return Err(Error::InvalidArgument(format!(
            "marked element {bad} out of range (mesh has {} elements)",
            mesh.n_elements()
        )));
    }
    if marked.is_empty() {
        return Ok(mesh.clone());
    }

    let tris = mesh.triangles();
    let mut cut: HashSet<[usize; 2]> = HashSet::new();
    for &e in marked {
        for i in 0..3 {
            let (a, b) = local_edge(&tris[e], i);
            cut.insert(edge_key(a, b));
        }
    }
    // closure: any element with a cut edge must have its refinement edge cut
    loop {
        let mut changed = false;
        for tri in tris {
            let refinement = edge_key(tri[1], tri[2]);
            if cut.contains(&refinement) {
                continue;
            }
            let touched = (1..3).any(|i| {
                let (a, b) = local_edge(tri, i);
                cut.contains(&edge_key(a, b))
            });
            if touched {
                cut.insert(refinement);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut vertices: Vec<Point> = mesh.vertices().to_vec();
    let mut midpoints: HashMap<[usize; 2], usize> = HashMap::new();
    let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
        *midpoints.entry(edge_key(a, b)).or_insert_with(|| {
            let (pa, pb) = (vertices[a], vertices[b]);
            vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
            vertices.len() - 1
        })
    };

    let mut triangles = Vec::with_capacity(mesh.n_elements() + 4 * marked.len());
    let mut materials = Vec::with_capacity(triangles.capacity());
    let mut stack = Vec::new();
    for (e, tri) in tris.iter().enumerate() {
        stack.push(*tri);
        while let Some(t) = stack.pop() {
            let [v0, v1, v2] = t;
            if cut.contains(&edge_key(v1, v2)) {
                let m = midpoint(v1, v2, &mut vertices);
                // pushed in reverse so the first child is emitted first
                stack.push([m, v2, v0]);
                stack.push([m, v0, v1]);
            } else {
                triangles.push(t);
                materials.push(mesh.material(e));
            }
        }
    }

    let mut tags = Vec::with_capacity(mesh.boundary_tags().len() * 2);
    for (&[a, b], &tag) in mesh.boundary_tags() {
        match midpoints.get(&[a, b]) {
            Some(&m) => {
                tags.push(([a, m], tag));
                tags.push(([m, b], tag));
            }
            None => tags.push(([a, b], tag)),
        }
    }

    Mesh::new(vertices, triangles, materials, tags)
}

use super::{element_coefficients, facet_mu, facet_quadrature, IpVariant, SparseMatrix, TripletList};
use crate::materials::MaterialTable;
use crate::mesh::{Facet, FacetKind, Mesh};
use crate::spaces::{line_rule, triangle_rule, BasisEval, DgSpace};
use crate::{Error, Result};

/// Reference tabulation of both bases at the element quadrature points.
struct VolumeTable {
    weights: Vec<f64>,
    velocity: Vec<BasisEval>,
    pressure: Vec<Vec<f64>>,
}

fn volume_table(space: &DgSpace) -> Result<VolumeTable> {
    let rule = triangle_rule(space.quadrature_degree())?;
    Ok(VolumeTable {
        velocity: rule.points.iter().map(|&p| space.velocity_basis().eval(p)).collect(),
        pressure: rule.points.iter().map(|&p| space.pressure_basis().values(p)).collect(),
        weights: rule.weights,
    })
}

/// One side of a facet as seen by the jump and average operators.
struct Side {
    element: usize,
    /// `+1` on the left element, `-1` on the right.
    sign: f64,
    /// Average weight: `1/2` on interior facets, `1` on the boundary.
    weight: f64,
}

fn sides(facet: &Facet) -> Vec<Side> {
    match facet.right {
        Some(r) => vec![
            Side {
                element: facet.left,
                sign: 1.0,
                weight: 0.5,
            },
            Side {
                element: r,
                sign: -1.0,
                weight: 0.5,
            },
        ],
        None => vec![Side {
            element: facet.left,
            sign: 1.0,
            weight: 1.0,
        }],
    }
}

/// Facets carrying jump terms: interior and Dirichlet.
fn penalized(facet: &Facet) -> bool {
    facet.kind != FacetKind::Neumann
}

pub fn assemble_a(
    space: &DgSpace,
    mesh: &Mesh,
    materials: &MaterialTable,
    a_s: f64,
    variant: IpVariant,
) -> Result<SparseMatrix> {
    space.check_mesh(mesh)?;
    if !(a_s > 0.0 && a_s.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "stabilization parameter must be positive, got {a_s}"
        )));
    }
    let coeffs = element_coefficients(mesh, materials)?;
    let epsilon = variant.epsilon() as f64;
    let nk = space.n_scalar();
    let nb = space.u_block();
    let table = volume_table(space)?;
    let mut t = TripletList::new(space.n_u(), space.n_u());

    let mut local = vec![0.0; nb * nb];
    for e in 0..mesh.n_elements() {
        let geom = mesh.geometry(e);
        let mu = coeffs[e].mu;
        local.fill(0.0);
        for (ref_eval, &w) in table.velocity.iter().zip(&table.weights) {
            let g = ref_eval.mapped(&geom).gradients;
            let w = w * geom.det * mu;
            for c in 0..2 {
                for i in 0..nk {
                    let row = (c * nk + i) * nb;
                    for d in 0..2 {
                        for j in 0..nk {
                            let dot = if c == d {
                                g[i][0] * g[j][0] + g[i][1] * g[j][1]
                            } else {
                                0.0
                            };
                            local[row + d * nk + j] += w * (dot + g[i][d] * g[j][c]);
                        }
                    }
                }
            }
        }
        let off = space.u_offset(e);
        for r in 0..nb {
            for c in 0..nb {
                t.push(off + r, off + c, local[r * nb + c]);
            }
        }
    }

    let rule = line_rule(space.quadrature_degree())?;
    for facet in mesh.facets().iter().filter(|f| penalized(f)) {
        let sides = sides(facet);
        let n = facet.normal;
        let penalty = a_s / facet.length * 2.0 * facet_mu(facet, &coeffs);
        let size = sides.len() * nb;
        let mut local = vec![0.0; size * size];
        // per function: component, signed trace value, averaged traction
        let mut funcs: Vec<(usize, f64, [f64; 2])> = Vec::with_capacity(size);
        for (x, w) in facet_quadrature(mesh, facet, &rule) {
            funcs.clear();
            for s in &sides {
                let geom = mesh.geometry(s.element);
                let ev = space.velocity_basis().eval(geom.to_reference(x)).mapped(&geom);
                let scale = s.weight * coeffs[s.element].mu;
                for c in 0..2 {
                    for i in 0..nk {
                        let g = ev.gradients[i];
                        let gn = g[0] * n[0] + g[1] * n[1];
                        // 2 mu eps(phi e_c) n = mu (e_c (g.n) + g n_c)
                        let mut traction = [scale * g[0] * n[c], scale * g[1] * n[c]];
                        traction[c] += scale * gn;
                        funcs.push((c, s.sign * ev.values[i], traction));
                    }
                }
            }
            for (fi, &(cf, jf, tf)) in funcs.iter().enumerate() {
                for (gi, &(cg, jg, tg)) in funcs.iter().enumerate() {
                    let jump = if cf == cg { penalty * jg * jf } else { 0.0 };
                    let value = jump - tg[cf] * jf - epsilon * tf[cg] * jg;
                    local[fi * size + gi] += w * value;
                }
            }
        }
        let dofs: Vec<usize> = sides
            .iter()
            .flat_map(|s| (0..nb).map(move |l| space.u_offset(s.element) + l))
            .collect();
        for (r, &dr) in dofs.iter().enumerate() {
            for (c, &dc) in dofs.iter().enumerate() {
                t.push(dr, dc, local[r * size + c]);
            }
        }
    }
    Ok(t.build())
}

pub fn assemble_b(space: &DgSpace, mesh: &Mesh) -> Result<SparseMatrix> {
    space.check_mesh(mesh)?;
    let nk = space.n_scalar();
    let nq = space.p_block();
    let mut t = TripletList::new(space.n_p(), space.n_u());
    let table = volume_table(space)?;
    for e in 0..mesh.n_elements() {
        let geom = mesh.geometry(e);
        let mut local = vec![0.0; nq * 2 * nk];
        for ((ref_eval, psi), &w) in table.velocity.iter().zip(&table.pressure).zip(&table.weights) {
            let g = ref_eval.mapped(&geom).gradients;
            let w = w * geom.det;
            for (l, &pl) in psi.iter().enumerate() {
                for d in 0..2 {
                    for j in 0..nk {
                        local[l * 2 * nk + d * nk + j] -= w * pl * g[j][d];
                    }
                }
            }
        }
        for l in 0..nq {
            for col in 0..2 * nk {
                t.push(space.p_dof(e, l), space.u_offset(e) + col, local[l * 2 * nk + col]);
            }
        }
    }

    let rule = line_rule(space.quadrature_degree())?;
    for facet in mesh.facets().iter().filter(|f| penalized(f)) {
        let sides = sides(facet);
        let n = facet.normal;
        let evals: Vec<_> = facet_quadrature(mesh, facet, &rule)
            .into_iter()
            .map(|(x, w)| {
                let per_side: Vec<(Vec<f64>, Vec<f64>)> = sides
                    .iter()
                    .map(|s| {
                        let xi = mesh.geometry(s.element).to_reference(x);
                        (space.pressure_basis().values(xi), space.velocity_basis().values(xi))
                    })
                    .collect();
                (w, per_side)
            })
            .collect();
        for (sq, q_side) in sides.iter().enumerate() {
            for (sv, v_side) in sides.iter().enumerate() {
                for l in 0..nq {
                    for d in 0..2 {
                        for j in 0..nk {
                            let value: f64 = evals
                                .iter()
                                .map(|(w, vals)| w * q_side.weight * vals[sq].0[l] * v_side.sign * vals[sv].1[j] * n[d])
                                .sum();
                            t.push(space.p_dof(q_side.element, l), space.u_dof(v_side.element, d, j), value);
                        }
                    }
                }
            }
        }
    }
    Ok(t.build())
}

pub fn assemble_c(space: &DgSpace, mesh: &Mesh, materials: &MaterialTable) -> Result<SparseMatrix> {
    space.check_mesh(mesh)?;
    let coeffs = element_coefficients(mesh, materials)?;
    let nq = space.p_block();
    let table = volume_table(space)?;
    let mut t = TripletList::new(space.n_p(), space.n_p());
    for e in 0..mesh.n_elements() {
        let inv_lambda = coeffs[e].inv_lambda;
        if inv_lambda == 0.0 {
            continue;
        }
        let w_e = mesh.geometry(e).det * inv_lambda;
        for l in 0..nq {
            for m in 0..nq {
                let value: f64 = table
                    .pressure
                    .iter()
                    .zip(&table.weights)
                    .map(|(psi, w)| w * psi[l] * psi[m])
                    .sum();
                t.push(space.p_dof(e, l), space.p_dof(e, m), w_e * value);
            }
        }
    }
    Ok(t.build())
}

pub fn assemble_mass(space: &DgSpace, mesh: &Mesh, materials: &MaterialTable) -> Result<SparseMatrix> {
    space.check_mesh(mesh)?;
    let coeffs = element_coefficients(mesh, materials)?;
    let nk = space.n_scalar();
    let table = volume_table(space)?;
    let mut reference = vec![0.0; nk * nk];
    for (ev, &w) in table.velocity.iter().zip(&table.weights) {
        for i in 0..nk {
            for j in 0..nk {
                reference[i * nk + j] += w * ev.values[i] * ev.values[j];
            }
        }
    }
    let mut t = TripletList::new(space.n_u(), space.n_u());
    for e in 0..mesh.n_elements() {
        let scale = mesh.geometry(e).det * coeffs[e].density;
        for c in 0..2 {
            for i in 0..nk {
                for j in 0..nk {
                    t.push(
                        space.u_dof(e, c, i),
                        space.u_dof(e, c, j),
                        scale * reference[i * nk + j],
                    );
                }
            }
        }
    }
    Ok(t.build())
}

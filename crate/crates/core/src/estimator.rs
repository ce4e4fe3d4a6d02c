//! Residual a posteriori indicators, effectivity and maximum marking.
//!
//! With `sigma = 2 mu eps(u)` and element-constant coefficients, element `K`
//! collects
//!
//! * `eta_R^2 = h_K^2/(2mu) |kappa rho u + div sigma - grad p|^2_K
//!   + ((2mu)^-1 + lambda^-1)^-1 |div u + lambda^-1 p|^2_K`,
//! * `eta_F^2 = sum_F h_F/(2mu) |[(p I - sigma) n]|^2_F` over its interior
//!   and Neumann facets (one-sided traction on the latter),
//! * `eta_J^2 = sum_F 2mu a_S/h_F |[u]|^2_F` over its interior and
//!   Dirichlet facets (`|u|` on the latter),
//! * `Theta_K = |(2mu_h)^-1/2 (mu - mu_h) eps(u)|_K` with `mu_h` the element
//!   mean of `mu`.
//!
//! Coefficients in facet terms are those of `K` itself.

use crate::assembly::{element_coefficients, facet_quadrature, ElementCoefficients};
use crate::materials::MaterialTable;
use crate::mesh::{FacetKind, Mesh, Point};
use crate::spaces::{line_rule, triangle_rule, DgSpace};
use crate::{Error, Result};

/// Indicator components of one element (norms, not squares).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ElementIndicator {
    pub eta_r: f64,
    pub eta_f: f64,
    pub eta_j: f64,
    pub theta: f64,
}

impl ElementIndicator {
    pub fn eta_sq(&self) -> f64 {
        self.eta_r.powi(2) + self.eta_f.powi(2) + self.eta_j.powi(2)
    }

    pub fn eta(&self) -> f64 {
        self.eta_sq().sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorField {
    pub elements: Vec<ElementIndicator>,
}

impl IndicatorField {
    /// Per-element `eta_K`.
    pub fn eta_k(&self) -> Vec<f64> {
        self.elements.iter().map(ElementIndicator::eta).collect()
    }

    /// Global `eta^2 = sum_K eta_K^2`.
    pub fn eta_sq(&self) -> f64 {
        self.elements.iter().map(ElementIndicator::eta_sq).sum()
    }

    pub fn eta(&self) -> f64 {
        self.eta_sq().sqrt()
    }

    /// Global oscillation `(sum_K Theta_K^2)^{1/2}`.
    pub fn theta(&self) -> f64 {
        self.elements.iter().map(|e| e.theta * e.theta).sum::<f64>().sqrt()
    }
}

/// Displacement value, gradient (`grad[c][d] = d u_c / d x_d`) and Hessian.
struct Displacement {
    value: [f64; 2],
    grad: [[f64; 2]; 2],
    hess: [[[f64; 2]; 2]; 2],
}

fn displacement_at(space: &DgSpace, mesh: &Mesh, u: &[f64], e: usize, x: Point) -> Displacement {
    let geom = mesh.geometry(e);
    let ev = space.velocity_basis().eval(geom.to_reference(x)).mapped(&geom);
    let mut d = Displacement {
        value: [0.0; 2],
        grad: [[0.0; 2]; 2],
        hess: [[[0.0; 2]; 2]; 2],
    };
    for c in 0..2 {
        for i in 0..space.n_scalar() {
            let coef = u[space.u_dof(e, c, i)];
            d.value[c] += coef * ev.values[i];
            for a in 0..2 {
                d.grad[c][a] += coef * ev.gradients[i][a];
                for b in 0..2 {
                    d.hess[c][a][b] += coef * ev.hessians[i][a][b];
                }
            }
        }
    }
    d
}

/// Pressure value and gradient.
fn pressure_at(space: &DgSpace, mesh: &Mesh, p: &[f64], e: usize, x: Point) -> (f64, [f64; 2]) {
    let geom = mesh.geometry(e);
    let ev = space.pressure_basis().eval(geom.to_reference(x)).mapped(&geom);
    let mut value = 0.0;
    let mut grad = [0.0; 2];
    for i in 0..space.p_block() {
        let coef = p[space.p_dof(e, i)];
        value += coef * ev.values[i];
        grad[0] += coef * ev.gradients[i][0];
        grad[1] += coef * ev.gradients[i][1];
    }
    (value, grad)
}

/// `(p I - 2 mu eps(u)) n`.
fn traction(d: &Displacement, p: f64, mu: f64, n: [f64; 2]) -> [f64; 2] {
    let mut t = [p * n[0], p * n[1]];
    for (c, tc) in t.iter_mut().enumerate() {
        for a in 0..2 {
            *tc -= mu * (d.grad[c][a] + d.grad[a][c]) * n[a];
        }
    }
    t
}

fn strain_norm_sq(d: &Displacement) -> f64 {
    let mut s = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let e = 0.5 * (d.grad[a][b] + d.grad[b][a]);
            s += e * e;
        }
    }
    s
}

/// Indicators for one discrete eigenpair. `kappa` is the scaled eigenvalue.
pub fn local_indicators(
    mesh: &Mesh,
    space: &DgSpace,
    materials: &MaterialTable,
    kappa: f64,
    u: &[f64],
    p: &[f64],
    a_s: f64,
) -> Result<IndicatorField> {
    space.check_mesh(mesh)?;
    if u.len() != space.n_u() || p.len() != space.n_p() {
        return Err(Error::InvalidArgument(format!(
            "eigenvector sizes ({}, {}) do not match the space ({}, {})",
            u.len(),
            p.len(),
            space.n_u(),
            space.n_p()
        )));
    }
    let coeffs = element_coefficients(mesh, materials)?;
    let volume = triangle_rule(space.quadrature_degree())?;
    let line = line_rule(space.quadrature_degree())?;

    let mut out = vec![ElementIndicator::default(); mesh.n_elements()];
    for (e, ind) in out.iter_mut().enumerate() {
        let geom = mesh.geometry(e);
        let ElementCoefficients {
            mu,
            inv_lambda,
            density,
        } = coeffs[e];
        // element mean of a piecewise-constant coefficient
        let mu_h = mu;
        let h = mesh.diameter(e);
        let div_weight = 1.0 / (0.5 / mu + inv_lambda);
        let (mut r1, mut r2, mut osc) = (0.0, 0.0, 0.0);
        for (&xi, &w) in volume.points.iter().zip(&volume.weights) {
            let x = geom.to_physical(xi);
            let w = w * geom.det;
            let d = displacement_at(space, mesh, u, e, x);
            let (pv, pg) = pressure_at(space, mesh, p, e, x);
            let div = d.grad[0][0] + d.grad[1][1];
            for c in 0..2 {
                let lap = d.hess[c][0][0] + d.hess[c][1][1];
                let grad_div = d.hess[0][0][c] + d.hess[1][1][c];
                let r = kappa * density * d.value[c] + mu * (lap + grad_div) - pg[c];
                r1 += w * r * r;
            }
            let q = div + inv_lambda * pv;
            r2 += w * q * q;
            osc += w * (mu - mu_h).powi(2) / (2.0 * mu_h) * strain_norm_sq(&d);
        }
        ind.eta_r = (h * h / (2.0 * mu) * r1 + div_weight * r2).sqrt();
        ind.theta = osc.sqrt();
    }

    let mut facet_sq = vec![0.0; mesh.n_elements()];
    let mut jump_sq = vec![0.0; mesh.n_elements()];
    for facet in mesh.facets() {
        let points = facet_quadrature(mesh, facet, &line);
        let n = facet.normal;
        let l = facet.left;
        match (facet.kind, facet.right) {
            (FacetKind::Interior, Some(r)) => {
                let (mut tj, mut uj) = (0.0, 0.0);
                for &(x, w) in &points {
                    let dl = displacement_at(space, mesh, u, l, x);
                    let dr = displacement_at(space, mesh, u, r, x);
                    let tl = traction(&dl, pressure_at(space, mesh, p, l, x).0, coeffs[l].mu, n);
                    let tr = traction(&dr, pressure_at(space, mesh, p, r, x).0, coeffs[r].mu, n);
                    tj += w * ((tl[0] - tr[0]).powi(2) + (tl[1] - tr[1]).powi(2));
                    uj += w * ((dl.value[0] - dr.value[0]).powi(2) + (dl.value[1] - dr.value[1]).powi(2));
                }
                for side in [l, r] {
                    let mu = coeffs[side].mu;
                    facet_sq[side] += facet.length / (2.0 * mu) * tj;
                    jump_sq[side] += 2.0 * mu * a_s / facet.length * uj;
                }
            }
            (FacetKind::Neumann, None) => {
                let mu = coeffs[l].mu;
                let mut tj = 0.0;
                for &(x, w) in &points {
                    let d = displacement_at(space, mesh, u, l, x);
                    let t = traction(&d, pressure_at(space, mesh, p, l, x).0, mu, n);
                    tj += w * (t[0] * t[0] + t[1] * t[1]);
                }
                facet_sq[l] += facet.length / (2.0 * mu) * tj;
            }
            (FacetKind::Dirichlet, None) => {
                let mu = coeffs[l].mu;
                let mut uj = 0.0;
                for &(x, w) in &points {
                    let d = displacement_at(space, mesh, u, l, x);
                    uj += w * (d.value[0].powi(2) + d.value[1].powi(2));
                }
                jump_sq[l] += 2.0 * mu * a_s / facet.length * uj;
            }
            _ => unreachable!("facet kind and neighbour count are consistent"),
        }
    }
    for (e, ind) in out.iter_mut().enumerate() {
        ind.eta_f = facet_sq[e].sqrt();
        ind.eta_j = jump_sq[e].sqrt();
    }
    Ok(IndicatorField { elements: out })
}

/// `err / eta^2`.
pub fn effectivity(err: f64, eta: f64) -> Result<f64> {
    if !(err >= 0.0) || !(eta >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "error and estimator must be nonnegative, got {err} and {eta}"
        )));
    }
    if eta == 0.0 {
        if err == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::InvalidArgument(
            "estimator vanishes while the error does not".into(),
        ));
    }
    Ok(err / (eta * eta))
}

/// Elements with `eta_K >= theta * max eta_K`, in ascending order.
pub fn mark(eta_k: &[f64], theta: f64) -> Result<Vec<usize>> {
    if eta_k.is_empty() {
        return Err(Error::InvalidArgument("cannot mark an empty indicator field".into()));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "marking parameter must lie in (0, 1], got {theta}"
        )));
    }
    let max = eta_k.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(Vec::new());
    }
    Ok((0..eta_k.len()).filter(|&i| eta_k[i] >= theta * max).collect())
}

//! Dense backend.
//!
//! With `M = L L^T` and `y = L^T u` the pencil collapses to a standard
//! eigenproblem for the finite spectrum:
//!
//! * `C` positive definite: `(A^ + B^T C^-1 B^) y = kappa y`,
//! * `C = 0`: `Z^T A^ Z w = kappa w` on the kernel `Z` of `B^`,
//!
//! where `A^ = L^-1 A L^-T` and `B^ = B L^-T`. Anything else goes through
//! complex QZ on the full pair.

use faer::linalg::solvers::{Llt, Solve};
use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::{c64, Mat, Par, Side};

use super::{Backend, EigenResult, Problem};
use crate::assembly::{IpVariant, SparseMatrix};
use crate::{Error, Result};

pub(crate) fn solve(problem: &Problem, modes: usize) -> Result<EigenResult> {
    let pairs = match Reduced::new(problem) {
        Some(reduced) => reduced.solve(problem, modes)?,
        None => qz(problem, modes)?,
    };
    Ok(EigenResult {
        pairs,
        shift: 0.0,
        backend: Backend::Dense,
        cutoff: problem.cutoff,
    })
}

fn dense(m: &SparseMatrix) -> Mat<f64> {
    let mut out = Mat::zeros(m.nrows(), m.ncols());
    for (r, c, v) in m.iter() {
        out[(r, c)] += v;
    }
    out
}

/// Recovers the pressure of an eigenpair from its reduced displacement `y`.
enum Pressure {
    Empty,
    /// `p = C^-1 B^ y`, stored as the `n_p x n_u` product.
    Schur(Mat<f64>),
    /// Least squares `B^^T p = kappa y - A^ y` through the SVD of `B^^T`.
    Kernel {
        a_hat: Mat<f64>,
        range: Mat<f64>,
        inv_sigma: Vec<f64>,
        v: Mat<f64>,
    },
}

struct Reduced {
    l: Mat<f64>,
    operator: Mat<f64>,
    /// Kernel basis when the operator acts on `w` with `y = Z w`.
    basis: Option<Mat<f64>>,
    pressure: Pressure,
}

impl Reduced {
    fn new(problem: &Problem) -> Option<Self> {
        let sys = problem.system;
        let (n_u, n_p) = (sys.n_u(), sys.n_p());
        let l = dense(&sys.m).llt(Side::Lower).ok()?.L().to_owned();

        // A^ = L^-1 A L^-T, B^^T = L^-1 B^T
        let mut y = dense(&sys.a);
        solve_lower_triangular_in_place(l.as_ref(), y.as_mut(), Par::Seq);
        let mut a_hat = y.transpose().to_owned();
        solve_lower_triangular_in_place(l.as_ref(), a_hat.as_mut(), Par::Seq);
        let a_hat = a_hat.transpose().to_owned();
        let mut bt_hat = dense(&sys.b).transpose().to_owned();
        solve_lower_triangular_in_place(l.as_ref(), bt_hat.as_mut(), Par::Seq);

        if n_p == 0 {
            return Some(Self {
                l,
                operator: a_hat,
                basis: None,
                pressure: Pressure::Empty,
            });
        }
        if sys.c.max_abs() == 0.0 {
            let svd = bt_hat.svd().ok()?;
            let sigma: Vec<f64> = (0..n_p).map(|i| svd.S()[i]).collect();
            let s_max = sigma.iter().copied().fold(0.0, f64::max);
            let rank = sigma.iter().filter(|&&s| s > 1e-10 * s_max).count();
            let u = svd.U();
            let z = u.subcols(rank, n_u - rank).to_owned();
            let operator = z.transpose() * &a_hat * &z;
            return Some(Self {
                l,
                operator,
                basis: Some(z),
                pressure: Pressure::Kernel {
                    range: u.subcols(0, rank).to_owned(),
                    inv_sigma: sigma[..rank].iter().map(|s| 1.0 / s).collect(),
                    v: svd.V().subcols(0, rank).to_owned(),
                    a_hat,
                },
            });
        }
        let c: Llt<f64> = dense(&sys.c).llt(Side::Lower).ok()?;
        let schur = c.solve(bt_hat.transpose());
        let operator = &a_hat + &bt_hat * &schur;
        Some(Self {
            l,
            operator,
            basis: None,
            pressure: Pressure::Schur(schur),
        })
    }

    fn solve(&self, problem: &Problem, modes: usize) -> Result<Vec<super::EigenPair>> {
        let n = self.operator.nrows();
        // faer's dense eigensolvers lose accuracy on badly scaled input
        let unit = self.operator.norm_max();
        let unit = if unit > 0.0 { unit } else { 1.0 };
        let op = Mat::from_fn(n, n, |i, j| self.operator[(i, j)] / unit);
        // eigenvalues and eigenvectors as (kappa, re, im) columns
        let (values, vec_re, vec_im): (Vec<c64>, Mat<f64>, Mat<f64>) = if problem.system.variant == IpVariant::Symmetric
        {
            let sym = Mat::from_fn(n, n, |i, j| 0.5 * (op[(i, j)] + op[(j, i)]));
            let evd = sym
                .self_adjoint_eigen(Side::Lower)
                .map_err(|e| Error::Eigen(format!("symmetric eigensolver failed: {e:?}")))?;
            let s = evd.S();
            (
                (0..n).map(|i| c64::new(s[i] * unit, 0.0)).collect(),
                evd.U().to_owned(),
                Mat::zeros(n, n),
            )
        } else {
            let evd = op
                .eigen()
                .map_err(|e| Error::Eigen(format!("eigensolver failed: {e:?}")))?;
            let (s, u) = (evd.S(), evd.U());
            (
                (0..n).map(|i| s[i] * unit).collect(),
                Mat::from_fn(n, n, |i, j| u[(i, j)].re),
                Mat::from_fn(n, n, |i, j| u[(i, j)].im),
            )
        };

        let mut candidates: Vec<(c64, usize)> = values
            .iter()
            .enumerate()
            .filter(|(_, k)| problem.is_physical(**k))
            .map(|(i, &k)| (k, i))
            .collect();
        candidates.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        if candidates.len() < modes {
            return Err(Error::Eigen(format!(
                "only {} physical eigenvalues exist, {modes} requested",
                candidates.len()
            )));
        }
        Ok(candidates[..modes]
            .iter()
            .map(|&(kappa, i)| {
                let w = Mat::from_fn(n, 2, |r, c| if c == 0 { vec_re[(r, i)] } else { vec_im[(r, i)] });
                problem.finish(kappa, self.lift(kappa, w))
            })
            .collect())
    }

    /// Full `(u, p)` from a reduced eigenvector stored as `[re, im]` columns.
    fn lift(&self, kappa: c64, w: Mat<f64>) -> Vec<c64> {
        let y = match &self.basis {
            Some(z) => z * &w,
            None => w,
        };
        let mut u = y.clone();
        solve_upper_triangular_in_place(self.l.transpose(), u.as_mut(), Par::Seq);
        let p = match &self.pressure {
            Pressure::Empty => Mat::zeros(0, 2),
            Pressure::Schur(schur) => schur * &y,
            Pressure::Kernel {
                a_hat,
                range,
                inv_sigma,
                v,
            } => {
                // g = kappa y - A^ y in complex arithmetic on [re, im] columns
                let ay = a_hat * &y;
                let g = Mat::from_fn(y.nrows(), 2, |r, c| {
                    let (yr, yi) = (y[(r, 0)], y[(r, 1)]);
                    let ky = kappa * c64::new(yr, yi);
                    (if c == 0 { ky.re } else { ky.im }) - ay[(r, c)]
                });
                let mut coef = range.transpose() * &g;
                for (i, s) in inv_sigma.iter().enumerate() {
                    coef[(i, 0)] *= s;
                    coef[(i, 1)] *= s;
                }
                v * &coef
            }
        };
        (0..u.nrows())
            .map(|r| c64::new(u[(r, 0)], u[(r, 1)]))
            .chain((0..p.nrows()).map(|r| c64::new(p[(r, 0)], p[(r, 1)])))
            .collect()
    }
}

/// Complex QZ on the full pair.
fn qz(problem: &Problem, modes: usize) -> Result<Vec<super::EigenPair>> {
    let sys = problem.system;
    let n = sys.dim();
    let mut k = Mat::<c64>::zeros(n, n);
    for (r, c, v) in problem.k.iter() {
        k[(r, c)] += c64::new(v, 0.0);
    }
    let mut m = Mat::<c64>::zeros(n, n);
    for (r, c, v) in sys.m.iter() {
        m[(r, c)] += c64::new(v, 0.0);
    }
    let gevd = faer::linalg::solvers::GeneralizedEigen::new(k.as_ref(), m.as_ref())
        .map_err(|e| Error::Eigen(format!("QZ iteration failed: {e:?}")))?;
    let alpha = gevd.S_a().column_vector();
    let beta = gevd.S_b().column_vector();
    let beta_max = (0..n).map(|i| beta[i].norm()).fold(0.0, f64::max);

    let mut candidates: Vec<(c64, usize)> = (0..n)
        .filter(|&i| beta[i].norm() > 1e-10 * beta_max)
        .map(|i| (alpha[i] / beta[i], i))
        .filter(|&(kappa, _)| problem.is_physical(kappa))
        .collect();
    candidates.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    if candidates.len() < modes {
        return Err(Error::Eigen(format!(
            "only {} physical eigenvalues exist, {modes} requested",
            candidates.len()
        )));
    }
    let u = gevd.U();
    Ok(candidates[..modes]
        .iter()
        .map(|&(kappa, i)| problem.finish(kappa, (0..n).map(|r| u[(r, i)]).collect()))
        .collect())
}

/// Complex QZ, bypassing the reduction. Used by tests as a second route.
#[cfg(test)]
pub(crate) fn solve_qz(problem: &Problem, modes: usize) -> Result<Vec<super::EigenPair>> {
    qz(problem, modes)
}

use faer::linalg::solvers::Solve;
use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{sort_pairs, Backend, EigenPair, EigenResult, Problem, SolverOptions};
use crate::{Error, Result};

/// Arnoldi subspace growth per round once the initial basis is exhausted.
const GROWTH: usize = 20;

struct ShiftInvert {
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    n: usize,
    n_u: usize,
    shift: f64,
}

impl ShiftInvert {
    /// `x -> (K - shift M_hat)^{-1} M_hat x`.
    fn apply(&self, x: &[f64], problem: &Problem) -> Result<Vec<f64>> {
        let mx = problem.system.m.matvec(&x[..self.n_u]);
        let mut rhs = Mat::<f64>::zeros(self.n, 1);
        for (i, v) in mx.into_iter().enumerate() {
            rhs[(i, 0)] = v;
        }
        self.lu.solve_in_place(rhs.as_mut());
        let out: Vec<f64> = (0..self.n).map(|i| rhs[(i, 0)]).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Factorization { shift: self.shift });
        }
        Ok(out)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn solve(problem: &Problem, options: &SolverOptions, shift: f64) -> Result<EigenResult> {
    let sys = problem.system;
    let n = sys.dim();
    let op = sys.shifted_operator(shift).to_faer()?;
    let lu = op.sp_lu().map_err(|_| Error::Factorization { shift })?;
    let t = ShiftInvert {
        lu,
        n,
        n_u: sys.n_u(),
        shift,
    };

    let modes = options.modes;
    let max_dim = options.max_subspace.min(n);
    let mut target = (2 * modes + 10).max(30).min(max_dim);

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let start: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    // one application removes components along the infinite eigenvectors
    let mut v0 = t.apply(&start, problem)?;
    let nv = norm(&v0);
    if nv == 0.0 {
        return Err(Error::Eigen("start vector annihilated by the operator".into()));
    }
    v0.iter_mut().for_each(|x| *x /= nv);

    let mut basis = vec![v0];
    // column j of the Hessenberg matrix has j + 2 entries
    let mut hess: Vec<Vec<f64>> = Vec::new();
    let mut breakdown = false;

    loop {
        while !breakdown && hess.len() < target {
            let j = hess.len();
            let mut w = t.apply(&basis[j], problem)?;
            let w_norm = norm(&w);
            let mut col = vec![0.0; j + 2];
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let c = dot(v, &w);
                    col[i] += c;
                    w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
                }
            }
            let h = norm(&w);
            col[j + 1] = h;
            hess.push(col);
            if h <= 1e-14 * w_norm {
                breakdown = true;
            } else {
                w.iter_mut().for_each(|x| *x /= h);
                basis.push(w);
            }
        }

        let dim = hess.len();
        let h = Mat::from_fn(dim, dim, |r, c| hess[c].get(r).copied().unwrap_or(0.0));
        let evd = h
            .eigen()
            .map_err(|e| Error::Eigen(format!("Ritz decomposition failed: {e:?}")))?;
        let thetas = evd.S().column_vector();
        let vecs = evd.U();
        let theta_max = (0..dim).map(|i| thetas[i].norm()).fold(0.0, f64::max);
        let mut order: Vec<usize> = (0..dim).filter(|&i| thetas[i].norm() > 1e-10 * theta_max).collect();
        // closest to the shift first
        order.sort_by(|&a, &b| thetas[b].norm().total_cmp(&thetas[a].norm()));

        // |h_{m+1,m}| of the Arnoldi relation, zero after breakdown
        let beta = if breakdown { 0.0 } else { hess[dim - 1][dim] };
        let mut pairs: Vec<EigenPair> = Vec::with_capacity(modes);
        let mut converged = 0;
        for &i in &order {
            if pairs.len() == modes {
                break;
            }
            let kappa = super::spectral_transform_map(thetas[i], shift)?;
            if !problem.is_physical(kappa) {
                continue;
            }
            let mut z = vec![c64::new(0.0, 0.0); n];
            for (j, v) in basis.iter().take(dim).enumerate() {
                let y = vecs[(j, i)];
                z.iter_mut().zip(v).for_each(|(zi, &vi)| *zi += y * vi);
            }
            // Ritz estimate |T x - theta x| relative to |theta|
            let y_norm = (0..dim).map(|j| vecs[(j, i)].norm_sqr()).sum::<f64>().sqrt();
            let estimate = beta * vecs[(dim - 1, i)].norm() / y_norm;
            if estimate <= options.tol * thetas[i].norm() {
                converged += 1;
            }
            pairs.push(problem.finish(kappa, z));
        }

        if pairs.len() == modes && converged == modes {
            return Ok(EigenResult {
                pairs,
                shift,
                backend: Backend::ShiftInvert,
                cutoff: problem.cutoff,
            });
        }
        if breakdown || dim >= max_dim {
            sort_pairs(&mut pairs);
            return Err(Error::NoConvergence {
                wanted: modes,
                converged,
                iterations: dim,
                partial: Box::new(EigenResult {
                    pairs,
                    shift,
                    backend: Backend::ShiftInvert,
                    cutoff: problem.cutoff,
                }),
            });
        }
        target = (target + GROWTH).min(max_dim);
    }
}

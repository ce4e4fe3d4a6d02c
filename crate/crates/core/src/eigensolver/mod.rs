//! Generalized eigensolver for `K z = kappa M_hat z`.
//!
//! `K = [[A, B^T], [B, -C]]` and `M_hat = diag(M, 0)`. The zero pressure
//! mass makes `n_p` eigenvalues infinite; both backends discard them.

mod arnoldi;
mod dense;

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::assembly::{BlockSystem, IpVariant, SparseMatrix};
use crate::materials::MaterialTable;
use crate::mesh::Mesh;
use crate::{Error, Result};

/// Systems up to this dimension go to the dense backend under `Auto`.
pub const AUTO_DENSE_LIMIT: usize = 1500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Dense reduction to a standard eigenproblem (complex QZ as fallback).
    Dense,
    /// Sparse LU of `K - shift M_hat` plus Arnoldi.
    ShiftInvert,
    Auto,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub backend: Backend,
    /// `None` selects [`BlockSystem::shift_hint`].
    pub shift: Option<f64>,
    /// Shift-invert acceptance: Ritz estimate `|T x - theta x| <= tol |theta|`.
    pub tol: f64,
    pub modes: usize,
    pub seed: u64,
    /// Upper bound on the Arnoldi subspace dimension.
    pub max_subspace: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            backend: Backend::Auto,
            shift: None,
            tol: 1e-8,
            modes: 10,
            seed: 0,
            max_subspace: 600,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub kappa: c64,
    pub u: Vec<c64>,
    pub p: Vec<c64>,
    /// `|K z - kappa M_hat z| / ((|K|_1 + |kappa| |M_hat|_1) |z|)` for the
    /// pressure-balanced pencil (see [`pressure_scale`]).
    pub residual: f64,
}

impl EigenPair {
    /// Real parts of the displacement coefficients.
    pub fn u_real(&self) -> Vec<f64> {
        self.u.iter().map(|z| z.re).collect()
    }

    pub fn p_real(&self) -> Vec<f64> {
        self.p.iter().map(|z| z.re).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    /// Ascending by real part, then imaginary part.
    pub pairs: Vec<EigenPair>,
    pub shift: f64,
    pub backend: Backend,
    /// Eigenvalues with real part at or below this are treated as non-physical.
    pub cutoff: f64,
}

impl EigenResult {
    pub fn kappas(&self) -> Vec<c64> {
        self.pairs.iter().map(|p| p.kappa).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.pairs.iter().map(|p| p.residual).fold(0.0, f64::max)
    }
}

/// Shift-invert spectral map `kappa = shift + 1/theta`.
pub fn spectral_transform_map(theta: c64, shift: f64) -> Result<c64> {
    if theta.re == 0.0 && theta.im == 0.0 {
        return Err(Error::InvalidArgument(
            "theta = 0 corresponds to an infinite eigenvalue".into(),
        ));
    }
    Ok(c64::new(shift, 0.0) + theta.inv())
}

/// Shift slightly below the spectrum: `-0.01 min(mu/rho) / diam^2`.
pub fn default_shift(mesh: &Mesh, materials: &MaterialTable) -> f64 {
    let ratio = materials
        .entries()
        .values()
        .map(|m| 0.5 * m.young / m.density)
        .fold(f64::INFINITY, f64::min);
    let d = mesh.domain_diameter();
    -0.01 * ratio / (d * d)
}

/// Operator data shared by both backends.
pub(crate) struct Problem<'a> {
    pub system: &'a BlockSystem,
    pub k: SparseMatrix,
    pub k_norm: f64,
    pub m_norm: f64,
    pub cutoff: f64,
}

impl<'a> Problem<'a> {
    fn new(system: &'a BlockSystem) -> Self {
        let k = system.stiffness();
        let k_norm = k.norm_1();
        let m_norm = system.m.norm_1();
        let a_norm = system.a.norm_1();
        let cutoff = if m_norm > 0.0 { 1e-9 * a_norm / m_norm } else { 0.0 };
        Self {
            system,
            k,
            k_norm,
            m_norm,
            cutoff,
        }
    }

    fn is_physical(&self, kappa: c64) -> bool {
        kappa.re.is_finite() && kappa.im.is_finite() && kappa.re > self.cutoff
    }

    /// Backward error of a candidate pair.
    fn residual(&self, kappa: c64, z: &[c64]) -> f64 {
        let n_u = self.system.n_u();
        let re: Vec<f64> = z.iter().map(|v| v.re).collect();
        let im: Vec<f64> = z.iter().map(|v| v.im).collect();
        let (kr, ki) = (self.k.matvec(&re), self.k.matvec(&im));
        let (mr, mi) = (self.system.m.matvec(&re[..n_u]), self.system.m.matvec(&im[..n_u]));
        let mut r2 = 0.0;
        for i in 0..z.len() {
            let mut r = c64::new(kr[i], ki[i]);
            if i < n_u {
                r -= kappa * c64::new(mr[i], mi[i]);
            }
            r2 += r.norm_sqr();
        }
        let zn = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let scale = (self.k_norm + kappa.norm() * self.m_norm) * zn;
        if scale == 0.0 {
            0.0
        } else {
            r2.sqrt() / scale
        }
    }

    /// Normalizes `u^H M u = 1`, fixes the phase and builds the pair.
    fn finish(&self, mut kappa: c64, mut z: Vec<c64>) -> EigenPair {
        let n_u = self.system.n_u();
        let real_method = self.system.variant == IpVariant::Symmetric;
        if real_method && kappa.im.abs() <= 1e-10 * kappa.norm().max(1.0) {
            kappa.im = 0.0;
        }
        let re: Vec<f64> = z[..n_u].iter().map(|v| v.re).collect();
        let im: Vec<f64> = z[..n_u].iter().map(|v| v.im).collect();
        let norm2 = self.system.m.bilinear(&re, &re) + self.system.m.bilinear(&im, &im);
        let pivot = z[..n_u]
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or(c64::new(1.0, 0.0));
        if norm2 > 0.0 && pivot.norm() > 0.0 {
            let phase = pivot.conj() / pivot.norm();
            let scale = phase / norm2.sqrt();
            for v in z.iter_mut() {
                *v *= scale;
            }
        }
        if real_method && kappa.im == 0.0 {
            for v in z.iter_mut() {
                v.im = 0.0;
            }
        }
        let residual = self.residual(kappa, &z);
        let p = z.split_off(n_u);
        EigenPair {
            kappa,
            u: z,
            p,
            residual,
        }
    }
}

pub(crate) fn sort_pairs(pairs: &mut [EigenPair]) {
    pairs.sort_by(|a, b| {
        a.kappa
            .re
            .total_cmp(&b.kappa.re)
            .then(a.kappa.im.total_cmp(&b.kappa.im))
    });
}

/// The `modes` physical eigenpairs with smallest real part.
pub fn solve_evp(system: &BlockSystem, options: &SolverOptions) -> Result<EigenResult> {
    if options.modes == 0 {
        return Err(Error::InvalidArgument("number of modes must be at least 1".into()));
    }
    if !(options.tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "solver tolerance must be positive, got {}",
            options.tol
        )));
    }
    let backend = match options.backend {
        Backend::Auto if system.dim() <= AUTO_DENSE_LIMIT => Backend::Dense,
        Backend::Auto => Backend::ShiftInvert,
        b => b,
    };
    let scale = pressure_scale(system);
    let balanced = system.with_pressure_scale(scale);
    let problem = Problem::new(&balanced);
    let shift = options.shift.unwrap_or(system.shift_hint);
    let mut result = match backend {
        Backend::Dense => dense::solve(&problem, options.modes),
        _ => arnoldi::solve(&problem, options, shift),
    }
    .map_err(|e| match e {
        Error::NoConvergence {
            wanted,
            converged,
            iterations,
            mut partial,
        } => {
            unscale_pressure(&mut partial, scale);
            Error::NoConvergence {
                wanted,
                converged,
                iterations,
                partial,
            }
        }
        other => other,
    })?;
    unscale_pressure(&mut result, scale);
    result.shift = if backend == Backend::Dense { 0.0 } else { shift };
    sort_pairs(&mut result.pairs);
    Ok(result)
}

/// Pressure unit `s` that brings `s B` to the size of `A`.
///
/// With `p = s q` the pencil becomes `[[A, s B^T], [s B, -s^2 C]]`. Without
/// it the blocks differ by powers of the Young modulus, which ruins pivoting
/// in the sparse LU for physical units.
pub fn pressure_scale(system: &BlockSystem) -> f64 {
    let (a, b) = (system.a.max_abs(), system.b.max_abs());
    if a > 0.0 && b > 0.0 {
        a / b
    } else {
        1.0
    }
}

fn unscale_pressure(result: &mut EigenResult, scale: f64) {
    for pair in &mut result.pairs {
        pair.p.iter_mut().for_each(|v| *v *= scale);
    }
}

//! Nodal Lagrange bases on the reference triangle.

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;

use crate::mesh::ElementGeometry;
use crate::{Error, Result};

pub const MAX_BASIS_DEGREE: usize = 3;

/// Dimension of the full polynomial space of total degree `k` in 2D.
pub fn dim_p(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Values and derivatives of every basis function at one reference point.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisEval {
    pub values: Vec<f64>,
    pub gradients: Vec<[f64; 2]>,
    pub hessians: Vec<[[f64; 2]; 2]>,
}

impl BasisEval {
    /// Pushes reference derivatives forward to a physical element.
    pub fn mapped(&self, geometry: &ElementGeometry) -> BasisEval {
        BasisEval {
            values: self.values.clone(),
            gradients: self.gradients.iter().map(|&g| geometry.map_gradient(g)).collect(),
            hessians: self.hessians.iter().map(|&h| geometry.map_hessian(h)).collect(),
        }
    }
}

/// Lagrange basis of degree `k` on uniformly spaced nodes.
///
/// Nodes are `(i/k, j/k)` with `i + j <= k`, ordered by `j` then `i`; for
/// `k = 1` this is the vertex order `(0,0), (1,0), (0,1)`. Degree 0 uses
/// the centroid.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangeBasis {
    k: usize,
    nodes: Vec<[f64; 2]>,
    exponents: Vec<(i32, i32)>,
    /// `coeffs[n][m]`: coefficient of monomial `m` in basis function `n`.
    coeffs: Vec<Vec<f64>>,
}

impl LagrangeBasis {
    pub fn new(k: usize) -> Result<Self> {
        if k > MAX_BASIS_DEGREE {
            return Err(Error::InvalidArgument(format!(
                "basis degree {k} unsupported (maximum {MAX_BASIS_DEGREE})"
            )));
        }
        let nodes: Vec<[f64; 2]> = if k == 0 {
            vec![[1.0 / 3.0, 1.0 / 3.0]]
        } else {
            let mut v = Vec::with_capacity(dim_p(k));
            for j in 0..=k {
                for i in 0..=(k - j) {
                    v.push([i as f64 / k as f64, j as f64 / k as f64]);
                }
            }
            v
        };
        let mut exponents = Vec::with_capacity(dim_p(k));
        for total in 0..=k as i32 {
            for b in 0..=total {
                exponents.push((total - b, b));
            }
        }
        let n = nodes.len();
        let vandermonde = Mat::from_fn(n, n, |r, c| {
            let (a, b) = exponents[c];
            nodes[r][0].powi(a) * nodes[r][1].powi(b)
        });
        let inv = vandermonde.partial_piv_lu().inverse();
        // V c_n = e_n, so c_n is column n of V^{-1}
        let coeffs = (0..n).map(|col| (0..n).map(|m| inv[(m, col)]).collect()).collect();
        Ok(Self {
            k,
            nodes,
            exponents,
            coeffs,
        })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn values(&self, xi: [f64; 2]) -> Vec<f64> {
        let mono: Vec<f64> = self
            .exponents
            .iter()
            .map(|&(a, b)| pow(xi[0], a) * pow(xi[1], b))
            .collect();
        self.combine(&mono)
    }

    pub fn eval(&self, xi: [f64; 2]) -> BasisEval {
        let (x, y) = (xi[0], xi[1]);
        let m = self.exponents.len();
        let mut v = Vec::with_capacity(m);
        let mut dx = Vec::with_capacity(m);
        let mut dy = Vec::with_capacity(m);
        let mut dxx = Vec::with_capacity(m);
        let mut dxy = Vec::with_capacity(m);
        let mut dyy = Vec::with_capacity(m);
        for &(a, b) in &self.exponents {
            let (fa, fb) = (a as f64, b as f64);
            v.push(pow(x, a) * pow(y, b));
            dx.push(fa * pow(x, a - 1) * pow(y, b));
            dy.push(fb * pow(x, a) * pow(y, b - 1));
            dxx.push(fa * (fa - 1.0) * pow(x, a - 2) * pow(y, b));
            dxy.push(fa * fb * pow(x, a - 1) * pow(y, b - 1));
            dyy.push(fb * (fb - 1.0) * pow(x, a) * pow(y, b - 2));
        }
        let values = self.combine(&v);
        let (gx, gy) = (self.combine(&dx), self.combine(&dy));
        let (hxx, hxy, hyy) = (self.combine(&dxx), self.combine(&dxy), self.combine(&dyy));
        BasisEval {
            values,
            gradients: gx.iter().zip(&gy).map(|(&a, &b)| [a, b]).collect(),
            hessians: (0..self.len()).map(|i| [[hxx[i], hxy[i]], [hxy[i], hyy[i]]]).collect(),
        }
    }

    fn combine(&self, mono: &[f64]) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.iter().zip(mono).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// `x^n`, with zero for negative exponents (derivative of a constant).
fn pow(x: f64, n: i32) -> f64 {
    if n < 0 {
        0.0
    } else {
        x.powi(n)
    }
}

/// Basis values, gradients and Hessians of degree `k` at a reference point.
pub fn eval_basis(k: usize, xi: [f64; 2]) -> Result<BasisEval> {
    Ok(LagrangeBasis::new(k)?.eval(xi))
}

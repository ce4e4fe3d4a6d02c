//! Sparse blocks of the discrete mixed eigenproblem.
//!
//! `A` is the interior penalty form, `B` the pressure coupling, `C` the
//! compressibility term and `M` the density-weighted mass. Rows index test
//! functions, columns trial functions.

mod forms;
mod sparse;

pub use forms::{assemble_a, assemble_b, assemble_c, assemble_mass};
pub use sparse::{SparseMatrix, TripletList};

use crate::materials::MaterialTable;
use crate::mesh::{Facet, Mesh, Point};
use crate::spaces::{DgSpace, LineRule};
use crate::{Error, Result};

/// Consistency variant of the interior penalty form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IpVariant {
    /// SIP, `epsilon = 1`.
    Symmetric,
    /// IIP, `epsilon = 0`.
    Incomplete,
    /// NIP, `epsilon = -1`.
    Nonsymmetric,
}

impl IpVariant {
    pub fn from_epsilon(epsilon: i32) -> Result<Self> {
        match epsilon {
            1 => Ok(Self::Symmetric),
            0 => Ok(Self::Incomplete),
            -1 => Ok(Self::Nonsymmetric),
            other => Err(Error::InvalidArgument(format!(
                "epsilon must be -1, 0 or 1, got {other}"
            ))),
        }
    }

    pub fn epsilon(self) -> i32 {
        match self {
            Self::Symmetric => 1,
            Self::Incomplete => 0,
            Self::Nonsymmetric => -1,
        }
    }
}

/// Material coefficients of one element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementCoefficients {
    pub mu: f64,
    pub inv_lambda: f64,
    pub density: f64,
}

/// Coefficients of every element, in element order.
pub fn element_coefficients(mesh: &Mesh, materials: &MaterialTable) -> Result<Vec<ElementCoefficients>> {
    mesh.materials()
        .iter()
        .map(|&id| {
            let lame = materials.lame(id)?;
            Ok(ElementCoefficients {
                mu: lame.mu,
                inv_lambda: lame.inv_lambda,
                density: materials.density(id)?,
            })
        })
        .collect()
}

/// Shear modulus used by facet penalties: harmonic mean across an interface.
pub fn facet_mu(facet: &Facet, coeffs: &[ElementCoefficients]) -> f64 {
    let ml = coeffs[facet.left].mu;
    match facet.right {
        Some(r) => {
            let mr = coeffs[r].mu;
            2.0 * ml * mr / (ml + mr)
        }
        None => ml,
    }
}

/// Physical quadrature points and weights along a facet.
pub fn facet_quadrature(mesh: &Mesh, facet: &Facet, rule: &LineRule) -> Vec<(Point, f64)> {
    let a = mesh.vertices()[facet.vertices[0]];
    let b = mesh.vertices()[facet.vertices[1]];
    rule.points
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| ([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])], w * facet.length))
        .collect()
}

/// The four blocks together with the parameters that produced them.
#[derive(Clone, Debug)]
pub struct BlockSystem {
    pub a: SparseMatrix,
    pub b: SparseMatrix,
    pub c: SparseMatrix,
    pub m: SparseMatrix,
    pub k: usize,
    pub variant: IpVariant,
    pub a_s: f64,
    pub material_ids: Vec<u32>,
    /// Default eigensolver shift, just below the expected spectrum.
    pub shift_hint: f64,
}

impl BlockSystem {
    pub fn assemble(
        mesh: &Mesh,
        space: &DgSpace,
        materials: &MaterialTable,
        a_s: f64,
        variant: IpVariant,
    ) -> Result<Self> {
        Ok(Self {
            a: assemble_a(space, mesh, materials, a_s, variant)?,
            b: assemble_b(space, mesh)?,
            c: assemble_c(space, mesh, materials)?,
            m: assemble_mass(space, mesh, materials)?,
            k: space.degree(),
            variant,
            a_s,
            material_ids: mesh.materials().to_vec(),
            shift_hint: crate::eigensolver::default_shift(mesh, materials),
        })
    }

    /// Block system from given matrices, mostly for tests.
    pub fn from_blocks(a: SparseMatrix, b: SparseMatrix, c: SparseMatrix, m: SparseMatrix) -> Result<Self> {
        let (n_u, n_p) = (a.nrows(), c.nrows());
        let ok = a.ncols() == n_u
            && m.nrows() == n_u
            && m.ncols() == n_u
            && b.nrows() == n_p
            && b.ncols() == n_u
            && c.ncols() == n_p;
        if !ok {
            return Err(Error::InvalidArgument("block dimensions are inconsistent".into()));
        }
        Ok(Self {
            a,
            b,
            c,
            m,
            k: 0,
            variant: IpVariant::Symmetric,
            a_s: 0.0,
            material_ids: Vec::new(),
            shift_hint: 0.0,
        })
    }

    pub fn n_u(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_p(&self) -> usize {
        self.c.nrows()
    }

    pub fn dim(&self) -> usize {
        self.n_u() + self.n_p()
    }

    /// `K - shift * M_hat` with `K = [[A, B^T], [B, -C]]`, `M_hat = diag(M, 0)`.
    pub fn shifted_operator(&self, shift: f64) -> SparseMatrix {
        let n_u = self.n_u();
        let mut t = TripletList::new(self.dim(), self.dim());
        for (r, c, v) in self.a.iter() {
            t.push(r, c, v);
        }
        if shift != 0.0 {
            for (r, c, v) in self.m.iter() {
                t.push(r, c, -shift * v);
            }
        }
        for (r, c, v) in self.b.iter() {
            t.push(n_u + r, c, v);
            t.push(c, n_u + r, v);
        }
        for (r, c, v) in self.c.iter() {
            t.push(n_u + r, n_u + c, -v);
        }
        t.build()
    }

    /// Same pencil in the pressure unknown `q = p / s`.
    pub fn with_pressure_scale(&self, s: f64) -> Self {
        Self {
            b: self.b.scaled(s),
            c: self.c.scaled(s * s),
            ..self.clone()
        }
    }

    pub fn stiffness(&self) -> SparseMatrix {
        self.shifted_operator(0.0)
    }

    pub fn mass_hat(&self) -> SparseMatrix {
        let mut t = TripletList::new(self.dim(), self.dim());
        for (r, c, v) in self.m.iter() {
            t.push(r, c, v);
        }
        t.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_round_trip() {
        for e in [-1, 0, 1] {
            assert_eq!(IpVariant::from_epsilon(e).unwrap().epsilon(), e);
        }
        assert!(IpVariant::from_epsilon(2).is_err());
    }

    #[test]
    fn block_operator_layout() {
        let mut a = TripletList::new(2, 2);
        a.push(0, 0, 2.0);
        a.push(1, 1, 3.0);
        let mut b = TripletList::new(1, 2);
        b.push(0, 1, 5.0);
        let mut c = TripletList::new(1, 1);
        c.push(0, 0, 7.0);
        let mut m = TripletList::new(2, 2);
        m.push(0, 0, 1.0);
        m.push(1, 1, 1.0);
        let sys = BlockSystem::from_blocks(a.build(), b.build(), c.build(), m.build()).unwrap();
        let k = sys.shifted_operator(0.5).to_dense();
        assert_eq!(k[(0, 0)], 1.5);
        assert_eq!(k[(2, 1)], 5.0);
        assert_eq!(k[(1, 2)], 5.0);
        assert_eq!(k[(2, 2)], -7.0);
        assert_eq!(sys.mass_hat().to_dense()[(2, 2)], 0.0);
    }
}

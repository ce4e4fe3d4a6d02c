//! Broken polynomial spaces: vector `P_k` displacements, scalar `P_{k-1}` pressures.

mod basis;
mod quadrature;

pub use basis::{dim_p, eval_basis, BasisEval, LagrangeBasis, MAX_BASIS_DEGREE};
pub use quadrature::{line_rule, triangle_rule, LineRule, QuadratureRule, MAX_DEGREE};

use crate::mesh::Mesh;
use crate::{Error, Result};

/// Element-local numbering of the discrete displacement and pressure spaces.
///
/// Displacement unknowns of element `e` occupy
/// `[e * 2 n_k, (e + 1) * 2 n_k)`, x-components first. Pressure unknowns of
/// element `e` occupy `[e * n_q, (e + 1) * n_q)` in a separate index range.
#[derive(Clone, Debug, PartialEq)]
pub struct DgSpace {
    k: usize,
    n_elements: usize,
    velocity: LagrangeBasis,
    pressure: LagrangeBasis,
}

impl DgSpace {
    pub fn new(mesh: &Mesh, k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidArgument(format!(
                "displacement degree must be at least 1, got {k}"
            )));
        }
        Ok(Self {
            k,
            n_elements: mesh.n_elements(),
            velocity: LagrangeBasis::new(k)?,
            pressure: LagrangeBasis::new(k - 1)?,
        })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn velocity_basis(&self) -> &LagrangeBasis {
        &self.velocity
    }

    pub fn pressure_basis(&self) -> &LagrangeBasis {
        &self.pressure
    }

    /// Scalar basis functions per element for one displacement component.
    pub fn n_scalar(&self) -> usize {
        self.velocity.len()
    }

    pub fn u_block(&self) -> usize {
        2 * self.velocity.len()
    }

    pub fn p_block(&self) -> usize {
        self.pressure.len()
    }

    pub fn n_u(&self) -> usize {
        self.u_block() * self.n_elements
    }

    pub fn n_p(&self) -> usize {
        self.p_block() * self.n_elements
    }

    pub fn n_total(&self) -> usize {
        self.n_u() + self.n_p()
    }

    pub fn u_offset(&self, element: usize) -> usize {
        element * self.u_block()
    }

    pub fn p_offset(&self, element: usize) -> usize {
        element * self.p_block()
    }

    /// Global index of scalar function `i` in component `c` of element `e`.
    pub fn u_dof(&self, element: usize, component: usize, i: usize) -> usize {
        self.u_offset(element) + component * self.n_scalar() + i
    }

    pub fn p_dof(&self, element: usize, i: usize) -> usize {
        self.p_offset(element) + i
    }

    /// Rejects a mesh with a different element count.
    pub fn check_mesh(&self, mesh: &Mesh) -> Result<()> {
        if mesh.n_elements() != self.n_elements {
            return Err(Error::InvalidArgument(format!(
                "space built for {} elements used with a mesh of {}",
                self.n_elements,
                mesh.n_elements()
            )));
        }
        Ok(())
    }

    /// Quadrature degree used for element and facet integrals.
    pub fn quadrature_degree(&self) -> usize {
        2 * self.k + 2
    }
}

/// Build the discrete space of degree `k` on `mesh`.
pub fn build_space(mesh: &Mesh, k: usize) -> Result<DgSpace> {
    DgSpace::new(mesh, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_unit_square, SideTags};

    #[test]
    fn dimension_counts() {
        let m = generate_unit_square(1, SideTags::bottom_clamped(), None).unwrap();
        let s = build_space(&m, 1).unwrap();
        assert_eq!((s.n_u(), s.n_p()), (12, 2));

        let m = generate_unit_square(8, SideTags::bottom_clamped(), None).unwrap();
        let s = build_space(&m, 3).unwrap();
        assert_eq!((s.n_u(), s.n_p()), (2560, 768));

        for n in 1..5 {
            let m = generate_unit_square(n, SideTags::bottom_clamped(), None).unwrap();
            let s = build_space(&m, 2).unwrap();
            assert_eq!((s.n_u(), s.n_p()), (24 * n * n, 6 * n * n));
        }
    }

    #[test]
    fn blocks_are_contiguous_and_disjoint() {
        let m = generate_unit_square(2, SideTags::bottom_clamped(), None).unwrap();
        let s = build_space(&m, 2).unwrap();
        let mut seen = vec![false; s.n_u()];
        for e in 0..m.n_elements() {
            for c in 0..2 {
                for i in 0..s.n_scalar() {
                    let d = s.u_dof(e, c, i);
                    assert!(d >= s.u_offset(e) && d < s.u_offset(e) + s.u_block());
                    assert!(!seen[d]);
                    seen[d] = true;
                }
            }
        }
        assert!(seen.iter().all(|&x| x));
    }

    #[test]
    fn degree_zero_is_rejected() {
        let m = generate_unit_square(1, SideTags::bottom_clamped(), None).unwrap();
        assert!(build_space(&m, 0).is_err());
        assert!(build_space(&m, 4).is_err());
    }
}

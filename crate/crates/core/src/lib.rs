//! Interior penalty discontinuous Galerkin discretization of the
//! displacement-pressure (Herrmann) elasticity eigenvalue problem in 2D.
//!
//! The crate covers the whole pipeline: mesh generation and newest-vertex
//! bisection ([`mesh`]), material coefficients ([`materials`]), broken
//! polynomial spaces and quadrature ([`spaces`]), sparse assembly of the
//! mixed blocks ([`assembly`]), dense and shift-invert generalized
//! eigensolvers ([`eigensolver`]), residual a posteriori indicators and the
//! adaptive loop ([`estimator`], [`adapt`]), convergence studies ([`study`])
//! and file formats ([`io`]).

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod adapt;
pub mod assembly;
pub mod eigensolver;
pub mod error;
pub mod estimator;
pub mod io;
pub mod materials;
pub mod mesh;
pub mod spaces;
pub mod study;

pub use error::{Error, Result};

//! Exact arithmetic foundations: integers, polynomials, number fields,
//! matrices, lattice reduction and enumeration.

pub mod enumerate;
pub mod hnf;
pub mod int;
pub mod lll;
pub mod matrix;
pub mod modp;
pub mod numfield;
pub mod poly;

pub use enumerate::{enumerate_by_norm, theta_series, IntForm};
pub use hnf::hermite_normal_form;
pub use lll::{lll_reduce, ZLattice};
pub use matrix::{q, qf, zq, QMatrix, ZMatrix, Q, Z};
pub use numfield::{nf_maximal_order, NFElement, NumberField};
pub use poly::{char_poly, factor_int_poly, IntPoly};

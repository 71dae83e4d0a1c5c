//! Toric periods of algebraic modular forms on definite quaternion algebras:
//! exact arithmetic, quaternion orders and ideal classes, Brandt matrices and
//! eigenforms, ternary theta series, periods and their statistics.

pub mod arith;
pub mod error;
pub mod hecke;
pub mod ideals;
pub mod quat;
pub mod stats;
pub mod theta;

pub use error::{Error, Result};

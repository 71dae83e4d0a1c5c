//! Definite quaternion algebras over Q, their maximal and Eichler orders, and
//! local splittings `O_p ≅ M₂(Z_p)`.

mod algebra;
mod order;
mod splitting;

pub use algebra::{algebra_of_discriminant, hilbert_symbol, Place, QuatElement, QuaternionAlgebra};
pub use order::{
    eichler_order, maximal_order, over_orders_at, reference_order, OrderArith, OrderJson, QuaternionOrder, Vec4,
};
pub use splitting::{local_splitting, mat_mul, LocalSplitting, Mat2};

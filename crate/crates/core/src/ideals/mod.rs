//! Right ideal classes of Eichler orders: neighbors, equivalence, class
//! enumeration with the mass certificate, types and Atkin–Lehner action.

mod classes;
mod ideal;
mod isometry;
pub mod lattice;

pub(crate) use ideal::neighbors_with;

pub use classes::{
    atkin_lehner_perm, enumerate_classes, mass_formula, neighbor_primes, type_partition, ClassSet, ClassSetJson,
    IdealJson,
};
pub use ideal::{
    equivalence_element, extend_ideal, gross_lattice_form, ideal_norm_lattice, is_equivalent, left_order,
    left_order_lattice, left_order_norm, mul_two_sided, p_neighbors, reduce, two_sided_prime, unit_count, weight,
    RightIdeal,
};
pub use isometry::is_isometric;
pub use lattice::NormLattice;

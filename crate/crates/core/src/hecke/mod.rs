//! Hecke operators on functions on ideal classes, eigenforms and the
//! non-vanishing condition.

mod brandt;
mod condition;
mod eigen;
mod subspace;

pub use brandt::{brandt_matrices, brandt_matrix, brandt_matrix_by_norms, brandt_rows, BrandtMatrix};
pub use condition::{
    condition_a, condition_b, congruence_form, count_condition_b, expand_types, goldfeld_condition,
    goldfeld_condition_for, scan, type_brandt, GoldfeldCondition, ScanRow, Verdict,
};
pub use eigen::{
    decompose, eigenforms, eigenforms_with, restrict, schedule, Component, Eigenform, EigenformJson, HeckeOperators,
    Operator,
};
pub use subspace::{
    fiber_masses, is_cuspidal, is_n_invariant, old_space, subspace, type_indicators, weighted_inner, HeckeSubspace,
    SubspaceKind,
};

#[cfg(test)]
mod tests;

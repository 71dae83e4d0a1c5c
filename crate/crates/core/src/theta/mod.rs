//! Gross lattices and ternary theta series, the Waldspurger lift, toric
//! periods of imaginary quadratic fields, and their verification oracles.

mod discs;
mod periods;
mod table;

pub use discs::{
    c_factor, class_numbers, count_y, fundamental_discriminants, fundamental_sieve, is_fundamental,
    local_embedding_number, local_embedding_number_at, membership, quad_class_number, reduced_form_count,
    squarefree_sieve, suborder_class_number, unit_index, PrimeKind,
};
pub use periods::{
    embedding_census, fundamental_part, period_dataset, shimura_check, waldspurger_coefficients, PeriodRecord,
    WaldspurgerSeries,
};
pub use table::{gross_lattice, Counts, GrossLattice, ThetaTable};

#[cfg(test)]
mod tests;

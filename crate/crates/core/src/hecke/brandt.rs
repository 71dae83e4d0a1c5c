//! Brandt matrices by neighbor counting, with a norm-counting cross-check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::int::is_prime;
use crate::arith::{q, QMatrix, ZMatrix, Z};
use crate::error::{Error, Result};
use crate::ideals::lattice::{conj_rows, product, rows128, NormLattice};
use crate::ideals::{neighbors_with, ClassSet};
use crate::quat::local_splitting;

/// `T_p` on functions on classes: `(T_p φ)(i) = Σ_j B_ij φ(j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrandtMatrix {
    pub prime: u64,
    pub entries: Vec<Vec<u64>>,
}

impl BrandtMatrix {
    pub fn h(&self) -> usize {
        self.entries.len()
    }

    pub fn to_q(&self) -> QMatrix {
        QMatrix::from_fn(self.h(), self.h(), |i, j| q(self.entries[i][j] as i64))
    }

    pub fn to_z(&self) -> ZMatrix {
        ZMatrix::from_fn(self.h(), self.h(), |i, j| Z::from(self.entries[i][j]))
    }

    pub fn row_sums_ok(&self) -> bool {
        self.entries.iter().all(|r| r.iter().sum::<u64>() == self.prime + 1)
    }

    /// `B_ij / w_i = B_ji / w_j`.
    pub fn is_weighted_symmetric(&self, weights: &[u64]) -> bool {
        let h = self.h();
        (0..h).all(|i| (0..h).all(|j| self.entries[i][j] * weights[j] == self.entries[j][i] * weights[i]))
    }

    pub fn commutes_with(&self, other: &BrandtMatrix) -> bool {
        let (a, b) = (self.to_z(), other.to_z());
        &a * &b == &b * &a
    }

    /// Commutes with the permutation matrix `P_ij = [j = perm(i)]`.
    pub fn commutes_with_perm(&self, perm: &[usize]) -> bool {
        let h = self.h();
        (0..h).all(|i| (0..h).all(|j| self.entries[perm[i]][perm[j]] == self.entries[i][j]))
    }
}

fn check_prime(cs: &ClassSet, p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if cs.order.reduced_discriminant % p == 0 {
        return Err(Error::Domain(format!("{p} divides the discriminant")));
    }
    Ok(())
}

/// `B_ij` = number of the `p+1` neighbors of `I_i` in the class of `I_j`.
pub fn brandt_matrix(cs: &ClassSet, p: u64) -> Result<BrandtMatrix> {
    let all: Vec<usize> = (0..cs.h()).collect();
    Ok(BrandtMatrix { prime: p, entries: brandt_rows(cs, p, &all)? })
}

/// The rows `B_i` for the given classes `i`.
pub fn brandt_rows(cs: &ClassSet, p: u64, rows: &[usize]) -> Result<Vec<Vec<u64>>> {
    check_prime(cs, p)?;
    let sp = local_splitting(&cs.order, p, 1)?;
    let h = cs.h();
    rows.par_iter()
        .map(|&i| {
            let mut row = vec![0u64; h];
            for nb in neighbors_with(&cs.order, &cs.reps[i], &sp)? {
                row[cs.find_class(&nb, true)?] += 1;
            }
            Ok(row)
        })
        .collect()
}

/// Brandt matrices for several primes, computed in parallel.
pub fn brandt_matrices(cs: &ClassSet, primes: &[u64]) -> Result<Vec<BrandtMatrix>> {
    primes.par_iter().map(|&p| brandt_matrix(cs, p)).collect()
}

/// Independent computation: `B_ij` is the number of `β ∈ I_i Ī_j` with
/// `nrd(β) = p·N(I_i)N(I_j)`, divided by `2 w_j`.
pub fn brandt_matrix_by_norms(cs: &ClassSet, p: u64) -> Result<BrandtMatrix> {
    check_prime(cs, p)?;
    let a = cs.order.arith();
    let h = cs.h();
    let mut entries = vec![vec![0u64; h]; h];
    for i in 0..h {
        for j in 0..h {
            let s = cs.reps[i].norm as i128 * cs.reps[j].norm as i128;
            let lat = product(a, &cs.reps[i].rows(), &conj_rows(a, &cs.reps[j].rows()), s * s)?;
            let count = NormLattice::new(a, &rows128(&lat), s)?.theta(p)[p as usize];
            let den = 2 * cs.weights[j];
            if count % den != 0 {
                return Err(Error::Internal(format!("norm count {count} not divisible by {den}")));
            }
            entries[i][j] = count / den;
        }
    }
    Ok(BrandtMatrix { prime: p, entries })
}

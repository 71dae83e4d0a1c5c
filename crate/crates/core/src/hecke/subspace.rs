//! Hecke-stable subspaces of functions on classes, stored as reduced
//! echelon row bases.

use serde::{Deserialize, Serialize};

use crate::arith::int::prime_divisors;
use crate::arith::{q, qf, QMatrix, Q};
use crate::error::Result;
use crate::ideals::{enumerate_classes, extend_ideal, ClassSet};
use crate::quat::over_orders_at;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubspaceKind {
    Full,
    Cuspidal,
    NInvariantCuspidal,
    NewNInvariantCuspidal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeSubspace {
    pub kind: SubspaceKind,
    pub basis: QMatrix,
}

impl HeckeSubspace {
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// Leading column of each echelon row.
    pub fn pivots(&self) -> Vec<usize> {
        pivots(&self.basis)
    }
}

pub(crate) fn pivots(rref: &QMatrix) -> Vec<usize> {
    (0..rref.rows()).map(|r| rref.row(r).iter().position(|x| !num_traits::Zero::is_zero(x)).unwrap()).collect()
}

/// `⟨f, g⟩ = Σ f_i g_i / w_i`.
pub fn weighted_inner(cs: &ClassSet, f: &[Q], g: &[Q]) -> Q {
    f.iter().zip(g).zip(&cs.weights).fold(q(0), |s, ((a, b), &w)| s + a * b / q(w as i64))
}

/// Orthogonality to constants.
pub fn is_cuspidal(cs: &ClassSet, f: &[Q]) -> bool {
    num_traits::Zero::is_zero(&weighted_inner(cs, f, &vec![q(1); f.len()]))
}

/// Constancy on Atkin–Lehner orbits.
pub fn is_n_invariant(cs: &ClassSet, f: &[Q]) -> bool {
    let reps = cs.type_reps();
    (0..f.len()).all(|i| f[i] == f[reps[cs.type_map[i]]])
}

fn cuspidal_in(cs: &ClassSet, basis: &QMatrix) -> QMatrix {
    let col = QMatrix::from_fn(basis.rows(), 1, |r, _| weighted_inner(cs, basis.row(r), &vec![q(1); cs.h()]));
    let x = col.left_kernel();
    if x.rows() == 0 {
        return QMatrix::zeros(0, cs.h());
    }
    (&x * basis).row_space()
}

/// Rows spanning the pullbacks of all functions on the classes of the
/// Eichler over-orders `O' ⊋ O` of level `M/ℓ`, via `[I] ↦ [I O']`.
pub fn old_space(cs: &ClassSet) -> Result<QMatrix> {
    let h = cs.h();
    let mut rows = QMatrix::zeros(0, h);
    for l in prime_divisors(cs.order.level) {
        for big in over_orders_at(&cs.order, l)? {
            let cs2 = enumerate_classes(&big)?;
            let mut map = Vec::with_capacity(h);
            for r in &cs.reps {
                map.push(cs2.find_class(&extend_ideal(&cs.order, &big, r)?, false)?);
            }
            for c in 0..cs2.h() {
                rows.push_row((0..h).map(|i| if map[i] == c { q(1) } else { q(0) }).collect());
            }
        }
    }
    Ok(if rows.rows() == 0 { rows } else { rows.row_space() })
}

pub fn subspace(cs: &ClassSet, kind: SubspaceKind) -> Result<HeckeSubspace> {
    let h = cs.h();
    let basis = match kind {
        SubspaceKind::Full => QMatrix::identity(h),
        SubspaceKind::Cuspidal => cuspidal_in(cs, &QMatrix::identity(h)),
        SubspaceKind::NInvariantCuspidal => cuspidal_in(cs, &type_indicators(cs)),
        SubspaceKind::NewNInvariantCuspidal => {
            let v = subspace(cs, SubspaceKind::NInvariantCuspidal)?.basis;
            let old = old_space(cs)?;
            if old.rows() == 0 || v.rows() == 0 {
                v
            } else {
                // x·V orthogonal to every old row
                let pair = QMatrix::from_fn(v.rows(), old.rows(), |a, b| weighted_inner(cs, v.row(a), old.row(b)));
                let x = pair.left_kernel();
                if x.rows() == 0 {
                    QMatrix::zeros(0, h)
                } else {
                    (&x * &v).row_space()
                }
            }
        }
    };
    Ok(HeckeSubspace { kind, basis })
}

/// Indicator rows of the type fibers, in type order.
pub fn type_indicators(cs: &ClassSet) -> QMatrix {
    QMatrix::from_fn(cs.type_count(), cs.h(), |t, i| if cs.type_map[i] == t { q(1) } else { q(0) })
}

/// Sum of `1/w_i` over each type fiber.
pub fn fiber_masses(cs: &ClassSet) -> Vec<Q> {
    let mut out = vec![q(0); cs.type_count()];
    for (i, &t) in cs.type_map.iter().enumerate() {
        out[t] += qf(1, cs.weights[i] as i64);
    }
    out
}

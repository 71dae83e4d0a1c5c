//! Gross lattices of the classes and their theta series.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::enumerate::theta_series_partitioned;
use crate::error::{Error, Result};
use crate::ideals::{ClassSet, NormLattice};
use crate::quat::Vec4;

/// `L_I = {v ∈ Z + 2O_L(I) : trd v = 0}` with `Nm(v) = vᵀ G v / 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrossLattice {
    pub class_index: usize,
    pub gram: [[i64; 3]; 3],
    /// `N(I)·v` for the basis vectors `v`, in coordinates of `O`.
    pub basis: Vec<Vec4>,
    pub scale: u64,
}

impl GrossLattice {
    pub fn norm(&self, v: &[i64; 3]) -> i64 {
        let mut s = 0;
        for i in 0..3 {
            for j in 0..3 {
                s += v[i] * self.gram[i][j] * v[j];
            }
        }
        s / 2
    }

    pub fn det(&self) -> i64 {
        let g = &self.gram;
        g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
    }

    /// `N(I)·v` in coordinates of `O`.
    pub fn element(&self, v: &[i64]) -> Vec4 {
        let mut out = [0i128; 4];
        for (c, b) in v.iter().zip(&self.basis) {
            for k in 0..4 {
                out[k] += *c as i128 * b[k];
            }
        }
        out
    }
}

pub fn gross_lattice(cs: &ClassSet, i: usize) -> GrossLattice {
    from_norm_lattice(cs.gross_lattice(i), i, cs.reps[i].norm)
}

fn from_norm_lattice(nl: &NormLattice, i: usize, scale: u64) -> GrossLattice {
    let f = &nl.form;
    let gram = std::array::from_fn(|r| std::array::from_fn(|c| 2 * f.at(r, c) / f.den));
    GrossLattice { class_index: i, gram, basis: nl.basis.clone(), scale }
}

/// Representation numbers of one class; 32-bit until a count overflows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Counts {
    Narrow(Vec<u32>),
    Wide(Vec<u64>),
}

impl Counts {
    fn from_wide(v: Vec<u64>) -> Self {
        if v.iter().all(|&x| x <= u32::MAX as u64) {
            Counts::Narrow(v.into_iter().map(|x| x as u32).collect())
        } else {
            Counts::Wide(v)
        }
    }

    pub fn get(&self, n: usize) -> u64 {
        match self {
            Counts::Narrow(v) => v[n] as u64,
            Counts::Wide(v) => v[n],
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Counts::Narrow(v) => v.len(),
            Counts::Wide(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `r_i(n)` for every class `i` and `0 <= n <= bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaTable {
    pub bound: u64,
    pub counts: Vec<Counts>,
}

impl ThetaTable {
    pub fn compute(cs: &ClassSet, bound: u64) -> Self {
        let parts = rayon::current_num_threads().max(1) * 4;
        let counts = (0..cs.h())
            .into_par_iter()
            .map(|i| Counts::from_wide(theta_series_partitioned(&cs.gross_lattice(i).form, bound, parts)))
            .collect();
        ThetaTable { bound, counts }
    }

    pub fn h(&self) -> usize {
        self.counts.len()
    }

    pub fn r(&self, i: usize, n: u64) -> u64 {
        self.counts[i].get(n as usize)
    }

    pub fn require(&self, n: u64) -> Result<()> {
        if n > self.bound {
            return Err(Error::Bound(format!(
                "theta table computed to {} but {n} is needed; recompute with a larger bound",
                self.bound
            )));
        }
        Ok(())
    }

    /// Little-endian binary encoding: bound, class count, then per class a
    /// width byte (4 or 8) and `bound + 1` counts.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.bound.to_le_bytes());
        out.extend_from_slice(&(self.h() as u64).to_le_bytes());
        for c in &self.counts {
            match c {
                Counts::Narrow(v) => {
                    out.push(4);
                    v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes()));
                }
                Counts::Wide(v) => {
                    out.push(8);
                    v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes()));
                }
            }
        }
        out
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        let bad = || Error::Parse("truncated theta table".into());
        let word = |at: usize| -> Result<u64> {
            Ok(u64::from_le_bytes(b.get(at..at + 8).ok_or_else(bad)?.try_into().unwrap()))
        };
        let bound = word(0)?;
        let h = word(8)? as usize;
        let n = bound as usize + 1;
        let mut at = 16;
        let mut counts = Vec::with_capacity(h);
        for _ in 0..h {
            let width = *b.get(at).ok_or_else(bad)? as usize;
            at += 1;
            let chunk = b.get(at..at + width * n).ok_or_else(bad)?;
            counts.push(match width {
                4 => Counts::Narrow(chunk.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect()),
                8 => Counts::Wide(chunk.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect()),
                _ => return Err(Error::Parse(format!("bad counter width {width}"))),
            });
            at += width * n;
        }
        if at != b.len() {
            return Err(Error::Parse("trailing bytes in theta table".into()));
        }
        Ok(ThetaTable { bound, counts })
    }
}

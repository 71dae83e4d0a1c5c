//! Full-rank sublattices of an order, in order coordinates, and their
//! reduced-norm forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::arith::enumerate::{for_each_vector, lll_gram, theta_series};
use crate::arith::hnf::{hnf_basis, hnf_mod};
use crate::arith::{IntForm, ZMatrix};
use crate::error::{Error, Result};
use crate::quat::{OrderArith, Vec4};

pub type Basis4 = [[i64; 4]; 4];

/// Hermite basis of the lattice generated by `gens`; `d` is a multiple of
/// its index in the order.
pub fn hnf_rows(gens: &[Vec4], d: i128) -> Result<Basis4> {
    let g: Vec<Vec<i128>> = gens.iter().map(|v| v.to_vec()).collect();
    let rows: Vec<Vec<i128>> = match hnf_mod(&g, 4, d) {
        Some(b) => b,
        None => {
            let zm = ZMatrix::from_rows(g.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect());
            let h = hnf_basis(&zm);
            if h.rows() != 4 {
                return Err(Error::Internal("lattice is not of full rank".into()));
            }
            (0..4).map(|i| h.row(i).iter().map(|x| x.to_i128().unwrap()).collect()).collect()
        }
    };
    let mut out = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = rows[i][j].to_i64().ok_or_else(|| Error::Internal("lattice entry overflow".into()))?;
        }
    }
    Ok(out)
}

pub fn rows128(b: &Basis4) -> Vec<Vec4> {
    b.iter().map(|r| r.map(|x| x as i128)).collect()
}

pub fn index(b: &Basis4) -> i128 {
    (0..4).map(|i| b[i][i] as i128).product()
}

/// Lattice generated by all products `x y`, `x ∈ A`, `y ∈ B`.
pub fn product(arith: &OrderArith, a: &[Vec4], b: &[Vec4], d: i128) -> Result<Basis4> {
    let mut gens = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            gens.push(arith.mul(x, y));
        }
    }
    hnf_rows(&gens, d)
}

pub fn conj_rows(arith: &OrderArith, a: &[Vec4]) -> Vec<Vec4> {
    a.iter().map(|x| arith.conj(x)).collect()
}

/// `nrd / scale` on a lattice, LLL-reduced, with the reduced basis in order
/// coordinates.
#[derive(Clone, Debug)]
pub struct NormLattice {
    pub form: IntForm,
    pub basis: Vec<Vec4>,
}

impl NormLattice {
    pub fn new(arith: &OrderArith, rows: &[Vec4], scale: i128) -> Result<Self> {
        gram_lattice(rows, scale, |x, y| {
            let mut s = 0i128;
            for a in 0..4 {
                if x[a] == 0 {
                    continue;
                }
                for b in 0..4 {
                    s += arith.gram[a][b] as i128 * x[a] * y[b];
                }
            }
            s
        })
    }

    pub fn dim(&self) -> usize {
        self.form.n
    }

    /// Visits every vector (in order coordinates) with value `<= bound`.
    pub fn for_each<F: FnMut(&Vec4, u64)>(&self, bound: u64, mut visit: F) {
        let n = self.dim();
        for_each_vector(&self.form, bound, |x, m| {
            let mut v = [0i128; 4];
            for i in 0..n {
                if x[i] != 0 {
                    for c in 0..4 {
                        v[c] += x[i] as i128 * self.basis[i][c];
                    }
                }
            }
            visit(&v, m);
        });
    }

    pub fn theta(&self, bound: u64) -> Vec<u64> {
        theta_series(&self.form, bound)
    }

    /// Nonzero vectors of minimal value, in enumeration order.
    pub fn minimal_vectors(&self) -> (u64, Vec<Vec4>) {
        let bound = (0..self.dim()).map(|i| self.form.at(i, i) as u64 / self.form.den as u64).min().unwrap_or(0);
        let mut best = u64::MAX;
        let mut out = Vec::new();
        self.for_each(bound, |v, m| {
            if m == 0 {
                return;
            }
            if m < best {
                best = m;
                out.clear();
            }
            if m == best {
                out.push(*v);
            }
        });
        (best, out)
    }
}

/// Reduced integral form `B(x, x) / (2·scale)` on the lattice spanned by
/// `rows`, where `B` is the given bilinear form.
pub fn gram_lattice<F: Fn(&Vec4, &Vec4) -> i128>(rows: &[Vec4], scale: i128, bil: F) -> Result<NormLattice> {
    let n = rows.len();
    let mut g: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| bil(&rows[i], &rows[j])).collect()).collect();
    let u = lll_gram(&mut g);
    let basis: Vec<Vec4> = (0..n)
        .map(|i| {
            let mut v = [0i128; 4];
            for k in 0..n {
                for c in 0..4 {
                    v[c] += u[i][k] as i128 * rows[k][c];
                }
            }
            v
        })
        .collect();
    let mut gg = 2 * scale;
    for r in &g {
        for &x in r {
            gg = gg.gcd(&x);
        }
    }
    let mut a = Vec::with_capacity(n * n);
    for r in &g {
        for &x in r {
            a.push((x / gg).to_i64().ok_or_else(|| Error::Internal("norm form overflow".into()))?);
        }
    }
    let den = (2 * scale / gg).to_i64().unwrap();
    let form = IntForm::new(n, a, den)?;
    Ok(NormLattice { form, basis })
}

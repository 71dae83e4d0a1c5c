//! Waldspurger lift coefficients, toric periods, and the embedding census.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::discs::{c_factor, class_numbers, fundamental_discriminants, membership, unit_index};
use super::table::{gross_lattice, ThetaTable};
use crate::arith::int::kronecker;
use crate::arith::{q, NFElement, NumberField, QMatrix, Q};
use crate::error::{Error, Result};
use crate::hecke::Eigenform;
use crate::ideals::{left_order_lattice, ClassSet};

/// `a_φ(n) = Σ_i φ(i) r_i(n) / w_i`, stored as integer coordinate vectors
/// over a common denominator.
#[derive(Clone, Debug)]
pub struct WaldspurgerSeries {
    pub field: NumberField,
    pub bound: u64,
    pub den: i128,
    num: Vec<i128>,
}

impl WaldspurgerSeries {
    pub fn compute(phi: &Eigenform, cs: &ClassSet, table: &ThetaTable, bound: u64) -> Result<Self> {
        table.require(bound)?;
        let d = phi.degree();
        let l = cs.weights.iter().fold(1i128, |a, &w| a.lcm(&(w as i128)));
        let mut coeffs = Vec::with_capacity(cs.h());
        for (i, v) in phi.values.iter().enumerate() {
            let c = v.integer_coords().ok_or_else(|| Error::Domain("eigenform values are not integral".into()))?;
            let k = l / cs.weights[i] as i128;
            coeffs.push(
                c.iter()
                    .map(|x| x.to_i128().map(|x| x * k))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::Bound("eigenform coordinates exceed 128 bits".into()))?,
            );
        }
        let n = bound as usize + 1;
        let mut num = vec![0i128; n * d];
        num.par_chunks_mut(d).enumerate().for_each(|(m, out)| {
            for (i, c) in coeffs.iter().enumerate() {
                let r = table.r(i, m as u64) as i128;
                if r != 0 {
                    for (o, x) in out.iter_mut().zip(c) {
                        *o += r * x;
                    }
                }
            }
        });
        Ok(WaldspurgerSeries { field: phi.field.clone(), bound, den: l, num })
    }

    fn coords(&self, n: u64) -> &[i128] {
        let d = self.field.degree;
        &self.num[n as usize * d..(n as usize + 1) * d]
    }

    pub fn get(&self, n: u64) -> Result<NFElement> {
        if n > self.bound {
            return Err(Error::Bound(format!("coefficient {n} beyond computed bound {}", self.bound)));
        }
        let den = Q::from_integer(self.den.into());
        Ok(NFElement { coordinates: self.coords(n).iter().map(|&x| Q::from_integer(x.into()) / &den).collect() })
    }

    pub fn is_zero(&self, n: u64) -> bool {
        self.coords(n).iter().all(|&x| x == 0)
    }

    /// `a(n) / c` with integer coordinates, if the division is exact.
    pub fn divided(&self, n: u64, c: u64) -> Option<Vec<i64>> {
        let dc = self.den * c as i128;
        self.coords(n).iter().map(|&x| if x % dc == 0 { (x / dc).to_i64() } else { None }).collect()
    }
}

/// `a_φ(1..=bound)` as field elements.
pub fn waldspurger_coefficients(
    phi: &Eigenform,
    cs: &ClassSet,
    table: &ThetaTable,
    bound: u64,
) -> Result<Vec<NFElement>> {
    let s = WaldspurgerSeries::compute(phi, cs, table, bound)?;
    (1..=bound).map(|n| s.get(n)).collect()
}

/// One imaginary quadratic field `Q(√Δ)` and the period of `φ` along it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodRecord {
    pub delta: i64,
    pub in_xd: bool,
    pub in_y: bool,
    pub c: u64,
    pub h_e: u64,
    pub u_e: u64,
    /// Coordinates of `a_φ(|Δ|)`.
    pub a: Vec<Q>,
    /// Coordinates of `a_φ(|Δ|) / c(E)` when the level condition holds.
    pub period: Option<Vec<i64>>,
}

/// Periods for all fundamental `−x < Δ < 0`.
pub fn period_dataset(series: &WaldspurgerSeries, cs: &ClassSet, x: u64) -> Result<Vec<PeriodRecord>> {
    if x == 0 {
        return Ok(Vec::new());
    }
    if x - 1 > series.bound {
        return Err(Error::Bound(format!(
            "periods up to {x} need coefficients to {}, computed to {}; recompute the theta table",
            x - 1,
            series.bound
        )));
    }
    let disc_d = cs.order.disc_d();
    let level = cs.order.level;
    let disc_o = cs.order.reduced_discriminant;
    let h = class_numbers(x);
    fundamental_discriminants(x)
        .into_par_iter()
        .map(|delta| {
            let n = delta.unsigned_abs();
            let (in_xd, in_y) = membership(delta, disc_d, level);
            let level_ok = membership(delta, 1, level).1;
            let c = c_factor(delta, disc_o);
            let a = series.get(n)?;
            let period = if in_xd && level_ok {
                Some(
                    series
                        .divided(n, c)
                        .ok_or_else(|| Error::Internal(format!("a({n}) is not divisible by c(E) = {c}")))?,
                )
            } else {
                None
            };
            Ok(PeriodRecord {
                delta,
                in_xd,
                in_y,
                c,
                h_e: h[n as usize] as u64,
                u_e: unit_index(delta),
                a: a.coordinates,
                period,
            })
        })
        .collect()
}

/// `a(p^{2k}|Δ|) = c_k a(|Δ|)` with `c_0 = 1`, `c_1 = λ_p − (Δ/p)`,
/// `c_k = λ_p c_{k−1} − p c_{k−2}`.
pub fn shimura_check(series: &WaldspurgerSeries, lambda_p: &NFElement, delta: i64, p: u64, k: u32) -> Result<bool> {
    let n = delta.unsigned_abs();
    let top = n
        .checked_mul(p.checked_pow(2 * k).ok_or_else(|| Error::Bound("p^2k overflows".into()))?)
        .ok_or_else(|| Error::Bound("p^2k |Δ| overflows".into()))?;
    if top > series.bound {
        return Err(Error::Bound(format!("Shimura check needs coefficient {top}, bound is {}", series.bound)));
    }
    let kf = &series.field;
    let chi = kf.from_int(kronecker(delta, p) as i64);
    let mut prev = kf.one();
    let mut cur = lambda_p.sub(&chi);
    let ck = match k {
        0 => prev,
        1 => cur,
        _ => {
            for _ in 2..=k {
                let next = kf.mul(lambda_p, &cur).sub(&prev.scale(&q(p as i64)));
                prev = cur;
                cur = next;
            }
            cur
        }
    };
    Ok(series.get(top)? == kf.mul(&ck, &series.get(n)?))
}

/// Vectors of norm `n` in the Gross lattice of class `i`, keyed by the
/// conductor of the quadratic order `Q(v) ∩ O_L(I_i)` they generate.
pub fn embedding_census(cs: &ClassSet, i: usize, n: u64) -> Result<BTreeMap<u64, u64>> {
    let mut out = BTreeMap::new();
    if n == 0 || n % 4 == 1 || n % 4 == 2 {
        return Ok(out);
    }
    let g = gross_lattice(cs, i);
    let big_n = g.scale as i128;
    // N·O_L(I) = I Ī, basis rows in coordinates of O
    let lo = left_order_lattice(&cs.order, &cs.reps[i])?;
    let lo_inv = QMatrix::from_fn(4, 4, |r, c| q(lo[r][c])).inverse().unwrap();
    let one = cs.order.arith().one();
    let big_f = fundamental_part(n).1;
    let divisors: Vec<u64> = (1..=big_f).rev().filter(|d| big_f % d == 0).collect();
    let nl = cs.gross_lattice(i);
    let mut err = None;
    nl.for_each(n, |w, m| {
        if m != n || err.is_some() {
            return;
        }
        // largest g | F with (ε + v/g)/2 ∈ O_L, ε ≡ n/g² mod 2
        for &gd in &divisors {
            let gi = gd as i128;
            if w.iter().any(|x| x % gi != 0) {
                continue;
            }
            let eps = ((n / (gd * gd)) % 2) as i128;
            let x: Vec<i128> = (0..4).map(|k| eps * big_n * one[k] + w[k] / gi).collect();
            if x.iter().any(|v| v % 2 != 0) {
                continue;
            }
            let xq: Vec<Q> = x.iter().map(|&v| Q::from_integer((v / 2).into())).collect();
            if lo_inv.vec_mul(&xq).iter().all(|c| c.is_integer()) {
                *out.entry(big_f / gd).or_insert(0) += 1;
                return;
            }
        }
        err = Some(Error::Internal("lattice vector generates no order".into()));
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// `−n = Δ F²` with `Δ` fundamental, for `n ≡ 0, 3 mod 4`; returns `(Δ, F)`.
pub fn fundamental_part(n: u64) -> (i64, u64) {
    let mut f = 1u64;
    let mut m = n;
    for (p, e) in crate::arith::int::factor(n) {
        let k = e / 2;
        f *= p.pow(k);
        m /= p.pow(2 * k);
    }
    // −m squarefree part; fix the 2-adic condition
    let d = -(m as i64);
    if d.rem_euclid(4) == 1 {
        (d, f)
    } else {
        // −n ≡ 0 mod 4 forces f even
        (4 * d, f / 2)
    }
}

//! The congruence cusp form, the non-vanishing condition, and the prime
//! scanner.

use std::fmt;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::brandt::brandt_rows;
use super::eigen::{decompose, HeckeOperators};
use super::subspace::{subspace, SubspaceKind};
use crate::arith::int::{ext_gcd, is_prime, primes_up_to};
use crate::arith::poly::char_poly_z;
use crate::arith::{factor_int_poly, qf, IntPoly, ZMatrix, Q, Z};
use crate::error::{Error, Result};
use crate::ideals::{enumerate_classes, mass_formula, neighbor_primes, ClassSet};
use crate::quat::{algebra_of_discriminant, maximal_order, QuaternionOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "true")]
    True,
    #[serde(rename = "false")]
    False,
    #[serde(rename = "UNCERTAIN")]
    Uncertain,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Uncertain => "UNCERTAIN",
        })
    }
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldfeldCondition {
    /// The N-invariant cusp forms form a single Galois orbit.
    pub a: Verdict,
    /// 3 divides the numerator of the mass.
    pub b: bool,
    pub mass: Q,
    pub dim_sn: usize,
    /// Dimension of the new part; equal to `dim_sn` at level 1.
    pub dim_sn_new: usize,
}

pub fn condition_b(mass: &Q) -> bool {
    (mass.numer() % 3u32).is_zero()
}

/// Values `1 + p z_j` on types with `Σ_j k_j (1 + p z_j) / w_j = 0`: a cusp
/// form, constant on Atkin–Lehner orbits, congruent to 1 mod `p`.
pub fn congruence_form(cs: &ClassSet, p: u64) -> Result<Vec<i64>> {
    if p == 2 || !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not an odd prime")));
    }
    if !(cs.mass.numer() % p).is_zero() {
        return Err(Error::Domain(format!("{p} does not divide the mass numerator")));
    }
    let fibers = cs.type_fibers();
    let reps = cs.type_reps();
    let w: Vec<i128> = reps.iter().map(|&i| cs.weights[i] as i128).collect();
    let l = w.iter().fold(1i128, |a, &b| a.lcm(&b));
    let c: Vec<i128> = fibers.iter().zip(&w).map(|(&k, &wj)| k as i128 * l / wj).collect();
    let total: i128 = c.iter().sum();
    let pi = p as i128;
    if total % pi != 0 {
        return Err(Error::Internal("weighted fiber count is not divisible by p".into()));
    }
    let rhs = -total / pi;
    // Σ c_j z_j = rhs by successive extended gcds
    let mut g = 0i128;
    let mut coef: Vec<i128> = vec![0; c.len()];
    for (j, &cj) in c.iter().enumerate() {
        let (ng, x, y) = ext_gcd(g, cj);
        for cc in coef.iter_mut().take(j) {
            *cc *= x;
        }
        coef[j] = y;
        g = ng;
    }
    if rhs % g != 0 {
        return Err(Error::Internal("congruence equation has no solution".into()));
    }
    let m = rhs / g;
    let z: Vec<i128> = coef.iter().map(|&x| x * m).collect();
    let z = reduce_solution(&c, z);
    let vals: Vec<i64> = z.iter().map(|&zj| (1 + pi * zj) as i64).collect();
    let check = vals.iter().zip(&c).fold(0i128, |s, (&v, &cj)| s + v as i128 * cj);
    if check != 0 {
        return Err(Error::Internal("congruence form is not cuspidal".into()));
    }
    Ok(vals)
}

/// Shrinks a solution of `Σ c_j z_j = r` by moving along the kernel
/// directions `c_k e_0 − c_0 e_k`.
fn reduce_solution(c: &[i128], mut z: Vec<i128>) -> Vec<i128> {
    if c.is_empty() || c[0] == 0 {
        return z;
    }
    for k in 1..c.len() {
        // z + t (c_k e_0 − c_0 e_k) with t chosen to make z_k small
        let t = (z[k] as f64 / c[0] as f64).round() as i128;
        z[0] += t * c[k];
        z[k] -= t * c[0];
    }
    z
}

/// Values of a type-indexed function on classes.
pub fn expand_types(cs: &ClassSet, values: &[i64]) -> Vec<i64> {
    cs.type_map.iter().map(|&t| values[t]).collect()
}

/// `T_q` on functions constant on type fibers, in the type basis.
pub fn type_brandt(cs: &ClassSet, q: u64) -> Result<ZMatrix> {
    let reps = cs.type_reps();
    let rows = brandt_rows(cs, q, &reps)?;
    let t = cs.type_count();
    let mut m = ZMatrix::zeros(t, t);
    for (s, row) in rows.iter().enumerate() {
        for (j, &b) in row.iter().enumerate() {
            m[(s, cs.type_map[j])] += Z::from(b);
        }
    }
    Ok(m)
}

/// Condition (a) on the N-invariant cusp forms: the characteristic
/// polynomial of `T_q` in the type basis, with the Eisenstein factor
/// `x − (q+1)` removed, decides unless it is a proper power, in which case
/// the refinement schedule runs on the class space.
pub fn condition_a(cs: &ClassSet) -> Result<Verdict> {
    let t = cs.type_count();
    if t <= 1 {
        return Ok(Verdict::False);
    }
    let qp = neighbor_primes(&cs.order)[0];
    let chi = char_poly_z(&type_brandt(cs, qp)?);
    let eis = IntPoly::from_i64(&[-(qp as i64 + 1), 1]);
    let chi_s = chi.div_exact(&eis).ok_or_else(|| Error::Internal("constants are not a T_q eigenvector".into()))?;
    let fac = factor_int_poly(&chi_s);
    if fac.len() > 1 {
        return Ok(Verdict::False);
    }
    if fac[0].1 == 1 {
        return Ok(Verdict::True);
    }
    let sub = subspace(cs, SubspaceKind::NInvariantCuspidal)?;
    let mut ops = HeckeOperators::new(cs);
    let comps = decompose(&mut ops, &sub)?;
    Ok(match comps.as_slice() {
        [c] if !c.uncertain => Verdict::True,
        [_] => Verdict::Uncertain,
        _ => Verdict::False,
    })
}

pub fn goldfeld_condition(o: &QuaternionOrder) -> Result<GoldfeldCondition> {
    let cs = enumerate_classes(o)?;
    goldfeld_condition_for(&cs)
}

pub fn goldfeld_condition_for(cs: &ClassSet) -> Result<GoldfeldCondition> {
    let dim_sn = cs.type_count() - 1;
    let dim_sn_new =
        if cs.order.level == 1 { dim_sn } else { subspace(cs, SubspaceKind::NewNInvariantCuspidal)?.dim() };
    Ok(GoldfeldCondition { a: condition_a(cs)?, b: condition_b(&cs.mass), mass: cs.mass.clone(), dim_sn, dim_sn_new })
}

/// One scanner line for a prime discriminant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub prime: u64,
    pub mass_num: i64,
    pub mass_den: i64,
    pub cond_b: bool,
    pub cond_a: Option<Verdict>,
    pub dim_sn: Option<usize>,
}

impl ScanRow {
    pub const HEADER: &'static str = "prime,mass_num,mass_den,cond_b,cond_a,dim_SN";

    pub fn both(&self) -> bool {
        self.cond_b && self.cond_a == Some(Verdict::True)
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.prime,
            self.mass_num,
            self.mass_den,
            self.cond_b,
            self.cond_a.map_or("NA".to_string(), |v| v.to_string()),
            self.dim_sn.map_or("NA".to_string(), |d| d.to_string())
        )
    }
}

/// Scans the maximal orders of the algebras ramified at `{p, ∞}` for primes
/// `p ≤ max_p`. Condition (a) is evaluated where (b) holds, or everywhere
/// with `all`.
pub fn scan(max_p: u64, all: bool) -> Result<Vec<ScanRow>> {
    primes_up_to(max_p)
        .into_par_iter()
        .map(|p| {
            let mass = qf(p as i64 - 1, 12);
            let b = condition_b(&mass);
            let mut row = ScanRow {
                prime: p,
                mass_num: mass.numer().to_i64().unwrap(),
                mass_den: mass.denom().to_i64().unwrap(),
                cond_b: b,
                cond_a: None,
                dim_sn: None,
            };
            if b || all {
                let o = maximal_order(&algebra_of_discriminant(p)?)?;
                debug_assert_eq!(mass_formula(&o), mass);
                let cs = enumerate_classes(&o)?;
                row.cond_a = Some(condition_a(&cs)?);
                row.dim_sn = Some(cs.type_count() - 1);
            }
            Ok(row)
        })
        .collect()
}

/// Number of primes `p ≤ max_p` satisfying condition (b).
pub fn count_condition_b(max_p: u64) -> usize {
    primes_up_to(max_p).into_iter().filter(|&p| condition_b(&qf(p as i64 - 1, 12))).count()
}

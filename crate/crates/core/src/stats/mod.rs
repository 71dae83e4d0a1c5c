//! Statistics of period datasets: the symmetry statistic, first moments,
//! sign changes, central-limit diagnostics and Goldfeld-type bounds.

use std::collections::BTreeMap;

use libm::erfc;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::int::prime_divisors;
use crate::arith::{q, qf, NFElement, NumberField, Q};
use crate::error::{Error, Result};
use crate::quat::QuaternionOrder;
use crate::theta::PeriodRecord;

/// Periods over `Y`, sorted by `|Δ|`, with the real embedding used for signs.
#[derive(Clone, Debug)]
pub struct PeriodDataset {
    pub records: Vec<(i64, Vec<i64>)>,
    pub field: NumberField,
    pub root: f64,
}

impl PeriodDataset {
    /// Keeps the records in `Y`; the embedding sends the generator to its
    /// largest real root.
    pub fn from_records(records: &[PeriodRecord], field: NumberField) -> Result<Self> {
        let mut recs: Vec<(i64, Vec<i64>)> = Vec::new();
        for r in records.iter().filter(|r| r.in_y) {
            let p = r.period.clone().ok_or_else(|| Error::Domain(format!("no period recorded for {}", r.delta)))?;
            recs.push((r.delta, p));
        }
        recs.sort_by_key(|(d, _)| d.unsigned_abs());
        let root =
            field.largest_real_root().ok_or_else(|| Error::Domain("Hecke field has no real embedding".into()))?;
        Ok(PeriodDataset { records: recs, field, root })
    }

    pub fn up_to(&self, x: u64) -> &[(i64, Vec<i64>)] {
        let k = self.records.partition_point(|(d, _)| d.unsigned_abs() < x);
        &self.records[..k]
    }

    pub fn value(&self, z: &[i64]) -> f64 {
        let e = NFElement { coordinates: z.iter().map(|&c| q(c)).collect() };
        self.field.embed(&e, self.root)
    }

    pub fn sign(&self, z: &[i64]) -> i32 {
        if z.iter().all(|&c| c == 0) {
            return 0;
        }
        let v = self.value(z);
        if v > 0.0 {
            1
        } else {
            -1
        }
    }
}

fn counts(recs: &[(i64, Vec<i64>)]) -> BTreeMap<&[i64], u64> {
    let mut m = BTreeMap::new();
    for (_, z) in recs {
        *m.entry(z.as_slice()).or_insert(0) += 1;
    }
    m
}

/// `½ Σ_z |P_x[𝔓 = z] − P_x[𝔓 = −z]|`.
pub fn symmetry_statistic(ds: &PeriodDataset, x: u64) -> Result<Q> {
    let recs = ds.up_to(x);
    if recs.is_empty() {
        return Err(Error::Domain(format!("no periods with |Δ| < {x}")));
    }
    let m = counts(recs);
    let mut total = 0u64;
    for (z, &n) in &m {
        let neg: Vec<i64> = z.iter().map(|c| -c).collect();
        match m.get(neg.as_slice()) {
            Some(&nn) => total += n.abs_diff(nn),
            // z and −z each contribute n
            None => total += 2 * n,
        }
    }
    Ok(qf(total as i64, 2 * recs.len() as i64))
}

/// `E_x[𝔓]` exactly, with its real value.
pub fn first_moment(ds: &PeriodDataset, x: u64) -> Result<(Vec<Q>, f64)> {
    let recs = ds.up_to(x);
    if recs.is_empty() {
        return Err(Error::Domain(format!("no periods with |Δ| < {x}")));
    }
    let d = ds.field.degree;
    let mut s = vec![BigInt::zero(); d];
    for (_, z) in recs {
        for (a, &c) in s.iter_mut().zip(z) {
            *a += c;
        }
    }
    let n = recs.len() as i64;
    let m: Vec<Q> = s.into_iter().map(|a| Q::new(a, n.into())).collect();
    let v = ds.field.embed(&NFElement { coordinates: m.clone() }, ds.root);
    Ok((m, v))
}

/// `Σ_z z (P[z] − P[−z]) / 2` over all `z`, which equals the first moment.
pub fn first_moment_by_symmetry(ds: &PeriodDataset, x: u64) -> Result<Vec<Q>> {
    let recs = ds.up_to(x);
    if recs.is_empty() {
        return Err(Error::Domain(format!("no periods with |Δ| < {x}")));
    }
    let m = counts(recs);
    let d = ds.field.degree;
    let mut s = vec![0i128; d];
    for (z, &n) in &m {
        let neg: Vec<i64> = z.iter().map(|c| -c).collect();
        // the term of −z equals that of z when −z is absent
        let diff = match m.get(neg.as_slice()) {
            Some(&nn) => n as i128 - nn as i128,
            None => 2 * n as i128,
        };
        for (a, &c) in s.iter_mut().zip(z.iter()) {
            *a += c as i128 * diff;
        }
    }
    Ok(s.into_iter().map(|a| Q::new(a.into(), (2 * recs.len() as i64).into())).collect())
}

/// Sign changes between consecutive nonzero terms.
pub fn sign_changes(signs: impl Iterator<Item = i32>) -> u64 {
    let mut last = 0;
    let mut n = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub positive: u64,
    pub negative: u64,
    pub zero: u64,
    pub global_changes: u64,
    pub per_coordinate_changes: Vec<u64>,
    /// Positive share among nonzero periods.
    pub positive_proportion: f64,
}

pub fn sign_reports(ds: &PeriodDataset, x: u64) -> SignReport {
    let recs = ds.up_to(x);
    let signs: Vec<i32> = recs.iter().map(|(_, z)| ds.sign(z)).collect();
    let positive = signs.iter().filter(|&&s| s > 0).count() as u64;
    let negative = signs.iter().filter(|&&s| s < 0).count() as u64;
    let per = (0..ds.field.degree).map(|c| sign_changes(recs.iter().map(|(_, z)| z[c].signum() as i32))).collect();
    SignReport {
        positive,
        negative,
        zero: recs.len() as u64 - positive - negative,
        global_changes: sign_changes(signs.into_iter()),
        per_coordinate_changes: per,
        positive_proportion: if positive + negative == 0 {
            0.0
        } else {
            positive as f64 / (positive + negative) as f64
        },
    }
}

/// Standard normal distribution function.
pub fn normal_cdf(t: f64) -> f64 {
    0.5 * erfc(-t / std::f64::consts::SQRT_2)
}

/// Radii of the tail table.
pub const TAIL_RADII: [f64; 4] = [0.5, 1.0, 1.5, 2.0];
/// Fewer nonzero samples than this flag the diagnostic as unreliable.
pub const CLT_MIN_SAMPLES: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub r: f64,
    /// Share of `Y` with `𝔓 > 0` and statistic above `r`.
    pub positive: f64,
    /// Share of `Y` with `𝔓 < 0` and statistic above `r`.
    pub negative: f64,
    /// `(1 − Φ(r)) / 2`, the limit the conjecture predicts for each sign.
    pub predicted: f64,
    /// `erfc(√2 r)/4` with `erfc(r) = √(2/π) ∫_r^∞ e^{−t²/2} dt`.
    pub displayed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    /// `(statistic, sign)` per nonzero period, in `|Δ|` order.
    pub samples: Vec<(f64, i32)>,
    pub ks_distance: f64,
    pub tails: Vec<TailRow>,
    pub unreliable: bool,
}

/// `(log|𝔓| − ¼ log(|Δ|/log|Δ|)) / (log log |Δ|)^½`.
pub fn clt_statistic(value: f64, delta: i64) -> f64 {
    let n = delta.unsigned_abs() as f64;
    (value.abs().ln() - 0.25 * (n / n.ln()).ln()) / n.ln().ln().sqrt()
}

pub fn clt_report(ds: &PeriodDataset, x: u64) -> CltReport {
    let recs = ds.up_to(x);
    let samples: Vec<(f64, i32)> = recs
        .iter()
        .filter(|(_, z)| z.iter().any(|&c| c != 0))
        .map(|(d, z)| (clt_statistic(ds.value(z), *d), ds.sign(z)))
        .collect();
    let mut sorted: Vec<f64> = samples.iter().map(|s| s.0).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let ks = sorted.iter().enumerate().fold(0.0f64, |m, (i, &t)| {
        let f = normal_cdf(t);
        m.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    });
    let total = recs.len().max(1) as f64;
    let tails = TAIL_RADII
        .iter()
        .map(|&r| {
            let above = |s: i32| samples.iter().filter(|&&(t, g)| g == s && t > r).count() as f64 / total;
            TailRow {
                r,
                positive: above(1),
                negative: above(-1),
                predicted: 0.5 * (1.0 - normal_cdf(r)),
                displayed: 0.25 * erfc(r),
            }
        })
        .collect();
    CltReport { unreliable: samples.len() < CLT_MIN_SAMPLES, samples, ks_distance: ks, tails }
}

/// `½ ∏_{p | disc(O)} n_p` with `n_p = (p+2)/(2(p+1))`, and `n_2 = 1/24`.
pub fn goldfeld_bound(o: &QuaternionOrder) -> Q {
    goldfeld_bound_for(o.reduced_discriminant)
}

pub fn goldfeld_bound_for(disc: u64) -> Q {
    prime_divisors(disc)
        .into_iter()
        .fold(qf(1, 2), |acc, p| acc * if p == 2 { qf(1, 24) } else { qf(p as i64 + 2, 2 * (p as i64 + 1)) })
}

/// Decimal rendering of a rational to `sig` significant figures, rounding
/// half to even.
pub fn round_sig(x: &Q, sig: u32) -> String {
    if x.is_zero() {
        return format!("0.{}", "0".repeat(sig.saturating_sub(1) as usize));
    }
    let neg = x.is_negative();
    let a = x.abs();
    // exponent e with 10^e <= a < 10^(e+1)
    let mut e = (a.numer().to_f64().unwrap_or(0.0).log10() - a.denom().to_f64().unwrap_or(1.0).log10()).floor() as i64;
    let ten = |k: i64| -> Q {
        if k >= 0 {
            Q::from_integer(BigInt::from(10).pow(k as u32))
        } else {
            Q::new(1.into(), BigInt::from(10).pow((-k) as u32))
        }
    };
    while a < ten(e) {
        e -= 1;
    }
    while a >= ten(e + 1) {
        e += 1;
    }
    let shift = sig as i64 - 1 - e;
    let scaled = &a * ten(shift);
    let (fl, rem) = scaled.numer().div_rem(scaled.denom());
    let twice: BigInt = rem * 2;
    let mut digits = match twice.cmp(scaled.denom()) {
        std::cmp::Ordering::Less => fl,
        std::cmp::Ordering::Greater => fl + 1,
        std::cmp::Ordering::Equal => {
            if fl.is_even() {
                fl
            } else {
                fl + 1
            }
        }
    };
    let mut shift = shift;
    if digits.to_string().len() > sig as usize {
        digits /= 10;
        shift -= 1;
    }
    let s = digits.to_string();
    let body = if shift <= 0 {
        format!("{}{}", s, "0".repeat((-shift) as usize))
    } else if (shift as usize) < s.len() {
        format!("{}.{}", &s[..s.len() - shift as usize], &s[s.len() - shift as usize..])
    } else {
        format!("0.{}{}", "0".repeat(shift as usize - s.len()), s)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// One cutoff of a statistics run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub x: u64,
    pub denominator: u64,
    pub symmetry: String,
    pub symmetry_decimal: String,
    pub first_moment: Vec<String>,
    pub first_moment_value: f64,
    pub positive_count: u64,
    pub negative_count: u64,
    pub zero_count: u64,
    pub sign_changes_global: u64,
    pub sign_changes_per_coordinate: Vec<u64>,
    pub ks_distance: f64,
    pub clt_unreliable: bool,
    pub tails: Vec<TailRow>,
}

/// Significant figures of the printed symmetry values.
pub const SYMMETRY_DIGITS: u32 = 5;

pub fn stat_report(ds: &PeriodDataset, x: u64) -> Result<StatReport> {
    let sym = symmetry_statistic(ds, x)?;
    let (m, mv) = first_moment(ds, x)?;
    if first_moment_by_symmetry(ds, x)? != m {
        return Err(Error::Internal("first moment identity fails".into()));
    }
    let signs = sign_reports(ds, x);
    let clt = clt_report(ds, x);
    Ok(StatReport {
        x,
        denominator: ds.up_to(x).len() as u64,
        symmetry_decimal: round_sig(&sym, SYMMETRY_DIGITS),
        symmetry: sym.to_string(),
        first_moment: m.iter().map(|c| c.to_string()).collect(),
        first_moment_value: mv,
        positive_count: signs.positive,
        negative_count: signs.negative,
        zero_count: signs.zero,
        sign_changes_global: signs.global_changes,
        sign_changes_per_coordinate: signs.per_coordinate_changes,
        ks_distance: clt.ks_distance,
        clt_unreliable: clt.unreliable,
        tails: clt.tails,
    })
}

/// The tables layout: cutoffs as columns, the symmetry statistic as a row.
pub fn symmetry_table(reports: &[StatReport]) -> String {
    let head: Vec<String> = reports.iter().map(|r| r.x.to_string()).collect();
    let row: Vec<String> = reports.iter().map(|r| r.symmetry_decimal.clone()).collect();
    format!("x\t{}\nsymmetry\t{}\n", head.join("\t"), row.join("\t"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::IntPoly;

    fn ds(vals: &[i64]) -> PeriodDataset {
        PeriodDataset {
            records: vals.iter().enumerate().map(|(i, &v)| (-(i as i64) - 3, vec![v])).collect(),
            field: NumberField::power_basis(&IntPoly::from_i64(&[0, 1])),
            root: 0.0,
        }
    }

    #[test]
    fn symmetry_extremes() {
        assert_eq!(symmetry_statistic(&ds(&[1, -1, 2, -2, 0]), 100).unwrap(), q(0));
        assert_eq!(symmetry_statistic(&ds(&[3, 3, 3]), 100).unwrap(), q(1));
        assert_eq!(symmetry_statistic(&ds(&[1, 1, -1, 0]), 100).unwrap(), qf(1, 4));
        assert!(symmetry_statistic(&ds(&[]), 100).is_err());
    }

    #[test]
    fn moments_and_signs() {
        let d = ds(&[1, -1, 2, -2]);
        assert_eq!(first_moment(&d, 100).unwrap().0, vec![q(0)]);
        let d = ds(&[3, 0, -1, 5, 5, -2]);
        assert_eq!(first_moment(&d, 100).unwrap().0, first_moment_by_symmetry(&d, 100).unwrap());
        let s = sign_reports(&d, 100);
        assert_eq!((s.positive, s.negative, s.zero, s.global_changes), (3, 2, 1, 3));
        assert_eq!(sign_reports(&ds(&[1, 2, 3]), 100).global_changes, 0);
    }

    #[test]
    fn tails_and_bounds() {
        assert!((0.25 * erfc(0.0) - 0.25).abs() < 1e-15);
        assert!(0.5 * (1.0 - normal_cdf(40.0)) < 1e-300);
        assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-12);
        assert_eq!(goldfeld_bound_for(19), qf(21, 80));
        assert_eq!(goldfeld_bound_for(65), qf(15, 96));
        assert_eq!(goldfeld_bound_for(2 * 3 * 5), qf(1, 2) * qf(1, 24) * qf(5, 8) * qf(7, 12));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_sig(&qf(12166, 1_000_000), 5), "0.012166");
        assert_eq!(round_sig(&qf(121665, 10_000_000), 5), "0.012166");
        assert_eq!(round_sig(&qf(121675, 10_000_000), 5), "0.012168");
        assert_eq!(round_sig(&qf(1, 3), 5), "0.33333");
        assert_eq!(round_sig(&qf(2, 3), 5), "0.66667");
        assert_eq!(round_sig(&qf(99999, 100_000_0), 4), "0.1000");
        assert_eq!(round_sig(&q(1), 5), "1.0000");
    }
}

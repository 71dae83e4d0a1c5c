//! The invariant suite behind `verify`: every check is exact.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toric_core::arith::int::{is_prime, prime_divisors};
use toric_core::arith::{q, qf, Q};
use toric_core::hecke::{brandt_matrices, Eigenform};
use toric_core::ideals::{mass_formula, ClassSet};
use toric_core::theta::{
    class_numbers, embedding_census, fundamental_discriminants, fundamental_sieve, is_fundamental,
    local_embedding_number_at, quad_class_number, shimura_check, unit_index, ThetaTable, WaldspurgerSeries,
};

use crate::error::CliResult;
use crate::pipeline::PeriodRun;

/// Largest prime used for Brandt matrix checks.
pub const BRANDT_MAX_PRIME: u64 = 50;
/// Largest `n` of the census identities.
pub const CENSUS_MAX: u64 = 500;
/// Random `(Δ, p)` pairs for the Shimura recursion.
pub const SHIMURA_PAIRS: usize = 100;
/// Random discriminants compared against the per-Δ tests.
pub const SIEVE_SPOTS: usize = 1000;
const SEED: u64 = 0x7e51_f00d;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, failures: Vec<String>, ran: usize) -> Self {
        let detail = match failures.first() {
            None => format!("{ran} cases"),
            Some(f) => format!("{} of {ran} cases fail; first: {f}", failures.len()),
        };
        Check { name, passed: failures.is_empty(), detail }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

pub fn good_primes(cs: &ClassSet, max: u64) -> Vec<u64> {
    (2..=max).filter(|&p| is_prime(p) && cs.order.reduced_discriminant % p != 0).collect()
}

pub fn check_mass(cs: &ClassSet) -> Check {
    let sum = cs.weights.iter().fold(q(0), |s, &w| s + qf(1, w as i64));
    let formula = mass_formula(&cs.order);
    let mut f = Vec::new();
    if sum != formula {
        f.push(format!("Σ 1/w = {sum}, formula {formula}"));
    }
    if cs.mass != formula {
        f.push(format!("stored mass {} differs", cs.mass));
    }
    Check::new("mass identity", f, 1)
}

pub fn check_brandt(cs: &ClassSet) -> CliResult<Check> {
    let ps = good_primes(cs, BRANDT_MAX_PRIME);
    let mats = brandt_matrices(cs, &ps)?;
    let mut f = Vec::new();
    for b in &mats {
        if !b.row_sums_ok() {
            f.push(format!("B({}) row sums", b.prime));
        }
        if !b.is_weighted_symmetric(&cs.weights) {
            f.push(format!("B({}) weighted symmetry", b.prime));
        }
        for (m, perm) in &cs.al_perms {
            if !b.commutes_with_perm(perm) {
                f.push(format!("B({}) and W_{m}", b.prime));
            }
        }
    }
    for (i, x) in mats.iter().enumerate() {
        for y in &mats[i + 1..] {
            if !x.commutes_with(y) {
                f.push(format!("B({}) B({}) do not commute", x.prime, y.prime));
            }
        }
    }
    Ok(Check::new("Brandt row sums, symmetry, commutation", f, mats.len()))
}

pub fn check_eigen(cs: &ClassSet, forms: &[Eigenform]) -> CliResult<Check> {
    let ps = good_primes(cs, BRANDT_MAX_PRIME);
    let mats = brandt_matrices(cs, &ps)?;
    let mut f = Vec::new();
    let mut ran = 0;
    for (k, phi) in forms.iter().enumerate() {
        for b in &mats {
            ran += 1;
            let ok = match phi.eigenvalues.get(&b.prime) {
                Some(l) => phi.satisfies(b, l),
                None => phi.eigenvalue(b).is_some(),
            };
            if !ok {
                f.push(format!("form {k}, T_{}", b.prime));
            }
        }
    }
    Ok(Check::new("eigen-equation recheck", f, ran))
}

pub fn check_theta_support(table: &ThetaTable) -> Check {
    let mut f = Vec::new();
    for i in 0..table.h() {
        if table.r(i, 0) != 1 {
            f.push(format!("class {i}: r(0) = {}", table.r(i, 0)));
        }
        for n in (1..=table.bound).filter(|n| n % 4 == 1 || n % 4 == 2) {
            if table.r(i, n) != 0 {
                f.push(format!("class {i}: r({n}) = {}", table.r(i, n)));
            }
        }
    }
    Check::new("theta support on n ≡ 0, 3 mod 4", f, table.h())
}

/// Per class, the vectors of norm `n` split by the conductor of the order
/// they generate, and the counts add up to the theta coefficient.
pub fn check_census(cs: &ClassSet, table: &ThetaTable) -> CliResult<Check> {
    let top = CENSUS_MAX.min(table.bound);
    let mut f = Vec::new();
    let mut ran = 0;
    for i in 0..cs.h() {
        for n in 1..=top {
            ran += 1;
            let c = embedding_census(cs, i, n)?;
            let total: u64 = c.values().sum();
            if total != table.r(i, n) {
                f.push(format!("class {i}, n {n}: census {total}, theta {}", table.r(i, n)));
            }
        }
    }
    Ok(Check::new("per-class census identity", f, ran))
}

/// `Σ_i u_E r_i(|Δ|) / w_i = h_E ∏_p m_p(Δ)` for fundamental `Δ`.
pub fn check_global_embeddings(cs: &ClassSet, table: &ThetaTable) -> CliResult<Check> {
    let top = CENSUS_MAX.min(table.bound);
    let disc_d = cs.order.disc_d();
    let level = cs.order.level;
    let mut f = Vec::new();
    let deltas = fundamental_discriminants(top + 1);
    for &delta in &deltas {
        let n = delta.unsigned_abs();
        let lhs =
            (0..cs.h()).fold(q(0), |s, i| s + qf((table.r(i, n) * unit_index(delta)) as i64, cs.weights[i] as i64));
        let mut local = 1u64;
        for p in prime_divisors(cs.order.reduced_discriminant) {
            local *= local_embedding_number_at(delta, p, disc_d, level)?;
        }
        let rhs = q((quad_class_number(delta)? * local) as i64);
        if lhs != rhs {
            f.push(format!("Δ {delta}: {lhs} vs {rhs}"));
        }
    }
    Ok(Check::new("global embedding-count identity", f, deltas.len()))
}

/// `a(p^{2k}|Δ|) = c_k a(|Δ|)` on random pairs, `k = 1` and, where the
/// bound allows, `k = 2`.
pub fn check_shimura(run: &PeriodRun) -> CliResult<Check> {
    let cs = &run.classes;
    let s: &WaldspurgerSeries = &run.series;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let ps: Vec<u64> = good_primes(cs, s.bound).into_iter().filter(|p| p * p * 3 <= s.bound).collect();
    let mut f = Vec::new();
    let mut ran = 0;
    if ps.is_empty() {
        return Ok(Check::new("Shimura recursion", f, 0));
    }
    let mats = brandt_matrices(cs, &ps)?;
    let lambdas: Vec<_> = mats.iter().map(|b| run.eigenform.eigenvalue(b)).collect();
    for _ in 0..SHIMURA_PAIRS {
        let k = rng.gen_range(0..ps.len());
        let p = ps[k];
        let deltas = fundamental_discriminants(s.bound / (p * p) + 1);
        let Some(&delta) = deltas.choose(&mut rng) else { continue };
        let Some(l) = &lambdas[k] else {
            f.push(format!("no eigenvalue at {p}"));
            continue;
        };
        for e in 1..=2u32 {
            if delta.unsigned_abs() * p.pow(2 * e) <= s.bound {
                ran += 1;
                if !shimura_check(s, l, delta, p, e)? {
                    f.push(format!("Δ {delta}, p {p}, k {e}"));
                }
            }
        }
    }
    Ok(Check::new("Shimura recursion", f, ran))
}

/// `a = c·𝔓` exactly where the level condition holds, `a = 0` elsewhere.
pub fn check_fourier(run: &PeriodRun) -> Check {
    let mut f = Vec::new();
    for r in &run.records {
        let zero = r.a.iter().all(|c| c == &q(0));
        match &r.period {
            Some(p) => {
                let back: Vec<Q> = p.iter().map(|&x| q(x * r.c as i64)).collect();
                if back != r.a {
                    f.push(format!("Δ {}: c·𝔓 ≠ a", r.delta));
                }
            }
            None if !zero => f.push(format!("Δ {}: a ≠ 0 outside the level condition", r.delta)),
            None => {}
        }
        if !r.in_xd && !zero {
            f.push(format!("Δ {}: a ≠ 0 outside X(D)", r.delta));
        }
    }
    Check::new("Fourier coefficient divisibility", f, run.records.len())
}

/// Sieved fundamental discriminants and class numbers against per-Δ tests.
pub fn check_sieves(bound: u64) -> CliResult<Check> {
    let x = bound.max(2);
    let sieve = fundamental_sieve(x);
    let h = class_numbers(x);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let mut f = Vec::new();
    for _ in 0..SIEVE_SPOTS {
        let n = rng.gen_range(1..x);
        let delta = -(n as i64);
        let naive = is_fundamental(delta);
        if sieve[n as usize] != naive {
            f.push(format!("fundamental({delta}): sieve {}, direct {naive}", sieve[n as usize]));
        }
        if naive && h[n as usize] as u64 != quad_class_number(delta)? {
            f.push(format!("h({delta}) differs"));
        }
    }
    Ok(Check::new("sieve spot checks", f, SIEVE_SPOTS))
}

/// All checks on one run, in a fixed order.
pub fn suite(run: &PeriodRun, forms: &[Eigenform], table: &ThetaTable) -> CliResult<Vec<Check>> {
    let cs = &run.classes;
    Ok(vec![
        check_mass(cs),
        check_brandt(cs)?,
        check_eigen(cs, forms)?,
        check_theta_support(table),
        check_census(cs, table)?,
        check_global_embeddings(cs, table)?,
        check_shimura(run)?,
        check_fourier(run),
        check_sieves(table.bound)?,
    ])
}

//! Property tests for the arithmetic and statistics layers, each against an
//! independent brute-force oracle.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use toric_core::arith::hnf::hnf_basis;
use toric_core::arith::int::{factor, is_prime, kronecker, legendre, pow_mod, primes_up_to};
use toric_core::arith::{nf_maximal_order, q, qf, IntPoly, NFElement, ZMatrix, Q};
use toric_core::stats::{round_sig, sign_changes};
use toric_core::theta::{class_numbers, fundamental_sieve, is_fundamental, quad_class_number, reduced_form_count};

fn trial_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn elem(c: &[i64]) -> NFElement {
    NFElement { coordinates: c.iter().map(|&x| q(x)).collect() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn primality_matches_trial_division(n in 0u64..200_000) {
        prop_assert_eq!(is_prime(n), trial_prime(n));
    }

    #[test]
    fn factorization_multiplies_back(n in 1u64..10_000_000) {
        let f = factor(n);
        prop_assert_eq!(f.iter().map(|&(p, e)| p.pow(e)).product::<u64>(), n);
        prop_assert!(f.iter().all(|&(p, _)| trial_prime(p)));
    }

    #[test]
    fn legendre_is_euler_criterion(a in -10_000i64..10_000, i in 1usize..500) {
        let p = primes_up_to(4000)[i];
        let r = pow_mod(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p);
        let euler = if r == 0 { 0 } else if r == 1 { 1 } else { -1 };
        prop_assert_eq!(legendre(a, p), euler);
        prop_assert_eq!(kronecker(a, p), euler);
    }

    #[test]
    fn hnf_is_canonical(rows in prop::collection::vec(prop::collection::vec(-20i64..20, 3), 1..6), perm in 0usize..720) {
        let m = ZMatrix::from_i64(&rows);
        let h = hnf_basis(&m);
        prop_assert_eq!(hnf_basis(&h), h.clone());
        // same lattice from reordered and recombined generators
        let mut shuffled = rows.clone();
        let k = shuffled.len();
        shuffled.rotate_left(perm % k);
        if k > 1 {
            let (a, b) = (shuffled[0].clone(), shuffled[1].clone());
            shuffled[0] = a.iter().zip(&b).map(|(x, y)| x + 3 * y).collect();
        }
        prop_assert_eq!(hnf_basis(&ZMatrix::from_i64(&shuffled)), h);
    }

    #[test]
    fn round_sig_is_within_half_unit(n in -10_000_000i64..10_000_000, d in 1i64..10_000_000, sig in 1u32..8) {
        prop_assume!(n != 0);
        let x = qf(n, d);
        let s = round_sig(&x, sig);
        let got: f64 = s.parse().unwrap();
        let v = n as f64 / d as f64;
        let e = v.abs().log10().floor();
        let ulp = 10f64.powf(e - sig as f64 + 1.0);
        prop_assert!((got - v).abs() <= 0.5 * ulp * (1.0 + 1e-9) + 1e-15, "{} -> {}", v, s);
        let digits = s.trim_start_matches('-').chars().filter(|c| c.is_ascii_digit()).skip_while(|&c| c == '0').count();
        prop_assert!(digits == sig as usize || digits == sig as usize + 1, "{}", s);
    }

    #[test]
    fn sign_changes_match_pairwise_count(v in prop::collection::vec(-1i32..=1, 0..200)) {
        let nz: Vec<i32> = v.iter().copied().filter(|&s| s != 0).collect();
        let naive = nz.windows(2).filter(|w| w[0] != w[1]).count() as u64;
        prop_assert_eq!(sign_changes(v.into_iter()), naive);
    }

    #[test]
    fn class_number_sieve_matches_forms(m in 3i64..20_000) {
        let h = class_numbers(20_000);
        let d = -m;
        if is_fundamental(d) {
            prop_assert_eq!(h[m as usize] as u64, quad_class_number(d).unwrap());
            prop_assert_eq!(h[m as usize] as u64, reduced_form_count(d));
        } else {
            prop_assert_eq!(h[m as usize], 0);
            prop_assert!(quad_class_number(d).is_err());
        }
    }

    #[test]
    fn reduced_model_is_isomorphic(b in -30i64..30, c in -200i64..0, x in prop::collection::vec(-5i64..5, 4)) {
        // x² + bx + c with c < 0 is totally real; skip reducible ones
        let disc = b * b - 4 * c;
        prop_assume!((disc as f64).sqrt().round().powi(2) as i64 != disc);
        let k = nf_maximal_order(&IntPoly::from_i64(&[c, b, 1])).unwrap();
        let (r, m) = k.reduced().unwrap();
        prop_assert_eq!(r.basis_discriminant(), k.basis_discriminant());
        let (u, v) = (elem(&x[..2]), elem(&x[2..]));
        let t = |e: &NFElement| k.transport(&r, &m, e);
        prop_assert_eq!(t(&k.mul(&u, &v)), r.mul(&t(&u), &t(&v)));
        prop_assert_eq!(t(&u.add(&v)), t(&u).add(&t(&v)));
        prop_assert_eq!(r.trace(&t(&u)), k.trace(&u));
        prop_assert_eq!(r.norm(&t(&u)), k.norm(&u));
        prop_assert!(t(&u).is_integral());
        // the reduced generator has the smallest possible trace form value
        let a = r.from_power(&[Q::zero(), q(1)]);
        let t2 = r.trace(&r.mul(&a, &a));
        let disc_k = k.basis_discriminant().abs().to_i64().unwrap();
        // any generator α = (s + t√Δ)/2 has Tr(α²) = (s² + t²Δ)/2 >= Δ/2
        prop_assert!(t2 * q(2) >= q(disc_k));
    }
}

#[test]
fn fundamental_sieve_matches_predicate() {
    let s = fundamental_sieve(50_000);
    for m in 0..=50_000i64 {
        assert_eq!(s[m as usize], m > 0 && is_fundamental(-m), "m = {m}");
    }
}

#[test]
fn cubic_reduction_of_scaled_generator() {
    // 2θ for θ³ − θ² − 3θ + 1 reduces back to a root of the same cubic
    let f = IntPoly::from_i64(&[8, -12, -2, 1]);
    let k = nf_maximal_order(&f).unwrap();
    let (r, _) = k.reduced().unwrap();
    let want: Vec<BigInt> = [1, -3, -1, 1].iter().map(|&c| BigInt::from(c)).collect();
    assert_eq!(r.generator_min_poly.coeffs(), &want[..]);
}

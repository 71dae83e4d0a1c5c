//! Negative fundamental discriminants, class numbers of imaginary quadratic
//! orders, and local optimal-embedding numbers.

use num_integer::Integer;

use crate::arith::int::{is_prime, kronecker, prime_divisors};
use crate::arith::{q, qf, Q};
use crate::error::{Error, Result};

/// `sf[m]` for `0 <= m <= n`: whether `m` is squarefree.
pub fn squarefree_sieve(n: u64) -> Vec<bool> {
    let n = n as usize;
    let mut sf = vec![true; n + 1];
    sf[0] = false;
    let mut k = 2usize;
    while k * k <= n {
        let s = k * k;
        let mut j = s;
        while j <= n {
            sf[j] = false;
            j += s;
        }
        k += 1;
    }
    sf
}

/// `fund[m]` for `0 <= m <= n`: whether `−m` is a fundamental discriminant.
pub fn fundamental_sieve(n: u64) -> Vec<bool> {
    let sf = squarefree_sieve(n);
    (0..=n as usize)
        .map(|m| match m % 4 {
            3 => sf[m],
            0 => {
                let k = m / 4;
                k > 0 && (k % 4 == 1 || k % 4 == 2) && sf[k]
            }
            _ => false,
        })
        .collect()
}

/// Fundamental discriminants `−x < Δ < 0`, in order of increasing `|Δ|`.
pub fn fundamental_discriminants(x: u64) -> Vec<i64> {
    if x <= 1 {
        return Vec::new();
    }
    fundamental_sieve(x - 1).iter().enumerate().filter(|(_, &f)| f).map(|(m, _)| -(m as i64)).collect()
}

/// Direct test, independent of the sieve.
pub fn is_fundamental(delta: i64) -> bool {
    let sqfree = |m: i64| m != 0 && crate::arith::int::is_squarefree(m.unsigned_abs());
    match delta.rem_euclid(4) {
        1 => delta != 1 && sqfree(delta),
        0 => {
            let m = delta / 4;
            matches!(m.rem_euclid(4), 2 | 3) && sqfree(m)
        }
        _ => false,
    }
}

/// `|o^×| / 2` for the order of discriminant `d < 0`.
pub fn unit_index(d: i64) -> u64 {
    match d {
        -3 => 3,
        -4 => 2,
        _ => 1,
    }
}

/// Number of reduced primitive forms `ax² + bxy + cy²` of discriminant
/// `d < 0`: `|b| <= a <= c`, `b >= 0` when `|b| = a` or `a = c`.
pub fn reduced_form_count(d: i64) -> u64 {
    assert!(d < 0 && d.rem_euclid(4) <= 1, "not a negative discriminant");
    let m = -d;
    let mut count = 0;
    let mut a = 1i64;
    while 3 * a * a <= m {
        for b in -a + 1..=a {
            if (b * b + m) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + m) / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                count += 1;
            }
        }
        a += 1;
    }
    count
}

/// `h_E` for a negative fundamental discriminant.
pub fn quad_class_number(delta: i64) -> Result<u64> {
    if delta >= 0 || !is_fundamental(delta) {
        return Err(Error::Domain(format!("{delta} is not a negative fundamental discriminant")));
    }
    Ok(reduced_form_count(delta))
}

/// `h[m]` for `0 <= m < x`: the class number of `Q(√−m)` when `−m` is
/// fundamental, 0 otherwise. Forms of fundamental discriminant are
/// automatically primitive.
pub fn class_numbers(x: u64) -> Vec<u32> {
    if x == 0 {
        return Vec::new();
    }
    let fund = fundamental_sieve(x - 1);
    let mut h = vec![0u32; x as usize];
    let x = x as i64;
    let mut a = 1i64;
    while 3 * a * a < x {
        for b in -a + 1..=a {
            let mut c = a;
            loop {
                let m = 4 * a * c - b * b;
                if m >= x {
                    break;
                }
                if !(c == a && b < 0) && fund[m as usize] {
                    h[m as usize] += 1;
                }
                c += 1;
            }
        }
        a += 1;
    }
    h
}

/// `h_o` for the order of conductor `f` in the field of discriminant `Δ`:
/// `h_E f (u_o/u_E) ∏_{p | f} (1 − (Δ/p)/p)`.
pub fn suborder_class_number(delta: i64, f: u64) -> Result<u64> {
    let h = Q::from_integer(quad_class_number(delta)?.into());
    if f == 0 {
        return Err(Error::Domain("conductor must be positive".into()));
    }
    let uo = if f == 1 { unit_index(delta) } else { 1 };
    let mut v = h * q(f as i64) * qf(uo as i64, unit_index(delta) as i64);
    for p in prime_divisors(f) {
        v *= q(1) - qf(kronecker(delta, p) as i64, p as i64);
    }
    if !v.is_integer() {
        return Err(Error::Internal(format!("class number formula gave {v}")));
    }
    Ok(v.to_integer().try_into().unwrap())
}

/// Where a prime divides `disc(O)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeKind {
    /// `p` ramifies in the algebra.
    Ramified,
    /// `p` divides the level.
    Level,
}

/// Local optimal embedding number of the maximal order of `Δ` at `p`:
/// `1 − (Δ/p)` at ramified primes, `1 + (Δ/p)` at level primes.
pub fn local_embedding_number(delta: i64, p: u64, kind: PrimeKind) -> u64 {
    let k = kronecker(delta, p) as i64;
    (match kind {
        PrimeKind::Ramified => 1 - k,
        PrimeKind::Level => 1 + k,
    }) as u64
}

/// As [`local_embedding_number`], with the kind read off the order data.
pub fn local_embedding_number_at(delta: i64, p: u64, disc_d: u64, level: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if disc_d % p == 0 {
        Ok(local_embedding_number(delta, p, PrimeKind::Ramified))
    } else if level % p == 0 {
        Ok(local_embedding_number(delta, p, PrimeKind::Level))
    } else {
        Err(Error::Domain(format!("{p} does not divide the discriminant of the order")))
    }
}

/// Membership of `E = Q(√Δ)`: `(in X(D), in Y)`. `X(D)`: no prime of
/// `disc(D)` splits; `Y` additionally needs no level prime inert.
pub fn membership(delta: i64, disc_d: u64, level: u64) -> (bool, bool) {
    let xd = prime_divisors(disc_d).into_iter().all(|p| kronecker(delta, p) != 1);
    let lv = prime_divisors(level).into_iter().all(|p| kronecker(delta, p) != -1);
    (xd, xd && lv)
}

/// `c(E) = 2^m`, `m` the number of primes of `disc(O)` unramified in `E`.
pub fn c_factor(delta: i64, disc_o: u64) -> u64 {
    1 << prime_divisors(disc_o).into_iter().filter(|&p| kronecker(delta, p) != 0).count()
}

/// `#Y` among fundamental `−x < Δ < 0`, by congruences only.
pub fn count_y(disc_d: u64, level: u64, x: u64) -> usize {
    fundamental_discriminants(x).into_iter().filter(|&d| membership(d, disc_d, level).1).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_direct_test() {
        let f = fundamental_sieve(5000);
        for m in 1..=5000i64 {
            assert_eq!(f[m as usize], is_fundamental(-m), "{m}");
        }
        assert_eq!(fundamental_discriminants(25), vec![-3, -4, -7, -8, -11, -15, -19, -20, -23, -24]);
    }

    #[test]
    fn class_numbers_small() {
        assert_eq!(quad_class_number(-3).unwrap(), 1);
        assert_eq!(quad_class_number(-4).unwrap(), 1);
        assert_eq!(quad_class_number(-23).unwrap(), 3);
        assert!(quad_class_number(-12).is_err());
        let batch = class_numbers(3000);
        for m in 1..3000i64 {
            if is_fundamental(-m) {
                assert_eq!(batch[m as usize] as u64, quad_class_number(-m).unwrap());
            }
        }
    }

    #[test]
    fn suborders_match_reduced_forms() {
        for (d, f) in [(-4i64, 2u64), (-3, 2), (-3, 3), (-4, 3), (-7, 2), (-23, 5), (-8, 3), (-15, 4)] {
            assert_eq!(suborder_class_number(d, f).unwrap(), reduced_form_count(d * (f * f) as i64), "{d} {f}");
        }
        assert_eq!(suborder_class_number(-23, 1).unwrap(), 3);
    }

    #[test]
    fn local_numbers() {
        assert_eq!(local_embedding_number(-11, 11, PrimeKind::Ramified), 1);
        assert_eq!(local_embedding_number(-7, 11, PrimeKind::Ramified), 0); // −7 ≡ 4 = 2² mod 11
        assert_eq!(local_embedding_number(-7, 11, PrimeKind::Level), 2);
        assert!(local_embedding_number_at(-7, 3, 11, 1).is_err());
        assert_eq!(c_factor(-11, 11), 1);
        assert_eq!(c_factor(-3, 65), 4);
    }
}

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::int::{is_prime, is_squarefree, legendre, prime_divisors};
use crate::arith::{q, Q};
use crate::error::{Error, Result};

/// A place of Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Infinity,
    Prime(u64),
}

fn split_power(mut n: i128, p: i128) -> (u32, i128) {
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    (e, n)
}

/// Hilbert symbol `(a, b)_v`: `+1` iff `x² = a y² + b z²` has a nontrivial
/// solution over `Q_v`.
pub fn hilbert_symbol(a: i64, b: i64, v: Place) -> i32 {
    assert!(a != 0 && b != 0, "Hilbert symbol of zero");
    match v {
        Place::Infinity => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (al, u) = split_power(a as i128, 2);
            let (be, w) = split_power(b as i128, 2);
            let eps = |x: i128| ((x - 1) / 2).rem_euclid(2);
            let omega = |x: i128| ((x * x - 1) / 8).rem_euclid(2);
            let e = eps(u) * eps(w) + al as i128 * omega(w) + be as i128 * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let (al, u) = split_power(a as i128, p as i128);
            let (be, w) = split_power(b as i128, p as i128);
            let mut s = if (al as u64 * be as u64 * ((p - 1) / 2)) % 2 == 0 { 1 } else { -1 };
            if be % 2 == 1 {
                s *= legendre((u % p as i128) as i64, p);
            }
            if al % 2 == 1 {
                s *= legendre((w % p as i128) as i64, p);
            }
            s
        }
    }
}

/// The algebra `(a, b | Q)` with `i² = a`, `j² = b`, `k = ij = −ji`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuaternionAlgebra {
    pub a: i64,
    pub b: i64,
    pub ramified_primes: Vec<u64>,
    pub definite: bool,
}

impl QuaternionAlgebra {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::Domain("quaternion algebra needs nonzero a, b".into()));
        }
        let mut ps = prime_divisors(2 * (a.unsigned_abs()) * b.unsigned_abs());
        ps.sort_unstable();
        ps.dedup();
        let ramified_primes = ps.into_iter().filter(|&p| hilbert_symbol(a, b, Place::Prime(p)) == -1).collect();
        Ok(QuaternionAlgebra { a, b, ramified_primes, definite: a < 0 && b < 0 })
    }

    /// Product of the finite ramified primes.
    pub fn discriminant(&self) -> u64 {
        self.ramified_primes.iter().product()
    }

    pub fn element(&self, c: [Q; 4]) -> QuatElement {
        QuatElement { coords: c }
    }

    pub fn one(&self) -> QuatElement {
        QuatElement::from_i64([1, 0, 0, 0])
    }

    pub fn mul(&self, u: &QuatElement, v: &QuatElement) -> QuatElement {
        let a = q(self.a);
        let b = q(self.b);
        let [t1, x1, y1, z1] = &u.coords;
        let [t2, x2, y2, z2] = &v.coords;
        let ab = &a * &b;
        let t = t1 * t2 + &a * x1 * x2 + &b * y1 * y2 - &ab * z1 * z2;
        let x = t1 * x2 + x1 * t2 - &b * y1 * z2 + &b * z1 * y2;
        let y = t1 * y2 + y1 * t2 + &a * x1 * z2 - &a * z1 * x2;
        let z = t1 * z2 + z1 * t2 + x1 * y2 - y1 * x2;
        QuatElement { coords: [t, x, y, z] }
    }

    /// Reduced norm `t² − a x² − b y² + ab z²`.
    pub fn nrd(&self, u: &QuatElement) -> Q {
        let [t, x, y, z] = &u.coords;
        let a = q(self.a);
        let b = q(self.b);
        t * t - &a * x * x - &b * y * y + &a * &b * z * z
    }

    /// Recomputes the ramified set from Hilbert symbols.
    pub fn certify(&self) -> bool {
        let fresh = QuaternionAlgebra::new(self.a, self.b);
        let Ok(fresh) = fresh else { return false };
        let inf = hilbert_symbol(self.a, self.b, Place::Infinity);
        let product: i32 = fresh.ramified_primes.iter().map(|_| -1).product::<i32>() * inf;
        fresh.ramified_primes == self.ramified_primes && product == 1 && self.definite == (inf == -1)
    }
}

/// An element `t + x i + y j + z k`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuatElement {
    pub coords: [Q; 4],
}

impl fmt::Debug for QuatElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [t, x, y, z] = &self.coords;
        write!(f, "({t}) + ({x})i + ({y})j + ({z})k")
    }
}

impl QuatElement {
    pub fn from_i64(c: [i64; 4]) -> Self {
        QuatElement { coords: c.map(q) }
    }

    pub fn trd(&self) -> Q {
        &self.coords[0] * q(2)
    }

    pub fn conj(&self) -> Self {
        let [t, x, y, z] = &self.coords;
        QuatElement { coords: [t.clone(), -x, -y, -z] }
    }

    pub fn add(&self, o: &Self) -> Self {
        QuatElement { coords: std::array::from_fn(|i| &self.coords[i] + &o.coords[i]) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QuatElement { coords: std::array::from_fn(|i| &self.coords[i] - &o.coords[i]) }
    }

    pub fn scale(&self, s: &Q) -> Self {
        QuatElement { coords: std::array::from_fn(|i| &self.coords[i] * s) }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

/// A definite algebra ramified exactly at the primes dividing `d` (and at
/// infinity). `d` must be odd, square-free, with an odd number of prime
/// factors.
pub fn algebra_of_discriminant(d: u64) -> Result<QuaternionAlgebra> {
    if d < 3 || d % 2 == 0 || !is_squarefree(d) {
        return Err(Error::Domain(format!("discriminant {d} is not odd and square-free")));
    }
    let ps = prime_divisors(d);
    if ps.len() % 2 == 0 {
        return Err(Error::Domain(format!("discriminant {d} has an even number of prime factors")));
    }
    let di = d as i64;
    let mut candidates: Vec<i64> = Vec::new();
    if ps.len() == 1 {
        let b = match d % 8 {
            3 | 7 => -1,
            5 => -2,
            _ => {
                let q = (3..)
                    .step_by(4)
                    .find(|&q| is_prime(q) && legendre(q as i64, d) == -1)
                    .expect("non-residue prime exists");
                -(q as i64)
            }
        };
        candidates.push(b);
    }
    candidates.extend([-1, -2]);
    candidates.extend((3u64..100_000).filter(|&q| is_prime(q)).map(|q| -(q as i64)));
    for b in candidates {
        let alg = QuaternionAlgebra::new(-di, b)?;
        if alg.ramified_primes == ps && alg.definite && alg.certify() {
            return Ok(alg);
        }
    }
    Err(Error::Internal(format!("no algebra of discriminant {d} found")))
}

impl QuaternionAlgebra {
    pub fn is_valid_discriminant(d: u64) -> bool {
        d >= 3 && d % 2 == 1 && is_squarefree(d) && prime_divisors(d).len() % 2 == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force local solvability: nontrivial primitive solution of
    /// `x² − a y² − b z² ≡ 0 mod p^k`.
    fn brute(a: i64, b: i64, p: i64, k: u32) -> i32 {
        let m = p.pow(k);
        for x in 0..m {
            for y in 0..m {
                for z in 0..m {
                    if x % p == 0 && y % p == 0 && z % p == 0 {
                        continue;
                    }
                    if (x * x - a * y * y - b * z * z).rem_euclid(m) == 0 {
                        return 1;
                    }
                }
            }
        }
        -1
    }

    #[test]
    fn small_symbols() {
        assert_eq!(hilbert_symbol(-1, -1, Place::Infinity), -1);
        assert_eq!(hilbert_symbol(-1, -1, Place::Prime(2)), -1);
        assert_eq!(hilbert_symbol(1, 7, Place::Prime(7)), 1);
        assert_eq!(hilbert_symbol(1, -5, Place::Prime(3)), 1);
    }

    #[test]
    fn symbols_match_brute_force() {
        // precision 2^5, 3^3, p^2 decides solvability for these small values
        for a in [-7i64, -3, -2, -1, 2, 3, 5, 6] {
            for b in [-5i64, -3, -1, 2, 3, 7] {
                for (p, k) in [(2i64, 5u32), (3, 3), (5, 2), (7, 2)] {
                    let expected = brute(a, b, p, k);
                    assert_eq!(hilbert_symbol(a, b, Place::Prime(p as u64)), expected, "({a},{b})_{p}");
                }
            }
        }
    }

    #[test]
    fn recipe_examples() {
        let a23 = algebra_of_discriminant(23).unwrap();
        assert_eq!((a23.a, a23.b), (-23, -1));
        let a41 = algebra_of_discriminant(41).unwrap();
        assert_eq!((a41.a, a41.b), (-41, -3));
        let a11 = algebra_of_discriminant(11).unwrap();
        assert_eq!(a11.ramified_primes, vec![11]);
        for d in [3u64, 5, 7, 13, 17, 19, 73, 97, 105, 165, 231, 385] {
            if !QuaternionAlgebra::is_valid_discriminant(d) {
                continue;
            }
            let alg = algebra_of_discriminant(d).unwrap();
            assert_eq!(alg.discriminant(), d);
            assert!(alg.certify());
        }
        assert!(algebra_of_discriminant(12).is_err());
        assert!(algebra_of_discriminant(15).is_err());
    }
}

use num_traits::ToPrimitive;

use super::order::{over_orders_at, OrderArith, QuaternionOrder, Vec4};
use crate::arith::int::{inv_mod, sqrt_mod_prime};
use crate::error::{Error, Result};

pub type Mat2 = [[i128; 2]; 2];

/// Images of the order basis under `O ⊗ Z/p^k ≅ M₂(Z/p^k)`, with the column
/// convention `φ(x) u_j = Σ_i φ(x)_{ij} u_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSplitting {
    pub prime: u64,
    pub precision: u32,
    pub modulus: i128,
    pub images: Vec<Mat2>,
}

impl LocalSplitting {
    /// Image of the element with the given order coordinates.
    pub fn image(&self, c: &Vec4) -> Mat2 {
        let m = self.modulus;
        let mut out = [[0i128; 2]; 2];
        for (a, &ca) in c.iter().enumerate() {
            let ca = ca.rem_euclid(m);
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] = (out[i][j] + ca * self.images[a][i][j]) % m;
                }
            }
        }
        out
    }

    /// Checks `φ(e_a e_b) = φ(e_a) φ(e_b)` for all basis pairs and `φ(1) = 1`.
    pub fn is_homomorphism(&self, arith: &OrderArith) -> bool {
        let m = self.modulus;
        for a in 0..4 {
            for b in 0..4 {
                let lhs = self.image(&arith.mult[a][b].map(|v| v as i128));
                let rhs = mat_mul(&self.images[a], &self.images[b], m);
                if lhs != rhs {
                    return false;
                }
            }
        }
        self.image(&arith.one()) == [[1, 0], [0, 1]]
    }

    /// Reduction to precision `k' <= k`.
    pub fn truncate(&self, k: u32) -> LocalSplitting {
        let m = (self.prime as i128).pow(k);
        LocalSplitting {
            prime: self.prime,
            precision: k,
            modulus: m,
            images: self.images.iter().map(|im| im.map(|r| r.map(|v| v.rem_euclid(m)))).collect(),
        }
    }
}

pub fn mat_mul(x: &Mat2, y: &Mat2, m: i128) -> Mat2 {
    let mut out = [[0i128; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (x[i][0] * y[0][j] + x[i][1] * y[1][j]).rem_euclid(m);
        }
    }
    out
}

fn reduce(v: &Vec4, m: i128) -> Vec4 {
    v.map(|x| x.rem_euclid(m))
}

/// Splitting of an order that is maximal at `p`, via a lifted rank-one
/// idempotent `e` and the left module `O e`.
pub(crate) fn split_unramified(arith: &OrderArith, p: u64, k: u32) -> Result<LocalSplitting> {
    let pi = p as i128;
    let m = pi.pow(k.max(1));
    let one = arith.one();
    // element with two distinct roots of its reduced characteristic polynomial
    let mut found = None;
    'search: for r in 1..=4i128 {
        let span = 2 * r + 1;
        for idx in 0..span.pow(4) {
            let mut t = idx;
            let mut x = [0i128; 4];
            for v in x.iter_mut() {
                *v = t % span - r;
                t /= span;
            }
            let tr = arith.trd(&x).rem_euclid(pi);
            let n = arith.nrd(&x).rem_euclid(pi);
            let roots: Option<(i128, i128)> = if p == 2 {
                (tr == 1 && n == 0).then_some((1, 0))
            } else {
                let disc = (tr * tr - 4 * n).rem_euclid(pi);
                if disc == 0 {
                    None
                } else {
                    sqrt_mod_prime(disc as u64, p).map(|s| {
                        let inv2 = (pi + 1) / 2;
                        (((tr + s as i128) * inv2).rem_euclid(pi), ((tr - s as i128) * inv2).rem_euclid(pi))
                    })
                }
            };
            if let Some(rt) = roots {
                found = Some((x, rt));
                break 'search;
            }
        }
    }
    let (x, (r1, r2)) = found.ok_or_else(|| Error::Internal(format!("no split element found at {p}")))?;
    let inv = inv_mod((r1 - r2).rem_euclid(pi), pi).unwrap();
    let mut e: Vec4 = std::array::from_fn(|a| ((x[a] - r2 * one[a]) * inv).rem_euclid(pi));
    for _ in 0..k.max(1) {
        let e2 = reduce(&arith.mul(&e, &e), m);
        let e3 = reduce(&arith.mul(&e2, &e), m);
        e = std::array::from_fn(|a| (3 * e2[a] - 2 * e3[a]).rem_euclid(m));
    }
    let basis: Vec<Vec4> = (0..4).map(|a| std::array::from_fn(|c| (c == a) as i128)).collect();
    let w: Vec<Vec4> = basis.iter().map(|b| reduce(&arith.mul(b, &e), m)).collect();
    // pick generators u1, u2 of O e and coordinates (r, s) with a unit minor
    let mut choice = None;
    'pick: for a in 0..4 {
        for b in a + 1..4 {
            for r in 0..4 {
                for s in r + 1..4 {
                    let det = (w[a][r] * w[b][s] - w[b][r] * w[a][s]).rem_euclid(pi);
                    if det != 0 {
                        choice = Some((a, b, r, s));
                        break 'pick;
                    }
                }
            }
        }
    }
    let (a, b, r, s) = choice.ok_or_else(|| Error::Internal(format!("idempotent at {p} is degenerate")))?;
    let (u1, u2) = (w[a], w[b]);
    let det = (u1[r] * u2[s] - u2[r] * u1[s]).rem_euclid(m);
    let dinv = inv_mod(det, m).unwrap();
    // solve α u1 + β u2 = y on coordinates r, s
    let solve = |y: &Vec4| -> (i128, i128) {
        let al = ((y[r] * u2[s] - u2[r] * y[s]).rem_euclid(m) * dinv).rem_euclid(m);
        let be = ((u1[r] * y[s] - y[r] * u1[s]).rem_euclid(m) * dinv).rem_euclid(m);
        (al, be)
    };
    let mut images = Vec::with_capacity(4);
    for bc in &basis {
        let (a1, b1) = solve(&reduce(&arith.mul(bc, &u1), m));
        let (a2, b2) = solve(&reduce(&arith.mul(bc, &u2), m));
        images.push([[a1, a2], [b1, b2]]);
    }
    let sp = LocalSplitting { prime: p, precision: k, modulus: m, images };
    if !sp.is_homomorphism(arith) {
        return Err(Error::Internal(format!("splitting at {p} is not multiplicative")));
    }
    Ok(sp)
}

/// `O_p ≅ M₂(Z_p)` modulo `p^k` for `p ∤ disc(D)`. At primes dividing the
/// level the images are upper triangular modulo `p`.
pub fn local_splitting(o: &QuaternionOrder, p: u64, k: u32) -> Result<LocalSplitting> {
    if o.disc_d() % p == 0 {
        return Err(Error::Domain(format!("{p} ramifies in the algebra")));
    }
    if k == 0 {
        return Err(Error::Domain("precision must be positive".into()));
    }
    if o.level % p != 0 {
        return split_unramified(o.arith(), p, k);
    }
    let over = over_orders_at(o, p)?;
    let big = over.first().ok_or_else(|| Error::Internal(format!("no over-order at {p}")))?;
    let sp = split_unramified(big.arith(), p, k)?;
    let m = sp.modulus;
    let pi = p as i128;
    let coords = o.basis_in(big);
    let mut images: Vec<Mat2> = Vec::with_capacity(4);
    for row in &coords {
        let c: Vec4 = std::array::from_fn(|a| row[a].to_integer().to_i128().expect("order inclusion"));
        images.push(sp.image(&c));
    }
    // conjugate so that the line stabilized mod p is the first basis vector
    let stable = |v: (i128, i128)| {
        images.iter().all(|im| {
            let w0 = im[0][0] * v.0 + im[0][1] * v.1;
            let w1 = im[1][0] * v.0 + im[1][1] * v.1;
            (w0 * v.1 - w1 * v.0).rem_euclid(pi) == 0
        })
    };
    let cands = (0..pi).map(|t| (1, t)).chain(std::iter::once((0, 1)));
    let v = cands.into_iter().find(|&v| stable(v)).ok_or_else(|| Error::Internal("no stable line".into()))?;
    let (pm, pinv): (Mat2, Mat2) = if v.0 == 1 {
        ([[1, 0], [v.1, 1]], [[1, 0], [(m - v.1).rem_euclid(m), 1]])
    } else {
        ([[0, 1], [1, 0]], [[0, 1], [1, 0]])
    };
    let images = images.iter().map(|im| mat_mul(&mat_mul(&pinv, im, m), &pm, m)).collect();
    let out = LocalSplitting { prime: p, precision: k, modulus: m, images };
    if !out.is_homomorphism(o.arith()) {
        return Err(Error::Internal(format!("splitting at {p} is not multiplicative")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{algebra_of_discriminant, eichler_order, maximal_order};

    #[test]
    fn disc11_at_2_precision_3() {
        let o = maximal_order(&algebra_of_discriminant(11).unwrap()).unwrap();
        let sp = local_splitting(&o, 2, 3).unwrap();
        assert_eq!(sp.modulus, 8);
        assert!(sp.is_homomorphism(o.arith()));
        assert_eq!(sp.image(&o.arith().one()), [[1, 0], [0, 1]]);
        assert!(local_splitting(&o, 11, 1).is_err());
    }

    #[test]
    fn precision_is_coherent() {
        let o = maximal_order(&algebra_of_discriminant(23).unwrap()).unwrap();
        for p in [2u64, 3, 5, 7] {
            let hi = local_splitting(&o, p, 4).unwrap();
            for k in 1..4 {
                assert_eq!(hi.truncate(k), local_splitting(&o, p, k).unwrap());
            }
        }
    }

    #[test]
    fn eichler_upper_triangular() {
        let omax = maximal_order(&algebra_of_discriminant(13).unwrap()).unwrap();
        let e = eichler_order(&omax, 35).unwrap();
        for p in [5u64, 7] {
            let sp = local_splitting(&e, p, 2).unwrap();
            assert!(sp.images.iter().all(|im| im[1][0] % p as i128 == 0));
        }
    }
}

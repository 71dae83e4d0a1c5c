//! Integral right ideals of an order, stored as Hermite bases in order
//! coordinates.

use serde::{Deserialize, Serialize};

use super::lattice::{conj_rows, gram_lattice, hnf_rows, index, product, rows128, Basis4, NormLattice};
use crate::arith::hnf::hermite_normal_form;
use crate::arith::{q, QMatrix, ZMatrix};
use crate::error::{Error, Result};
use crate::quat::{local_splitting, LocalSplitting, QuaternionOrder, Vec4};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// An integral right ideal `I ⊆ O` with `[O : I] = norm²`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RightIdeal {
    pub basis: Basis4,
    pub norm: u64,
}

impl RightIdeal {
    pub fn unit() -> Self {
        let mut b = [[0i64; 4]; 4];
        for (i, r) in b.iter_mut().enumerate() {
            r[i] = 1;
        }
        RightIdeal { basis: b, norm: 1 }
    }

    pub fn rows(&self) -> Vec<Vec4> {
        rows128(&self.basis)
    }

    /// Basis rows in the algebra coordinates 1, i, j, k.
    pub fn basis_algebra(&self, o: &QuaternionOrder) -> QMatrix {
        let m = QMatrix::from_fn(4, 4, |i, j| q(self.basis[i][j]));
        &m * &o.basis
    }

    /// `k·I`.
    pub fn scaled(&self, k: i64) -> RightIdeal {
        RightIdeal { basis: self.basis.map(|r| r.map(|x| x * k)), norm: self.norm * (k * k) as u64 }
    }

    /// Checks `I·O ⊆ I` and `[O : I] = N²`.
    pub fn is_valid(&self, o: &QuaternionOrder) -> bool {
        let n = self.norm as i128;
        if index(&self.basis) != n * n {
            return false;
        }
        let a = o.arith();
        let inv = QMatrix::from_fn(4, 4, |i, j| q(self.basis[i][j])).inverse();
        let Some(inv) = inv else { return false };
        for x in self.rows() {
            for e in 0..4 {
                let mut y = [0i128; 4];
                y[e] = 1;
                let z = a.mul(&x, &y);
                let zq: Vec<_> = z.iter().map(|&v| q(v as i64)).collect();
                if !inv.vec_mul(&zq).iter().all(|c| c.is_integer()) {
                    return false;
                }
            }
        }
        true
    }
}

/// `I Ī = N(I)·O_L(I)`, of index `N⁴` in `O`.
pub fn left_order_lattice(o: &QuaternionOrder, i: &RightIdeal) -> Result<Basis4> {
    let a = o.arith();
    let r = i.rows();
    let n = i.norm as i128;
    product(a, &r, &conj_rows(a, &r), n.pow(4))
}

/// The left order `O_L(I)` as a quaternion order.
pub fn left_order(o: &QuaternionOrder, i: &RightIdeal) -> Result<QuaternionOrder> {
    let l = left_order_lattice(o, i)?;
    let n = i.norm as i64;
    let m = QMatrix::from_fn(4, 4, |r, c| crate::arith::qf(l[r][c], n));
    QuaternionOrder::new(o.algebra.clone(), &m * &o.basis, o.level)
}

/// Norm form `nrd/N(I)²` on `I Ī`, i.e. `nrd` on `O_L(I)`.
pub fn left_order_norm(o: &QuaternionOrder, i: &RightIdeal) -> Result<NormLattice> {
    let l = left_order_lattice(o, i)?;
    let n = i.norm as i128;
    NormLattice::new(o.arith(), &rows128(&l), n * n)
}

/// Number of units of `O_L(I)`.
pub fn unit_count(o: &QuaternionOrder, i: &RightIdeal) -> Result<u64> {
    let nl = left_order_norm(o, i)?;
    let mut c = 0;
    nl.for_each(1, |_, m| {
        if m == 1 {
            c += 1;
        }
    });
    Ok(c)
}

/// `w = #O_L(I)^× / 2`.
pub fn weight(o: &QuaternionOrder, i: &RightIdeal) -> Result<u64> {
    Ok(unit_count(o, i)? / 2)
}

/// `nrd/N(I)` on `I`, a class invariant up to isometry.
pub fn ideal_norm_lattice(o: &QuaternionOrder, i: &RightIdeal) -> Result<NormLattice> {
    NormLattice::new(o.arith(), &i.rows(), i.norm as i128)
}

/// An element `β ∈ J Ī` with `nrd(β) = N(I) N(J)`; it exists iff `J = αI`
/// for some `α` (namely `α = β / N(I)`).
pub fn equivalence_element(o: &QuaternionOrder, i: &RightIdeal, j: &RightIdeal) -> Result<Option<Vec4>> {
    let a = o.arith();
    let s = i.norm as i128 * j.norm as i128;
    let jib = product(a, &j.rows(), &conj_rows(a, &i.rows()), s * s)?;
    let nl = NormLattice::new(a, &rows128(&jib), s)?;
    let mut found = None;
    nl.for_each(1, |v, m| {
        if m == 1 && found.is_none() {
            found = Some(*v);
        }
    });
    Ok(found)
}

/// Whether `J = αI` for some `α ∈ D^×`.
pub fn is_equivalent(o: &QuaternionOrder, i: &RightIdeal, j: &RightIdeal) -> Result<bool> {
    Ok(equivalence_element(o, i, j)?.is_some())
}

/// An equivalent ideal of small norm: `ᾱ I / N(I)` for a shortest `α ∈ I`.
pub fn reduce(o: &QuaternionOrder, i: &RightIdeal) -> Result<RightIdeal> {
    let a = o.arith();
    let nl = ideal_norm_lattice(o, i)?;
    let (m, mut vs) = nl.minimal_vectors();
    if m >= i.norm {
        return Ok(i.clone());
    }
    vs.iter_mut().for_each(|v| {
        if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
            *v = v.map(|x| -x);
        }
    });
    let alpha = *vs.iter().min().expect("nonzero vector");
    let ab = a.conj(&alpha);
    let n = i.norm as i128;
    let mut gens = Vec::with_capacity(4);
    for r in i.rows() {
        let p = a.mul(&ab, &r);
        if p.iter().any(|x| x % n != 0) {
            return Err(Error::Internal("reduction is not integral".into()));
        }
        gens.push(p.map(|x| x / n));
    }
    let nn = m as i128;
    Ok(RightIdeal { basis: hnf_rows(&gens, nn * nn)?, norm: m })
}

/// The `q+1` right ideals `J ⊂ I` with `I/J ≅ (Z/q)²`, indexed by `P¹(F_q)`
/// in the order `(1:0), (1:1), …, (1:q−1), (0:1)`.
pub fn p_neighbors(o: &QuaternionOrder, i: &RightIdeal, q: u64) -> Result<Vec<RightIdeal>> {
    if o.reduced_discriminant % q == 0 {
        return Err(Error::Domain(format!("{q} divides the discriminant")));
    }
    let sp = local_splitting(o, q, 1)?;
    neighbors_with(o, i, &sp)
}

pub(crate) fn neighbors_with(o: &QuaternionOrder, i: &RightIdeal, sp: &LocalSplitting) -> Result<Vec<RightIdeal>> {
    let a = o.arith();
    let q = sp.prime;
    let qi = q as i128;
    // generator of I locally at q
    let nl = ideal_norm_lattice(o, i)?;
    let mut alpha = None;
    let mut bound = 1;
    while alpha.is_none() {
        nl.for_each(bound, |v, m| {
            if alpha.is_none() && m % q != 0 {
                alpha = Some(*v);
            }
        });
        bound *= 2;
    }
    let alpha = alpha.unwrap();
    let qrows: Vec<Vec4> = i.rows().iter().map(|r| r.map(|x| x * qi)).collect();
    let n = i.norm as i128 * qi;
    let mut out = Vec::with_capacity(q as usize + 1);
    let pts = (0..q).map(|t| (1u64, t)).chain(std::iter::once((0, 1)));
    for (v0, v1) in pts {
        // L_v = {x ∈ O : vᵀ φ(x) ≡ 0 mod q}
        let f: Vec<Vec<u64>> = (0..2)
            .map(|col| {
                (0..4)
                    .map(|e| {
                        let im = &sp.images[e];
                        ((v0 as i128 * im[0][col] + v1 as i128 * im[1][col]).rem_euclid(qi)) as u64
                    })
                    .collect()
            })
            .collect();
        let ker = crate::arith::modp::kernel(&f, 4, q);
        let mut gens: Vec<Vec4> = qrows.clone();
        for kv in &ker {
            let x: Vec4 = std::array::from_fn(|c| kv[c] as i128);
            gens.push(a.mul(&alpha, &x));
        }
        for e in 0..4 {
            let mut x = [0i128; 4];
            x[e] = qi;
            gens.push(a.mul(&alpha, &x));
        }
        out.push(RightIdeal { basis: hnf_rows(&gens, n * n)?, norm: (n as u64) });
    }
    Ok(out)
}

/// The two-sided ideal of `O` of reduced norm `p`, for `p | disc(O)`.
pub fn two_sided_prime(o: &QuaternionOrder, p: u64) -> Result<Vec<Vec4>> {
    if o.reduced_discriminant % p != 0 {
        return Err(Error::Domain(format!("{p} does not divide the discriminant")));
    }
    let a = o.arith();
    let g: Vec<Vec<u64>> =
        (0..4).map(|r| (0..4).map(|c| crate::arith::modp::reduce_i64(a.gram[r][c], p)).collect()).collect();
    let ker = crate::arith::modp::kernel(&g, 4, p);
    let pi = p as i128;
    let mut gens: Vec<Vec4> = (0..4).map(|e| std::array::from_fn(|c| if c == e { pi } else { 0 })).collect();
    gens.extend(ker.iter().map(|k| std::array::from_fn(|c| k[c] as i128)));
    Ok(rows128(&hnf_rows(&gens, pi * pi)?))
}

/// `I·P` for a two-sided ideal `P` of norm `p`.
pub fn mul_two_sided(o: &QuaternionOrder, i: &RightIdeal, p_rows: &[Vec4], p: u64) -> Result<RightIdeal> {
    let n = i.norm as i128 * p as i128;
    Ok(RightIdeal { basis: product(o.arith(), &i.rows(), p_rows, n * n)?, norm: n as u64 })
}

/// `I·O'` for an order `O' ⊇ O`, as a right ideal of `O'` in its own
/// coordinates.
pub fn extend_ideal(o: &QuaternionOrder, big: &QuaternionOrder, i: &RightIdeal) -> Result<RightIdeal> {
    let c = o.basis_in(big);
    let mut rows = Vec::with_capacity(4);
    for r in i.rows() {
        let mut v = [0i128; 4];
        for (a, &ra) in r.iter().enumerate() {
            for b in 0..4 {
                if !c[a][b].is_integer() {
                    return Err(Error::Domain("order is not contained in the over-order".into()));
                }
                v[b] += ra * c[a][b].to_integer().to_i128().unwrap();
            }
        }
        rows.push(v);
    }
    let ones: Vec<Vec4> = (0..4).map(|e| std::array::from_fn(|c| (c == e) as i128)).collect();
    let n = i.norm as i128;
    Ok(RightIdeal { basis: product(big.arith(), &rows, &ones, n * n)?, norm: i.norm })
}

/// The ternary lattice `{v ∈ Z + 2 O_L(I) : trd(v) = 0}` with the form
/// `nrd`.
pub fn gross_lattice_form(o: &QuaternionOrder, i: &RightIdeal) -> Result<NormLattice> {
    let a = o.arith();
    let n = i.norm as i128;
    let l = left_order_lattice(o, i)?;
    // N·(Z + 2 O_L) in order coordinates
    let mut gens: Vec<Vec4> = rows128(&l).iter().map(|r| r.map(|x| 2 * x)).collect();
    gens.push(a.one().map(|x| x * n));
    let d = 16 * n.pow(4);
    let lat = rows128(&hnf_rows(&gens, d)?);
    let t = ZMatrix::from_fn(4, 1, |r, _| BigInt::from(a.trd(&lat[r])));
    let (h, u) = hermite_normal_form(&t);
    let mut kernel = Vec::new();
    for r in 0..4 {
        if h[(r, 0)].is_zero() {
            let mut v = [0i128; 4];
            for k in 0..4 {
                let c = u[(r, k)].to_i128().ok_or_else(|| Error::Internal("kernel overflow".into()))?;
                for (x, y) in v.iter_mut().zip(lat[k].iter()) {
                    *x += c * y;
                }
            }
            kernel.push(v);
        }
    }
    if kernel.len() != 3 {
        return Err(Error::Internal("trace-zero sublattice is not ternary".into()));
    }
    gram_lattice(&kernel, n * n, |x, y| {
        let mut s = 0i128;
        for p in 0..4 {
            for r in 0..4 {
                s += a.gram[p][r] as i128 * x[p] * y[r];
            }
        }
        s
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{algebra_of_discriminant, maximal_order};

    #[test]
    fn neighbors_of_unit() {
        let o = maximal_order(&algebra_of_discriminant(11).unwrap()).unwrap();
        let unit = RightIdeal::unit();
        let nb = p_neighbors(&o, &unit, 2).unwrap();
        assert_eq!(nb.len(), 3);
        for j in &nb {
            assert_eq!(j.norm, 2);
            assert!(j.is_valid(&o));
        }
        let back: Vec<bool> = nb
            .iter()
            .flat_map(|j| p_neighbors(&o, j, 2).unwrap())
            .map(|k| is_equivalent(&o, &unit, &k).unwrap())
            .collect();
        assert!(back.iter().any(|&b| b));
        assert!(p_neighbors(&o, &unit, 11).is_err());
    }

    #[test]
    fn trivial_equivalences() {
        let o = maximal_order(&algebra_of_discriminant(23).unwrap()).unwrap();
        let unit = RightIdeal::unit();
        assert!(is_equivalent(&o, &unit, &unit).unwrap());
        let nb = p_neighbors(&o, &unit, 3).unwrap();
        for j in &nb {
            assert!(is_equivalent(&o, j, &j.scaled(2)).unwrap());
            let r = reduce(&o, j).unwrap();
            assert!(r.is_valid(&o));
            assert!(is_equivalent(&o, j, &r).unwrap());
        }
    }

    #[test]
    fn gross_lattice_support() {
        let o = maximal_order(&algebra_of_discriminant(11).unwrap()).unwrap();
        let g = gross_lattice_form(&o, &RightIdeal::unit()).unwrap();
        let th = g.theta(200);
        for (n, &r) in th.iter().enumerate() {
            if n % 4 == 1 || n % 4 == 2 {
                assert_eq!(r, 0, "n = {n}");
            }
        }
        let first = th.iter().enumerate().skip(1).find(|(_, &r)| r > 0).unwrap().0;
        assert!(first == 3 || first == 4);
    }
}

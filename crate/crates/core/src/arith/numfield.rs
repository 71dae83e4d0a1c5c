//! Number fields `Q[x]/(f)` with an integral basis, and the Round 2
//! computation of the maximal order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::enumerate::{for_each_vector, IntForm};
use super::hnf::hnf_basis;
use super::int::{big_prime_divisors, valuation};
use super::matrix::{q, zq, QMatrix, ZMatrix, Q};
use super::modp;
use super::poly::{char_poly, IntPoly, QPoly};
use crate::error::{Error, Result};

/// A number field with a chosen integral basis. Elements are stored in
/// coordinates relative to `integral_basis`; the basis rows are expressed in
/// the power basis `1, θ, ..., θ^(n-1)` of the generator `θ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberField {
    pub generator_min_poly: IntPoly,
    pub integral_basis: QMatrix,
    pub degree: usize,
    #[serde(skip)]
    basis_inv: Option<QMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NFElement {
    pub coordinates: Vec<Q>,
}

impl NFElement {
    pub fn is_zero(&self) -> bool {
        self.coordinates.iter().all(|c| c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coordinates.iter().all(|c| c.is_integer())
    }

    pub fn integer_coords(&self) -> Option<Vec<BigInt>> {
        if self.is_integral() {
            Some(self.coordinates.iter().map(|c| c.to_integer()).collect())
        } else {
            None
        }
    }

    pub fn neg(&self) -> Self {
        NFElement { coordinates: self.coordinates.iter().map(|c| -c).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        NFElement { coordinates: self.coordinates.iter().zip(&o.coordinates).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        NFElement { coordinates: self.coordinates.iter().zip(&o.coordinates).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: &Q) -> Self {
        NFElement { coordinates: self.coordinates.iter().map(|c| c * s).collect() }
    }
}

impl NumberField {
    /// The field with its power basis as integral basis.
    pub fn power_basis(f: &IntPoly) -> Self {
        assert!(f.is_monic() && f.degree() >= 1, "defining polynomial must be monic");
        let n = f.degree() as usize;
        Self::with_basis(f.clone(), QMatrix::identity(n))
    }

    pub fn with_basis(f: IntPoly, basis: QMatrix) -> Self {
        let n = f.degree() as usize;
        let inv = basis.inverse().expect("integral basis is singular");
        NumberField { generator_min_poly: f, integral_basis: basis, degree: n, basis_inv: Some(inv) }
    }

    fn inv(&self) -> QMatrix {
        match &self.basis_inv {
            Some(m) => m.clone(),
            None => self.integral_basis.inverse().unwrap(),
        }
    }

    /// Restores cached data after deserialization.
    pub fn rehydrate(mut self) -> Self {
        self.basis_inv = Some(self.integral_basis.inverse().unwrap());
        self
    }

    pub fn modulus(&self) -> QPoly {
        self.generator_min_poly.to_q()
    }

    pub fn from_power(&self, c: &[Q]) -> NFElement {
        let mut v = c.to_vec();
        v.resize(self.degree, Q::zero());
        NFElement { coordinates: self.inv().vec_mul(&v) }
    }

    pub fn to_power(&self, e: &NFElement) -> Vec<Q> {
        self.integral_basis.vec_mul(&e.coordinates)
    }

    pub fn from_qpoly(&self, p: &QPoly) -> NFElement {
        let r = p.rem(&self.modulus());
        self.from_power(&r.c)
    }

    pub fn to_qpoly(&self, e: &NFElement) -> QPoly {
        QPoly::new(self.to_power(e))
    }

    pub fn from_int(&self, n: i64) -> NFElement {
        self.from_power(&[q(n)])
    }

    pub fn from_q(&self, x: &Q) -> NFElement {
        self.from_power(&[x.clone()])
    }

    pub fn zero(&self) -> NFElement {
        NFElement { coordinates: vec![Q::zero(); self.degree] }
    }

    pub fn one(&self) -> NFElement {
        self.from_int(1)
    }

    /// The generator `θ`.
    pub fn generator(&self) -> NFElement {
        if self.degree == 1 {
            // θ is rational: the root of x - r
            let r = -zq(&self.generator_min_poly.coeff(0));
            return self.from_q(&r);
        }
        self.from_power(&[Q::zero(), Q::one()])
    }

    pub fn mul(&self, a: &NFElement, b: &NFElement) -> NFElement {
        let p = self.to_qpoly(a).mul(&self.to_qpoly(b));
        self.from_qpoly(&p)
    }

    pub fn pow(&self, a: &NFElement, e: u32) -> NFElement {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    /// Matrix of multiplication by `a` on the power basis (row convention:
    /// row i is θ^i · a).
    pub fn mul_matrix_power(&self, a: &NFElement) -> QMatrix {
        let n = self.degree;
        let ap = self.to_qpoly(a);
        let m = self.modulus();
        let rows = (0..n)
            .map(|i| {
                let mut xi = vec![Q::zero(); i + 1];
                xi[i] = Q::one();
                let r = QPoly::new(xi).mul(&ap).rem(&m);
                let mut c = r.c;
                c.resize(n, Q::zero());
                c
            })
            .collect();
        QMatrix::from_rows(rows)
    }

    pub fn inverse(&self, a: &NFElement) -> Option<NFElement> {
        if a.is_zero() {
            return None;
        }
        let m = self.mul_matrix_power(a);
        let mut one = vec![Q::zero(); self.degree];
        one[0] = Q::one();
        // x * M = e_0 where x is the power-basis vector of a^{-1}
        let x = m.solve_left(&one)?;
        Some(self.from_power(&x))
    }

    pub fn div(&self, a: &NFElement, b: &NFElement) -> Option<NFElement> {
        Some(self.mul(a, &self.inverse(b)?))
    }

    pub fn char_poly_of(&self, a: &NFElement) -> QPoly {
        char_poly(&self.mul_matrix_power(a))
    }

    pub fn trace(&self, a: &NFElement) -> Q {
        let m = self.mul_matrix_power(a);
        (0..self.degree).fold(Q::zero(), |s, i| s + &m[(i, i)])
    }

    pub fn norm(&self, a: &NFElement) -> Q {
        self.mul_matrix_power(a).det()
    }

    /// Integral over Z (characteristic polynomial has integer coefficients).
    pub fn is_algebraic_integer(&self, a: &NFElement) -> bool {
        self.char_poly_of(a).to_int().is_some()
    }

    pub fn is_unit(&self, a: &NFElement) -> bool {
        self.is_algebraic_integer(a) && self.norm(a).abs() == Q::one()
    }

    pub fn real_roots(&self) -> Vec<f64> {
        self.generator_min_poly.real_roots()
    }

    /// Largest real root of the defining polynomial, if any.
    pub fn largest_real_root(&self) -> Option<f64> {
        self.real_roots().into_iter().last()
    }

    /// Image of `a` under the real embedding `θ ↦ root`.
    pub fn embed(&self, a: &NFElement, root: f64) -> f64 {
        let p = self.to_power(a);
        p.iter().rev().fold(0.0, |acc, c| acc * root + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Discriminant of the integral basis, `det(Tr(b_i b_j))`.
    pub fn basis_discriminant(&self) -> BigInt {
        let n = self.degree;
        let elems: Vec<NFElement> = (0..n)
            .map(|i| {
                let mut c = vec![Q::zero(); n];
                c[i] = Q::one();
                NFElement { coordinates: c }
            })
            .collect();
        let g = QMatrix::from_fn(n, n, |i, j| self.trace(&self.mul(&elems[i], &elems[j])));
        g.det().to_integer()
    }

    /// A reduced model of a totally real field whose integral basis is the
    /// maximal order: a generator `α` of least `Tr(α²)`, ties broken by the
    /// smallest coefficients, its sign chosen so that the first nonzero of
    /// `a_{n−1}, a_{n−3}, …` is negative. Returns the new field and the
    /// matrix taking power coordinates of the old generator to power
    /// coordinates of `α`.
    pub fn reduced(&self) -> Option<(NumberField, QMatrix)> {
        let n = self.degree;
        if n < 2 || self.generator_min_poly.count_real_roots() != n {
            return None;
        }
        let e = |i: usize| {
            let mut c = vec![Q::zero(); n];
            c[i] = Q::one();
            NFElement { coordinates: c }
        };
        let gram = QMatrix::from_fn(n, n, |i, j| self.trace(&self.mul(&e(i), &e(j))));
        let form = IntForm::from_gram(&gram, 1).ok()?;
        let theta = self.from_power(&[Q::zero(), Q::one()]);
        let cap = self.trace(&self.mul(&theta, &theta)).to_integer().to_u64()?;
        let mut bound = 2 * n as u64;
        let best = loop {
            let mut best: Option<(Vec<BigInt>, IntPoly, NFElement)> = None;
            for_each_vector(&form, bound, |v, norm| {
                if norm == 0 {
                    return;
                }
                let a = NFElement { coordinates: v.iter().map(|&x| q(x)).collect() };
                let Some(f) = self.char_poly_of(&a).to_int() else { return };
                if !f.is_squarefree() {
                    return;
                }
                let (f, a) = normalize_sign(f, a);
                let mut key = vec![BigInt::from(norm)];
                key.extend((0..n).rev().map(|k| f.coeff(k).abs()));
                key.extend((0..n).rev().map(|k| f.coeff(k)));
                if best.as_ref().map_or(true, |b| key < b.0) {
                    best = Some((key, f, a));
                }
            });
            if best.is_some() || bound > cap {
                break best;
            }
            bound *= 2;
        };
        let (_, h, alpha) = best?;
        let mut rows = Vec::with_capacity(n);
        let mut pw = self.one();
        for _ in 0..n {
            rows.push(self.to_power(&pw));
            pw = self.mul(&pw, &alpha);
        }
        let m_inv = QMatrix::from_rows(rows).inverse()?;
        let basis_rows: Vec<Vec<Q>> = self.integral_basis.to_rows().iter().map(|r| m_inv.vec_mul(r)).collect();
        Some((NumberField::with_basis(h, lattice_from_rows(&basis_rows, n)), m_inv))
    }

    /// Moves `e` along a change of model from [`NumberField::reduced`].
    pub fn transport(&self, target: &NumberField, m: &QMatrix, e: &NFElement) -> NFElement {
        target.from_power(&m.vec_mul(&self.to_power(e)))
    }

    /// Structure constants of the integral basis: `table[a][b]` holds the
    /// coordinates of `b_a b_b`.
    pub fn structure_constants(&self) -> Vec<Vec<Vec<Q>>> {
        let n = self.degree;
        let e = |i: usize| {
            let mut c = vec![Q::zero(); n];
            c[i] = Q::one();
            NFElement { coordinates: c }
        };
        (0..n).map(|a| (0..n).map(|b| self.mul(&e(a), &e(b)).coordinates).collect()).collect()
    }
}

/// Between `f(x)` for `a` and `±f(−x)` for `−a`, the one whose first nonzero
/// coefficient among `a_{n−1}, a_{n−3}, …` is negative.
fn normalize_sign(f: IntPoly, a: NFElement) -> (IntPoly, NFElement) {
    let n = f.degree() as usize;
    let first = (1..=n).step_by(2).map(|k| f.coeff(n - k)).find(|c| !c.is_zero());
    match first {
        Some(c) if c.is_positive() => {
            let g = IntPoly::new((0..=n).map(|k| if (n - k) % 2 == 1 { -f.coeff(k) } else { f.coeff(k) }).collect());
            (g, a.neg())
        }
        _ => (f, a),
    }
}

fn lattice_from_rows(rows: &[Vec<Q>], n: usize) -> QMatrix {
    // common denominator, integer HNF, scale back
    let d = rows.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let dq = zq(&d);
    let zm = ZMatrix::from_rows(rows.iter().map(|r| r.iter().map(|x| (x * &dq).to_integer()).collect()).collect());
    let h = hnf_basis(&zm);
    assert_eq!(h.rows(), n);
    h.to_q().scale(&dq.recip())
}

/// Maximal order of `Q[x]/(f)` for monic irreducible `f` of degree at most 8.
pub fn nf_maximal_order(f: &IntPoly) -> Result<NumberField> {
    let n = f.degree();
    if !f.is_monic() || n < 1 {
        return Err(Error::Domain("defining polynomial must be monic of positive degree".into()));
    }
    if n > 8 {
        return Err(Error::Unsupported(format!("maximal order of degree {n} > 8")));
    }
    let n = n as usize;
    let mut k = NumberField::power_basis(f);
    if n == 1 {
        return Ok(k);
    }
    let disc = f.discriminant();
    for p in big_prime_divisors(&disc) {
        if valuation(&disc, p) < 2 {
            continue;
        }
        loop {
            match enlarge_at(&k, p) {
                Some(nk) => k = nk,
                None => break,
            }
        }
    }
    Ok(k)
}

/// One Round 2 step at `p`: the multiplier ring of the `p`-radical, or
/// `None` if the order is already `p`-maximal.
fn enlarge_at(k: &NumberField, p: u64) -> Option<NumberField> {
    let n = k.degree;
    let table: Vec<Vec<Vec<BigInt>>> = k
        .structure_constants()
        .into_iter()
        .map(|r| r.into_iter().map(|c| c.into_iter().map(|x| x.to_integer()).collect()).collect())
        .collect();
    let bp = BigInt::from(p);
    let red = |x: &BigInt| x.mod_floor(&bp).to_u64().unwrap();
    let mul_p = |a: &[u64], b: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; n];
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                if b[j] == 0 {
                    continue;
                }
                let s = a[i] as u128 * b[j] as u128 % p as u128;
                for (l, o) in out.iter_mut().enumerate() {
                    let t = red(&table[i][j][l]) as u128;
                    *o = ((*o as u128 + s * t) % p as u128) as u64;
                }
            }
        }
        out
    };
    // Frobenius power p^j >= n
    let mut pj = p;
    let mut steps = 1;
    while (pj as usize) < n {
        pj *= p;
        steps += 1;
    }
    let frob: Vec<Vec<u64>> = (0..n)
        .map(|a| {
            let mut v = vec![0u64; n];
            v[a] = 1;
            for _ in 0..steps {
                // v <- v^p
                let mut acc = {
                    let mut one = vec![0u64; n];
                    // coordinates of 1 in the integral basis
                    let c = k.one().coordinates;
                    for i in 0..n {
                        one[i] = red(&c[i].to_integer());
                    }
                    one
                };
                let mut base = v.clone();
                let mut e = p;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = mul_p(&acc, &base);
                    }
                    base = mul_p(&base, &base);
                    e >>= 1;
                }
                v = acc;
            }
            v
        })
        .collect();
    let rad = modp::left_kernel(&frob, p);
    // I_p = lift(rad) + pO, in O-coordinates
    let mut gens: Vec<Vec<Q>> = rad.iter().map(|v| v.iter().map(|&x| q(x as i64)).collect()).collect();
    for a in 0..n {
        let mut v = vec![Q::zero(); n];
        v[a] = q(p as i64);
        gens.push(v);
    }
    let ip = lattice_from_rows(&gens, n);
    let ip_inv = ip.inverse().unwrap();
    // multipliers: y with y β ∈ p I_p for all β in I_p
    let mut cond = vec![Vec::with_capacity(n * n); n];
    for (a, row) in cond.iter_mut().enumerate() {
        for b in 0..n {
            // product b_a * β_b in O-coords
            let beta = ip.row_vec(b);
            let mut prod = vec![Q::zero(); n];
            for (j, bj) in beta.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                for l in 0..n {
                    prod[l] += bj * zq(&table[a][j][l]);
                }
            }
            let c = ip_inv.vec_mul(&prod);
            for x in c {
                debug_assert!(x.is_integer());
                row.push(red(&x.to_integer()));
            }
        }
    }
    let ker = modp::left_kernel(&cond, p);
    let mut gens: Vec<Vec<Q>> = ker.iter().map(|v| v.iter().map(|&x| q(x as i64)).collect()).collect();
    for a in 0..n {
        let mut v = vec![Q::zero(); n];
        v[a] = q(p as i64);
        gens.push(v);
    }
    let u = lattice_from_rows(&gens, n);
    // O' = U / p; index [O':O] = p^n / det(U)
    let det = u.det().abs();
    let pn = (0..n).fold(Q::one(), |acc, _| acc * q(p as i64));
    if det == pn {
        return None;
    }
    let new_rows = u.scale(&q(p as i64).recip());
    let basis = &new_rows * &k.integral_basis;
    let basis = lattice_from_rows(&basis.to_rows(), n);
    Some(NumberField::with_basis(k.generator_min_poly.clone(), canonical_basis(&basis)))
}

/// Puts a basis (in power coordinates) into a canonical lower-triangular
/// echelon form via the Hermite form of the transpose-reversed matrix, so
/// that the first element is 1 whenever 1 lies in the lattice as a basis
/// vector.
fn canonical_basis(b: &QMatrix) -> QMatrix {
    let n = b.rows();
    // reverse column order so that HNF pivots on the highest power first,
    // then reverse rows: gives rows with leading power increasing.
    let rev = QMatrix::from_fn(n, n, |i, j| b[(i, n - 1 - j)].clone());
    let h = lattice_from_rows(&rev.to_rows(), n);
    QMatrix::from_fn(n, n, |i, j| h[(n - 1 - i, n - 1 - j)].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::matrix::qf;

    #[test]
    fn sqrt5() {
        let k = nf_maximal_order(&IntPoly::from_i64(&[-5, 0, 1])).unwrap();
        assert_eq!(k.integral_basis, QMatrix::from_rows(vec![vec![q(1), q(0)], vec![qf(1, 2), qf(1, 2)]]));
        assert_eq!(k.basis_discriminant(), BigInt::from(5));
    }

    #[test]
    fn gaussian() {
        let k = nf_maximal_order(&IntPoly::from_i64(&[1, 0, 1])).unwrap();
        assert_eq!(k.integral_basis, QMatrix::identity(2));
    }

    #[test]
    fn unit_detection() {
        let k = nf_maximal_order(&IntPoly::from_i64(&[-5, 0, 1])).unwrap();
        let g = k.from_power(&[qf(1, 2), qf(1, 2)]);
        assert!(k.is_unit(&g));
        assert!(!k.is_unit(&k.from_int(2)));
    }
}

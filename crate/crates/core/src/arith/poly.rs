//! Integer and rational univariate polynomials: arithmetic, characteristic
//! polynomials, factorization over Z, and real-root isolation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::int::{is_prime, mul_mod};
use super::matrix::{zq, QMatrix, ZMatrix, Q};
use super::modp::{self, PolyP};

/// Integer polynomial, ascending coefficients, trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coef = !a.is_one() || i == 0;
            if show_coef {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// `x - r`
    pub fn linear(r: &BigInt) -> Self {
        Self::new(vec![-r.clone(), BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has degree -1.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn lead(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lead().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_q(&self, x: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * x + zq(c))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Exact division by a divisor over Z; `None` if it does not divide.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero());
        if self.degree() < d.degree() {
            return if self.is_zero() { Some(Self::zero()) } else { None };
        }
        let mut r = self.coeffs.clone();
        let dl = d.coeffs.len();
        let lc = d.lead();
        let mut q = vec![BigInt::zero(); r.len() - dl + 1];
        for k in (0..q.len()).rev() {
            let (c, rem) = r[k + dl - 1].div_rem(&lc);
            if !rem.is_zero() {
                return None;
            }
            if !c.is_zero() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dj;
                }
            }
            q[k] = c;
        }
        if r.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::new(q))
    }

    /// Remainder of division by a monic polynomial.
    pub fn rem_monic(&self, m: &Self) -> Self {
        assert!(m.is_monic());
        let mut r = self.coeffs.clone();
        let dl = m.coeffs.len();
        while r.len() >= dl {
            let c = r.pop().unwrap();
            if c.is_zero() {
                continue;
            }
            let off = r.len() + 1 - dl;
            for j in 0..dl - 1 {
                r[off + j] -= &c * &m.coeffs[j];
            }
        }
        Self::new(r)
    }

    pub fn to_q(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(zq).collect())
    }

    pub fn mod_p(&self, p: u64) -> PolyP {
        let bp = BigInt::from(p);
        PolyP::new(self.coeffs.iter().map(|c| c.mod_floor(&bp).to_u64().unwrap()).collect(), p)
    }

    /// Euclidean norm bound `ceil(sqrt(sum c_i^2))`.
    pub fn l2_bound(&self) -> BigInt {
        let s: BigInt = self.coeffs.iter().map(|c| c * c).sum();
        s.sqrt() + 1
    }

    /// Discriminant, computed as `(-1)^(n(n-1)/2) Res(f, f') / lc`.
    pub fn discriminant(&self) -> BigInt {
        let n = self.degree();
        assert!(n >= 1);
        let res = resultant(self, &self.derivative());
        let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
        let (q, r) = (res * BigInt::from(sign)).div_rem(&self.lead());
        debug_assert!(r.is_zero());
        q
    }

    /// Squarefree test via a gcd modulo a few primes, with an exact fallback.
    pub fn is_squarefree(&self) -> bool {
        if self.degree() <= 0 {
            return true;
        }
        let d = self.derivative();
        for p in modular_primes(1 << 30).take(4) {
            let fp = self.mod_p(p);
            if fp.degree() != self.degree() {
                continue;
            }
            if fp.gcd(&d.mod_p(p), p).degree() == 0 {
                return true;
            }
        }
        qgcd(&self.to_q(), &d.to_q()).degree() == 0
    }

    /// Polynomial composition `self(g)`.
    pub fn compose(&self, g: &Self) -> Self {
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| acc.mul(g).add(&Self::new(vec![c.clone()])))
    }

    /// Real roots in ascending order, for squarefree input of modest degree.
    pub fn real_roots(&self) -> Vec<f64> {
        let q = self.to_q();
        isolate_real_roots(&q).into_iter().map(|(lo, hi)| refine_root(&q, lo, hi)).collect()
    }

    pub fn count_real_roots(&self) -> usize {
        let q = self.to_q();
        let seq = sturm_sequence(&q);
        let b = cauchy_bound(&q);
        sign_changes_at(&seq, &(-b.clone())) - sign_changes_at(&seq, &b)
    }
}

/// Resultant over Z by fraction-free evaluation of the Sylvester determinant
/// through a rational Euclidean scheme.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> BigInt {
    let (mut a, mut b) = (f.to_q(), g.to_q());
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    let mut res = Q::one();
    loop {
        let (da, db) = (a.degree(), b.degree());
        if db == 0 {
            let lb = b.lead();
            let mut t = Q::one();
            for _ in 0..da {
                t *= &lb;
            }
            res *= t;
            break;
        }
        let r = a.rem(&b);
        if r.is_zero() {
            return BigInt::zero();
        }
        let dr = r.degree();
        // Res(a,b) = (-1)^(da db) lc(b)^(da - dr) Res(b, r)
        if (da * db) % 2 == 1 {
            res = -res;
        }
        let lb = b.lead();
        for _ in 0..(da - dr) {
            res *= &lb;
        }
        a = b;
        b = r;
    }
    debug_assert!(res.is_integer());
    res.to_integer()
}

/// Rational polynomial, ascending coefficients, trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QPoly {
    pub c: Vec<Q>,
}

impl QPoly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        QPoly { c }
    }

    pub fn zero() -> Self {
        QPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        QPoly { c: vec![Q::one()] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn lead(&self) -> Q {
        self.c.last().cloned().unwrap_or_else(Q::zero)
    }

    fn get(&self, i: usize) -> Q {
        self.c.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.get(i) + o.get(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.get(i) - o.get(i)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::new(self.c.iter().map(|x| x * s).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().recip();
        self.scale(&l)
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero());
        if self.c.len() < d.c.len() {
            return (Self::zero(), self.clone());
        }
        let mut r = self.c.clone();
        let dl = d.c.len();
        let li = d.lead().recip();
        let mut q = vec![Q::zero(); r.len() - dl + 1];
        for k in (0..q.len()).rev() {
            let coef = &r[k + dl - 1] * &li;
            if !coef.is_zero() {
                for (j, dj) in d.c.iter().enumerate() {
                    r[k + j] -= &coef * dj;
                }
            }
            q[k] = coef;
        }
        r.truncate(dl - 1);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.c.iter().enumerate().skip(1).map(|(i, x)| x * Q::from_integer(BigInt::from(i))).collect())
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.c.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    /// Clears denominators and returns the primitive integer polynomial.
    pub fn to_primitive_int(&self) -> IntPoly {
        let d = self.c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let dq = zq(&d);
        IntPoly::new(self.c.iter().map(|x| (x * &dq).to_integer()).collect()).primitive()
    }

    /// Integer polynomial if all coefficients are integral.
    pub fn to_int(&self) -> Option<IntPoly> {
        if self.c.iter().all(|x| x.is_integer()) {
            Some(IntPoly::new(self.c.iter().map(|x| x.to_integer()).collect()))
        } else {
            None
        }
    }

    /// Evaluate at a square matrix.
    pub fn eval_matrix(&self, m: &QMatrix) -> QMatrix {
        let n = m.rows();
        let mut acc = QMatrix::zeros(n, n);
        for c in self.c.iter().rev() {
            acc = &acc * m;
            for i in 0..n {
                acc[(i, i)] += c;
            }
        }
        acc
    }
}

pub fn qgcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r.to_primitive_int().to_q();
    }
    a.monic()
}

fn sturm_sequence(f: &QPoly) -> Vec<QPoly> {
    let mut seq = vec![f.clone(), f.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        // keep the sign while shrinking coefficients
        let prim = r.to_primitive_int().to_q();
        let s = if (prim.lead() > Q::zero()) == (r.lead() > Q::zero()) { Q::one() } else { -Q::one() };
        seq.push(prim.scale(&(-s)));
    }
    seq
}

fn sign_changes_at(seq: &[QPoly], x: &Q) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_zero() {
            0
        } else if v > Q::zero() {
            1
        } else {
            -1
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

fn cauchy_bound(f: &QPoly) -> Q {
    let l = f.lead().abs();
    let m = f.c.iter().take(f.c.len().saturating_sub(1)).map(|c| c.abs() / &l).max().unwrap_or_else(Q::zero);
    // strict upper bound, nudged off any root
    Q::one() + m + Q::new(BigInt::one(), BigInt::from(7919))
}

/// Disjoint rational intervals `(lo, hi]` each containing exactly one real
/// root of the squarefree polynomial `f`.
pub fn isolate_real_roots(f: &QPoly) -> Vec<(Q, Q)> {
    if f.degree() < 1 {
        return Vec::new();
    }
    let seq = sturm_sequence(f);
    let b = cauchy_bound(f);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = sign_changes_at(&seq, &lo) - sign_changes_at(&seq, &hi);
        match n {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) / Q::from_integer(BigInt::from(2));
                stack.push((mid.clone(), hi));
                stack.push((lo, mid));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn refine_root(f: &QPoly, lo: Q, hi: Q) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    let two = Q::from_integer(BigInt::from(2));
    let hi_sign = f.eval(&hi) > Q::zero();
    if f.eval(&hi).is_zero() {
        return hi.to_f64().unwrap();
    }
    for _ in 0..64 {
        let mid = (&lo + &hi) / &two;
        let v = f.eval(&mid);
        if v.is_zero() {
            return mid.to_f64().unwrap();
        }
        if (v > Q::zero()) == hi_sign {
            hi = mid;
        } else {
            lo = mid;
        }
        // keep rationals small
        let s = Q::from_integer(BigInt::one() << 80u32);
        lo = (&lo * &s).floor() / &s;
        hi = (&hi * &s).ceil() / &s;
    }
    ((lo + hi) / two).to_f64().unwrap()
}

/// Primes descending from `start`, used for multimodular computations.
pub fn modular_primes(start: u64) -> impl Iterator<Item = u64> {
    let mut n = start | 1;
    std::iter::from_fn(move || loop {
        n -= 2;
        if is_prime(n) {
            return Some(n);
        }
    })
}

fn char_poly_mod_p(m: &ZMatrix, p: u64) -> Vec<u64> {
    let n = m.rows();
    let bp = BigInt::from(p);
    let mut h: Vec<Vec<u64>> =
        (0..n).map(|i| (0..n).map(|j| m[(i, j)].mod_floor(&bp).to_u64().unwrap()).collect()).collect();
    // Hessenberg reduction
    for mm in 1..n.saturating_sub(1) {
        let Some(i0) = (mm..n).find(|&i| h[i][mm - 1] != 0) else {
            continue;
        };
        if i0 != mm {
            h.swap(i0, mm);
            for row in h.iter_mut() {
                row.swap(i0, mm);
            }
        }
        let t = modp::inv(h[mm][mm - 1], p);
        for i in mm + 1..n {
            let u = mul_mod(h[i][mm - 1], t, p);
            if u == 0 {
                continue;
            }
            for j in 0..n {
                let s = mul_mod(u, h[mm][j], p);
                h[i][j] = modp::sub_mod(h[i][j], s, p);
            }
            for row in h.iter_mut() {
                let s = mul_mod(u, row[i], p);
                row[mm] = modp::add_mod(row[mm], s, p);
            }
        }
    }
    // polys[k] = char poly of leading k×k block, ascending coefficients
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for k in 1..=n {
        let prev = &polys[k - 1];
        let mut next = vec![0u64; k + 1];
        let d = h[k - 1][k - 1];
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] = modp::add_mod(next[i + 1], c, p);
            next[i] = modp::sub_mod(next[i], mul_mod(d, c, p), p);
        }
        let mut t = 1u64;
        for i in 1..k {
            t = mul_mod(t, h[k - i][k - i - 1], p);
            let coef = mul_mod(t, h[k - i - 1][k - 1], p);
            if coef == 0 {
                continue;
            }
            for (j, &c) in polys[k - i - 1].iter().enumerate() {
                next[j] = modp::sub_mod(next[j], mul_mod(coef, c, p), p);
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

/// Characteristic polynomial `det(x I - m)` of an integer matrix, by
/// Hessenberg reduction modulo several primes and Chinese remaindering.
pub fn char_poly_z(m: &ZMatrix) -> IntPoly {
    assert!(m.is_square());
    let n = m.rows();
    if n == 0 {
        return IntPoly::one();
    }
    let rho = (0..n).map(|i| m.row(i).iter().fold(BigInt::zero(), |a, x| a + x.abs())).max().unwrap();
    let bound = (rho + 1u32).pow(n as u32) * 2u32;
    let mut modulus = BigInt::one();
    let mut acc = vec![BigInt::zero(); n + 1];
    for p in modular_primes(1 << 62) {
        let cp = char_poly_mod_p(m, p);
        let bp = BigInt::from(p);
        let inv = {
            let (g, x, _) = ext_gcd_big(&modulus.mod_floor(&bp), &bp);
            debug_assert!(g.is_one());
            x
        };
        for (a, &c) in acc.iter_mut().zip(&cp) {
            // a' ≡ a mod modulus, a' ≡ c mod p
            let diff = (BigInt::from(c) - &*a).mod_floor(&bp);
            let t = (diff * &inv).mod_floor(&bp);
            *a += &modulus * t;
        }
        modulus *= &bp;
        if modulus > bound {
            break;
        }
    }
    let half = &modulus / 2;
    IntPoly::new(acc.into_iter().map(|a| if a > half { a - &modulus } else { a }).collect())
}

fn ext_gcd_big(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Characteristic polynomial of a rational matrix, as a monic rational
/// polynomial.
pub fn char_poly(m: &QMatrix) -> QPoly {
    let n = m.rows();
    let (mz, d) = m.clear_denominators();
    let cp = char_poly_z(&mz);
    // chi_m(x) = d^{-n} chi_M(d x)
    let dq = zq(&d);
    let mut c = Vec::with_capacity(n + 1);
    let mut pow = Q::one();
    let scale = {
        let mut s = Q::one();
        for _ in 0..n {
            s *= &dq;
        }
        s.recip()
    };
    for k in 0..=n {
        c.push(zq(&cp.coeff(k)) * &pow * &scale);
        pow *= &dq;
    }
    QPoly::new(c)
}

/// Characteristic polynomial of an integral-valued rational matrix whose
/// eigenvalues are algebraic integers; the result is then integral.
pub fn char_poly_int(m: &QMatrix) -> IntPoly {
    char_poly(m).to_int().expect("characteristic polynomial is not integral")
}

fn sort_factors(v: &mut [(IntPoly, u32)]) {
    v.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.coeffs.cmp(&b.0.coeffs)).then(a.1.cmp(&b.1)));
}

/// Squarefree decomposition of a primitive polynomial (Yun):
/// returns `(g_i, i)` with `f = prod g_i^i`.
pub fn squarefree_decomposition(f: &IntPoly) -> Vec<(IntPoly, u32)> {
    if f.degree() <= 0 {
        return Vec::new();
    }
    if f.is_squarefree() {
        return vec![(f.primitive(), 1)];
    }
    let fq = f.to_q();
    let df = fq.derivative();
    let mut a = qgcd(&fq, &df);
    let mut b = fq.div_rem(&a).0;
    let mut c = df.div_rem(&a).0;
    let mut d = c.sub(&b.derivative());
    let mut out = Vec::new();
    let mut i = 1;
    loop {
        a = qgcd(&b, &d);
        if a.degree() > 0 {
            out.push((a.to_primitive_int(), i));
        }
        b = b.div_rem(&a).0;
        if b.degree() <= 0 {
            break;
        }
        c = d.div_rem(&a).0;
        d = c.sub(&b.derivative());
        i += 1;
    }
    out
}

fn subset_sums(degs: &[usize], n: usize) -> Vec<bool> {
    let mut s = vec![false; n + 1];
    s[0] = true;
    for &d in degs {
        for k in (d..=n).rev() {
            if s[k - d] {
                s[k] = true;
            }
        }
    }
    s
}

/// Factor patterns modulo small good primes. Returns the candidate factor
/// degrees (intersected subset sums) and the prime with fewest factors.
fn modular_patterns(f: &IntPoly, tries: usize) -> (Vec<bool>, u64, Vec<PolyP>) {
    let n = f.degree() as usize;
    let mut allowed = vec![true; n + 1];
    let mut best: Option<(u64, Vec<PolyP>)> = None;
    let mut used = 0;
    for p in super::int::primes_up_to(100_000).into_iter().skip(1) {
        if used == tries {
            break;
        }
        let fp = f.mod_p(p);
        if fp.degree() != n as isize {
            continue;
        }
        if fp.gcd(&fp.derivative(p), p).degree() > 0 {
            continue;
        }
        used += 1;
        let fs = modp::factor_squarefree(&fp, p);
        let degs: Vec<usize> = fs.iter().map(|g| g.degree() as usize).collect();
        let ss = subset_sums(&degs, n);
        for k in 0..=n {
            allowed[k] &= ss[k];
        }
        if best.as_ref().map_or(true, |(_, b)| fs.len() < b.len()) {
            best = Some((p, fs));
        }
        if fs_is_irreducible(&allowed, n) {
            break;
        }
    }
    let (p, fs) = best.expect("no good prime found");
    (allowed, p, fs)
}

fn fs_is_irreducible(allowed: &[bool], n: usize) -> bool {
    (1..n).all(|k| !allowed[k])
}

/// Irreducibility over Q of a squarefree primitive polynomial, certified by
/// modular degree patterns with an exact factorization fallback.
pub fn is_irreducible(f: &IntPoly) -> bool {
    let f = f.primitive();
    if f.degree() <= 1 {
        return f.degree() == 1;
    }
    if !f.is_squarefree() {
        return false;
    }
    let (allowed, _, _) = modular_patterns(&f, 8);
    if fs_is_irreducible(&allowed, f.degree() as usize) {
        return true;
    }
    factor_squarefree_z(&f).len() == 1
}

fn poly_mod(c: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    c.iter().map(|x| x.mod_floor(m)).collect()
}

fn to_big(p: &PolyP) -> IntPoly {
    IntPoly::new(p.c.iter().map(|&x| BigInt::from(x)).collect())
}

fn from_big_mod(f: &IntPoly, p: u64) -> PolyP {
    f.mod_p(p)
}

/// Lift `f ≡ g h (mod p)` with `g` monic to `f ≡ G H (mod p^k)`.
fn hensel_pair(f: &IntPoly, g: &PolyP, h: &PolyP, p: u64, k: u32) -> (IntPoly, IntPoly) {
    let (one, s, t) = g.ext_gcd(h, p);
    debug_assert_eq!(one, PolyP::one());
    let bp = BigInt::from(p);
    let mut gg = to_big(g);
    let mut hh = to_big(h);
    let mut pk = bp.clone();
    for _ in 1..k {
        let next = &pk * &bp;
        let e = f.sub(&gg.mul(&hh));
        let e = IntPoly::new(poly_mod(e.coeffs(), &next));
        let e = IntPoly::new(e.coeffs().iter().map(|c| c / &pk).collect());
        let ep = from_big_mod(&e, p);
        let (qq, dg) = t.mul(&ep, p).div_rem(g, p);
        let dh = s.mul(&ep, p).add(&h.mul(&qq, p), p);
        gg = gg.add(&to_big(&dg).scale(&pk));
        hh = hh.add(&to_big(&dh).scale(&pk));
        gg = IntPoly::new(poly_mod(gg.coeffs(), &next));
        hh = IntPoly::new(poly_mod(hh.coeffs(), &next));
        pk = next;
    }
    (gg, hh)
}

fn symmetric(f: &IntPoly, m: &BigInt) -> IntPoly {
    let half = m / 2;
    IntPoly::new(
        f.coeffs()
            .iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

/// Factor a squarefree primitive polynomial with positive leading
/// coefficient into irreducibles (Zassenhaus).
fn factor_squarefree_z(f: &IntPoly) -> Vec<IntPoly> {
    let n = f.degree() as usize;
    if n <= 1 {
        return vec![f.clone()];
    }
    let (allowed, p, modfac) = modular_patterns(f, 8);
    if fs_is_irreducible(&allowed, n) || modfac.len() == 1 {
        return vec![f.clone()];
    }
    let lc = f.lead();
    let bound = f.l2_bound() * (BigInt::one() << n) * lc.abs() * 2u32;
    let bp = BigInt::from(p);
    let mut k = 1u32;
    let mut pk = bp.clone();
    while pk <= bound {
        pk *= &bp;
        k += 1;
    }
    // monic F ≡ lc^{-1} f (mod p^k)
    let lc_inv = {
        let e = lc.mod_floor(&pk).extended_gcd(&pk);
        e.x.mod_floor(&pk)
    };
    let monic_f = IntPoly::new(poly_mod(f.scale(&lc_inv).coeffs(), &pk));
    let mut lifted = Vec::new();
    let mut rest = monic_f;
    for i in 0..modfac.len() - 1 {
        let g = &modfac[i];
        let h = modfac[i + 1..].iter().fold(PolyP::one(), |a, b| a.mul(b, p));
        let (gg, hh) = hensel_pair(&rest, g, &h, p, k);
        lifted.push(gg);
        rest = hh;
    }
    lifted.push(rest);

    let mut remaining: Vec<usize> = (0..lifted.len()).collect();
    let mut fcur = f.clone();
    let mut out = Vec::new();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut found = false;
        for combo in combinations(remaining.len(), size) {
            let idx: Vec<usize> = combo.iter().map(|&c| remaining[c]).collect();
            let deg: usize = idx.iter().map(|&i| lifted[i].degree() as usize).sum();
            if deg >= allowed.len() || !allowed[deg] {
                continue;
            }
            let lcc = fcur.lead();
            let prod = idx
                .iter()
                .fold(IntPoly::new(vec![lcc.clone()]), |a, &i| IntPoly::new(poly_mod(a.mul(&lifted[i]).coeffs(), &pk)));
            let cand = symmetric(&prod, &pk).primitive();
            if let Some(q) = fcur.div_exact(&cand) {
                out.push(cand);
                fcur = q.primitive();
                remaining.retain(|r| !idx.contains(r));
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    if fcur.degree() > 0 {
        out.push(fcur.primitive());
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Factor a nonzero integer polynomial into irreducibles over Q with
/// multiplicities, sorted by degree and then by coefficients from the
/// constant term upward. The content and
/// sign are dropped: the product of factors equals `±f / content(f)`.
pub fn factor_int_poly(f: &IntPoly) -> Vec<(IntPoly, u32)> {
    assert!(!f.is_zero(), "cannot factor the zero polynomial");
    let f = f.primitive();
    let mut out = Vec::new();
    for (g, e) in squarefree_decomposition(&f) {
        // pull out powers of x first
        let mut g = g;
        if g.coeff(0).is_zero() {
            let shift = g.coeffs().iter().position(|c| !c.is_zero()).unwrap();
            out.push((IntPoly::x(), e * shift as u32));
            g = IntPoly::new(g.coeffs()[shift..].to_vec());
        }
        if g.degree() >= 1 {
            for h in factor_squarefree_z(&g) {
                out.push((h, e));
            }
        }
    }
    // merge identical factors
    sort_factors(&mut out);
    let mut merged: Vec<(IntPoly, u32)> = Vec::new();
    for (g, e) in out {
        if let Some(last) = merged.last_mut() {
            if last.0 == g {
                last.1 += e;
                continue;
            }
        }
        merged.push((g, e));
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn factor_small_cases() {
        assert_eq!(factor_int_poly(&p(&[-1, 0, 1])), vec![(p(&[-1, 1]), 1), (p(&[1, 1]), 1)]);
        assert_eq!(factor_int_poly(&p(&[-5, 0, 1])), vec![(p(&[-5, 0, 1]), 1)]);
        assert_eq!(factor_int_poly(&p(&[6, 0, -5, 0, 1])), vec![(p(&[-3, 0, 1]), 1), (p(&[-2, 0, 1]), 1)]);
    }

    #[test]
    fn factor_with_multiplicity() {
        let f = p(&[-1, 1]).pow(3).mul(&p(&[1, 0, 1]).pow(2)).mul(&p(&[0, 1]));
        let fs = factor_int_poly(&f);
        assert_eq!(fs, vec![(p(&[-1, 1]), 3), (p(&[0, 1]), 1), (p(&[1, 0, 1]), 2)]);
    }

    #[test]
    fn swinnerton_dyer_like() {
        // (x^2-2)(x^2-3) is reducible but splits mod every prime; x^4-10x^2+1 is irreducible
        let f = p(&[1, 0, -10, 0, 1]);
        assert!(is_irreducible(&f));
        assert_eq!(factor_int_poly(&f).len(), 1);
    }

    #[test]
    fn char_poly_companion() {
        let m = ZMatrix::from_i64(&[vec![0, 0, -1], vec![1, 0, 3], vec![0, 1, 1]]);
        assert_eq!(char_poly_z(&m), p(&[1, -3, -1, 1]));
    }

    #[test]
    fn real_roots_quadratic() {
        let r = p(&[-5, 0, 1]).real_roots();
        assert_eq!(r.len(), 2);
        assert!((r[1] - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn discriminant_cubic() {
        assert_eq!(p(&[1, -3, -1, 1]).discriminant(), BigInt::from(148));
    }
}

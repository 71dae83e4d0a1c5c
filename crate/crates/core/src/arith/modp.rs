//! Arithmetic over prime fields: dense linear algebra and univariate
//! polynomials with coefficients in `0..p`.

use super::int::{mul_mod, pow_mod};

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub fn inv(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "no inverse of 0 mod {p}");
    pow_mod(a, p - 2, p)
}

pub fn reduce_i64(a: i64, p: u64) -> u64 {
    a.rem_euclid(p as i64) as u64
}

pub fn reduce_i128(a: i128, p: u64) -> u64 {
    a.rem_euclid(p as i128) as u64
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<u64>], p: u64) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| m[i][c] % p != 0) else {
            continue;
        };
        m.swap(r, piv);
        let s = inv(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = mul_mod(*x, s, p);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    let t = mul_mod(f, m[r][j], p);
                    m[i][j] = sub_mod(m[i][j], t, p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the right kernel `{x : m x = 0}` over F_p.
pub fn kernel(m: &[Vec<u64>], cols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut a: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let piv = rref(&mut a, p);
    let mut out = Vec::new();
    for f in (0..cols).filter(|c| !piv.contains(c)) {
        let mut v = vec![0u64; cols];
        v[f] = 1;
        for (r, &pc) in piv.iter().enumerate() {
            v[pc] = (p - a[r][f]) % p;
        }
        out.push(v);
    }
    out
}

/// Basis of the left kernel `{x : x m = 0}` over F_p.
pub fn left_kernel(m: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let t: Vec<Vec<u64>> = (0..cols).map(|j| (0..rows).map(|i| m[i][j]).collect()).collect();
    kernel(&t, rows, p)
}

pub fn rank(m: &[Vec<u64>], p: u64) -> usize {
    let mut a = m.to_vec();
    rref(&mut a, p).len()
}

/// Polynomials over F_p, ascending coefficients, trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyP {
    pub c: Vec<u64>,
}

impl PolyP {
    pub fn new(mut c: Vec<u64>, p: u64) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        PolyP { c }
    }

    pub fn zero() -> Self {
        PolyP { c: Vec::new() }
    }

    pub fn one() -> Self {
        PolyP { c: vec![1] }
    }

    pub fn x() -> Self {
        PolyP { c: vec![0, 1] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn lead(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    fn trim(mut self) -> Self {
        while self.c.last() == Some(&0) {
            self.c.pop();
        }
        self
    }

    pub fn add(&self, o: &Self, p: u64) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| add_mod(*self.c.get(i).unwrap_or(&0), *o.c.get(i).unwrap_or(&0), p)).collect();
        PolyP { c }.trim()
    }

    pub fn sub(&self, o: &Self, p: u64) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| sub_mod(*self.c.get(i).unwrap_or(&0), *o.c.get(i).unwrap_or(&0), p)).collect();
        PolyP { c }.trim()
    }

    pub fn mul(&self, o: &Self, p: u64) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut acc = vec![0u128; self.c.len() + o.c.len() - 1];
        let pp = p as u128;
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                let t = &mut acc[i + j];
                *t = (*t + a as u128 * b as u128) % pp;
            }
        }
        PolyP { c: acc.into_iter().map(|x| x as u64).collect() }.trim()
    }

    pub fn scale(&self, s: u64, p: u64) -> Self {
        PolyP { c: self.c.iter().map(|&x| mul_mod(x, s, p)).collect() }.trim()
    }

    pub fn monic(&self, p: u64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv(self.lead(), p), p)
    }

    pub fn div_rem(&self, d: &Self, p: u64) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        if self.c.len() < d.c.len() {
            return (Self::zero(), self.clone());
        }
        let mut r = self.c.clone();
        let dl = d.c.len();
        let li = inv(d.lead(), p);
        let mut q = vec![0u64; r.len() - dl + 1];
        for k in (0..q.len()).rev() {
            let coef = mul_mod(r[k + dl - 1], li, p);
            q[k] = coef;
            if coef == 0 {
                continue;
            }
            for (j, &dj) in d.c.iter().enumerate() {
                let t = mul_mod(coef, dj, p);
                r[k + j] = sub_mod(r[k + j], t, p);
            }
        }
        r.truncate(dl - 1);
        (PolyP { c: q }.trim(), PolyP { c: r }.trim())
    }

    pub fn rem(&self, d: &Self, p: u64) -> Self {
        self.div_rem(d, p).1
    }

    pub fn gcd(&self, o: &Self, p: u64) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, p);
            a = b;
            b = r;
        }
        a.monic(p)
    }

    /// Extended gcd: returns `(g, s, t)` with `s a + t b = g` monic.
    pub fn ext_gcd(&self, o: &Self, p: u64) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1, p);
            let s2 = s0.sub(&q.mul(&s1, p), p);
            let t2 = t0.sub(&q.mul(&t1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        let l = inv(r0.lead(), p);
        (r0.scale(l, p), s0.scale(l, p), t0.scale(l, p))
    }

    pub fn derivative(&self, p: u64) -> Self {
        let c = self.c.iter().enumerate().skip(1).map(|(i, &x)| mul_mod(x, i as u64 % p, p)).collect();
        PolyP { c }.trim()
    }

    pub fn pow_mod(&self, mut e: u128, m: &Self, p: u64) -> Self {
        let mut base = self.rem(m, p);
        let mut acc = Self::one().rem(m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, p).rem(m, p);
            }
            base = base.mul(&base, p).rem(m, p);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: u64, p: u64) -> u64 {
        self.c.iter().rev().fold(0, |acc, &c| add_mod(mul_mod(acc, x, p), c, p))
    }
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// returns `(product of irreducible factors of degree d, d)`.
pub fn distinct_degree(f: &PolyP, p: u64) -> Vec<(PolyP, usize)> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let x = PolyP::x();
    let mut h = x.clone();
    let mut d = 0;
    while f.degree() >= 2 * (d as isize + 1) {
        d += 1;
        h = h.pow_mod(p as u128, &f, p);
        let g = h.sub(&x, p).gcd(&f, p);
        if g.degree() > 0 {
            out.push((g.clone(), d));
            f = f.div_rem(&g, p).0;
            h = h.rem(&f, p);
        }
    }
    if f.degree() > 0 {
        let deg = f.degree() as usize;
        out.push((f, deg));
    }
    out
}

/// Equal-degree splitting (Cantor–Zassenhaus) for odd `p`, deterministic
/// given the seed.
pub fn equal_degree(f: &PolyP, d: usize, p: u64, seed: &mut u64) -> Vec<PolyP> {
    let n = f.degree() as usize;
    if n == d {
        return vec![f.monic(p)];
    }
    assert!(p > 2, "equal-degree splitting needs odd p");
    loop {
        let mut c = Vec::with_capacity(n);
        for _ in 0..n {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            c.push((*seed >> 17) % p);
        }
        let a = PolyP::new(c, p);
        if a.degree() < 1 {
            continue;
        }
        // a^((p^d - 1)/2) = (a^(1 + p + ... + p^(d-1)))^((p-1)/2)
        let mut frob = a.rem(f, p);
        let mut norm = frob.clone();
        for _ in 1..d {
            frob = frob.pow_mod(p as u128, f, p);
            norm = norm.mul(&frob, p).rem(f, p);
        }
        let b = norm.pow_mod(((p - 1) / 2) as u128, f, p).sub(&PolyP::one(), p);
        let g = b.gcd(f, p);
        if g.degree() > 0 && g.degree() < f.degree() {
            let h = f.div_rem(&g, p).0;
            let mut out = equal_degree(&g, d, p, seed);
            out.extend(equal_degree(&h.monic(p), d, p, seed));
            return out;
        }
    }
}

/// Full factorization of a monic squarefree polynomial into monic
/// irreducibles, sorted.
pub fn factor_squarefree(f: &PolyP, p: u64) -> Vec<PolyP> {
    let mut seed = 0x9e3779b97f4a7c15u64 ^ p;
    let mut out = Vec::new();
    for (g, d) in distinct_degree(&f.monic(p), p) {
        out.extend(equal_degree(&g, d, p, &mut seed));
    }
    out.sort_by(|a, b| a.c.len().cmp(&b.c.len()).then_with(|| a.c.cmp(&b.c)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_small() {
        let p = 7;
        // (x-1)(x-2)(x^2+1) mod 7, x^2+1 irreducible since 7 ≡ 3 mod 4
        let f = PolyP::new(vec![6, 1], p).mul(&PolyP::new(vec![5, 1], p), p).mul(&PolyP::new(vec![1, 0, 1], p), p);
        let fs = factor_squarefree(&f, p);
        assert_eq!(fs.len(), 3);
        let prod = fs.iter().fold(PolyP::one(), |a, b| a.mul(b, p));
        assert_eq!(prod, f);
    }

    #[test]
    fn kernel_mod_p() {
        let m = vec![vec![1, 2, 3], vec![2, 4, 6]];
        let k = kernel(&m, 3, 5);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: u64 = (0..3).map(|j| m[0][j] * v[j]).sum();
            assert_eq!(s % 5, 0);
        }
    }
}

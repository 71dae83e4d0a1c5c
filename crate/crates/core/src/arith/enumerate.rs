//! Fincke–Pohst enumeration of lattice vectors of bounded norm.
//!
//! Forms are integer matrices `A` with a declared denominator `den`, so that
//! `Q(v) = vᵀ A v / den` takes integer values. Bounds come from a
//! floating-point Cholesky factorisation; every reported vector's norm is
//! recomputed exactly.

use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::lll::ZLattice;
use super::matrix::{zq, QMatrix};
use crate::error::{Error, Result};

/// Integer-valued positive definite quadratic form `vᵀ A v / den`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntForm {
    pub n: usize,
    pub a: Vec<i64>,
    pub den: i64,
}

impl IntForm {
    pub fn new(n: usize, a: Vec<i64>, den: i64) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let f = IntForm { n, a, den };
        for i in 0..n {
            for j in 0..n {
                if f.at(i, j) != f.at(j, i) {
                    return Err(Error::Domain("form matrix is not symmetric".into()));
                }
            }
            if f.at(i, i) % den != 0 {
                return Err(Error::Domain("form is not integer valued".into()));
            }
            for j in 0..i {
                if (2 * f.at(i, j)) % den != 0 {
                    return Err(Error::Domain("form is not integer valued".into()));
                }
            }
        }
        if cholesky(&f).is_none() {
            return Err(Error::Domain("form is not positive definite".into()));
        }
        Ok(f)
    }

    /// From a rational Gram matrix and a declared denominator.
    pub fn from_gram(gram: &QMatrix, den: i64) -> Result<Self> {
        let n = gram.rows();
        let d = zq(&den.into());
        let mut a = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let v = &gram[(i, j)] * &d;
                if !v.is_integer() {
                    return Err(Error::Domain("denominator does not clear the Gram matrix".into()));
                }
                a.push(v.to_integer().to_i64().ok_or_else(|| Error::Domain("Gram entry too large".into()))?);
            }
        }
        Self::new(n, a, den)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> i64 {
        self.a[i * self.n + j]
    }

    /// Exact value `Q(v)` (not divided by anything but `den`).
    pub fn eval(&self, v: &[i64]) -> i128 {
        let mut s = 0i128;
        for i in 0..self.n {
            if v[i] == 0 {
                continue;
            }
            let mut r = 0i128;
            for j in 0..self.n {
                r += self.at(i, j) as i128 * v[j] as i128;
            }
            s += r * v[i] as i128;
        }
        s / self.den as i128
    }

    pub fn det_num(&self) -> i128 {
        let m = QMatrix::from_fn(self.n, self.n, |i, j| zq(&self.at(i, j).into()));
        m.det().to_integer().to_i128().unwrap()
    }

    /// LLL-reduced equivalent form and the unimodular transform `U`
    /// (rows: new basis vectors in old coordinates).
    pub fn lll(&self) -> (IntForm, Vec<Vec<i64>>) {
        lll_int(self)
    }
}

/// Cholesky-style decomposition `Q(x) = Σ q_ii (x_i + Σ_{j>i} q_ij x_j)^2`.
fn cholesky(f: &IntForm) -> Option<Vec<Vec<f64>>> {
    let n = f.n;
    let mut q = vec![vec![0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            q[i][j] = f.at(i, j) as f64 / f.den as f64;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
        if q[i][i] <= 0.0 {
            return None;
        }
    }
    Some(q)
}

/// Integer LLL on the Gram matrix with floating Gram–Schmidt and exact
/// integer updates.
fn lll_int(f: &IntForm) -> (IntForm, Vec<Vec<i64>>) {
    let n = f.n;
    let mut g: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| f.at(i, j) as i128).collect()).collect();
    let u = lll_gram(&mut g);
    let a = g.iter().flat_map(|r| r.iter().map(|&x| x as i64)).collect();
    (IntForm { n, a, den: f.den }, u)
}

/// LLL-reduces an integer Gram matrix in place (delta 0.99) and returns the
/// unimodular transform `U` with `G_new = U G_old Uᵀ`.
pub fn lll_gram(g: &mut [Vec<i128>]) -> Vec<Vec<i64>> {
    let n = g.len();
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let gso = |g: &[Vec<i128>]| {
        let mut mu = vec![vec![0f64; n]; n];
        let mut b = vec![0f64; n];
        for i in 0..n {
            for j in 0..i {
                let mut s = g[i][j] as f64;
                for k in 0..j {
                    s -= mu[j][k] * mu[i][k] * b[k];
                }
                mu[i][j] = s / b[j];
            }
            let mut s = g[i][i] as f64;
            for k in 0..i {
                s -= mu[i][k] * mu[i][k] * b[k];
            }
            b[i] = s;
        }
        (mu, b)
    };
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (mu, _) = gso(g);
            let r = mu[k][j].round();
            if r != 0.0 && mu[k][j].abs() > 0.5 + 1e-9 {
                let r = r as i128;
                // b_k -= r b_j
                let gkj = g[k][j];
                let gjj = g[j][j];
                let nkk = g[k][k] - 2 * r * gkj + r * r * gjj;
                for i in 0..n {
                    if i != k {
                        let v = g[k][i] - r * g[j][i];
                        g[k][i] = v;
                        g[i][k] = v;
                    }
                }
                g[k][k] = nkk;
                for c in 0..n {
                    u[k][c] -= (r as i64) * u[j][c];
                }
            }
        }
        let (mu, b) = gso(g);
        if b[k] >= (0.99 - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] {
            k += 1;
        } else {
            g.swap(k, k - 1);
            for row in g.iter_mut() {
                row.swap(k, k - 1);
            }
            u.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    u
}

/// Calls `visit(v, Q(v))` for every vector with `Q(v) <= bound`, including
/// the zero vector, in the coordinates of the given form.
pub fn for_each_vector<F: FnMut(&[i64], u64)>(f: &IntForm, bound: u64, mut visit: F) {
    let (red, u) = lll_int(f);
    let n = f.n;
    let mut orig = vec![0i64; n];
    enumerate_core(&red, bound, None, |x, norm| {
        for c in 0..n {
            orig[c] = (0..n).map(|i| x[i] * u[i][c]).sum();
        }
        visit(&orig, norm);
    });
}

/// Core recursive enumeration on an already reduced form. If `top` is given,
/// only vectors whose last coordinate lies in that range are visited.
fn enumerate_core<F: FnMut(&[i64], u64)>(f: &IntForm, bound: u64, top: Option<(i64, i64)>, mut visit: F) {
    let n = f.n;
    let q = cholesky(f).expect("form is not positive definite");
    let b = bound as f64 * (1.0 + 1e-9) + 1e-6;
    let mut x = vec![0i64; n];
    let mut rem = vec![0f64; n + 1];
    let mut hi = vec![0i64; n];
    let mut center = vec![0f64; n];
    rem[n] = b;
    let den = f.den as i128;
    let limit = bound as i128 * den;

    // level i: choose x_i given x_{i+1..}
    let set_range = |i: usize, x: &[i64], rem: &[f64], center: &mut [f64]| -> (i64, i64) {
        let mut c = 0f64;
        for j in i + 1..n {
            c -= q[i][j] * x[j] as f64;
        }
        center[i] = c;
        let t = (rem[i + 1] / q[i][i]).max(0.0).sqrt();
        ((c - t).ceil() as i64 - 1, (c + t).floor() as i64 + 1)
    };

    if n == 0 {
        visit(&x, 0);
        return;
    }
    let mut i = n - 1;
    let (mut lo_top, mut hi_top) = set_range(i, &x, &rem, &mut center);
    if let Some((a, bb)) = top {
        lo_top = lo_top.max(a);
        hi_top = hi_top.min(bb);
    }
    if lo_top > hi_top {
        return;
    }
    x[i] = lo_top;
    hi[i] = hi_top;
    loop {
        if x[i] > hi[i] {
            if i == n - 1 {
                break;
            }
            i += 1;
            x[i] += 1;
            continue;
        }
        if i > 0 {
            let d = x[i] as f64 - center[i];
            let r = rem[i + 1] - q[i][i] * d * d;
            if r < 0.0 {
                x[i] += 1;
                continue;
            }
            rem[i] = r;
        } else {
            // innermost coordinate: exact quadratic in x_0
            let mut s = 0i128;
            let mut rest = 0i128;
            for j in 1..n {
                s += f.at(0, j) as i128 * x[j] as i128;
                for k in 1..n {
                    rest += f.at(j, k) as i128 * x[j] as i128 * x[k] as i128;
                }
            }
            let a00 = f.at(0, 0) as i128;
            let lo0 = x[0];
            let hi0 = hi[0];
            let mut v = a00 * (lo0 as i128) * (lo0 as i128) + 2 * s * lo0 as i128 + rest;
            let mut x0 = lo0;
            while x0 <= hi0 {
                if v <= limit {
                    x[0] = x0;
                    visit(&x, (v / den) as u64);
                }
                // Q(x0+1) - Q(x0) = a00 (2 x0 + 1) + 2 s
                v += a00 * (2 * x0 as i128 + 1) + 2 * s;
                x0 += 1;
            }
            x[0] = hi0 + 1;
            continue;
        }
        i -= 1;
        let (lo, h) = set_range(i, &x, &rem, &mut center);
        x[i] = lo;
        hi[i] = h;
    }
}

fn top_range(f: &IntForm, bound: u64) -> (i64, i64) {
    let q = cholesky(f).unwrap();
    let n = f.n;
    let t = (bound as f64 * (1.0 + 1e-9) / q[n - 1][n - 1]).sqrt();
    (-(t.floor() as i64) - 1, t.floor() as i64 + 1)
}

/// Representation numbers `r(m) = #{v : Q(v) = m}` for `0 <= m <= bound`.
pub fn theta_series(f: &IntForm, bound: u64) -> Vec<u64> {
    theta_series_partitioned(f, bound, 1)
}

/// As [`theta_series`], splitting the last coordinate into `parts` disjoint
/// ranges processed in parallel; partial histograms are summed in order.
pub fn theta_series_partitioned(f: &IntForm, bound: u64, parts: usize) -> Vec<u64> {
    let (red, _) = lll_int(f);
    let n = red.n;
    if n == 0 {
        let mut r = vec![0u64; bound as usize + 1];
        r[0] = 1;
        return r;
    }
    let (lo, hi) = top_range(&red, bound);
    let ranges = split_range(lo, hi, parts.max(1));
    let partials: Vec<Vec<u64>> = ranges.par_iter().map(|&(a, b)| partial_histogram(&red, bound, a, b)).collect();
    let mut out = vec![0u64; bound as usize + 1];
    for p in partials {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    out
}

/// Histogram for vectors whose last reduced coordinate lies in `[a, b]`.
/// Counts are kept in 32 bits and promoted to 64 bits on overflow.
pub fn partial_histogram(red: &IntForm, bound: u64, a: i64, b: i64) -> Vec<u64> {
    let mut small = vec![0u32; bound as usize + 1];
    let mut overflow = false;
    enumerate_core(red, bound, Some((a, b)), |_, m| {
        let c = &mut small[m as usize];
        match c.checked_add(1) {
            Some(v) => *c = v,
            None => overflow = true,
        }
    });
    if !overflow {
        return small.into_iter().map(u64::from).collect();
    }
    let mut big = vec![0u64; bound as usize + 1];
    enumerate_core(red, bound, Some((a, b)), |_, m| big[m as usize] += 1);
    big
}

/// Splits `[lo, hi]` into at most `parts` contiguous ranges.
pub fn split_range(lo: i64, hi: i64, parts: usize) -> Vec<(i64, i64)> {
    let len = (hi - lo + 1).max(0) as usize;
    let parts = parts.min(len.max(1));
    let mut out = Vec::with_capacity(parts);
    let mut start = lo;
    for k in 0..parts {
        let size = len / parts + usize::from(k < len % parts);
        let end = start + size as i64 - 1;
        out.push((start, end));
        start = end + 1;
    }
    out
}

/// Histogram of norms on a lattice with a declared denominator.
pub fn enumerate_by_norm(l: &ZLattice, den: i64, bound: u64) -> Result<Vec<u64>> {
    let f = IntForm::from_gram(&l.gram, den)?;
    Ok(theta_series(&f, bound))
}

/// Visits each vector (in the lattice's own coordinates) with its norm.
pub fn enumerate_by_norm_with<F: FnMut(&[i64], u64)>(l: &ZLattice, den: i64, bound: u64, visit: F) -> Result<()> {
    let f = IntForm::from_gram(&l.gram, den)?;
    for_each_vector(&f, bound, visit);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_lattice() {
        let f = IntForm::new(3, vec![1, 0, 0, 0, 1, 0, 0, 0, 1], 1).unwrap();
        assert_eq!(theta_series(&f, 4), vec![1, 6, 12, 8, 6]);
    }

    #[test]
    fn partitioned_matches() {
        let f = IntForm::new(3, vec![22, 0, 0, 0, 8, 4, 0, 4, 24], 2).unwrap();
        assert_eq!(theta_series(&f, 300), theta_series_partitioned(&f, 300, 7));
    }

    #[test]
    fn visits_match_histogram() {
        let f = IntForm::new(2, vec![2, 1, 1, 3], 1).unwrap();
        let mut h = vec![0u64; 51];
        for_each_vector(&f, 50, |v, m| {
            assert_eq!(f.eval(v) as u64, m);
            h[m as usize] += 1;
        });
        assert_eq!(h, theta_series(&f, 50));
    }
}

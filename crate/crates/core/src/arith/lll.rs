//! LLL reduction of positive definite Gram matrices in exact arithmetic.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::{q, qf, QMatrix, ZMatrix, Q};
use crate::error::{Error, Result};

/// A lattice given by its Gram matrix, together with the unimodular change
/// of basis accumulated by reductions (rows are new basis vectors in terms of
/// the original basis).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZLattice {
    pub gram: QMatrix,
    pub basis_change: ZMatrix,
}

impl ZLattice {
    pub fn new(gram: QMatrix) -> Result<Self> {
        let n = gram.rows();
        if !gram.is_square() || gram != gram.transpose() {
            return Err(Error::Domain("Gram matrix must be square and symmetric".into()));
        }
        if !is_positive_definite(&gram) {
            return Err(Error::Domain("Gram matrix is not positive definite".into()));
        }
        Ok(ZLattice { gram, basis_change: ZMatrix::identity(n) })
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }
}

/// Sylvester's criterion on leading principal minors.
pub fn is_positive_definite(g: &QMatrix) -> bool {
    let n = g.rows();
    (1..=n).all(|k| QMatrix::from_fn(k, k, |i, j| g[(i, j)].clone()).det() > Q::zero())
}

/// LLL-reduce with parameter `delta` in `(1/4, 1)`.
pub fn lll_reduce(l: &ZLattice, delta: &Q) -> Result<ZLattice> {
    if *delta <= qf(1, 4) || *delta >= q(1) {
        return Err(Error::Domain(format!("LLL parameter {delta} outside (1/4, 1)")));
    }
    let n = l.dim();
    let mut g = l.gram.clone();
    let mut u = ZMatrix::identity(n);
    if n <= 1 {
        return Ok(ZLattice { gram: g, basis_change: &u * &l.basis_change });
    }
    let mut k = 1;
    while k < n {
        // size reduce b_k against b_{k-1}, ..., b_0
        for j in (0..k).rev() {
            let (mu, bstar) = gso(&g);
            let _ = bstar;
            let m = &mu[k][j];
            if m.abs() > qf(1, 2) {
                let r = m.round().to_integer();
                reduce(&mut g, &mut u, k, j, &r);
            }
        }
        let (mu, bstar) = gso(&g);
        let lhs = &bstar[k];
        let rhs = (delta - &mu[k][k - 1] * &mu[k][k - 1]) * &bstar[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            swap(&mut g, &mut u, k, k - 1);
            k = (k - 1).max(1);
        }
    }
    Ok(ZLattice { gram: g, basis_change: &u * &l.basis_change })
}

/// Gram–Schmidt coefficients `mu[i][j]` and squared lengths `B_i`.
pub fn gso(g: &QMatrix) -> (Vec<Vec<Q>>, Vec<Q>) {
    let n = g.rows();
    let mut mu = vec![vec![Q::zero(); n]; n];
    let mut b = vec![Q::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[(i, j)].clone();
            for k in 0..j {
                s -= &mu[j][k] * &mu[i][k] * &b[k];
            }
            mu[i][j] = s / &b[j];
        }
        let mut s = g[(i, i)].clone();
        for k in 0..i {
            s -= &mu[i][k] * &mu[i][k] * &b[k];
        }
        b[i] = s;
        mu[i][i] = Q::one();
    }
    (mu, b)
}

fn reduce(g: &mut QMatrix, u: &mut ZMatrix, k: usize, j: usize, r: &BigInt) {
    let n = g.rows();
    let rq = Q::from_integer(r.clone());
    // b_k <- b_k - r b_j
    let gkj = g[(k, j)].clone();
    let gjj = g[(j, j)].clone();
    let gkk = g[(k, k)].clone();
    let new_kk = gkk - Q::from_integer(BigInt::from(2)) * &rq * &gkj + &rq * &rq * &gjj;
    for i in 0..n {
        if i == k {
            continue;
        }
        let v = &g[(k, i)] - &rq * &g[(j, i)];
        g[(k, i)] = v.clone();
        g[(i, k)] = v;
    }
    g[(k, k)] = new_kk;
    for c in 0..n {
        let t = r * &u[(j, c)];
        u[(k, c)] -= t;
    }
}

fn swap(g: &mut QMatrix, u: &mut ZMatrix, a: usize, b: usize) {
    g.swap_rows(a, b);
    let t = g.transpose();
    *g = t;
    g.swap_rows(a, b);
    u.swap_rows(a, b);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_unchanged() {
        let l = ZLattice::new(QMatrix::from_i64(&[vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 3]])).unwrap();
        let r = lll_reduce(&l, &qf(3, 4)).unwrap();
        assert_eq!(r.gram, l.gram);
    }

    #[test]
    fn skewed_basis() {
        // basis (1,0), (100,1) of Z^2
        let l = ZLattice::new(QMatrix::from_i64(&[vec![1, 100], vec![100, 10001]])).unwrap();
        let r = lll_reduce(&l, &qf(3, 4)).unwrap();
        assert_eq!(r.gram[(0, 0)], q(1));
        assert_eq!(r.gram.det(), l.gram.det());
        let back = {
            let b = r.basis_change.to_q();
            &(&b * &l.gram) * &b.transpose()
        };
        assert_eq!(back, r.gram);
    }

    #[test]
    fn rejects_bad_delta() {
        let l = ZLattice::new(QMatrix::identity(2)).unwrap();
        assert!(lll_reduce(&l, &qf(1, 4)).is_err());
        assert!(lll_reduce(&l, &q(1)).is_err());
    }
}

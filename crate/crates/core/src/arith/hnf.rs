//! Hermite normal form of integer matrices (row style).
//!
//! The form is upper triangular: each nonzero row's leading entry is
//! positive, lies strictly right of the previous row's, and every entry above
//! a pivot is reduced into `0..pivot`. Zero rows are collected at the bottom.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::ZMatrix;

/// Returns `(h, u)` with `u * m = h`, `u` unimodular, `h` in Hermite form.
pub fn hermite_normal_form(m: &ZMatrix) -> (ZMatrix, ZMatrix) {
    let rows = m.rows();
    let cols = m.cols();
    let mut h = m.clone();
    let mut u = ZMatrix::identity(rows);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // gcd-combine column c into row r
        for i in r + 1..rows {
            if h[(i, c)].is_zero() {
                continue;
            }
            let a = h[(r, c)].clone();
            let b = h[(i, c)].clone();
            let e = a.extended_gcd(&b);
            let (g, x, y) = (e.gcd, e.x, e.y);
            let (ag, bg) = (&a / &g, &b / &g);
            // [x y; -b/g a/g] has determinant 1
            combine_rows(&mut h, r, i, &x, &y, &(-&bg), &ag);
            combine_rows(&mut u, r, i, &x, &y, &(-&bg), &ag);
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut u, r);
        }
        let piv = h[(r, c)].clone();
        for i in 0..r {
            let q = h[(i, c)].div_floor(&piv);
            if !q.is_zero() {
                sub_row_multiple(&mut h, i, r, &q);
                sub_row_multiple(&mut u, i, r, &q);
            }
        }
        r += 1;
    }
    (h, u)
}

fn combine_rows(m: &mut ZMatrix, r: usize, i: usize, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) {
    for j in 0..m.cols() {
        let x = m[(r, j)].clone();
        let y = m[(i, j)].clone();
        m[(r, j)] = a * &x + b * &y;
        m[(i, j)] = c * &x + d * &y;
    }
}

fn negate_row(m: &mut ZMatrix, r: usize) {
    for j in 0..m.cols() {
        m[(r, j)] = -m[(r, j)].clone();
    }
}

fn sub_row_multiple(m: &mut ZMatrix, i: usize, r: usize, q: &BigInt) {
    for j in 0..m.cols() {
        let t = q * &m[(r, j)];
        m[(i, j)] -= t;
    }
}

/// The nonzero rows of the Hermite form: a canonical basis of the row lattice.
pub fn hnf_basis(m: &ZMatrix) -> ZMatrix {
    let (h, _) = hermite_normal_form(m);
    let keep: Vec<usize> = (0..h.rows()).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).collect();
    let mut out = h.select_rows(&keep);
    if keep.is_empty() {
        out = ZMatrix::zeros(0, m.cols());
    }
    out
}

/// Hermite basis of a full-rank lattice in `Z^n` given by generators, where
/// `d` is a positive multiple of the lattice determinant. All arithmetic is
/// reduced modulo `d`, so entries stay below `d^2`; `None` on overflow.
pub fn hnf_mod(gens: &[Vec<i128>], n: usize, d: i128) -> Option<Vec<Vec<i128>>> {
    assert!(d > 0);
    let mut work: Vec<Vec<i128>> = gens.iter().map(|g| g.iter().map(|x| x.rem_euclid(d)).collect()).collect();
    let mut basis: Vec<Vec<i128>> = Vec::with_capacity(n);
    for c in 0..n {
        let mut piv = vec![0i128; n];
        piv[c] = d;
        for w in work.iter_mut() {
            if w[c] == 0 {
                continue;
            }
            let (g, x, y) = ext_gcd(piv[c], w[c]);
            let (pg, wg) = (piv[c] / g, w[c] / g);
            for j in c..n {
                let a = piv[j];
                let b = w[j];
                let na = x.checked_mul(a)?.checked_add(y.checked_mul(b)?)?.rem_euclid(d);
                let nb = pg.checked_mul(b)?.checked_sub(wg.checked_mul(a)?)?.rem_euclid(d);
                piv[j] = na;
                w[j] = nb;
            }
            // pivot entry is a gcd, keep it exact rather than reduced
            piv[c] = g;
            w[c] = 0;
        }
        basis.push(piv);
        work.retain(|w| w.iter().any(|&x| x != 0));
    }
    // reduce above the diagonal
    for c in 0..n {
        let p = basis[c][c];
        for i in 0..c {
            let q = basis[i][c].div_euclid(p);
            if q != 0 {
                for j in c..n {
                    basis[i][j] = basis[i][j].checked_sub(q.checked_mul(basis[c][j])?)?;
                }
            }
        }
    }
    Some(basis)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (g, x, y) = super::int::ext_gcd(a, b);
    (g, x, y)
}

/// Hermite basis of a full-rank integer lattice from generators; uses the
/// modular method when the determinant is small, else exact big integers.
pub fn lattice_hnf(gens: &[Vec<i128>], n: usize) -> Vec<Vec<i128>> {
    let zm = ZMatrix::from_rows(gens.iter().map(|g| g.iter().map(|&x| BigInt::from(x)).collect()).collect());
    let det = full_rank_det_multiple(&zm);
    if let Some(d) = det.to_i128() {
        if d < (1i128 << 60) {
            if let Some(b) = hnf_mod(gens, n, d) {
                return b;
            }
        }
    }
    let h = hnf_basis(&zm);
    assert_eq!(h.rows(), n, "lattice is not of full rank");
    (0..n).map(|i| h.row(i).iter().map(|x| x.to_i128().expect("HNF entry overflow")).collect()).collect()
}

/// A positive multiple of the determinant of a full-rank lattice: the
/// determinant of its Hermite basis.
pub fn full_rank_det_multiple(gens: &ZMatrix) -> BigInt {
    let h = hnf_basis(gens);
    assert_eq!(h.rows(), gens.cols(), "lattice is not of full rank");
    (0..h.rows()).fold(BigInt::one(), |a, i| a * &h[(i, i)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_diagonal() {
        let id = ZMatrix::identity(3);
        let (h, u) = hermite_normal_form(&id);
        assert_eq!(h, id);
        assert_eq!(u, id);
        let d = ZMatrix::from_i64(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(hermite_normal_form(&d).0, d);
    }

    #[test]
    fn modular_agrees() {
        let gens = vec![vec![4i128, 6, 0], vec![2, 5, 1], vec![0, 0, 7], vec![3, 3, 3]];
        let zm = ZMatrix::from_rows(gens.iter().map(|g| g.iter().map(|&x| BigInt::from(x)).collect()).collect());
        let h = hnf_basis(&zm);
        let d = full_rank_det_multiple(&zm).to_i128().unwrap();
        let hm = hnf_mod(&gens, 3, d).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(BigInt::from(hm[i][j]), h[(i, j)]);
            }
        }
    }
}

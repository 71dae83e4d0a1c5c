//! Isometry testing for small positive definite integral forms.

use crate::arith::enumerate::{for_each_vector, theta_series};
use crate::arith::IntForm;

fn bil(f: &IntForm, x: &[i64], y: &[i64]) -> i128 {
    let mut s = 0i128;
    for i in 0..f.n {
        for j in 0..f.n {
            s += f.at(i, j) as i128 * x[i] as i128 * y[j] as i128;
        }
    }
    s
}

fn det(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    let mut m: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let mut d = 1f64;
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        if m[p][c] == 0.0 {
            return 0;
        }
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    d.round() as i128
}

/// Whether `f ≅ g` over `GL_n(Z)`: the reduced basis of `f` is mapped onto
/// vectors of `g` with the same Gram matrix and unimodular coordinates.
pub fn is_isometric(f: &IntForm, g: &IntForm) -> bool {
    if f.n != g.n || f.det_num() * (g.den as i128).pow(f.n as u32) != g.det_num() * (f.den as i128).pow(f.n as u32) {
        return false;
    }
    let (fr, _) = f.lll();
    let n = fr.n;
    let diag: Vec<i128> = (0..n).map(|i| fr.at(i, i) as i128).collect();
    let bound = diag.iter().max().copied().unwrap_or(0) / fr.den as i128;
    if theta_series(&fr, bound as u64) != theta_series(g, bound as u64) {
        return false;
    }
    // candidates for each basis vector, as coordinates in g; compare the
    // Gram matrices after bringing both to the common denominator
    let (fd, gd) = (fr.den as i128, g.den as i128);
    let mut cands: Vec<Vec<Vec<i64>>> = vec![Vec::new(); n];
    for_each_vector(g, bound as u64, |v, _| {
        let gv = bil(g, v, v);
        for i in 0..n {
            if gv * fd == diag[i] * gd {
                cands[i].push(v.to_vec());
            }
        }
    });
    let mut chosen: Vec<Vec<i64>> = Vec::with_capacity(n);
    fn search(
        k: usize,
        fr: &IntForm,
        g: &IntForm,
        cands: &[Vec<Vec<i64>>],
        chosen: &mut Vec<Vec<i64>>,
        fd: i128,
        gd: i128,
    ) -> bool {
        let n = fr.n;
        if k == n {
            return det(chosen).abs() == 1;
        }
        for c in &cands[k] {
            let ok = (0..k).all(|j| bil(g, c, &chosen[j]) * fd == fr.at(k, j) as i128 * gd);
            if ok {
                chosen.push(c.clone());
                if search(k + 1, fr, g, cands, chosen, fd, gd) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    search(0, &fr, g, &cands, &mut chosen, fd, gd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permuted_and_sheared_forms() {
        let f = IntForm::new(3, vec![2, 1, 0, 1, 4, 1, 0, 1, 6], 1).unwrap();
        // g = Uᵀ f U with U = [[1,1,0],[0,1,0],[0,0,1]] then permuted
        let g = IntForm::new(3, vec![8, 1, 3, 1, 6, 0, 3, 0, 2], 1).unwrap();
        assert!(is_isometric(&f, &g));
        let h = IntForm::new(3, vec![2, 0, 0, 0, 4, 1, 0, 1, 6], 1).unwrap();
        assert!(!is_isometric(&f, &h));
    }
}

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::algebra::{QuatElement, QuaternionAlgebra};
use super::splitting::split_unramified;
use crate::arith::hnf::{hnf_basis, lattice_hnf};
use crate::arith::int::{is_squarefree, prime_divisors};
use crate::arith::modp;
use crate::arith::{q, zq, QMatrix, ZMatrix, Q};
use crate::error::{Error, Result};

/// Integer structure constants of an order in its own basis.
#[derive(Clone, Debug)]
pub struct OrderArith {
    /// `e_a e_b = Σ_c mult[a][b][c] e_c`.
    pub mult: [[[i64; 4]; 4]; 4],
    pub trd: [i64; 4],
    /// `gram[a][b] = trd(e_a ē_b)`, so `nrd(x) = xᵀ gram x / 2`.
    pub gram: [[i64; 4]; 4],
    /// Coordinates of 1.
    pub one: [i64; 4],
    pub basis_inv: QMatrix,
}

pub type Vec4 = [i128; 4];

impl OrderArith {
    /// Structure constants of the lattice spanned by `basis` (rows in the
    /// coordinates 1, i, j, k); fails unless the lattice is a ring with 1.
    pub fn from_basis(alg: &QuaternionAlgebra, basis: &QMatrix) -> Result<Self> {
        let inv = basis.inverse().ok_or_else(|| Error::Domain("order basis is singular".into()))?;
        let elems: Vec<QuatElement> = (0..4).map(|r| row_element(basis, r)).collect();
        let coords = |x: &QuatElement| -> Result<[i64; 4]> {
            let c = inv.vec_mul(&x.coords);
            let mut out = [0i64; 4];
            for (o, v) in out.iter_mut().zip(c) {
                if !v.is_integer() {
                    return Err(Error::Domain("lattice is not closed under multiplication".into()));
                }
                *o = v.to_integer().to_i64().ok_or_else(|| Error::Domain("structure constant overflow".into()))?;
            }
            Ok(out)
        };
        let mut mult = [[[0i64; 4]; 4]; 4];
        let mut gram = [[0i64; 4]; 4];
        let mut trd = [0i64; 4];
        for a in 0..4 {
            let t = elems[a].trd();
            if !t.is_integer() {
                return Err(Error::Domain("basis element with non-integral trace".into()));
            }
            trd[a] = t.to_integer().to_i64().unwrap();
            for b in 0..4 {
                mult[a][b] = coords(&alg.mul(&elems[a], &elems[b]))?;
                let g = alg.mul(&elems[a], &elems[b].conj()).trd();
                if !g.is_integer() {
                    return Err(Error::Domain("non-integral trace form".into()));
                }
                gram[a][b] = g.to_integer().to_i64().unwrap();
            }
        }
        let one = coords(&alg.one()).map_err(|_| Error::Domain("lattice does not contain 1".into()))?;
        Ok(OrderArith { mult, trd, gram, one, basis_inv: inv })
    }

    pub fn mul(&self, x: &Vec4, y: &Vec4) -> Vec4 {
        let mut out = [0i128; 4];
        for a in 0..4 {
            if x[a] == 0 {
                continue;
            }
            for b in 0..4 {
                if y[b] == 0 {
                    continue;
                }
                let s = x[a] * y[b];
                let m = &self.mult[a][b];
                for c in 0..4 {
                    out[c] += s * m[c] as i128;
                }
            }
        }
        out
    }

    pub fn trd(&self, x: &Vec4) -> i128 {
        (0..4).map(|a| self.trd[a] as i128 * x[a]).sum()
    }

    pub fn nrd(&self, x: &Vec4) -> i128 {
        let mut s = 0i128;
        for a in 0..4 {
            for b in 0..4 {
                s += self.gram[a][b] as i128 * x[a] * x[b];
            }
        }
        s / 2
    }

    pub fn conj(&self, x: &Vec4) -> Vec4 {
        let t = self.trd(x);
        std::array::from_fn(|a| t * self.one[a] as i128 - x[a])
    }

    pub fn one(&self) -> Vec4 {
        self.one.map(|v| v as i128)
    }
}

fn row_element(m: &QMatrix, r: usize) -> QuatElement {
    QuatElement { coords: std::array::from_fn(|c| m[(r, c)].clone()) }
}

/// An order of a definite quaternion algebra, given by a Z-basis.
#[derive(Clone, Debug)]
pub struct QuaternionOrder {
    pub algebra: QuaternionAlgebra,
    /// Rows are basis elements in the coordinates 1, i, j, k.
    pub basis: QMatrix,
    pub level: u64,
    pub reduced_discriminant: u64,
    arith: OrderArith,
}

/// Serialized form of an order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderJson {
    pub a: i64,
    pub b: i64,
    pub basis: Vec<String>,
    pub level: u64,
}

impl QuaternionOrder {
    /// Validates an Eichler order of the given level: a ring with 1 whose
    /// reduced discriminant is `disc(D)·level`.
    pub fn new(algebra: QuaternionAlgebra, basis: QMatrix, level: u64) -> Result<Self> {
        if basis.rows() != 4 || basis.cols() != 4 {
            return Err(Error::Domain("order basis must be 4×4".into()));
        }
        let arith = OrderArith::from_basis(&algebra, &basis)?;
        let d = reduced_discriminant(&arith)?;
        let dd = algebra.discriminant();
        if level == 0 || !is_squarefree(level) || dd.gcd(&level) != 1 {
            return Err(Error::Domain(format!("level {level} must be square-free and coprime to {dd}")));
        }
        if d != dd * level {
            return Err(Error::Domain(format!("reduced discriminant {d} differs from {dd}·{level}")));
        }
        Ok(QuaternionOrder { algebra, basis, level, reduced_discriminant: d, arith })
    }

    pub fn arith(&self) -> &OrderArith {
        &self.arith
    }

    pub fn disc_d(&self) -> u64 {
        self.algebra.discriminant()
    }

    /// Algebra element with the given order coordinates.
    pub fn element(&self, c: &[Q]) -> QuatElement {
        QuatElement { coords: std::array::from_fn(|j| (0..4).fold(Q::zero(), |s, i| s + &c[i] * &self.basis[(i, j)])) }
    }

    pub fn element_int(&self, c: &Vec4) -> QuatElement {
        let cq: Vec<Q> = c.iter().map(|&v| zq(&BigInt::from(v))).collect();
        self.element(&cq)
    }

    /// Order coordinates of an algebra element.
    pub fn coords(&self, x: &QuatElement) -> Vec<Q> {
        self.arith.basis_inv.vec_mul(&x.coords)
    }

    pub fn to_json(&self) -> OrderJson {
        OrderJson {
            a: self.algebra.a,
            b: self.algebra.b,
            basis: self.basis.entries().iter().map(|v| v.to_string()).collect(),
            level: self.level,
        }
    }

    pub fn from_json(j: &OrderJson) -> Result<Self> {
        if j.basis.len() != 16 {
            return Err(Error::Parse("order basis needs 16 entries".into()));
        }
        let mut vals = Vec::with_capacity(16);
        for s in &j.basis {
            vals.push(s.parse::<Q>().map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))?);
        }
        let basis = QMatrix::from_rows(vals.chunks(4).map(|c| c.to_vec()).collect());
        QuaternionOrder::new(QuaternionAlgebra::new(j.a, j.b)?, basis, j.level)
    }

    /// Whether every basis element of `other` lies in this order.
    pub fn contains(&self, other: &QuaternionOrder) -> bool {
        (0..4).all(|r| self.coords(&row_element(&other.basis, r)).iter().all(|v| v.is_integer()))
    }

    /// Coordinates of `other`'s basis in this order's basis.
    pub fn basis_in(&self, other: &QuaternionOrder) -> Vec<Vec<Q>> {
        (0..4).map(|r| other.coords(&row_element(&self.basis, r))).collect()
    }
}

/// `sqrt |det(trd(e_a e_b))|`.
fn reduced_discriminant(arith: &OrderArith) -> Result<u64> {
    let g = QMatrix::from_fn(4, 4, |a, b| q(arith.gram[a][b]));
    let det = g.det().abs().to_integer();
    let r = det.sqrt();
    if &r * &r != det {
        return Err(Error::Domain("trace form determinant is not a square".into()));
    }
    r.to_u64().ok_or_else(|| Error::Domain("discriminant overflow".into()))
}

/// Canonical basis of a lattice: Hermite form of its rows in 1, i, j, k
/// coordinates.
pub(crate) fn canonical_basis(rows: &QMatrix) -> QMatrix {
    let den = rows.denominator();
    let zm = ZMatrix::from_fn(rows.rows(), rows.cols(), |i, j| (&rows[(i, j)] * zq(&den)).to_integer());
    let h = hnf_basis(&zm);
    h.to_q().scale(&(Q::one() / zq(&den)))
}

/// Rings `O + Z·c/p ⊋ O` for projective kernel vectors `c` of the trace
/// form mod `p`, expressed as canonical bases. Stops at the first success
/// unless `all`.
fn enlargements(alg: &QuaternionAlgebra, basis: &QMatrix, p: u64, all: bool) -> Result<Vec<QMatrix>> {
    let arith = OrderArith::from_basis(alg, basis)?;
    let g: Vec<Vec<u64>> = (0..4).map(|a| (0..4).map(|b| modp::reduce_i64(arith.gram[a][b], p)).collect()).collect();
    let ker = modp::kernel(&g, 4, p);
    let k = ker.len();
    let mut out: Vec<QMatrix> = Vec::new();
    if k == 0 {
        return Ok(out);
    }
    let total = (p as usize).pow(k as u32);
    for idx in 1..total {
        let mut coef = vec![0u64; k];
        let mut t = idx;
        for c in coef.iter_mut() {
            *c = (t % p as usize) as u64;
            t /= p as usize;
        }
        // projective representative: last nonzero coefficient equals 1
        if coef.iter().rev().find(|&&x| x != 0) != Some(&1) {
            continue;
        }
        let mut c = [0i128; 4];
        for (j, &cj) in coef.iter().enumerate() {
            for a in 0..4 {
                c[a] = (c[a] + cj as i128 * ker[j][a] as i128) % p as i128;
            }
        }
        let pi = p as i128;
        if arith.trd(&c) % pi != 0 || arith.nrd(&c) % (pi * pi) != 0 {
            continue;
        }
        let Some((m, d)) = ring_closure(&arith, c, pi) else { continue };
        let rows = QMatrix::from_fn(4, 4, |i, j| Q::new(BigInt::from(m[i][j]), BigInt::from(d)));
        let alg_rows = canonical_basis(&(&rows * basis));
        if !out.contains(&alg_rows) {
            out.push(alg_rows);
            if !all {
                break;
            }
        }
    }
    Ok(out)
}

/// Smallest ring containing the order and `c/p`, as `M/D` in order
/// coordinates; `None` if denominators grow without bound.
fn ring_closure(arith: &OrderArith, c: Vec4, p: i128) -> Option<(Vec<Vec<i128>>, i128)> {
    let mut m: Vec<Vec<i128>> = (0..4).map(|i| (0..4).map(|j| if i == j { p } else { 0 }).collect()).collect();
    m.push(c.to_vec());
    let mut d = p;
    let mut m = lattice_hnf(&m, 4);
    let cap = p.pow(4);
    loop {
        let mut gens: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|x| x * d).collect()).collect();
        for u in &m {
            for v in &m {
                let uu: Vec4 = [u[0], u[1], u[2], u[3]];
                let vv: Vec4 = [v[0], v[1], v[2], v[3]];
                gens.push(arith.mul(&uu, &vv).to_vec());
            }
        }
        let h = lattice_hnf(&gens, 4);
        let dd = d * d;
        let g = h.iter().flatten().fold(dd, |g, &x| g.gcd(&x));
        let nm: Vec<Vec<i128>> = h.iter().map(|r| r.iter().map(|x| x / g).collect()).collect();
        let nd = dd / g;
        if nd > cap {
            return None;
        }
        if nd == d && nm == m {
            return Some((m, d));
        }
        m = nm;
        d = nd;
    }
}

/// A maximal order of a definite algebra with odd discriminant, obtained by
/// p-local enlargement of `Z⟨1, i, j, k⟩`.
pub fn maximal_order(alg: &QuaternionAlgebra) -> Result<QuaternionOrder> {
    if !alg.definite {
        return Err(Error::Domain("algebra is not definite".into()));
    }
    let target = alg.discriminant();
    let mut basis = QMatrix::identity(4);
    loop {
        let d = reduced_discriminant(&OrderArith::from_basis(alg, &basis)?)?;
        if d == target {
            break;
        }
        let mut grown = false;
        for p in prime_divisors(d / target) {
            if let Some(b) = enlargements(alg, &basis, p, false)?.into_iter().next() {
                basis = b;
                grown = true;
                break;
            }
        }
        if !grown {
            return Err(Error::Internal(format!("order of discriminant {d} could not be enlarged")));
        }
    }
    QuaternionOrder::new(alg.clone(), basis, 1)
}

/// The printed maximal orders shipped with the crate (discriminants 23, 41).
pub fn reference_order(d: u64) -> Option<QuaternionOrder> {
    let text = match d {
        23 => include_str!("../../data/order_23.json"),
        41 => include_str!("../../data/order_41.json"),
        _ => return None,
    };
    let j: OrderJson = serde_json::from_str(text).ok()?;
    QuaternionOrder::from_json(&j).ok()
}

/// The orders `O' ⊋ O` of index `p` in which `p` no longer divides the
/// level; for an Eichler order of level divisible by `p` there are two.
pub fn over_orders_at(o: &QuaternionOrder, p: u64) -> Result<Vec<QuaternionOrder>> {
    if o.level % p != 0 {
        return Err(Error::Domain(format!("{p} does not divide the level {}", o.level)));
    }
    enlargements(&o.algebra, &o.basis, p, true)?
        .into_iter()
        .map(|b| QuaternionOrder::new(o.algebra.clone(), b, o.level / p))
        .collect()
}

/// The Eichler order of level `m` inside a maximal order: at each `p | m`,
/// the elements whose local image is upper triangular mod `p`.
pub fn eichler_order(omax: &QuaternionOrder, m: u64) -> Result<QuaternionOrder> {
    if omax.level != 1 {
        return Err(Error::Domain("eichler_order needs a maximal order".into()));
    }
    let dd = omax.disc_d();
    if m == 0 || !is_squarefree(m) || dd.gcd(&m) != 1 {
        return Err(Error::Domain(format!("level {m} must be square-free and coprime to {dd}")));
    }
    if m == 1 {
        return Ok(omax.clone());
    }
    // sublattice in omax coordinates, as integer rows
    let mut sub: Vec<Vec<i128>> = (0..4).map(|i| (0..4).map(|j| (i == j) as i128).collect()).collect();
    for p in prime_divisors(m) {
        let sp = split_unramified(omax.arith(), p, 1)?;
        let f: Vec<i128> = sp.images.iter().map(|im| im[1][0]).collect();
        let pi = p as i128;
        let mut gens: Vec<Vec<i128>> = Vec::new();
        // rows x of `sub` with Σ x_a f_a ≡ 0 mod p, generated by p·sub and
        // the kernel combinations
        let vals: Vec<i128> = sub.iter().map(|r| (0..4).map(|a| r[a] * f[a]).sum::<i128>().rem_euclid(pi)).collect();
        let piv = vals.iter().position(|&v| v != 0);
        match piv {
            None => gens = sub.clone(),
            Some(k) => {
                let inv = crate::arith::int::inv_mod(vals[k], pi).unwrap();
                for (i, r) in sub.iter().enumerate() {
                    if i == k {
                        gens.push(r.iter().map(|x| x * pi).collect());
                    } else {
                        let t = (vals[i] * inv).rem_euclid(pi);
                        gens.push((0..4).map(|a| r[a] - t * sub[k][a]).collect());
                    }
                }
            }
        }
        sub = lattice_hnf(&gens, 4);
    }
    let rows = QMatrix::from_fn(4, 4, |i, j| q(sub[i][j] as i64));
    let basis = canonical_basis(&(&rows * &omax.basis));
    QuaternionOrder::new(omax.algebra.clone(), basis, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qf;
    use crate::quat::algebra_of_discriminant;

    fn paper_basis(rows: &[[(i64, i64); 4]]) -> QMatrix {
        QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&(n, d)| qf(n, d)).collect()).collect())
    }

    #[test]
    fn printed_orders_are_maximal() {
        // x² = −23, y² = −1, z = xy
        let b23 = paper_basis(&[
            [(1, 1), (0, 1), (0, 1), (0, 1)],
            [(0, 1), (0, 1), (1, 1), (0, 1)],
            [(0, 1), (0, 1), (1, 2), (1, 2)],
            [(1, 2), (1, 2), (0, 1), (0, 1)],
        ]);
        let o = QuaternionOrder::new(QuaternionAlgebra::new(-23, -1).unwrap(), b23, 1).unwrap();
        assert_eq!(o.reduced_discriminant, 23);
        let b41 = paper_basis(&[
            [(1, 1), (0, 1), (0, 1), (0, 1)],
            [(1, 2), (0, 1), (1, 2), (0, 1)],
            [(1, 2), (1, 2), (1, 6), (1, 6)],
            [(1, 2), (0, 1), (-1, 6), (1, 3)],
        ]);
        let o = QuaternionOrder::new(QuaternionAlgebra::new(-41, -3).unwrap(), b41, 1).unwrap();
        assert_eq!(o.reduced_discriminant, 41);
    }

    #[test]
    fn constructed_maximal_orders() {
        for d in [3u64, 5, 7, 11, 13, 17, 19, 23, 37, 41, 73, 89, 97, 113, 105] {
            let alg = algebra_of_discriminant(d).unwrap();
            let o = maximal_order(&alg).unwrap();
            assert_eq!(o.reduced_discriminant, d);
            let g = QMatrix::from_fn(4, 4, |a, b| q(o.arith().gram[a][b]));
            assert_eq!(g.det().abs(), q((d * d) as i64));
        }
    }

    #[test]
    fn eichler_levels() {
        let omax = maximal_order(&algebra_of_discriminant(13).unwrap()).unwrap();
        let e = eichler_order(&omax, 5).unwrap();
        assert_eq!(e.reduced_discriminant, 65);
        assert!(omax.contains(&e));
        let same = eichler_order(&omax, 1).unwrap();
        assert_eq!(same.basis, omax.basis);
        let overs = over_orders_at(&e, 5).unwrap();
        assert_eq!(overs.len(), 2);
        assert!(overs.iter().all(|o| o.reduced_discriminant == 13 && o.contains(&e)));
        assert!(eichler_order(&omax, 13).is_err());
        let e2 = eichler_order(&omax, 15).unwrap();
        assert_eq!(e2.reduced_discriminant, 13 * 15);
    }

    #[test]
    fn reference_orders_load() {
        assert_eq!(reference_order(23).unwrap().reduced_discriminant, 23);
        assert_eq!(reference_order(41).unwrap().algebra, algebra_of_discriminant(41).unwrap());
        assert!(reference_order(11).is_none());
    }

    #[test]
    fn json_round_trip() {
        let o = maximal_order(&algebra_of_discriminant(11).unwrap()).unwrap();
        let j = o.to_json();
        let back = QuaternionOrder::from_json(&j).unwrap();
        assert_eq!(back.basis, o.basis);
        assert_eq!(serde_json::to_string(&back.to_json()).unwrap(), serde_json::to_string(&j).unwrap());
    }
}

//! Decomposition of Hecke-stable subspaces into Galois-orbit components and
//! exact, normalized eigenforms over their Hecke fields.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::brandt::{brandt_matrices, brandt_matrix, BrandtMatrix};
use super::subspace::{pivots, HeckeSubspace};
use crate::arith::enumerate::{for_each_vector, lll_gram};
use crate::arith::hnf::hnf_basis;
use crate::arith::int::is_prime;
use crate::arith::poly::char_poly_int;
use crate::arith::{
    factor_int_poly, nf_maximal_order, q, zq, IntForm, IntPoly, NFElement, NumberField, QMatrix, ZMatrix, Q,
};
use crate::error::{Error, Result};
use crate::ideals::ClassSet;
use crate::quat::OrderJson;

/// Largest prime whose Hecke operator is tried on its own.
pub const SCHEDULE_MAX_PRIME: u64 = 97;
/// Number of random combinations tried after the single operators.
pub const SCHEDULE_COMBINATIONS: usize = 20;
/// Operators mixed in the random combinations.
const COMBINATION_PRIMES: usize = 4;
const SCHEDULE_SEED: u64 = 0x5eed_0b5e;
/// Extra primes on which each eigenform is re-verified.
pub const EXTRA_CHECK_PRIMES: usize = 5;
/// Defining polynomials up to this degree get a maximal-order basis.
pub const MAX_ORDER_DEGREE: isize = 8;

/// Lazily computed Brandt matrices of one class set.
pub struct HeckeOperators<'a> {
    pub cs: &'a ClassSet,
    mats: BTreeMap<u64, BrandtMatrix>,
}

impl<'a> HeckeOperators<'a> {
    pub fn new(cs: &'a ClassSet) -> Self {
        HeckeOperators { cs, mats: BTreeMap::new() }
    }

    pub fn get(&mut self, p: u64) -> Result<&BrandtMatrix> {
        if !self.mats.contains_key(&p) {
            let b = brandt_matrix(self.cs, p)?;
            self.mats.insert(p, b);
        }
        Ok(&self.mats[&p])
    }

    /// Computes the missing matrices in parallel.
    pub fn prefetch(&mut self, primes: &[u64]) -> Result<()> {
        let missing: Vec<u64> = primes.iter().copied().filter(|p| !self.mats.contains_key(p)).collect();
        for b in brandt_matrices(self.cs, &missing)? {
            self.mats.insert(b.prime, b);
        }
        Ok(())
    }

    pub fn cached(&self) -> impl Iterator<Item = &BrandtMatrix> {
        self.mats.values()
    }

    /// Good primes in increasing order.
    pub fn good_primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2u64..).filter(move |&p| is_prime(p) && self.cs.order.reduced_discriminant % p != 0)
    }

    /// `Σ c_p B_p` as a rational matrix.
    fn combination(&mut self, terms: &[(u64, i64)]) -> Result<QMatrix> {
        let h = self.cs.h();
        let mut acc = QMatrix::zeros(h, h);
        for &(p, c) in terms {
            let b = self.get(p)?;
            for i in 0..h {
                for j in 0..h {
                    acc[(i, j)] += q(c * b.entries[i][j] as i64);
                }
            }
        }
        Ok(acc)
    }
}

/// One operator of the refinement schedule, as `Σ c_p T_p`.
pub type Operator = Vec<(u64, i64)>;

/// The refinement schedule: `T_p` for good `p ≤ 97`, then seeded random
/// combinations of the first few `T_p` with coefficients in `[-3, 3]`.
pub fn schedule(ops: &HeckeOperators) -> Vec<Operator> {
    let good: Vec<u64> = ops.good_primes().take_while(|&p| p <= SCHEDULE_MAX_PRIME).collect();
    let mut out: Vec<Operator> = good.iter().map(|&p| vec![(p, 1)]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SCHEDULE_SEED);
    let mix = &good[..good.len().min(COMBINATION_PRIMES)];
    while out.len() < good.len() + SCHEDULE_COMBINATIONS {
        let terms: Operator = mix.iter().map(|&p| (p, rng.gen_range(-3i64..=3))).filter(|&(_, c)| c != 0).collect();
        if terms.len() >= 2 {
            out.push(terms);
        }
    }
    out
}

/// A Hecke-stable piece of a subspace.
#[derive(Clone, Debug)]
pub struct Component {
    /// Reduced echelon rows in class coordinates.
    pub basis: QMatrix,
    /// Irreducible factor whose power is the characteristic polynomial.
    pub poly: IntPoly,
    /// Operator whose restriction has characteristic polynomial `poly`
    /// (or `poly^m` when uncertain).
    pub operator: Operator,
    /// No scheduled operator separated a power of one irreducible.
    pub uncertain: bool,
    /// Schedule entries consulted.
    pub steps: usize,
}

impl Component {
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
}

/// Matrix of `f ↦ T f` on the rows of an echelon basis `S` (row action):
/// `S·Tᵀ = A·S`.
pub fn restrict(basis: &QMatrix, t: &QMatrix) -> QMatrix {
    let m = basis * &t.transpose();
    let piv = pivots(basis);
    QMatrix::from_fn(basis.rows(), basis.rows(), |r, c| m[(r, piv[c])].clone())
}

/// Splits a subspace into Galois-orbit components.
pub fn decompose(ops: &mut HeckeOperators, sub: &HeckeSubspace) -> Result<Vec<Component>> {
    let sched = schedule(ops);
    let mut done = Vec::new();
    if sub.dim() == 0 {
        return Ok(done);
    }
    // (basis, first schedule index to try)
    let mut work = vec![(sub.basis.clone(), 0usize)];
    while let Some((basis, start)) = work.pop() {
        let mut k = start;
        loop {
            if k == sched.len() {
                let t = ops.combination(&sched[0])?;
                let chi = char_poly_int(&restrict(&basis, &t));
                let g = factor_int_poly(&chi)[0].0.clone();
                done.push(Component { basis, poly: g, operator: sched[0].clone(), uncertain: true, steps: k });
                break;
            }
            let t = ops.combination(&sched[k])?;
            let a = restrict(&basis, &t);
            let chi = char_poly_int(&a);
            let fac = factor_int_poly(&chi);
            if fac.len() == 1 && fac[0].1 == 1 {
                done.push(Component {
                    basis,
                    poly: fac[0].0.clone(),
                    operator: sched[k].clone(),
                    uncertain: false,
                    steps: k + 1,
                });
                break;
            }
            if fac.len() > 1 {
                // pieces pushed in reverse so that they pop in factor order
                for (g, e) in fac.iter().rev() {
                    let ge = g.pow(*e).to_q().eval_matrix(&a);
                    let x = ge.left_kernel();
                    let piece = (&x * &basis).row_space();
                    work.push((piece, k + 1));
                }
                break;
            }
            k += 1;
        }
    }
    Ok(done)
}

/// A normalized Hecke eigenform.
#[derive(Clone, Debug)]
pub struct Eigenform {
    pub field: NumberField,
    pub values: Vec<NFElement>,
    pub eigenvalues: BTreeMap<u64, NFElement>,
    /// `[o_K : Σ o_K φ(i)]` after normalization; 1 unless that ideal is
    /// not found to be principal.
    pub value_ideal_index: u64,
    pub uncertain: bool,
}

impl Eigenform {
    pub fn degree(&self) -> usize {
        self.field.degree
    }

    /// `T_p φ = λ φ` exactly.
    pub fn satisfies(&self, b: &BrandtMatrix, lambda: &NFElement) -> bool {
        let tv = apply(&self.field, b, &self.values);
        tv.iter().zip(&self.values).all(|(x, v)| *x == self.field.mul(lambda, v))
    }

    /// The eigenvalue of `b`, read off a nonzero coordinate and rechecked on
    /// all of them; `None` if `φ` is not an eigenvector of `b`.
    pub fn eigenvalue(&self, b: &BrandtMatrix) -> Option<NFElement> {
        let tv = apply(&self.field, b, &self.values);
        let i = self.values.iter().position(|v| !v.is_zero())?;
        let lambda = self.field.div(&tv[i], &self.values[i])?;
        self.satisfies(b, &lambda).then_some(lambda)
    }

    pub fn to_json(&self, order: OrderJson) -> EigenformJson {
        let s = |e: &NFElement| e.coordinates.iter().map(|c| c.to_string()).collect::<Vec<_>>();
        EigenformJson {
            hecke_field_poly: self.field.generator_min_poly.coeffs().iter().map(|c| c.to_string()).collect(),
            integral_basis: self
                .field
                .integral_basis
                .to_rows()
                .iter()
                .map(|r| r.iter().map(|c| c.to_string()).collect())
                .collect(),
            values: self.values.iter().map(s).collect(),
            eigenvalues: self.eigenvalues.iter().map(|(p, l)| (p.to_string(), s(l))).collect(),
            order_ref: order,
            uncertain: self.uncertain,
        }
    }

    pub fn from_json(j: &EigenformJson) -> Result<Self> {
        let parse = |s: &String| s.parse::<Q>().map_err(|_| Error::Parse(format!("bad rational {s}")));
        let elem = |v: &Vec<String>| -> Result<NFElement> {
            Ok(NFElement { coordinates: v.iter().map(parse).collect::<Result<_>>()? })
        };
        let coeffs = j
            .hecke_field_poly
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer {s}"))))
            .collect::<Result<Vec<_>>>()?;
        let basis = QMatrix::from_rows(
            j.integral_basis.iter().map(|r| r.iter().map(parse).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?,
        );
        let field = NumberField::with_basis(IntPoly::new(coeffs), basis);
        let mut eigenvalues = BTreeMap::new();
        for (p, v) in &j.eigenvalues {
            eigenvalues.insert(p.parse::<u64>().map_err(|_| Error::Parse(format!("bad prime {p}")))?, elem(v)?);
        }
        Ok(Eigenform {
            field,
            values: j.values.iter().map(elem).collect::<Result<_>>()?,
            eigenvalues,
            value_ideal_index: 1,
            uncertain: j.uncertain,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenformJson {
    pub hecke_field_poly: Vec<String>,
    pub integral_basis: Vec<Vec<String>>,
    pub values: Vec<Vec<String>>,
    pub eigenvalues: BTreeMap<String, Vec<String>>,
    pub order_ref: OrderJson,
    #[serde(default)]
    pub uncertain: bool,
}

fn apply(k: &NumberField, b: &BrandtMatrix, v: &[NFElement]) -> Vec<NFElement> {
    b.entries
        .iter()
        .map(|row| {
            row.iter().zip(v).filter(|(&c, _)| c != 0).fold(k.zero(), |s, (&c, x)| s.add(&x.scale(&q(c as i64))))
        })
        .collect()
}

/// The Hecke field of a component: the maximal order for small degree, the
/// equation order otherwise.
fn hecke_field(g: &IntPoly) -> Result<NumberField> {
    if g.degree() <= MAX_ORDER_DEGREE {
        nf_maximal_order(g)
    } else {
        Ok(NumberField::power_basis(g))
    }
}

/// Eigenvector of a component for the root `θ` of its polynomial, as
/// values on classes: `v·q(A)·S` with `g(t) = (t − θ) q(t)`.
fn eigenvector(k: &NumberField, comp: &Component, t: &QMatrix) -> Vec<NFElement> {
    let a = restrict(&comp.basis, t);
    let d = a.rows();
    let g = &comp.poly;
    let deg = g.degree() as usize;
    let theta = k.generator();
    // synthetic division: q_{deg-1} = 1, q_{i-1} = g_i + θ q_i
    let mut qs = vec![k.zero(); deg];
    qs[deg - 1] = k.one();
    for i in (1..deg).rev() {
        qs[i - 1] = k.from_q(&zq(&g.coeff(i))).add(&k.mul(&theta, &qs[i]));
    }
    // v = first coordinate vector whose Krylov space is big enough
    let mut out = None;
    for start in 0..d {
        let mut v = vec![q(0); d];
        v[start] = q(1);
        let mut x = vec![k.zero(); d];
        let mut w = v;
        for qi in &qs {
            for c in 0..d {
                if !w[c].is_zero() {
                    x[c] = x[c].add(&qi.scale(&w[c]));
                }
            }
            w = a.vec_mul(&w);
        }
        if x.iter().any(|e| !e.is_zero()) {
            out = Some(x);
            break;
        }
    }
    let x = out.expect("nonzero restricted operator has an eigenvector");
    let h = comp.basis.cols();
    (0..h)
        .map(|i| {
            (0..d).fold(k.zero(), |s, r| {
                let c = &comp.basis[(r, i)];
                if c.is_zero() {
                    s
                } else {
                    s.add(&x[r].scale(c))
                }
            })
        })
        .collect()
}

/// Clears denominators and divides by the content of the coordinates.
fn primitive(values: &mut [NFElement]) {
    let den = values.iter().flat_map(|v| v.coordinates.iter()).fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let num = values
        .iter()
        .flat_map(|v| v.coordinates.iter())
        .fold(BigInt::zero(), |g, c| g.gcd(&(c * zq(&den)).to_integer()));
    if num.is_zero() {
        return;
    }
    let s = zq(&den) / zq(&num);
    for v in values.iter_mut() {
        *v = v.scale(&s);
    }
}

fn basis_elem(k: &NumberField, i: usize) -> NFElement {
    let mut c = vec![q(0); k.degree];
    c[i] = q(1);
    NFElement { coordinates: c }
}

/// HNF basis (integral coordinates) of the ideal generated by `values`.
fn value_ideal(k: &NumberField, values: &[NFElement]) -> ZMatrix {
    let n = k.degree;
    let mut gens = Vec::new();
    for v in values.iter().filter(|v| !v.is_zero()) {
        for i in 0..n {
            let e = k.mul(&basis_elem(k, i), v);
            gens.push(e.integer_coords().expect("integral values"));
        }
    }
    hnf_basis(&ZMatrix::from_rows(gens))
}

/// Cap on trace-form enumeration while searching for an ideal generator.
const GENERATOR_SEARCH_VECTORS: usize = 2_000_000;

/// An element of norm `±index` in the ideal with HNF basis `b`, which then
/// generates it.
fn ideal_generator(k: &NumberField, b: &ZMatrix, index: &BigInt) -> Option<NFElement> {
    let n = k.degree;
    let elems: Vec<NFElement> = (0..n).map(|r| NFElement { coordinates: b.row(r).iter().map(zq).collect() }).collect();
    let mut g: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            (0..n).map(|j| k.trace(&k.mul(&elems[i], &elems[j])).to_integer().to_i128()).collect::<Option<Vec<_>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    let u = lll_gram(&mut g);
    let a: Option<Vec<i64>> = g.iter().flatten().map(|&x| i64::try_from(x).ok()).collect();
    let form = IntForm::new(n, a?, 1).ok()?;
    let red: Vec<NFElement> =
        u.iter().map(|row| row.iter().zip(&elems).fold(k.zero(), |s, (&c, e)| s.add(&e.scale(&q(c))))).collect();
    let target = zq(index);
    let base = g[0][0].max(1) as u64;
    let mut bound = base;
    let mut seen = 0usize;
    loop {
        let mut found = None;
        for_each_vector(&form, bound, |v, _| {
            seen += 1;
            if found.is_some() || v.iter().all(|&c| c == 0) {
                return;
            }
            let x = v.iter().zip(&red).fold(k.zero(), |s, (&c, e)| if c == 0 { s } else { s.add(&e.scale(&q(c))) });
            if k.norm(&x).abs() == target {
                found = Some(x);
            }
        });
        if found.is_some() || seen > GENERATOR_SEARCH_VECTORS {
            return found;
        }
        bound *= 2;
    }
}

/// Integral, content 1, principal value ideal divided out when a generator
/// is found, first nonzero value positive at the largest real root.
fn normalize(k: &NumberField, values: &mut [NFElement]) -> u64 {
    primitive(values);
    let b = value_ideal(k, values);
    let index = (0..b.rows()).fold(BigInt::one(), |acc, i| acc * b[(i, i)].abs());
    let mut left = index.clone();
    if !index.is_one() {
        if let Some(gamma) = ideal_generator(k, &b, &index) {
            let inv = k.inverse(&gamma).unwrap();
            for v in values.iter_mut() {
                *v = k.mul(v, &inv);
            }
            left = BigInt::one();
        }
    }
    if let Some(root) = k.largest_real_root() {
        if let Some(first) = values.iter().find(|v| !v.is_zero()) {
            if k.embed(first, root) < 0.0 {
                for v in values.iter_mut() {
                    *v = v.neg();
                }
            }
        }
    }
    left.to_u64().unwrap_or(u64::MAX)
}

/// One normalized eigenform per Galois-orbit component of `sub`.
pub fn eigenforms(sub: &HeckeSubspace, cs: &ClassSet) -> Result<Vec<Eigenform>> {
    let mut ops = HeckeOperators::new(cs);
    eigenforms_with(&mut ops, sub)
}

pub fn eigenforms_with(ops: &mut HeckeOperators, sub: &HeckeSubspace) -> Result<Vec<Eigenform>> {
    let comps = decompose(ops, sub)?;
    let used = comps.iter().map(|c| c.steps).max().unwrap_or(0);
    let sched = schedule(ops);
    let mut primes: Vec<u64> = sched[..used.min(sched.len())].iter().flat_map(|o| o.iter().map(|t| t.0)).collect();
    primes.sort_unstable();
    primes.dedup();
    let top = primes.last().copied().unwrap_or(1);
    primes.extend(ops.good_primes().filter(|&p| p > top).take(EXTRA_CHECK_PRIMES));
    ops.prefetch(&primes)?;
    let mut out = Vec::with_capacity(comps.len());
    for comp in &comps {
        let k = hecke_field(&comp.poly)?;
        let t = ops.combination(&comp.operator)?;
        let mut values = eigenvector(&k, comp, &t);
        let k = match k.reduced() {
            Some((r, m)) => {
                values = values.iter().map(|v| k.transport(&r, &m, v)).collect();
                r
            }
            None => k,
        };
        let value_ideal_index = normalize(&k, &mut values);
        let mut form =
            Eigenform { field: k, values, eigenvalues: BTreeMap::new(), value_ideal_index, uncertain: comp.uncertain };
        let pos = form.values.iter().position(|v| !v.is_zero()).unwrap();
        for &p in &primes {
            let b = ops.get(p)?;
            let tv = apply(&form.field, b, &form.values);
            let lambda = form.field.div(&tv[pos], &form.values[pos]).unwrap();
            if !form.satisfies(b, &lambda) {
                if comp.uncertain {
                    continue;
                }
                return Err(Error::Internal(format!("eigen-equation fails at p = {p}")));
            }
            form.eigenvalues.insert(p, lambda);
        }
        out.push(form);
    }
    Ok(out)
}

use std::collections::{BTreeMap, HashMap};

use num_integer::Roots;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::ideal::{
    gross_lattice_form, ideal_norm_lattice, is_equivalent, left_order, mul_two_sided, neighbors_with, reduce,
    two_sided_prime, weight, RightIdeal,
};
use super::isometry::is_isometric;
use super::lattice::NormLattice;
use crate::arith::int::{is_prime, prime_divisors};
use crate::arith::{q, qf, QMatrix, Q};
use crate::error::{Error, Result};
use crate::quat::{local_splitting, OrderJson, QuaternionOrder};

/// Right ideal classes of an order with their invariants.
#[derive(Clone, Debug)]
pub struct ClassSet {
    pub order: QuaternionOrder,
    /// `reps[0]` is the unit ideal.
    pub reps: Vec<RightIdeal>,
    pub weights: Vec<u64>,
    pub left_orders: Vec<QuaternionOrder>,
    /// Class index to type index; `type_map[0] = 0`.
    pub type_map: Vec<usize>,
    pub al_perms: BTreeMap<u64, Vec<usize>>,
    pub mass: Q,
    gross: Vec<NormLattice>,
    keys: Vec<Vec<u64>>,
    buckets: HashMap<Vec<u64>, Vec<usize>>,
}

/// `∏_{p | disc D} (p − 1) · ∏_{p | level} (p + 1) / 12`.
pub fn mass_formula(o: &QuaternionOrder) -> Q {
    let num: i64 = prime_divisors(o.disc_d()).iter().map(|&p| p as i64 - 1).product::<i64>()
        * prime_divisors(o.level).iter().map(|&p| p as i64 + 1).product::<i64>();
    qf(num, 12)
}

/// The two smallest primes not dividing `disc(O)`.
pub fn neighbor_primes(o: &QuaternionOrder) -> [u64; 2] {
    let mut it = (2u64..).filter(|&p| is_prime(p) && o.reduced_discriminant % p != 0);
    [it.next().unwrap(), it.next().unwrap()]
}

fn key_bound(o: &QuaternionOrder) -> u64 {
    (o.reduced_discriminant as u64).sqrt() + 4
}

fn class_key(o: &QuaternionOrder, i: &RightIdeal, bound: u64) -> Result<Vec<u64>> {
    Ok(ideal_norm_lattice(o, i)?.theta(bound))
}

/// Number of leading Gross theta coefficients used for canonical ordering.
pub const ORDER_THETA_TERMS: u64 = 50;

impl ClassSet {
    pub fn h(&self) -> usize {
        self.reps.len()
    }

    pub fn type_count(&self) -> usize {
        self.type_map.iter().max().map_or(0, |m| m + 1)
    }

    /// Sizes `k_j` of the fibers of the class-to-type map.
    pub fn type_fibers(&self) -> Vec<usize> {
        let mut k = vec![0; self.type_count()];
        for &t in &self.type_map {
            k[t] += 1;
        }
        k
    }

    /// First class of each type.
    pub fn type_reps(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.type_count()];
        for (i, &t) in self.type_map.iter().enumerate() {
            if out[t] == usize::MAX {
                out[t] = i;
            }
        }
        out
    }

    /// Gross lattice of class `i`.
    pub fn gross_lattice(&self, i: usize) -> &NormLattice {
        &self.gross[i]
    }

    /// Index of the class of `j`. With `complete`, a unique candidate with a
    /// matching invariant is accepted without an equivalence test.
    pub fn find_class(&self, j: &RightIdeal, complete: bool) -> Result<usize> {
        let key = class_key(&self.order, j, key_bound(&self.order))?;
        let cands = self.buckets.get(&key).map(Vec::as_slice).unwrap_or(&[]);
        if complete && cands.len() == 1 {
            return Ok(cands[0]);
        }
        for &c in cands {
            if is_equivalent(&self.order, &self.reps[c], j)? {
                return Ok(c);
            }
        }
        Err(Error::Internal("ideal matches no class representative".into()))
    }

    /// Assembles a class set from representatives, recomputing derived data
    /// and checking the mass identity.
    pub fn from_parts(
        order: QuaternionOrder,
        reps: Vec<RightIdeal>,
        weights: Vec<u64>,
        type_map: Vec<usize>,
        al_perms: BTreeMap<u64, Vec<usize>>,
    ) -> Result<Self> {
        let mass = mass_formula(&order);
        let total = weights.iter().fold(Q::zero(), |s, &w| s + qf(1, w as i64));
        if total != mass || reps.len() != weights.len() || type_map.len() != reps.len() {
            return Err(Error::Domain("class data fails the mass identity".into()));
        }
        let kb = key_bound(&order);
        let mut keys = Vec::with_capacity(reps.len());
        let mut buckets: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
        let mut gross = Vec::with_capacity(reps.len());
        let mut left_orders = Vec::with_capacity(reps.len());
        for (i, r) in reps.iter().enumerate() {
            let k = class_key(&order, r, kb)?;
            buckets.entry(k.clone()).or_default().push(i);
            keys.push(k);
            gross.push(gross_lattice_form(&order, r)?);
            left_orders.push(left_order(&order, r)?);
        }
        Ok(ClassSet { order, reps, weights, left_orders, type_map, al_perms, mass, gross, keys, buckets })
    }

    /// Key of the canonical ordering: weight, leading Gross theta
    /// coefficients, Hermite basis.
    pub fn ordering_key(&self, i: usize) -> (u64, Vec<u64>, RightIdeal) {
        (self.weights[i], self.gross[i].theta(ORDER_THETA_TERMS - 1), self.reps[i].clone())
    }

    pub fn to_json(&self) -> ClassSetJson {
        ClassSetJson {
            schema_version: "1".into(),
            order: self.order.to_json(),
            reps: self
                .reps
                .iter()
                .map(|r| IdealJson {
                    basis: r.basis_algebra(&self.order).entries().iter().map(|v| v.to_string()).collect(),
                    norm: r.norm,
                })
                .collect(),
            weights: self.weights.clone(),
            type_map: self.type_map.clone(),
            al_perms: self.al_perms.iter().map(|(p, v)| (p.to_string(), v.clone())).collect(),
            mass: self.mass.to_string(),
        }
    }

    pub fn from_json(j: &ClassSetJson) -> Result<Self> {
        let order = QuaternionOrder::from_json(&j.order)?;
        let mut reps = Vec::with_capacity(j.reps.len());
        for r in &j.reps {
            if r.basis.len() != 16 {
                return Err(Error::Parse("ideal basis needs 16 entries".into()));
            }
            let mut b = [[0i64; 4]; 4];
            for row in 0..4 {
                let mut x = Vec::with_capacity(4);
                for s in &r.basis[4 * row..4 * row + 4] {
                    x.push(s.parse::<Q>().map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))?);
                }
                let c = order.coords(&crate::quat::QuatElement {
                    coords: [x[0].clone(), x[1].clone(), x[2].clone(), x[3].clone()],
                });
                for col in 0..4 {
                    if !c[col].is_integer() {
                        return Err(Error::Parse("ideal is not contained in the order".into()));
                    }
                    b[row][col] =
                        c[col].to_integer().to_i64().ok_or_else(|| Error::Parse("ideal entry overflow".into()))?;
                }
            }
            let ideal = RightIdeal { basis: b, norm: r.norm };
            if !ideal.is_valid(&order) {
                return Err(Error::Parse("stored ideal is not a right ideal of the stated norm".into()));
            }
            reps.push(ideal);
        }
        let mut al = BTreeMap::new();
        for (k, v) in &j.al_perms {
            al.insert(k.parse::<u64>().map_err(|e| Error::Parse(e.to_string()))?, v.clone());
        }
        ClassSet::from_parts(order, reps, j.weights.clone(), j.type_map.clone(), al)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealJson {
    pub basis: Vec<String>,
    pub norm: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSetJson {
    pub schema_version: String,
    pub order: OrderJson,
    pub reps: Vec<IdealJson>,
    pub weights: Vec<u64>,
    pub type_map: Vec<usize>,
    pub al_perms: BTreeMap<String, Vec<usize>>,
    pub mass: String,
}

/// Breadth-first closure of the unit class under neighbors at the two
/// smallest good primes, stopping once the weights reach the mass.
pub fn enumerate_classes(o: &QuaternionOrder) -> Result<ClassSet> {
    let mass = mass_formula(o);
    let kb = key_bound(o);
    let unit = RightIdeal::unit();
    let mut reps = vec![unit.clone()];
    let mut weights = vec![weight(o, &unit)?];
    let mut buckets: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    buckets.entry(class_key(o, &unit, kb)?).or_default().push(0);
    let mut total = qf(1, weights[0] as i64);
    for qp in neighbor_primes(o) {
        if total == mass {
            break;
        }
        let sp = local_splitting(o, qp, 1)?;
        let mut idx = 0;
        while idx < reps.len() && total < mass {
            for nb in neighbors_with(o, &reps[idx], &sp)? {
                let key = class_key(o, &nb, kb)?;
                let mut known = false;
                if let Some(cands) = buckets.get(&key) {
                    for &c in cands {
                        if is_equivalent(o, &reps[c], &nb)? {
                            known = true;
                            break;
                        }
                    }
                }
                if !known {
                    let r = reduce(o, &nb)?;
                    let w = weight(o, &r)?;
                    total += qf(1, w as i64);
                    buckets.entry(key).or_default().push(reps.len());
                    reps.push(r);
                    weights.push(w);
                    if total >= mass {
                        break;
                    }
                }
            }
            idx += 1;
        }
    }
    if total != mass {
        return Err(Error::Internal(format!("class enumeration reached mass {total}, expected {mass}")));
    }
    // canonical order with the unit class first
    let provisional =
        ClassSet::from_parts(o.clone(), reps.clone(), weights.clone(), vec![0; reps.len()], BTreeMap::new())?;
    let mut idx: Vec<usize> = (1..reps.len()).collect();
    let keys: Vec<_> = (0..reps.len()).map(|i| provisional.ordering_key(i)).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    idx.insert(0, 0);
    let reps: Vec<RightIdeal> = idx.iter().map(|&i| reps[i].clone()).collect();
    let weights: Vec<u64> = idx.iter().map(|&i| weights[i]).collect();
    let mut cs = ClassSet::from_parts(o.clone(), reps, weights, vec![0; idx.len()], BTreeMap::new())?;
    for p in prime_divisors(o.reduced_discriminant) {
        let perm = compute_al_perm(&cs, p)?;
        cs.al_perms.insert(p, perm);
    }
    cs.type_map = orbit_map(cs.h(), cs.al_perms.values());
    Ok(cs)
}

fn compute_al_perm(cs: &ClassSet, p: u64) -> Result<Vec<usize>> {
    let pr = two_sided_prime(&cs.order, p)?;
    let mut perm = Vec::with_capacity(cs.h());
    for r in &cs.reps {
        let j = mul_two_sided(&cs.order, r, &pr, p)?;
        perm.push(cs.find_class(&j, true)?);
    }
    Ok(perm)
}

/// Orbits of the group generated by the permutations, numbered by first
/// appearance.
fn orbit_map<'a>(h: usize, perms: impl Iterator<Item = &'a Vec<usize>> + Clone) -> Vec<usize> {
    let mut map = vec![usize::MAX; h];
    let mut next = 0;
    for start in 0..h {
        if map[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        map[start] = next;
        while let Some(i) = stack.pop() {
            for p in perms.clone() {
                let j = p[i];
                if map[j] == usize::MAX {
                    map[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    map
}

/// Permutation of classes induced by `I ↦ I·P` for the two-sided prime
/// `P` over `p | disc(O)`.
pub fn atkin_lehner_perm(cs: &ClassSet, p: u64) -> Result<Vec<usize>> {
    if cs.order.reduced_discriminant % p != 0 || !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not a prime dividing the discriminant")));
    }
    match cs.al_perms.get(&p) {
        Some(v) => Ok(v.clone()),
        None => compute_al_perm(cs, p),
    }
}

/// Types by isometry of the Gross lattices of the left orders, numbered by
/// first appearance.
pub fn type_partition(cs: &ClassSet) -> Vec<usize> {
    let h = cs.h();
    let mut map = vec![usize::MAX; h];
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..h {
        let found = reps
            .iter()
            .position(|&r| cs.weights[r] == cs.weights[i] && is_isometric(&cs.gross[r].form, &cs.gross[i].form));
        map[i] = match found {
            Some(t) => t,
            None => {
                reps.push(i);
                reps.len() - 1
            }
        };
    }
    map
}

impl ClassSet {
    /// Matrix of the weights `diag(1/w_i)`.
    pub fn inverse_weights(&self) -> QMatrix {
        QMatrix::from_fn(self.h(), self.h(), |i, j| if i == j { qf(1, self.weights[i] as i64) } else { q(0) })
    }

    pub fn keys(&self) -> &[Vec<u64>] {
        &self.keys
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{algebra_of_discriminant, eichler_order, maximal_order};

    #[test]
    fn disc11_classes() {
        let o = maximal_order(&algebra_of_discriminant(11).unwrap()).unwrap();
        let cs = enumerate_classes(&o).unwrap();
        assert_eq!(cs.h(), 2);
        let mut w = cs.weights.clone();
        w.sort();
        assert_eq!(w, vec![2, 3]);
        assert_eq!(cs.mass, qf(5, 6));
        assert!(!is_equivalent(&o, &cs.reps[0], &cs.reps[1]).unwrap());
        assert_eq!(type_partition(&cs), cs.type_map);
        assert_eq!(cs.type_count(), 2);
    }

    #[test]
    fn disc19_and_65() {
        let o = maximal_order(&algebra_of_discriminant(19).unwrap()).unwrap();
        let cs = enumerate_classes(&o).unwrap();
        assert_eq!(cs.mass, qf(3, 2));
        assert_eq!(cs.type_count(), 2);
        assert_eq!(type_partition(&cs), cs.type_map);
        let omax = maximal_order(&algebra_of_discriminant(13).unwrap()).unwrap();
        let e = eichler_order(&omax, 5).unwrap();
        let cs = enumerate_classes(&e).unwrap();
        assert_eq!(cs.mass, q(6));
        assert_eq!(cs.type_count(), 3);
        assert_eq!(type_partition(&cs), cs.type_map);
        for perm in cs.al_perms.values() {
            assert!((0..cs.h()).all(|i| perm[perm[i]] == i));
        }
    }

    #[test]
    fn json_round_trip() {
        let o = maximal_order(&algebra_of_discriminant(37).unwrap()).unwrap();
        let cs = enumerate_classes(&o).unwrap();
        let j = cs.to_json();
        let back = ClassSet::from_json(&j).unwrap();
        assert_eq!(back.reps, cs.reps);
        assert_eq!(back.to_json(), j);
    }
}

use super::*;
use crate::arith::int::prime_divisors;
use crate::hecke::{eigenforms, subspace, HeckeOperators, SubspaceKind};
use crate::ideals::{enumerate_classes, ClassSet};
use crate::quat::{algebra_of_discriminant, maximal_order};

fn classes(d: u64) -> ClassSet {
    enumerate_classes(&maximal_order(&algebra_of_discriminant(d).unwrap()).unwrap()).unwrap()
}

#[test]
fn gross_lattices() {
    let cs = classes(11);
    let dets: Vec<i64> = (0..cs.h()).map(|i| gross_lattice(&cs, i).det()).collect();
    assert!(dets.iter().all(|&d| d == dets[0] && d > 0));
    let table = ThetaTable::compute(&cs, 400);
    let g0 = (1..).find(|&n| table.r(0, n) > 0).unwrap();
    assert!(g0 == 3 || g0 == 4);
    for i in 0..cs.h() {
        assert_eq!(table.r(i, 0), 1);
        for n in 0..=400 {
            if n % 4 == 1 || n % 4 == 2 {
                assert_eq!(table.r(i, n), 0);
            }
        }
        // norms of a few basis combinations
        let g = gross_lattice(&cs, i);
        for v in [[1, 0, 0], [0, 1, 0], [1, -1, 2], [3, 1, -1]] {
            assert!(matches!(g.norm(&v).rem_euclid(4), 0 | 3));
        }
    }
    let back = ThetaTable::from_bytes(&table.to_bytes()).unwrap();
    assert_eq!(back, table);
}

#[test]
fn census_partitions_theta() {
    let cs = classes(11);
    let table = ThetaTable::compute(&cs, 200);
    for i in 0..cs.h() {
        for n in 1..=200u64 {
            let c = embedding_census(&cs, i, n).unwrap();
            assert_eq!(c.values().sum::<u64>(), table.r(i, n), "class {i}, n {n}");
            if is_fundamental(-(n as i64)) {
                assert!(c.keys().all(|&f| f == 1));
            }
            if n % 4 == 0 && is_fundamental(-(n as i64) / 4) && (n / 4) % 2 == 1 {
                assert!(c.keys().all(|&f| f == 1 || f == 2));
            }
        }
    }
}

#[test]
fn global_embedding_identity() {
    for d in [11u64, 23] {
        let cs = classes(d);
        let table = ThetaTable::compute(&cs, 500);
        for delta in fundamental_discriminants(501) {
            let n = delta.unsigned_abs();
            let lhs = (0..cs.h()).fold(crate::arith::q(0), |s, i| {
                s + crate::arith::qf((table.r(i, n) * unit_index(delta)) as i64, cs.weights[i] as i64)
            });
            let local: u64 =
                prime_divisors(d).iter().map(|&p| local_embedding_number(delta, p, PrimeKind::Ramified)).product();
            let rhs = crate::arith::q((quad_class_number(delta).unwrap() * local) as i64);
            assert_eq!(lhs, rhs, "disc {d}, Δ {delta}");
        }
    }
}

#[test]
fn periods_and_shimura() {
    let cs = classes(11);
    let sub = subspace(&cs, SubspaceKind::Cuspidal).unwrap();
    let mut ops = HeckeOperators::new(&cs);
    let phi = crate::hecke::eigenforms_with(&mut ops, &sub).unwrap().remove(0);
    let bound = 3000;
    let table = ThetaTable::compute(&cs, bound);
    let s = WaldspurgerSeries::compute(&phi, &cs, &table, bound).unwrap();
    for n in 0..=bound {
        if n % 4 == 1 || n % 4 == 2 {
            assert!(s.is_zero(n));
        }
    }
    let ds = period_dataset(&s, &cs, 1001).unwrap();
    for r in &ds {
        if !r.in_xd {
            assert!(r.a.iter().all(|c| c == &crate::arith::q(0)));
        }
        if let Some(p) = &r.period {
            let back: Vec<_> = p.iter().map(|&x| crate::arith::q(x * r.c as i64)).collect();
            assert_eq!(back, r.a);
        }
    }
    let l7 = phi.eigenvalues.get(&7).cloned().unwrap_or_else(|| phi.field.from_int(-2));
    assert!(shimura_check(&s, &l7, -3, 7, 1).unwrap());
    let l5 = phi.eigenvalues[&5].clone();
    assert!(shimura_check(&s, &l5, -15, 5, 1).unwrap());
    let l3 = phi.eigenvalues[&3].clone();
    for delta in [-3i64, -4, -7, -8, -15] {
        assert!(shimura_check(&s, &l3, delta, 3, 0).unwrap());
        assert!(shimura_check(&s, &l3, delta, 3, 1).unwrap());
        assert!(shimura_check(&s, &l3, delta, 3, 2).unwrap());
    }
    let _ = eigenforms;
}

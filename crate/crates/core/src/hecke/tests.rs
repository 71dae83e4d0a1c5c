use super::*;
use crate::arith::{q, NumberField};
use crate::ideals::{enumerate_classes, ClassSet};
use crate::quat::{algebra_of_discriminant, eichler_order, maximal_order};

fn classes(d: u64) -> ClassSet {
    enumerate_classes(&maximal_order(&algebra_of_discriminant(d).unwrap()).unwrap()).unwrap()
}

fn eichler_classes(d: u64, m: u64) -> ClassSet {
    let omax = maximal_order(&algebra_of_discriminant(d).unwrap()).unwrap();
    enumerate_classes(&eichler_order(&omax, m).unwrap()).unwrap()
}

/// `a_p = p + 1 − #E(F_p)` for `y² + y = x³ − x² − 10x − 20`.
fn a_p_curve11(p: i64) -> i64 {
    let mut pts = 1;
    for x in 0..p {
        for y in 0..p {
            let l = (y * y + y).rem_euclid(p);
            let r = (x * x * x - x * x - 10 * x - 20).rem_euclid(p);
            if l == r {
                pts += 1;
            }
        }
    }
    p + 1 - pts
}

#[test]
fn brandt_invariants_and_norm_oracle() {
    for d in [11u64, 23, 37, 41] {
        let cs = classes(d);
        let mut mats = Vec::new();
        for p in [2u64, 3, 5] {
            if d % p == 0 {
                continue;
            }
            let b = brandt_matrix(&cs, p).unwrap();
            assert!(b.row_sums_ok());
            assert!(b.is_weighted_symmetric(&cs.weights));
            for perm in cs.al_perms.values() {
                assert!(b.commutes_with_perm(perm));
            }
            if p <= 3 {
                assert_eq!(b, brandt_matrix_by_norms(&cs, p).unwrap(), "disc {d}, p {p}");
            }
            mats.push(b);
        }
        for x in &mats {
            for y in &mats {
                assert!(x.commutes_with(y));
            }
        }
    }
    assert!(brandt_matrix(&classes(11), 11).is_err());
}

#[test]
fn disc11_eigenvalues_match_point_counts() {
    let cs = classes(11);
    let sub = subspace(&cs, SubspaceKind::Cuspidal).unwrap();
    assert_eq!(sub.dim(), 1);
    let forms = eigenforms(&sub, &cs).unwrap();
    assert_eq!(forms.len(), 1);
    let f = &forms[0];
    assert_eq!(f.degree(), 1);
    for p in [2u64, 3, 5, 7, 13] {
        let l = &f.eigenvalues[&p];
        assert_eq!(l, &f.field.from_int(a_p_curve11(p as i64)), "p = {p}");
    }
    // values {2, −3} up to sign, paired with weights
    let mut pairs: Vec<(u64, Q)> = (0..2).map(|i| (cs.weights[i], f.field.to_power(&f.values[i])[0].clone())).collect();
    pairs.sort();
    let s = if pairs[0].1 > q(0) { q(1) } else { q(-1) };
    assert_eq!(pairs, vec![(2, q(2) * &s), (3, q(-3) * &s)]);
}

use crate::arith::Q;

#[test]
fn dimensions_and_condition() {
    let cs19 = classes(19);
    assert_eq!(subspace(&cs19, SubspaceKind::NInvariantCuspidal).unwrap().dim(), 1);
    let g = goldfeld_condition_for(&cs19).unwrap();
    assert_eq!((g.a, g.b, g.mass.clone()), (Verdict::True, true, q(3) / q(2)));

    let cs65 = eichler_classes(13, 5);
    let sn = subspace(&cs65, SubspaceKind::NInvariantCuspidal).unwrap();
    assert_eq!(sn.dim(), 2);
    assert_eq!(sub_dim(&cs65, SubspaceKind::Cuspidal), cs65.h() - 1);
    let g = goldfeld_condition_for(&cs65).unwrap();
    assert_eq!((g.a, g.b, g.dim_sn, g.dim_sn_new), (Verdict::True, true, 2, 2));
    let forms = eigenforms(&sn, &cs65).unwrap();
    assert_eq!(forms.len(), 1);
    // Q(√3): maximal order discriminant 12
    assert_eq!(forms[0].field.basis_discriminant(), 12.into());
    for f in &forms {
        for v in &f.values {
            assert!(v.is_integral());
        }
    }

    let cs11 = classes(11);
    assert!(!goldfeld_condition_for(&cs11).unwrap().b);
}

fn sub_dim(cs: &ClassSet, k: SubspaceKind) -> usize {
    subspace(cs, k).unwrap().dim()
}

#[test]
fn congruence_forms() {
    for (d, p) in [(19u64, 3u64), (37, 3)] {
        let cs = classes(d);
        let v = congruence_form(&cs, p).unwrap();
        assert!(v.iter().all(|x| (x - 1).rem_euclid(p as i64) == 0));
        let f: Vec<Q> = expand_types(&cs, &v).into_iter().map(q).collect();
        assert!(is_cuspidal(&cs, &f));
        assert!(is_n_invariant(&cs, &f));
    }
    assert!(congruence_form(&classes(11), 3).is_err());
}

#[test]
fn new_space_at_level() {
    let cs = eichler_classes(3, 11);
    let old = old_space(&cs).unwrap();
    assert!(old.rows() >= 1);
    let new = subspace(&cs, SubspaceKind::NewNInvariantCuspidal).unwrap();
    let sn = subspace(&cs, SubspaceKind::NInvariantCuspidal).unwrap();
    assert!(new.dim() <= sn.dim());
    // T_p stability of the new space
    let b = brandt_matrix(&cs, 2).unwrap().to_q();
    for r in 0..new.dim() {
        let img = b.mul_vec(new.basis.row(r));
        let mut m = new.basis.clone();
        m.push_row(img);
        assert_eq!(m.rank(), new.dim());
    }
}

#[test]
fn json_round_trip() {
    let cs = classes(23);
    let sub = subspace(&cs, SubspaceKind::Cuspidal).unwrap();
    let f = eigenforms(&sub, &cs).unwrap().remove(0);
    let j = f.to_json(cs.order.to_json());
    let g = Eigenform::from_json(&serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap()).unwrap();
    assert_eq!(f.values, g.values);
    assert_eq!(f.eigenvalues, g.eigenvalues);
    let _: &NumberField = &g.field;
}

#[test]
fn scanner_small() {
    let rows = scan(200, false).unwrap();
    let both: Vec<u64> = rows.iter().filter(|r| r.both()).map(|r| r.prime).collect();
    assert_eq!(both, vec![19, 37, 127, 163, 181]);
    assert!(rows.iter().all(|r| r.cond_a != Some(Verdict::Uncertain)));
}

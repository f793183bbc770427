mod common;

use std::sync::Arc;

use common::*;
use omlcond::classical::{boolean_bridge, FiniteProbabilitySpace};
use omlcond::conditioning::extend_to_condition;
use omlcond::example::{example_state, ExampleParams, A, A_ORTHO, B};
use omlcond::independence::{
    check_prop21, check_prop21_all, check_prop22, classical_independence_reduction, independence_verdict,
    is_independent, IndependenceError, IndependenceQuery, Prop22Part,
};
use omlcond::{
    boolean_algebra, construct_fk, ConditionalSystem, ConditionalTable, ElementId, Rational, TableState, WeightVector,
};
use proptest::prelude::*;

fn q(b: ElementId, a: ElementId, c: ElementId) -> IndependenceQuery {
    IndependenceQuery { b, a, c }
}

#[test]
fn example_verdicts() {
    let f = example_state(&ExampleParams::default()).unwrap();
    let one = f.lattice().one();
    let v = independence_verdict(&f, q(B, A, one)).unwrap();
    assert!(!v.independent);
    assert_eq!((v.conditioned, v.reference), (r("1/5"), r("29/100")));
    assert!(is_independent(&f, q(one, one, one)).unwrap());
    assert!(is_independent(&f, q(one, A, one)).unwrap());
}

#[test]
fn independence_is_not_symmetric() {
    let f = example_state(&ExampleParams::default()).unwrap();
    let t = extend_to_condition(&f, B, &[(A, r("1/10"))], &[(A, r("1/10"))]).unwrap();
    let one = t.lattice().one();
    assert!(is_independent(&t, q(A, B, one)).unwrap());
    assert!(!is_independent(&t, q(B, A, one)).unwrap());

    // and a search over the whole table finds such a pair
    let conds = t.conditions();
    let found = conds.iter().any(|&x| {
        conds.iter().any(|&y| {
            is_independent(&t, q(x, y, one)).unwrap_or(false) && is_independent(&t, q(y, x, one)) == Ok(false)
        })
    });
    assert!(found);
}

#[test]
fn gate_refuses_ill_posed_queries() {
    let f = example_state(&ExampleParams::default()).unwrap();
    let one = f.lattice().one();
    // f(a', a) = 0
    assert_eq!(
        is_independent(&f, q(B, A, A_ORTHO)),
        Err(IndependenceError::QueryNotWellPosed { value: r("0") })
    );
    assert!(matches!(is_independent(&f, q(A, B, one)), Err(IndependenceError::ConditionNotInDomain(_))));
    assert!(matches!(is_independent(&f, q(ElementId(99), A, one)), Err(IndependenceError::InvalidElement(_))));
}

#[test]
fn gate_on_every_constructed_pair() {
    for (_, l) in suite_lattices() {
        for family in orthogonal_families(&l, 3) {
            let supports = canonical_supports(&l, &family);
            let k = weight_vectors(family.len(), 3).remove(0);
            let f = construct_fk(&l, &family, supports, WeightVector::new(k).unwrap()).unwrap();
            for &a in f.domain().members() {
                for &c in f.domain().members() {
                    let gate = f.evaluate(c, a).unwrap();
                    let res = is_independent(&f, q(l.one(), a, c));
                    assert_eq!(res.is_ok(), gate.is_one());
                }
            }
        }
    }
}

#[test]
fn prop21_examples() {
    let f = example_state(&ExampleParams::default()).unwrap();
    let l = f.lattice().clone();
    let rep = check_prop21(&l, &[A, A_ORTHO], f.supports().to_vec(), f.weights().clone(), B).unwrap();
    assert!(rep.passed());
    assert!(rep.instances > 0);

    let b2 = Arc::new(boolean_algebra(2).unwrap());
    let atoms = b2.atoms();
    let supports = canonical_supports(&b2, &atoms);
    let k = WeightVector::new(vec![r("1/2"), r("1/2")]).unwrap();
    let rep = check_prop21_all(&b2, &atoms, supports.clone(), k.clone()).unwrap();
    assert!(rep.passed());
    let f = construct_fk(&b2, &atoms, supports.clone(), k.clone()).unwrap();
    for &b in &atoms {
        for (i, &ai) in atoms.iter().enumerate() {
            let indep = is_independent(&f, q(b, ai, b2.one())).unwrap();
            assert_eq!(indep, f.evaluate(b, b2.one()).unwrap() == *supports[i].value(b));
        }
    }
    for &ai in &atoms {
        assert!(is_independent(&f, q(b2.one(), ai, b2.one())).unwrap());
    }

    // supports breaking α_i(a_j) = δ_ij are refused
    let uniform = canonical_supports(&b2, &[b2.one()]).remove(0);
    assert!(matches!(
        check_prop21(&b2, &atoms, vec![supports[0].clone(), uniform], k, atoms[0]),
        Err(IndependenceError::Conditioning(_) | IndependenceError::HypothesisViolated(_))
    ));
}

#[test]
fn prop21_on_a_finer_weight_grid() {
    let mut checked = 0;
    for (name, l) in suite_lattices() {
        for family in orthogonal_families(&l, 4).into_iter().filter(|f| f.len() >= 2) {
            let supports = canonical_supports(&l, &family);
            for k in weight_vectors(family.len(), 8) {
                let rep = check_prop21_all(&l, &family, supports.clone(), WeightVector::new(k).unwrap()).unwrap();
                assert!(rep.passed(), "{name}: {rep}");
                checked += 1;
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn prop21_zero_weight_is_observed_not_failed() {
    let b2 = Arc::new(boolean_algebra(2).unwrap());
    let atoms = b2.atoms();
    let supports = canonical_supports(&b2, &atoms);
    let rep = check_prop21_all(&b2, &atoms, supports, WeightVector::new(vec![r("0"), r("1")]).unwrap()).unwrap();
    assert!(rep.passed());
    assert!(!rep.observations.is_empty());
}

#[test]
fn prop22_parts_on_constructed_states() {
    for (name, l) in suite_lattices() {
        for family in orthogonal_families(&l, 3) {
            let supports = canonical_supports(&l, &family);
            for k in weight_vectors(family.len(), 3) {
                let f = construct_fk(&l, &family, supports.clone(), WeightVector::new(k).unwrap()).unwrap();
                let rep = check_prop22(f.domain(), &f, &Prop22Part::ALL).unwrap();
                assert!(rep.passed(), "{name}: {rep}");
                assert!(!rep.notes.is_empty());
            }
        }
    }
}

#[test]
fn prop22_symmetry_matches_product_rule() {
    let space = FiniteProbabilitySpace::new(vec![r("1/2"), r("1/4"), r("1/4")]).unwrap();
    let (l, system, table) = boolean_bridge(&space).unwrap();
    let rep = check_prop22(&system, &table, &Prop22Part::ALL).unwrap();
    assert!(rep.passed(), "{rep}");
    let mu = event_measures(space.weights());
    let one = l.one();
    for &a in system.members() {
        for &b in system.members() {
            let v = is_independent(&table, q(b, a, one)).unwrap();
            assert_eq!(v, mu[a.0 & b.0] == &mu[a.0] * &mu[b.0]);
        }
    }
}

#[test]
fn prop22_refuses_non_conditional_states() {
    let b2 = Arc::new(boolean_algebra(2).unwrap());
    let one = b2.one();
    let cs = ConditionalSystem::new(b2.clone(), [one]).unwrap();
    let mut t = TableState::new(b2);
    t.insert_condition(one, ["0", "1/2", "1/3", "1"].map(r).to_vec());
    assert!(matches!(check_prop22(&cs, &t, &Prop22Part::ALL), Err(IndependenceError::HypothesisViolated(_))));
    assert_eq!(Prop22Part::from_number(4), Some(Prop22Part::Join));
    assert_eq!(Prop22Part::from_number(0), None);
    assert_eq!(Prop22Part::from_number(5), None);
}

#[test]
fn classical_reduction_examples() {
    let coins = FiniteProbabilitySpace::uniform(4).unwrap();
    // atoms: HH, HT, TH, TT
    let first_heads = ev(&[1, 2]);
    let second_heads = ev(&[1, 3]);
    assert_eq!(classical_independence_reduction(&coins, first_heads, second_heads).unwrap(), (true, true));
    assert_eq!(classical_independence_reduction(&coins, first_heads, first_heads).unwrap(), (false, false));
    assert_eq!(classical_independence_reduction(&coins, first_heads, coins.omega()).unwrap(), (true, true));
    let skew = FiniteProbabilitySpace::new(vec![r("1"), r("0")]).unwrap();
    assert!(classical_independence_reduction(&skew, ev(&[2]), ev(&[1])).is_err());
}

fn space_strategy() -> impl Strategy<Value = FiniteProbabilitySpace> {
    prop::collection::vec(0i64..=6, 1..=4).prop_filter_map("all zero", |w| {
        let total: i64 = w.iter().sum();
        (total > 0).then(|| FiniteProbabilitySpace::new(w.iter().map(|&x| Rational::new(x, total)).collect()).unwrap())
    })
}

proptest! {
    #[test]
    fn reduction_booleans_agree(space in space_strategy()) {
        for a in space.positive_events().collect::<Vec<_>>() {
            for b in space.events() {
                let (x, y) = classical_independence_reduction(&space, a, b).unwrap();
                prop_assert_eq!(x, y);
            }
        }
    }
}

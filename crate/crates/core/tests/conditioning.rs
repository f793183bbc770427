mod common;

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use common::*;
use omlcond::conditioning::{check_construction, decomposition_bounds, extend_to_condition};
use omlcond::example::{example_lattice, example_state, ExampleParams, A, A_ORTHO, B, B_ORTHO};
use omlcond::states::state_from_block_measures;
use omlcond::{
    boolean_algebra, construct_fk, construct_fk_relaxed, generate_cs_from_family, verify_conditional_state,
    verify_cs, Axiom, ConditionalState, ConditionalSystem, ConditionalTable, ConditioningError, ElementId,
    FiniteOml, Rational, TableState, WeightVector,
};
use proptest::prelude::*;

fn set(xs: &[ElementId]) -> BTreeSet<ElementId> {
    xs.iter().copied().collect()
}

fn example() -> ConditionalState {
    example_state(&ExampleParams::default()).unwrap()
}

#[test]
fn generated_systems() {
    let l = example_lattice();
    assert_eq!(generate_cs_from_family(&l, &[A]).unwrap().members(), &set(&[A]));
    let cs = generate_cs_from_family(&l, &[A, A_ORTHO]).unwrap();
    assert_eq!(cs.members(), &set(&[A, A_ORTHO, l.one()]));
    assert!(verify_cs(&l, cs.members()).passed());

    let b3 = Arc::new(boolean_algebra(3).unwrap());
    let cs = generate_cs_from_family(&b3, &b3.atoms()).unwrap();
    assert_eq!(cs.len(), 7);
    assert!(!cs.contains(b3.zero()));
}

#[test]
fn cs_verifier() {
    let l = example_lattice();
    assert!(verify_cs(&l, &set(&[l.one()])).passed());
    let r = verify_cs(&l, &set(&[A, B]));
    assert!(r.has(Axiom::CsJoin));
    assert!(matches!(
        ConditionalSystem::new(l.clone(), [A, B]),
        Err(ConditioningError::NotConditionalSystem(_))
    ));
    assert!(verify_cs(&l, &set(&[l.zero(), l.one()])).has(Axiom::CsZero));

    let b2 = boolean_algebra(2).unwrap();
    // {p} < 1 needs p⊥ ∧ 1 = q
    let r = verify_cs(&b2, &set(&[ElementId(1), ElementId(3)]));
    assert!(r.has(Axiom::CsRelativeComplement));

    for (name, l) in suite_lattices() {
        let all: BTreeSet<ElementId> = l.elements().filter(|&x| x != l.zero()).collect();
        assert!(verify_cs(&l, &all).passed(), "{name}");
    }
}

#[test]
fn example_values() {
    let f = example();
    let one = f.lattice().one();
    assert_eq!(f.evaluate(B, one).unwrap(), r("29/100"));
    assert_eq!(f.evaluate(A, one).unwrap(), r("1/10"));
    assert_eq!(f.evaluate(A_ORTHO, one).unwrap(), r("9/10"));
    assert_eq!(f.evaluate(B_ORTHO, one).unwrap(), r("71/100"));
    assert_eq!(f.evaluate(B_ORTHO, one).unwrap(), r("1") - r("29/100"));
    for &c in f.domain().members() {
        assert!(f.evaluate(c, c).unwrap().is_one());
    }
    assert!(verify_conditional_state(f.domain(), &f).passed());
    assert!(check_construction(&f).passed());
    assert_eq!(f.evaluate(B, B), Err(ConditioningError::ConditionNotInDomain(B)));
}

#[test]
fn single_member_family() {
    let l = example_lattice();
    let alpha = state_from_block_measures(&l, &[vec![r("1"), r("0")], vec![r("1/5"), r("4/5")]]).unwrap();
    let f = construct_fk(&l, &[A], vec![alpha.clone()], WeightVector::new(vec![r("1")]).unwrap()).unwrap();
    for d in l.elements() {
        assert_eq!(&f.evaluate(d, A).unwrap(), alpha.value(d));
    }
}

#[test]
fn construction_errors() {
    let l = example_lattice();
    let alpha = state_from_block_measures(&l, &[vec![r("1"), r("0")], vec![r("1/2"), r("1/2")]]).unwrap();
    let alpha2 = state_from_block_measures(&l, &[vec![r("0"), r("1")], vec![r("1/2"), r("1/2")]]).unwrap();
    let k = |a: &str, b: &str| WeightVector::new(vec![r(a), r(b)]).unwrap();
    let pair = vec![alpha.clone(), alpha2.clone()];

    assert_eq!(
        construct_fk(&l, &[A, A_ORTHO], pair.clone(), k("0", "1")).unwrap_err(),
        ConditioningError::WeightNotPositive { index: 0 }
    );
    assert!(matches!(
        construct_fk(&l, &[A, B], pair.clone(), k("1/2", "1/2")),
        Err(ConditioningError::FamilyNotOrthogonal(..))
    ));
    assert!(matches!(
        construct_fk(&l, &[A, A_ORTHO], vec![alpha2.clone(), alpha.clone()], k("1/2", "1/2")),
        Err(ConditioningError::SupportMismatch { index: 0, .. })
    ));
    assert!(matches!(
        construct_fk(&l, &[A], pair.clone(), k("1/2", "1/2")),
        Err(ConditioningError::LengthMismatch { .. })
    ));
    assert!(matches!(WeightVector::new(vec![r("1/2"), r("1/3")]), Err(ConditioningError::WeightsNotNormalized(_))));

    let relaxed = construct_fk_relaxed(&l, &[A, A_ORTHO], pair, k("0", "1")).unwrap();
    assert_eq!(relaxed.evaluate(B, A), Err(ConditioningError::ZeroWeightCondition(A)));
    assert_eq!(relaxed.evaluate(B, A_ORTHO).unwrap(), r("1/2"));
    assert_eq!(relaxed.evaluate(A_ORTHO, l.one()).unwrap(), r("1"));
}

#[test]
fn c2_violation_is_reported() {
    let l = example_lattice();
    let cs = ConditionalSystem::new(l.clone(), [l.one()]).unwrap();
    let mut t = TableState::new(l.clone());
    t.insert_condition(l.one(), ["0", "1/2", "1/2", "1/2", "1/2", "1/2"].map(r).to_vec());
    let rep = verify_conditional_state(&cs, &t);
    let v = rep.violations.iter().find(|v| v.axiom == Axiom::C2).unwrap();
    assert_eq!(v.witness, vec![l.one()]);
    assert!(rep.has(Axiom::C1));
}

#[test]
fn extension_examples() {
    let f = example();
    let bounds = decomposition_bounds(&f, A, B).unwrap();
    assert_eq!(bounds.on_b, (r("0"), r("10/29")));
    assert_eq!(bounds.on_b_ortho, (r("0"), r("10/71")));

    let t = extend_to_condition(&f, B, &[(A, r("10/29"))], &[(A, r("0"))]).unwrap();
    assert_eq!(t.value(A, B), Some(r("10/29")));
    assert_eq!(t.value(A, B_ORTHO), Some(r("0")));
    let one = f.lattice().one();
    // the decomposition over {b, b'} holds at every d
    for d in f.lattice().elements() {
        let rhs = r("29/100") * t.value(d, B).unwrap() + r("71/100") * t.value(d, B_ORTHO).unwrap();
        assert_eq!(t.value(d, one).unwrap(), rhs);
    }

    let t = extend_to_condition(&f, B, &[(A, r("1/10"))], &[(A, r("1/10"))]).unwrap();
    assert_eq!(t.value(A, B), t.value(A, one));

    assert!(matches!(
        extend_to_condition(&f, B, &[(A, r("1/2"))], &[]),
        Err(ConditioningError::NotAStateProposal { .. })
    ));
    assert!(matches!(
        extend_to_condition(&f, B, &[(A, r("1/2"))], &[(A, r("0"))]),
        Err(ConditioningError::ExtensionInconsistent { .. })
    ));
    assert!(matches!(
        extend_to_condition(&f, A, &[], &[]),
        Err(ConditioningError::ConditionAlreadyInDomain(_))
    ));
}

/// A conditional state on `{1}` that is not of the constructed form, and one
/// over a system with two orthogonal halves.
#[test]
fn tables_are_checked_on_their_own() {
    let l = Arc::new(boolean_algebra(2).unwrap());
    let (p, q, one) = (ElementId(1), ElementId(2), ElementId(3));
    let cs = ConditionalSystem::new(l.clone(), [p, q, one]).unwrap();
    let mut t = TableState::new(l.clone());
    t.insert_condition(p, ["0", "1", "0", "1"].map(r).to_vec());
    t.insert_condition(q, ["0", "0", "1", "1"].map(r).to_vec());
    t.insert_condition(one, ["0", "1/3", "2/3", "1"].map(r).to_vec());
    assert!(verify_conditional_state(&cs, &t).passed());
    t.insert_condition(p, ["0", "1", "1/2", "1"].map(r).to_vec());
    let rep = verify_conditional_state(&cs, &t);
    assert!(rep.has(Axiom::C1));
    assert!(rep.has(Axiom::C3));
}

struct Instance {
    lattice: Arc<FiniteOml>,
    family: Vec<ElementId>,
    k: Vec<Rational>,
}

fn instances() -> &'static [Instance] {
    static CELL: OnceLock<Vec<Instance>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out = Vec::new();
        for (_, l) in suite_lattices() {
            for family in orthogonal_families(&l, 4) {
                for k in weight_vectors(family.len(), 6) {
                    out.push(Instance { lattice: l.clone(), family: family.clone(), k });
                }
            }
        }
        out
    })
}

fn build(i: &Instance) -> ConditionalState {
    let supports = canonical_supports(&i.lattice, &i.family);
    construct_fk(&i.lattice, &i.family, supports, WeightVector::new(i.k.clone()).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn constructed_states_satisfy_axioms(idx in 0..instances().len()) {
        let inst = &instances()[idx];
        let f = build(inst);
        let l = &inst.lattice;
        prop_assert!(verify_conditional_state(f.domain(), &f).passed());
        prop_assert!(verify_cs(l, f.domain().members()).passed());
        let top = f.top();
        for (i, &a) in inst.family.iter().enumerate() {
            for d in l.elements() {
                prop_assert_eq!(&f.evaluate(d, a).unwrap(), f.supports()[i].value(d));
            }
            prop_assert_eq!(f.evaluate(a, top).unwrap(), inst.k[i].clone());
        }
        for &c in f.domain().members() {
            prop_assert!(f.evaluate(l.one(), c).unwrap().is_one());
            prop_assert!(f.evaluate(l.zero(), c).unwrap().is_zero());
            for d in l.elements() {
                prop_assert_eq!(f.evaluate(d, c).ok(), oracle_fk(l, &inst.family, f.supports(), &inst.k, d, c));
            }
        }
    }

    #[test]
    fn normalizer_is_additive(idx in 0..instances().len()) {
        let inst = &instances()[idx];
        let f = build(inst);
        let l = &inst.lattice;
        let members: Vec<ElementId> = f.domain().members().iter().copied().collect();
        for &c1 in &members {
            for &c2 in &members {
                if !l.is_orthogonal(c1, c2) {
                    continue;
                }
                let j = l.join(c1, c2);
                let kj = f.normalizer(j).unwrap();
                prop_assert_eq!(kj.clone(), f.normalizer(c1).unwrap() + f.normalizer(c2).unwrap());
                prop_assert_eq!(f.evaluate(c1, j).unwrap(), f.normalizer(c1).unwrap() / kj);
            }
        }
    }

    #[test]
    fn generated_systems_are_systems(idx in 0..instances().len()) {
        let inst = &instances()[idx];
        let cs = generate_cs_from_family(&inst.lattice, &inst.family).unwrap();
        prop_assert!(verify_cs(&inst.lattice, cs.members()).passed());
        prop_assert_eq!(cs.len(), (1usize << inst.family.len()) - 1);
    }

    #[test]
    fn extension_accepted_iff_within_bounds(p in 0i64..=400) {
        let f = example();
        let x = Rational::new(p, 400);
        let accepted = extend_to_condition(&f, B, &[(A, x.clone())], &[]).is_ok();
        prop_assert_eq!(accepted, x <= r("10/29"));
    }

    #[test]
    fn extension_with_both_columns(p in 0i64..=40, q in 0i64..=40) {
        let f = example();
        let (x, y) = (Rational::new(p, 40), Rational::new(q, 40));
        let ok = extend_to_condition(&f, B, &[(A, x.clone())], &[(A, y.clone())]).is_ok();
        prop_assert_eq!(ok, r("29/100") * x + r("71/100") * y == r("1/10"));
    }
}

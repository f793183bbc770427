//! Independence of an element from a condition, and exhaustive checks of
//! the basic independence properties of conditional states.
//!
//! `b` is independent of the condition `a` with respect to `f(·, c)` when
//! `f(c, a) = 1` and `f(b, a) = f(b, c)`. The relation is not symmetric.

use std::sync::Arc;

use thiserror::Error;

use crate::classical::{ClassicalError, EventSet, FiniteProbabilitySpace};
use crate::conditioning::{
    construct_fk_relaxed, verify_conditional_state, ConditionalState, ConditionalSystem, ConditionalTable,
    ConditioningError, WeightVector,
};
use crate::lattice::{ElementId, FiniteOml};
use crate::rational::Rational;
use crate::report::PropositionReport;
use crate::states::State;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndependenceError {
    #[error("query is not well posed: f(c, a) = {value}, need 1")]
    QueryNotWellPosed { value: Rational },
    #[error("{0} is not a condition")]
    ConditionNotInDomain(ElementId),
    #[error("element {0} is not in the lattice")]
    InvalidElement(ElementId),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error(transparent)]
    Conditioning(#[from] ConditioningError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
}

/// Is `b` independent of the condition `a` with respect to `f(·, c)`?
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndependenceQuery {
    pub b: ElementId,
    pub a: ElementId,
    pub c: ElementId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub independent: bool,
    /// `f(b, a)`
    pub conditioned: Rational,
    /// `f(b, c)`
    pub reference: Rational,
}

/// Evaluates a query, returning both compared values.
pub fn independence_verdict<T: ConditionalTable + ?Sized>(
    f: &T,
    q: IndependenceQuery,
) -> Result<Verdict, IndependenceError> {
    let lattice = f.lattice();
    for x in [q.a, q.b, q.c] {
        if !lattice.contains(x) {
            return Err(IndependenceError::InvalidElement(x));
        }
    }
    let gate = f.value(q.c, q.a).ok_or(IndependenceError::ConditionNotInDomain(q.a))?;
    let reference = f.value(q.b, q.c).ok_or(IndependenceError::ConditionNotInDomain(q.c))?;
    if !gate.is_one() {
        return Err(IndependenceError::QueryNotWellPosed { value: gate });
    }
    let conditioned = f.value(q.b, q.a).ok_or(IndependenceError::ConditionNotInDomain(q.a))?;
    Ok(Verdict { independent: conditioned == reference, conditioned, reference })
}

pub fn is_independent<T: ConditionalTable + ?Sized>(f: &T, q: IndependenceQuery) -> Result<bool, IndependenceError> {
    independence_verdict(f, q).map(|v| v.independent)
}

/// Checks that `αᵢ(aⱼ) = δᵢⱼ` for a family and its states.
fn check_kronecker(lattice: &FiniteOml, family: &[ElementId], supports: &[State]) -> Result<(), IndependenceError> {
    for (i, alpha) in supports.iter().enumerate() {
        for (j, &a) in family.iter().enumerate() {
            let expected = if i == j { Rational::one() } else { Rational::zero() };
            if *alpha.value(a) != expected {
                return Err(IndependenceError::HypothesisViolated(format!(
                    "state {} takes {} on {}, expected {}",
                    i + 1,
                    alpha.value(a),
                    lattice.label(a),
                    expected
                )));
            }
        }
    }
    Ok(())
}

/// For `μ = Σ kᵢαᵢ` and every `i`, checks with reference condition `⋁ aⱼ`:
///
/// 1. `b ≍ aᵢ` iff `b ≍ ⋁_{j≠i} aⱼ`,
/// 2. `b ≍ aᵢ` iff `b⊥ ≍ aᵢ`.
///
/// Part 1 is asserted only when `0 < kᵢ < 1`; otherwise one side is
/// undefined and the instance is recorded as an observation. Part 2 is
/// asserted whenever `kᵢ > 0`.
pub fn check_prop21(
    lattice: &Arc<FiniteOml>,
    family: &[ElementId],
    supports: Vec<State>,
    k: WeightVector,
    b: ElementId,
) -> Result<PropositionReport, IndependenceError> {
    if !lattice.contains(b) {
        return Err(IndependenceError::InvalidElement(b));
    }
    let f = prop21_state(lattice, family, supports, k)?;
    let mut report = PropositionReport::new("prop21");
    prop21_instance(&f, b, &mut report);
    Ok(report)
}

/// [`check_prop21`] for every element `b` of the lattice.
pub fn check_prop21_all(
    lattice: &Arc<FiniteOml>,
    family: &[ElementId],
    supports: Vec<State>,
    k: WeightVector,
) -> Result<PropositionReport, IndependenceError> {
    let f = prop21_state(lattice, family, supports, k)?;
    let mut report = PropositionReport::new("prop21");
    for b in lattice.elements() {
        prop21_instance(&f, b, &mut report);
    }
    Ok(report)
}

fn prop21_state(
    lattice: &Arc<FiniteOml>,
    family: &[ElementId],
    supports: Vec<State>,
    k: WeightVector,
) -> Result<ConditionalState, IndependenceError> {
    if supports.len() == family.len() {
        crate::states::check_orthogonal_family(lattice, family)
            .map_err(|e| IndependenceError::HypothesisViolated(e.to_string()))?;
        check_kronecker(lattice, family, &supports)?;
    }
    Ok(construct_fk_relaxed(lattice, family, supports, k)?)
}

fn prop21_instance(f: &ConditionalState, b: ElementId, report: &mut PropositionReport) {
    let lattice = f.lattice();
    let top = f.top();
    let bo = lattice.ortho(b);
    let family = f.family();
    let k = f.weights().entries();
    let indep = |x: ElementId, a: ElementId| {
        independence_verdict(f, IndependenceQuery { b: x, a, c: top }).ok()
    };
    for (i, &ai) in family.iter().enumerate() {
        let on_ai = indep(b, ai);
        let Some(on_ai) = on_ai else {
            report.observe(vec![b, ai], format!("k{} = 0: f(·, {}) undefined", i + 1, lattice.label(ai)), false);
            continue;
        };

        // part 2
        match indep(bo, ai) {
            Some(on_bo) => {
                report.instances += 1;
                if on_ai.independent != on_bo.independent {
                    report.fail(
                        vec![b, ai],
                        format!("(2) b ≍ a{0} is {1}, b⊥ ≍ a{0} is {2}", i + 1, on_ai.independent, on_bo.independent),
                        vec![
                            ("f(b,a_i)".into(), on_ai.conditioned.clone()),
                            ("f(b,top)".into(), on_ai.reference.clone()),
                            ("f(b⊥,a_i)".into(), on_bo.conditioned),
                            ("f(b⊥,top)".into(), on_bo.reference),
                        ],
                    );
                }
            }
            None => report.observe(vec![b, ai], "(2) b⊥ side undefined", false),
        }

        // part 1
        let rest: Vec<ElementId> = family.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &a)| a).collect();
        if rest.is_empty() {
            report.observe(vec![b, ai], "(1) single-member family: no complementary join", on_ai.independent);
            continue;
        }
        let w = lattice.join_all(rest);
        if k[i].is_one() {
            let other = indep(b, w);
            report.observe(
                vec![b, ai, w],
                format!("(1) k{} = 1: f(·, ⋁ other members) undefined", i + 1),
                other.is_some_and(|o| o.independent == on_ai.independent),
            );
            continue;
        }
        match indep(b, w) {
            Some(on_w) => {
                report.instances += 1;
                if on_ai.independent != on_w.independent {
                    report.fail(
                        vec![b, ai, w],
                        format!(
                            "(1) b ≍ a{0} is {1}, b ≍ ⋁ other members is {2}",
                            i + 1,
                            on_ai.independent,
                            on_w.independent
                        ),
                        vec![
                            ("f(b,a_i)".into(), on_ai.conditioned.clone()),
                            ("f(b,⋁_{j≠i} a_j)".into(), on_w.conditioned),
                            ("f(b,top)".into(), on_ai.reference.clone()),
                        ],
                    );
                }
            }
            None => report.observe(vec![b, ai, w], "(1) complementary condition undefined", false),
        }
    }
}

/// The four parts of the second property suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prop22Part {
    /// `a, a⊥, c ∈ L₀`, `f(c,a) = f(c,a⊥) = 1`: `b ≍ a` iff `b ≍ a⊥`.
    Orthocomplement = 1,
    /// `a, c ∈ L₀`, `f(c,a) = 1`: `b ≍ a` iff `b⊥ ≍ a`.
    Negation = 2,
    /// `a, b, c ∈ L₀` compatible, `f(c,a) = f(c,b) = 1`, `f(a,b), f(b,a) ≠ 0`:
    /// `b ≍ a` iff `a ≍ b`.
    Symmetry = 3,
    /// `b, c, d ∈ L₀`, `b ⊥ d`, `f(c,b) = f(c,d) = 1`: `a ≍ b` and `a ≍ d`
    /// imply `a ≍ b ∨ d`.
    Join = 4,
}

impl Prop22Part {
    pub const ALL: [Prop22Part; 4] =
        [Prop22Part::Orthocomplement, Prop22Part::Negation, Prop22Part::Symmetry, Prop22Part::Join];

    pub fn from_number(n: u8) -> Option<Self> {
        Prop22Part::ALL.get((n as usize).wrapping_sub(1)).copied()
    }
}

/// Scans every tuple satisfying the hypotheses of the requested parts.
///
/// `f` must be a conditional state on `system`; otherwise the first axiom
/// violation is returned as a hypothesis error.
pub fn check_prop22<T: ConditionalTable + ?Sized>(
    system: &ConditionalSystem,
    f: &T,
    parts: &[Prop22Part],
) -> Result<PropositionReport, IndependenceError> {
    let axioms = verify_conditional_state(system, f);
    if let Some(v) = axioms.first() {
        return Err(IndependenceError::HypothesisViolated(format!(
            "not a conditional state: {}",
            system.lattice().describe(v)
        )));
    }
    let lattice = system.lattice();
    let members: Vec<ElementId> = system.members().iter().copied().collect();
    let val = |d: ElementId, c: ElementId| f.value(d, c).expect("conditional state is total on its system");
    let indep = |b: ElementId, a: ElementId, c: ElementId| val(b, a) == val(b, c);
    let mut report = PropositionReport::new("prop22");

    for part in parts {
        match part {
            Prop22Part::Orthocomplement => {
                report.note("(1) is checked as b ≍ a ⇔ b ≍ a⊥");
                for &a in &members {
                    let ao = lattice.ortho(a);
                    if !system.contains(ao) {
                        continue;
                    }
                    for &c in &members {
                        if !(val(c, a).is_one() && val(c, ao).is_one()) {
                            continue;
                        }
                        for b in lattice.elements() {
                            report.instances += 1;
                            let (lhs, rhs) = (indep(b, a, c), indep(b, ao, c));
                            if lhs != rhs {
                                report.fail(
                                    vec![b, a, c],
                                    format!("(1) b ≍ a is {lhs}, b ≍ a⊥ is {rhs}"),
                                    vec![
                                        ("f(b,a)".into(), val(b, a)),
                                        ("f(b,a⊥)".into(), val(b, ao)),
                                        ("f(b,c)".into(), val(b, c)),
                                    ],
                                );
                            }
                        }
                    }
                }
            }
            Prop22Part::Negation => {
                for &a in &members {
                    for &c in &members {
                        if !val(c, a).is_one() {
                            continue;
                        }
                        for b in lattice.elements() {
                            report.instances += 1;
                            let bo = lattice.ortho(b);
                            let (lhs, rhs) = (indep(b, a, c), indep(bo, a, c));
                            if lhs != rhs {
                                report.fail(
                                    vec![b, a, c],
                                    format!("(2) b ≍ a is {lhs}, b⊥ ≍ a is {rhs}"),
                                    vec![
                                        ("f(b,a)".into(), val(b, a)),
                                        ("f(b,c)".into(), val(b, c)),
                                        ("f(b⊥,a)".into(), val(bo, a)),
                                        ("f(b⊥,c)".into(), val(bo, c)),
                                    ],
                                );
                            }
                        }
                    }
                }
            }
            Prop22Part::Symmetry => {
                for &a in &members {
                    for &b in &members {
                        if !lattice.is_compatible(a, b) || val(a, b).is_zero() || val(b, a).is_zero() {
                            continue;
                        }
                        for &c in &members {
                            if !(val(c, a).is_one() && val(c, b).is_one()) {
                                continue;
                            }
                            report.instances += 1;
                            let (lhs, rhs) = (indep(b, a, c), indep(a, b, c));
                            if lhs != rhs {
                                report.fail(
                                    vec![a, b, c],
                                    format!("(3) b ≍ a is {lhs}, a ≍ b is {rhs}"),
                                    vec![
                                        ("f(b,a)".into(), val(b, a)),
                                        ("f(b,c)".into(), val(b, c)),
                                        ("f(a,b)".into(), val(a, b)),
                                        ("f(a,c)".into(), val(a, c)),
                                    ],
                                );
                            }
                        }
                    }
                }
            }
            Prop22Part::Join => {
                for &b in &members {
                    for &d in &members {
                        if !lattice.is_orthogonal(b, d) {
                            continue;
                        }
                        let j = lattice.join(b, d);
                        for &c in &members {
                            if !(val(c, b).is_one() && val(c, d).is_one()) {
                                continue;
                            }
                            report.instances += 1;
                            let Some(gate) = f.value(c, j) else {
                                report.fail(vec![b, d, c], "(4) b ∨ d is not a condition", vec![]);
                                continue;
                            };
                            if !gate.is_one() {
                                report.fail(vec![b, d, c], "(4) f(c, b ∨ d) ≠ 1", vec![("f(c,b∨d)".into(), gate)]);
                                continue;
                            }
                            for a in lattice.elements() {
                                report.instances += 1;
                                if indep(a, b, c) && indep(a, d, c) && !indep(a, j, c) {
                                    report.fail(
                                        vec![a, b, d, c],
                                        "(4) a ≍ b and a ≍ d but not a ≍ b ∨ d",
                                        vec![
                                            ("f(a,b)".into(), val(a, b)),
                                            ("f(a,d)".into(), val(a, d)),
                                            ("f(a,b∨d)".into(), val(a, j)),
                                            ("f(a,c)".into(), val(a, c)),
                                        ],
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// `(P(B|A) = P(B), P(B∩A) = P(B)·P(A))`. The two always agree when
/// `P(A) > 0`.
pub fn classical_independence_reduction(
    space: &FiniteProbabilitySpace,
    a: EventSet,
    b: EventSet,
) -> Result<(bool, bool), IndependenceError> {
    let conditioned = crate::classical::cps_condition(space, b, a)?;
    let by_definition = conditioned == *space.measure(b);
    let by_product = *space.measure(b.intersection(a)) == space.measure(b) * space.measure(a);
    Ok((by_definition, by_product))
}

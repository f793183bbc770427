//! Conditional systems and conditional states.
//!
//! A conditional state `f: L × L₀ → [0,1]` is stored constructively: an
//! orthogonal family `a₁,…,aₙ`, states `αᵢ` with `αᵢ(aᵢ) = 1`, and a weight
//! vector `k`. Every condition `c ∈ L₀` is the join of a unique subfamily
//! `{a_{i_1},…,a_{i_s}}`, and
//!
//! ```text
//! f(d, c) = (1 / K(c)) · Σⱼ k_{i_j} · α_{i_j}(d),   K(c) = Σⱼ k_{i_j}.
//! ```
//!
//! Arbitrary tables `L × L₀ → ℚ` implement [`ConditionalTable`] and can be
//! checked against the three conditional-state axioms with
//! [`verify_conditional_state`].

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::lattice::{ElementId, FiniteOml};
use crate::rational::Rational;
use crate::report::{Axiom, AxiomReport, PropositionReport, Violation};
use crate::states::{self, check_probability_vector, State};

/// Largest orthogonal family accepted by the constructors (`2^n - 1`
/// subfamily joins are enumerated).
pub const MAX_FAMILY: usize = 16;

/// Largest orthogonal subfamily enumerated when checking the decomposition
/// axiom on a table.
pub const MAX_C3_SUBFAMILY: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConditioningError {
    #[error("not a conditional system: {}", .0.first().map(|v| v.to_string()).unwrap_or_default())]
    NotConditionalSystem(AxiomReport),
    #[error("family members {0} and {1} are not orthogonal")]
    FamilyNotOrthogonal(ElementId, ElementId),
    #[error("family contains the zero element")]
    ZeroInFamily,
    #[error("family is empty")]
    EmptyFamily,
    #[error("family of {size} elements exceeds the limit of {limit}")]
    FamilyTooLarge { size: usize, limit: usize },
    #[error("{family} family members, {supports} supports, {weights} weights")]
    LengthMismatch { family: usize, supports: usize, weights: usize },
    #[error("supports live on a different lattice")]
    LatticeMismatch,
    #[error("support {index} takes the value {value} on its family member, expected 1")]
    SupportMismatch { index: usize, value: Rational },
    #[error("weight {index} is not positive")]
    WeightNotPositive { index: usize },
    #[error("weights are not a probability vector: {0}")]
    WeightsNotNormalized(String),
    #[error("{0} is not a condition of this conditional state")]
    ConditionNotInDomain(ElementId),
    #[error("condition {0} has total weight zero")]
    ZeroWeightCondition(ElementId),
    #[error("element {0} is not in the lattice")]
    InvalidElement(ElementId),
    #[error("two subfamilies join to {0}")]
    InternalDecompositionAmbiguity(ElementId),
    #[error("extension fails the decomposition at {element}: f(d, b ∨ b⊥) = {expected}, decomposition gives {actual}")]
    ExtensionInconsistent { element: ElementId, expected: Rational, actual: Rational },
    #[error("proposal for condition {condition} is not a state: {reason}")]
    NotAStateProposal { condition: ElementId, reason: String },
    #[error("cannot extend at {condition}: its value under b ∨ b⊥ is {value}, need a value strictly between 0 and 1")]
    DegenerateExtension { condition: ElementId, value: Rational },
    #[error("{0} is already a condition")]
    ConditionAlreadyInDomain(ElementId),
}

/// A subset `L₀ ⊆ L ∖ {0}` closed under joins and under `(a, b) ↦ a⊥ ∧ b`
/// for `a < b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalSystem {
    lattice: Arc<FiniteOml>,
    members: BTreeSet<ElementId>,
}

impl ConditionalSystem {
    pub fn new(
        lattice: Arc<FiniteOml>,
        members: impl IntoIterator<Item = ElementId>,
    ) -> Result<Self, ConditioningError> {
        let members: BTreeSet<ElementId> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|m| !lattice.contains(**m)) {
            return Err(ConditioningError::InvalidElement(bad));
        }
        let report = verify_cs(&lattice, &members);
        if !report.passed() {
            return Err(ConditioningError::NotConditionalSystem(report));
        }
        Ok(ConditionalSystem { lattice, members })
    }

    pub fn lattice(&self) -> &Arc<FiniteOml> {
        &self.lattice
    }

    pub fn members(&self) -> &BTreeSet<ElementId> {
        &self.members
    }

    pub fn contains(&self, a: ElementId) -> bool {
        self.members.contains(&a)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Checks `0 ∉ L₀`, join closure, and relative-complement closure. Only
/// strict `a < b` pairs are subject to the second rule: for `a = b` it would
/// force `0` into the system.
pub fn verify_cs(lattice: &FiniteOml, subset: &BTreeSet<ElementId>) -> AxiomReport {
    let mut r = AxiomReport::new();
    let zero = lattice.zero();
    if subset.contains(&zero) {
        r.push(Violation::new(Axiom::CsZero, vec![zero]));
    }
    for &a in subset {
        for &b in subset.range(a..) {
            let j = lattice.join(a, b);
            if !subset.contains(&j) {
                r.push(
                    Violation::new(Axiom::CsJoin, vec![a, b])
                        .with_detail(format!("{} ∨ {} = {} missing", lattice.label(a), lattice.label(b), lattice.label(j))),
                );
            }
        }
        for &b in subset {
            if lattice.lt(a, b) {
                let rc = lattice.meet(lattice.ortho(a), b);
                if !subset.contains(&rc) {
                    r.push(Violation::new(Axiom::CsRelativeComplement, vec![a, b]).with_detail(format!(
                        "{}⊥ ∧ {} = {} missing",
                        lattice.label(a),
                        lattice.label(b),
                        lattice.label(rc)
                    )));
                }
            }
        }
    }
    r.finish()
}

fn check_family(lattice: &FiniteOml, family: &[ElementId]) -> Result<(), ConditioningError> {
    if family.is_empty() {
        return Err(ConditioningError::EmptyFamily);
    }
    if family.len() > MAX_FAMILY {
        return Err(ConditioningError::FamilyTooLarge { size: family.len(), limit: MAX_FAMILY });
    }
    states::check_orthogonal_family(lattice, family).map_err(|e| match e {
        states::StateError::ZeroInFamily => ConditioningError::ZeroInFamily,
        states::StateError::FamilyNotOrthogonal(a, b) => ConditioningError::FamilyNotOrthogonal(a, b),
        states::StateError::InvalidElement(a) => ConditioningError::InvalidElement(a),
        other => unreachable!("unexpected family error {other:?}"),
    })
}

/// Join of every nonempty subfamily, keyed by the join, with the subfamily as
/// a bit mask over family indices.
fn subfamily_joins(lattice: &FiniteOml, family: &[ElementId]) -> Result<BTreeMap<ElementId, u32>, ConditioningError> {
    let mut out = BTreeMap::new();
    for mask in 1u32..(1u32 << family.len()) {
        let join = lattice.join_all(family.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &a)| a));
        if out.insert(join, mask).is_some() {
            return Err(ConditioningError::InternalDecompositionAmbiguity(join));
        }
    }
    Ok(out)
}

/// The conditional system of all joins of nonempty subfamilies of an
/// orthogonal family of nonzero elements.
pub fn generate_cs_from_family(
    lattice: &Arc<FiniteOml>,
    family: &[ElementId],
) -> Result<ConditionalSystem, ConditioningError> {
    check_family(lattice, family)?;
    let joins = subfamily_joins(lattice, family)?;
    ConditionalSystem::new(lattice.clone(), joins.into_keys())
}

/// A probability vector `k = (k₁,…,kₙ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector(Vec<Rational>);

impl WeightVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self, ConditioningError> {
        check_probability_vector(&entries).map_err(ConditioningError::WeightsNotNormalized)?;
        Ok(WeightVector(entries))
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Anything evaluable as `f: L × L₀ → ℚ`.
pub trait ConditionalTable {
    fn lattice(&self) -> &Arc<FiniteOml>;

    /// The conditions on which the table is defined, ascending.
    fn conditions(&self) -> Vec<ElementId>;

    /// `f(d, c)`, or `None` when `c` is not a condition or the value is
    /// undefined there.
    fn value(&self, d: ElementId, c: ElementId) -> Option<Rational>;
}

/// An explicit table of conditional values, one column per condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableState {
    lattice: Arc<FiniteOml>,
    columns: BTreeMap<ElementId, Vec<Rational>>,
}

impl TableState {
    pub fn new(lattice: Arc<FiniteOml>) -> Self {
        TableState { lattice, columns: BTreeMap::new() }
    }

    /// Tabulates every condition of `table`.
    pub fn from_table<T: ConditionalTable + ?Sized>(table: &T) -> Self {
        let lattice = table.lattice().clone();
        let mut out = TableState::new(lattice.clone());
        for c in table.conditions() {
            let column: Option<Vec<Rational>> = lattice.elements().map(|d| table.value(d, c)).collect();
            if let Some(column) = column {
                out.columns.insert(c, column);
            }
        }
        out
    }

    /// Sets the column `f(·, c)`. `values` is indexed by element id.
    pub fn insert_condition(&mut self, c: ElementId, values: Vec<Rational>) {
        assert_eq!(values.len(), self.lattice.len(), "column must cover the lattice");
        self.columns.insert(c, values);
    }

    pub fn column(&self, c: ElementId) -> Option<&[Rational]> {
        self.columns.get(&c).map(Vec::as_slice)
    }
}

impl ConditionalTable for TableState {
    fn lattice(&self) -> &Arc<FiniteOml> {
        &self.lattice
    }

    fn conditions(&self) -> Vec<ElementId> {
        self.columns.keys().copied().collect()
    }

    fn value(&self, d: ElementId, c: ElementId) -> Option<Rational> {
        self.columns.get(&c).and_then(|col| col.get(d.0)).cloned()
    }
}

/// Conditional state built from triples `(αᵢ, aᵢ, kᵢ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalState {
    lattice: Arc<FiniteOml>,
    family: Vec<ElementId>,
    supports: Vec<State>,
    weights: WeightVector,
    domain: ConditionalSystem,
    /// Subfamily mask of every condition.
    decomposition: BTreeMap<ElementId, u32>,
}

/// Builds `f_k` from an orthogonal family, supporting states and strictly
/// positive weights.
pub fn construct_fk(
    lattice: &Arc<FiniteOml>,
    family: &[ElementId],
    supports: Vec<State>,
    weights: WeightVector,
) -> Result<ConditionalState, ConditioningError> {
    if let Some(index) = weights.entries().iter().position(|k| k.is_zero()) {
        return Err(ConditioningError::WeightNotPositive { index });
    }
    construct_fk_relaxed(lattice, family, supports, weights)
}

/// Like [`construct_fk`] but admits zero weights. Conditions whose subfamily
/// carries no weight stay in the domain, and evaluating at them fails with
/// [`ConditioningError::ZeroWeightCondition`].
pub fn construct_fk_relaxed(
    lattice: &Arc<FiniteOml>,
    family: &[ElementId],
    supports: Vec<State>,
    weights: WeightVector,
) -> Result<ConditionalState, ConditioningError> {
    if family.len() != supports.len() || family.len() != weights.len() {
        return Err(ConditioningError::LengthMismatch {
            family: family.len(),
            supports: supports.len(),
            weights: weights.len(),
        });
    }
    check_family(lattice, family)?;
    for (index, (alpha, &a)) in supports.iter().zip(family).enumerate() {
        if !Arc::ptr_eq(alpha.lattice(), lattice) && **alpha.lattice() != **lattice {
            return Err(ConditioningError::LatticeMismatch);
        }
        if !alpha.value(a).is_one() {
            return Err(ConditioningError::SupportMismatch { index, value: alpha.value(a).clone() });
        }
    }
    let decomposition = subfamily_joins(lattice, family)?;
    let domain = ConditionalSystem::new(lattice.clone(), decomposition.keys().copied())?;
    Ok(ConditionalState {
        lattice: lattice.clone(),
        family: family.to_vec(),
        supports,
        weights,
        domain,
        decomposition,
    })
}

impl ConditionalState {
    pub fn lattice(&self) -> &Arc<FiniteOml> {
        &self.lattice
    }

    pub fn family(&self) -> &[ElementId] {
        &self.family
    }

    pub fn supports(&self) -> &[State] {
        &self.supports
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn domain(&self) -> &ConditionalSystem {
        &self.domain
    }

    /// `⋁ aᵢ`, the largest condition.
    pub fn top(&self) -> ElementId {
        self.lattice.join_all(self.family.iter().copied())
    }

    /// Family indices whose join is `c`.
    pub fn subfamily(&self, c: ElementId) -> Option<Vec<usize>> {
        self.decomposition
            .get(&c)
            .map(|&mask| (0..self.family.len()).filter(|i| mask >> i & 1 == 1).collect())
    }

    /// `K(c)`, the total weight of the subfamily composing `c`.
    pub fn normalizer(&self, c: ElementId) -> Result<Rational, ConditioningError> {
        let idx = self.subfamily(c).ok_or(ConditioningError::ConditionNotInDomain(c))?;
        Ok(idx.iter().map(|&i| &self.weights.entries()[i]).sum())
    }

    /// `f(d, c)`.
    pub fn evaluate(&self, d: ElementId, c: ElementId) -> Result<Rational, ConditioningError> {
        if !self.lattice.contains(d) {
            return Err(ConditioningError::InvalidElement(d));
        }
        let idx = self.subfamily(c).ok_or(ConditioningError::ConditionNotInDomain(c))?;
        let k = self.weights.entries();
        let total: Rational = idx.iter().map(|&i| &k[i]).sum();
        if total.is_zero() {
            return Err(ConditioningError::ZeroWeightCondition(c));
        }
        let mass: Rational = idx.iter().map(|&i| &k[i] * self.supports[i].value(d)).sum();
        Ok(mass / total)
    }

    pub fn to_table(&self) -> TableState {
        TableState::from_table(self)
    }
}

impl ConditionalTable for ConditionalState {
    fn lattice(&self) -> &Arc<FiniteOml> {
        &self.lattice
    }

    fn conditions(&self) -> Vec<ElementId> {
        self.domain.members.iter().copied().collect()
    }

    fn value(&self, d: ElementId, c: ElementId) -> Option<Rational> {
        self.evaluate(d, c).ok()
    }
}

/// Mutually orthogonal subsets (size ≥ 2) of `members`, as ascending id
/// lists, together with their joins.
pub(crate) fn orthogonal_subfamilies(
    lattice: &FiniteOml,
    members: &[ElementId],
    max_size: usize,
) -> Vec<(Vec<ElementId>, ElementId)> {
    fn grow(
        lattice: &FiniteOml,
        members: &[ElementId],
        start: usize,
        current: &mut Vec<ElementId>,
        join: ElementId,
        max_size: usize,
        out: &mut Vec<(Vec<ElementId>, ElementId)>,
    ) {
        if current.len() >= 2 {
            out.push((current.clone(), join));
        }
        if current.len() == max_size {
            return;
        }
        for i in start..members.len() {
            let x = members[i];
            if current.iter().all(|&y| lattice.is_orthogonal(x, y)) {
                current.push(x);
                grow(lattice, members, i + 1, current, lattice.join(join, x), max_size, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    grow(lattice, members, 0, &mut Vec::new(), lattice.zero(), max_size, &mut out);
    out
}

/// Checks C1 (every `f(·, a)` is a state), C2 (`f(a, a) = 1`) and C3 (for
/// every mutually orthogonal `{aᵢ} ⊆ L₀` with `⋁ aᵢ ∈ L₀` and every `b`,
/// `f(b, ⋁aᵢ) = Σ f(aᵢ, ⋁aᵢ)·f(b, aᵢ)`) by exhaustive scan.
pub fn verify_conditional_state<T: ConditionalTable + ?Sized>(system: &ConditionalSystem, f: &T) -> AxiomReport {
    let lattice = system.lattice();
    let mut r = AxiomReport::new();
    let mut columns: BTreeMap<ElementId, Vec<Rational>> = BTreeMap::new();
    for &c in system.members() {
        let column: Result<Vec<Rational>, ElementId> =
            lattice.elements().map(|d| f.value(d, c).ok_or(d)).collect();
        match column {
            Ok(col) => {
                columns.insert(c, col);
            }
            Err(d) => r.push(Violation::new(Axiom::Undefined, vec![d, c]).with_detail("no value")),
        }
    }

    for (&c, col) in &columns {
        for v in states::verify_state(lattice, col).violations {
            let mut witness = vec![c];
            witness.extend(v.witness);
            r.push(Violation::new(Axiom::C1, witness).with_detail(format!("f(·,{}): {} {}", lattice.label(c), v.axiom, v.detail)));
        }
        if !col[c.0].is_one() {
            r.push(
                Violation::new(Axiom::C2, vec![c])
                    .with_detail(format!("f({0},{0}) = {1}", lattice.label(c), col[c.0])),
            );
        }
    }

    let members: Vec<ElementId> = columns.keys().copied().collect();
    for (sub, top) in orthogonal_subfamilies(lattice, &members, MAX_C3_SUBFAMILY) {
        let Some(top_col) = columns.get(&top) else {
            continue;
        };
        for b in lattice.elements() {
            let rhs: Rational = sub.iter().map(|s| &top_col[s.0] * &columns[s][b.0]).sum();
            if top_col[b.0] != rhs {
                let mut witness = vec![b];
                witness.extend(&sub);
                r.push(Violation::new(Axiom::C3, witness).with_detail(format!(
                    "f({}, {}) = {} but the decomposition gives {}",
                    lattice.label(b),
                    lattice.label(top),
                    top_col[b.0],
                    rhs
                )));
            }
        }
    }
    r.finish()
}

/// Checks a constructed conditional state against the axioms and the two
/// defining identities of the construction: `f(d, aᵢ) = αᵢ(d)` for all `d`,
/// and `f(aᵢ, ⋁ aⱼ) = kᵢ`.
pub fn check_construction(f: &ConditionalState) -> PropositionReport {
    let lattice = f.lattice();
    let mut report = PropositionReport::new("prop13");
    let axioms = verify_conditional_state(f.domain(), f);
    report.instances += 1;
    for v in &axioms.violations {
        report.fail(v.witness.clone(), lattice.describe(v), vec![]);
    }
    let top = f.top();
    for (i, (&a, alpha)) in f.family().iter().zip(f.supports()).enumerate() {
        for d in lattice.elements() {
            report.instances += 1;
            match f.evaluate(d, a) {
                Ok(v) if v == *alpha.value(d) => {}
                other => report.fail(
                    vec![d, a],
                    format!("(1) f(d, a{}) differs from its support", i + 1),
                    vec![
                        ("f(d,a_i)".into(), other.unwrap_or_default()),
                        ("alpha_i(d)".into(), alpha.value(d).clone()),
                    ],
                ),
            }
        }
        report.instances += 1;
        let k = &f.weights().entries()[i];
        match f.evaluate(a, top) {
            Ok(v) if v == *k => {}
            other => report.fail(
                vec![a, top],
                format!("(2) f(a{}, top) differs from its weight", i + 1),
                vec![("f(a_i,top)".into(), other.unwrap_or_default()), ("k_i".into(), k.clone())],
            ),
        }
    }
    report
}

/// Admissible ranges for `f(d, b)` and `f(d, b⊥)` implied by the
/// decomposition `f(d, 1) = f(b,1)·f(d,b) + f(b⊥,1)·f(d,b⊥)` together with
/// both values lying in `[0,1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionBounds {
    /// `(f(b, b∨b⊥), f(b⊥, b∨b⊥))`
    pub coefficients: (Rational, Rational),
    pub on_b: (Rational, Rational),
    pub on_b_ortho: (Rational, Rational),
}

pub fn decomposition_bounds<T: ConditionalTable + ?Sized>(
    f: &T,
    d: ElementId,
    b: ElementId,
) -> Result<DecompositionBounds, ConditioningError> {
    let lattice = f.lattice();
    let (p, q, r) = extension_coefficients(f, b, d)?;
    let zero = Rational::zero();
    let one = Rational::one();
    let clamp = |lo: Rational, hi: Rational| (lo.max(zero.clone()), hi.min(one.clone()));
    let on_b = clamp((&r - &q) / &p, &r / &p);
    let on_b_ortho = clamp((&r - &p) / &q, &r / &q);
    let _ = lattice;
    Ok(DecompositionBounds { coefficients: (p, q), on_b, on_b_ortho })
}

/// `(f(b, top), f(b⊥, top), f(d, top))` with `top = b ∨ b⊥`, after checking
/// that `top` is a condition and `0 < f(b, top) < 1`.
fn extension_coefficients<T: ConditionalTable + ?Sized>(
    f: &T,
    b: ElementId,
    d: ElementId,
) -> Result<(Rational, Rational, Rational), ConditioningError> {
    let lattice = f.lattice();
    for x in [b, d] {
        if !lattice.contains(x) {
            return Err(ConditioningError::InvalidElement(x));
        }
    }
    let top = lattice.join(b, lattice.ortho(b));
    let p = f.value(b, top).ok_or(ConditioningError::ConditionNotInDomain(top))?;
    let q = f.value(lattice.ortho(b), top).ok_or(ConditioningError::ConditionNotInDomain(top))?;
    if p.is_zero() || q.is_zero() {
        return Err(ConditioningError::DegenerateExtension { condition: b, value: p });
    }
    let r = f.value(d, top).ok_or(ConditioningError::ConditionNotInDomain(top))?;
    Ok((p, q, r))
}

/// Extends a table to the conditions `b` and `b⊥`.
///
/// `on_b` and `on_b_ortho` are (possibly partial) proposals for `f(·, b)` and
/// `f(·, b⊥)`. Missing values are derived from the state rules and from the
/// decomposition identity against `f(·, b ∨ b⊥)`; the completed proposals
/// must be states and satisfy the identity at every element.
pub fn extend_to_condition<T: ConditionalTable + ?Sized>(
    f: &T,
    b: ElementId,
    on_b: &[(ElementId, Rational)],
    on_b_ortho: &[(ElementId, Rational)],
) -> Result<TableState, ConditioningError> {
    let lattice = f.lattice().clone();
    let (p, q, _) = extension_coefficients(f, b, b)?;
    let bo = lattice.ortho(b);
    let top = lattice.join(b, bo);
    let existing = f.conditions();
    for c in [b, bo] {
        if existing.contains(&c) {
            return Err(ConditioningError::ConditionAlreadyInDomain(c));
        }
    }
    let reference: Vec<Rational> = lattice
        .elements()
        .map(|d| f.value(d, top).ok_or(ConditioningError::ConditionNotInDomain(top)))
        .collect::<Result<_, _>>()?;

    let seed = |cond: ElementId, proposal: &[(ElementId, Rational)]| -> Result<Vec<Option<Rational>>, ConditioningError> {
        let mut known = vec![None; lattice.len()];
        known[cond.0] = Some(Rational::one());
        for (d, v) in proposal {
            if !lattice.contains(*d) {
                return Err(ConditioningError::InvalidElement(*d));
            }
            if let Some(prev) = &known[d.0] {
                if prev != v {
                    return Err(ConditioningError::NotAStateProposal {
                        condition: cond,
                        reason: format!("conflicting values {prev} and {v} at {}", lattice.label(*d)),
                    });
                }
            }
            known[d.0] = Some(v.clone());
        }
        Ok(known)
    };
    let mut kb = seed(b, on_b)?;
    let mut ko = seed(bo, on_b_ortho)?;

    let not_state = |cond: ElementId, e: states::StateError| ConditioningError::NotAStateProposal {
        condition: cond,
        reason: e.to_string(),
    };
    loop {
        kb = states::propagate(&lattice, kb).map_err(|e| not_state(b, e))?;
        ko = states::propagate(&lattice, ko).map_err(|e| not_state(bo, e))?;
        let mut changed = false;
        for d in lattice.elements() {
            let r = &reference[d.0];
            match (&kb[d.0], &ko[d.0]) {
                (Some(x), None) => {
                    ko[d.0] = Some((r - &(&p * x)) / &q);
                    changed = true;
                }
                (None, Some(y)) => {
                    kb[d.0] = Some((r - &(&q * y)) / &p);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }

    let finish = |cond: ElementId, known: Vec<Option<Rational>>| -> Result<Vec<Rational>, ConditioningError> {
        let values = known
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| ConditioningError::NotAStateProposal {
                    condition: cond,
                    reason: format!("value at {} is undetermined", lattice.label(ElementId(i))),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let report = states::verify_state(&lattice, &values);
        if let Some(v) = report.first() {
            return Err(ConditioningError::NotAStateProposal { condition: cond, reason: lattice.describe(v) });
        }
        Ok(values)
    };
    let col_b = finish(b, kb)?;
    let col_o = finish(bo, ko)?;

    for d in lattice.elements() {
        let actual = &(&p * &col_b[d.0]) + &(&q * &col_o[d.0]);
        if actual != reference[d.0] {
            return Err(ConditioningError::ExtensionInconsistent {
                element: d,
                expected: reference[d.0].clone(),
                actual,
            });
        }
    }

    let mut out = TableState::from_table(f);
    out.insert_condition(b, col_b);
    out.insert_condition(bo, col_o);
    Ok(out)
}

//! Finitely additive states with exact rational values.

use std::sync::Arc;

use thiserror::Error;

use crate::lattice::{ElementId, FiniteOml};
use crate::lp;
use crate::rational::Rational;
use crate::report::{Axiom, AxiomReport, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("not a state: {}", .0.first().map(|v| v.to_string()).unwrap_or_default())]
    NotAState(AxiomReport),
    #[error("value at {element} is not determined by the given assignments")]
    Underdetermined { element: ElementId },
    #[error("assignments force two values at {element}: {first} and {second}")]
    Inconsistent { element: ElementId, first: Rational, second: Rational },
    #[error("measure on block {block} is not normalized: {detail}")]
    MeasureNotNormalized { block: usize, detail: String },
    #[error("lattice has {expected} blocks, got {got} measures")]
    BlockCountMismatch { expected: usize, got: usize },
    #[error("lattice is not stored as Boolean blocks glued at 0 and 1")]
    NotBlockLattice,
    #[error("weights are not a probability vector: {0}")]
    WeightsNotNormalized(String),
    #[error("states live on different lattices")]
    LatticeMismatch,
    #[error("{weights} weights for {states} states")]
    LengthMismatch { weights: usize, states: usize },
    #[error("family contains the zero element")]
    ZeroInFamily,
    #[error("family members {0} and {1} are not orthogonal")]
    FamilyNotOrthogonal(ElementId, ElementId),
    #[error("no state takes the value 1 at {element}")]
    NoSupportingState { element: ElementId },
    #[error("element {0} is not in the lattice")]
    InvalidElement(ElementId),
}

/// A map `m: L → [0,1]` with `m(0) = 0`, `m(1) = 1` and `m(a ∨ b) = m(a) + m(b)`
/// whenever `a ⊥ b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    lattice: Arc<FiniteOml>,
    values: Vec<Rational>,
}

impl State {
    /// Validates a total valuation.
    pub fn new(lattice: Arc<FiniteOml>, values: Vec<Rational>) -> Result<Self, StateError> {
        let report = verify_state(&lattice, &values);
        if !report.passed() {
            return Err(StateError::NotAState(report));
        }
        Ok(State { lattice, values })
    }

    /// Builds a state from a partial assignment, deriving the remaining values
    /// from `m(0) = 0`, `m(1) = 1`, `m(a⊥) = 1 - m(a)` and additivity.
    pub fn from_partial(lattice: Arc<FiniteOml>, assignments: &[(ElementId, Rational)]) -> Result<Self, StateError> {
        let mut known: Vec<Option<Rational>> = vec![None; lattice.len()];
        for (a, v) in assignments {
            if !lattice.contains(*a) {
                return Err(StateError::InvalidElement(*a));
            }
            if let Some(prev) = &known[a.0] {
                if prev != v {
                    return Err(StateError::Inconsistent { element: *a, first: prev.clone(), second: v.clone() });
                }
            }
            known[a.0] = Some(v.clone());
        }
        let known = propagate(&lattice, known)?;
        let values = known
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or(StateError::Underdetermined { element: ElementId(i) }))
            .collect::<Result<Vec<_>, _>>()?;
        State::new(lattice, values)
    }

    pub(crate) fn new_unchecked(lattice: Arc<FiniteOml>, values: Vec<Rational>) -> Self {
        State { lattice, values }
    }

    pub fn value(&self, a: ElementId) -> &Rational {
        &self.values[a.0]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn lattice(&self) -> &Arc<FiniteOml> {
        &self.lattice
    }

    pub fn same_lattice(&self, other: &State) -> bool {
        Arc::ptr_eq(&self.lattice, &other.lattice) || self.lattice == other.lattice
    }
}

/// Checks `m(0) = 0`, `m(1) = 1`, `0 ≤ m ≤ 1`, and additivity over every
/// orthogonal pair.
pub fn verify_state(lattice: &FiniteOml, values: &[Rational]) -> AxiomReport {
    let mut r = AxiomReport::new();
    if values.len() != lattice.len() {
        r.push(
            Violation::new(Axiom::StateTotal, vec![])
                .with_detail(format!("{} values for {} elements", values.len(), lattice.len())),
        );
        return r;
    }
    let (zero, one) = (lattice.zero(), lattice.one());
    if !values[zero.0].is_zero() {
        r.push(Violation::new(Axiom::StateZero, vec![zero]).with_detail(format!("m(0) = {}", values[zero.0])));
    }
    if !values[one.0].is_one() {
        r.push(Violation::new(Axiom::StateOne, vec![one]).with_detail(format!("m(1) = {}", values[one.0])));
    }
    for a in lattice.elements() {
        if !values[a.0].is_probability() {
            r.push(Violation::new(Axiom::StateRange, vec![a]).with_detail(format!("m = {}", values[a.0])));
        }
    }
    for a in lattice.elements() {
        for b in lattice.elements().skip(a.0) {
            if !lattice.is_orthogonal(a, b) {
                continue;
            }
            let j = lattice.join(a, b);
            let sum = &values[a.0] + &values[b.0];
            if values[j.0] != sum {
                r.push(Violation::new(Axiom::StateAdditive, vec![a, b]).with_detail(format!(
                    "m({}) = {} but m({}) + m({}) = {}",
                    lattice.label(j),
                    values[j.0],
                    lattice.label(a),
                    lattice.label(b),
                    sum
                )));
            }
        }
    }
    r.finish()
}

/// Orthogonal pairs `a < b` (by id) of nonzero elements, with their join.
pub(crate) fn orthogonal_pairs(lattice: &FiniteOml) -> Vec<(ElementId, ElementId, ElementId)> {
    let zero = lattice.zero();
    let mut out = Vec::new();
    for a in lattice.elements().filter(|&a| a != zero) {
        for b in lattice.elements().skip(a.0 + 1).filter(|&b| b != zero) {
            if lattice.is_orthogonal(a, b) {
                out.push((a, b, lattice.join(a, b)));
            }
        }
    }
    out
}

/// Closes a partial valuation under the forced state rules. Returns the
/// (possibly still partial) valuation, or the first contradiction found.
pub(crate) fn propagate(
    lattice: &FiniteOml,
    mut known: Vec<Option<Rational>>,
) -> Result<Vec<Option<Rational>>, StateError> {
    fn set(known: &mut [Option<Rational>], x: ElementId, v: Rational, changed: &mut bool) -> Result<(), StateError> {
        match &known[x.0] {
            Some(prev) if *prev != v => Err(StateError::Inconsistent { element: x, first: prev.clone(), second: v }),
            Some(_) => Ok(()),
            None => {
                known[x.0] = Some(v);
                *changed = true;
                Ok(())
            }
        }
    }
    let mut changed = false;
    set(&mut known, lattice.zero(), Rational::zero(), &mut changed)?;
    set(&mut known, lattice.one(), Rational::one(), &mut changed)?;
    let pairs = orthogonal_pairs(lattice);
    changed = true;
    while changed {
        changed = false;
        for a in lattice.elements() {
            if let Some(v) = known[a.0].clone() {
                set(&mut known, lattice.ortho(a), Rational::one() - v, &mut changed)?;
            }
        }
        for &(a, b, j) in &pairs {
            match (known[a.0].clone(), known[b.0].clone(), known[j.0].clone()) {
                (Some(x), Some(y), _) => set(&mut known, j, x + y, &mut changed)?,
                (Some(x), None, Some(s)) => set(&mut known, b, s - x, &mut changed)?,
                (None, Some(y), Some(s)) => set(&mut known, a, s - y, &mut changed)?,
                _ => {}
            }
        }
    }
    Ok(known)
}

/// The state induced by one probability measure per Boolean block: every
/// element of block `i` gets the measure of its atoms under `measures[i]`.
pub fn state_from_block_measures(lattice: &Arc<FiniteOml>, measures: &[Vec<Rational>]) -> Result<State, StateError> {
    let blocks = lattice.block_atoms().ok_or(StateError::NotBlockLattice)?;
    if blocks.len() != measures.len() {
        return Err(StateError::BlockCountMismatch { expected: blocks.len(), got: measures.len() });
    }
    for (i, (&k, w)) in blocks.iter().zip(measures).enumerate() {
        if w.len() != k as usize {
            return Err(StateError::MeasureNotNormalized {
                block: i,
                detail: format!("{} weights for {k} atoms", w.len()),
            });
        }
        if let Some(bad) = w.iter().find(|x| x.is_negative()) {
            return Err(StateError::MeasureNotNormalized { block: i, detail: format!("negative weight {bad}") });
        }
        let total: Rational = w.iter().sum();
        if !total.is_one() {
            return Err(StateError::MeasureNotNormalized { block: i, detail: format!("weights sum to {total}") });
        }
    }
    let values = lattice
        .elements()
        .map(|x| {
            if x == lattice.one() {
                return Rational::one();
            }
            match lattice.block_position(x) {
                None => Rational::zero(),
                Some((block, mask)) => measures[block]
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| mask >> bit & 1 == 1)
                    .map(|(_, w)| w)
                    .sum(),
            }
        })
        .collect();
    Ok(State::new_unchecked(lattice.clone(), values))
}

/// Pointwise `Σ kᵢ mᵢ` for a probability vector `k`.
pub fn convex_combination(weights: &[Rational], states: &[State]) -> Result<State, StateError> {
    if weights.len() != states.len() {
        return Err(StateError::LengthMismatch { weights: weights.len(), states: states.len() });
    }
    check_probability_vector(weights).map_err(StateError::WeightsNotNormalized)?;
    let first = &states[0];
    if states.iter().any(|s| !s.same_lattice(first)) {
        return Err(StateError::LatticeMismatch);
    }
    let values = (0..first.values.len())
        .map(|i| weights.iter().zip(states).map(|(k, s)| k * &s.values[i]).sum())
        .collect();
    Ok(State::new_unchecked(first.lattice.clone(), values))
}

/// Checks that every entry lies in `[0,1]` and the entries sum to exactly 1.
pub(crate) fn check_probability_vector(weights: &[Rational]) -> Result<(), String> {
    if weights.is_empty() {
        return Err("empty weight vector".into());
    }
    if let Some(bad) = weights.iter().find(|k| !k.is_probability()) {
        return Err(format!("weight {bad} outside [0,1]"));
    }
    let total: Rational = weights.iter().sum();
    if !total.is_one() {
        return Err(format!("weights sum to {total}"));
    }
    Ok(())
}

/// A state with value 1 on `element`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Support {
    pub element: ElementId,
    pub state: State,
    /// Blocks whose measure is not pinned down by `element` and was set to
    /// the uniform measure. Empty when the state was found by linear
    /// programming on a lattice stored with explicit tables.
    pub free_blocks: Vec<usize>,
}

/// One canonical supporting state per family member.
///
/// On block-glued lattices the state of `aᵢ` is uniform over the atoms of
/// `aᵢ` inside its block and uniform on every other block (uniform on all
/// blocks when `aᵢ = 1`). On other lattices a supporting state is searched
/// for by exact linear programming.
pub fn atom_supported_states(lattice: &Arc<FiniteOml>, family: &[ElementId]) -> Result<Vec<Support>, StateError> {
    check_orthogonal_family(lattice, family)?;
    family.iter().map(|&a| supporting_state(lattice, a)).collect()
}

pub(crate) fn check_orthogonal_family(lattice: &FiniteOml, family: &[ElementId]) -> Result<(), StateError> {
    for (i, &a) in family.iter().enumerate() {
        if !lattice.contains(a) {
            return Err(StateError::InvalidElement(a));
        }
        if a == lattice.zero() {
            return Err(StateError::ZeroInFamily);
        }
        for &b in &family[..i] {
            if !lattice.is_orthogonal(a, b) {
                return Err(StateError::FamilyNotOrthogonal(b, a));
            }
        }
    }
    Ok(())
}

fn supporting_state(lattice: &Arc<FiniteOml>, a: ElementId) -> Result<Support, StateError> {
    if let Some(blocks) = lattice.block_atoms() {
        let uniform = |k: u32| vec![Rational::new(1, k as i64); k as usize];
        let pinned = lattice.block_position(a);
        let mut measures = Vec::with_capacity(blocks.len());
        let mut free_blocks = Vec::new();
        for (i, &k) in blocks.iter().enumerate() {
            match pinned {
                Some((block, mask)) if block == i => {
                    let w = Rational::new(1, mask.count_ones() as i64);
                    measures.push((0..k).map(|bit| if mask >> bit & 1 == 1 { w.clone() } else { Rational::zero() }).collect());
                }
                _ => {
                    measures.push(uniform(k));
                    free_blocks.push(i);
                }
            }
        }
        let state = state_from_block_measures(lattice, &measures)?;
        return Ok(Support { element: a, state, free_blocks });
    }

    // Variables are the values m(x) of every element.
    let n = lattice.len();
    let unit = |x: ElementId| {
        let mut row = vec![Rational::zero(); n];
        row[x.0] = Rational::one();
        row
    };
    let mut rows = vec![unit(lattice.zero()), unit(lattice.one()), unit(a)];
    let mut rhs = vec![Rational::zero(), Rational::one(), Rational::one()];
    for (x, y, j) in orthogonal_pairs(lattice) {
        let mut row = vec![Rational::zero(); n];
        row[j.0] = Rational::one();
        row[x.0] = &row[x.0] - &Rational::one();
        row[y.0] = &row[y.0] - &Rational::one();
        rows.push(row);
        rhs.push(Rational::zero());
    }
    let values = lp::feasible_point(&rows, &rhs).ok_or(StateError::NoSupportingState { element: a })?;
    let state = State::new(lattice.clone(), values)?;
    Ok(Support { element: a, state, free_blocks: Vec::new() })
}

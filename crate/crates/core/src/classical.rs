//! Finite classical probability spaces and their conditional probability
//! systems `f(A, B) = μ(A ∩ B) / μ(B)` on the events of positive measure.
//!
//! Events are atom bit masks; in reports an event appears as the
//! [`ElementId`] equal to its mask, which is its id in
//! [`boolean_algebra`](crate::lattice::boolean_algebra).

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::conditioning::{ConditionalSystem, ConditioningError, TableState};
use crate::lattice::{boolean_algebra, ElementId, FiniteOml};
use crate::rational::Rational;
use crate::report::PropositionReport;
use crate::states::check_probability_vector;

/// Largest number of atoms of a space.
pub const MAX_ATOMS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassicalError {
    #[error("condition {0} has measure zero")]
    ZeroMeasureCondition(EventSet),
    #[error("atom weights are not a probability vector: {0}")]
    WeightsNotNormalized(String),
    #[error("a space needs between 1 and {MAX_ATOMS} atoms, got {0}")]
    AtomCount(usize),
    #[error("event {0} has atoms outside the space")]
    EventOutOfRange(EventSet),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("the space has atoms of measure zero")]
    NotFullSupport,
}

/// A set of atoms, bit `i` standing for atom `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventSet(pub u32);

impl EventSet {
    pub const EMPTY: EventSet = EventSet(0);

    pub fn from_atoms(atoms: impl IntoIterator<Item = usize>) -> Self {
        EventSet(atoms.into_iter().fold(0, |m, a| m | 1 << (a - 1)))
    }

    pub fn union(self, other: EventSet) -> EventSet {
        EventSet(self.0 | other.0)
    }

    pub fn intersection(self, other: EventSet) -> EventSet {
        EventSet(self.0 & other.0)
    }

    pub fn is_subset(self, other: EventSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn element(self) -> ElementId {
        ElementId(self.0 as usize)
    }
}

impl fmt::Display for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: Vec<String> = (0..32).filter(|b| self.0 >> b & 1 == 1).map(|b| (b + 1).to_string()).collect();
        write!(f, "{{{}}}", atoms.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteProbabilitySpace {
    weights: Vec<Rational>,
    /// Measure of every event, indexed by mask.
    measures: Vec<Rational>,
}

impl FiniteProbabilitySpace {
    pub fn new(weights: Vec<Rational>) -> Result<Self, ClassicalError> {
        if weights.is_empty() || weights.len() > MAX_ATOMS {
            return Err(ClassicalError::AtomCount(weights.len()));
        }
        check_probability_vector(&weights).map_err(ClassicalError::WeightsNotNormalized)?;
        let mut measures = vec![Rational::zero(); 1 << weights.len()];
        for mask in 1..measures.len() {
            let low = mask.trailing_zeros() as usize;
            measures[mask] = &measures[mask & (mask - 1)] + &weights[low];
        }
        Ok(FiniteProbabilitySpace { weights, measures })
    }

    pub fn uniform(n: usize) -> Result<Self, ClassicalError> {
        if n == 0 {
            return Err(ClassicalError::AtomCount(0));
        }
        Self::new(vec![Rational::new(1, n as i64); n])
    }

    pub fn atom_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn omega(&self) -> EventSet {
        EventSet((self.measures.len() - 1) as u32)
    }

    pub fn contains(&self, e: EventSet) -> bool {
        e.is_subset(self.omega())
    }

    /// `μ(E)`. Panics when `E` has atoms outside the space.
    pub fn measure(&self, e: EventSet) -> &Rational {
        &self.measures[e.0 as usize]
    }

    pub fn events(&self) -> impl Iterator<Item = EventSet> {
        (0..self.measures.len() as u32).map(EventSet)
    }

    /// The events of positive measure: the conditions of the space.
    pub fn positive_events(&self) -> impl Iterator<Item = EventSet> + '_ {
        self.events().filter(|e| !self.measure(*e).is_zero())
    }

    pub fn has_full_support(&self) -> bool {
        self.weights.iter().all(|w| !w.is_zero())
    }

    fn check(&self, e: EventSet) -> Result<(), ClassicalError> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(ClassicalError::EventOutOfRange(e))
        }
    }
}

/// `f(A, B) = μ(A ∩ B) / μ(B)`.
pub fn cps_condition(space: &FiniteProbabilitySpace, a: EventSet, b: EventSet) -> Result<Rational, ClassicalError> {
    space.check(a)?;
    space.check(b)?;
    let mb = space.measure(b);
    if mb.is_zero() {
        return Err(ClassicalError::ZeroMeasureCondition(b));
    }
    Ok(space.measure(a.intersection(b)) / mb)
}

/// `∀C: f(C, B) = Σᵢ f(C, Bᵢ)·f(Bᵢ, B)`, over all `2ⁿ` events.
pub fn decomposition_holds(
    space: &FiniteProbabilitySpace,
    family: &[EventSet],
    b: EventSet,
) -> Result<bool, ClassicalError> {
    Ok(decomposition_witness(space, family, b)?.is_none())
}

/// First event `C` breaking the decomposition, with both sides.
fn decomposition_witness(
    space: &FiniteProbabilitySpace,
    family: &[EventSet],
    b: EventSet,
) -> Result<Option<(EventSet, Rational, Rational)>, ClassicalError> {
    let coefficients: Vec<Rational> = family.iter().map(|&bi| cps_condition(space, bi, b)).collect::<Result<_, _>>()?;
    for c in space.events() {
        let lhs = cps_condition(space, c, b)?;
        let mut rhs = Rational::zero();
        for (&bi, k) in family.iter().zip(&coefficients) {
            rhs = rhs + cps_condition(space, c, bi)? * k;
        }
        if lhs != rhs {
            return Ok(Some((c, lhs, rhs)));
        }
    }
    Ok(None)
}

/// `f(⋃Bᵢ, B) = Σ f(Bᵢ, B) = 1`.
pub fn partition_condition_holds(
    space: &FiniteProbabilitySpace,
    family: &[EventSet],
    b: EventSet,
) -> Result<bool, ClassicalError> {
    let union = family.iter().fold(EventSet::EMPTY, |u, &e| u.union(e));
    let total: Rational = family.iter().map(|&bi| cps_condition(space, bi, b)).sum::<Result<Rational, _>>()?;
    Ok(cps_condition(space, union, b)?.is_one() && total.is_one())
}

/// Checks `μ(B) > 0`, `μ(Bᵢ) > 0`, `f(B, Bᵢ) = 1` and `f(Bᵢ, B) > 0`.
fn check_family_hypotheses(
    space: &FiniteProbabilitySpace,
    family: &[EventSet],
    b: EventSet,
) -> Result<(), ClassicalError> {
    space.check(b)?;
    if space.measure(b).is_zero() {
        return Err(ClassicalError::HypothesisViolated(format!("μ({b}) = 0")));
    }
    for &bi in family {
        space.check(bi)?;
        if space.measure(bi).is_zero() {
            return Err(ClassicalError::HypothesisViolated(format!("μ({bi}) = 0")));
        }
        let v = cps_condition(space, b, bi)?;
        if !v.is_one() {
            return Err(ClassicalError::HypothesisViolated(format!("f({b}, {bi}) = {v}, need 1")));
        }
        if cps_condition(space, bi, b)?.is_zero() {
            return Err(ClassicalError::HypothesisViolated(format!("f({bi}, {b}) = 0")));
        }
    }
    Ok(())
}

fn witness(family: &[EventSet], b: EventSet) -> Vec<ElementId> {
    std::iter::once(b).chain(family.iter().copied()).map(EventSet::element).collect()
}

/// The decomposition of `f(·, B)` over the family holds iff
/// `f(⋃Bᵢ, B) = Σ f(Bᵢ, B) = 1`.
pub fn check_prop11(
    space: &FiniteProbabilitySpace,
    family: &[EventSet],
    b: EventSet,
) -> Result<PropositionReport, ClassicalError> {
    check_family_hypotheses(space, family, b)?;
    let mut report = PropositionReport::new("prop11");
    report.instances = 1;
    let lhs = decomposition_witness(space, family, b)?;
    let rhs = partition_condition_holds(space, family, b)?;
    if lhs.is_none() != rhs {
        let union = family.iter().fold(EventSet::EMPTY, |u, &e| u.union(e));
        let total: Rational = family.iter().map(|&bi| cps_condition(space, bi, b)).sum::<Result<Rational, _>>()?;
        let mut values = vec![
            ("f(⋃B_i,B)".to_string(), cps_condition(space, union, b)?),
            ("Σ f(B_i,B)".to_string(), total),
        ];
        let message = match lhs {
            Some((c, l, r)) => {
                values.push((format!("f({c},B)"), l));
                values.push((format!("Σ f({c},B_i)f(B_i,B)"), r));
                "decomposition fails but the partition condition holds".to_string()
            }
            None => "decomposition holds but the partition condition fails".to_string(),
        };
        report.fail(witness(family, b), message, values);
    }
    Ok(report)
}

/// Under the hypotheses of [`check_prop11`] plus the decomposition itself,
/// checks `f(Bᵢ, Bⱼ) = 0` for `i ≠ j`.
///
/// The statement being checked lists the decomposition and the pairwise
/// condition without a connective; this reads it as "decomposition implies
/// pairwise disjointness". [`prop12_converse_holds`] covers the other
/// direction.
pub fn check_prop12(
    space: &FiniteProbabilitySpace,
    family: &[EventSet],
    b: EventSet,
) -> Result<PropositionReport, ClassicalError> {
    check_family_hypotheses(space, family, b)?;
    if let Some((c, l, r)) = decomposition_witness(space, family, b)? {
        return Err(ClassicalError::HypothesisViolated(format!(
            "decomposition fails at C = {c}: {l} ≠ {r}"
        )));
    }
    let mut report = PropositionReport::new("prop12");
    report.note("read as: the decomposition implies f(B_i, B_j) = 0 for i ≠ j");
    for (i, &bi) in family.iter().enumerate() {
        for (j, &bj) in family.iter().enumerate() {
            if i == j {
                continue;
            }
            report.instances += 1;
            let v = cps_condition(space, bi, bj)?;
            if !v.is_zero() {
                report.fail(
                    vec![bi.element(), bj.element()],
                    format!("f(B{}, B{}) ≠ 0", i + 1, j + 1),
                    vec![("f(B_i,B_j)".into(), v)],
                );
            }
        }
    }
    Ok(report)
}

/// Does pairwise `f(Bᵢ, Bⱼ) = 0` (under the family hypotheses) imply the
/// decomposition? Returns `(pairwise, decomposition)`; the converse reading
/// fails exactly when the first is true and the second false.
pub fn prop12_converse_holds(
    space: &FiniteProbabilitySpace,
    family: &[EventSet],
    b: EventSet,
) -> Result<(bool, bool), ClassicalError> {
    check_family_hypotheses(space, family, b)?;
    let mut pairwise = true;
    for (i, &bi) in family.iter().enumerate() {
        for &bj in &family[i + 1..] {
            pairwise &= cps_condition(space, bi, bj)?.is_zero() && cps_condition(space, bj, bi)?.is_zero();
        }
    }
    Ok((pairwise, decomposition_holds(space, family, b)?))
}

/// Families of at most `max_size` distinct positive-measure events, as
/// ascending lists, paired with every positive-measure condition `B` such
/// that the family hypotheses hold.
pub fn hypothesis_instances(space: &FiniteProbabilitySpace, max_size: usize) -> Vec<(Vec<EventSet>, EventSet)> {
    let positive: Vec<EventSet> = space.positive_events().collect();
    let mut out = Vec::new();
    for &b in &positive {
        // f(B, Bᵢ) = 1 and f(Bᵢ, B) > 0
        let candidates: Vec<EventSet> = positive
            .iter()
            .copied()
            .filter(|&e| space.measure(e.intersection(b)) == space.measure(e))
            .collect();
        let mut stack: Vec<(Vec<EventSet>, usize)> = vec![(Vec::new(), 0)];
        while let Some((family, start)) = stack.pop() {
            if !family.is_empty() {
                out.push((family.clone(), b));
            }
            if family.len() == max_size {
                continue;
            }
            for (i, &e) in candidates.iter().enumerate().skip(start) {
                let mut next = family.clone();
                next.push(e);
                stack.push((next, i + 1));
            }
        }
    }
    out
}

/// [`check_prop11`] over every hypothesis-satisfying family of at most
/// `max_size` events.
pub fn check_prop11_exhaustive(space: &FiniteProbabilitySpace, max_size: usize) -> PropositionReport {
    let mut report = PropositionReport::new("prop11");
    for (family, b) in hypothesis_instances(space, max_size) {
        report.absorb(check_prop11(space, &family, b).expect("hypotheses hold by construction"));
    }
    report
}

/// [`check_prop12`] over every family of at most `max_size` events meeting
/// its hypotheses, the decomposition included.
pub fn check_prop12_exhaustive(space: &FiniteProbabilitySpace, max_size: usize) -> PropositionReport {
    let mut report = PropositionReport::new("prop12");
    report.note("read as: the decomposition implies f(B_i, B_j) = 0 for i ≠ j");
    for (family, b) in hypothesis_instances(space, max_size) {
        if decomposition_holds(space, &family, b).expect("hypotheses hold by construction") {
            report.absorb(check_prop12(space, &family, b).expect("hypotheses hold by construction"));
        }
    }
    report
}

/// The space's conditional probability system as a table on the Boolean
/// algebra of its events, with the nonempty events as conditions.
///
/// Requires every atom to carry positive weight: otherwise the
/// positive-measure events need not be closed under relative complements.
pub fn boolean_bridge(
    space: &FiniteProbabilitySpace,
) -> Result<(Arc<FiniteOml>, ConditionalSystem, TableState), ClassicalError> {
    if !space.has_full_support() {
        return Err(ClassicalError::NotFullSupport);
    }
    let lattice = Arc::new(
        boolean_algebra(space.atom_count() as u32).map_err(|_| ClassicalError::AtomCount(space.atom_count()))?,
    );
    let conditions: Vec<EventSet> = space.positive_events().collect();
    let system = ConditionalSystem::new(lattice.clone(), conditions.iter().map(|e| e.element())).map_err(
        |e: ConditioningError| ClassicalError::HypothesisViolated(e.to_string()),
    )?;
    let mut table = TableState::new(lattice.clone());
    for &c in &conditions {
        let column = space.events().map(|a| cps_condition(space, a, c)).collect::<Result<Vec<_>, _>>()?;
        table.insert_condition(c.element(), column);
    }
    Ok((lattice, system, table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditioning::verify_conditional_state;
    use crate::rational::rat;

    fn ev(atoms: &[usize]) -> EventSet {
        EventSet::from_atoms(atoms.iter().copied())
    }

    #[test]
    fn measures_and_conditioning() {
        let s = FiniteProbabilitySpace::uniform(4).unwrap();
        assert_eq!(*s.measure(s.omega()), rat(1, 1));
        assert_eq!(cps_condition(&s, ev(&[1, 2]), ev(&[2, 3])).unwrap(), rat(1, 2));
        assert_eq!(cps_condition(&s, ev(&[1]), ev(&[2, 3])).unwrap(), rat(0, 1));
        assert_eq!(cps_condition(&s, ev(&[3]), ev(&[3])).unwrap(), rat(1, 1));
        let z = FiniteProbabilitySpace::new(vec![rat(1, 1), rat(0, 1)]).unwrap();
        assert_eq!(cps_condition(&z, ev(&[1]), ev(&[2])), Err(ClassicalError::ZeroMeasureCondition(ev(&[2]))));
        assert!(matches!(
            FiniteProbabilitySpace::new(vec![rat(1, 2)]),
            Err(ClassicalError::WeightsNotNormalized(_))
        ));
        assert_eq!(ev(&[1, 3]).to_string(), "{1,3}");
    }

    #[test]
    fn total_probability_on_a_partition() {
        let s = FiniteProbabilitySpace::new(vec![rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap();
        let r = check_prop11(&s, &[ev(&[1]), ev(&[2, 3])], s.omega()).unwrap();
        assert!(r.passed());
        assert!(decomposition_holds(&s, &[ev(&[1]), ev(&[2, 3])], s.omega()).unwrap());
        let r = check_prop12(&s, &[ev(&[1]), ev(&[2, 3])], s.omega()).unwrap();
        assert!(r.passed());
        assert_eq!(r.instances, 2);
    }

    #[test]
    fn overlapping_family() {
        let s = FiniteProbabilitySpace::new(vec![rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap();
        let family = [ev(&[1, 2]), ev(&[2, 3])];
        assert!(!partition_condition_holds(&s, &family, s.omega()).unwrap());
        assert!(!decomposition_holds(&s, &family, s.omega()).unwrap());
        assert!(check_prop11(&s, &family, s.omega()).unwrap().passed());
        assert!(matches!(check_prop12(&s, &family, s.omega()), Err(ClassicalError::HypothesisViolated(_))));
    }

    #[test]
    fn hypotheses_are_enforced() {
        let s = FiniteProbabilitySpace::uniform(3).unwrap();
        // B not containing B_1
        assert!(matches!(check_prop11(&s, &[ev(&[1, 2])], ev(&[1])), Err(ClassicalError::HypothesisViolated(_))));
    }

    #[test]
    fn pairwise_disjointness_does_not_give_decomposition() {
        let s = FiniteProbabilitySpace::uniform(2).unwrap();
        let (pairwise, decomposition) = prop12_converse_holds(&s, &[ev(&[1])], s.omega()).unwrap();
        assert!(pairwise && !decomposition);
    }

    #[test]
    fn exhaustive_scans() {
        let s = FiniteProbabilitySpace::new(vec![rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap();
        let r = check_prop11_exhaustive(&s, 3);
        assert!(r.passed());
        assert!(r.instances > 0);
        assert!(check_prop12_exhaustive(&s, 3).passed());
        // B = {1}: only {1} itself qualifies
        let one = ev(&[1]);
        let n = hypothesis_instances(&s, 3).iter().filter(|(_, b)| *b == one).count();
        assert_eq!(n, 1);
    }

    #[test]
    fn bridge_is_a_conditional_state() {
        let s = FiniteProbabilitySpace::new(vec![rat(1, 6), rat(1, 3), rat(1, 2)]).unwrap();
        let (_, system, table) = boolean_bridge(&s).unwrap();
        assert_eq!(system.len(), 7);
        assert!(verify_conditional_state(&system, &table).passed());
        let z = FiniteProbabilitySpace::new(vec![rat(1, 1), rat(0, 1)]).unwrap();
        assert_eq!(boolean_bridge(&z).unwrap_err(), ClassicalError::NotFullSupport);
    }
}

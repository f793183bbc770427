//! Verification reports shared by every checker in the crate.

use std::fmt;

use crate::lattice::ElementId;
use crate::rational::Rational;

/// Tag naming the axiom or closure rule a violation breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    // ordered set and bounds
    OrderReflexive,
    OrderAntisymmetric,
    OrderTransitive,
    Bounds,
    Join,
    Meet,
    // orthocomplementation
    OrthoTotal,
    Involution,
    Complement,
    OrderReversing,
    Orthomodular,
    MeetZero,
    // states
    StateTotal,
    StateZero,
    StateOne,
    StateRange,
    StateAdditive,
    // conditional systems
    CsZero,
    CsJoin,
    CsRelativeComplement,
    // conditional states
    Undefined,
    C1,
    C2,
    C3,
}

impl Axiom {
    pub fn tag(self) -> &'static str {
        match self {
            Axiom::OrderReflexive => "order-reflexive",
            Axiom::OrderAntisymmetric => "order-antisymmetric",
            Axiom::OrderTransitive => "order-transitive",
            Axiom::Bounds => "bounds",
            Axiom::Join => "join",
            Axiom::Meet => "meet",
            Axiom::OrthoTotal => "ortho-total",
            Axiom::Involution => "involution",
            Axiom::Complement => "complement",
            Axiom::OrderReversing => "order-reversing",
            Axiom::Orthomodular => "orthomodular",
            Axiom::MeetZero => "meet-zero",
            Axiom::StateTotal => "state-total",
            Axiom::StateZero => "state-zero",
            Axiom::StateOne => "state-one",
            Axiom::StateRange => "state-range",
            Axiom::StateAdditive => "state-additive",
            Axiom::CsZero => "cs-zero",
            Axiom::CsJoin => "cs-join",
            Axiom::CsRelativeComplement => "cs-relative-complement",
            Axiom::Undefined => "undefined",
            Axiom::C1 => "C1",
            Axiom::C2 => "C2",
            Axiom::C3 => "C3",
        }
    }

    /// True for the orthocomplementation axioms (total map, involution,
    /// complement, order reversal).
    pub fn is_orthocomplementation(self) -> bool {
        matches!(
            self,
            Axiom::OrthoTotal | Axiom::Involution | Axiom::Complement | Axiom::OrderReversing
        )
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<ElementId>,
    pub detail: String,
}

impl Violation {
    pub fn new(axiom: Axiom, witness: Vec<ElementId>) -> Self {
        Violation { axiom, witness, detail: String::new() }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at (", self.axiom)?;
        for (i, w) in self.witness.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w}")?;
        }
        f.write_str(")")?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

/// Outcome of an exhaustive axiom scan. Violations are kept sorted so that
/// reports are deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn extend(&mut self, other: AxiomReport) {
        self.violations.extend(other.violations);
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }

    pub fn has(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    pub(crate) fn finish(mut self) -> Self {
        self.violations.sort();
        self.violations.dedup();
        self
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return f.write_str("passed");
        }
        writeln!(f, "failed with {} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// A failed instance of a proposition, with the exact values on both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub witness: Vec<ElementId>,
    pub message: String,
    pub values: Vec<(String, Rational)>,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.witness, self.message)?;
        for (name, v) in &self.values {
            write!(f, "; {name} = {v}")?;
        }
        Ok(())
    }
}

/// An instance evaluated outside a proposition's hypotheses. Recorded, never
/// counted as a failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub witness: Vec<ElementId>,
    pub description: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropositionReport {
    pub tag: String,
    pub instances: usize,
    pub failures: Vec<Failure>,
    pub observations: Vec<Observation>,
    /// Reading notes: how an ambiguous statement was interpreted.
    pub notes: Vec<String>,
}

impl PropositionReport {
    pub fn new(tag: impl Into<String>) -> Self {
        PropositionReport {
            tag: tag.into(),
            instances: 0,
            failures: Vec::new(),
            observations: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn fail(&mut self, witness: Vec<ElementId>, message: impl Into<String>, values: Vec<(String, Rational)>) {
        self.failures.push(Failure { witness, message: message.into(), values });
    }

    pub fn observe(&mut self, witness: Vec<ElementId>, description: impl Into<String>, holds: bool) {
        self.observations.push(Observation { witness, description: description.into(), holds });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        let note = note.into();
        if !self.notes.contains(&note) {
            self.notes.push(note);
        }
    }

    /// Folds another report's counts, failures and notes into this one.
    pub fn absorb(&mut self, other: PropositionReport) {
        self.instances += other.instances;
        self.failures.extend(other.failures);
        self.observations.extend(other.observations);
        for n in other.notes {
            self.note(n);
        }
    }
}

impl fmt::Display for PropositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "passed" } else { "FAILED" };
        writeln!(
            f,
            "{}: {verdict} ({} instance(s), {} failure(s))",
            self.tag,
            self.instances,
            self.failures.len()
        )?;
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        for fl in &self.failures {
            writeln!(f, "  failure {fl}")?;
        }
        if !self.observations.is_empty() {
            let holding = self.observations.iter().filter(|o| o.holds).count();
            writeln!(
                f,
                "  recorded outside hypotheses: {} instance(s), {holding} holding",
                self.observations.len()
            )?;
        }
        Ok(())
    }
}

//! Finite orthomodular lattices.
//!
//! A [`FiniteOml`] is validated once, at construction, and is immutable
//! afterwards. Two storage layouts sit behind the same API: an explicit order
//! relation with join/meet tables for lattices given by relations, and a
//! compact layout for Boolean blocks glued at 0 and 1 (Boolean algebras,
//! `MO(m)`, horizontal sums) whose operations are computed from atom masks.

mod builders;
mod dense;
mod glued;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::report::{Axiom, AxiomReport, Violation};

pub use builders::{boolean_algebra, horizontal_sum, mo_lattice, BooleanView};

use dense::Dense;
use glued::{Decoded, Glued};

/// Largest element count any builder accepts.
pub const MAX_ELEMENTS: usize = 1 << 16;

/// Largest element count stored with explicit n×n tables.
pub const MAX_DENSE_ELEMENTS: usize = 1 << 12;

/// Index of a lattice element; ids of an `n`-element lattice are `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub usize);

impl ElementId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("element id {id} out of range for a lattice of {n} elements")]
    InvalidElement { id: usize, n: usize },
    #[error("requested {requested} elements, limit is {limit}")]
    SizeLimitExceeded { requested: usize, limit: usize },
    #[error("not a partial order: {0}")]
    NotPartialOrder(Violation),
    #[error("not a bounded lattice: {0}")]
    NotLattice(Violation),
    #[error("not orthocomplemented: {}", first_violation(.0))]
    NotOrthocomplemented(AxiomReport),
    #[error("not orthomodular: {}", first_violation(.0))]
    NotOrthomodular(AxiomReport),
    #[error("block {index} is not a Boolean algebra with at least 4 elements")]
    BlockNotBoolean { index: usize },
    #[error("a horizontal sum needs at least one block")]
    EmptySum,
    #[error("precondition violated at {element}: {detail}")]
    PreconditionViolated { element: ElementId, detail: String },
    #[error("label `{0}` used twice")]
    DuplicateLabel(String),
    #[error("expected {expected} labels, got {got}")]
    LabelCountMismatch { expected: usize, got: usize },
}

fn first_violation(r: &AxiomReport) -> String {
    match r.first() {
        Some(v) if r.violations.len() > 1 => format!("{v} (+{} more)", r.violations.len() - 1),
        Some(v) => v.to_string(),
        None => "no violations".into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    Dense(Dense),
    Glued(Glued),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteOml {
    repr: Repr,
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl FiniteOml {
    /// Builds and validates a lattice from an order relation given as
    /// (not necessarily closed) `a ≤ b` pairs and an orthocomplement map
    /// given as `a ↦ a⊥` entries.
    ///
    /// The reflexive-transitive closure of `leq_pairs` is the order. Failures
    /// are reported in the order: partial order, lattice, orthocomplement,
    /// orthomodular law.
    pub fn build_from_relations(
        n: usize,
        leq_pairs: &[(ElementId, ElementId)],
        ortho: &[(ElementId, ElementId)],
        zero: ElementId,
        one: ElementId,
    ) -> Result<Self, LatticeError> {
        let labels = (0..n).map(|i| format!("e{i}")).collect();
        Self::build_labeled(labels, leq_pairs, ortho, zero, one)
    }

    /// [`build_from_relations`](Self::build_from_relations) with element
    /// labels, which also appear in the details of reported violations.
    pub fn build_labeled(
        labels: Vec<String>,
        leq_pairs: &[(ElementId, ElementId)],
        ortho: &[(ElementId, ElementId)],
        zero: ElementId,
        one: ElementId,
    ) -> Result<Self, LatticeError> {
        let n = labels.len();
        if n == 0 || n > MAX_DENSE_ELEMENTS {
            return Err(LatticeError::SizeLimitExceeded { requested: n, limit: MAX_DENSE_ELEMENTS });
        }
        let check = |id: ElementId| {
            if id.0 < n {
                Ok(())
            } else {
                Err(LatticeError::InvalidElement { id: id.0, n })
            }
        };
        for &(a, b) in leq_pairs.iter().chain(ortho) {
            check(a)?;
            check(b)?;
        }
        check(zero)?;
        check(one)?;

        let order = dense::close_order(n, leq_pairs)?;

        let mut map: Vec<Option<usize>> = vec![None; n];
        let mut report = AxiomReport::new();
        for &(a, b) in ortho {
            match map[a.0] {
                Some(prev) if prev != b.0 => report.push(
                    Violation::new(Axiom::OrthoTotal, vec![a])
                        .with_detail(format!("two complements #{prev} and {b}")),
                ),
                _ => map[a.0] = Some(b.0),
            }
        }
        for (a, m) in map.iter().enumerate() {
            if m.is_none() {
                report.push(
                    Violation::new(Axiom::OrthoTotal, vec![ElementId(a)]).with_detail("no orthocomplement given"),
                );
            }
        }
        // Tables are built before reporting a broken ortho map so that order
        // and lattice failures take precedence.
        let ortho_table: Vec<u32> = map.iter().map(|m| m.unwrap_or(0) as u32).collect();
        let tables = dense::lattice_tables(order, ortho_table, zero.0, one.0)?;
        if !report.passed() {
            return Err(LatticeError::NotOrthocomplemented(report.finish()));
        }

        let lattice = FiniteOml::from_repr(Repr::Dense(tables), None).with_labels(labels)?;
        let ortho_report = lattice.orthocomplement_report();
        if !ortho_report.passed() {
            return Err(LatticeError::NotOrthocomplemented(ortho_report));
        }
        let om = lattice.orthomodular_report();
        if !om.passed() {
            return Err(LatticeError::NotOrthomodular(om));
        }
        Ok(lattice)
    }

    fn from_repr(repr: Repr, labels: Option<Vec<String>>) -> Self {
        let n = match &repr {
            Repr::Dense(d) => d.n,
            Repr::Glued(g) => g.n,
        };
        let labels = labels.unwrap_or_else(|| (0..n).map(|i| format!("e{i}")).collect());
        debug_assert_eq!(labels.len(), n);
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        FiniteOml { repr, labels, index }
    }

    pub(crate) fn glued(atoms: &[u32], labels: Vec<String>) -> Self {
        FiniteOml::from_repr(Repr::Glued(Glued::new(atoms)), Some(labels))
    }

    /// Replaces the display labels. Labels must be unique.
    pub fn with_labels<S: Into<String>>(mut self, labels: impl IntoIterator<Item = S>) -> Result<Self, LatticeError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != self.len() {
            return Err(LatticeError::LabelCountMismatch { expected: self.len(), got: labels.len() });
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(LatticeError::DuplicateLabel(l.clone()));
            }
        }
        self.labels = labels;
        self.index = index;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.len()).map(ElementId)
    }

    pub fn contains(&self, a: ElementId) -> bool {
        a.0 < self.len()
    }

    pub fn label(&self, a: ElementId) -> &str {
        &self.labels[a.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Looks an element up by label.
    pub fn element(&self, label: &str) -> Option<ElementId> {
        self.index.get(label).copied().map(ElementId)
    }

    pub fn zero(&self) -> ElementId {
        match &self.repr {
            Repr::Dense(d) => ElementId(d.zero as usize),
            Repr::Glued(_) => ElementId(0),
        }
    }

    pub fn one(&self) -> ElementId {
        match &self.repr {
            Repr::Dense(d) => ElementId(d.one as usize),
            Repr::Glued(g) => ElementId(g.n - 1),
        }
    }

    pub fn leq(&self, a: ElementId, b: ElementId) -> bool {
        match &self.repr {
            Repr::Dense(d) => d.leq.get(a.0, b.0),
            Repr::Glued(g) => g.leq(a.0, b.0),
        }
    }

    /// Strict order `a < b`.
    pub fn lt(&self, a: ElementId, b: ElementId) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn join(&self, a: ElementId, b: ElementId) -> ElementId {
        match &self.repr {
            Repr::Dense(d) => ElementId(d.join(a.0, b.0)),
            Repr::Glued(g) => ElementId(g.join(a.0, b.0)),
        }
    }

    pub fn meet(&self, a: ElementId, b: ElementId) -> ElementId {
        match &self.repr {
            Repr::Dense(d) => ElementId(d.meet(a.0, b.0)),
            Repr::Glued(g) => ElementId(g.meet(a.0, b.0)),
        }
    }

    pub fn ortho(&self, a: ElementId) -> ElementId {
        match &self.repr {
            Repr::Dense(d) => ElementId(d.ortho[a.0] as usize),
            Repr::Glued(g) => ElementId(g.ortho(a.0)),
        }
    }

    /// Join of a finite family; the empty join is 0.
    pub fn join_all(&self, items: impl IntoIterator<Item = ElementId>) -> ElementId {
        items.into_iter().fold(self.zero(), |acc, x| self.join(acc, x))
    }

    /// Meet of a finite family; the empty meet is 1.
    pub fn meet_all(&self, items: impl IntoIterator<Item = ElementId>) -> ElementId {
        items.into_iter().fold(self.one(), |acc, x| self.meet(acc, x))
    }

    /// `a ⊥ b`, i.e. `a ≤ b⊥`.
    pub fn is_orthogonal(&self, a: ElementId, b: ElementId) -> bool {
        self.leq(a, self.ortho(b))
    }

    /// Whether every pair of `family` is orthogonal.
    pub fn mutually_orthogonal(&self, family: &[ElementId]) -> bool {
        family
            .iter()
            .enumerate()
            .all(|(i, &a)| family[i + 1..].iter().all(|&b| self.is_orthogonal(a, b)))
    }

    /// Compatibility `a ↔ b`, decided by `a = (a ∧ b) ∨ (a ∧ b⊥)`.
    pub fn is_compatible(&self, a: ElementId, b: ElementId) -> bool {
        a == self.join(self.meet(a, b), self.meet(a, self.ortho(b)))
    }

    /// Evaluates `b ∧ ⋁ aᵢ = ⋁ (aᵢ ∧ b)` for a family compatible with `b`.
    pub fn check_compat_distributivity(&self, b: ElementId, family: &[ElementId]) -> Result<bool, LatticeError> {
        if let Some(&a) = family.iter().find(|&&a| !self.is_compatible(b, a)) {
            return Err(LatticeError::PreconditionViolated {
                element: a,
                detail: format!("{} is not compatible with {}", self.label(a), self.label(b)),
            });
        }
        let lhs = self.meet(b, self.join_all(family.iter().copied()));
        let rhs = self.join_all(family.iter().map(|&a| self.meet(a, b)));
        Ok(lhs == rhs)
    }

    /// Minimal nonzero elements.
    pub fn atoms(&self) -> Vec<ElementId> {
        let zero = self.zero();
        match &self.repr {
            Repr::Glued(g) => {
                let mut out = Vec::new();
                for (i, b) in g.blocks.iter().enumerate() {
                    for bit in 0..b.atoms {
                        out.push(ElementId(g.encode(i, 1 << bit)));
                    }
                }
                out.sort();
                out
            }
            Repr::Dense(_) => self
                .elements()
                .filter(|&x| x != zero && self.elements().all(|y| y == zero || y == x || !self.leq(y, x)))
                .collect(),
        }
    }

    /// Atom counts of the Boolean blocks when the lattice is stored as blocks
    /// glued at 0 and 1.
    pub fn block_atoms(&self) -> Option<Vec<u32>> {
        match &self.repr {
            Repr::Glued(g) => Some(g.blocks.iter().map(|b| b.atoms).collect()),
            Repr::Dense(_) => None,
        }
    }

    /// For glued storage: the block and atom mask of a proper element, `None`
    /// for 0, 1, or a lattice stored with explicit tables.
    pub fn block_position(&self, a: ElementId) -> Option<(usize, u32)> {
        match &self.repr {
            Repr::Glued(g) => match g.decode(a.0) {
                Decoded::Proper { block, mask } => Some((block, mask)),
                _ => None,
            },
            Repr::Dense(_) => None,
        }
    }

    /// For glued storage: the element of `block` with atom mask `mask`.
    pub fn block_element(&self, block: usize, mask: u32) -> Option<ElementId> {
        match &self.repr {
            Repr::Glued(g) if block < g.blocks.len() && mask <= g.blocks[block].full() => {
                Some(ElementId(g.encode(block, mask)))
            }
            _ => None,
        }
    }

    /// Exhaustive check of every lattice and orthocomplement axiom against
    /// the public operations. Quadratic to cubic in the element count.
    pub fn verify(&self) -> AxiomReport {
        let mut r = self.order_report();
        r.extend(self.orthocomplement_report());
        r.extend(self.orthomodular_report());
        let zero = self.zero();
        for a in self.elements() {
            if self.meet(a, self.ortho(a)) != zero {
                r.push(Violation::new(Axiom::MeetZero, vec![a]));
            }
        }
        r.finish()
    }

    fn order_report(&self) -> AxiomReport {
        let mut r = AxiomReport::new();
        let (zero, one) = (self.zero(), self.one());
        let els: Vec<ElementId> = self.elements().collect();
        for &a in &els {
            if !self.leq(a, a) {
                r.push(Violation::new(Axiom::OrderReflexive, vec![a]));
            }
            if !self.leq(zero, a) || !self.leq(a, one) {
                r.push(Violation::new(Axiom::Bounds, vec![a]));
            }
            for &b in &els {
                if a < b && self.leq(a, b) && self.leq(b, a) {
                    r.push(Violation::new(Axiom::OrderAntisymmetric, vec![a, b]));
                }
                if !self.leq(a, b) {
                    continue;
                }
                for &c in &els {
                    if self.leq(b, c) && !self.leq(a, c) {
                        r.push(Violation::new(Axiom::OrderTransitive, vec![a, b, c]));
                    }
                }
            }
        }
        for (i, &a) in els.iter().enumerate() {
            for &b in &els[i..] {
                let j = self.join(a, b);
                let m = self.meet(a, b);
                let j_ok = self.leq(a, j)
                    && self.leq(b, j)
                    && els.iter().all(|&u| !(self.leq(a, u) && self.leq(b, u)) || self.leq(j, u));
                let m_ok = self.leq(m, a)
                    && self.leq(m, b)
                    && els.iter().all(|&u| !(self.leq(u, a) && self.leq(u, b)) || self.leq(u, m));
                if !j_ok || self.join(b, a) != j {
                    r.push(Violation::new(Axiom::Join, vec![a, b]));
                }
                if !m_ok || self.meet(b, a) != m {
                    r.push(Violation::new(Axiom::Meet, vec![a, b]));
                }
            }
        }
        r
    }

    fn orthocomplement_report(&self) -> AxiomReport {
        let mut r = AxiomReport::new();
        let one = self.one();
        for a in self.elements() {
            let ao = self.ortho(a);
            if self.ortho(ao) != a {
                r.push(Violation::new(Axiom::Involution, vec![a]).with_detail(format!(
                    "({})⊥⊥ = {}",
                    self.label(a),
                    self.label(self.ortho(ao))
                )));
            }
            if self.join(a, ao) != one {
                r.push(Violation::new(Axiom::Complement, vec![a]).with_detail(format!(
                    "{} ∨ {} = {}",
                    self.label(a),
                    self.label(ao),
                    self.label(self.join(a, ao))
                )));
            }
            for b in self.elements() {
                if a != b && self.leq(a, b) && !self.leq(self.ortho(b), ao) {
                    r.push(Violation::new(Axiom::OrderReversing, vec![a, b]));
                }
            }
        }
        r.finish()
    }

    fn orthomodular_report(&self) -> AxiomReport {
        let mut r = AxiomReport::new();
        for a in self.elements() {
            let ao = self.ortho(a);
            for b in self.elements() {
                if self.leq(a, b) && self.join(a, self.meet(ao, b)) != b {
                    r.push(Violation::new(Axiom::Orthomodular, vec![a, b]).with_detail(format!(
                        "{} ∨ ({}⊥ ∧ {}) = {}",
                        self.label(a),
                        self.label(a),
                        self.label(b),
                        self.label(self.join(a, self.meet(ao, b)))
                    )));
                }
            }
        }
        r.finish()
    }

    /// Renders a violation with element labels instead of ids.
    pub fn describe(&self, v: &Violation) -> String {
        let names: Vec<&str> = v
            .witness
            .iter()
            .map(|&w| if self.contains(w) { self.label(w) } else { "?" })
            .collect();
        if v.detail.is_empty() {
            format!("{} at ({})", v.axiom, names.join(", "))
        } else {
            format!("{} at ({}): {}", v.axiom, names.join(", "), v.detail)
        }
    }
}

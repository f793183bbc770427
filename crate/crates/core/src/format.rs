//! The `.oml` text format.
//!
//! ```text
//! # MO(2)
//! elements: 0 a a' b b' 1
//! bounds: 0 1
//! leq: 0 a            # one pair per line; covers suffice
//! ortho: a a'         # symmetric
//!
//! [state alpha]
//! a = 1
//! b = 0.2             # decimals are exact
//!
//! [conditional]
//! family: a a'
//! weights: 1/10 9/10
//! supports: alpha alphaprime
//!
//! [system]
//! members: a a' 1
//!
//! [space]
//! weights: 1/2 1/4 1/4
//! family: {1} {2,3}
//! condition: {1,2,3}
//! ```
//!
//! A `[state]` section may list only some values; the rest are derived from
//! the state rules where they are forced. `[space]` describes a finite
//! probability space by its atom weights, with optional event family and
//! condition.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::classical::{ClassicalError, EventSet, FiniteProbabilitySpace};
use crate::conditioning::{construct_fk, ConditionalState, ConditioningError, WeightVector};
use crate::lattice::{ElementId, FiniteOml, LatticeError};
use crate::rational::Rational;
use crate::states::{State, StateError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: undeclared name `{name}`")]
    UndeclaredName { line: usize, column: usize, name: String },
    #[error("line {line}, column {column}: duplicate name `{name}`")]
    DuplicateName { line: usize, column: usize, name: String },
    #[error("missing section: {0}")]
    MissingSection(&'static str),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("state `{name}`: {source}")]
    State { name: String, source: StateError },
    #[error(transparent)]
    Conditioning(#[from] ConditioningError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
}

impl FormatError {
    /// True for errors in the text itself, as opposed to a well-formed file
    /// describing an invalid structure.
    pub fn is_syntax(&self) -> bool {
        matches!(self, FormatError::Parse { .. } | FormatError::UndeclaredName { .. } | FormatError::DuplicateName { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSection {
    pub name: String,
    pub values: Vec<(String, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalSection {
    pub family: Vec<String>,
    pub weights: Vec<Rational>,
    pub supports: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceSection {
    pub weights: Vec<Rational>,
    pub family: Option<Vec<EventSet>>,
    pub condition: Option<EventSet>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OmlDocument {
    pub elements: Vec<String>,
    pub bounds: Option<(String, String)>,
    pub leq: Vec<(String, String)>,
    pub ortho: Vec<(String, String)>,
    pub states: Vec<StateSection>,
    pub conditional: Option<ConditionalSection>,
    pub system: Option<Vec<String>>,
    pub space: Option<SpaceSection>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Lattice,
    State,
    Conditional,
    System,
    Space,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(s: &str, offset: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (i, ch)) in s.char_indices().enumerate() {
        if ch.is_whitespace() {
            if let Some((b, c)) = start.take() {
                out.push(Token { text: &s[b..i], column: offset + c });
            }
        } else if start.is_none() {
            start = Some((i, col + 1));
        }
    }
    if let Some((b, c)) = start {
        out.push(Token { text: &s[b..], column: offset + c });
    }
    out
}

fn err(line: usize, column: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line, column, message: message.into() }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && !s.contains(['#', ':', '=', '[', ']'])
}

fn parse_rational(t: &Token<'_>, line: usize) -> Result<Rational, FormatError> {
    t.text.parse().map_err(|_| err(line, t.column, format!("`{}` is not a rational number", t.text)))
}

fn parse_event(t: &Token<'_>, line: usize) -> Result<EventSet, FormatError> {
    let bad = || err(line, t.column, format!("`{}` is not an event such as {{1,3}}", t.text));
    let inner = t.text.strip_prefix('{').and_then(|s| s.strip_suffix('}')).ok_or_else(bad)?;
    if inner.is_empty() {
        return Ok(EventSet::EMPTY);
    }
    let mut mask = 0u32;
    for part in inner.split(',') {
        let atom: u32 = part.parse().map_err(|_| bad())?;
        if atom == 0 || atom > crate::classical::MAX_ATOMS as u32 {
            return Err(bad());
        }
        mask |= 1 << (atom - 1);
    }
    Ok(EventSet(mask))
}

/// A name mentioned in the file, kept for the final declaration check.
struct Reference {
    name: String,
    line: usize,
    column: usize,
    kind: RefKind,
}

#[derive(PartialEq, Eq)]
enum RefKind {
    Element,
    State,
}

/// Parses a document. Only the text is checked here: names must be declared
/// and unique, values must be rationals. Whether the declared structure is
/// an orthomodular lattice is checked by [`OmlDocument::lattice`].
pub fn parse_oml(text: &str) -> Result<OmlDocument, FormatError> {
    let mut doc = OmlDocument::default();
    let mut section = Section::Lattice;
    let mut refs: Vec<Reference> = Vec::new();
    let mut seen_keys: HashSet<(usize, &'static str)> = HashSet::new();
    let mut section_index = 0usize;
    let mut elements_declared = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let lead = content.len() - content.trim_start().len();
        let lead_col = content[..lead].chars().count() + 1;
        let trimmed = content.trim();

        if trimmed.starts_with('[') {
            let inner = trimmed
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| err(line, lead_col, "section header must end with `]`"))?;
            let words = tokens(inner, lead_col);
            section_index += 1;
            match words.as_slice() {
                [w, name] if w.text == "state" => {
                    if !valid_name(name.text) {
                        return Err(err(line, name.column, format!("invalid state name `{}`", name.text)));
                    }
                    if doc.states.iter().any(|s| s.name == name.text) {
                        return Err(FormatError::DuplicateName { line, column: name.column, name: name.text.into() });
                    }
                    doc.states.push(StateSection { name: name.text.to_string(), values: Vec::new() });
                    section = Section::State;
                }
                [w] if w.text == "conditional" => {
                    if doc.conditional.is_some() {
                        return Err(err(line, lead_col, "second [conditional] section"));
                    }
                    doc.conditional =
                        Some(ConditionalSection { family: Vec::new(), weights: Vec::new(), supports: Vec::new() });
                    section = Section::Conditional;
                }
                [w] if w.text == "system" => {
                    if doc.system.is_some() {
                        return Err(err(line, lead_col, "second [system] section"));
                    }
                    doc.system = Some(Vec::new());
                    section = Section::System;
                }
                [w] if w.text == "space" => {
                    if doc.space.is_some() {
                        return Err(err(line, lead_col, "second [space] section"));
                    }
                    doc.space = Some(SpaceSection { weights: Vec::new(), family: None, condition: None });
                    section = Section::Space;
                }
                _ => return Err(err(line, lead_col, format!("unknown section `{trimmed}`"))),
            }
            continue;
        }

        if section == Section::State {
            let (lhs, rhs) = trimmed
                .split_once('=')
                .ok_or_else(|| err(line, lead_col, "expected `name = value`"))?;
            let name_toks = tokens(lhs, lead_col - 1);
            let eq_col = lead_col + lhs.chars().count();
            let value_toks = tokens(rhs, eq_col);
            let ([name], [value]) = (name_toks.as_slice(), value_toks.as_slice()) else {
                return Err(err(line, lead_col, "expected `name = value`"));
            };
            let v = parse_rational(value, line)?;
            let state = doc.states.last_mut().expect("state section is open");
            if state.values.iter().any(|(n, _)| n == name.text) {
                return Err(FormatError::DuplicateName { line, column: name.column, name: name.text.into() });
            }
            refs.push(Reference { name: name.text.into(), line, column: name.column, kind: RefKind::Element });
            state.values.push((name.text.to_string(), v));
            continue;
        }

        let (key, rest) = trimmed
            .split_once(':')
            .ok_or_else(|| err(line, lead_col, "expected `key: values`"))?;
        let key = key.trim();
        let rest_col = lead_col + trimmed[..trimmed.find(':').unwrap()].chars().count() + 1;
        let args = tokens(rest, rest_col - 1);
        let key_static: &'static str = match (section, key) {
            (Section::Lattice, "elements") => "elements",
            (Section::Lattice, "bounds") => "bounds",
            (Section::Lattice, "leq") => "leq",
            (Section::Lattice, "ortho") => "ortho",
            (Section::Conditional, "family") => "family",
            (Section::Conditional, "weights") => "weights",
            (Section::Conditional, "supports") => "supports",
            (Section::System, "members") => "members",
            (Section::Space, "weights") => "space-weights",
            (Section::Space, "family") => "space-family",
            (Section::Space, "condition") => "condition",
            _ => return Err(err(line, lead_col, format!("unknown key `{key}` here"))),
        };
        if !matches!(key_static, "leq" | "ortho") && !seen_keys.insert((section_index, key_static)) {
            return Err(err(line, lead_col, format!("`{key}` given twice")));
        }
        let element_refs = |refs: &mut Vec<Reference>, toks: &[Token<'_>]| {
            for t in toks {
                refs.push(Reference { name: t.text.into(), line, column: t.column, kind: RefKind::Element });
            }
        };
        let pair = |toks: &[Token<'_>]| -> Result<(String, String), FormatError> {
            match toks {
                [a, b] => Ok((a.text.to_string(), b.text.to_string())),
                _ => Err(err(line, rest_col, format!("`{key}` takes exactly two names"))),
            }
        };
        match key_static {
            "elements" => {
                if args.is_empty() {
                    return Err(err(line, rest_col, "no elements declared"));
                }
                let mut seen = HashSet::new();
                for t in &args {
                    if !valid_name(t.text) {
                        return Err(err(line, t.column, format!("invalid element name `{}`", t.text)));
                    }
                    if !seen.insert(t.text) {
                        return Err(FormatError::DuplicateName { line, column: t.column, name: t.text.into() });
                    }
                }
                doc.elements = args.iter().map(|t| t.text.to_string()).collect();
                elements_declared = true;
            }
            "bounds" => {
                doc.bounds = Some(pair(&args)?);
                element_refs(&mut refs, &args);
            }
            "leq" => {
                doc.leq.push(pair(&args)?);
                element_refs(&mut refs, &args);
            }
            "ortho" => {
                doc.ortho.push(pair(&args)?);
                element_refs(&mut refs, &args);
            }
            "family" => {
                doc.conditional.as_mut().unwrap().family = args.iter().map(|t| t.text.to_string()).collect();
                element_refs(&mut refs, &args);
            }
            "weights" => {
                doc.conditional.as_mut().unwrap().weights =
                    args.iter().map(|t| parse_rational(t, line)).collect::<Result<_, _>>()?;
            }
            "supports" => {
                for t in &args {
                    refs.push(Reference { name: t.text.into(), line, column: t.column, kind: RefKind::State });
                }
                doc.conditional.as_mut().unwrap().supports = args.iter().map(|t| t.text.to_string()).collect();
            }
            "members" => {
                doc.system = Some(args.iter().map(|t| t.text.to_string()).collect());
                element_refs(&mut refs, &args);
            }
            "space-weights" => {
                doc.space.as_mut().unwrap().weights =
                    args.iter().map(|t| parse_rational(t, line)).collect::<Result<_, _>>()?;
            }
            "space-family" => {
                doc.space.as_mut().unwrap().family =
                    Some(args.iter().map(|t| parse_event(t, line)).collect::<Result<_, _>>()?);
            }
            "condition" => {
                let [t] = args.as_slice() else {
                    return Err(err(line, rest_col, "`condition` takes one event"));
                };
                doc.space.as_mut().unwrap().condition = Some(parse_event(t, line)?);
            }
            _ => unreachable!(),
        }
    }

    let elements: HashSet<&str> = doc.elements.iter().map(String::as_str).collect();
    let states: HashSet<&str> = doc.states.iter().map(|s| s.name.as_str()).collect();
    for r in &refs {
        let known = match r.kind {
            RefKind::Element => elements_declared && elements.contains(r.name.as_str()),
            RefKind::State => states.contains(r.name.as_str()),
        };
        if !known {
            return Err(FormatError::UndeclaredName { line: r.line, column: r.column, name: r.name.clone() });
        }
    }
    Ok(doc)
}

impl OmlDocument {
    fn ids(&self) -> HashMap<&str, ElementId> {
        self.elements.iter().enumerate().map(|(i, n)| (n.as_str(), ElementId(i))).collect()
    }

    /// Builds and validates the lattice. Orthocomplement pairs apply in
    /// both directions.
    pub fn lattice(&self) -> Result<Arc<FiniteOml>, FormatError> {
        if self.elements.is_empty() {
            return Err(FormatError::MissingSection("elements"));
        }
        let (zero, one) = self.bounds.as_ref().ok_or(FormatError::MissingSection("bounds"))?;
        let ids = self.ids();
        let leq: Vec<(ElementId, ElementId)> = self.leq.iter().map(|(a, b)| (ids[a.as_str()], ids[b.as_str()])).collect();
        let mut ortho = Vec::with_capacity(2 * self.ortho.len());
        for (a, b) in &self.ortho {
            let (a, b) = (ids[a.as_str()], ids[b.as_str()]);
            ortho.push((a, b));
            if a != b {
                ortho.push((b, a));
            }
        }
        ortho.sort();
        ortho.dedup();
        let lattice =
            FiniteOml::build_labeled(self.elements.clone(), &leq, &ortho, ids[zero.as_str()], ids[one.as_str()])?;
        Ok(Arc::new(lattice))
    }

    /// The named state section, completed by the forced state rules.
    pub fn state(&self, lattice: &Arc<FiniteOml>, name: &str) -> Result<State, FormatError> {
        let section = self
            .states
            .iter()
            .find(|s| s.name == name)
            .ok_or(FormatError::MissingSection("state"))?;
        let assignments: Vec<(ElementId, Rational)> = section
            .values
            .iter()
            .map(|(n, v)| (lattice.element(n).expect("declared name"), v.clone()))
            .collect();
        State::from_partial(lattice.clone(), &assignments)
            .map_err(|source| FormatError::State { name: name.to_string(), source })
    }

    /// Family, supporting states and weights of the `[conditional]` section.
    pub fn conditional_parts(
        &self,
        lattice: &Arc<FiniteOml>,
    ) -> Result<(Vec<ElementId>, Vec<State>, WeightVector), FormatError> {
        let c = self.conditional.as_ref().ok_or(FormatError::MissingSection("conditional"))?;
        let family = c.family.iter().map(|n| lattice.element(n).expect("declared name")).collect();
        let supports = c.supports.iter().map(|n| self.state(lattice, n)).collect::<Result<_, _>>()?;
        let weights = WeightVector::new(c.weights.clone())?;
        Ok((family, supports, weights))
    }

    pub fn conditional_state(&self, lattice: &Arc<FiniteOml>) -> Result<ConditionalState, FormatError> {
        let (family, supports, weights) = self.conditional_parts(lattice)?;
        Ok(construct_fk(lattice, &family, supports, weights)?)
    }

    /// Members of the `[system]` section.
    pub fn system_members(&self, lattice: &FiniteOml) -> Result<BTreeSet<ElementId>, FormatError> {
        let members = self.system.as_ref().ok_or(FormatError::MissingSection("system"))?;
        Ok(members.iter().map(|n| lattice.element(n).expect("declared name")).collect())
    }

    pub fn space(&self) -> Result<FiniteProbabilitySpace, FormatError> {
        let s = self.space.as_ref().ok_or(FormatError::MissingSection("space"))?;
        Ok(FiniteProbabilitySpace::new(s.weights.clone())?)
    }

    /// A document describing `lattice` by its covering pairs.
    pub fn from_lattice(lattice: &FiniteOml) -> OmlDocument {
        let name = |x: ElementId| lattice.label(x).to_string();
        let mut leq = Vec::new();
        for a in lattice.elements() {
            for b in lattice.elements() {
                if lattice.lt(a, b) && !lattice.elements().any(|c| lattice.lt(a, c) && lattice.lt(c, b)) {
                    leq.push((name(a), name(b)));
                }
            }
        }
        let ortho = lattice
            .elements()
            .filter(|&a| a <= lattice.ortho(a))
            .map(|a| (name(a), name(lattice.ortho(a))))
            .collect();
        OmlDocument {
            elements: lattice.elements().map(name).collect(),
            bounds: Some((name(lattice.zero()), name(lattice.one()))),
            leq,
            ortho,
            ..OmlDocument::default()
        }
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for OmlDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.elements.is_empty() {
            writeln!(f, "elements: {}", join(&self.elements))?;
        }
        if let Some((z, o)) = &self.bounds {
            writeln!(f, "bounds: {z} {o}")?;
        }
        for (a, b) in &self.leq {
            writeln!(f, "leq: {a} {b}")?;
        }
        for (a, b) in &self.ortho {
            writeln!(f, "ortho: {a} {b}")?;
        }
        for s in &self.states {
            writeln!(f, "\n[state {}]", s.name)?;
            for (n, v) in &s.values {
                writeln!(f, "{n} = {v}")?;
            }
        }
        if let Some(c) = &self.conditional {
            writeln!(f, "\n[conditional]")?;
            writeln!(f, "family: {}", join(&c.family))?;
            writeln!(f, "weights: {}", join(&c.weights))?;
            writeln!(f, "supports: {}", join(&c.supports))?;
        }
        if let Some(m) = &self.system {
            writeln!(f, "\n[system]")?;
            writeln!(f, "members: {}", join(m))?;
        }
        if let Some(s) = &self.space {
            writeln!(f, "\n[space]")?;
            writeln!(f, "weights: {}", join(&s.weights))?;
            if let Some(fam) = &s.family {
                writeln!(f, "family: {}", join(fam))?;
            }
            if let Some(c) = &s.condition {
                writeln!(f, "condition: {c}")?;
            }
        }
        Ok(())
    }
}

//! Finite orthomodular lattices, states, and conditional states.
//!
//! The crate models finite orthomodular lattices with exact rational states,
//! builds conditional states as convex combinations of states supported on an
//! orthogonal family, and checks the axioms and independence properties of
//! these objects by exhaustive scan.

// Errors carry exact values and witnesses; they are not on a hot path.
#![allow(clippy::result_large_err)]

pub mod classical;
pub mod cli;
pub mod conditioning;
pub mod example;
pub mod format;
pub mod independence;
pub mod lattice;
mod lp;
pub mod rational;
pub mod report;
pub mod states;

pub use conditioning::{
    construct_fk, construct_fk_relaxed, extend_to_condition, generate_cs_from_family, verify_conditional_state,
    verify_cs, ConditionalState, ConditionalSystem, ConditionalTable, ConditioningError, TableState, WeightVector,
};
pub use lattice::{boolean_algebra, horizontal_sum, mo_lattice, ElementId, FiniteOml, LatticeError};
pub use rational::{rat, Rational};
pub use report::{Axiom, AxiomReport, PropositionReport, Violation};
pub use states::{convex_combination, verify_state, State, StateError};

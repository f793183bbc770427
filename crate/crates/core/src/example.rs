//! The worked example on `MO(2)`: two orthogonal pairs `a, a⊥` and `b, b⊥`,
//! states `α` (with `α(a) = 1`) and `α′` (with `α′(a⊥) = 1`), and weights
//! `k = (1/10, 9/10)` on the family `(a, a⊥)`.
//!
//! [`run_example`] recomputes every intermediate value and compares it with
//! the reference value, which does not depend on the parameters. Changing
//! the parameters therefore shows up as mismatches.

use std::fmt;
use std::sync::Arc;

use crate::conditioning::{
    construct_fk, decomposition_bounds, extend_to_condition, ConditionalState, ConditionalTable, ConditioningError,
    WeightVector,
};
use crate::independence::{independence_verdict, IndependenceQuery};
use crate::lattice::{mo_lattice, ElementId, FiniteOml};
use crate::rational::Rational;
use crate::states::state_from_block_measures;

pub const A: ElementId = ElementId(1);
pub const A_ORTHO: ElementId = ElementId(2);
pub const B: ElementId = ElementId(3);
pub const B_ORTHO: ElementId = ElementId(4);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleParams {
    pub weights: (Rational, Rational),
    /// `α(b)`
    pub alpha_b: Rational,
    /// `α′(b)`
    pub alpha_prime_b: Rational,
}

impl Default for ExampleParams {
    fn default() -> Self {
        ExampleParams {
            weights: (Rational::new(1, 10), Rational::new(9, 10)),
            alpha_b: Rational::new(1, 5),
            alpha_prime_b: Rational::new(3, 10),
        }
    }
}

/// `MO(2)` with elements `0, a, a', b, b', 1` (ids 0 to 5).
pub fn example_lattice() -> Arc<FiniteOml> {
    Arc::new(
        mo_lattice(2)
            .and_then(|l| l.with_labels(["0", "a", "a'", "b", "b'", "1"]))
            .expect("MO(2) is valid"),
    )
}

pub fn example_state(params: &ExampleParams) -> Result<ConditionalState, String> {
    let l = example_lattice();
    let one = Rational::one();
    let zero = Rational::zero();
    let alpha = state_from_block_measures(
        &l,
        &[vec![one.clone(), zero.clone()], vec![params.alpha_b.clone(), &one - &params.alpha_b]],
    )
    .map_err(|e| format!("α: {e}"))?;
    let alpha_prime = state_from_block_measures(
        &l,
        &[vec![zero, one.clone()], vec![params.alpha_prime_b.clone(), &one - &params.alpha_prime_b]],
    )
    .map_err(|e| format!("α′: {e}"))?;
    let k = WeightVector::new(vec![params.weights.0.clone(), params.weights.1.clone()]).map_err(|e| e.to_string())?;
    construct_fk(&l, &[A, A_ORTHO], vec![alpha, alpha_prime], k).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleStep {
    pub name: String,
    pub expected: String,
    pub actual: String,
}

impl ExampleStep {
    pub fn matches(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleRun {
    pub steps: Vec<ExampleStep>,
}

impl ExampleRun {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(ExampleStep::matches)
    }

    pub fn first_mismatch(&self) -> Option<&ExampleStep> {
        self.steps.iter().find(|s| !s.matches())
    }
}

impl fmt::Display for ExampleRun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            let mark = if s.matches() { "ok" } else { "MISMATCH" };
            if s.matches() {
                writeln!(f, "{mark:8} {} = {}", s.name, s.actual)?;
            } else {
                writeln!(f, "{mark:8} {} = {} (expected {})", s.name, s.actual, s.expected)?;
            }
        }
        Ok(())
    }
}

fn verdict_word(independent: bool) -> &'static str {
    if independent {
        "INDEPENDENT"
    } else {
        "DEPENDENT"
    }
}

fn show<T: fmt::Display, E: fmt::Display>(r: Result<T, E>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

/// Runs the example end to end.
pub fn run_example(params: &ExampleParams) -> ExampleRun {
    let mut steps = Vec::new();
    let mut step = |name: &str, expected: &str, actual: String| {
        steps.push(ExampleStep { name: name.into(), expected: expected.into(), actual });
    };
    let f = match example_state(params) {
        Ok(f) => f,
        Err(e) => {
            step("construction", "ok", format!("error: {e}"));
            return ExampleRun { steps };
        }
    };
    let one = f.lattice().one();

    step("f(b,1)", "29/100", show(f.evaluate(B, one)));
    step("f(a,1)", "1/10", show(f.evaluate(A, one)));
    step("f(a',1)", "9/10", show(f.evaluate(A_ORTHO, one)));
    step("f(b',1)", "71/100", show(f.evaluate(B_ORTHO, one)));
    step("f(b,a)", "1/5", show(f.evaluate(B, A)));

    let bounds = decomposition_bounds(&f, A, B);
    step(
        "decomposition coefficients (f(b,1), f(b',1))",
        "(29/100, 71/100)",
        show(bounds.as_ref().map(|b| format!("({}, {})", b.coefficients.0, b.coefficients.1))),
    );
    step(
        "admissible f(a,b)",
        "[0, 10/29]",
        show(bounds.as_ref().map(|b| format!("[{}, {}]", b.on_b.0, b.on_b.1))),
    );
    step(
        "admissible f(a,b')",
        "[0, 10/71]",
        show(bounds.as_ref().map(|b| format!("[{}, {}]", b.on_b_ortho.0, b.on_b_ortho.1))),
    );

    let accept = |x: Rational| match extend_to_condition(&f, B, &[(A, x)], &[]) {
        Ok(_) => "accepted".to_string(),
        Err(ConditioningError::NotAStateProposal { .. } | ConditioningError::ExtensionInconsistent { .. }) => {
            "rejected".to_string()
        }
        Err(e) => format!("error: {e}"),
    };
    let bound = Rational::new(10, 29);
    step("extension f(a,b) = 10/29", "accepted", accept(bound.clone()));
    step("extension f(a,b) = 10/29 + 1/1000", "rejected", accept(&bound + &Rational::new(1, 1000)));

    step(
        "b independent of a, reference f(.,1)",
        "DEPENDENT",
        show(independence_verdict(&f, IndependenceQuery { b: B, a: A, c: one }).map(|v| verdict_word(v.independent))),
    );

    let tenth = Rational::new(1, 10);
    let extended = extend_to_condition(&f, B, &[(A, tenth.clone())], &[(A, tenth)]);
    step(
        "a independent of b, reference f(.,1), with f(a,b) = f(a,b') = 1/10",
        "INDEPENDENT",
        match &extended {
            Ok(t) => show(
                independence_verdict(t, IndependenceQuery { b: A, a: B, c: one }).map(|v| verdict_word(v.independent)),
            ),
            Err(e) => format!("error: {e}"),
        },
    );
    if let Ok(t) = &extended {
        step("f(a,b) in the extended table", "1/10", show(t.value(A, B).ok_or("undefined")));
    }
    ExampleRun { steps }
}

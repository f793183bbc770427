//! Command-line driver. Exit codes: 0 when every check passes, 1 when a
//! well-formed input fails a check, 2 when an input cannot be read or
//! parsed.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use crate::classical::{check_prop11, check_prop11_exhaustive, check_prop12, check_prop12_exhaustive};
use crate::conditioning::{
    check_construction, extend_to_condition, verify_conditional_state, verify_cs, ConditionalState,
    ConditionalSystem, ConditionalTable, ConditioningError, TableState,
};
use crate::example::{run_example, ExampleParams};
use crate::format::{parse_oml, FormatError, OmlDocument};
use crate::independence::{check_prop21_all, check_prop22, independence_verdict, IndependenceQuery, Prop22Part};
use crate::lattice::{ElementId, FiniteOml, LatticeError};
use crate::rational::Rational;
use crate::report::{AxiomReport, PropositionReport, Violation};
use crate::states::StateError;

/// Largest family size scanned by the classical suites when the file names
/// no family.
const CLASSICAL_FAMILY_LIMIT: usize = 3;

#[derive(Debug, Parser)]
#[command(name = "omlcond", version, about = "Check orthomodular lattices, states and conditional states")]
pub struct Cli {
    /// Extend the conditional state to new conditions before running, e.g.
    /// "f(a,b)=1/10,f(a,b')=1/10"
    #[arg(long, global = true, value_name = "ASSIGNMENTS")]
    extend: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that the file describes an orthomodular lattice
    Validate { file: PathBuf },
    /// Check every [state] section (or only the named one)
    StateCheck {
        file: PathBuf,
        #[arg(long)]
        state: Option<String>,
    },
    /// Evaluate f(d, c)
    Condition { file: PathBuf, d: String, c: String },
    /// Is b independent of the condition a with respect to f(., c)?
    Independence { file: PathBuf, b: String, a: String, c: String },
    /// Recompute the built-in MO(2) example and compare with reference values
    PaperExample {
        /// Weights on (a, a'), e.g. "1/10,9/10"
        #[arg(long)]
        weights: Option<String>,
        /// Value of the first support state at b
        #[arg(long)]
        alpha_b: Option<Rational>,
        /// Value of the second support state at b
        #[arg(long)]
        alpha_prime_b: Option<Rational>,
    },
    /// Run a verification suite against the file
    Check { file: PathBuf, suite: Suite },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Prop11,
    Prop12,
    Prop13,
    Prop21,
    Prop22,
    Cs,
    State,
}

/// One `f(d,c)=v` item of `--extend`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub d: String,
    pub c: String,
    pub value: Rational,
}

/// Parses `f(d,c)=v` items separated by commas.
pub fn parse_assignments(spec: &str) -> Result<Vec<Assignment>, String> {
    let mut out = Vec::new();
    let mut rest = spec.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix("f(")
            .ok_or_else(|| format!("expected `f(` at `{rest}`"))?;
        let close = body.find(')').ok_or("missing `)`")?;
        let (d, c) = body[..close].split_once(',').ok_or("expected `f(d,c)`")?;
        let after = body[close + 1..].trim_start();
        let after = after.strip_prefix('=').ok_or("expected `=` after `)`")?.trim_start();
        let end = after.find(',').unwrap_or(after.len());
        let value: Rational = after[..end].trim().parse().map_err(|e| format!("{e}"))?;
        out.push(Assignment { d: d.trim().to_string(), c: c.trim().to_string(), value });
        rest = after[end..].strip_prefix(',').unwrap_or(&after[end..]).trim_start();
    }
    Ok(out)
}

struct Io<'a, O: Write, E: Write> {
    out: &'a mut O,
    err: &'a mut E,
}

/// Outcome of a command before it is turned into an exit code.
enum Failure {
    /// A well-formed input failed a check.
    Check(String),
    /// The input could not be read or parsed.
    Input(String),
}

type Outcome = Result<bool, Failure>;

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        if e.is_syntax() {
            Failure::Input(e.to_string())
        } else {
            Failure::Check(e.to_string())
        }
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<O: Write, E: Write>(args: impl IntoIterator<Item = OsString>, out: &mut O, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
            } else {
                let _ = write!(out, "{}", e.render());
            }
            return code;
        }
    };
    let mut io = Io { out, err };
    let outcome = execute(&cli, &mut io);
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Check(msg)) => {
            let _ = writeln!(io.err, "error: {msg}");
            1
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(io.err, "error: {msg}");
            2
        }
    }
}

fn execute<O: Write, E: Write>(cli: &Cli, io: &mut Io<'_, O, E>) -> Outcome {
    let extensions = match &cli.extend {
        Some(s) => parse_assignments(s).map_err(|e| Failure::Input(format!("--extend: {e}")))?,
        None => Vec::new(),
    };
    match &cli.command {
        Command::Validate { file } => validate(file, io),
        Command::StateCheck { file, state } => {
            let doc = load(file)?;
            let lattice = doc.lattice()?;
            state_check(&doc, &lattice, state.as_deref(), io)
        }
        Command::Condition { file, d, c } => {
            let doc = load(file)?;
            let lattice = doc.lattice()?;
            let table = conditional_table(&doc, &lattice, &extensions)?;
            let (d, c) = (element(&lattice, d)?, element(&lattice, c)?);
            match table.value(d, c) {
                Some(v) => {
                    let _ = writeln!(io.out, "f({},{}) = {v} {}", lattice.label(d), lattice.label(c), decimal(&v));
                    Ok(true)
                }
                None => Err(Failure::Check(format!(
                    "{} is not a condition; conditions are: {}",
                    lattice.label(c),
                    names(&lattice, &table.conditions())
                ))),
            }
        }
        Command::Independence { file, b, a, c } => {
            let doc = load(file)?;
            let lattice = doc.lattice()?;
            let table = conditional_table(&doc, &lattice, &extensions)?;
            let q = IndependenceQuery { b: element(&lattice, b)?, a: element(&lattice, a)?, c: element(&lattice, c)? };
            let v = independence_verdict(&table, q).map_err(|e| Failure::Check(e.to_string()))?;
            let (lb, la, lc) = (lattice.label(q.b), lattice.label(q.a), lattice.label(q.c));
            let _ = writeln!(io.out, "f({lb},{la}) = {}", v.conditioned);
            let _ = writeln!(io.out, "f({lb},{lc}) = {}", v.reference);
            let _ = writeln!(io.out, "{}", if v.independent { "INDEPENDENT" } else { "DEPENDENT" });
            Ok(true)
        }
        Command::PaperExample { weights, alpha_b, alpha_prime_b } => {
            let mut params = ExampleParams::default();
            if let Some(w) = weights {
                let parts: Vec<&str> = w.split(',').collect();
                let [k1, k2] = parts.as_slice() else {
                    return Err(Failure::Input("--weights takes two comma-separated values".into()));
                };
                let parse = |s: &str| s.trim().parse::<Rational>().map_err(|e| Failure::Input(format!("--weights: {e}")));
                params.weights = (parse(k1)?, parse(k2)?);
            }
            if let Some(x) = alpha_b {
                params.alpha_b = x.clone();
            }
            if let Some(x) = alpha_prime_b {
                params.alpha_prime_b = x.clone();
            }
            let run = run_example(&params);
            let _ = write!(io.out, "{run}");
            if let Some(m) = run.first_mismatch() {
                let _ = writeln!(io.err, "mismatch: {} = {}, expected {}", m.name, m.actual, m.expected);
            }
            Ok(run.passed())
        }
        Command::Check { file, suite } => check(file, *suite, &extensions, io),
    }
}

fn load(path: &PathBuf) -> Result<OmlDocument, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_oml(&text)?)
}

fn element(lattice: &FiniteOml, name: &str) -> Result<ElementId, Failure> {
    lattice.element(name).ok_or_else(|| Failure::Input(format!("unknown element `{name}`")))
}

fn names(lattice: &FiniteOml, ids: &[ElementId]) -> String {
    ids.iter().map(|&x| lattice.label(x)).collect::<Vec<_>>().join(" ")
}

fn decimal(v: &Rational) -> String {
    match v.to_decimal(10) {
        (s, true) => format!("({s})"),
        (s, false) => format!("(≈ {s})"),
    }
}

/// Renders a violation with the document's element names.
fn describe_with(doc: &OmlDocument, v: &Violation) -> String {
    let witness: Vec<&str> = v.witness.iter().map(|w| doc.elements.get(w.0).map_or("?", String::as_str)).collect();
    let mut s = format!("[{}] at ({})", v.axiom, witness.join(", "));
    if !v.detail.is_empty() {
        s.push_str(": ");
        s.push_str(&v.detail);
    }
    s
}

fn lattice_failure(e: &LatticeError) -> (&'static str, Vec<&Violation>) {
    match e {
        LatticeError::NotPartialOrder(v) => ("NotPartialOrder", vec![v]),
        LatticeError::NotLattice(v) => ("NotLattice", vec![v]),
        LatticeError::NotOrthocomplemented(r) => ("NotOrthocomplemented", r.violations.iter().collect()),
        LatticeError::NotOrthomodular(r) => ("NotOrthomodular", r.violations.iter().collect()),
        _ => ("InvalidLattice", vec![]),
    }
}

fn validate<O: Write, E: Write>(file: &PathBuf, io: &mut Io<'_, O, E>) -> Outcome {
    let doc = load(file)?;
    match doc.lattice() {
        Ok(lattice) => {
            let report = lattice.verify();
            print_axioms(io, &lattice, "lattice", &report);
            if report.passed() {
                let _ = writeln!(io.out, "{} elements, {} atoms", lattice.len(), lattice.atoms().len());
            }
            Ok(report.passed())
        }
        Err(FormatError::Lattice(e)) => {
            let (kind, violations) = lattice_failure(&e);
            let _ = writeln!(io.out, "lattice: FAILED ({kind})");
            if violations.is_empty() {
                let _ = writeln!(io.err, "{e}");
            }
            for v in violations {
                let _ = writeln!(io.err, "violation {}", describe_with(&doc, v));
            }
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

fn print_axioms<O: Write, E: Write>(io: &mut Io<'_, O, E>, lattice: &FiniteOml, what: &str, report: &AxiomReport) {
    if report.passed() {
        let _ = writeln!(io.out, "{what}: passed");
    } else {
        let _ = writeln!(io.out, "{what}: FAILED ({} violation(s))", report.violations.len());
        for v in &report.violations {
            let _ = writeln!(io.err, "violation {}", bracket(lattice.describe(v)));
        }
    }
}

/// `tag at (...)` becomes `[tag] at (...)`.
fn bracket(s: String) -> String {
    match s.split_once(" at (") {
        Some((tag, rest)) => format!("[{tag}] at ({rest}"),
        None => s,
    }
}

fn state_check<O: Write, E: Write>(
    doc: &OmlDocument,
    lattice: &Arc<FiniteOml>,
    only: Option<&str>,
    io: &mut Io<'_, O, E>,
) -> Outcome {
    let sections: Vec<&str> = doc
        .states
        .iter()
        .map(|s| s.name.as_str())
        .filter(|n| only.is_none_or(|o| o == *n))
        .collect();
    if sections.is_empty() {
        return Err(Failure::Check(match only {
            Some(n) => format!("no state named `{n}`"),
            None => "missing section: state".into(),
        }));
    }
    let mut all = true;
    for name in sections {
        match doc.state(lattice, name) {
            Ok(_) => {
                let _ = writeln!(io.out, "state {name}: passed");
            }
            Err(FormatError::State { source: StateError::NotAState(report), .. }) => {
                all = false;
                print_axioms(io, lattice, &format!("state {name}"), &report);
            }
            Err(FormatError::State { source, .. }) => {
                all = false;
                let _ = writeln!(io.out, "state {name}: FAILED");
                let detail = match &source {
                    StateError::Underdetermined { element } => {
                        format!("value at {} is not determined by the given values", lattice.label(*element))
                    }
                    StateError::Inconsistent { element, first, second } => {
                        format!("values {first} and {second} both forced at {}", lattice.label(*element))
                    }
                    other => other.to_string(),
                };
                let _ = writeln!(io.err, "violation {detail}");
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(all)
}

/// The file's conditional state, extended by `--extend` assignments.
fn conditional_table(
    doc: &OmlDocument,
    lattice: &Arc<FiniteOml>,
    extensions: &[Assignment],
) -> Result<TableState, Failure> {
    let f = doc.conditional_state(lattice)?;
    extend(&f, lattice, extensions)
}

fn extend(f: &ConditionalState, lattice: &Arc<FiniteOml>, extensions: &[Assignment]) -> Result<TableState, Failure> {
    let mut table = f.to_table();
    let mut resolved = Vec::with_capacity(extensions.len());
    for a in extensions {
        resolved.push((element(lattice, &a.d)?, element(lattice, &a.c)?, a.value.clone()));
    }
    let mut done: Vec<ElementId> = Vec::new();
    for &(_, c, _) in &resolved {
        if done.contains(&c) {
            continue;
        }
        let co = lattice.ortho(c);
        done.extend([c, co]);
        let on = |cond: ElementId| -> Vec<(ElementId, Rational)> {
            resolved.iter().filter(|(_, x, _)| *x == cond).map(|(d, _, v)| (*d, v.clone())).collect()
        };
        table = extend_to_condition(&table, c, &on(c), &on(co))
            .map_err(|e| Failure::Check(conditioning_message(lattice, &e)))?;
    }
    Ok(table)
}

/// Error text with element labels in place of ids.
fn conditioning_message(lattice: &FiniteOml, e: &ConditioningError) -> String {
    let l = |x: &ElementId| lattice.label(*x).to_string();
    match e {
        ConditioningError::ExtensionInconsistent { element, expected, actual } => format!(
            "extension rejected at {}: f({0}, 1) = {expected}, the proposed values give {actual}",
            l(element)
        ),
        ConditioningError::NotAStateProposal { condition, reason } => {
            format!("extension rejected: proposed f(·, {}) is not a state: {reason}", l(condition))
        }
        ConditioningError::ConditionNotInDomain(c) => format!("{} is not a condition", l(c)),
        ConditioningError::ConditionAlreadyInDomain(c) => format!("{} is already a condition", l(c)),
        ConditioningError::DegenerateExtension { condition, value } => {
            format!("cannot extend to {}: its value under the top condition is {value}", l(condition))
        }
        other => other.to_string(),
    }
}

fn print_proposition<O: Write, E: Write>(
    io: &mut Io<'_, O, E>,
    report: &PropositionReport,
    render: impl Fn(&[ElementId]) -> String,
) {
    let verdict = if report.passed() { "passed" } else { "FAILED" };
    let _ = writeln!(io.out, "{}: {verdict} ({} instance(s), {} failure(s))", report.tag, report.instances, report.failures.len());
    for n in &report.notes {
        let _ = writeln!(io.out, "  note: {n}");
    }
    if !report.observations.is_empty() {
        let holding = report.observations.iter().filter(|o| o.holds).count();
        let _ = writeln!(
            io.out,
            "  recorded outside hypotheses: {} instance(s), {holding} holding",
            report.observations.len()
        );
    }
    for f in &report.failures {
        let values: Vec<String> = f.values.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        let _ = writeln!(io.err, "failure ({}): {}; {}", render(&f.witness), f.message, values.join(", "));
    }
}

fn check<O: Write, E: Write>(
    file: &PathBuf,
    suite: Suite,
    extensions: &[Assignment],
    io: &mut Io<'_, O, E>,
) -> Outcome {
    let doc = load(file)?;
    if matches!(suite, Suite::Prop11 | Suite::Prop12) {
        let space = doc.space()?;
        let section = doc.space.as_ref().expect("space parsed");
        let events = |w: &[ElementId]| w.iter().map(|e| crate::classical::EventSet(e.0 as u32).to_string()).collect::<Vec<_>>().join(", ");
        let report = match (&section.family, section.condition) {
            (Some(family), Some(b)) => {
                let r = if suite == Suite::Prop11 {
                    check_prop11(&space, family, b)
                } else {
                    check_prop12(&space, family, b)
                };
                r.map_err(|e| Failure::Check(e.to_string()))?
            }
            (None, None) if suite == Suite::Prop11 => check_prop11_exhaustive(&space, CLASSICAL_FAMILY_LIMIT),
            (None, None) => check_prop12_exhaustive(&space, CLASSICAL_FAMILY_LIMIT),
            _ => return Err(Failure::Check("[space] needs both `family` and `condition`, or neither".into())),
        };
        print_proposition(io, &report, events);
        return Ok(report.passed());
    }

    let lattice = doc.lattice()?;
    let render = |w: &[ElementId]| names(&lattice, w).replace(' ', ", ");
    match suite {
        Suite::State => state_check(&doc, &lattice, None, io),
        Suite::Cs => {
            let members = doc.system_members(&lattice)?;
            let report = verify_cs(&lattice, &members);
            print_axioms(io, &lattice, "conditional system", &report);
            Ok(report.passed())
        }
        Suite::Prop13 => {
            let f = doc.conditional_state(&lattice)?;
            let report = check_construction(&f);
            print_proposition(io, &report, render);
            let _ = writeln!(io.out, "conditions: {}", names(&lattice, &f.conditions()));
            Ok(report.passed())
        }
        Suite::Prop21 => {
            let (family, supports, k) = doc.conditional_parts(&lattice)?;
            let report = check_prop21_all(&lattice, &family, supports, k).map_err(|e| Failure::Check(e.to_string()))?;
            print_proposition(io, &report, render);
            Ok(report.passed())
        }
        Suite::Prop22 => {
            let f = doc.conditional_state(&lattice)?;
            let table = extend(&f, &lattice, extensions)?;
            let system = ConditionalSystem::new(lattice.clone(), table.conditions())
                .map_err(|e| Failure::Check(e.to_string()))?;
            let axioms = verify_conditional_state(&system, &table);
            if !axioms.passed() {
                print_axioms(io, &lattice, "conditional state", &axioms);
                return Ok(false);
            }
            let report =
                check_prop22(&system, &table, &Prop22Part::ALL).map_err(|e| Failure::Check(e.to_string()))?;
            print_proposition(io, &report, render);
            Ok(report.passed())
        }
        Suite::Prop11 | Suite::Prop12 => unreachable!(),
    }
}

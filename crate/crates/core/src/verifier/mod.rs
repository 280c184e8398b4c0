//! Requirement verification by inlining, unrolling and exhaustive checking.
//!
//! A requirement routine is first compiled into a flat program: every call
//! is inlined down to attribute updates and `assume`/`assert` statements,
//! and every loop is unrolled up to [`VerifyConfig::unroll_bound`] passes.
//! The program is then run from every initial plant state. A path whose
//! assumption fails is discarded; a failing assertion, or a loop whose full
//! state repeats without reaching its exit condition, refutes the
//! requirement with a concrete trace.

mod compile;
mod machine;
mod report;

pub use report::{CounterexampleReport, TraceStepReport, VerdictReport};

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ir::{
    well_formed, AttrKind, Diagnostic, EvalError, Model, PlantState, Routine, RoutineRole, Span,
    Statement, Value, DEFAULT_DURATION_CAP, DURATION,
};
use crate::patterns::{recognize, Pattern};

use compile::Program;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Maximum number of passes through a loop, counting the `from` part as the first.
    pub unroll_bound: u32,
    pub duration_cap: i64,
    pub detect_cycles: bool,
    /// Largest number of initial states `enumerate_initial_states` will produce.
    pub enumeration_cap: u128,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            unroll_bound: 64,
            duration_cap: DEFAULT_DURATION_CAP,
            detect_cycles: true,
            enumeration_cap: 1_000_000,
        }
    }
}

impl VerifyConfig {
    pub fn with_unroll(unroll_bound: u32) -> Self {
        VerifyConfig {
            unroll_bound,
            ..Self::default()
        }
    }
}

/// Where an event happened: routine, source position and statement text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Site {
    pub routine: Arc<str>,
    pub span: Span,
    pub statement: Arc<str>,
}

impl Site {
    pub(crate) fn new(routine: &Arc<str>, stmt: &Statement) -> Self {
        Site {
            routine: routine.clone(),
            span: stmt.span,
            statement: stmt.summary().into(),
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in `{}`: {}", self.span, self.routine, self.statement)
    }
}

/// One executed atomic statement. Steps chain: each `before` equals the
/// previous step's `after`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub before: PlantState,
    pub site: Site,
    pub after: PlantState,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Completed {
        final_state: PlantState,
        trace: Vec<TraceStep>,
    },
    /// An assumption did not hold; the path imposes no obligation.
    AssumeViolated { at: Site },
    AssertFailed { at: Site, trace: Vec<TraceStep> },
    /// A loop revisited a full state (duration included) without exiting.
    Diverged {
        trace: Vec<TraceStep>,
        repeated_state: PlantState,
    },
    /// A loop still had not exited after the unroll bound.
    BoundExceeded { trace: Vec<TraceStep> },
}

impl Outcome {
    pub fn kind(&self) -> &'static str {
        match self {
            Outcome::Completed { .. } => "completed",
            Outcome::AssumeViolated { .. } => "assume_violated",
            Outcome::AssertFailed { .. } => "assert_failed",
            Outcome::Diverged { .. } => "diverged",
            Outcome::BoundExceeded { .. } => "bound_exceeded",
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Outcome::AssertFailed { .. } | Outcome::Diverged { .. })
    }

    pub fn trace(&self) -> &[TraceStep] {
        match self {
            Outcome::Completed { trace, .. }
            | Outcome::AssertFailed { trace, .. }
            | Outcome::Diverged { trace, .. }
            | Outcome::BoundExceeded { trace } => trace,
            Outcome::AssumeViolated { .. } => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VerdictResult {
    Pass,
    Fail,
    Unknown,
}

impl VerdictResult {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictResult::Pass => "pass",
            VerdictResult::Fail => "fail",
            VerdictResult::Unknown => "unknown",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "pass" => Some(VerdictResult::Pass),
            "fail" => Some(VerdictResult::Fail),
            "unknown" => Some(VerdictResult::Unknown),
            _ => None,
        }
    }

    /// Aggregates per-state outcomes: any failure fails, otherwise any
    /// exhausted bound is unknown, otherwise pass.
    pub fn of<'a>(outcomes: impl IntoIterator<Item = &'a Outcome>) -> Self {
        let mut result = VerdictResult::Pass;
        for o in outcomes {
            match o {
                o if o.is_failure() => return VerdictResult::Fail,
                Outcome::BoundExceeded { .. } => result = VerdictResult::Unknown,
                _ => {}
            }
        }
        result
    }
}

impl fmt::Display for VerdictResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stats {
    /// Distinct plant states seen across all runs, initial states included.
    pub states_explored: usize,
    /// Largest `duration` increase among completed runs.
    pub max_duration_delta: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub requirement: String,
    pub result: VerdictResult,
    /// One outcome per initial state, in enumeration order.
    pub per_state: Vec<(PlantState, Outcome)>,
    pub stats: Stats,
}

impl Verdict {
    pub fn counterexamples(&self) -> impl Iterator<Item = &(PlantState, Outcome)> {
        let wanted = self.result;
        self.per_state.iter().filter(move |(_, o)| match wanted {
            VerdictResult::Fail => o.is_failure(),
            VerdictResult::Unknown => matches!(o, Outcome::BoundExceeded { .. }),
            VerdictResult::Pass => false,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("model is ill-formed:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    IllFormed(Vec<Diagnostic>),
    #[error("no routine named `{0}`")]
    UnknownRoutine(String),
    #[error("`{0}` is not a requirement routine")]
    NotARequirement(String),
    #[error("initial state space has {size} states, above the cap of {cap}")]
    EnumerationInfeasible { size: u128, cap: u128 },
    #[error("{site}: duration reached {value}, above the cap of {cap}")]
    DurationCap { site: Site, value: i64, cap: i64 },
    #[error("{site}: value {value} is outside the domain of `{name}`")]
    Domain {
        site: Site,
        name: String,
        value: Value,
    },
    #[error("{site}: {source}")]
    Eval { site: Site, source: EvalError },
    #[error("from initial state [{state}]: {source}")]
    InState {
        state: PlantState,
        source: Box<VerifyError>,
    },
    #[error("`{0}` is not a bounded-response (P4) requirement")]
    NotBoundedResponse(String),
    #[error("`{requirement}` does not pass (result: {result}); no worst-case duration")]
    NotPassing {
        requirement: String,
        result: VerdictResult,
    },
}

/// All initial plant states: the product of the non-ghost attribute
/// domains in declaration order, with `duration` at 0.
pub fn enumerate_initial_states(
    model: &Model,
    config: &VerifyConfig,
) -> Result<Vec<PlantState>, VerifyError> {
    let size = model
        .attributes
        .iter()
        .filter(|a| a.kind != AttrKind::Ghost)
        .fold(1u128, |acc, a| acc.saturating_mul(a.domain.size()));
    if size > config.enumeration_cap {
        return Err(VerifyError::EnumerationInfeasible {
            size,
            cap: config.enumeration_cap,
        });
    }
    let names: Arc<[String]> = model.attributes.iter().map(|a| a.name.clone()).collect();
    let mut rows: Vec<Vec<Value>> = vec![Vec::new()];
    for a in &model.attributes {
        let choices: Vec<Value> = match a.kind {
            AttrKind::Ghost => vec![Value::Int(0)],
            _ => a.domain.values().collect(),
        };
        rows = rows
            .into_iter()
            .flat_map(|row| {
                choices.iter().map(move |v| {
                    let mut next = row.clone();
                    next.push(v.clone());
                    next
                })
            })
            .collect();
    }
    Ok(rows
        .into_iter()
        .map(|values| PlantState::new(names.clone(), values))
        .collect())
}

/// Runs `routine` from `initial`: calls inlined, loops unrolled.
pub fn execute_routine(
    model: &Model,
    routine: &Routine,
    initial: &PlantState,
    config: &VerifyConfig,
) -> Result<Outcome, VerifyError> {
    let program = Program::compile(model, routine, config)?;
    program.run(initial, config, &mut HashSet::new())
}

/// Runs a single statement (typically a translated ASM rule) from `initial`.
pub fn exec_statement(
    model: &Model,
    stmt: &Statement,
    initial: &PlantState,
    config: &VerifyConfig,
) -> Result<Outcome, VerifyError> {
    let routine = Routine::new("<statement>", RoutineRole::ModelStep, vec![stmt.clone()]);
    execute_routine(model, &routine, initial, config)
}

/// Checks `requirement` from every initial state.
pub fn check_requirement(
    model: &Model,
    requirement: &Routine,
    config: &VerifyConfig,
) -> Result<Verdict, VerifyError> {
    if requirement.role != RoutineRole::Requirement {
        return Err(VerifyError::NotARequirement(requirement.name.clone()));
    }
    let program = Program::compile(model, requirement, config)?;
    let mut seen = HashSet::new();
    let mut per_state = Vec::new();
    for initial in enumerate_initial_states(model, config)? {
        let outcome =
            program
                .run(&initial, config, &mut seen)
                .map_err(|e| VerifyError::InState {
                    state: initial.clone(),
                    source: Box::new(e),
                })?;
        per_state.push((initial, outcome));
    }
    let max_duration_delta = per_state
        .iter()
        .filter_map(|(init, o)| match o {
            Outcome::Completed { final_state, .. } => {
                Some(final_state.duration()? - init.duration()?)
            }
            _ => None,
        })
        .max();
    Ok(Verdict {
        requirement: requirement.name.clone(),
        result: VerdictResult::of(per_state.iter().map(|(_, o)| o)),
        per_state,
        stats: Stats {
            states_explored: seen.len(),
            max_duration_delta,
        },
    })
}

/// Checks a requirement by name.
pub fn check_named(
    model: &Model,
    requirement: &str,
    config: &VerifyConfig,
) -> Result<Verdict, VerifyError> {
    let r = model
        .routine(requirement)
        .ok_or_else(|| VerifyError::UnknownRoutine(requirement.to_string()))?;
    check_requirement(model, r, config)
}

/// Largest elapsed time, over all initial states, that a passing
/// bounded-response requirement needs to reach its property.
pub fn worst_case_duration(
    model: &Model,
    requirement: &Routine,
    config: &VerifyConfig,
) -> Result<i64, VerifyError> {
    match recognize(requirement) {
        Some(i) if i.pattern() == Pattern::P4 => {}
        _ => return Err(VerifyError::NotBoundedResponse(requirement.name.clone())),
    }
    let verdict = check_requirement(model, requirement, config)?;
    if verdict.result != VerdictResult::Pass {
        return Err(VerifyError::NotPassing {
            requirement: requirement.name.clone(),
            result: verdict.result,
        });
    }
    Ok(verdict.stats.max_duration_delta.unwrap_or(0))
}

pub(crate) fn ensure_well_formed(model: &Model, routine: &Routine) -> Result<(), VerifyError> {
    let diags = if model.routine(&routine.name).is_some() {
        well_formed(model)
    } else {
        let mut scratch = model.clone();
        scratch.routines.push(routine.clone());
        well_formed(&scratch)
    };
    if diags.is_empty() {
        Ok(())
    } else {
        Err(VerifyError::IllFormed(diags))
    }
}

pub(crate) fn is_duration(name: &str) -> bool {
    name == DURATION
}

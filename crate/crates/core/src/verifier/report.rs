//! Serializable verdict summaries.

use serde::Serialize;

use crate::ir::PlantState;

use super::{Outcome, TraceStep, Verdict};

#[derive(Debug, Clone, Serialize)]
pub struct TraceStepReport {
    pub routine: String,
    /// `line:column: statement`.
    pub statement: String,
    pub before: PlantState,
    pub after: PlantState,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub initial_state: PlantState,
    pub kind: &'static str,
    pub trace: Vec<TraceStepReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub requirement: String,
    pub result: &'static str,
    pub states_explored: usize,
    pub max_duration_delta: Option<i64>,
    pub counterexamples: Vec<CounterexampleReport>,
}

impl From<&TraceStep> for TraceStepReport {
    fn from(step: &TraceStep) -> Self {
        TraceStepReport {
            routine: step.site.routine.to_string(),
            statement: format!("{}: {}", step.site.span, step.site.statement),
            before: step.before.clone(),
            after: step.after.clone(),
        }
    }
}

impl VerdictReport {
    /// Summarizes `verdict`, keeping at most `max_counterexamples`
    /// counterexamples, with traces only if `with_trace`.
    pub fn new(verdict: &Verdict, max_counterexamples: usize, with_trace: bool) -> Self {
        let counterexamples = verdict
            .counterexamples()
            .take(max_counterexamples)
            .map(|(init, outcome)| CounterexampleReport {
                initial_state: init.clone(),
                kind: outcome.kind(),
                trace: match with_trace {
                    true => outcome.trace().iter().map(TraceStepReport::from).collect(),
                    false => Vec::new(),
                },
            })
            .collect();
        VerdictReport {
            requirement: verdict.requirement.clone(),
            result: verdict.result.as_str(),
            states_explored: verdict.stats.states_explored,
            max_duration_delta: verdict.stats.max_duration_delta,
            counterexamples,
        }
    }
}

impl Outcome {
    /// Final state of a completed run.
    pub fn final_state(&self) -> Option<&PlantState> {
        match self {
            Outcome::Completed { final_state, .. } => Some(final_state),
            _ => None,
        }
    }
}

//! Basic abstract state machine rules and their sequential translation.
//!
//! An ASM step computes the whole update set against the pre-step state
//! and then applies it at once. The translation reproduces this with plain
//! assignments: each location updated inside a `par` first receives its new
//! value in an intermediate local, and the locals are committed afterwards.

mod semantics;
mod translate;

pub use semantics::{apply_asm, check_one_step, Mismatch};
pub use translate::{translate_machine, translate_rule, Translator};

use thiserror::Error;

use crate::ir::{Expression, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum AsmRule {
    /// `f(t1, .., tj) := t0`. Only nullary locations (`args` empty) are supported.
    Update {
        location: String,
        args: Vec<Expression>,
        value: Expression,
    },
    /// Do-in-parallel. The empty `par` is `skip`.
    Par(Vec<AsmRule>),
    Cond {
        guard: Expression,
        then_rule: Box<AsmRule>,
        else_rule: Option<Box<AsmRule>>,
    },
    /// Reference to another named rule.
    Call(String),
}

impl AsmRule {
    pub fn update(location: impl Into<String>, value: Expression) -> Self {
        AsmRule::Update {
            location: location.into(),
            args: Vec::new(),
            value,
        }
    }

    pub fn skip() -> Self {
        AsmRule::Par(Vec::new())
    }

    pub fn cond(guard: Expression, then_rule: AsmRule, else_rule: Option<AsmRule>) -> Self {
        AsmRule::Cond {
            guard,
            then_rule: Box::new(then_rule),
            else_rule: else_rule.map(Box::new),
        }
    }
}

/// A named rule as declared in a `.req` file.
#[derive(Debug, Clone)]
pub struct RuleDecl {
    pub name: String,
    pub rule: AsmRule,
    pub annotation: Vec<String>,
    pub span: Span,
}

impl PartialEq for RuleDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.rule == other.rule && self.annotation == other.annotation
    }
}

impl RuleDecl {
    pub fn new(name: impl Into<String>, rule: AsmRule) -> Self {
        RuleDecl {
            name: name.into(),
            rule,
            annotation: Vec::new(),
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsmError {
    #[error("location `{0}` has arguments; only nullary locations are supported")]
    UnsupportedLocation(String),
    #[error("`{0}` is not a declared attribute")]
    UnknownLocation(String),
    #[error("conflicting parallel updates to `{0}`")]
    Conflict(String),
    #[error("reference to undefined rule `{0}`")]
    DanglingRule(String),
    #[error("rule `{0}` refers to itself")]
    CyclicRule(String),
    #[error("main rule `{0}` is not defined")]
    MissingMain(String),
    #[error("value {value} is outside the domain of `{location}`")]
    Domain { location: String, value: String },
    #[error("evaluation failed: {0}")]
    Eval(String),
    #[error("translated rule could not be executed: {0}")]
    Check(String),
}

//! Core intermediate representation of the requirement language.
//!
//! A [`Model`] declares plant attributes over finite domains and a set of
//! routines. Routines are straight imperative code with `assume`/`assert`
//! contracts; the designated step routine plays the role of the plant's
//! `main`, repeated forever by the environment.

mod check;
mod edit;
mod eval;
mod expr;
mod state;

pub use check::{well_formed, DiagKind, Diagnostic};
pub use edit::{drop_case_arm, EditError};
pub use eval::{eval_expr, EvalError, Frame};
pub(crate) use eval::apply_binary;
pub use expr::{BinOp, Expression, Value};
pub use state::{snapshot, PlantState};

use std::fmt;

/// Name of the ghost time variable.
pub const DURATION: &str = "duration";

/// Default upper bound of the `duration` domain when a model does not declare one.
pub const DEFAULT_DURATION_CAP: i64 = 10_000;

/// Position of a node in its source text. All-zero for generated nodes.
///
/// Spans never take part in structural equality of the nodes carrying them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl Span {
    pub fn new(line: u32, column: u32, length: u32) -> Self {
        Span {
            line,
            column,
            length,
        }
    }

    pub fn is_generated(&self) -> bool {
        self.line == 0
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_generated() {
            f.write_str("<generated>")
        } else {
            write!(f, "{}:{}", self.line, self.column)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Domain {
    Symbolic(Vec<String>),
    Integer { lo: i64, hi: i64 },
}

impl Domain {
    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (Domain::Symbolic(values), Value::Sym(s)) => values.iter().any(|x| x == s),
            (Domain::Integer { lo, hi }, Value::Int(i)) => lo <= i && i <= hi,
            _ => false,
        }
    }

    /// Number of values, saturating.
    pub fn size(&self) -> u128 {
        match self {
            Domain::Symbolic(values) => values.len() as u128,
            Domain::Integer { lo, hi } if lo <= hi => (*hi as i128 - *lo as i128 + 1) as u128,
            Domain::Integer { .. } => 0,
        }
    }

    pub fn values(&self) -> Box<dyn Iterator<Item = Value> + '_> {
        match self {
            Domain::Symbolic(values) => Box::new(values.iter().cloned().map(Value::Sym)),
            Domain::Integer { lo, hi } => Box::new((*lo..=*hi).map(Value::Int)),
        }
    }

    /// Initial value of a freshly declared local: the first symbolic value,
    /// or 0 clamped into the integer range.
    pub fn default_value(&self) -> Value {
        match self {
            Domain::Symbolic(values) => {
                Value::Sym(values.first().cloned().unwrap_or_default())
            }
            Domain::Integer { lo, hi } => Value::Int(0.clamp(*lo, (*hi).max(*lo))),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Symbolic(values) => write!(f, "{{ {} }}", values.join(", ")),
            Domain::Integer { lo, hi } => write!(f, "{lo} .. {hi}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttrKind {
    /// Controlled by the environment; only `assume` may constrain it.
    Environment,
    Machine,
    Ghost,
}

#[derive(Debug, Clone)]
pub struct AttributeDecl {
    pub name: String,
    pub domain: Domain,
    pub kind: AttrKind,
    pub span: Span,
}

impl AttributeDecl {
    pub fn new(name: impl Into<String>, domain: Domain, kind: AttrKind) -> Self {
        AttributeDecl {
            name: name.into(),
            domain,
            kind,
            span: Span::default(),
        }
    }

    pub fn duration(cap: i64) -> Self {
        Self::new(DURATION, Domain::Integer { lo: 0, hi: cap }, AttrKind::Ghost)
    }
}

impl PartialEq for AttributeDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.domain == other.domain && self.kind == other.kind
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseArm {
    pub value: String,
    pub body: Vec<Statement>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Assign {
        target: String,
        value: Expression,
    },
    Assume(Expression),
    Assert(Expression),
    If {
        branches: Vec<(Expression, Vec<Statement>)>,
        else_body: Vec<Statement>,
    },
    /// Dispatch on a symbolic attribute. No matching arm and no default is a no-op.
    Case {
        scrutinee: String,
        arms: Vec<CaseArm>,
        default: Option<Vec<Statement>>,
    },
    /// `from init until exit loop body end`.
    Loop {
        init: Vec<Statement>,
        exit: Expression,
        body: Vec<Statement>,
    },
    Call(String),
    Seq(Vec<Statement>),
    LocalDecl {
        name: String,
        domain: Domain,
    },
    LocalAssign {
        name: String,
        value: Expression,
    },
}

/// A statement with its source position and leading `--` comment lines.
#[derive(Debug, Clone)]
pub struct Statement {
    pub kind: StmtKind,
    pub annotation: Vec<String>,
    pub span: Span,
}

impl PartialEq for Statement {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.annotation == other.annotation
    }
}

impl From<StmtKind> for Statement {
    fn from(kind: StmtKind) -> Self {
        Statement {
            kind,
            annotation: Vec::new(),
            span: Span::default(),
        }
    }
}

impl Statement {
    pub fn assign(target: impl Into<String>, value: Expression) -> Self {
        StmtKind::Assign {
            target: target.into(),
            value,
        }
        .into()
    }

    pub fn assume(cond: Expression) -> Self {
        StmtKind::Assume(cond).into()
    }

    pub fn assert(cond: Expression) -> Self {
        StmtKind::Assert(cond).into()
    }

    pub fn call(routine: impl Into<String>) -> Self {
        StmtKind::Call(routine.into()).into()
    }

    pub fn if_then(guard: Expression, body: Vec<Statement>) -> Self {
        StmtKind::If {
            branches: vec![(guard, body)],
            else_body: Vec::new(),
        }
        .into()
    }

    pub fn with_annotation(mut self, lines: Vec<String>) -> Self {
        self.annotation = lines;
        self
    }

    /// Visits this statement and every nested statement, pre-order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Statement)) {
        f(self);
        for child in self.children() {
            for s in child {
                s.walk(f);
            }
        }
    }

    /// Nested statement lists, in source order.
    pub fn children(&self) -> Vec<&[Statement]> {
        match &self.kind {
            StmtKind::If {
                branches,
                else_body,
            } => {
                let mut out: Vec<&[Statement]> =
                    branches.iter().map(|(_, b)| b.as_slice()).collect();
                out.push(else_body);
                out
            }
            StmtKind::Case { arms, default, .. } => {
                let mut out: Vec<&[Statement]> = arms.iter().map(|a| a.body.as_slice()).collect();
                if let Some(d) = default {
                    out.push(d);
                }
                out
            }
            StmtKind::Loop { init, body, .. } => vec![init, body],
            StmtKind::Seq(body) => vec![body],
            _ => Vec::new(),
        }
    }

    /// Expressions appearing directly in this statement (not in children).
    pub fn expressions(&self) -> Vec<&Expression> {
        match &self.kind {
            StmtKind::Assign { value, .. } | StmtKind::LocalAssign { value, .. } => vec![value],
            StmtKind::Assume(e) | StmtKind::Assert(e) => vec![e],
            StmtKind::If { branches, .. } => branches.iter().map(|(g, _)| g).collect(),
            StmtKind::Loop { exit, .. } => vec![exit],
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoutineRole {
    /// Plant behavior: the step routine and its helpers.
    ModelStep,
    /// Environment assumptions wrapped around a plant step.
    Assumption,
    Requirement,
}

#[derive(Debug, Clone)]
pub struct Routine {
    pub name: String,
    /// Natural-language comment lines, kept verbatim.
    pub annotation: Vec<String>,
    pub role: RoutineRole,
    pub body: Vec<Statement>,
    pub span: Span,
}

impl PartialEq for Routine {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.annotation == other.annotation
            && self.role == other.role
            && self.body == other.body
    }
}

impl Routine {
    pub fn new(name: impl Into<String>, role: RoutineRole, body: Vec<Statement>) -> Self {
        Routine {
            name: name.into(),
            annotation: Vec::new(),
            role,
            body,
            span: Span::default(),
        }
    }

    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Statement)) {
        for s in &self.body {
            s.walk(f);
        }
    }

    /// Names of routines called anywhere in the body.
    pub fn callees(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |s| {
            if let StmtKind::Call(name) = &s.kind {
                out.push(name.as_str());
            }
        });
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub name: String,
    pub attributes: Vec<AttributeDecl>,
    pub routines: Vec<Routine>,
    /// The designated plant-step routine.
    pub step: String,
}

impl Model {
    pub fn new(name: impl Into<String>) -> Self {
        Model {
            name: name.into(),
            attributes: vec![AttributeDecl::duration(DEFAULT_DURATION_CAP)],
            routines: Vec::new(),
            step: "main".to_string(),
        }
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeDecl> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn routine(&self, name: &str) -> Option<&Routine> {
        self.routines.iter().find(|r| r.name == name)
    }

    pub fn routine_mut(&mut self, name: &str) -> Option<&mut Routine> {
        self.routines.iter_mut().find(|r| r.name == name)
    }

    pub fn requirements(&self) -> impl Iterator<Item = &Routine> {
        self.routines
            .iter()
            .filter(|r| r.role == RoutineRole::Requirement)
    }

    /// Whether `name` is a constant of some symbolic attribute domain.
    pub fn is_symbol(&self, name: &str) -> bool {
        self.attributes.iter().any(|a| match &a.domain {
            Domain::Symbolic(values) => values.iter().any(|v| v == name),
            Domain::Integer { .. } => false,
        })
    }

    /// The `duration` domain's upper bound, if declared.
    pub fn duration_cap(&self) -> Option<i64> {
        match self.attribute(DURATION).map(|a| &a.domain) {
            Some(Domain::Integer { hi, .. }) => Some(*hi),
            _ => None,
        }
    }
}

impl Statement {
    /// One-line rendering used in traces and diagnostics.
    pub fn summary(&self) -> String {
        match &self.kind {
            StmtKind::Assign { target, value } => format!("{target} := {value}"),
            StmtKind::LocalAssign { name, value } => format!("{name} := {value}"),
            StmtKind::Assume(e) => format!("assume {e} end"),
            StmtKind::Assert(e) => format!("assert {e} end"),
            StmtKind::If { branches, .. } => match branches.first() {
                Some((g, _)) => format!("if {g} then .. end"),
                None => "if .. end".to_string(),
            },
            StmtKind::Case { scrutinee, .. } => format!("case {scrutinee} .. end"),
            StmtKind::Loop { exit, .. } => format!("from .. until {exit} loop .. end"),
            StmtKind::Call(name) => name.clone(),
            StmtKind::Seq(_) => "..".to_string(),
            StmtKind::LocalDecl { name, domain } => format!("local {name} : {domain}"),
        }
    }
}

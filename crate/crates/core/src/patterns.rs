//! The four requirement schemes and their synthesis into routines.
//!
//! | scheme | kind                   | body                                                      |
//! |--------|------------------------|-----------------------------------------------------------|
//! | P1     | untimed assumption     | `assume c end ... inner`                                  |
//! | P2     | untimed obligation     | `inner assert p end`                                      |
//! | P3     | timed assumption       | `inner if <p just became true> then duration := duration + t end` |
//! | P4     | timed obligation       | `from inner until p or elapsed > t loop inner end` + asserts |
//!
//! [`recognize`] inverts [`synth`]: it is used to lint hand-written routines
//! and to read requirement parameters (such as a P4 time bound) back out.

use std::fmt;

use thiserror::Error;

use crate::ir::{
    well_formed, BinOp, Diagnostic, Expression, Model, Routine, RoutineRole, Statement, StmtKind,
    Value, DURATION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pattern {
    P1,
    P2,
    P3,
    P4,
}

impl Pattern {
    pub fn parse(s: &str) -> Option<Pattern> {
        match s.to_ascii_lowercase().as_str() {
            "p1" => Some(Pattern::P1),
            "p2" => Some(Pattern::P2),
            "p3" => Some(Pattern::P3),
            "p4" => Some(Pattern::P4),
            _ => None,
        }
    }

    pub fn role(self) -> RoutineRole {
        match self {
            Pattern::P1 | Pattern::P3 => RoutineRole::Assumption,
            Pattern::P2 | Pattern::P4 => RoutineRole::Requirement,
        }
    }

    pub fn is_timed(self) -> bool {
        matches!(self, Pattern::P3 | Pattern::P4)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::P1 => "p1",
            Pattern::P2 => "p2",
            Pattern::P3 => "p3",
            Pattern::P4 => "p4",
        })
    }
}

/// One assumed condition of a P1 instance, with its explanatory comment.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub expr: Expression,
    pub annotation: Vec<String>,
}

impl From<Expression> for Condition {
    fn from(expr: Expression) -> Self {
        Condition {
            expr,
            annotation: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scheme {
    /// P1: run `inner` under the assumed conditions, one assume per conjunct.
    AssumeCondition { conditions: Vec<Condition> },
    /// P2: after one run of `inner`, `property` holds.
    ImmediateProperty { property: Expression },
    /// P3: reaching `property` from a state where it did not hold takes `time` units.
    TimedTransition { property: Expression, time: u32 },
    /// P4: `property` is reached within `time` units of repeated runs of `inner`.
    BoundedResponse { property: Expression, time: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternInstance {
    pub name: String,
    pub scheme: Scheme,
    /// The wrapped routine (`main_under_conditions_cs`).
    pub inner: String,
    pub annotation: Vec<String>,
}

impl PatternInstance {
    pub fn pattern(&self) -> Pattern {
        match self.scheme {
            Scheme::AssumeCondition { .. } => Pattern::P1,
            Scheme::ImmediateProperty { .. } => Pattern::P2,
            Scheme::TimedTransition { .. } => Pattern::P3,
            Scheme::BoundedResponse { .. } => Pattern::P4,
        }
    }

    pub fn time(&self) -> Option<u32> {
        match self.scheme {
            Scheme::TimedTransition { time, .. } | Scheme::BoundedResponse { time, .. } => {
                Some(time)
            }
            _ => None,
        }
    }

    pub fn property(&self) -> Option<&Expression> {
        match &self.scheme {
            Scheme::AssumeCondition { .. } => None,
            Scheme::ImmediateProperty { property }
            | Scheme::TimedTransition { property, .. }
            | Scheme::BoundedResponse { property, .. } => Some(property),
        }
    }
}

/// Comment lines for a synthesized routine that has no annotation of its own.
pub fn default_annotation(name: &str, scheme: &Scheme) -> Vec<String> {
    match scheme {
        Scheme::AssumeCondition { .. } => vec!["Assumption: only runs satisfying this are considered.".into()],
        Scheme::ImmediateProperty { .. } => vec!["Requirement: holds after any admitted step.".into()],
        Scheme::TimedTransition { time, .. } => {
            vec![format!("{name} costs {time} time units")]
        }
        Scheme::BoundedResponse { time, .. } => {
            vec![format!("{name} completes within {time} time units")]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PatternError {
    #[error("P1 needs at least one condition")]
    NoConditions,
    #[error("unknown inner routine `{0}`")]
    UnknownInner(String),
    #[error("inner routine `{0}` is a requirement; only plant steps and assumption wrappers can be wrapped")]
    InnerIsRequirement(String),
    #[error("synthesized routine is ill-formed: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    IllFormed(Vec<Diagnostic>),
}

/// Synthesizes the routine for `instance` and checks it against `model`.
pub fn synth(instance: &PatternInstance, model: &Model) -> Result<Routine, PatternError> {
    let inner = model
        .routine(&instance.inner)
        .ok_or_else(|| PatternError::UnknownInner(instance.inner.clone()))?;
    if inner.role == RoutineRole::Requirement {
        return Err(PatternError::InnerIsRequirement(instance.inner.clone()));
    }
    let routine = synth_unchecked(instance)?;
    let mut scratch = model.clone();
    scratch.routines.retain(|r| r.name != routine.name);
    scratch.routines.push(routine.clone());
    let diags: Vec<Diagnostic> = well_formed(&scratch)
        .into_iter()
        .filter(|d| d.routine.as_deref() == Some(routine.name.as_str()))
        .collect();
    if !diags.is_empty() {
        return Err(PatternError::IllFormed(diags));
    }
    Ok(routine)
}

/// Synthesizes the routine without consulting a model.
pub fn synth_unchecked(instance: &PatternInstance) -> Result<Routine, PatternError> {
    let call = || Statement::call(&instance.inner);
    let body = match &instance.scheme {
        Scheme::AssumeCondition { conditions } => {
            if conditions.is_empty() {
                return Err(PatternError::NoConditions);
            }
            let mut body: Vec<Statement> = conditions
                .iter()
                .map(|c| Statement::assume(c.expr.clone()).with_annotation(c.annotation.clone()))
                .collect();
            body.push(call());
            body
        }
        Scheme::ImmediateProperty { property } => {
            vec![call(), Statement::assert(property.clone())]
        }
        Scheme::TimedTransition { property, time } => vec![
            call(),
            Statement::if_then(became_true(property), vec![advance(*time)]),
        ],
        Scheme::BoundedResponse { property, time } => {
            let mut body = vec![StmtKind::Loop {
                init: vec![call()],
                exit: Expression::or(property.clone(), timed_out(*time)),
                body: vec![call()],
            }
            .into()];
            body.extend(
                property
                    .conjuncts()
                    .into_iter()
                    .map(|c| Statement::assert(c.clone())),
            );
            body.push(Statement::assert(within(*time)));
            body
        }
    };
    let mut r = Routine::new(&instance.name, instance.pattern().role(), body);
    r.annotation = instance.annotation.clone();
    Ok(r)
}

/// `not old p and p`, with the negation folded into `p`'s comparison.
fn became_true(p: &Expression) -> Expression {
    Expression::and(p.at_entry().negated(), p.clone())
}

fn advance(t: u32) -> Statement {
    Statement::assign(
        DURATION,
        Expression::bin(BinOp::Add, Expression::attr(DURATION), Expression::int(t.into())),
    )
}

fn timed_out(t: u32) -> Expression {
    Expression::bin(BinOp::Gt, Expression::elapsed(), Expression::int(t.into()))
}

fn within(t: u32) -> Expression {
    Expression::bin(BinOp::Le, Expression::elapsed(), Expression::int(t.into()))
}

fn time_literal(e: &Expression) -> Option<u32> {
    match e {
        Expression::Lit(Value::Int(t)) => u32::try_from(*t).ok(),
        _ => None,
    }
}

/// Recognizes `routine` as an instance of one of the four schemes.
///
/// Succeeds only if re-synthesizing the instance reproduces the routine
/// exactly (annotations included).
pub fn recognize(routine: &Routine) -> Option<PatternInstance> {
    let instance = match routine.role {
        RoutineRole::Assumption => recognize_p1(routine).or_else(|| recognize_p3(routine)),
        RoutineRole::Requirement => recognize_p2(routine).or_else(|| recognize_p4(routine)),
        RoutineRole::ModelStep => None,
    }?;
    (synth_unchecked(&instance).ok()? == *routine).then_some(instance)
}

fn instance(routine: &Routine, inner: &str, scheme: Scheme) -> PatternInstance {
    PatternInstance {
        name: routine.name.clone(),
        scheme,
        inner: inner.to_string(),
        annotation: routine.annotation.clone(),
    }
}

fn as_call(s: &Statement) -> Option<&str> {
    match &s.kind {
        StmtKind::Call(name) => Some(name),
        _ => None,
    }
}

fn recognize_p1(r: &Routine) -> Option<PatternInstance> {
    let (last, assumes) = r.body.split_last()?;
    let inner = as_call(last)?;
    let conditions = assumes
        .iter()
        .map(|s| match &s.kind {
            StmtKind::Assume(e) => Some(Condition {
                expr: e.clone(),
                annotation: s.annotation.clone(),
            }),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()?;
    if conditions.is_empty() {
        return None;
    }
    Some(instance(r, inner, Scheme::AssumeCondition { conditions }))
}

fn recognize_p2(r: &Routine) -> Option<PatternInstance> {
    let [call, check] = r.body.as_slice() else {
        return None;
    };
    let inner = as_call(call)?;
    let StmtKind::Assert(property) = &check.kind else {
        return None;
    };
    Some(instance(
        r,
        inner,
        Scheme::ImmediateProperty {
            property: property.clone(),
        },
    ))
}

fn recognize_p3(r: &Routine) -> Option<PatternInstance> {
    let [call, cond] = r.body.as_slice() else {
        return None;
    };
    let inner = as_call(call)?;
    let StmtKind::If {
        branches,
        else_body,
    } = &cond.kind
    else {
        return None;
    };
    let ([(guard, then)], []) = (branches.as_slice(), else_body.as_slice()) else {
        return None;
    };
    let Expression::Binary(BinOp::And, _, property) = guard else {
        return None;
    };
    let [update] = then.as_slice() else {
        return None;
    };
    let StmtKind::Assign { value, .. } = &update.kind else {
        return None;
    };
    let Expression::Binary(BinOp::Add, _, t) = value else {
        return None;
    };
    Some(instance(
        r,
        inner,
        Scheme::TimedTransition {
            property: (**property).clone(),
            time: time_literal(t)?,
        },
    ))
}

fn recognize_p4(r: &Routine) -> Option<PatternInstance> {
    let (head, _) = r.body.split_first()?;
    let StmtKind::Loop { init, exit, .. } = &head.kind else {
        return None;
    };
    let [call] = init.as_slice() else {
        return None;
    };
    let inner = as_call(call)?;
    let Expression::Binary(BinOp::Or, property, timeout) = exit else {
        return None;
    };
    let Expression::Binary(BinOp::Gt, _, t) = &**timeout else {
        return None;
    };
    Some(instance(
        r,
        inner,
        Scheme::BoundedResponse {
            property: (**property).clone(),
            time: time_literal(t)?,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(attr: &str, value: &str) -> Expression {
        Expression::eq(Expression::attr(attr), Expression::sym(value))
    }

    fn inst(scheme: Scheme) -> PatternInstance {
        PatternInstance {
            name: "req".into(),
            scheme,
            inner: "main".into(),
            annotation: vec![],
        }
    }

    #[test]
    fn p3_guard_reads_like_a_hand_written_transition() {
        let r = synth_unchecked(&inst(Scheme::TimedTransition {
            property: p("door_status", "closed_position"),
            time: 8,
        }))
        .unwrap();
        let StmtKind::If { branches, .. } = &r.body[1].kind else {
            panic!("expected if")
        };
        let expected = Expression::and(
            Expression::neq(
                Expression::old(Expression::attr("door_status")),
                Expression::sym("closed_position"),
            ),
            p("door_status", "closed_position"),
        );
        assert_eq!(branches[0].0, expected);
        assert_eq!(r.role, RoutineRole::Assumption);
    }

    #[test]
    fn p4_splits_property_into_one_assert_per_conjunct() {
        let property = Expression::and(
            p("gear_status", "extended_position"),
            p("door_status", "closed_position"),
        );
        let r = synth_unchecked(&inst(Scheme::BoundedResponse {
            property: property.clone(),
            time: 25,
        }))
        .unwrap();
        assert_eq!(r.body.len(), 4);
        let StmtKind::Loop { init, body, exit } = &r.body[0].kind else {
            panic!("expected loop")
        };
        assert_eq!(init, body);
        assert_eq!(
            *exit,
            Expression::or(
                property,
                Expression::bin(BinOp::Gt, Expression::elapsed(), Expression::int(25))
            )
        );
        assert_eq!(
            r.body[3].kind,
            StmtKind::Assert(Expression::bin(
                BinOp::Le,
                Expression::elapsed(),
                Expression::int(25)
            ))
        );
    }

    #[test]
    fn p2_with_true_is_a_minimal_obligation() {
        let r = synth_unchecked(&inst(Scheme::ImmediateProperty {
            property: Expression::tt(),
        }))
        .unwrap();
        assert_eq!(
            r.body,
            vec![Statement::call("main"), Statement::assert(Expression::tt())]
        );
    }

    #[test]
    fn p1_without_conditions_is_rejected() {
        assert_eq!(
            synth_unchecked(&inst(Scheme::AssumeCondition { conditions: vec![] })),
            Err(PatternError::NoConditions)
        );
    }

    #[test]
    fn single_assignment_is_no_pattern() {
        let r = Routine::new(
            "r",
            RoutineRole::Requirement,
            vec![Statement::assign("x", Expression::int(1))],
        );
        assert_eq!(recognize(&r), None);
    }

    #[test]
    fn roles_gate_recognition() {
        let mut r = synth_unchecked(&inst(Scheme::ImmediateProperty {
            property: Expression::tt(),
        }))
        .unwrap();
        assert!(recognize(&r).is_some());
        r.role = RoutineRole::ModelStep;
        assert_eq!(recognize(&r), None);
    }

    #[test]
    fn timed_outputs_have_no_assume_and_obligations_no_assume() {
        for scheme in [
            Scheme::AssumeCondition {
                conditions: vec![Expression::tt().into()],
            },
            Scheme::ImmediateProperty {
                property: Expression::tt(),
            },
            Scheme::TimedTransition {
                property: Expression::tt(),
                time: 3,
            },
            Scheme::BoundedResponse {
                property: Expression::tt(),
                time: 3,
            },
        ] {
            let i = inst(scheme);
            let r = synth_unchecked(&i).unwrap();
            let (mut assumes, mut asserts) = (0, 0);
            r.walk(&mut |s| match s.kind {
                StmtKind::Assume(_) => assumes += 1,
                StmtKind::Assert(_) => asserts += 1,
                _ => {}
            });
            match i.pattern() {
                Pattern::P1 | Pattern::P3 => assert_eq!(asserts, 0),
                Pattern::P2 | Pattern::P4 => assert_eq!(assumes, 0),
            }
        }
    }
}

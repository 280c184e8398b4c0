//! A direct recursive interpreter of routines.
//!
//! Calls are executed by recursion and loops by iteration, with no
//! compilation step. Expression evaluation is implemented here as well, so
//! nothing but the AST is shared with the engine under test.

use std::collections::{BTreeMap, HashSet};

use reqcheck_core::ir::{
    AttrKind, BinOp, Domain, Expression, Model, PlantState, Routine, Statement, StmtKind, Value,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Completed(PlantState),
    AssumeViolated,
    AssertFailed,
    Diverged(PlantState),
    BoundExceeded,
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Completed(_) => "completed",
            Verdict::AssumeViolated => "assume_violated",
            Verdict::AssertFailed => "assert_failed",
            Verdict::Diverged(_) => "diverged",
            Verdict::BoundExceeded => "bound_exceeded",
        }
    }
}

pub struct Oracle<'m> {
    pub model: &'m Model,
    pub bound: u32,
}

struct Frame {
    entry: PlantState,
    locals: BTreeMap<String, Value>,
    domains: BTreeMap<String, Domain>,
}

type Flow = Result<(), Verdict>;

impl<'m> Oracle<'m> {
    pub fn new(model: &'m Model, bound: u32) -> Self {
        Oracle { model, bound }
    }

    /// Runs `routine` from `initial`; `Err` on a runtime error.
    pub fn run(&self, routine: &Routine, initial: &PlantState) -> Result<Verdict, String> {
        let mut state = initial.clone();
        match self.call(routine, &mut state)? {
            Ok(()) => Ok(Verdict::Completed(state)),
            Err(v) => Ok(v),
        }
    }

    /// All initial states, built by counting through the domains.
    pub fn initial_states(&self) -> Vec<PlantState> {
        let attrs = &self.model.attributes;
        let choices: Vec<Vec<Value>> = attrs
            .iter()
            .map(|a| match a.kind {
                AttrKind::Ghost => vec![Value::Int(0)],
                _ => match &a.domain {
                    Domain::Symbolic(vs) => vs.iter().cloned().map(Value::Sym).collect(),
                    Domain::Integer { lo, hi } => (*lo..=*hi).map(Value::Int).collect(),
                },
            })
            .collect();
        let total: usize = choices.iter().map(Vec::len).product();
        let names: Vec<String> = attrs.iter().map(|a| a.name.clone()).collect();
        (0..total)
            .map(|mut n| {
                // last attribute varies fastest
                let mut values = vec![Value::Int(0); attrs.len()];
                for i in (0..attrs.len()).rev() {
                    values[i] = choices[i][n % choices[i].len()].clone();
                    n /= choices[i].len();
                }
                PlantState::new(names.clone().into(), values)
            })
            .collect()
    }

    fn call(&self, routine: &Routine, state: &mut PlantState) -> Result<Flow, String> {
        let mut frame = Frame {
            entry: state.clone(),
            locals: BTreeMap::new(),
            domains: BTreeMap::new(),
        };
        self.block(&routine.body, state, &mut frame)
    }

    fn block(&self, body: &[Statement], state: &mut PlantState, frame: &mut Frame) -> Result<Flow, String> {
        for s in body {
            if let Err(v) = self.stmt(s, state, frame)? {
                return Ok(Err(v));
            }
        }
        Ok(Ok(()))
    }

    fn stmt(&self, s: &Statement, state: &mut PlantState, frame: &mut Frame) -> Result<Flow, String> {
        match &s.kind {
            StmtKind::Assign { target, value } => {
                let v = self.eval(value, state, frame, false)?;
                let decl = self.model.attribute(target).ok_or("unknown attribute")?;
                if !in_domain(&decl.domain, &v) {
                    return Err(format!("{v} outside the domain of {target}"));
                }
                state.set(target, v);
            }
            StmtKind::LocalDecl { name, domain } => {
                let init = match domain {
                    Domain::Symbolic(vs) => Value::Sym(vs[0].clone()),
                    Domain::Integer { lo, hi } => Value::Int(0.clamp(*lo, *hi)),
                };
                frame.locals.insert(name.clone(), init);
                frame.domains.insert(name.clone(), domain.clone());
            }
            StmtKind::LocalAssign { name, value } => {
                let v = self.eval(value, state, frame, false)?;
                if !in_domain(&frame.domains[name], &v) {
                    return Err(format!("{v} outside the domain of {name}"));
                }
                frame.locals.insert(name.clone(), v);
            }
            StmtKind::Assume(e) => {
                if !self.truth(e, state, frame)? {
                    return Ok(Err(Verdict::AssumeViolated));
                }
            }
            StmtKind::Assert(e) => {
                if !self.truth(e, state, frame)? {
                    return Ok(Err(Verdict::AssertFailed));
                }
            }
            StmtKind::If {
                branches,
                else_body,
            } => {
                for (guard, body) in branches {
                    if self.truth(guard, state, frame)? {
                        return self.block(body, state, frame);
                    }
                }
                return self.block(else_body, state, frame);
            }
            StmtKind::Case {
                scrutinee,
                arms,
                default,
            } => {
                let v = match frame.locals.get(scrutinee) {
                    Some(v) => v.clone(),
                    None => state.get(scrutinee).cloned().ok_or("unknown scrutinee")?,
                };
                for arm in arms {
                    if v == Value::Sym(arm.value.clone()) {
                        return self.block(&arm.body, state, frame);
                    }
                }
                if let Some(d) = default {
                    return self.block(d, state, frame);
                }
            }
            StmtKind::Loop { init, exit, body } => {
                if let Err(v) = self.block(init, state, frame)? {
                    return Ok(Err(v));
                }
                let mut seen = HashSet::new();
                let mut passes = 1;
                loop {
                    if self.truth(exit, state, frame)? {
                        break;
                    }
                    if !seen.insert((state.clone(), frame.locals.clone())) {
                        return Ok(Err(Verdict::Diverged(state.clone())));
                    }
                    if passes >= self.bound {
                        return Ok(Err(Verdict::BoundExceeded));
                    }
                    if let Err(v) = self.block(body, state, frame)? {
                        return Ok(Err(v));
                    }
                    passes += 1;
                }
            }
            StmtKind::Call(name) => {
                let r = self.model.routine(name).ok_or("unknown routine")?;
                return self.call(r, state);
            }
            StmtKind::Seq(body) => return self.block(body, state, frame),
        }
        Ok(Ok(()))
    }

    fn truth(&self, e: &Expression, state: &PlantState, frame: &Frame) -> Result<bool, String> {
        match self.eval(e, state, frame, false)? {
            Value::Bool(b) => Ok(b),
            v => Err(format!("condition evaluated to {v}")),
        }
    }

    fn eval(&self, e: &Expression, state: &PlantState, frame: &Frame, old: bool) -> Result<Value, String> {
        let at = if old { &frame.entry } else { state };
        Ok(match e {
            Expression::Lit(v) => v.clone(),
            Expression::Attr(n) => at.get(n).cloned().ok_or(format!("unbound {n}"))?,
            Expression::Local(n) => frame.locals.get(n).cloned().ok_or(format!("unbound {n}"))?,
            Expression::Old(inner) => self.eval(inner, state, frame, true)?,
            Expression::Not(inner) => match self.eval(inner, state, frame, old)? {
                Value::Bool(b) => Value::Bool(!b),
                v => return Err(format!("not of {v}")),
            },
            Expression::Binary(op, l, r) => {
                let lv = self.eval(l, state, frame, old)?;
                let lazy = match (op, &lv) {
                    (BinOp::And, Value::Bool(false)) => Some(false),
                    (BinOp::Or, Value::Bool(true)) => Some(true),
                    (BinOp::Implies, Value::Bool(false)) => Some(true),
                    _ => None,
                };
                if let Some(b) = lazy {
                    return Ok(Value::Bool(b));
                }
                let rv = self.eval(r, state, frame, old)?;
                binary(*op, lv, rv)?
            }
        })
    }
}

fn in_domain(d: &Domain, v: &Value) -> bool {
    match (d, v) {
        (Domain::Symbolic(vs), Value::Sym(s)) => vs.contains(s),
        (Domain::Integer { lo, hi }, Value::Int(i)) => (*lo..=*hi).contains(i),
        _ => false,
    }
}

fn binary(op: BinOp, l: Value, r: Value) -> Result<Value, String> {
    use Value::{Bool, Int};
    Ok(match (op, &l, &r) {
        (BinOp::And, Bool(a), Bool(b)) => Bool(*a && *b),
        (BinOp::Or, Bool(a), Bool(b)) => Bool(*a || *b),
        (BinOp::Implies, Bool(a), Bool(b)) => Bool(!*a || *b),
        (BinOp::Eq, _, _) if l.sort_name() == r.sort_name() => Bool(l == r),
        (BinOp::Neq, _, _) if l.sort_name() == r.sort_name() => Bool(l != r),
        (BinOp::Lt, Int(a), Int(b)) => Bool(a < b),
        (BinOp::Le, Int(a), Int(b)) => Bool(a <= b),
        (BinOp::Gt, Int(a), Int(b)) => Bool(a > b),
        (BinOp::Ge, Int(a), Int(b)) => Bool(a >= b),
        (BinOp::Add, Int(a), Int(b)) => Int(a.checked_add(*b).ok_or("overflow")?),
        (BinOp::Sub, Int(a), Int(b)) => Int(a.checked_sub(*b).ok_or("overflow")?),
        (BinOp::Max, Int(a), Int(b)) => Int(*a.max(b)),
        (BinOp::Min, Int(a), Int(b)) => Int(*a.min(b)),
        _ => return Err(format!("{} applied to {l} and {r}", op.symbol())),
    })
}

//! Execution of compiled programs from one initial state.

use std::collections::HashSet;

use crate::ir::{apply_binary, BinOp, EvalError, PlantState, Value};

use super::compile::{CExpr, Op, Program};
use super::{Outcome, TraceStep, VerifyConfig, VerifyError};

struct LoopState {
    passes: u32,
    history: HashSet<(PlantState, Vec<Value>)>,
}

struct Machine<'p> {
    program: &'p Program,
    state: PlantState,
    entries: Vec<Option<PlantState>>,
    locals: Vec<Value>,
    trace: Vec<TraceStep>,
}

impl Program {
    /// Runs the program from `initial`, adding every visited state to `seen`.
    pub fn run(
        &self,
        initial: &PlantState,
        config: &VerifyConfig,
        seen: &mut HashSet<PlantState>,
    ) -> Result<Outcome, VerifyError> {
        let mut m = Machine {
            program: self,
            state: initial.clone(),
            entries: vec![None; self.activations],
            locals: self
                .local_domains
                .iter()
                .map(|d| d.default_value())
                .collect(),
            trace: Vec::new(),
        };
        let mut loops: Vec<LoopState> = (0..self.loops)
            .map(|_| LoopState {
                passes: 0,
                history: HashSet::new(),
            })
            .collect();
        seen.insert(initial.clone());
        let mut pc = 0;
        while pc < self.ops.len() {
            pc = match &self.ops[pc] {
                Op::Enter { act } => {
                    m.entries[*act] = Some(m.state.clone());
                    pc + 1
                }
                Op::Assign { slot, expr, site } => {
                    let v = m.eval(expr, *site)?;
                    if Some(*slot) == self.duration_slot {
                        if let Value::Int(d) = v {
                            if d > config.duration_cap {
                                return Err(VerifyError::DurationCap {
                                    site: self.sites[*site].clone(),
                                    value: d,
                                    cap: config.duration_cap,
                                });
                            }
                        }
                    }
                    if !self.attr_domains[*slot].contains(&v) {
                        return Err(VerifyError::Domain {
                            site: self.sites[*site].clone(),
                            name: self.attr_names[*slot].clone(),
                            value: v,
                        });
                    }
                    let before = m.state.clone();
                    m.state.set_at(*slot, v);
                    seen.insert(m.state.clone());
                    m.record(before, *site);
                    pc + 1
                }
                Op::DeclLocal { local } => {
                    m.locals[*local] = self.local_domains[*local].default_value();
                    pc + 1
                }
                Op::SetLocal { local, expr, site } => {
                    let v = m.eval(expr, *site)?;
                    if !self.local_domains[*local].contains(&v) {
                        return Err(VerifyError::Domain {
                            site: self.sites[*site].clone(),
                            name: self.local_names[*local].clone(),
                            value: v,
                        });
                    }
                    m.locals[*local] = v;
                    m.record(m.state.clone(), *site);
                    pc + 1
                }
                Op::Assume { cond, site } => {
                    m.record(m.state.clone(), *site);
                    if !m.eval_bool(cond, *site)? {
                        return Ok(Outcome::AssumeViolated {
                            at: self.sites[*site].clone(),
                        });
                    }
                    pc + 1
                }
                Op::Assert { cond, site } => {
                    m.record(m.state.clone(), *site);
                    if !m.eval_bool(cond, *site)? {
                        return Ok(Outcome::AssertFailed {
                            at: self.sites[*site].clone(),
                            trace: m.trace,
                        });
                    }
                    pc + 1
                }
                Op::JumpIfNot { cond, target, site } => {
                    if m.eval_bool(cond, *site)? {
                        pc + 1
                    } else {
                        *target
                    }
                }
                Op::Jump { target } => *target,
                Op::CaseJump {
                    scrutinee,
                    arms,
                    default,
                    site,
                } => {
                    let v = m.eval(scrutinee, *site)?;
                    arms.iter()
                        .find(|(value, _)| *value == v)
                        .map_or(*default, |(_, t)| *t)
                }
                Op::LoopStart { id } => {
                    loops[*id].passes = 0;
                    loops[*id].history.clear();
                    pc + 1
                }
                Op::LoopCheck {
                    id,
                    exit,
                    done,
                    site,
                } => {
                    let l = &mut loops[*id];
                    l.passes += 1;
                    if m.eval_bool(exit, *site)? {
                        *done
                    } else {
                        if config.detect_cycles
                            && !l.history.insert((m.state.clone(), m.locals.clone()))
                        {
                            return Ok(Outcome::Diverged {
                                repeated_state: m.state,
                                trace: m.trace,
                            });
                        }
                        if l.passes >= config.unroll_bound {
                            return Ok(Outcome::BoundExceeded { trace: m.trace });
                        }
                        pc + 1
                    }
                }
            };
        }
        Ok(Outcome::Completed {
            final_state: m.state,
            trace: m.trace,
        })
    }
}

impl Machine<'_> {
    fn record(&mut self, before: PlantState, site: usize) {
        self.trace.push(TraceStep {
            before,
            site: self.program.sites[site].clone(),
            after: self.state.clone(),
        });
    }

    fn eval(&self, e: &CExpr, site: usize) -> Result<Value, VerifyError> {
        self.eval_in(e).map_err(|source| VerifyError::Eval {
            site: self.program.sites[site].clone(),
            source,
        })
    }

    fn eval_bool(&self, e: &CExpr, site: usize) -> Result<bool, VerifyError> {
        match self.eval(e, site)? {
            Value::Bool(b) => Ok(b),
            other => Err(VerifyError::Eval {
                site: self.program.sites[site].clone(),
                source: EvalError::Sort {
                    op: "condition",
                    found: other.sort_name().to_string(),
                },
            }),
        }
    }

    fn eval_in(&self, e: &CExpr) -> Result<Value, EvalError> {
        match e {
            CExpr::Lit(v) => Ok(v.clone()),
            CExpr::Attr(slot) => Ok(self.state.at(*slot).clone()),
            CExpr::Local(l) => Ok(self.locals[*l].clone()),
            CExpr::OldAttr(act, slot) => Ok(self.entries[*act]
                .as_ref()
                .expect("activation entered before use")
                .at(*slot)
                .clone()),
            CExpr::Not(inner) => match self.eval_in(inner)? {
                Value::Bool(b) => Ok(Value::Bool(!b)),
                other => Err(EvalError::Sort {
                    op: "not",
                    found: other.sort_name().to_string(),
                }),
            },
            CExpr::Bin(op, l, r) => {
                let lv = self.eval_in(l)?;
                match (op, &lv) {
                    (BinOp::And, Value::Bool(false)) => return Ok(Value::Bool(false)),
                    (BinOp::Or, Value::Bool(true)) => return Ok(Value::Bool(true)),
                    (BinOp::Implies, Value::Bool(false)) => return Ok(Value::Bool(true)),
                    _ => {}
                }
                apply_binary(*op, lv, self.eval_in(r)?)
            }
        }
    }
}

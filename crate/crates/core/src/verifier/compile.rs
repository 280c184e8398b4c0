//! Inlining and loop flattening into a small jump-based program.

use std::collections::HashMap;
use std::sync::Arc;

use crate::ir::{BinOp, Domain, Expression, Model, Routine, Statement, StmtKind, Value};

use super::{ensure_well_formed, Site, VerifyConfig, VerifyError};

#[derive(Debug, Clone)]
pub(crate) enum CExpr {
    Lit(Value),
    Attr(usize),
    Local(usize),
    /// Attribute read from the entry snapshot of an activation.
    OldAttr(usize, usize),
    Not(Box<CExpr>),
    Bin(BinOp, Box<CExpr>, Box<CExpr>),
}

#[derive(Debug, Clone)]
pub(crate) enum Op {
    /// Snapshots the current state as the entry state of activation `act`.
    Enter { act: usize },
    Assign { slot: usize, expr: CExpr, site: usize },
    DeclLocal { local: usize },
    SetLocal { local: usize, expr: CExpr, site: usize },
    Assume { cond: CExpr, site: usize },
    Assert { cond: CExpr, site: usize },
    JumpIfNot { cond: CExpr, target: usize, site: usize },
    Jump { target: usize },
    CaseJump {
        scrutinee: CExpr,
        arms: Vec<(Value, usize)>,
        default: usize,
        site: usize,
    },
    LoopStart { id: usize },
    /// Ends one pass: leaves to `done` on `exit`, otherwise checks for a
    /// repeated state and for the unroll bound.
    LoopCheck {
        id: usize,
        exit: CExpr,
        done: usize,
        site: usize,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct Program {
    pub ops: Vec<Op>,
    pub sites: Vec<Site>,
    pub attr_names: Vec<String>,
    pub attr_domains: Vec<Domain>,
    pub duration_slot: Option<usize>,
    pub local_names: Vec<String>,
    pub local_domains: Vec<Domain>,
    pub activations: usize,
    pub loops: usize,
}

struct Compiler<'m> {
    model: &'m Model,
    program: Program,
}

struct Activation {
    id: usize,
    routine: Arc<str>,
    locals: HashMap<String, usize>,
}

impl Program {
    pub fn compile(
        model: &Model,
        routine: &Routine,
        _config: &VerifyConfig,
    ) -> Result<Program, VerifyError> {
        ensure_well_formed(model, routine)?;
        let mut c = Compiler {
            model,
            program: Program {
                ops: Vec::new(),
                sites: Vec::new(),
                attr_names: model.attributes.iter().map(|a| a.name.clone()).collect(),
                attr_domains: model.attributes.iter().map(|a| a.domain.clone()).collect(),
                duration_slot: model
                    .attributes
                    .iter()
                    .position(|a| super::is_duration(&a.name)),
                local_names: Vec::new(),
                local_domains: Vec::new(),
                activations: 0,
                loops: 0,
            },
        };
        c.routine(routine);
        Ok(c.program)
    }
}

impl Compiler<'_> {
    fn routine(&mut self, routine: &Routine) {
        let mut act = Activation {
            id: self.program.activations,
            routine: routine.name.as_str().into(),
            locals: HashMap::new(),
        };
        self.program.activations += 1;
        self.emit(Op::Enter { act: act.id });
        self.block(&routine.body, &mut act);
    }

    fn emit(&mut self, op: Op) -> usize {
        self.program.ops.push(op);
        self.program.ops.len() - 1
    }

    fn here(&self) -> usize {
        self.program.ops.len()
    }

    fn site(&mut self, act: &Activation, stmt: &Statement) -> usize {
        self.program.sites.push(Site::new(&act.routine, stmt));
        self.program.sites.len() - 1
    }

    fn patch(&mut self, at: usize, to: usize) {
        match &mut self.program.ops[at] {
            Op::Jump { target } | Op::JumpIfNot { target, .. } => *target = to,
            Op::LoopCheck { done, .. } => *done = to,
            Op::CaseJump { default, .. } => *default = to,
            _ => unreachable!("patching a non-jump"),
        }
    }

    fn block(&mut self, body: &[Statement], act: &mut Activation) {
        for s in body {
            self.statement(s, act);
        }
    }

    fn statement(&mut self, stmt: &Statement, act: &mut Activation) {
        match &stmt.kind {
            StmtKind::Assign { target, value } => {
                let slot = self.attr_slot(target);
                let expr = self.expr(value, act, None);
                let site = self.site(act, stmt);
                self.emit(Op::Assign { slot, expr, site });
            }
            StmtKind::LocalDecl { name, domain } => {
                let local = self.program.local_names.len();
                self.program.local_names.push(name.clone());
                self.program.local_domains.push(domain.clone());
                act.locals.insert(name.clone(), local);
                self.emit(Op::DeclLocal { local });
            }
            StmtKind::LocalAssign { name, value } => {
                let local = act.locals[name];
                let expr = self.expr(value, act, None);
                let site = self.site(act, stmt);
                self.emit(Op::SetLocal { local, expr, site });
            }
            StmtKind::Assume(e) => {
                let cond = self.expr(e, act, None);
                let site = self.site(act, stmt);
                self.emit(Op::Assume { cond, site });
            }
            StmtKind::Assert(e) => {
                let cond = self.expr(e, act, None);
                let site = self.site(act, stmt);
                self.emit(Op::Assert { cond, site });
            }
            StmtKind::If {
                branches,
                else_body,
            } => {
                let site = self.site(act, stmt);
                let mut exits = Vec::new();
                for (guard, body) in branches {
                    let cond = self.expr(guard, act, None);
                    let skip = self.emit(Op::JumpIfNot {
                        cond,
                        target: 0,
                        site,
                    });
                    self.block(body, act);
                    exits.push(self.emit(Op::Jump { target: 0 }));
                    let next = self.here();
                    self.patch(skip, next);
                }
                self.block(else_body, act);
                let end = self.here();
                for j in exits {
                    self.patch(j, end);
                }
            }
            StmtKind::Case {
                scrutinee,
                arms,
                default,
            } => {
                let scrutinee = match act.locals.get(scrutinee) {
                    Some(&l) => CExpr::Local(l),
                    None => CExpr::Attr(self.attr_slot(scrutinee)),
                };
                let site = self.site(act, stmt);
                let dispatch = self.emit(Op::CaseJump {
                    scrutinee,
                    arms: Vec::new(),
                    default: 0,
                    site,
                });
                let mut targets = Vec::new();
                let mut exits = Vec::new();
                for arm in arms {
                    targets.push((Value::sym(&arm.value), self.here()));
                    self.block(&arm.body, act);
                    exits.push(self.emit(Op::Jump { target: 0 }));
                }
                let default_at = self.here();
                if let Some(body) = default {
                    self.block(body, act);
                }
                let end = self.here();
                for j in exits {
                    self.patch(j, end);
                }
                if let Op::CaseJump { arms, default, .. } = &mut self.program.ops[dispatch] {
                    *arms = targets;
                    *default = default_at;
                }
            }
            StmtKind::Loop { init, exit, body } => {
                let id = self.program.loops;
                self.program.loops += 1;
                self.emit(Op::LoopStart { id });
                self.block(init, act);
                let exit = self.expr(exit, act, None);
                let site = self.site(act, stmt);
                let check = self.emit(Op::LoopCheck {
                    id,
                    exit,
                    done: 0,
                    site,
                });
                self.block(body, act);
                self.emit(Op::Jump { target: check });
                let done = self.here();
                self.patch(check, done);
            }
            StmtKind::Call(name) => {
                let callee = self
                    .model
                    .routine(name)
                    .expect("well-formedness guarantees callees exist");
                self.routine(callee);
            }
            StmtKind::Seq(body) => self.block(body, act),
        }
    }

    fn attr_slot(&self, name: &str) -> usize {
        self.model
            .attributes
            .iter()
            .position(|a| a.name == name)
            .expect("well-formedness guarantees attributes exist")
    }

    fn expr(&self, e: &Expression, act: &Activation, old: Option<usize>) -> CExpr {
        match e {
            Expression::Lit(v) => CExpr::Lit(v.clone()),
            Expression::Attr(name) => match old {
                Some(a) => CExpr::OldAttr(a, self.attr_slot(name)),
                None => CExpr::Attr(self.attr_slot(name)),
            },
            Expression::Local(name) => CExpr::Local(act.locals[name]),
            Expression::Old(inner) => self.expr(inner, act, Some(act.id)),
            Expression::Not(inner) => CExpr::Not(Box::new(self.expr(inner, act, old))),
            Expression::Binary(op, l, r) => CExpr::Bin(
                *op,
                Box::new(self.expr(l, act, old)),
                Box::new(self.expr(r, act, old)),
            ),
        }
    }
}

use std::collections::{BTreeMap, HashSet};

use super::{AsmError, AsmRule, RuleDecl};
use crate::ir::{AttributeDecl, Domain, Expression, Routine, RoutineRole, Statement, StmtKind};

/// Translates rules of one machine. Holds the attribute declarations (for
/// the domains of intermediate locals) and the named rules (for expanding
/// rule references inside `par`).
pub struct Translator<'a> {
    attributes: &'a [AttributeDecl],
    rules: BTreeMap<&'a str, &'a AsmRule>,
    taken: HashSet<String>,
}

/// One update collected from a `par`, with the guard decisions leading to it.
struct Guarded<'r> {
    path: Vec<(usize, bool)>,
    location: &'r str,
}

impl<'a> Translator<'a> {
    pub fn new(attributes: &'a [AttributeDecl], rules: &'a [RuleDecl]) -> Self {
        Translator {
            attributes,
            rules: rules.iter().map(|r| (r.name.as_str(), &r.rule)).collect(),
            taken: HashSet::new(),
        }
    }

    /// Translates one rule into a statement with the same one-step effect.
    pub fn rule(&mut self, rule: &AsmRule) -> Result<Statement, AsmError> {
        self.taken = self.attributes.iter().map(|a| a.name.clone()).collect();
        self.translate(rule)
    }

    fn translate(&mut self, rule: &AsmRule) -> Result<Statement, AsmError> {
        match rule {
            AsmRule::Update {
                location,
                args,
                value,
            } => {
                self.location(location, args)?;
                Ok(Statement::assign(location, value.clone()))
            }
            AsmRule::Call(name) => {
                if !self.rules.contains_key(name.as_str()) {
                    return Err(AsmError::DanglingRule(name.clone()));
                }
                Ok(Statement::call(name))
            }
            AsmRule::Cond {
                guard,
                then_rule,
                else_rule,
            } => {
                let then = flatten(self.translate(then_rule)?);
                let otherwise = match else_rule {
                    Some(e) => flatten(self.translate(e)?),
                    None => Vec::new(),
                };
                Ok(StmtKind::If {
                    branches: vec![(guard.clone(), then)],
                    else_body: otherwise,
                }
                .into())
            }
            AsmRule::Par(children) if children.len() == 1 => self.translate(&children[0]),
            AsmRule::Par(_) => self.parallel(rule),
        }
    }

    fn location(&self, location: &str, args: &[Expression]) -> Result<&'a AttributeDecl, AsmError> {
        if !args.is_empty() {
            return Err(AsmError::UnsupportedLocation(location.to_string()));
        }
        self.attributes
            .iter()
            .find(|a| a.name == location)
            .ok_or_else(|| AsmError::UnknownLocation(location.to_string()))
    }

    fn parallel(&mut self, rule: &AsmRule) -> Result<Statement, AsmError> {
        let mut updates = Vec::new();
        let mut next_guard = 0;
        self.collect(rule, &mut Vec::new(), &mut next_guard, &mut updates, &mut Vec::new())?;

        // Two updates of one location conflict unless they sit on opposite
        // branches of the same conditional.
        for (i, a) in updates.iter().enumerate() {
            for b in &updates[i + 1..] {
                if a.location == b.location && !exclusive(&a.path, &b.path) {
                    return Err(AsmError::Conflict(a.location.to_string()));
                }
            }
        }

        let mut order: Vec<&str> = Vec::new();
        for u in &updates {
            if !order.contains(&u.location) {
                order.push(u.location);
            }
        }
        let mut temps: BTreeMap<String, String> = BTreeMap::new();
        let mut out = Vec::new();
        for loc in &order {
            let domain: Domain = self.location(loc, &[])?.domain.clone();
            let temp = self.fresh(&format!("{loc}_intermediate"));
            out.push(
                StmtKind::LocalDecl {
                    name: temp.clone(),
                    domain,
                }
                .into(),
            );
            let always = updates
                .iter()
                .any(|u| u.location == *loc && u.path.is_empty());
            if !always {
                // keeps the location unchanged when no guarded update fires
                out.push(
                    StmtKind::LocalAssign {
                        name: temp.clone(),
                        value: Expression::attr(*loc),
                    }
                    .into(),
                );
            }
            temps.insert(loc.to_string(), temp);
        }
        self.compute(rule, &temps, &mut out, &mut Vec::new())?;
        for loc in &order {
            out.push(Statement::assign(
                *loc,
                Expression::Local(temps[*loc].clone()),
            ));
        }
        Ok(StmtKind::Seq(out).into())
    }

    fn collect<'r>(
        &self,
        rule: &'r AsmRule,
        path: &mut Vec<(usize, bool)>,
        next_guard: &mut usize,
        out: &mut Vec<Guarded<'r>>,
        expanding: &mut Vec<&'r str>,
    ) -> Result<(), AsmError>
    where
        'a: 'r,
    {
        match rule {
            AsmRule::Update { location, args, .. } => {
                self.location(location, args)?;
                out.push(Guarded {
                    path: path.clone(),
                    location,
                });
            }
            AsmRule::Par(children) => {
                for c in children {
                    self.collect(c, path, next_guard, out, expanding)?;
                }
            }
            AsmRule::Cond {
                then_rule,
                else_rule,
                ..
            } => {
                let id = *next_guard;
                *next_guard += 1;
                path.push((id, true));
                self.collect(then_rule, path, next_guard, out, expanding)?;
                path.pop();
                if let Some(e) = else_rule {
                    path.push((id, false));
                    self.collect(e, path, next_guard, out, expanding)?;
                    path.pop();
                }
            }
            AsmRule::Call(name) => {
                let (key, body) = self
                    .rules
                    .get_key_value(name.as_str())
                    .ok_or_else(|| AsmError::DanglingRule(name.clone()))?;
                if expanding.contains(key) {
                    return Err(AsmError::CyclicRule(name.clone()));
                }
                expanding.push(key);
                self.collect(body, path, next_guard, out, expanding)?;
                expanding.pop();
            }
        }
        Ok(())
    }

    /// Emits the compute phase: every update writes its intermediate local.
    fn compute(
        &self,
        rule: &AsmRule,
        temps: &BTreeMap<String, String>,
        out: &mut Vec<Statement>,
        expanding: &mut Vec<String>,
    ) -> Result<(), AsmError> {
        match rule {
            AsmRule::Update {
                location, value, ..
            } => out.push(
                StmtKind::LocalAssign {
                    name: temps[location].clone(),
                    value: value.clone(),
                }
                .into(),
            ),
            AsmRule::Par(children) => {
                for c in children {
                    self.compute(c, temps, out, expanding)?;
                }
            }
            AsmRule::Cond {
                guard,
                then_rule,
                else_rule,
            } => {
                let mut then = Vec::new();
                self.compute(then_rule, temps, &mut then, expanding)?;
                let mut otherwise = Vec::new();
                if let Some(e) = else_rule {
                    self.compute(e, temps, &mut otherwise, expanding)?;
                }
                out.push(
                    StmtKind::If {
                        branches: vec![(guard.clone(), then)],
                        else_body: otherwise,
                    }
                    .into(),
                );
            }
            AsmRule::Call(name) => {
                let body = self
                    .rules
                    .get(name.as_str())
                    .ok_or_else(|| AsmError::DanglingRule(name.clone()))?;
                if expanding.contains(name) {
                    return Err(AsmError::CyclicRule(name.clone()));
                }
                expanding.push(name.clone());
                self.compute(body, temps, out, expanding)?;
                expanding.pop();
            }
        }
        Ok(())
    }

    fn fresh(&mut self, base: &str) -> String {
        let mut name = base.to_string();
        let mut n = 2;
        while self.taken.contains(&name) {
            name = format!("{base}_{n}");
            n += 1;
        }
        self.taken.insert(name.clone());
        name
    }
}

fn exclusive(a: &[(usize, bool)], b: &[(usize, bool)]) -> bool {
    a.iter()
        .any(|(id, dir)| b.iter().any(|(id2, dir2)| id == id2 && dir != dir2))
}

fn flatten(s: Statement) -> Vec<Statement> {
    match s.kind {
        StmtKind::Seq(body) => body,
        kind => vec![Statement {
            kind,
            annotation: s.annotation,
            span: s.span,
        }],
    }
}

/// Translates a single rule. Rule references inside `par` are expanded
/// from `rules`; elsewhere they become calls.
pub fn translate_rule(
    rule: &AsmRule,
    attributes: &[AttributeDecl],
    rules: &[RuleDecl],
) -> Result<Statement, AsmError> {
    Translator::new(attributes, rules).rule(rule)
}

/// Translates a whole machine: one plant-step routine per named rule.
/// The caller makes `main_rule` the model's step routine.
pub fn translate_machine(
    rules: &[RuleDecl],
    main_rule: &str,
    attributes: &[AttributeDecl],
) -> Result<Vec<Routine>, AsmError> {
    if !rules.iter().any(|r| r.name == main_rule) {
        return Err(AsmError::MissingMain(main_rule.to_string()));
    }
    check_references(rules)?;
    let mut t = Translator::new(attributes, rules);
    rules
        .iter()
        .map(|decl| {
            let mut r = Routine::new(
                &decl.name,
                RoutineRole::ModelStep,
                flatten(t.rule(&decl.rule)?),
            );
            r.annotation = decl.annotation.clone();
            r.span = decl.span;
            Ok(r)
        })
        .collect()
}

fn check_references(rules: &[RuleDecl]) -> Result<(), AsmError> {
    fn refs<'r>(rule: &'r AsmRule, out: &mut Vec<&'r str>) {
        match rule {
            AsmRule::Call(n) => out.push(n),
            AsmRule::Par(cs) => cs.iter().for_each(|c| refs(c, out)),
            AsmRule::Cond {
                then_rule,
                else_rule,
                ..
            } => {
                refs(then_rule, out);
                if let Some(e) = else_rule {
                    refs(e, out);
                }
            }
            AsmRule::Update { .. } => {}
        }
    }
    let graph: BTreeMap<&str, Vec<&str>> = rules
        .iter()
        .map(|r| {
            let mut out = Vec::new();
            refs(&r.rule, &mut out);
            (r.name.as_str(), out)
        })
        .collect();
    for targets in graph.values() {
        if let Some(t) = targets.iter().find(|t| !graph.contains_key(*t)) {
            return Err(AsmError::DanglingRule(t.to_string()));
        }
    }
    // Kahn-style peeling: whatever cannot be peeled lies on a cycle.
    let mut remaining = graph.clone();
    loop {
        let leaves: Vec<&str> = remaining
            .iter()
            .filter(|(_, ts)| ts.iter().all(|t| !remaining.contains_key(t)))
            .map(|(n, _)| *n)
            .collect();
        if leaves.is_empty() {
            break;
        }
        for l in leaves {
            remaining.remove(l);
        }
    }
    match remaining.keys().next() {
        Some(n) => Err(AsmError::CyclicRule(n.to_string())),
        None => Ok(()),
    }
}

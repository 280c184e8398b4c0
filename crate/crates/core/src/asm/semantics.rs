use std::collections::BTreeMap;

use super::{translate_machine, translate_rule, AsmError, AsmRule, RuleDecl};
use crate::ir::{Frame, Model, PlantState, Value};
use crate::verifier::{enumerate_initial_states, exec_statement, Outcome, VerifyConfig};

/// One ASM step: evaluates the update set of `rule` against `state`, then
/// applies all updates at once. Equal updates of one location are merged;
/// different ones are a conflict.
pub fn apply_asm(
    rule: &AsmRule,
    rules: &[RuleDecl],
    model: &Model,
    state: &PlantState,
) -> Result<PlantState, AsmError> {
    let named: BTreeMap<&str, &AsmRule> = rules.iter().map(|r| (r.name.as_str(), &r.rule)).collect();
    let frame = Frame::enter(state.clone());
    let mut updates = BTreeMap::new();
    collect(rule, &named, &frame, &mut updates, &mut Vec::new())?;
    let mut next = state.clone();
    for (location, value) in updates {
        let decl = model
            .attribute(&location)
            .ok_or_else(|| AsmError::UnknownLocation(location.clone()))?;
        if !decl.domain.contains(&value) {
            return Err(AsmError::Domain {
                location,
                value: value.to_string(),
            });
        }
        next.set(&location, value);
    }
    Ok(next)
}

fn collect<'r>(
    rule: &'r AsmRule,
    named: &BTreeMap<&'r str, &'r AsmRule>,
    frame: &Frame,
    updates: &mut BTreeMap<String, Value>,
    expanding: &mut Vec<&'r str>,
) -> Result<(), AsmError> {
    match rule {
        AsmRule::Update {
            location,
            args,
            value,
        } => {
            if !args.is_empty() {
                return Err(AsmError::UnsupportedLocation(location.clone()));
            }
            let v = frame.eval(value).map_err(|e| AsmError::Eval(e.to_string()))?;
            match updates.get(location) {
                Some(prev) if *prev != v => return Err(AsmError::Conflict(location.clone())),
                _ => {
                    updates.insert(location.clone(), v);
                }
            }
        }
        AsmRule::Par(children) => {
            for c in children {
                collect(c, named, frame, updates, expanding)?;
            }
        }
        AsmRule::Cond {
            guard,
            then_rule,
            else_rule,
        } => match frame.eval(guard).map_err(|e| AsmError::Eval(e.to_string()))? {
            Value::Bool(true) => collect(then_rule, named, frame, updates, expanding)?,
            Value::Bool(false) => {
                if let Some(e) = else_rule {
                    collect(e, named, frame, updates, expanding)?;
                }
            }
            other => {
                return Err(AsmError::Eval(format!(
                    "guard evaluated to {} value {other}",
                    other.sort_name()
                )))
            }
        },
        AsmRule::Call(name) => {
            let (key, body) = named
                .get_key_value(name.as_str())
                .ok_or_else(|| AsmError::DanglingRule(name.clone()))?;
            if expanding.contains(key) {
                return Err(AsmError::CyclicRule(name.clone()));
            }
            expanding.push(key);
            collect(body, named, frame, updates, expanding)?;
            expanding.pop();
        }
    }
    Ok(())
}

/// A state from which the ASM step and its translation disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub initial: PlantState,
    pub asm: Result<PlantState, String>,
    pub translated: Result<PlantState, String>,
}

/// Compares `rule` with its translation from every initial state of
/// `model`. Both sides failing counts as agreement.
pub fn check_one_step(
    rule: &AsmRule,
    rules: &[RuleDecl],
    model: &Model,
    config: &VerifyConfig,
) -> Result<Vec<Mismatch>, AsmError> {
    let stmt = translate_rule(rule, &model.attributes, rules)?;
    let mut scratch = model.clone();
    if !rules.is_empty() {
        let main = rules[0].name.clone();
        for r in translate_machine(rules, &main, &model.attributes)? {
            if scratch.routine(&r.name).is_none() {
                scratch.routines.push(r);
            }
        }
    }
    let states =
        enumerate_initial_states(&scratch, config).map_err(|e| AsmError::Check(e.to_string()))?;
    let mut out = Vec::new();
    for initial in states {
        let asm = apply_asm(rule, rules, model, &initial).map_err(|e| e.to_string());
        let translated = match exec_statement(&scratch, &stmt, &initial, config) {
            Ok(Outcome::Completed { final_state, .. }) => Ok(final_state),
            Ok(other) => Err(format!("translated step ended with {}", other.kind())),
            Err(e) => Err(e.to_string()),
        };
        let agree = match (&asm, &translated) {
            (Ok(a), Ok(t)) => a == t,
            (Err(_), Err(_)) => true,
            _ => false,
        };
        if !agree {
            out.push(Mismatch {
                initial,
                asm,
                translated,
            });
        }
    }
    Ok(out)
}

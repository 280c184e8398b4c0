use std::collections::BTreeMap;

use thiserror::Error;

use super::{BinOp, Expression, PlantState, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("sort mismatch: `{op}` applied to {found}")]
    Sort { op: &'static str, found: String },
    #[error("nested `old`")]
    NestedOld,
    #[error("integer overflow")]
    Overflow,
}

/// One routine activation: the state on entry, the current state, and locals.
///
/// The entry snapshot is fixed at construction and never handed out mutably.
#[derive(Debug, Clone)]
pub struct Frame {
    entry: PlantState,
    pub current: PlantState,
    pub locals: BTreeMap<String, Value>,
}

impl Frame {
    /// Opens an activation on `current`, snapshotting it as the entry state.
    pub fn enter(current: PlantState) -> Self {
        Frame {
            entry: current.clone(),
            current,
            locals: BTreeMap::new(),
        }
    }

    pub fn entry(&self) -> &PlantState {
        &self.entry
    }

    pub fn eval(&self, expr: &Expression) -> Result<Value, EvalError> {
        eval_expr(expr, self)
    }
}

/// Evaluates `expr`: `old` subtrees against the entry snapshot, everything
/// else against the current state and locals.
pub fn eval_expr(expr: &Expression, frame: &Frame) -> Result<Value, EvalError> {
    eval_in(expr, &frame.current, Some(&frame.entry), &frame.locals)
}

fn eval_in(
    expr: &Expression,
    state: &PlantState,
    entry: Option<&PlantState>,
    locals: &BTreeMap<String, Value>,
) -> Result<Value, EvalError> {
    match expr {
        Expression::Lit(v) => Ok(v.clone()),
        Expression::Attr(name) => state
            .get(name)
            .cloned()
            .ok_or_else(|| EvalError::Unbound(name.clone())),
        Expression::Local(name) => locals
            .get(name)
            .cloned()
            .ok_or_else(|| EvalError::Unbound(name.clone())),
        Expression::Old(inner) => match entry {
            Some(snap) => eval_in(inner, snap, None, locals),
            None => Err(EvalError::NestedOld),
        },
        Expression::Not(inner) => match eval_in(inner, state, entry, locals)? {
            Value::Bool(b) => Ok(Value::Bool(!b)),
            other => Err(sort("not", &other)),
        },
        Expression::Binary(op, l, r) => {
            let lv = eval_in(l, state, entry, locals)?;
            // `and`, `or` and `implies` short-circuit.
            match (op, &lv) {
                (BinOp::And, Value::Bool(false)) => return Ok(Value::Bool(false)),
                (BinOp::Or, Value::Bool(true)) => return Ok(Value::Bool(true)),
                (BinOp::Implies, Value::Bool(false)) => return Ok(Value::Bool(true)),
                _ => {}
            }
            let rv = eval_in(r, state, entry, locals)?;
            apply_binary(*op, lv, rv)
        }
    }
}

pub(crate) fn apply_binary(op: BinOp, lv: Value, rv: Value) -> Result<Value, EvalError> {
    use Value::*;
    let out = match (op, lv, rv) {
        (BinOp::And, Bool(a), Bool(b)) => Bool(a && b),
        (BinOp::Or, Bool(a), Bool(b)) => Bool(a || b),
        (BinOp::Implies, Bool(a), Bool(b)) => Bool(!a || b),
        (BinOp::Eq, a, b) if same_sort(&a, &b) => Bool(a == b),
        (BinOp::Neq, a, b) if same_sort(&a, &b) => Bool(a != b),
        (BinOp::Lt, Int(a), Int(b)) => Bool(a < b),
        (BinOp::Le, Int(a), Int(b)) => Bool(a <= b),
        (BinOp::Gt, Int(a), Int(b)) => Bool(a > b),
        (BinOp::Ge, Int(a), Int(b)) => Bool(a >= b),
        (BinOp::Add, Int(a), Int(b)) => Int(a.checked_add(b).ok_or(EvalError::Overflow)?),
        (BinOp::Sub, Int(a), Int(b)) => Int(a.checked_sub(b).ok_or(EvalError::Overflow)?),
        (BinOp::Max, Int(a), Int(b)) => Int(a.max(b)),
        (BinOp::Min, Int(a), Int(b)) => Int(a.min(b)),
        (op, a, b) => {
            return Err(EvalError::Sort {
                op: op.symbol(),
                found: format!("{} and {}", a.sort_name(), b.sort_name()),
            })
        }
    };
    Ok(out)
}

fn same_sort(a: &Value, b: &Value) -> bool {
    std::mem::discriminant(a) == std::mem::discriminant(b)
}

fn sort(op: &'static str, v: &Value) -> EvalError {
    EvalError::Sort {
        op,
        found: v.sort_name().to_string(),
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn state(door: &str, duration: i64) -> PlantState {
        let names: Arc<[String]> = vec!["door_status".into(), "duration".into()].into();
        PlantState::new(names, vec![Value::sym(door), Value::Int(duration)])
    }

    fn frame(entry: PlantState, current: PlantState) -> Frame {
        let mut f = Frame::enter(entry);
        f.current = current;
        f
    }

    #[test]
    fn old_reads_entry_snapshot() {
        // old door_status /= closed_position and door_status = closed_position
        let e = Expression::and(
            Expression::neq(
                Expression::old(Expression::attr("door_status")),
                Expression::sym("closed_position"),
            ),
            Expression::eq(Expression::attr("door_status"), Expression::sym("closed_position")),
        );
        let f = frame(state("open_position", 0), state("closed_position", 0));
        assert_eq!(eval_expr(&e, &f), Ok(Value::Bool(true)));
    }

    #[test]
    fn elapsed_bound_is_inclusive() {
        let e = Expression::bin(BinOp::Le, Expression::elapsed(), Expression::int(25));
        let f = frame(state("open_position", 0), state("open_position", 25));
        assert_eq!(eval_expr(&e, &f), Ok(Value::Bool(true)));
        let f = frame(state("open_position", 0), state("open_position", 26));
        assert_eq!(eval_expr(&e, &f), Ok(Value::Bool(false)));
    }

    #[test]
    fn old_of_untouched_attribute_is_identity() {
        let e = Expression::eq(
            Expression::old(Expression::attr("door_status")),
            Expression::attr("door_status"),
        );
        let f = Frame::enter(state("opening_state", 7));
        assert_eq!(f.eval(&e), Ok(Value::Bool(true)));
    }

    #[test]
    fn ill_formed_expressions_are_reported() {
        let f = Frame::enter(state("open_position", 0));
        assert_eq!(
            f.eval(&Expression::attr("gear")),
            Err(EvalError::Unbound("gear".into()))
        );
        let bad = Expression::bin(BinOp::Add, Expression::attr("door_status"), Expression::int(1));
        assert!(matches!(f.eval(&bad), Err(EvalError::Sort { .. })));
        let nested = Expression::old(Expression::old(Expression::attr("duration")));
        assert_eq!(f.eval(&nested), Err(EvalError::NestedOld));
    }
}

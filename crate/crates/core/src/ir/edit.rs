use thiserror::Error;

use super::{Model, Statement, StmtKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EditError {
    #[error("no routine named `{0}`")]
    NoRoutine(String),
    #[error("routine `{routine}` has no case arm `when {value}`")]
    NoArm { routine: String, value: String },
}

/// Returns a copy of `model` where every `when value` arm of every case
/// statement in `routine` is removed.
pub fn drop_case_arm(model: &Model, routine: &str, value: &str) -> Result<Model, EditError> {
    let mut out = model.clone();
    let r = out
        .routine_mut(routine)
        .ok_or_else(|| EditError::NoRoutine(routine.to_string()))?;
    let removed = drop_in(&mut r.body, value);
    if removed == 0 {
        return Err(EditError::NoArm {
            routine: routine.to_string(),
            value: value.to_string(),
        });
    }
    Ok(out)
}

fn drop_in(body: &mut [Statement], value: &str) -> usize {
    let mut removed = 0;
    for s in body {
        match &mut s.kind {
            StmtKind::Case { arms, default, .. } => {
                let before = arms.len();
                arms.retain(|a| a.value != value);
                removed += before - arms.len();
                for a in arms.iter_mut() {
                    removed += drop_in(&mut a.body, value);
                }
                if let Some(d) = default {
                    removed += drop_in(d, value);
                }
            }
            StmtKind::If {
                branches,
                else_body,
            } => {
                for (_, b) in branches.iter_mut() {
                    removed += drop_in(b, value);
                }
                removed += drop_in(else_body, value);
            }
            StmtKind::Loop { init, body, .. } => {
                removed += drop_in(init, value);
                removed += drop_in(body, value);
            }
            StmtKind::Seq(b) => removed += drop_in(b, value),
            _ => {}
        }
    }
    removed
}

//! The landing gear system case study.
//!
//! The shipped `.req` sources are embedded at build time. The erroneous
//! variant is produced from the correct one by dropping the door-closing
//! cancellation arm of `open_door`, the same transform the CLI exposes as
//! `--inject-error`.

use std::collections::BTreeMap;

use crate::frontend::{parse_file, parse_model, SourceFile};
use crate::ir::{drop_case_arm, Model, PlantState, Value};
use crate::verifier::VerdictResult;

/// The controller with its assumption chain and six requirements.
pub const LGS_SOURCE: &str = include_str!("../models/lgs.req");

/// The same controller written as ASM rules.
pub const LGS_GROUND_SOURCE: &str = include_str!("../models/lgs_ground.req");

/// Euclid's algorithm as one parallel ASM update.
pub const GCD_SOURCE: &str = include_str!("../models/gcd.req");

/// The case arm removed by the error injection: `routine`, `when` value.
pub const INJECTED_ERROR: (&str, &str) = ("open_door", "closing_state");

/// Requirement routines, in file order.
pub const REQUIREMENTS: [&str; 6] = [
    "never_retract_with_handle_down",
    "extension_duration",
    "never_extend_with_handle_up",
    "retraction_duration",
    "keep_gear_extended_door_closed_with_handle_down",
    "keep_gear_retracted_door_closed_with_handle_up",
];

/// The requirement the erroneous model violates.
pub const BROKEN_REQUIREMENT: &str = "extension_duration";

/// The ASM rules of the ground model.
pub const GROUND_RULES: [&str; 5] = [
    "main",
    "extension_sequence",
    "retraction_sequence",
    "open_door",
    "close_door",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LgsVariant {
    Correct,
    /// `open_door` stutters when asked to open a closing door.
    Erroneous,
}

pub fn build_model(variant: LgsVariant) -> Model {
    let model = parse_model(LGS_SOURCE).expect("shipped model parses");
    match variant {
        LgsVariant::Correct => model,
        LgsVariant::Erroneous => inject_error(&model).expect("shipped model has the arm"),
    }
}

pub fn inject_error(model: &Model) -> Result<Model, crate::ir::EditError> {
    drop_case_arm(model, INJECTED_ERROR.0, INJECTED_ERROR.1)
}

/// The ground model source: ASM rules plus the routine chain.
pub fn ground_source() -> SourceFile {
    parse_file(LGS_GROUND_SOURCE).expect("shipped ground model parses")
}

pub fn gcd_source() -> SourceFile {
    parse_file(GCD_SOURCE).expect("shipped gcd model parses")
}

/// Expected result of every requirement.
pub fn golden_verdicts(variant: LgsVariant) -> BTreeMap<&'static str, VerdictResult> {
    REQUIREMENTS
        .iter()
        .map(|&r| {
            let result = match variant {
                LgsVariant::Erroneous if r == BROKEN_REQUIREMENT => VerdictResult::Fail,
                _ => VerdictResult::Pass,
            };
            (r, result)
        })
        .collect()
}

/// A plant state of the LGS model with `duration` at 0.
pub fn state(model: &Model, handle: &str, door: &str, gear: &str) -> PlantState {
    PlantState::from_pairs(
        model,
        [
            ("handle_status", Value::sym(handle)),
            ("door_status", Value::sym(door)),
            ("gear_status", Value::sym(gear)),
        ],
    )
}

/// Handle pushed down while the door closes over a retracted gear.
pub fn counterexample_state(model: &Model) -> PlantState {
    state(model, "down_position", "closing_state", "retracted_position")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{well_formed, StmtKind};
    use crate::verifier::{execute_routine, Outcome, VerifyConfig};

    #[test]
    fn shipped_models_are_well_formed() {
        assert_eq!(well_formed(&build_model(LgsVariant::Correct)), vec![]);
        assert_eq!(well_formed(&build_model(LgsVariant::Erroneous)), vec![]);
        let ground = crate::frontend::elaborate(&ground_source()).unwrap();
        assert_eq!(well_formed(&ground), vec![]);
        let gcd = crate::frontend::elaborate(&gcd_source()).unwrap();
        assert_eq!(well_formed(&gcd), vec![]);
    }

    #[test]
    fn variants_differ_in_one_arm_of_open_door() {
        let ok = build_model(LgsVariant::Correct);
        let bad = build_model(LgsVariant::Erroneous);
        let differing: Vec<&str> = ok
            .routines
            .iter()
            .zip(&bad.routines)
            .filter(|(a, b)| a != b)
            .map(|(a, _)| a.name.as_str())
            .collect();
        assert_eq!(differing, vec!["open_door"]);
        let arms = |m: &Model| match &m.routine("open_door").unwrap().body[0].kind {
            StmtKind::Case { arms, .. } => arms.iter().map(|a| a.value.clone()).collect::<Vec<_>>(),
            _ => panic!("open_door is a case"),
        };
        assert_eq!(arms(&ok).len(), arms(&bad).len() + 1);
        assert!(!arms(&bad).contains(&"closing_state".to_string()));
    }

    #[test]
    fn first_extension_step_starts_opening_the_door() {
        let m = build_model(LgsVariant::Correct);
        let init = state(&m, "down_position", "closed_position", "retracted_position");
        let out = execute_routine(&m, m.routine("main").unwrap(), &init, &VerifyConfig::default())
            .unwrap();
        let expected = state(&m, "down_position", "opening_state", "retracted_position");
        assert_eq!(out.final_state(), Some(&expected));
        assert!(matches!(out, Outcome::Completed { .. }));
    }
}

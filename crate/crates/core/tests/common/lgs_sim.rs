//! A hand-written simulator of the landing gear controller.

use reqcheck_core::ir::{Model, PlantState, Value};

pub const HANDLE: [&str; 2] = ["up_position", "down_position"];
pub const DOOR: [&str; 4] = ["closed_position", "opening_state", "open_position", "closing_state"];
pub const GEAR: [&str; 4] = [
    "extended_position",
    "extending_state",
    "retracted_position",
    "retracting_state",
];

pub const DOOR_OPEN_TIME: i64 = 12;
pub const GEAR_EXTEND_TIME: i64 = 5;
pub const GEAR_RETRACT_TIME: i64 = 10;
pub const DOOR_CLOSE_TIME: i64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sim {
    pub handle: &'static str,
    pub door: &'static str,
    pub gear: &'static str,
    pub duration: i64,
}

impl Sim {
    pub fn new(handle: &'static str, door: &'static str, gear: &'static str) -> Self {
        Sim {
            handle,
            door,
            gear,
            duration: 0,
        }
    }

    /// Every valuation of the three plant attributes.
    pub fn all() -> Vec<Sim> {
        let mut out = Vec::new();
        for h in HANDLE {
            for d in DOOR {
                for g in GEAR {
                    out.push(Sim::new(h, d, g));
                }
            }
        }
        out
    }

    /// The normal-mode invariant the assumption chain imposes.
    pub fn is_normal(&self) -> bool {
        let moving = self.gear == "extending_state" || self.gear == "retracting_state";
        let settled = self.gear == "extended_position" || self.gear == "retracted_position";
        (!moving || self.door == "open_position") && (self.door != "closed_position" || settled)
    }

    /// One controller step without timing.
    pub fn step(&self, erroneous: bool) -> Sim {
        let mut next = *self;
        if self.handle == "down_position" {
            if self.gear != "extended_position" {
                if self.door == "open_position" {
                    next.gear = match self.gear {
                        "retracted_position" => "extending_state",
                        "extending_state" => "extended_position",
                        "retracting_state" => "extending_state",
                        g => g,
                    };
                } else {
                    next.door = match self.door {
                        "closed_position" => "opening_state",
                        "opening_state" => "open_position",
                        "closing_state" if !erroneous => "opening_state",
                        d => d,
                    };
                }
            } else {
                next.door = close(self.door);
            }
        } else if self.gear != "retracted_position" {
            if self.door == "open_position" {
                next.gear = match self.gear {
                    "extended_position" => "retracting_state",
                    "retracting_state" => "retracted_position",
                    "extending_state" => "retracting_state",
                    g => g,
                };
            } else {
                next.door = match self.door {
                    "closed_position" | "closing_state" => "opening_state",
                    "opening_state" => "open_position",
                    d => d,
                };
            }
        } else {
            next.door = close(self.door);
        }
        next
    }

    /// One step with the duration charged for every completed movement.
    pub fn timed_step(&self, erroneous: bool) -> Sim {
        let mut next = self.step(erroneous);
        next.duration += charge(self, &next);
        next
    }

    pub fn to_state(&self, model: &Model) -> PlantState {
        PlantState::from_pairs(
            model,
            [
                ("handle_status", Value::sym(self.handle)),
                ("door_status", Value::sym(self.door)),
                ("gear_status", Value::sym(self.gear)),
                ("duration", Value::Int(self.duration)),
            ],
        )
    }

    pub fn from_state(state: &PlantState) -> Sim {
        let pick = |name: &str, among: &[&'static str]| -> &'static str {
            match state.get(name) {
                Some(Value::Sym(s)) => among.iter().find(|c| **c == s).copied().expect("known value"),
                other => panic!("{name} = {other:?}"),
            }
        };
        Sim {
            handle: pick("handle_status", &HANDLE),
            door: pick("door_status", &DOOR),
            gear: pick("gear_status", &GEAR),
            duration: state.get("duration").and_then(Value::as_int).expect("duration"),
        }
    }
}

/// Time charged for the movements completed between `before` and `after`.
pub fn charge(before: &Sim, after: &Sim) -> i64 {
    let mut t = 0;
    if before.door != "closed_position" && after.door == "closed_position" {
        t += DOOR_CLOSE_TIME;
    }
    if before.door != "open_position" && after.door == "open_position" {
        t += DOOR_OPEN_TIME;
    }
    if before.gear != "retracted_position" && after.gear == "retracted_position" {
        t += GEAR_RETRACT_TIME;
    }
    if before.gear != "extended_position" && after.gear == "extended_position" {
        t += GEAR_EXTEND_TIME;
    }
    t
}

fn close(door: &'static str) -> &'static str {
    match door {
        "open_position" | "opening_state" => "closing_state",
        "closing_state" => "closed_position",
        d => d,
    }
}

//! Parsing and printing of the shipped models.

mod common;

use common::shipped;
use reqcheck_core::frontend::{
    elaborate, parse_expression, parse_file, parse_model, print_file, print_model, print_routine,
};
use reqcheck_core::ir::{Span, Statement};
use reqcheck_core::lgs::{build_model, LgsVariant, LGS_SOURCE};
use reqcheck_core::patterns::{recognize, synth_unchecked};

const SHIPPED: [&str; 3] = ["lgs.req", "lgs_ground.req", "gcd.req"];

#[test]
fn shipped_files_round_trip() {
    for name in SHIPPED {
        let text = shipped(name);
        let file = parse_file(&text).unwrap();
        let printed = print_file(&file);
        let again = parse_file(&printed).unwrap();
        assert_eq!(again, file, "{name}");
        assert_eq!(print_file(&again), printed, "{name}");
        assert_eq!(elaborate(&again).unwrap(), elaborate(&file).unwrap(), "{name}");
    }
}

#[test]
fn the_embedded_model_is_the_shipped_file() {
    assert_eq!(LGS_SOURCE, shipped("lgs.req"));
    assert_eq!(parse_model(LGS_SOURCE).unwrap(), build_model(LgsVariant::Correct));
}

#[test]
fn printed_models_reparse_to_themselves() {
    for variant in [LgsVariant::Correct, LgsVariant::Erroneous] {
        let m = build_model(variant);
        let text = print_model(&m);
        assert_eq!(parse_model(&text).unwrap(), m);
    }
}

#[test]
fn synthesized_routines_round_trip() {
    let m = build_model(LgsVariant::Correct);
    let mut count = 0;
    for r in &m.routines {
        let Some(instance) = recognize(r) else { continue };
        let routine = synth_unchecked(&instance).unwrap();
        let text = format!("{}\n{}", print_model(&m), print_routine(&routine).replace(
            &format!("routine {} ", routine.name),
            &format!("routine {}_copy ", routine.name),
        ));
        let again = parse_model(&text).unwrap();
        let mut copy = again.routine(&format!("{}_copy", routine.name)).unwrap().clone();
        copy.name = routine.name.clone();
        assert_eq!(copy, routine);
        count += 1;
    }
    assert_eq!(count, 15);
}

#[test]
fn spans_point_into_the_source() {
    let text = shipped("lgs.req");
    let lines: Vec<&str> = text.lines().collect();
    let m = parse_model(&text).unwrap();
    let within = |span: Span, what: &str| {
        assert!(!span.is_generated(), "{what} has no position");
        let line = lines[span.line as usize - 1];
        let start = span.column as usize - 1;
        assert!(start + span.length as usize <= line.len(), "{what} at {span}");
    };
    for r in &m.routines {
        within(r.span, &r.name);
        let mut stmts: Vec<&Statement> = Vec::new();
        r.walk(&mut |s| stmts.push(s));
        for s in stmts {
            within(s.span, &s.summary());
        }
    }
    // statements start with their keyword or target
    let open_door = m.routine("open_door").unwrap();
    let case = &open_door.body[0];
    assert!(lines[case.span.line as usize - 1][case.span.column as usize - 1..].starts_with("case"));
}

#[test]
fn errors_carry_positions() {
    let cases = [
        ("model m\nattribute a : 0 .. 3\nroutine main do\n    a := \nend\n", (5, 1)),
        ("model m\nattribute a : {x, y}\nroutine main do\n    a := (x\nend\n", (5, 1)),
        ("model m\nattribute a : 0 .. 3\nroutine main do\n    case a\n    end\nend\n", (5, 5)),
        ("model m\nattribute : 0 .. 3\n", (2, 11)),
        ("model m\nattribute a : 0 .. 3\nroutine main do\n    a := 1 $ 2\nend\n", (4, 12)),
    ];
    for (text, (line, column)) in cases {
        let e = parse_model(text).unwrap_err();
        assert_eq!((e.line, e.column), (line, column), "{text:?}: {e}");
        assert!(e.to_string().starts_with(&format!("{line}:{column}: ")));
    }
}

#[test]
fn unknown_names_are_rejected_on_elaboration() {
    let text = "model m\nattribute a : 0 .. 3\nroutine main do\nend\npattern p : p2\n    inner nowhere\n    prop a = 1\nend\n";
    let e = parse_model(text).unwrap_err();
    assert_eq!((e.line, e.column), (5, 1));
    assert!(e.message.contains("nowhere"), "{e}");
}

#[test]
fn expressions_print_as_they_parse() {
    let m = build_model(LgsVariant::Correct);
    for text in [
        "gear_status = extended_position and door_status = closed_position",
        "(gear_status = extending_state or gear_status = retracting_state) implies door_status = open_position",
        "duration - old duration <= 25",
        "not (door_status = open_position)",
    ] {
        let e = parse_expression(text, &m).unwrap();
        assert_eq!(parse_expression(&e.to_string(), &m).unwrap(), e, "{text}");
    }
}

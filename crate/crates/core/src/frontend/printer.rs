use std::fmt::Write;

use crate::asm::{AsmRule, RuleDecl};
use crate::ir::{AttrKind, Model, Routine, RoutineRole, Statement, StmtKind};
use crate::patterns::{PatternInstance, Scheme};

use super::SourceFile;

const INDENT: &str = "    ";

/// Renders a model in `.req` syntax.
pub fn print_model(model: &Model) -> String {
    let mut out = String::new();
    header(&mut out, model);
    for r in &model.routines {
        out.push('\n');
        out.push_str(&print_routine(r));
    }
    out
}

/// Renders a whole source file: the model, then rules, then patterns.
pub fn print_file(file: &SourceFile) -> String {
    let mut out = print_model(&file.model);
    for r in &file.rules {
        out.push('\n');
        out.push_str(&print_rule_decl(r));
    }
    for p in &file.patterns {
        out.push('\n');
        out.push_str(&print_pattern(p));
    }
    out
}

fn header(out: &mut String, model: &Model) {
    let _ = writeln!(out, "model {}", model.name);
    out.push('\n');
    for a in &model.attributes {
        let prefix = match a.kind {
            AttrKind::Environment => "env ",
            AttrKind::Ghost => "ghost ",
            AttrKind::Machine => "",
        };
        let _ = writeln!(out, "{prefix}attribute {} : {}", a.name, a.domain);
    }
    out.push('\n');
    let _ = writeln!(out, "step {}", model.step);
}

fn comments(out: &mut String, lines: &[String], depth: usize) {
    for l in lines {
        indent(out, depth);
        if l.is_empty() {
            out.push_str("--\n");
        } else {
            let _ = writeln!(out, "-- {l}");
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

pub fn print_routine(r: &Routine) -> String {
    let mut out = String::new();
    comments(&mut out, &r.annotation, 0);
    let role = match r.role {
        RoutineRole::Requirement => " requirement",
        RoutineRole::Assumption => " assumption",
        RoutineRole::ModelStep => "",
    };
    let _ = writeln!(out, "routine {}{role} do", r.name);
    block(&mut out, &r.body, 1);
    out.push_str("end\n");
    out
}

pub fn print_statement(s: &Statement) -> String {
    let mut out = String::new();
    statement(&mut out, s, 0);
    out
}

fn block(out: &mut String, body: &[Statement], depth: usize) {
    for s in body {
        statement(out, s, depth);
    }
}

fn line(out: &mut String, depth: usize, text: std::fmt::Arguments<'_>) {
    indent(out, depth);
    let _ = out.write_fmt(text);
    out.push('\n');
}

fn statement(out: &mut String, s: &Statement, depth: usize) {
    if let StmtKind::Seq(body) = &s.kind {
        block(out, body, depth);
        return;
    }
    comments(out, &s.annotation, depth);
    match &s.kind {
        StmtKind::Assign { target, value } => line(out, depth, format_args!("{target} := {value}")),
        StmtKind::LocalAssign { name, value } => line(out, depth, format_args!("{name} := {value}")),
        StmtKind::Assume(e) => line(out, depth, format_args!("assume {e} end")),
        StmtKind::Assert(e) => line(out, depth, format_args!("assert {e} end")),
        StmtKind::Call(name) => line(out, depth, format_args!("{name}")),
        StmtKind::LocalDecl { name, domain } => {
            line(out, depth, format_args!("local {name} : {domain}"))
        }
        StmtKind::If {
            branches,
            else_body,
        } => {
            for (i, (guard, body)) in branches.iter().enumerate() {
                let kw = if i == 0 { "if" } else { "elseif" };
                line(out, depth, format_args!("{kw} {guard} then"));
                block(out, body, depth + 1);
            }
            if !else_body.is_empty() {
                line(out, depth, format_args!("else"));
                block(out, else_body, depth + 1);
            }
            line(out, depth, format_args!("end"));
        }
        StmtKind::Case {
            scrutinee,
            arms,
            default,
        } => {
            line(out, depth, format_args!("case {scrutinee}"));
            for arm in arms {
                line(out, depth, format_args!("when {} then", arm.value));
                block(out, &arm.body, depth + 1);
            }
            if let Some(d) = default {
                line(out, depth, format_args!("else"));
                block(out, d, depth + 1);
            }
            line(out, depth, format_args!("end"));
        }
        StmtKind::Loop { init, exit, body } => {
            line(out, depth, format_args!("from"));
            block(out, init, depth + 1);
            line(out, depth, format_args!("until"));
            line(out, depth + 1, format_args!("{exit}"));
            line(out, depth, format_args!("loop"));
            block(out, body, depth + 1);
            line(out, depth, format_args!("end"));
        }
        StmtKind::Seq(_) => unreachable!(),
    }
}

pub fn print_rule_decl(r: &RuleDecl) -> String {
    let mut out = String::new();
    comments(&mut out, &r.annotation, 0);
    let _ = writeln!(out, "rule {} =", r.name);
    rule(&mut out, &r.rule, 1);
    out
}

fn rule(out: &mut String, r: &AsmRule, depth: usize) {
    match r {
        AsmRule::Update {
            location,
            args,
            value,
        } => {
            if args.is_empty() {
                line(out, depth, format_args!("{location} := {value}"));
            } else {
                let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                line(out, depth, format_args!("{location}({}) := {value}", args.join(", ")));
            }
        }
        AsmRule::Par(children) if children.is_empty() => line(out, depth, format_args!("skip")),
        AsmRule::Par(children) => {
            line(out, depth, format_args!("par"));
            for c in children {
                rule(out, c, depth + 1);
            }
            line(out, depth, format_args!("end"));
        }
        AsmRule::Cond {
            guard,
            then_rule,
            else_rule,
        } => {
            line(out, depth, format_args!("if {guard} then"));
            rule(out, then_rule, depth + 1);
            if let Some(e) = else_rule {
                line(out, depth, format_args!("else"));
                rule(out, e, depth + 1);
            }
            line(out, depth, format_args!("end"));
        }
        AsmRule::Call(name) => line(out, depth, format_args!("{name}")),
    }
}

pub fn print_pattern(p: &PatternInstance) -> String {
    let mut out = String::new();
    comments(&mut out, &p.annotation, 0);
    let _ = writeln!(out, "pattern {} : {}", p.name, p.pattern());
    line(&mut out, 1, format_args!("inner {}", p.inner));
    match &p.scheme {
        Scheme::AssumeCondition { conditions } => {
            for c in conditions {
                comments(&mut out, &c.annotation, 1);
                line(&mut out, 1, format_args!("cond {}", c.expr));
            }
        }
        Scheme::ImmediateProperty { property } => {
            line(&mut out, 1, format_args!("prop {property}"))
        }
        Scheme::TimedTransition { property, time } | Scheme::BoundedResponse { property, time } => {
            line(&mut out, 1, format_args!("prop {property}"));
            line(&mut out, 1, format_args!("time {time}"));
        }
    }
    out.push_str("end\n");
    out
}

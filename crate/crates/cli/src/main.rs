//! `reqcheck`: check requirements of `.req` models, synthesize requirement
//! routines from patterns, and translate ASM rules.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use reqcheck_core::asm::{check_one_step, translate_machine};
use reqcheck_core::frontend::{parse_expression, parse_file, parse_model, print_routine, ParseError};
use reqcheck_core::ir::{drop_case_arm, Model};
use reqcheck_core::lgs::INJECTED_ERROR;
use reqcheck_core::patterns::{
    default_annotation, synth, synth_unchecked, Condition, Pattern, PatternInstance, Scheme,
};
use reqcheck_core::verifier::{
    check_requirement, Outcome, Verdict, VerdictReport, VerdictResult, VerifyConfig,
};

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "reqcheck", version, about = "Verify contracted requirements of finite-state plant models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the requirement routines of a `.req` file.
    Check(CheckArgs),
    /// Print the routine a requirement pattern produces.
    Synth(SynthArgs),
    /// Translate the ASM rules of a `.req` file into routines.
    TranslateAsm(TranslateArgs),
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    /// Only check this requirement (repeatable).
    #[arg(long = "requirement", value_name = "NAME")]
    requirements: Vec<String>,
    /// Maximum passes through each loop.
    #[arg(long, env = "REQCHECK_UNROLL", default_value_t = 64)]
    unroll: u32,
    /// Drop the `closing_state` arm of `open_door` before checking.
    #[arg(long)]
    inject_error: bool,
    /// Drop a case arm, given as `routine:value`, before checking (repeatable).
    #[arg(long, value_name = "ROUTINE:VALUE")]
    drop_case_arm: Vec<String>,
    #[arg(long)]
    json: bool,
    /// Include full counterexample traces.
    #[arg(long)]
    trace: bool,
    #[arg(long, default_value_t = 3)]
    max_counterexamples: usize,
}

#[derive(Args)]
struct SynthArgs {
    /// p1, p2, p3 or p4.
    pattern: String,
    #[arg(long)]
    name: String,
    /// Property (p2, p3, p4).
    #[arg(long)]
    prop: Option<String>,
    /// Assumed condition (p1, repeatable).
    #[arg(long = "cond")]
    conds: Vec<String>,
    /// Time bound (p3, p4).
    #[arg(long)]
    time: Option<u32>,
    /// The wrapped routine.
    #[arg(long)]
    inner: String,
    /// Resolve names and check the result against this model.
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args)]
struct TranslateArgs {
    file: PathBuf,
    /// The main rule; defaults to the model's step.
    #[arg(long)]
    main: Option<String>,
    /// Compare every rule with its translation over all states.
    #[arg(long)]
    check_oracle: bool,
}

/// A failure that ends the run with the error status.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_ERROR,
            });
        }
    };
    let result = match cli.command {
        Command::Check(args) => check(args),
        Command::Synth(args) => synth_cmd(args),
        Command::TranslateAsm(args) => translate(args),
    };
    match result {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn located(path: &Path, e: ParseError) -> Failure {
    Failure(format!("{}:{e}", path.display()))
}

fn check(args: CheckArgs) -> Result<(String, u8), Failure> {
    let text = read(&args.file)?;
    let mut model = parse_model(&text).map_err(|e| located(&args.file, e))?;
    let mut drops: Vec<(String, String)> = Vec::new();
    if args.inject_error {
        drops.push((INJECTED_ERROR.0.into(), INJECTED_ERROR.1.into()));
    }
    for spec in &args.drop_case_arm {
        let (routine, value) = spec
            .split_once(':')
            .ok_or_else(|| Failure(format!("`{spec}` is not of the form routine:value")))?;
        drops.push((routine.into(), value.into()));
    }
    for (routine, value) in &drops {
        model = drop_case_arm(&model, routine, value)?;
    }

    let names: Vec<String> = if args.requirements.is_empty() {
        model.requirements().map(|r| r.name.clone()).collect()
    } else {
        args.requirements.clone()
    };
    let config = VerifyConfig::with_unroll(args.unroll);
    let mut verdicts = Vec::new();
    for name in &names {
        let routine = model
            .routine(name)
            .ok_or_else(|| Failure(format!("no routine named `{name}`")))?;
        verdicts.push(check_requirement(&model, routine, &config)?);
    }

    let out = if args.json {
        let reports: Vec<VerdictReport> = verdicts
            .iter()
            .map(|v| VerdictReport::new(v, args.max_counterexamples, args.trace))
            .collect();
        serde_json::to_string_pretty(&reports)? + "\n"
    } else {
        table(&verdicts, args.max_counterexamples, args.trace)
    };
    let has = |r| verdicts.iter().any(|v| v.result == r);
    let code = if has(VerdictResult::Fail) {
        EXIT_FAIL
    } else if has(VerdictResult::Unknown) {
        EXIT_UNKNOWN
    } else {
        EXIT_PASS
    };
    Ok((out, code))
}

fn table(verdicts: &[Verdict], max_counterexamples: usize, with_trace: bool) -> String {
    let width = verdicts
        .iter()
        .map(|v| v.requirement.len())
        .max()
        .unwrap_or(0)
        .max("requirement".len());
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:<7}  {:>6}  {:>11}", "requirement", "result", "states", "worst delta");
    for v in verdicts {
        let delta = v
            .stats
            .max_duration_delta
            .map_or("-".to_string(), |d| d.to_string());
        let _ = writeln!(
            out,
            "{:<width$}  {:<7}  {:>6}  {:>11}",
            v.requirement,
            v.result.as_str().to_uppercase(),
            v.stats.states_explored,
            delta
        );
        for (init, outcome) in v.counterexamples().take(max_counterexamples) {
            let _ = writeln!(out, "    {}: from [{init}]", outcome.kind());
            match outcome {
                Outcome::AssertFailed { at, .. } => {
                    let _ = writeln!(out, "        fails at {at}");
                }
                Outcome::Diverged { repeated_state, .. } => {
                    let _ = writeln!(out, "        loop repeats [{repeated_state}]");
                }
                _ => {}
            }
            if with_trace {
                for step in outcome.trace() {
                    let _ = writeln!(
                        out,
                        "        {} {}: {}  => [{}]",
                        step.site.span, step.site.routine, step.site.statement, step.after
                    );
                }
            }
        }
    }
    out
}

fn synth_cmd(args: SynthArgs) -> Result<(String, u8), Failure> {
    let pattern = Pattern::parse(&args.pattern)
        .ok_or_else(|| Failure(format!("unknown pattern `{}`; expected p1, p2, p3 or p4", args.pattern)))?;
    let model = match &args.model {
        Some(path) => Some(parse_model(&read(path)?).map_err(|e| located(path, e))?),
        None => None,
    };
    let scope = model.clone().unwrap_or_else(|| Model::new("scratch"));
    let expr = |text: &str| {
        parse_expression(text, &scope).map_err(|e| Failure(format!("in `{text}`: {e}")))
    };
    if pattern.is_timed() != args.time.is_some() {
        return Err(Failure(match pattern.is_timed() {
            true => format!("{pattern} needs --time"),
            false => format!("{pattern} takes no --time"),
        }));
    }
    if pattern == Pattern::P1 && args.prop.is_some() {
        return Err(Failure("p1 takes --cond, not --prop".into()));
    }
    if pattern != Pattern::P1 && !args.conds.is_empty() {
        return Err(Failure(format!("{pattern} takes --prop, not --cond")));
    }
    let property = || -> Result<_, Failure> {
        expr(args.prop.as_deref().ok_or_else(|| Failure(format!("{pattern} needs --prop")))?)
    };
    let scheme = match pattern {
        Pattern::P1 => Scheme::AssumeCondition {
            conditions: args
                .conds
                .iter()
                .map(|c| expr(c).map(Condition::from))
                .collect::<Result<_, _>>()?,
        },
        Pattern::P2 => Scheme::ImmediateProperty {
            property: property()?,
        },
        Pattern::P3 => Scheme::TimedTransition {
            property: property()?,
            time: args.time.unwrap_or_default(),
        },
        Pattern::P4 => Scheme::BoundedResponse {
            property: property()?,
            time: args.time.unwrap_or_default(),
        },
    };
    let instance = PatternInstance {
        annotation: default_annotation(&args.name, &scheme),
        name: args.name,
        scheme,
        inner: args.inner,
    };
    let routine = match &model {
        Some(m) => synth(&instance, m)?,
        None => synth_unchecked(&instance)?,
    };
    Ok((print_routine(&routine), EXIT_PASS))
}

fn translate(args: TranslateArgs) -> Result<(String, u8), Failure> {
    let text = read(&args.file)?;
    let file = parse_file(&text).map_err(|e| located(&args.file, e))?;
    if file.rules.is_empty() {
        return Err(Failure(format!("{}: no rules to translate", args.file.display())));
    }
    let main = args.main.unwrap_or_else(|| file.model.step.clone());
    let routines = translate_machine(&file.rules, &main, &file.model.attributes)?;
    let mut out = routines
        .iter()
        .map(print_routine)
        .collect::<Vec<_>>()
        .join("\n");
    let mut code = EXIT_PASS;
    if args.check_oracle {
        let config = VerifyConfig::default();
        out.push('\n');
        for decl in &file.rules {
            let mismatches = check_one_step(&decl.rule, &file.rules, &file.model, &config)?;
            if mismatches.is_empty() {
                let _ = writeln!(out, "-- oracle: rule {} agrees with its translation", decl.name);
            } else {
                code = EXIT_FAIL;
                let _ = writeln!(out, "-- oracle: rule {} disagrees from {} states", decl.name, mismatches.len());
                for m in mismatches.iter().take(3) {
                    let _ = writeln!(out, "--   from [{}]: asm {:?}, translated {:?}", m.initial, m.asm, m.translated);
                }
            }
        }
    }
    Ok((out, code))
}

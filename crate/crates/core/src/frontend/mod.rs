//! The `.req` text format: parsing and pretty-printing.
//!
//! A file declares one model: attributes, an optional `step` routine name,
//! routines, and optionally ASM rules and pattern instances. Rules and
//! patterns are turned into ordinary routines by [`elaborate`].
//!
//! ```text
//! model door
//! env attribute handle_status : {up_position, down_position}
//! attribute door_status : {closed_position, open_position}
//!
//! -- Handle down only.
//! routine run_with_handle_down assumption do
//!     assume handle_status = down_position end
//!     main
//! end
//! ```

mod lexer;
mod parser;
mod printer;

pub use printer::{
    print_file, print_model, print_pattern, print_routine, print_rule_decl, print_statement,
};

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::asm::{translate_machine, RuleDecl};
use crate::ir::{Expression, Model, Span};
use crate::patterns::{synth, PatternInstance};

use parser::Parser;

/// A parse or elaboration error with its 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub length: u32,
    pub message: String,
}

impl ParseError {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        ParseError {
            line: span.line,
            column: span.column,
            length: span.length,
            message: message.into(),
        }
    }

    pub fn span(&self) -> Span {
        Span::new(self.line, self.column, self.length)
    }
}

/// A parsed file before elaboration.
#[derive(Debug, Clone)]
pub struct SourceFile {
    pub model: Model,
    pub rules: Vec<RuleDecl>,
    pub patterns: Vec<PatternInstance>,
    /// Position of each `pattern` keyword.
    pub pattern_spans: Vec<Span>,
}

impl PartialEq for SourceFile {
    fn eq(&self, other: &Self) -> bool {
        self.model == other.model && self.rules == other.rules && self.patterns == other.patterns
    }
}

impl fmt::Display for SourceFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_file(self))
    }
}

pub fn parse_file(text: &str) -> Result<SourceFile, ParseError> {
    Parser::new(text)?.source_file()
}

/// Parses and elaborates a file into a model.
pub fn parse_model(text: &str) -> Result<Model, ParseError> {
    elaborate(&parse_file(text)?)
}

/// Parses a standalone expression, resolving names against `model`.
pub fn parse_expression(text: &str, model: &Model) -> Result<Expression, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.expression()?;
    p.expect_eof()?;
    Ok(parser::resolve_expr(
        &e,
        &HashSet::new(),
        &parser::model_names(&model.attributes),
    ))
}

/// Adds one plant-step routine per ASM rule (the rule named like the
/// model's step becomes the step) and one routine per pattern instance.
pub fn elaborate(file: &SourceFile) -> Result<Model, ParseError> {
    let mut model = file.model.clone();
    if let Some(first) = file.rules.first() {
        let routines = translate_machine(&file.rules, &model.step, &model.attributes)
            .map_err(|e| ParseError::new(first.span, e.to_string()))?;
        for (r, decl) in routines.into_iter().zip(&file.rules) {
            if model.routine(&r.name).is_some() {
                return Err(ParseError::new(
                    decl.span,
                    format!("rule `{}` clashes with a routine of the same name", r.name),
                ));
            }
            model.routines.push(r);
        }
    }
    for (p, span) in file.patterns.iter().zip(&file.pattern_spans) {
        if model.routine(&p.name).is_some() {
            return Err(ParseError::new(
                *span,
                format!("pattern `{}` clashes with a routine of the same name", p.name),
            ));
        }
        let mut r = synth(p, &model).map_err(|e| ParseError::new(*span, e.to_string()))?;
        r.span = *span;
        model.routines.push(r);
    }
    Ok(model)
}

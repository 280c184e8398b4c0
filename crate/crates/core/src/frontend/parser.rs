use std::collections::HashSet;

use crate::asm::{AsmRule, RuleDecl};
use crate::ir::{
    AttrKind, AttributeDecl, BinOp, CaseArm, Domain, Expression, Model, Routine, RoutineRole,
    Span, Statement, StmtKind, Value, DEFAULT_DURATION_CAP, DURATION,
};
use crate::patterns::{Condition, Pattern, PatternInstance, Scheme};

use super::lexer::{lex, Tok, Token};
use super::{ParseError, SourceFile};

/// Words that can never be identifiers.
const RESERVED: &[&str] = &[
    "model", "attribute", "env", "ghost", "routine", "rule", "pattern", "do", "end", "assume",
    "assert", "check", "if", "then", "elseif", "else", "case", "when", "from", "until", "loop",
    "local", "and", "or", "not", "implies", "old", "True", "False", "true", "false", "max", "min",
    "par", "skip",
];

/// Keywords that start a top-level declaration.
const ITEM_START: &[&str] = &["attribute", "env", "ghost", "routine", "rule", "pattern", "model"];

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(&self.peek().tok, Tok::Punct(s) if *s == p)
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::new(self.peek().span, message))
    }

    fn found(&self) -> String {
        match &self.peek().tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<Token, ParseError> {
        if self.is_kw(kw) {
            Ok(self.bump())
        } else {
            self.error(format!("expected `{kw}`, found {}", self.found()))
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<Token, ParseError> {
        if self.is_punct(p) {
            Ok(self.bump())
        } else {
            self.error(format!("expected `{p}`, found {}", self.found()))
        }
    }

    /// Expects the `end` closing a construct opened at `opener`.
    fn close(&mut self, opener: &Token) -> Result<(), ParseError> {
        if self.is_kw("end") {
            self.bump();
            Ok(())
        } else if self.at_eof() || self.at_item_start() {
            Err(unclosed(opener))
        } else {
            self.error(format!("expected `end`, found {}", self.found()))
        }
    }

    fn at_item_start(&self) -> bool {
        ITEM_START.iter().any(|k| self.is_kw(k))
    }

    fn ident(&mut self) -> Result<(String, Span), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                let t = self.bump();
                let Tok::Ident(s) = t.tok else { unreachable!() };
                Ok((s, t.span))
            }
            _ => self.error(format!("expected an identifier, found {}", self.found())),
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let negative = self.is_punct("-");
        if negative {
            self.bump();
        }
        match self.peek().tok {
            Tok::Int(i) => {
                self.bump();
                Ok(if negative { -i } else { i })
            }
            _ => self.error(format!("expected an integer, found {}", self.found())),
        }
    }

    // ---- declarations ----

    pub fn source_file(&mut self) -> Result<SourceFile, ParseError> {
        self.expect_kw("model")?;
        let (name, _) = self.ident()?;
        let mut model = Model::new(name);
        model.attributes.clear();
        let mut rules = Vec::new();
        let mut patterns = Vec::new();
        let mut pattern_spans = Vec::new();
        while !self.at_eof() {
            if self.is_kw("env") || self.is_kw("ghost") || self.is_kw("attribute") {
                model.attributes.push(self.attribute()?);
            } else if self.is_kw("step") {
                self.bump();
                model.step = self.ident()?.0;
            } else if self.is_kw("routine") {
                model.routines.push(self.routine()?);
            } else if self.is_kw("rule") {
                rules.push(self.rule_decl()?);
            } else if self.is_kw("pattern") {
                let span = self.peek().span;
                patterns.push(self.pattern()?);
                pattern_spans.push(span);
            } else {
                return self.error(format!("expected a declaration, found {}", self.found()));
            }
            if self.is_punct(";") {
                self.bump();
            }
        }
        if model.attribute(DURATION).is_none() {
            model
                .attributes
                .push(AttributeDecl::duration(DEFAULT_DURATION_CAP));
        }
        for r in &mut model.routines {
            resolve_routine(r, &model_names(&model.attributes));
        }
        let names = model_names(&model.attributes);
        for d in &mut rules {
            resolve_rule(&mut d.rule, &names);
        }
        for p in &mut patterns {
            resolve_pattern(p, &names);
        }
        Ok(SourceFile {
            model,
            rules,
            patterns,
            pattern_spans,
        })
    }

    fn attribute(&mut self) -> Result<AttributeDecl, ParseError> {
        let kind = if self.is_kw("env") {
            self.bump();
            AttrKind::Environment
        } else if self.is_kw("ghost") {
            self.bump();
            AttrKind::Ghost
        } else {
            AttrKind::Machine
        };
        self.expect_kw("attribute")?;
        let (name, span) = self.ident()?;
        self.expect_punct(":")?;
        let domain = self.domain()?;
        let mut decl = AttributeDecl::new(name, domain, kind);
        decl.span = span;
        Ok(decl)
    }

    fn domain(&mut self) -> Result<Domain, ParseError> {
        if self.is_punct("{") {
            self.bump();
            let mut values = vec![self.ident()?.0];
            while self.is_punct(",") {
                self.bump();
                values.push(self.ident()?.0);
            }
            self.expect_punct("}")?;
            Ok(Domain::Symbolic(values))
        } else {
            let lo = self.int()?;
            self.expect_punct("..")?;
            let hi = self.int()?;
            Ok(Domain::Integer { lo, hi })
        }
    }

    fn routine(&mut self) -> Result<Routine, ParseError> {
        let head = self.expect_kw("routine")?;
        let mut annotation = head.comments.clone();
        annotation.extend(self.peek().comments.iter().cloned());
        let (name, _) = self.ident()?;
        let role = if self.is_kw("requirement") || self.is_kw("assumption") {
            annotation.extend(self.peek().comments.iter().cloned());
            let t = self.bump();
            match t.tok {
                Tok::Ident(s) if s == "requirement" => RoutineRole::Requirement,
                _ => RoutineRole::Assumption,
            }
        } else {
            RoutineRole::ModelStep
        };
        annotation.extend(self.peek().comments.iter().cloned());
        let open = self.expect_kw("do")?;
        let body = self.block(&["end"], &open)?;
        self.close(&open)?;
        Ok(Routine {
            name,
            annotation,
            role,
            body,
            span: head.span,
        })
    }

    fn rule_decl(&mut self) -> Result<RuleDecl, ParseError> {
        let head = self.expect_kw("rule")?;
        let (name, _) = self.ident()?;
        self.expect_punct("=")?;
        let rule = self.rule()?;
        Ok(RuleDecl {
            name,
            rule,
            annotation: head.comments,
            span: head.span,
        })
    }

    fn rule(&mut self) -> Result<AsmRule, ParseError> {
        if self.is_kw("par") {
            let open = self.bump();
            let mut children = Vec::new();
            while !self.is_kw("end") {
                if self.at_eof() || self.at_item_start() {
                    return Err(unclosed(&open));
                }
                children.push(self.rule()?);
            }
            self.bump();
            Ok(AsmRule::Par(children))
        } else if self.is_kw("skip") {
            self.bump();
            Ok(AsmRule::skip())
        } else if self.is_kw("if") {
            let open = self.bump();
            let guard = self.expression()?;
            self.expect_kw("then")?;
            let then_rule = self.rule()?;
            let else_rule = if self.is_kw("else") {
                self.bump();
                Some(self.rule()?)
            } else {
                None
            };
            self.close(&open)?;
            Ok(AsmRule::cond(guard, then_rule, else_rule))
        } else {
            let (name, _) = self.ident()?;
            let args = if self.is_punct("(") {
                self.bump();
                let mut args = vec![self.expression()?];
                while self.is_punct(",") {
                    self.bump();
                    args.push(self.expression()?);
                }
                self.expect_punct(")")?;
                self.expect_punct(":=")?;
                args
            } else if self.is_punct(":=") {
                self.bump();
                Vec::new()
            } else {
                return Ok(AsmRule::Call(name));
            };
            let value = self.expression()?;
            Ok(AsmRule::Update {
                location: name,
                args,
                value,
            })
        }
    }

    fn pattern(&mut self) -> Result<PatternInstance, ParseError> {
        let open = self.expect_kw("pattern")?;
        let (name, _) = self.ident()?;
        self.expect_punct(":")?;
        let pattern = match &self.peek().tok {
            Tok::Ident(s) => Pattern::parse(s),
            _ => None,
        };
        let Some(pattern) = pattern else {
            return self.error(format!("expected p1, p2, p3 or p4, found {}", self.found()));
        };
        self.bump();
        let (mut inner, mut prop, mut time) = (None, None, None);
        let mut conditions = Vec::new();
        loop {
            if self.is_kw("inner") {
                self.bump();
                inner = Some(self.ident()?.0);
            } else if self.is_kw("cond") {
                let t = self.bump();
                conditions.push(Condition {
                    expr: self.expression()?,
                    annotation: t.comments,
                });
            } else if self.is_kw("prop") {
                self.bump();
                prop = Some(self.expression()?);
            } else if self.is_kw("time") {
                self.bump();
                let span = self.peek().span;
                let t = self.int()?;
                time = Some(
                    u32::try_from(t)
                        .map_err(|_| ParseError::new(span, "time bound must be nonnegative"))?,
                );
            } else {
                self.close(&open)?;
                break;
            }
        }
        let missing = |what: &str| ParseError::new(open.span, format!("pattern `{name}` needs `{what}`"));
        let inner = inner.ok_or_else(|| missing("inner"))?;
        let scheme = match pattern {
            Pattern::P1 => {
                if prop.is_some() || time.is_some() {
                    return Err(ParseError::new(
                        open.span,
                        "p1 takes `cond` clauses only",
                    ));
                }
                Scheme::AssumeCondition { conditions }
            }
            _ if !conditions.is_empty() => {
                return Err(ParseError::new(open.span, format!("{pattern} takes no `cond`")))
            }
            Pattern::P2 => {
                if time.is_some() {
                    return Err(ParseError::new(open.span, "p2 takes no `time`"));
                }
                Scheme::ImmediateProperty {
                    property: prop.ok_or_else(|| missing("prop"))?,
                }
            }
            Pattern::P3 => Scheme::TimedTransition {
                property: prop.ok_or_else(|| missing("prop"))?,
                time: time.ok_or_else(|| missing("time"))?,
            },
            Pattern::P4 => Scheme::BoundedResponse {
                property: prop.ok_or_else(|| missing("prop"))?,
                time: time.ok_or_else(|| missing("time"))?,
            },
        };
        Ok(PatternInstance {
            name,
            scheme,
            inner,
            annotation: open.comments,
        })
    }

    // ---- statements ----

    fn block(&mut self, terminators: &[&str], opener: &Token) -> Result<Vec<Statement>, ParseError> {
        let mut out = Vec::new();
        loop {
            if terminators.iter().any(|t| self.is_kw(t)) {
                return Ok(out);
            }
            if self.at_eof() || self.at_item_start() {
                return Err(unclosed(opener));
            }
            out.push(self.statement()?);
            if self.is_punct(";") {
                self.bump();
            }
        }
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        let annotation = self.peek().comments.clone();
        let span = self.peek().span;
        let kw = match &self.peek().tok {
            Tok::Ident(s) => s.clone(),
            _ => return self.error(format!("expected a statement, found {}", self.found())),
        };
        let kind = match kw.as_str() {
            "assume" | "assert" | "check" => {
                let open = self.bump();
                let assume = match kw.as_str() {
                    "check" if self.is_kw("assume") && self.peek_at(1) == &Tok::Punct(":") => {
                        self.bump();
                        self.bump();
                        true
                    }
                    k => k == "assume",
                };
                let e = self.expression()?;
                self.close(&open)?;
                if assume {
                    StmtKind::Assume(e)
                } else {
                    StmtKind::Assert(e)
                }
            }
            "if" => {
                let open = self.bump();
                let mut branches = Vec::new();
                let guard = self.expression()?;
                self.expect_kw("then")?;
                branches.push((guard, self.block(&["elseif", "else", "end"], &open)?));
                let mut else_body = Vec::new();
                loop {
                    if self.is_kw("elseif") {
                        self.bump();
                        let guard = self.expression()?;
                        self.expect_kw("then")?;
                        branches.push((guard, self.block(&["elseif", "else", "end"], &open)?));
                    } else if self.is_kw("else") {
                        self.bump();
                        else_body = self.block(&["end"], &open)?;
                    } else {
                        break;
                    }
                }
                self.close(&open)?;
                StmtKind::If {
                    branches,
                    else_body,
                }
            }
            "case" => {
                let open = self.bump();
                let (scrutinee, _) = self.ident()?;
                let mut arms = Vec::new();
                if !self.is_kw("when") {
                    return self.error(format!("expected `when`, found {}", self.found()));
                }
                while self.is_kw("when") {
                    self.bump();
                    let (value, _) = self.ident()?;
                    self.expect_kw("then")?;
                    let body = self.block(&["when", "else", "end"], &open)?;
                    arms.push(CaseArm { value, body });
                }
                let default = if self.is_kw("else") {
                    self.bump();
                    Some(self.block(&["end"], &open)?)
                } else {
                    None
                };
                self.close(&open)?;
                StmtKind::Case {
                    scrutinee,
                    arms,
                    default,
                }
            }
            "from" => {
                let open = self.bump();
                let init = self.block(&["until"], &open)?;
                self.bump();
                let exit = self.expression()?;
                self.expect_kw("loop")?;
                let body = self.block(&["end"], &open)?;
                self.close(&open)?;
                StmtKind::Loop { init, exit, body }
            }
            "local" => {
                self.bump();
                let (name, _) = self.ident()?;
                self.expect_punct(":")?;
                let domain = self.domain()?;
                StmtKind::LocalDecl { name, domain }
            }
            _ => {
                let (name, _) = self.ident()?;
                if self.is_punct(":=") {
                    self.bump();
                    StmtKind::Assign {
                        target: name,
                        value: self.expression()?,
                    }
                } else {
                    StmtKind::Call(name)
                }
            }
        };
        Ok(Statement {
            kind,
            annotation,
            span,
        })
    }

    // ---- expressions ----

    pub fn expression(&mut self) -> Result<Expression, ParseError> {
        let lhs = self.disjunction()?;
        if self.is_kw("implies") {
            self.bump();
            let rhs = self.expression()?;
            return Ok(Expression::bin(BinOp::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Expression, ParseError> {
        let mut e = self.conjunction()?;
        while self.is_kw("or") {
            self.bump();
            e = Expression::or(e, self.conjunction()?);
        }
        Ok(e)
    }

    fn conjunction(&mut self) -> Result<Expression, ParseError> {
        let mut e = self.negation()?;
        while self.is_kw("and") {
            self.bump();
            e = Expression::and(e, self.negation()?);
        }
        Ok(e)
    }

    fn negation(&mut self) -> Result<Expression, ParseError> {
        if self.is_kw("not") {
            self.bump();
            return Ok(Expression::not(self.negation()?));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expression, ParseError> {
        let lhs = self.sum()?;
        let Some(op) = self.comparison_op() else {
            return Ok(lhs);
        };
        self.bump();
        let rhs = self.sum()?;
        if self.comparison_op().is_some() {
            return self.error("comparisons do not chain; add parentheses");
        }
        Ok(Expression::bin(op, lhs, rhs))
    }

    fn comparison_op(&self) -> Option<BinOp> {
        match &self.peek().tok {
            Tok::Punct("=") => Some(BinOp::Eq),
            Tok::Punct("/=") => Some(BinOp::Neq),
            Tok::Punct("<") => Some(BinOp::Lt),
            Tok::Punct("<=") => Some(BinOp::Le),
            Tok::Punct(">") => Some(BinOp::Gt),
            Tok::Punct(">=") => Some(BinOp::Ge),
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<Expression, ParseError> {
        let mut e = self.unary()?;
        loop {
            let op = match &self.peek().tok {
                Tok::Punct("+") => BinOp::Add,
                Tok::Punct("-") => BinOp::Sub,
                _ => return Ok(e),
            };
            self.bump();
            e = Expression::bin(op, e, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expression, ParseError> {
        if self.is_kw("old") {
            self.bump();
            return Ok(Expression::old(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expression, ParseError> {
        match self.peek().tok.clone() {
            Tok::Int(_) | Tok::Punct("-") => Ok(Expression::int(self.int()?)),
            Tok::Punct("(") => {
                self.bump();
                let e = self.expression()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Tok::Ident(s) => match s.as_str() {
                "True" | "true" => {
                    self.bump();
                    Ok(Expression::Lit(Value::Bool(true)))
                }
                "False" | "false" => {
                    self.bump();
                    Ok(Expression::Lit(Value::Bool(false)))
                }
                "max" | "min" => {
                    self.bump();
                    let op = if s == "max" { BinOp::Max } else { BinOp::Min };
                    self.expect_punct("(")?;
                    let a = self.expression()?;
                    self.expect_punct(",")?;
                    let b = self.expression()?;
                    self.expect_punct(")")?;
                    Ok(Expression::bin(op, a, b))
                }
                _ => Ok(Expression::Attr(self.ident()?.0)),
            },
            _ => self.error(format!("expected an expression, found {}", self.found())),
        }
    }

    pub fn expect_eof(&mut self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            self.error(format!("unexpected {} after expression", self.found()))
        }
    }
}

fn unclosed(opener: &Token) -> ParseError {
    let what = match &opener.tok {
        Tok::Ident(s) => s.clone(),
        _ => "block".to_string(),
    };
    ParseError::new(opener.span, format!("`{what}` is never closed by a matching `end`"))
}

/// Attribute and symbolic-constant names, for identifier resolution.
pub(crate) struct Names {
    attributes: HashSet<String>,
    symbols: HashSet<String>,
}

pub(crate) fn model_names(attributes: &[AttributeDecl]) -> Names {
    Names {
        attributes: attributes.iter().map(|a| a.name.clone()).collect(),
        symbols: attributes
            .iter()
            .filter_map(|a| match &a.domain {
                Domain::Symbolic(v) => Some(v.iter().cloned()),
                Domain::Integer { .. } => None,
            })
            .flatten()
            .collect(),
    }
}

/// Classifies each identifier as a local, an attribute or a symbolic
/// constant, in that order. Unknown names stay attribute references and
/// are reported by the well-formedness check.
pub(crate) fn resolve_expr(e: &Expression, locals: &HashSet<String>, names: &Names) -> Expression {
    match e {
        Expression::Attr(n) | Expression::Local(n) => {
            if locals.contains(n) {
                Expression::Local(n.clone())
            } else if names.attributes.contains(n) || !names.symbols.contains(n) {
                Expression::Attr(n.clone())
            } else {
                Expression::sym(n)
            }
        }
        Expression::Lit(_) => e.clone(),
        Expression::Old(inner) => Expression::old(resolve_expr(inner, locals, names)),
        Expression::Not(inner) => Expression::not(resolve_expr(inner, locals, names)),
        Expression::Binary(op, l, r) => Expression::bin(
            *op,
            resolve_expr(l, locals, names),
            resolve_expr(r, locals, names),
        ),
    }
}

fn resolve_routine(r: &mut Routine, names: &Names) {
    let mut locals = HashSet::new();
    resolve_block(&mut r.body, &mut locals, names);
}

fn resolve_block(body: &mut [Statement], locals: &mut HashSet<String>, names: &Names) {
    for s in body {
        resolve_statement(s, locals, names);
    }
}

fn resolve_statement(s: &mut Statement, locals: &mut HashSet<String>, names: &Names) {
    let kind = std::mem::replace(&mut s.kind, StmtKind::Seq(Vec::new()));
    s.kind = match kind {
        StmtKind::Assign { target, value } | StmtKind::LocalAssign { name: target, value } => {
            let value = resolve_expr(&value, locals, names);
            if locals.contains(&target) {
                StmtKind::LocalAssign {
                    name: target,
                    value,
                }
            } else {
                StmtKind::Assign { target, value }
            }
        }
        StmtKind::Assume(e) => StmtKind::Assume(resolve_expr(&e, locals, names)),
        StmtKind::Assert(e) => StmtKind::Assert(resolve_expr(&e, locals, names)),
        StmtKind::If {
            mut branches,
            mut else_body,
        } => {
            for (g, b) in &mut branches {
                *g = resolve_expr(g, locals, names);
                resolve_block(b, locals, names);
            }
            resolve_block(&mut else_body, locals, names);
            StmtKind::If {
                branches,
                else_body,
            }
        }
        StmtKind::Case {
            scrutinee,
            mut arms,
            mut default,
        } => {
            for a in &mut arms {
                resolve_block(&mut a.body, locals, names);
            }
            if let Some(d) = &mut default {
                resolve_block(d, locals, names);
            }
            StmtKind::Case {
                scrutinee,
                arms,
                default,
            }
        }
        StmtKind::Loop {
            mut init,
            exit,
            mut body,
        } => {
            resolve_block(&mut init, locals, names);
            let exit = resolve_expr(&exit, locals, names);
            resolve_block(&mut body, locals, names);
            StmtKind::Loop { init, exit, body }
        }
        StmtKind::Seq(mut body) => {
            resolve_block(&mut body, locals, names);
            StmtKind::Seq(body)
        }
        StmtKind::LocalDecl { name, domain } => {
            locals.insert(name.clone());
            StmtKind::LocalDecl { name, domain }
        }
        k @ StmtKind::Call(_) => k,
    };
}

fn resolve_rule(rule: &mut AsmRule, names: &Names) {
    let none = HashSet::new();
    match rule {
        AsmRule::Update { args, value, .. } => {
            for a in args.iter_mut() {
                *a = resolve_expr(a, &none, names);
            }
            *value = resolve_expr(value, &none, names);
        }
        AsmRule::Par(children) => children.iter_mut().for_each(|c| resolve_rule(c, names)),
        AsmRule::Cond {
            guard,
            then_rule,
            else_rule,
        } => {
            *guard = resolve_expr(guard, &none, names);
            resolve_rule(then_rule, names);
            if let Some(e) = else_rule {
                resolve_rule(e, names);
            }
        }
        AsmRule::Call(_) => {}
    }
}

fn resolve_pattern(p: &mut PatternInstance, names: &Names) {
    let none = HashSet::new();
    match &mut p.scheme {
        Scheme::AssumeCondition { conditions } => {
            for c in conditions {
                c.expr = resolve_expr(&c.expr, &none, names);
            }
        }
        Scheme::ImmediateProperty { property }
        | Scheme::TimedTransition { property, .. }
        | Scheme::BoundedResponse { property, .. } => {
            *property = resolve_expr(property, &none, names);
        }
    }
}

//! Static consistency checks: name resolution, sorts, domains, call graph.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use super::{
    AttrKind, BinOp, Domain, Expression, Model, Routine, RoutineRole, Span, Statement, StmtKind,
    Value, DURATION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagKind {
    UnresolvedName,
    Duplicate,
    Sort,
    Domain,
    Recursion,
    EnvironmentAssignment,
    DurationUpdate,
    NestedOld,
    MissingAssert,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagKind,
    pub routine: Option<String>,
    pub span: Span,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.routine {
            Some(r) if !self.span.is_generated() => {
                write!(f, "{}: in `{r}`: {}", self.span, self.message)
            }
            Some(r) => write!(f, "in `{r}`: {}", self.message),
            None if !self.span.is_generated() => write!(f, "{}: {}", self.span, self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Checks `model` and returns every problem found; empty means well-formed.
pub fn well_formed(model: &Model) -> Vec<Diagnostic> {
    let mut cx = Checker::new(model);
    cx.attributes();
    cx.routines();
    cx.call_graph();
    for r in &model.routines {
        cx.routine(r);
    }
    cx.diags
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sort {
    Bool,
    Int,
    /// Candidate symbolic domains, by index into `Checker::sym_domains`.
    Sym(BTreeSet<usize>),
}

impl Sort {
    fn name(&self) -> &'static str {
        match self {
            Sort::Bool => "boolean",
            Sort::Int => "integer",
            Sort::Sym(_) => "symbolic",
        }
    }
}

struct Checker<'m> {
    model: &'m Model,
    sym_domains: Vec<&'m [String]>,
    diags: Vec<Diagnostic>,
    routine: Option<String>,
}

impl<'m> Checker<'m> {
    fn new(model: &'m Model) -> Self {
        let mut sym_domains: Vec<&[String]> = Vec::new();
        let mut add = |d: &'m Domain| {
            if let Domain::Symbolic(values) = d {
                if !sym_domains.contains(&values.as_slice()) {
                    sym_domains.push(values);
                }
            }
        };
        for a in &model.attributes {
            add(&a.domain);
        }
        for r in &model.routines {
            r.walk(&mut |s| {
                if let StmtKind::LocalDecl { domain, .. } = &s.kind {
                    add(domain);
                }
            });
        }
        Checker {
            model,
            sym_domains,
            diags: Vec::new(),
            routine: None,
        }
    }

    fn report(&mut self, kind: DiagKind, span: Span, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            kind,
            routine: self.routine.clone(),
            span,
            message: message.into(),
        });
    }

    fn domain_sort(&self, d: &Domain) -> Sort {
        match d {
            Domain::Integer { .. } => Sort::Int,
            Domain::Symbolic(values) => Sort::Sym(
                self.sym_domains
                    .iter()
                    .position(|x| *x == values.as_slice())
                    .into_iter()
                    .collect(),
            ),
        }
    }

    fn check_domain(&mut self, what: &str, d: &Domain, span: Span) {
        match d {
            Domain::Symbolic(values) => {
                if values.is_empty() {
                    self.report(DiagKind::Domain, span, format!("{what} has an empty domain"));
                }
                let mut seen = HashSet::new();
                for v in values {
                    if !seen.insert(v) {
                        self.report(
                            DiagKind::Duplicate,
                            span,
                            format!("{what} lists `{v}` twice"),
                        );
                    }
                }
            }
            Domain::Integer { lo, hi } => {
                if lo > hi {
                    self.report(
                        DiagKind::Domain,
                        span,
                        format!("{what} has an empty range {lo} .. {hi}"),
                    );
                }
            }
        }
    }

    fn attributes(&mut self) {
        let mut seen = HashSet::new();
        let mut durations = 0;
        for a in &self.model.attributes {
            if !seen.insert(a.name.as_str()) {
                self.report(
                    DiagKind::Duplicate,
                    a.span,
                    format!("attribute `{}` declared twice", a.name),
                );
            }
            self.check_domain(&format!("attribute `{}`", a.name), &a.domain, a.span);
            if self.model.is_symbol(&a.name) {
                self.report(
                    DiagKind::Duplicate,
                    a.span,
                    format!("`{}` is both an attribute and a symbolic constant", a.name),
                );
            }
            match (a.kind, a.name == DURATION) {
                (AttrKind::Ghost, true) => {
                    durations += 1;
                    match a.domain {
                        Domain::Integer { lo, hi } if lo <= 0 && 0 <= hi => {}
                        _ => self.report(
                            DiagKind::Domain,
                            a.span,
                            "`duration` must be an integer range containing 0",
                        ),
                    }
                }
                (AttrKind::Ghost, false) => self.report(
                    DiagKind::Domain,
                    a.span,
                    format!("ghost attribute `{}`: only `duration` may be ghost", a.name),
                ),
                (_, true) => self.report(
                    DiagKind::Domain,
                    a.span,
                    "`duration` must be declared ghost",
                ),
                _ => {}
            }
        }
        if durations == 0 && !self.model.attributes.iter().any(|a| a.name == DURATION) {
            self.report(
                DiagKind::UnresolvedName,
                Span::default(),
                "model declares no ghost `duration` attribute",
            );
        }
    }

    fn routines(&mut self) {
        let mut seen = HashSet::new();
        for r in &self.model.routines {
            if !seen.insert(r.name.as_str()) {
                self.report(
                    DiagKind::Duplicate,
                    r.span,
                    format!("routine `{}` declared twice", r.name),
                );
            }
            if r.role == RoutineRole::Requirement {
                let mut asserts = 0;
                r.walk(&mut |s| {
                    if matches!(s.kind, StmtKind::Assert(_)) {
                        asserts += 1;
                    }
                });
                if asserts == 0 {
                    self.diags.push(Diagnostic {
                        kind: DiagKind::MissingAssert,
                        routine: Some(r.name.clone()),
                        span: r.span,
                        message: "requirement contains no assert".into(),
                    });
                }
            }
        }
        if self.model.routine(&self.model.step).is_none() {
            self.report(
                DiagKind::UnresolvedName,
                Span::default(),
                format!("step routine `{}` does not exist", self.model.step),
            );
        }
    }

    fn call_graph(&mut self) {
        let graph: BTreeMap<&str, Vec<&str>> = self
            .model
            .routines
            .iter()
            .map(|r| (r.name.as_str(), r.callees()))
            .collect();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut mark: HashMap<&str, u8> = HashMap::new();
        let mut on_cycle: BTreeSet<&str> = BTreeSet::new();
        fn dfs<'a>(
            n: &'a str,
            graph: &BTreeMap<&'a str, Vec<&'a str>>,
            mark: &mut HashMap<&'a str, u8>,
            stack: &mut Vec<&'a str>,
            on_cycle: &mut BTreeSet<&'a str>,
        ) {
            mark.insert(n, 1);
            stack.push(n);
            for &m in graph.get(n).into_iter().flatten() {
                match mark.get(m).copied().unwrap_or(0) {
                    0 if graph.contains_key(m) => dfs(m, graph, mark, stack, on_cycle),
                    1 => {
                        let from = stack.iter().rposition(|x| *x == m).unwrap_or(0);
                        on_cycle.extend(&stack[from..]);
                    }
                    _ => {}
                }
            }
            stack.pop();
            mark.insert(n, 2);
        }
        for &n in graph.keys() {
            if mark.get(n).copied().unwrap_or(0) == 0 {
                dfs(n, &graph, &mut mark, &mut Vec::new(), &mut on_cycle);
            }
        }
        for n in on_cycle {
            let span = self.model.routine(n).map(|r| r.span).unwrap_or_default();
            self.diags.push(Diagnostic {
                kind: DiagKind::Recursion,
                routine: Some(n.to_string()),
                span,
                message: format!("`{n}` is part of a recursive call cycle"),
            });
        }
    }

    fn routine(&mut self, r: &Routine) {
        self.routine = Some(r.name.clone());
        let mut locals = HashMap::new();
        self.block(&r.body, &mut locals);
        self.routine = None;
    }

    fn block(&mut self, body: &[Statement], locals: &mut HashMap<String, Domain>) {
        for s in body {
            self.statement(s, locals);
        }
    }

    fn statement(&mut self, s: &Statement, locals: &mut HashMap<String, Domain>) {
        let span = s.span;
        match &s.kind {
            StmtKind::Assign { target, value } => self.assign(target, value, span, locals),
            StmtKind::LocalDecl { name, domain } => {
                self.check_domain(&format!("local `{name}`"), domain, span);
                if locals.insert(name.clone(), domain.clone()).is_some() {
                    self.report(
                        DiagKind::Duplicate,
                        span,
                        format!("local `{name}` declared twice"),
                    );
                }
            }
            StmtKind::LocalAssign { name, value } => match locals.get(name).cloned() {
                Some(domain) => self.expect_domain(value, &domain, span, locals),
                None => self.report(
                    DiagKind::UnresolvedName,
                    span,
                    format!("assignment to undeclared local `{name}`"),
                ),
            },
            StmtKind::Assume(e) | StmtKind::Assert(e) => self.expect_bool(e, span, locals),
            StmtKind::If {
                branches,
                else_body,
            } => {
                for (guard, body) in branches {
                    self.expect_bool(guard, span, locals);
                    self.block(body, locals);
                }
                self.block(else_body, locals);
            }
            StmtKind::Case {
                scrutinee,
                arms,
                default,
            } => {
                let domain = match self.model.attribute(scrutinee) {
                    Some(a) => Some(a.domain.clone()),
                    None => locals.get(scrutinee).cloned(),
                };
                match &domain {
                    None => self.report(
                        DiagKind::UnresolvedName,
                        span,
                        format!("case on unknown name `{scrutinee}`"),
                    ),
                    Some(Domain::Integer { .. }) => self.report(
                        DiagKind::Sort,
                        span,
                        format!("case on integer `{scrutinee}`; only symbolic values can be matched"),
                    ),
                    Some(Domain::Symbolic(_)) => {}
                }
                let mut seen = HashSet::new();
                for arm in arms {
                    if let Some(d @ Domain::Symbolic(_)) = &domain {
                        if !d.contains(&Value::Sym(arm.value.clone())) {
                            self.report(
                                DiagKind::Sort,
                                span,
                                format!("`{}` is not a value of `{scrutinee}`", arm.value),
                            );
                        }
                    }
                    if !seen.insert(&arm.value) {
                        self.report(
                            DiagKind::Duplicate,
                            span,
                            format!("case arm `{}` appears twice", arm.value),
                        );
                    }
                    self.block(&arm.body, locals);
                }
                if let Some(d) = default {
                    self.block(d, locals);
                }
            }
            StmtKind::Loop { init, exit, body } => {
                self.block(init, locals);
                self.expect_bool(exit, span, locals);
                self.block(body, locals);
            }
            StmtKind::Call(name) => {
                if self.model.routine(name).is_none() {
                    self.report(
                        DiagKind::UnresolvedName,
                        span,
                        format!("call to unknown routine `{name}`"),
                    );
                }
            }
            StmtKind::Seq(body) => self.block(body, locals),
        }
    }

    fn assign(
        &mut self,
        target: &str,
        value: &Expression,
        span: Span,
        locals: &HashMap<String, Domain>,
    ) {
        let Some(attr) = self.model.attribute(target) else {
            self.report(
                DiagKind::UnresolvedName,
                span,
                format!("assignment to unknown attribute `{target}`"),
            );
            return;
        };
        match attr.kind {
            AttrKind::Environment => self.report(
                DiagKind::EnvironmentAssignment,
                span,
                format!("`{target}` is environment-controlled; constrain it with assume instead"),
            ),
            AttrKind::Ghost => {
                let ok = matches!(
                    value,
                    Expression::Binary(BinOp::Add, l, r)
                        if **l == Expression::Attr(DURATION.into())
                            && matches!(**r, Expression::Lit(Value::Int(k)) if k >= 0)
                );
                if !ok {
                    self.report(
                        DiagKind::DurationUpdate,
                        span,
                        "`duration` may only be advanced as `duration := duration + k` with constant k >= 0",
                    );
                }
            }
            AttrKind::Machine => {}
        }
        let domain = attr.domain.clone();
        self.expect_domain(value, &domain, span, locals);
    }

    fn expect_bool(&mut self, e: &Expression, span: Span, locals: &HashMap<String, Domain>) {
        if let Some(sort) = self.sort_of(e, span, locals, false) {
            if sort != Sort::Bool {
                self.report(
                    DiagKind::Sort,
                    span,
                    format!("expected a boolean condition, found {}", sort.name()),
                );
            }
        }
    }

    fn expect_domain(
        &mut self,
        e: &Expression,
        domain: &Domain,
        span: Span,
        locals: &HashMap<String, Domain>,
    ) {
        let Some(sort) = self.sort_of(e, span, locals, false) else {
            return;
        };
        let want = self.domain_sort(domain);
        let compatible = match (&sort, &want) {
            (Sort::Sym(a), Sort::Sym(b)) => !a.is_disjoint(b),
            (a, b) => a == b,
        };
        if !compatible {
            self.report(
                DiagKind::Sort,
                span,
                format!("cannot store a {} value in {}", sort.name(), domain),
            );
            return;
        }
        if let Expression::Lit(v) = e {
            if !domain.contains(v) {
                self.report(
                    DiagKind::Domain,
                    span,
                    format!("literal {v} lies outside {domain}"),
                );
            }
        }
    }

    /// Infers the sort of `e`, reporting problems. `None` means an error was reported.
    fn sort_of(
        &mut self,
        e: &Expression,
        span: Span,
        locals: &HashMap<String, Domain>,
        in_old: bool,
    ) -> Option<Sort> {
        match e {
            Expression::Lit(Value::Bool(_)) => Some(Sort::Bool),
            Expression::Lit(Value::Int(_)) => Some(Sort::Int),
            Expression::Lit(Value::Sym(s)) => {
                let set: BTreeSet<usize> = self
                    .sym_domains
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| d.contains(s))
                    .map(|(i, _)| i)
                    .collect();
                if set.is_empty() {
                    self.report(
                        DiagKind::UnresolvedName,
                        span,
                        format!("unknown symbolic constant `{s}`"),
                    );
                    return None;
                }
                Some(Sort::Sym(set))
            }
            Expression::Attr(name) => match self.model.attribute(name) {
                Some(a) => Some(self.domain_sort(&a.domain)),
                None => {
                    self.report(
                        DiagKind::UnresolvedName,
                        span,
                        format!("unknown name `{name}`"),
                    );
                    None
                }
            },
            Expression::Local(name) => {
                if in_old {
                    self.report(
                        DiagKind::NestedOld,
                        span,
                        format!("local `{name}` has no value on routine entry"),
                    );
                    return None;
                }
                match locals.get(name) {
                    Some(d) => Some(self.domain_sort(d)),
                    None => {
                        self.report(
                            DiagKind::UnresolvedName,
                            span,
                            format!("local `{name}` used before its declaration"),
                        );
                        None
                    }
                }
            }
            Expression::Old(inner) => {
                if in_old {
                    self.report(DiagKind::NestedOld, span, "`old` nested inside `old`");
                    return None;
                }
                self.sort_of(inner, span, locals, true)
            }
            Expression::Not(inner) => {
                let s = self.sort_of(inner, span, locals, in_old)?;
                if s != Sort::Bool {
                    self.report(
                        DiagKind::Sort,
                        span,
                        format!("`not` applied to {}", s.name()),
                    );
                    return None;
                }
                Some(Sort::Bool)
            }
            Expression::Binary(op, l, r) => {
                let ls = self.sort_of(l, span, locals, in_old);
                let rs = self.sort_of(r, span, locals, in_old);
                let (ls, rs) = (ls?, rs?);
                let mismatch = |cx: &mut Self| {
                    cx.report(
                        DiagKind::Sort,
                        span,
                        format!(
                            "`{}` applied to {} and {}",
                            op.symbol(),
                            ls.name(),
                            rs.name()
                        ),
                    );
                    None
                };
                match op {
                    BinOp::And | BinOp::Or | BinOp::Implies => {
                        if ls == Sort::Bool && rs == Sort::Bool {
                            Some(Sort::Bool)
                        } else {
                            mismatch(self)
                        }
                    }
                    BinOp::Eq | BinOp::Neq => match (&ls, &rs) {
                        (Sort::Sym(a), Sort::Sym(b)) if !a.is_disjoint(b) => Some(Sort::Bool),
                        (Sort::Bool, Sort::Bool) | (Sort::Int, Sort::Int) => Some(Sort::Bool),
                        _ => mismatch(self),
                    },
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        if ls == Sort::Int && rs == Sort::Int {
                            Some(Sort::Bool)
                        } else {
                            mismatch(self)
                        }
                    }
                    BinOp::Add | BinOp::Sub | BinOp::Max | BinOp::Min => {
                        if ls == Sort::Int && rs == Sort::Int {
                            Some(Sort::Int)
                        } else {
                            mismatch(self)
                        }
                    }
                }
            }
        }
    }
}

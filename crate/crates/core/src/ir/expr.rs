use std::fmt;

use serde::{Serialize, Serializer};

/// A runtime value of the requirement language.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(i64),
    /// A symbolic constant such as `closed_position`.
    Sym(String),
}

impl Value {
    pub fn sym(name: impl Into<String>) -> Self {
        Value::Sym(name.into())
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn sort_name(&self) -> &'static str {
        match self {
            Value::Bool(_) => "boolean",
            Value::Int(_) => "integer",
            Value::Sym(_) => "symbolic",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(true) => f.write_str("True"),
            Value::Bool(false) => f.write_str("False"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Sym(s) => f.write_str(s),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Bool(b) => s.serialize_bool(*b),
            Value::Int(i) => s.serialize_i64(*i),
            Value::Sym(name) => s.serialize_str(name),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    /// Right-associative in the concrete syntax.
    Implies,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Max,
    Min,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "and",
            BinOp::Or => "or",
            BinOp::Implies => "implies",
            BinOp::Eq => "=",
            BinOp::Neq => "/=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Max => "max",
            BinOp::Min => "min",
        }
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or | BinOp::Implies)
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Neq | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Max | BinOp::Min)
    }
}

/// Boolean and integer expressions over plant attributes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expression {
    Lit(Value),
    /// Reference to a model attribute, read from the current state.
    Attr(String),
    /// Reference to a routine-local variable.
    Local(String),
    /// `old e`: `e` evaluated against the routine-entry snapshot.
    Old(Box<Expression>),
    Not(Box<Expression>),
    Binary(BinOp, Box<Expression>, Box<Expression>),
}

impl Expression {
    pub fn tt() -> Self {
        Expression::Lit(Value::Bool(true))
    }

    pub fn int(i: i64) -> Self {
        Expression::Lit(Value::Int(i))
    }

    pub fn sym(name: impl Into<String>) -> Self {
        Expression::Lit(Value::sym(name))
    }

    pub fn attr(name: impl Into<String>) -> Self {
        Expression::Attr(name.into())
    }

    pub fn old(inner: Expression) -> Self {
        Expression::Old(Box::new(inner))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Expression) -> Self {
        Expression::Not(Box::new(inner))
    }

    pub fn bin(op: BinOp, lhs: Expression, rhs: Expression) -> Self {
        Expression::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn and(lhs: Expression, rhs: Expression) -> Self {
        Self::bin(BinOp::And, lhs, rhs)
    }

    pub fn or(lhs: Expression, rhs: Expression) -> Self {
        Self::bin(BinOp::Or, lhs, rhs)
    }

    pub fn eq(lhs: Expression, rhs: Expression) -> Self {
        Self::bin(BinOp::Eq, lhs, rhs)
    }

    pub fn neq(lhs: Expression, rhs: Expression) -> Self {
        Self::bin(BinOp::Neq, lhs, rhs)
    }

    /// `duration - old duration`, the elapsed time since routine entry.
    pub fn elapsed() -> Self {
        Self::bin(
            BinOp::Sub,
            Expression::attr(super::DURATION),
            Expression::old(Expression::attr(super::DURATION)),
        )
    }

    pub fn contains_old(&self) -> bool {
        match self {
            Expression::Old(_) => true,
            Expression::Lit(_) | Expression::Attr(_) | Expression::Local(_) => false,
            Expression::Not(e) => e.contains_old(),
            Expression::Binary(_, l, r) => l.contains_old() || r.contains_old(),
        }
    }

    /// Splits a left-nested conjunction into its conjuncts, in source order.
    pub fn conjuncts(&self) -> Vec<&Expression> {
        match self {
            Expression::Binary(BinOp::And, l, r) => {
                let mut out = l.conjuncts();
                out.extend(r.conjuncts());
                out
            }
            e => vec![e],
        }
    }

    /// Rewrites every attribute reference `a` into `old a`.
    pub fn at_entry(&self) -> Expression {
        match self {
            Expression::Attr(_) => Expression::old(self.clone()),
            Expression::Lit(_) | Expression::Local(_) | Expression::Old(_) => self.clone(),
            Expression::Not(e) => Expression::not(e.at_entry()),
            Expression::Binary(op, l, r) => Expression::bin(*op, l.at_entry(), r.at_entry()),
        }
    }

    /// Logical negation, folded into comparisons where possible:
    /// `not (a = b)` becomes `a /= b`, `not not e` becomes `e`.
    pub fn negated(&self) -> Expression {
        let flip = |op| match op {
            BinOp::Eq => Some(BinOp::Neq),
            BinOp::Neq => Some(BinOp::Eq),
            BinOp::Lt => Some(BinOp::Ge),
            BinOp::Ge => Some(BinOp::Lt),
            BinOp::Le => Some(BinOp::Gt),
            BinOp::Gt => Some(BinOp::Le),
            _ => None,
        };
        match self {
            Expression::Lit(Value::Bool(b)) => Expression::Lit(Value::Bool(!b)),
            Expression::Not(e) => (**e).clone(),
            Expression::Binary(op, l, r) => match flip(*op) {
                Some(neg) => Expression::Binary(neg, l.clone(), r.clone()),
                None => Expression::not(self.clone()),
            },
            _ => Expression::not(self.clone()),
        }
    }

    /// Visits this expression and all sub-expressions, pre-order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expression)) {
        f(self);
        match self {
            Expression::Old(e) | Expression::Not(e) => e.walk(f),
            Expression::Binary(_, l, r) => {
                l.walk(f);
                r.walk(f);
            }
            _ => {}
        }
    }
}

// Binding strength for printing; higher binds tighter.
const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_NOT: u8 = 4;
const PREC_CMP: u8 = 5;
const PREC_ARITH: u8 = 6;
const PREC_OLD: u8 = 7;

fn prec(op: BinOp) -> u8 {
    match op {
        BinOp::Implies => PREC_IMPLIES,
        BinOp::Or => PREC_OR,
        BinOp::And => PREC_AND,
        BinOp::Eq | BinOp::Neq | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => PREC_CMP,
        BinOp::Add | BinOp::Sub => PREC_ARITH,
        BinOp::Max | BinOp::Min => u8::MAX,
    }
}

impl Expression {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        match self {
            Expression::Lit(v) => write!(f, "{v}"),
            Expression::Attr(n) | Expression::Local(n) => f.write_str(n),
            Expression::Old(e) => {
                f.write_str("old ")?;
                e.fmt_prec(f, PREC_OLD)
            }
            Expression::Not(e) => {
                let wrap = PREC_NOT < min;
                if wrap {
                    f.write_str("(")?;
                }
                f.write_str("not ")?;
                e.fmt_prec(f, PREC_NOT)?;
                if wrap {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Expression::Binary(op @ (BinOp::Max | BinOp::Min), l, r) => {
                write!(f, "{} (", op.symbol())?;
                l.fmt_prec(f, 0)?;
                f.write_str(", ")?;
                r.fmt_prec(f, 0)?;
                f.write_str(")")
            }
            Expression::Binary(op, l, r) => {
                let p = prec(*op);
                let (lmin, rmin) = match op {
                    BinOp::Implies => (p + 1, p),
                    _ if op.is_comparison() => (p + 1, p + 1),
                    _ => (p, p + 1),
                };
                // Parenthesize conjunctions under `or`/`implies` and sums under
                // comparisons; not required by precedence but easier to read.
                let clarify = |e: &Expression, min: u8| match e {
                    Expression::Binary(inner, ..)
                        if op.is_logical() && inner.is_logical() && inner != op =>
                    {
                        min.max(prec(*inner) + 1)
                    }
                    Expression::Binary(BinOp::Add | BinOp::Sub, ..) if op.is_comparison() => {
                        PREC_OLD
                    }
                    _ => min,
                };
                let wrap = p < min;
                if wrap {
                    f.write_str("(")?;
                }
                l.fmt_prec(f, clarify(l, lmin))?;
                write!(f, " {} ", op.symbol())?;
                r.fmt_prec(f, clarify(r, rmin))?;
                if wrap {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

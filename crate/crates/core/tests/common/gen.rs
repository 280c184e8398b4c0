//! Proptest strategies for pattern instances over the landing gear attributes.

use proptest::prelude::*;
use proptest::sample::select;

use reqcheck_core::ir::{BinOp, Expression, Value};
use reqcheck_core::patterns::{Condition, PatternInstance, Scheme};

const LGS_ATTRS: [(&str, &[&str]); 3] = [
    (
        "handle_status",
        &["up_position", "down_position"],
    ),
    (
        "door_status",
        &["closed_position", "opening_state", "open_position", "closing_state"],
    ),
    (
        "gear_status",
        &["extended_position", "extending_state", "retracted_position", "retracting_state"],
    ),
];

fn lgs_atom(with_old: bool) -> BoxedStrategy<Expression> {
    let cmp = (0..LGS_ATTRS.len(), any::<prop::sample::Index>(), any::<bool>(), any::<bool>())
        .prop_map(move |(a, v, eq, old)| {
            let (name, values) = LGS_ATTRS[a];
            let mut lhs = Expression::attr(name);
            if with_old && old {
                lhs = Expression::old(lhs);
            }
            let op = if eq { BinOp::Eq } else { BinOp::Neq };
            Expression::bin(op, lhs, Expression::sym(*v.get(values)))
        });
    let elapsed = (0i64..60, select(vec![BinOp::Le, BinOp::Gt]))
        .prop_map(|(k, op)| Expression::bin(op, Expression::elapsed(), Expression::int(k)));
    if with_old {
        prop_oneof![4 => cmp, 1 => elapsed, 1 => any::<bool>().prop_map(|b| Expression::Lit(Value::Bool(b)))]
            .boxed()
    } else {
        prop_oneof![4 => cmp, 1 => any::<bool>().prop_map(|b| Expression::Lit(Value::Bool(b)))].boxed()
    }
}

pub fn connect(leaf: BoxedStrategy<Expression>) -> BoxedStrategy<Expression> {
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expression::not),
            (inner.clone(), inner.clone(), select(vec![BinOp::And, BinOp::Or, BinOp::Implies]))
                .prop_map(|(l, r, op)| Expression::bin(op, l, r)),
        ]
    })
    .boxed()
}

pub fn lgs_prop(with_old: bool) -> BoxedStrategy<Expression> {
    connect(lgs_atom(with_old))
}

pub fn comment_lines() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(
        prop_oneof![
            1 => Just(String::new()),
            6 => "[A-Za-z0-9_:,.(){}]([A-Za-z0-9_:,.(){} ]{0,24}[A-Za-z0-9_:,.(){}])?",
        ],
        0..3,
    )
}

fn name() -> impl Strategy<Value = String> {
    "req_[a-z]{1,8}"
}

pub fn instance() -> impl Strategy<Value = PatternInstance> {
    let inner = select(vec!["main", "run_in_normal_mode", "run_with_handle_down", "from_open_to_closed"]);
    let time = 0u32..10_000;
    let scheme = prop_oneof![
        prop::collection::vec((lgs_prop(true), comment_lines()), 1..4).prop_map(|cs| {
            Scheme::AssumeCondition {
                conditions: cs
                    .into_iter()
                    .map(|(expr, annotation)| Condition { expr, annotation })
                    .collect(),
            }
        }),
        lgs_prop(true).prop_map(|property| Scheme::ImmediateProperty { property }),
        (lgs_prop(false), time.clone())
            .prop_map(|(property, time)| Scheme::TimedTransition { property, time }),
        (lgs_prop(false), time).prop_map(|(property, time)| Scheme::BoundedResponse { property, time }),
    ];
    (name(), scheme, inner, comment_lines()).prop_map(|(name, scheme, inner, annotation)| {
        PatternInstance {
            name,
            scheme,
            inner: inner.to_string(),
            annotation,
        }
    })
}

//! Property tests for the expression parser: print/reparse round trips and
//! grammar coverage.

use proptest::prelude::*;
use zetafix::expr::{self, BinOp, CmpOp, Cond, Expr, Func};

const VARS: [&str; 4] = ["x", "y", "t", "s"];

fn arb_leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        // nonnegative literals only: the parser represents negation as a
        // unary node, never inside the literal
        (0.0..1000.0f64).prop_map(Expr::Num),
        (0usize..4).prop_map(|i| Expr::var(i, VARS[i])),
    ]
}

fn arb_cmp() -> impl Strategy<Value = CmpOp> {
    prop_oneof![
        Just(CmpOp::Lt),
        Just(CmpOp::Le),
        Just(CmpOp::Gt),
        Just(CmpOp::Ge),
        Just(CmpOp::Eq),
        Just(CmpOp::Ne),
    ]
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    arb_leaf().prop_recursive(6, 64, 3, |inner| {
        let binop = prop_oneof![
            Just(BinOp::Add),
            Just(BinOp::Sub),
            Just(BinOp::Mul),
            Just(BinOp::Div),
            Just(BinOp::Pow),
        ];
        let unary_fn = prop_oneof![
            Just(Func::Abs),
            Just(Func::Exp),
            Just(Func::Log),
            Just(Func::Sqrt),
        ];
        let binary_fn = prop_oneof![Just(Func::Min), Just(Func::Max)];
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (binop, inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            (unary_fn, inner.clone()).prop_map(|(func, a)| Expr::Call {
                func,
                args: vec![a]
            }),
            (binary_fn, inner.clone(), inner.clone()).prop_map(|(func, a, b)| Expr::Call {
                func,
                args: vec![a, b]
            }),
            (
                arb_cmp(),
                inner.clone(),
                inner.clone(),
                inner.clone(),
                inner
            )
                .prop_map(|(op, lhs, rhs, then, otherwise)| {
                    Expr::if_then_else(Cond { lhs, op, rhs }, then, otherwise)
                }),
        ]
    })
}

proptest! {
    /// Pretty-printing and reparsing yields a structurally identical AST.
    #[test]
    fn print_reparse_is_structurally_identical(e in arb_expr()) {
        let printed = e.to_string();
        let reparsed = expr::parse(&printed, &VARS)
            .unwrap_or_else(|err| panic!("'{}' failed to reparse: {}", printed, err));
        prop_assert_eq!(&e, &reparsed, "printed form: {}", printed);
    }

    /// Parsing is deterministic.
    #[test]
    fn parsing_is_deterministic(e in arb_expr()) {
        let printed = e.to_string();
        let a = expr::parse(&printed, &VARS).unwrap();
        let b = expr::parse(&printed, &VARS).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn every_comparison_operator_parses_and_selects() {
    let cases = [
        ("if(x < 1, 10, 20)", 0.5, 10.0),
        ("if(x <= 0.5, 10, 20)", 0.5, 10.0),
        ("if(x > 1, 10, 20)", 0.5, 20.0),
        ("if(x >= 0.5, 10, 20)", 0.5, 10.0),
        ("if(x = 0.5, 10, 20)", 0.5, 10.0),
        ("if(x != 0.5, 10, 20)", 0.5, 20.0),
    ];
    for (src, x, expected) in cases {
        let e = expr::parse(src, &["x"]).unwrap();
        assert_eq!(e.eval(&[("x", x)]).unwrap(), expected, "{}", src);
    }
}

#[test]
fn every_function_evaluates() {
    let cases = [
        ("min(2, 3)", 2.0),
        ("max(2, 3)", 3.0),
        ("abs(0 - 2)", 2.0),
        ("exp(0)", 1.0),
        ("log(1)", 0.0),
        ("sqrt(9)", 3.0),
    ];
    for (src, expected) in cases {
        let e = expr::parse(src, &[]).unwrap();
        assert_eq!(e.eval(&[]).unwrap(), expected, "{}", src);
    }
}

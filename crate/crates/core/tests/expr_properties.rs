use apapr_core::expr::{BinOp, Expr, Func, ScalarField};
use fd_oracle::DEFAULT_STEP;
use proptest::prelude::*;

const TXY: [&str; 3] = ["t", "x", "y"];

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u32..400).prop_map(|n| Expr::Num(n as f64 / 100.0)),
        (0usize..3).prop_map(Expr::Var),
    ]
}

/// Any tree the grammar can express. Parser literals are non-negative.
fn any_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 32, 2, |inner| {
        let op = prop_oneof![
            Just(BinOp::Add),
            Just(BinOp::Sub),
            Just(BinOp::Mul),
            Just(BinOp::Div),
            Just(BinOp::Pow)
        ];
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Expr::Binary(
                o,
                Box::new(a),
                Box::new(b)
            )),
            (0..Func::ALL.len(), inner).prop_map(|(f, a)| Expr::Call(Func::ALL[f], Box::new(a))),
        ]
    })
}

fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
    Expr::Binary(op, Box::new(a), Box::new(b))
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

/// Smooth, everywhere-defined trees: singular functions only appear with
/// arguments bounded away from their singular sets.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 24, 2, |inner| {
        let positive = |e: Expr| {
            bin(
                BinOp::Add,
                Expr::Num(1.0),
                bin(BinOp::Pow, e, Expr::Num(2.0)),
            )
        };
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| bin(BinOp::Add, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| bin(BinOp::Sub, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| bin(BinOp::Mul, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| bin(
                BinOp::Div,
                a,
                bin(BinOp::Add, Expr::Num(2.0), call(Func::Cos, b))
            )),
            (inner.clone(), 2u32..4).prop_map(|(a, n)| bin(BinOp::Pow, a, Expr::Num(n as f64))),
            inner.clone().prop_map(move |a| call(Func::Ln, positive(a))),
            inner
                .clone()
                .prop_map(move |a| call(Func::Sqrt, positive(a))),
            (
                prop_oneof![
                    Just(Func::Sin),
                    Just(Func::Cos),
                    Just(Func::Sinh),
                    Just(Func::Cosh),
                    Just(Func::Tanh),
                    Just(Func::Exp)
                ],
                inner
            )
                .prop_map(|(f, a)| call(f, a)),
        ]
    })
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    [-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64]
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_identity(e in any_expr()) {
        let f = ScalarField::from_expr(e, &TXY);
        let text = f.to_string();
        let once = ScalarField::parse(&text, &TXY).unwrap();
        prop_assert_eq!(once.expr(), f.expr());
        let twice = ScalarField::parse(&once.to_string(), &TXY).unwrap();
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn jets_match_finite_differences(e in smooth_expr(), p in point()) {
        let f = ScalarField::from_expr(e, &TXY);
        let jet = f.eval_jet2(&p).unwrap();
        prop_assume!(jet.value.abs() < 1e4);
        let plain = |q: &[f64]| f.eval(q).unwrap_or(f64::NAN);
        let grad = fd_oracle::gradient(&plain, &p, DEFAULT_STEP);
        let hess = fd_oracle::hessian(&plain, &p, DEFAULT_STEP);
        prop_assume!(grad.iter().chain(hess.iter().flatten()).all(|v| v.is_finite()));
        let g_scale = max_abs(jet.gradient);
        let h_scale = max_abs(jet.hessian.iter().flatten().copied());
        for i in 0..3 {
            prop_assert!((jet.gradient[i] - grad[i]).abs() <= 1e-6 * (1.0 + g_scale),
                "gradient {i}: {} vs {} for {f}", jet.gradient[i], grad[i]);
            for j in 0..3 {
                prop_assert!((jet.hessian[i][j] - hess[i][j]).abs() <= 1e-4 * (1.0 + h_scale),
                    "hessian {i}{j}: {} vs {} for {f}", jet.hessian[i][j], hess[i][j]);
                prop_assert_eq!(jet.hessian[i][j], jet.hessian[j][i]);
            }
        }
    }

    #[test]
    fn sum_and_product_rules(a in smooth_expr(), b in smooth_expr(), p in point()) {
        let (fa, fb) = (ScalarField::from_expr(a.clone(), &TXY), ScalarField::from_expr(b.clone(), &TXY));
        let (ja, jb) = (fa.eval_jet2(&p).unwrap(), fb.eval_jet2(&p).unwrap());
        let sum = ScalarField::from_expr(bin(BinOp::Add, a.clone(), b.clone()), &TXY).eval_jet2(&p).unwrap();
        let product = ScalarField::from_expr(bin(BinOp::Mul, a, b), &TXY).eval_jet2(&p).unwrap();
        prop_assert_eq!(sum, ja + jb);
        prop_assert_eq!(product, ja * jb);
    }

    #[test]
    fn constants_have_zero_derivatives(c in -1e3..1e3f64, p in point()) {
        let jet = ScalarField::constant(c, &TXY).eval_jet2(&p).unwrap();
        prop_assert_eq!(jet.value, c);
        prop_assert!(jet.gradient.iter().all(|v| *v == 0.0));
        prop_assert!(jet.hessian.iter().flatten().all(|v| *v == 0.0));
    }
}

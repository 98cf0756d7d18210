#![allow(dead_code)]

use apapr_core::apapr::ApaprManifold3D;
use apapr_core::constructions::{
    make_base, make_cone, make_hyperbolic_extension, BaseKind, BaseManifold2D, PKind,
};
use apapr_core::expr::{BinOp, ChartPoint, Expr, Func};
use apapr_core::riemann::{curvature, MetricField};
use astro_float::{BigFloat, Consts, RoundingMode};
use fd_oracle::DEFAULT_STEP;
use std::cell::RefCell;
use std::collections::HashMap;

/// The four base fixtures: two flat `W₀` bases, a round base with `k′ = 4`
/// and the flat, non-`W₀` conformal base `u = x`.
pub fn bases() -> Vec<BaseManifold2D> {
    [
        BaseKind::FlatProduct,
        BaseKind::FlatSwap,
        BaseKind::Round {
            k_prime: 4.0,
            p_kind: PKind::Swap,
        },
        BaseKind::Conformal {
            u: "x".into(),
            p_kind: PKind::Swap,
        },
    ]
    .into_iter()
    .map(|k| make_base(k).unwrap())
    .collect()
}

pub fn round(k_prime: f64) -> BaseManifold2D {
    make_base(BaseKind::Round {
        k_prime,
        p_kind: PKind::Swap,
    })
    .unwrap()
}

/// Both constructions over every base fixture, with a label.
pub fn manifolds() -> Vec<(String, ApaprManifold3D)> {
    bases()
        .into_iter()
        .flat_map(|b| {
            let name = b.kind().name();
            [
                (format!("cone/{name}"), make_cone(&b).unwrap()),
                (
                    format!("extension/{name}"),
                    make_hyperbolic_extension(&b).unwrap(),
                ),
            ]
        })
        .collect()
}

pub fn oracle_metric<const N: usize>(g: &MetricField<N>) -> impl Fn(&[f64]) -> Vec<Vec<f64>> + '_ {
    move |q: &[f64]| {
        (0..N)
            .map(|i| (0..N).map(|j| g.component(i, j).eval(q).unwrap()).collect())
            .collect()
    }
}

const BITS: usize = 128;
const RM: RoundingMode = RoundingMode::ToEven;

/// Evaluates `e` in 128-bit floating point. `None` outside the domain.
fn eval_precise(e: &Expr, q: &[BigFloat], cc: &mut Consts) -> Option<BigFloat> {
    let v = match e {
        Expr::Num(v) => BigFloat::from_f64(*v, BITS),
        Expr::Var(i) => q[*i].clone(),
        Expr::Neg(a) => eval_precise(a, q, cc)?.neg(),
        Expr::Binary(op, a, b) => {
            let (x, y) = (eval_precise(a, q, cc)?, eval_precise(b, q, cc)?);
            match op {
                BinOp::Add => x.add(&y, BITS, RM),
                BinOp::Sub => x.sub(&y, BITS, RM),
                BinOp::Mul => x.mul(&y, BITS, RM),
                BinOp::Div => x.div(&y, BITS, RM),
                BinOp::Pow => match b.as_ref() {
                    Expr::Num(n) if n.fract() == 0.0 => {
                        let r = x.powi(n.abs() as usize, BITS, RM);
                        if *n < 0.0 {
                            r.reciprocal(BITS, RM)
                        } else {
                            r
                        }
                    }
                    _ => x.pow(&y, BITS, RM, cc),
                },
            }
        }
        Expr::Call(f, a) => {
            let x = eval_precise(a, q, cc)?;
            match f {
                Func::Sin => x.sin(BITS, RM, cc),
                Func::Cos => x.cos(BITS, RM, cc),
                Func::Sinh => x.sinh(BITS, RM, cc),
                Func::Cosh => x.cosh(BITS, RM, cc),
                Func::Tanh => x.tanh(BITS, RM, cc),
                Func::Exp => x.exp(BITS, RM, cc),
                Func::Ln => x.ln(BITS, RM, cc),
                Func::Sqrt => x.sqrt(BITS, RM),
                Func::Abs => x.abs(),
            }
        }
    };
    (!v.is_nan() && !v.is_inf()).then_some(v)
}

fn to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().unwrap()
}

/// Metric offsets `g(p + d) - g(p)` evaluated in extended precision and
/// rounded once, for [`fd_oracle::riemann_down_from_offsets`].
pub fn precise_offsets<'a, const N: usize>(
    g: &'a MetricField<N>,
    p: &'a ChartPoint<N>,
) -> impl Fn(&[f64]) -> Vec<Vec<f64>> + 'a {
    let at = move |d: &[f64], cc: &mut Consts| -> Vec<Vec<BigFloat>> {
        let q: Vec<BigFloat> = (0..N)
            .map(|k| {
                BigFloat::from_f64(p.coords[k], BITS).add(&BigFloat::from_f64(d[k], BITS), BITS, RM)
            })
            .collect();
        let mut rows: Vec<Vec<BigFloat>> = vec![Vec::with_capacity(N); N];
        for i in 0..N {
            for j in 0..N {
                let v = if j < i {
                    rows[j][i].clone()
                } else {
                    eval_precise(g.component(i, j).expr(), &q, cc)
                        .expect("metric undefined near the point")
                };
                rows[i].push(v);
            }
        }
        rows
    };
    let cc = RefCell::new(Consts::new().unwrap());
    let base = at(&[0.0; N], &mut cc.borrow_mut());
    // nested stencils revisit the same displacements
    let memo = RefCell::new(HashMap::new());
    move |d: &[f64]| {
        let key: Vec<u64> = d.iter().map(|v| v.to_bits()).collect();
        if let Some(hit) = memo.borrow().get(&key) {
            return Vec::clone(hit);
        }
        let value: Vec<Vec<f64>> = at(d, &mut cc.borrow_mut())
            .iter()
            .zip(&base)
            .map(|(row, row0)| {
                row.iter()
                    .zip(row0)
                    .map(|(v, v0)| to_f64(&v.sub(v0, BITS, RM)))
                    .collect()
            })
            .collect();
        memo.borrow_mut().insert(key, value.clone());
        value
    }
}

/// Largest absolute differences between the engine's `Γ`, `R` and the
/// finite-difference oracle at `p`, with the metric offsets evaluated in
/// extended precision.
pub fn fd_disagreement<const N: usize>(g: &MetricField<N>, p: &ChartPoint<N>) -> (f64, f64) {
    let pack = curvature(g, p, None).unwrap();
    let (delta, gp) = (precise_offsets(g, p), oracle_metric(g)(&p.coords));
    let gamma = fd_oracle::christoffel_from_offsets(&delta, &gp, DEFAULT_STEP);
    let r = fd_oracle::riemann_down_from_offsets(&delta, &gp, DEFAULT_STEP);
    let (mut dg, mut dr) = (0.0f64, 0.0f64);
    for i in 0..N {
        for j in 0..N {
            for k in 0..N {
                dg = dg.max((pack.gamma.get(&[i, j, k]) - gamma[i][j][k]).abs());
                for w in 0..N {
                    dr = dr.max((pack.riemann.get(&[i, j, k, w]) - r[i][j][k][w]).abs());
                }
            }
        }
    }
    (dg, dr)
}

//! Scalar-field expressions over chart coordinates.
//!
//! Fields are parsed once into an [`Expr`] tree and then evaluated either as
//! plain values or as second-order jets ([`Jet2`]) carrying exact first and
//! second partial derivatives. Finite differences never enter this module.

mod jet;
mod parser;
mod point;

use std::fmt;

use thiserror::Error;

pub use jet::Jet2;
pub use point::{ChartPoint, DEFAULT_T_MIN};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("`{name}` takes {expected} argument(s), got {found} (byte {offset})")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        offset: usize,
    },
    #[error("domain error in `{subexpr}`: {reason}")]
    Domain { subexpr: String, reason: String },
    #[error("field is over {expected} coordinates but {found} were supplied")]
    CoordinateMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    /// `(f(u), f'(u), f''(u))`, or the reason `u` is outside the domain.
    fn derivatives(self, u: f64) -> Result<(f64, f64, f64), &'static str> {
        Ok(match self {
            Func::Sin => (u.sin(), u.cos(), -u.sin()),
            Func::Cos => (u.cos(), -u.sin(), -u.cos()),
            Func::Sinh => (u.sinh(), u.cosh(), u.sinh()),
            Func::Cosh => (u.cosh(), u.sinh(), u.cosh()),
            Func::Tanh => {
                let th = u.tanh();
                let sech2 = 1.0 - th * th;
                (th, sech2, -2.0 * th * sech2)
            }
            Func::Exp => {
                let e = u.exp();
                (e, e, e)
            }
            Func::Ln => {
                if u <= 0.0 {
                    return Err("logarithm of a non-positive value");
                }
                (u.ln(), 1.0 / u, -1.0 / (u * u))
            }
            Func::Sqrt => {
                if u <= 0.0 {
                    return Err("square root is not differentiable at non-positive values");
                }
                let s = u.sqrt();
                (s, 0.5 / s, -0.25 / (s * u))
            }
            Func::Abs => {
                if u == 0.0 {
                    return Err("absolute value is not differentiable at 0");
                }
                (u.abs(), u.signum(), 0.0)
            }
        })
    }
}

/// Expression tree. Variables are indices into the owning field's coordinate
/// list; literals produced by the parser are always non-negative.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn has_variables(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(_) => true,
            Expr::Neg(e) | Expr::Call(_, e) => e.has_variables(),
            Expr::Binary(_, a, b) => a.has_variables() || b.has_variables(),
        }
    }

    /// Fully parenthesised rendering; parsing it back yields the same tree.
    pub fn display<'a>(&'a self, coords: &'a [String]) -> impl fmt::Display + 'a {
        Printer { expr: self, coords }
    }
}

struct Printer<'a> {
    expr: &'a Expr,
    coords: &'a [String],
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |e: &'_ Expr| {
            Printer {
                expr: e,
                coords: self.coords,
            }
            .to_string()
        };
        match self.expr {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => match self.coords.get(*i) {
                Some(name) => f.write_str(name),
                None => write!(f, "<var{i}>"),
            },
            Expr::Neg(e) => write!(f, "(-{})", sub(e)),
            Expr::Binary(op, a, b) => write!(f, "({} {} {})", sub(a), op.symbol(), sub(b)),
            Expr::Call(func, a) => write!(f, "{}({})", func.name(), sub(a)),
        }
    }
}

/// A parsed scalar field on a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    expr: Expr,
    coords: Vec<String>,
}

/// Parses `text` as a field over `coords`.
pub fn parse_scalar_expr(text: &str, coords: &[&str]) -> Result<ScalarField, ExprError> {
    ScalarField::parse(text, coords)
}

impl ScalarField {
    pub fn parse(text: &str, coords: &[&str]) -> Result<Self, ExprError> {
        let coords: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
        let expr = parser::Parser::new(text, &coords)?.parse()?;
        Ok(Self { expr, coords })
    }

    pub fn constant(value: f64, coords: &[&str]) -> Self {
        Self {
            expr: Expr::Num(value),
            coords: coords.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn from_expr(expr: Expr, coords: &[&str]) -> Self {
        Self {
            expr,
            coords: coords.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn is_constant(&self) -> bool {
        !self.expr.has_variables()
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, ExprError> {
        if point.len() != self.coords.len() {
            return Err(ExprError::CoordinateMismatch {
                expected: self.coords.len(),
                found: point.len(),
            });
        }
        self.value_at(&self.expr, point)
    }

    /// Value, gradient and Hessian at `point`, exact up to rounding.
    pub fn eval_jet2<const N: usize>(&self, point: &[f64; N]) -> Result<Jet2<N>, ExprError> {
        if N != self.coords.len() {
            return Err(ExprError::CoordinateMismatch {
                expected: self.coords.len(),
                found: N,
            });
        }
        self.jet_at(&self.expr, point)
    }

    fn domain(&self, expr: &Expr, reason: &str) -> ExprError {
        ExprError::Domain {
            subexpr: expr.display(&self.coords).to_string(),
            reason: reason.to_string(),
        }
    }

    fn finite(&self, expr: &Expr, v: f64) -> Result<f64, ExprError> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.domain(expr, "non-finite result"))
        }
    }

    fn value_at(&self, expr: &Expr, p: &[f64]) -> Result<f64, ExprError> {
        let v = match expr {
            Expr::Num(v) => *v,
            Expr::Var(i) => p[*i],
            Expr::Neg(e) => -self.value_at(e, p)?,
            Expr::Call(func, e) => {
                let u = self.value_at(e, p)?;
                match func {
                    // plain evaluation tolerates the non-differentiable points
                    Func::Sqrt if u == 0.0 => 0.0,
                    Func::Abs => u.abs(),
                    _ => func.derivatives(u).map_err(|r| self.domain(expr, r))?.0,
                }
            }
            Expr::Binary(op, a, b) => {
                let (x, y) = (self.value_at(a, p)?, self.value_at(b, p)?);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(self.domain(expr, "division by zero"));
                        }
                        x / y
                    }
                    BinOp::Pow => {
                        if !b.has_variables() && y.fract() == 0.0 && y.abs() < i32::MAX as f64 {
                            if x == 0.0 && y < 0.0 {
                                return Err(self.domain(expr, "zero raised to a negative power"));
                            }
                            x.powi(y as i32)
                        } else {
                            if x <= 0.0 {
                                return Err(
                                    self.domain(expr, "non-positive base with real exponent")
                                );
                            }
                            x.powf(y)
                        }
                    }
                }
            }
        };
        self.finite(expr, v)
    }

    fn jet_at<const N: usize>(&self, expr: &Expr, p: &[f64; N]) -> Result<Jet2<N>, ExprError> {
        let jet = match expr {
            Expr::Num(v) => Jet2::constant(*v),
            Expr::Var(i) => Jet2::variable(*i, p[*i]),
            Expr::Neg(e) => -self.jet_at(e, p)?,
            Expr::Call(func, e) => {
                let u = self.jet_at(e, p)?;
                let (f, df, d2f) = func
                    .derivatives(u.value)
                    .map_err(|r| self.domain(expr, r))?;
                u.chain(f, df, d2f)
            }
            Expr::Binary(op, a, b) => {
                let x = self.jet_at(a, p)?;
                match op {
                    BinOp::Add => x + self.jet_at(b, p)?,
                    BinOp::Sub => x - self.jet_at(b, p)?,
                    BinOp::Mul => x * self.jet_at(b, p)?,
                    BinOp::Div => {
                        let y = self.jet_at(b, p)?;
                        if y.value == 0.0 {
                            return Err(self.domain(expr, "division by zero"));
                        }
                        x * y.recip()
                    }
                    BinOp::Pow => self.pow_jet(expr, x, b, p)?,
                }
            }
        };
        self.finite(expr, jet.value)?;
        Ok(jet)
    }

    fn pow_jet<const N: usize>(
        &self,
        expr: &Expr,
        base: Jet2<N>,
        exponent: &Expr,
        p: &[f64; N],
    ) -> Result<Jet2<N>, ExprError> {
        let u = base.value;
        if !exponent.has_variables() {
            let c = self.value_at(exponent, &p[..])?;
            if c.fract() == 0.0 && c.abs() < i32::MAX as f64 {
                let n = c as i32;
                if u == 0.0 && n < 0 {
                    return Err(self.domain(expr, "zero raised to a negative power"));
                }
                let f = u.powi(n);
                let df = if n == 0 { 0.0 } else { c * u.powi(n - 1) };
                let d2f = if n == 0 || n == 1 {
                    0.0
                } else {
                    c * (c - 1.0) * u.powi(n - 2)
                };
                return Ok(base.chain(f, df, d2f));
            }
            if u <= 0.0 {
                return Err(self.domain(expr, "non-positive base with real exponent"));
            }
            let f = u.powf(c);
            return Ok(base.chain(f, c * f / u, c * (c - 1.0) * f / (u * u)));
        }
        if u <= 0.0 {
            return Err(self.domain(expr, "non-positive base with variable exponent"));
        }
        let ln_base = base.chain(u.ln(), 1.0 / u, -1.0 / (u * u));
        let e = ln_base * self.jet_at(exponent, p)?;
        Ok(e.chain(e.value.exp(), e.value.exp(), e.value.exp()))
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.display(&self.coords).fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TXY: [&str; 3] = ["t", "x", "y"];
    const XY: [&str; 2] = ["x", "y"];

    #[test]
    fn zero_literal() {
        let f = parse_scalar_expr("0", &TXY).unwrap();
        assert_eq!(f.expr(), &Expr::Num(0.0));
        assert!(f.is_constant());
    }

    #[test]
    fn cosh_of_scaled_t() {
        let f = parse_scalar_expr("cosh(2*t)", &TXY).unwrap();
        let want = Expr::Call(
            Func::Cosh,
            Box::new(Expr::Binary(
                BinOp::Mul,
                Box::new(Expr::Num(2.0)),
                Box::new(Expr::Var(0)),
            )),
        );
        assert_eq!(f.expr(), &want);
        let j = f.eval_jet2(&[0.0, 0.3, -0.2]).unwrap();
        assert_eq!(j.value, 1.0);
        assert_eq!(j.gradient, [0.0; 3]);
        assert_eq!(j.hessian[0][0], 4.0);
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_scalar_expr("2^3^2", &XY).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), 512.0);
        let f = parse_scalar_expr("-x^2", &XY).unwrap();
        assert_eq!(f.eval(&[3.0, 0.0]).unwrap(), -9.0);
        let f = parse_scalar_expr("1 - 2 - 3", &XY).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), -4.0);
        let f = parse_scalar_expr("8 / 4 / 2", &XY).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), 1.0);
        let f = parse_scalar_expr("1 + 2 * 3", &XY).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), 7.0);
        let f = parse_scalar_expr("2^-1", &XY).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), 0.5);
        let f = parse_scalar_expr("  x*  y\t", &XY).unwrap();
        assert_eq!(f.eval(&[2.0, 3.0]).unwrap(), 6.0);
        let f = parse_scalar_expr("1.5e-1 * 2E1", &XY).unwrap();
        assert!((f.eval(&[0.0, 0.0]).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn print_parse_fixpoint() {
        let text = "-ln(1 + (x^2+y^2))";
        let f = parse_scalar_expr(text, &XY).unwrap();
        let printed = f.to_string();
        let g = parse_scalar_expr(&printed, &XY).unwrap();
        assert_eq!(f, g);
        assert_eq!(g.to_string(), printed);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse_scalar_expr("x + * y", &XY) {
            Err(ExprError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        match parse_scalar_expr("(x + y", &XY) {
            Err(ExprError::Syntax { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("{other:?}"),
        }
        match parse_scalar_expr("x $ y", &XY) {
            Err(ExprError::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_scalar_expr("   ", &XY), Err(ExprError::Empty));
    }

    #[test]
    fn unknown_identifier_and_arity() {
        assert_eq!(
            parse_scalar_expr("t + 1", &XY),
            Err(ExprError::UnknownIdentifier {
                name: "t".into(),
                offset: 0
            })
        );
        assert!(matches!(
            parse_scalar_expr("sin(x, y)", &XY),
            Err(ExprError::Arity {
                found: 2,
                expected: 1,
                ..
            })
        ));
        assert!(matches!(
            parse_scalar_expr("exp()", &XY),
            Err(ExprError::Arity { found: 0, .. })
        ));
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let f = parse_scalar_expr("1 + ln(x - 1)", &XY).unwrap();
        match f.eval_jet2(&[0.5, 0.0]) {
            Err(ExprError::Domain { subexpr, .. }) => assert_eq!(subexpr, "ln((x - 1))"),
            other => panic!("{other:?}"),
        }
        let f = parse_scalar_expr("1 / y", &XY).unwrap();
        assert!(matches!(
            f.eval_jet2(&[1.0, 0.0]),
            Err(ExprError::Domain { .. })
        ));
        let f = parse_scalar_expr("x^0.5", &XY).unwrap();
        assert!(matches!(
            f.eval_jet2(&[-1.0, 0.0]),
            Err(ExprError::Domain { .. })
        ));
    }

    #[test]
    fn integer_powers_of_negative_bases() {
        let f = parse_scalar_expr("x^3", &XY).unwrap();
        let j = f.eval_jet2(&[-2.0, 0.0]).unwrap();
        assert_eq!(j.value, -8.0);
        assert_eq!(j.gradient[0], 12.0);
        assert_eq!(j.hessian[0][0], -12.0);
    }

    #[test]
    fn coordinate_count_is_checked() {
        let f = parse_scalar_expr("x", &XY).unwrap();
        assert!(matches!(
            f.eval_jet2(&[1.0, 2.0, 3.0]),
            Err(ExprError::CoordinateMismatch {
                expected: 2,
                found: 3
            })
        ));
    }
}

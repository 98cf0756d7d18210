use serde::{Deserialize, Serialize};

use crate::expr::{ChartPoint, ScalarField};
use crate::riemann::{curvature, sectional, MetricField};
use crate::tensor::{build_paracomplex_basis, FrameData, Orientation, TensorValue};
use crate::{Error, Result};

pub(crate) const XY: [&str; 2] = ["x", "y"];

/// Constant-component almost paracomplex structure on a base chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PKind {
    /// `P∂x = ∂y`, `P∂y = ∂x`.
    Swap,
    /// `P∂x = ∂x`, `P∂y = −∂y`.
    Product,
}

impl PKind {
    pub fn name(self) -> &'static str {
        match self {
            PKind::Swap => "swap",
            PKind::Product => "product",
        }
    }

    /// `m[k][j] = P^k_j`.
    pub fn matrix(self) -> [[f64; 2]; 2] {
        match self {
            PKind::Swap => [[0.0, 1.0], [1.0, 0.0]],
            PKind::Product => [[1.0, 0.0], [0.0, -1.0]],
        }
    }
}

/// The base fixtures. Every base is conformally flat, `h = e^{2u}(dx² + dy²)`.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseKind {
    FlatProduct,
    FlatSwap,
    /// Constant curvature `k_prime`, `u = −ln(1 + k′(x² + y²)/4)`.
    Round {
        k_prime: f64,
        p_kind: PKind,
    },
    Conformal {
        u: String,
        p_kind: PKind,
    },
}

impl BaseKind {
    pub fn name(&self) -> &'static str {
        match self {
            BaseKind::FlatProduct => "flat_product",
            BaseKind::FlatSwap => "flat_swap",
            BaseKind::Round { .. } => "round",
            BaseKind::Conformal { .. } => "conformal",
        }
    }
}

/// A 2-dimensional almost paracomplex Riemannian chart `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseManifold2D {
    kind: BaseKind,
    u: ScalarField,
    p_kind: PKind,
    metric: MetricField<2>,
}

/// Builds a base fixture.
pub fn make_base(kind: BaseKind) -> Result<BaseManifold2D> {
    let (u_text, p_kind) = match &kind {
        BaseKind::FlatProduct => ("0".to_string(), PKind::Product),
        BaseKind::FlatSwap => ("0".to_string(), PKind::Swap),
        BaseKind::Round { k_prime, p_kind } => {
            if !k_prime.is_finite() {
                return Err(Error::Domain(format!("k' = {k_prime} is not finite")));
            }
            (format!("-ln(1 + {k_prime}*(x^2 + y^2)/4)"), *p_kind)
        }
        BaseKind::Conformal { u, p_kind } => (u.clone(), *p_kind),
    };
    let u = ScalarField::parse(&u_text, &XY)?;
    let c = ScalarField::parse(&format!("exp(2*{u})"), &XY)?;
    let zero = ScalarField::constant(0.0, &XY);
    let metric = MetricField::from_upper(|i, j| if i == j { c.clone() } else { zero.clone() });
    Ok(BaseManifold2D {
        kind,
        u,
        p_kind,
        metric,
    })
}

impl BaseManifold2D {
    pub fn kind(&self) -> &BaseKind {
        &self.kind
    }

    /// The conformal factor `u` of `h = e^{2u}(dx² + dy²)`.
    pub fn u(&self) -> &ScalarField {
        &self.u
    }

    pub fn p_kind(&self) -> PKind {
        self.p_kind
    }

    pub fn metric(&self) -> &MetricField<2> {
        &self.metric
    }

    pub fn p_tensor(&self) -> TensorValue {
        TensorValue::endomorphism(&self.p_kind.matrix())
    }

    pub fn p_fields(&self) -> [[ScalarField; 2]; 2] {
        let m = self.p_kind.matrix();
        std::array::from_fn(|k| std::array::from_fn(|j| ScalarField::constant(m[k][j], &XY)))
    }

    /// Rejects points outside the chart; the round chart is restricted to
    /// `1 + k′(x² + y²)/4 > 1/2`.
    pub fn check_domain(&self, x: f64, y: f64) -> Result<()> {
        if let BaseKind::Round { k_prime, .. } = self.kind {
            let s = 1.0 + k_prime * (x * x + y * y) / 4.0;
            if !(s > 0.5) {
                return Err(Error::Domain(format!(
                    "({x}, {y}) lies outside the round chart: 1 + k'r^2/4 = {s}"
                )));
            }
        }
        Ok(())
    }

    pub fn point(&self, x: f64, y: f64) -> Result<ChartPoint<2>> {
        self.check_domain(x, y)?;
        ChartPoint::new([x, y])
    }

    pub fn h(&self, p: &ChartPoint<2>) -> Result<TensorValue> {
        self.metric.value(p)
    }

    /// `h̃(x, y) = h(x, Py)`.
    pub fn h_tilde(&self, p: &ChartPoint<2>) -> Result<TensorValue> {
        let h = self.h(p)?;
        let m = self.p_kind.matrix();
        Ok(TensorValue::from_fn(2, h.variance().to_vec(), |i| {
            (0..2).map(|k| h.get(&[i[0], k]) * m[k][i[1]]).sum()
        }))
    }

    /// Gaussian curvature from the closed form `k′ = −e^{−2u} Δu`.
    pub fn k_prime(&self, p: &ChartPoint<2>) -> Result<f64> {
        let jet = self.u.eval_jet2(&p.coords)?;
        Ok(-(-2.0 * jet.value).exp() * (jet.hessian[0][0] + jet.hessian[1][1]))
    }

    /// Gaussian curvature as the engine's sectional curvature of the chart.
    pub fn k_prime_engine(&self, p: &ChartPoint<2>) -> Result<f64> {
        let pack = curvature(&self.metric, p, None)?;
        sectional(&pack.riemann, &pack.metric, &[1.0, 0.0], &[0.0, 1.0])
    }

    /// Orthonormal `P`-adapted frame `{e1, e2}` with `Pe1 = e2`.
    pub fn frame(&self, p: &ChartPoint<2>, orientation: Orientation) -> Result<FrameData> {
        build_paracomplex_basis(&self.h(p)?, &self.p_tensor(), orientation)
    }

    /// `max |h(Px, Py) − h(x, y)|` over coordinate vectors, together with
    /// `max |P² − I|` and `|tr P|`.
    pub fn structure_residuals(&self, p: &ChartPoint<2>) -> Result<(f64, f64, f64)> {
        let h = self.h(p)?;
        let m = self.p_kind.matrix();
        let mut compat: f64 = 0.0;
        let mut square: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut php = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        php += m[a][i] * h.get(&[a, b]) * m[b][j];
                    }
                }
                compat = compat.max((php - h.get(&[i, j])).abs());
                let sq: f64 = (0..2).map(|k| m[i][k] * m[k][j]).sum();
                square = square.max((sq - (i == j) as u8 as f64).abs());
            }
        }
        Ok((compat, square, (m[0][0] + m[1][1]).abs()))
    }
}

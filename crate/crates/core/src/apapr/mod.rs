//! The almost paracontact almost paracomplex structure layer: axioms,
//! fundamental tensor, Lee forms and associated metrics.

mod base;
mod lee;

use serde::Serialize;

use crate::constructions::BaseManifold2D;
use crate::expr::{ChartPoint, ScalarField, DEFAULT_T_MIN};
use crate::riemann::{
    christoffel, christoffel_in_frame, covariant_derivative_11_from, MetricField,
};
use crate::tensor::{build_phi_basis, signature, FrameData, Orientation, TensorValue, Variance};
use crate::{Error, Result};

pub use base::{base_fundamental_fprime, base_lee_theta_prime, BaseFundamental};
pub use lee::{f_symmetry_residuals, lee_forms, FSymmetryResiduals, LeeForms};

/// Pointwise tolerance of the structure axioms.
pub const STRUCTURE_TOLERANCE: f64 = 1e-10;

pub(crate) const TXY: [&str; 3] = ["t", "x", "y"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionTag {
    Cone,
    HyperbolicExtension,
    Custom,
}

/// A 3-dimensional chart `(t, x, y)` with metric and structure fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ApaprManifold3D {
    g: MetricField<3>,
    phi: [[ScalarField; 3]; 3],
    xi: [ScalarField; 3],
    eta: [ScalarField; 3],
    construction: ConstructionTag,
    base: Option<BaseManifold2D>,
    t_min: f64,
}

/// Coordinate values of the metric and structure at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureAt {
    pub g: TensorValue,
    /// `φ^k_j`.
    pub phi: TensorValue,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
}

/// Residual of every structure axiom at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureValidation {
    /// `max |φ² − I + ξ⊗η|`
    pub phi_squared: f64,
    /// `|η(ξ) − 1|`
    pub eta_xi: f64,
    /// `max |η∘φ|`
    pub eta_phi: f64,
    /// `max |φξ|`
    pub phi_xi: f64,
    /// `|tr φ|`
    pub trace: f64,
    /// `max |g(φ·, φ·) − g + η⊗η|`
    pub compatibility: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl StructureValidation {
    pub fn max(&self) -> f64 {
        [
            self.phi_squared,
            self.eta_xi,
            self.eta_phi,
            self.phi_xi,
            self.trace,
            self.compatibility,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `F(x, y, z) = g((∇_x φ) y, z)` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalTensor {
    /// Coordinate components `F_ijk`.
    pub coordinate: TensorValue,
    /// The φ-basis used for `components`.
    pub frame: FrameData,
    /// Components `F(e_i, e_j, e_k)` in the φ-basis.
    pub components: TensorValue,
}

/// `g̃(x, y) = g(x, φy) + η(x)η(y)` and its eigenvalue signature.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociatedMetric {
    pub metric: TensorValue,
    pub signature: (usize, usize),
}

impl ApaprManifold3D {
    pub fn new(
        g: MetricField<3>,
        phi: [[ScalarField; 3]; 3],
        xi: [ScalarField; 3],
        eta: [ScalarField; 3],
        construction: ConstructionTag,
        base: Option<BaseManifold2D>,
    ) -> Self {
        Self {
            g,
            phi,
            xi,
            eta,
            construction,
            base,
            t_min: DEFAULT_T_MIN,
        }
    }

    pub fn with_t_min(mut self, t_min: f64) -> Self {
        self.t_min = t_min;
        self
    }

    pub fn metric(&self) -> &MetricField<3> {
        &self.g
    }

    pub fn phi_fields(&self) -> &[[ScalarField; 3]; 3] {
        &self.phi
    }

    pub fn construction(&self) -> ConstructionTag {
        self.construction
    }

    pub fn base(&self) -> Option<&BaseManifold2D> {
        self.base.as_ref()
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    /// A chart point, checked against `t_min` and the base chart's domain.
    pub fn point(&self, t: f64, x: f64, y: f64) -> Result<ChartPoint<3>> {
        if let Some(base) = &self.base {
            base.check_domain(x, y)?;
        }
        ChartPoint::construction(t, x, y, self.t_min)
    }

    /// The same manifold with every component of `φ` multiplied by `factor`.
    pub fn with_scaled_phi(&self, factor: f64) -> Result<Self> {
        let mut out = self.clone();
        for row in out.phi.iter_mut() {
            for f in row.iter_mut() {
                *f = ScalarField::parse(&format!("{factor}*{f}"), &TXY)?;
            }
        }
        out.construction = ConstructionTag::Custom;
        Ok(out)
    }

    pub fn structure_at(&self, p: &ChartPoint<3>) -> Result<StructureAt> {
        let eval = |f: &ScalarField| f.eval(&p.coords);
        let mut phi = TensorValue::zeros(3, vec![Variance::Upper, Variance::Lower]);
        for k in 0..3 {
            for j in 0..3 {
                phi.set(&[k, j], eval(&self.phi[k][j])?);
            }
        }
        let xi = self
            .xi
            .iter()
            .map(eval)
            .collect::<std::result::Result<_, _>>()?;
        let eta = self
            .eta
            .iter()
            .map(eval)
            .collect::<std::result::Result<_, _>>()?;
        Ok(StructureAt {
            g: self.g.value(p)?,
            phi,
            xi,
            eta,
        })
    }

    /// Residuals of the structure axioms; `pass` iff all are below
    /// [`STRUCTURE_TOLERANCE`].
    pub fn validate_structure(&self, p: &ChartPoint<3>) -> Result<StructureValidation> {
        self.validate_structure_with(p, STRUCTURE_TOLERANCE)
    }

    pub fn validate_structure_with(
        &self,
        p: &ChartPoint<3>,
        tolerance: f64,
    ) -> Result<StructureValidation> {
        let s = self.structure_at(p)?;
        let phi = |k: usize, j: usize| s.phi.get(&[k, j]);
        let g = |i: usize, j: usize| s.g.get(&[i, j]);
        let mut v = StructureValidation {
            phi_squared: 0.0,
            eta_xi: ((0..3).map(|i| s.eta[i] * s.xi[i]).sum::<f64>() - 1.0).abs(),
            eta_phi: 0.0,
            phi_xi: 0.0,
            trace: (phi(0, 0) + phi(1, 1) + phi(2, 2)).abs(),
            compatibility: 0.0,
            tolerance,
            pass: false,
        };
        for k in 0..3 {
            let fx: f64 = (0..3).map(|j| phi(k, j) * s.xi[j]).sum();
            let ef: f64 = (0..3).map(|m| s.eta[m] * phi(m, k)).sum();
            v.phi_xi = v.phi_xi.max(fx.abs());
            v.eta_phi = v.eta_phi.max(ef.abs());
            for j in 0..3 {
                let sq: f64 = (0..3).map(|m| phi(k, m) * phi(m, j)).sum();
                let expected = (k == j) as u8 as f64 - s.xi[k] * s.eta[j];
                v.phi_squared = v.phi_squared.max((sq - expected).abs());
                let mut compat = 0.0;
                for a in 0..3 {
                    for b in 0..3 {
                        compat += phi(a, k) * g(a, b) * phi(b, j);
                    }
                }
                let expected = g(k, j) - s.eta[k] * s.eta[j];
                v.compatibility = v.compatibility.max((compat - expected).abs());
            }
        }
        v.pass = v.max() < tolerance;
        Ok(v)
    }

    /// Canonical φ-basis at `p`.
    pub fn phi_basis(&self, p: &ChartPoint<3>, orientation: Orientation) -> Result<FrameData> {
        let s = self.structure_at(p)?;
        build_phi_basis(&s.g, &s.phi, &s.xi, orientation)
    }

    /// `∇φ` at `p`, indexed `[i][k][j] = (∇_i φ)^k_j`.
    pub fn nabla_phi(&self, p: &ChartPoint<3>) -> Result<TensorValue> {
        let (phi, dphi) = self.phi_jet(p)?;
        Ok(covariant_derivative_11_from(
            &christoffel(&self.g, p)?,
            &rows2(&phi),
            &rows3(&dphi),
        ))
    }

    /// `∇φ` with all components taken in `frame`, computed in the linear chart
    /// spanned by the frame so that an ill-conditioned coordinate metric does
    /// not enter the connection.
    pub fn nabla_phi_in_frame(&self, p: &ChartPoint<3>, frame: &FrameData) -> Result<TensorValue> {
        let (phi, dphi) = self.phi_jet(p)?;
        let gamma = christoffel_in_frame(&self.g, p, frame)?;
        let (phi, dphi) = (phi.to_frame(frame)?, dphi.to_frame(frame)?);
        Ok(covariant_derivative_11_from(
            &gamma,
            &rows2(&phi),
            &rows3(&dphi),
        ))
    }

    /// `φ^k_j` and `∂_i φ^k_j` (indexed `[i][k][j]`).
    fn phi_jet(&self, p: &ChartPoint<3>) -> Result<(TensorValue, TensorValue)> {
        let mut phi = TensorValue::zeros(3, vec![Variance::Upper, Variance::Lower]);
        let mut dphi =
            TensorValue::zeros(3, vec![Variance::Lower, Variance::Upper, Variance::Lower]);
        for k in 0..3 {
            for j in 0..3 {
                let jet = self.phi[k][j].eval_jet2(&p.coords)?;
                phi.set(&[k, j], jet.value);
                for i in 0..3 {
                    dphi.set(&[i, k, j], jet.gradient[i]);
                }
            }
        }
        Ok((phi, dphi))
    }

    /// The fundamental tensor in coordinates and in the canonical φ-basis.
    pub fn fundamental_f(
        &self,
        p: &ChartPoint<3>,
        orientation: Orientation,
    ) -> Result<FundamentalTensor> {
        let frame = self.phi_basis(p, orientation)?;
        let lower = |nabla: &TensorValue, g: &TensorValue| {
            TensorValue::from_fn(3, vec![Variance::Lower; 3], |idx| {
                let (i, j, k) = (idx[0], idx[1], idx[2]);
                (0..3).map(|l| nabla.get(&[i, l, j]) * g.get(&[l, k])).sum()
            })
        };
        let g = self.g.value(p)?;
        let coordinate = lower(&self.nabla_phi(p)?, &g);
        let components = lower(&self.nabla_phi_in_frame(p, &frame)?, &g.to_frame(&frame)?);
        Ok(FundamentalTensor {
            coordinate,
            frame,
            components,
        })
    }

    pub fn associated_metric(&self, p: &ChartPoint<3>) -> Result<AssociatedMetric> {
        let s = self.structure_at(p)?;
        let metric = TensorValue::from_fn(3, vec![Variance::Lower; 2], |idx| {
            let (i, j) = (idx[0], idx[1]);
            let gphi: f64 = (0..3).map(|m| s.g.get(&[i, m]) * s.phi.get(&[m, j])).sum();
            gphi + s.eta[i] * s.eta[j]
        });
        let scale = metric.max_abs().max(1.0);
        Ok(AssociatedMetric {
            signature: signature(&metric, 1e-12 * scale),
            metric,
        })
    }

    /// Checks the connection identities of the two constructions with
    /// `ξ = ∂t` and lifts `y′` of base vectors (t-independent coordinate
    /// components):
    ///
    /// * cone: `∇_ξ y′ = y′/t`, `∇_{y′} ξ = y′/t`, `∇_ξ ξ = 0`;
    /// * hyperbolic extension: `∇_ξ y′ = Py′`, `∇_{y′} ξ = Py′`, `∇_ξ ξ = 0`.
    ///
    /// Residuals are `g`-norms, taken over `y′ ∈ {e1, e2}` of the φ-basis.
    pub fn connection_identities(&self, p: &ChartPoint<3>) -> Result<ConnectionIdentities> {
        let base = self.base.as_ref().ok_or_else(|| {
            Error::DegenerateStructure("connection identities need a base".into())
        })?;
        let t = p.t();
        let expected: Box<dyn Fn(&[f64]) -> Vec<f64>> = match self.construction {
            ConstructionTag::Cone => Box::new(move |v: &[f64]| v.iter().map(|c| c / t).collect()),
            ConstructionTag::HyperbolicExtension => {
                let m = base.p_kind().matrix();
                Box::new(move |v: &[f64]| {
                    vec![
                        0.0,
                        m[0][0] * v[1] + m[0][1] * v[2],
                        m[1][0] * v[1] + m[1][1] * v[2],
                    ]
                })
            }
            ConstructionTag::Custom => {
                return Err(Error::DegenerateStructure(
                    "connection identities are defined for the two constructions only".into(),
                ))
            }
        };
        let frame = self.phi_basis(p, Orientation::default())?;
        // Constant-component fields stay constant in the linear chart of the
        // frame, where ∇_a b = a^i Γ^k_ij b^j and the metric is the identity.
        let gamma = christoffel_in_frame(&self.g, p, &frame)?;
        let coframe = frame.coframe()?;
        let in_frame = |v: &[f64]| -> Vec<f64> {
            (0..3)
                .map(|a| (0..3).map(|i| coframe[(a, i)] * v[i]).sum())
                .collect()
        };
        let nabla = |a: &[f64], b: &[f64]| -> Vec<f64> {
            (0..3)
                .map(|k| {
                    (0..3)
                        .map(|i| {
                            (0..3)
                                .map(|j| a[i] * gamma.get(&[k, i, j]) * b[j])
                                .sum::<f64>()
                        })
                        .sum()
                })
                .collect()
        };
        let gnorm = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
        let diff = |a: Vec<f64>, b: Vec<f64>| -> Vec<f64> {
            a.iter().zip(&b).map(|(x, y)| x - y).collect()
        };
        let xi = in_frame(&[1.0, 0.0, 0.0]);
        let mut out = ConnectionIdentities {
            xi_y: 0.0,
            y_xi: 0.0,
            xi_xi: gnorm(&nabla(&xi, &xi)),
        };
        for y in &frame.vectors[1..] {
            let want = in_frame(&expected(y));
            let y = in_frame(y);
            out.xi_y = out.xi_y.max(gnorm(&diff(nabla(&xi, &y), want.clone())));
            out.y_xi = out.y_xi.max(gnorm(&diff(nabla(&y, &xi), want)));
        }
        Ok(out)
    }
}

/// Residuals of the construction's connection identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConnectionIdentities {
    pub xi_y: f64,
    pub y_xi: f64,
    pub xi_xi: f64,
}

impl ConnectionIdentities {
    pub fn max(&self) -> f64 {
        self.xi_y.max(self.y_xi).max(self.xi_xi)
    }
}

fn rows2(t: &TensorValue) -> Vec<Vec<f64>> {
    (0..3)
        .map(|k| (0..3).map(|j| t.get(&[k, j])).collect())
        .collect()
}

fn rows3(t: &TensorValue) -> Vec<Vec<Vec<f64>>> {
    (0..3)
        .map(|i| {
            (0..3)
                .map(|k| (0..3).map(|j| t.get(&[i, k, j])).collect())
                .collect()
        })
        .collect()
}

/// `h̃(x, y) = h(x, Py)` on a base chart, with its signature.
pub fn base_associated_metric(
    base: &BaseManifold2D,
    p: &ChartPoint<2>,
) -> Result<AssociatedMetric> {
    let metric = base.h_tilde(p)?;
    let scale = metric.max_abs().max(1.0);
    Ok(AssociatedMetric {
        signature: signature(&metric, 1e-12 * scale),
        metric,
    })
}

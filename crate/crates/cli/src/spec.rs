//! The JSON manifold specification.

use apapr_core::apapr::ApaprManifold3D;
use apapr_core::constructions::{
    make_base, make_cone, make_hyperbolic_extension, sample_points, BaseKind, PKind, SamplingPlan,
    DEFAULT_SEED, DEFAULT_T_RANGE, DEFAULT_XY_BOX,
};
use apapr_core::expr::ChartPoint;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Cone,
    HyperbolicExtension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseName {
    FlatProduct,
    FlatSwap,
    Round,
    Conformal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSpec {
    pub kind: BaseName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_kind: Option<PKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    pub count: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub t_range: Option<[f64; 2]>,
    #[serde(default)]
    pub xy_box: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "Tolerances::default_structure")]
    pub structure: f64,
    #[serde(default = "Tolerances::default_class")]
    pub class: f64,
    #[serde(default = "Tolerances::default_curvature")]
    pub curvature: f64,
}

impl Tolerances {
    fn default_structure() -> f64 {
        1e-10
    }
    fn default_class() -> f64 {
        1e-8
    }
    fn default_curvature() -> f64 {
        1e-6
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            structure: Self::default_structure(),
            class: Self::default_class(),
            curvature: Self::default_curvature(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    pub construction: Construction,
    pub base: BaseSpec,
    #[serde(default)]
    pub points: Option<Vec<[f64; 3]>>,
    #[serde(default)]
    pub sampling: Option<SamplingSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError::Spec(message.into())
}

impl ManifoldSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: Self = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), CliError> {
        match (&self.points, &self.sampling) {
            (Some(_), Some(_)) => {
                return Err(invalid("give either `points` or `sampling`, not both"))
            }
            (None, None) => return Err(invalid("one of `points` or `sampling` is required")),
            (Some(p), None) if p.is_empty() => {
                return Err(invalid("empty sample: `points` is empty"))
            }
            (None, Some(s)) if s.count == 0 => {
                return Err(invalid("empty sample: `sampling.count` is 0"))
            }
            _ => {}
        }
        check_tolerances(&self.tolerances)?;
        let b = &self.base;
        let fixed = match b.kind {
            BaseName::FlatProduct => Some(PKind::Product),
            BaseName::FlatSwap => Some(PKind::Swap),
            _ => None,
        };
        if let (Some(f), Some(p)) = (fixed, b.p_kind) {
            if f != p {
                return Err(invalid(format!(
                    "base `{}` implies p_kind `{}`",
                    self.base_kind_name(),
                    f.name()
                )));
            }
        }
        if b.k_prime.is_some() != (b.kind == BaseName::Round) {
            return Err(invalid(
                "`k_prime` is required for, and only allowed with, the round base",
            ));
        }
        if b.u.is_some() != (b.kind == BaseName::Conformal) {
            return Err(invalid(
                "`u` is required for, and only allowed with, the conformal base",
            ));
        }
        Ok(())
    }

    fn base_kind_name(&self) -> &'static str {
        match self.base.kind {
            BaseName::FlatProduct => "flat_product",
            BaseName::FlatSwap => "flat_swap",
            BaseName::Round => "round",
            BaseName::Conformal => "conformal",
        }
    }

    pub fn base_kind(&self) -> BaseKind {
        let p_kind = self.base.p_kind.unwrap_or(PKind::Swap);
        match self.base.kind {
            BaseName::FlatProduct => BaseKind::FlatProduct,
            BaseName::FlatSwap => BaseKind::FlatSwap,
            BaseName::Round => BaseKind::Round {
                k_prime: self.base.k_prime.unwrap_or_default(),
                p_kind,
            },
            BaseName::Conformal => BaseKind::Conformal {
                u: self.base.u.clone().unwrap_or_default(),
                p_kind,
            },
        }
    }

    pub fn manifold(&self) -> Result<ApaprManifold3D, CliError> {
        let base = make_base(self.base_kind()).map_err(|e| invalid(format!("base: {e}")))?;
        let m = match self.construction {
            Construction::Cone => make_cone(&base),
            Construction::HyperbolicExtension => make_hyperbolic_extension(&base),
        };
        m.map_err(|e| invalid(format!("construction: {e}")))
    }

    /// Effective seed: `--seed`, else `sampling.seed`, else the default.
    /// `None` for explicit point lists.
    pub fn seed(&self, seed_override: Option<u64>) -> Option<u64> {
        self.sampling
            .as_ref()
            .map(|s| seed_override.or(s.seed).unwrap_or(DEFAULT_SEED))
    }

    pub fn t_range(&self) -> (f64, f64) {
        self.sampling
            .as_ref()
            .and_then(|s| s.t_range)
            .map_or(DEFAULT_T_RANGE, |[a, b]| (a, b))
    }

    pub fn xy_box(&self) -> (f64, f64) {
        self.sampling
            .as_ref()
            .and_then(|s| s.xy_box)
            .map_or(DEFAULT_XY_BOX, |[a, b]| (a, b))
    }

    /// The explicit points, or the seeded sample.
    pub fn points(
        &self,
        m: &ApaprManifold3D,
        seed_override: Option<u64>,
    ) -> Result<Vec<ChartPoint<3>>, CliError> {
        if let Some(list) = &self.points {
            return list
                .iter()
                .enumerate()
                .map(|(i, &[t, x, y])| {
                    m.point(t, x, y)
                        .map_err(|e| invalid(format!("points[{i}]: {e}")))
                })
                .collect();
        }
        let s = self.sampling.as_ref().expect("validated");
        let plan = SamplingPlan {
            count: s.count,
            seed: self.seed(seed_override).unwrap_or(DEFAULT_SEED),
            t_range: self.t_range(),
            xy_box: self.xy_box(),
        };
        sample_points(m, &plan).map_err(|e| invalid(format!("sampling: {e}")))
    }

    /// `n` values of `t` spaced evenly over the `t` range, times an `n × n`
    /// grid on the `xy` box; grid points outside the base chart are skipped.
    pub fn grid(&self, m: &ApaprManifold3D, n: usize) -> Result<Vec<ChartPoint<3>>, CliError> {
        if n == 0 {
            return Err(invalid("empty sample: --grid must be at least 1"));
        }
        let axis = |(lo, hi): (f64, f64)| -> Vec<f64> {
            if n == 1 {
                return vec![lo];
            }
            (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect()
        };
        let (ts, xs) = (axis(self.t_range()), axis(self.xy_box()));
        let mut out = Vec::new();
        for &t in &ts {
            for &x in &xs {
                for &y in &xs {
                    match m.point(t, x, y) {
                        Ok(p) => out.push(p),
                        Err(apapr_core::Error::Domain(_)) => {}
                        Err(e) => return Err(invalid(e.to_string())),
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(invalid("empty sample: no grid point lies in the chart"));
        }
        Ok(out)
    }
}

pub fn check_tolerances(t: &Tolerances) -> Result<(), CliError> {
    for (name, v) in [
        ("structure", t.structure),
        ("class", t.class),
        ("curvature", t.curvature),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(format!(
                "tolerance `{name}` must be positive, got {v}"
            )));
        }
    }
    Ok(())
}

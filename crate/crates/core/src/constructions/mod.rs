//! Base fixtures, the cone and the hyperbolic extension, closed-form
//! component tables, and seeded point sampling.

mod base;
mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::apapr::{base_fundamental_fprime, ApaprManifold3D, ConstructionTag, TXY};
use crate::expr::{ChartPoint, ScalarField};
use crate::riemann::{
    christoffel_in_frame, covariant_derivative_vector, curvature_in_frame, orthonormal_frame,
    sectional, MetricField,
};
use crate::tensor::{FrameData, Orientation};
use crate::{Error, Result};

pub use base::{make_base, BaseKind, BaseManifold2D, PKind};
pub use oracle::{
    oracle_expected, para_eta_einstein_residual, ricci_star_residual, OracleInput, OracleTable,
};

/// Default range for `t` samples.
pub const DEFAULT_T_RANGE: (f64, f64) = (0.25, 4.0);
/// Default box for `x` and `y` samples.
pub const DEFAULT_XY_BOX: (f64, f64) = (-1.0, 1.0);
pub const DEFAULT_SEED: u64 = 42;

fn field(text: &str) -> Result<ScalarField> {
    Ok(ScalarField::parse(text, &TXY)?)
}

fn structure_fields(
    base: &BaseManifold2D,
) -> ([[ScalarField; 3]; 3], [ScalarField; 3], [ScalarField; 3]) {
    let m = base.p_kind().matrix();
    let phi = std::array::from_fn(|k| {
        std::array::from_fn(|j| {
            let v = if k == 0 || j == 0 {
                0.0
            } else {
                m[k - 1][j - 1]
            };
            ScalarField::constant(v, &TXY)
        })
    });
    let unit = || std::array::from_fn(|i| ScalarField::constant((i == 0) as u8 as f64, &TXY));
    (phi, unit(), unit())
}

/// `g = dt² + t²h`, `φ = P` on `ker η`, `ξ = ∂t`, `η = dt`.
pub fn make_cone(base: &BaseManifold2D) -> Result<ApaprManifold3D> {
    let u = base.u();
    let c = field(&format!("t^2*exp(2*{u})"))?;
    let (one, zero) = (field("1")?, field("0")?);
    let g = MetricField::from_upper(|i, j| match (i, j) {
        (0, 0) => one.clone(),
        (a, b) if a == b => c.clone(),
        _ => zero.clone(),
    });
    let (phi, xi, eta) = structure_fields(base);
    Ok(ApaprManifold3D::new(
        g,
        phi,
        xi,
        eta,
        ConstructionTag::Cone,
        Some(base.clone()),
    ))
}

/// `g = dt² + cosh 2t h + sinh 2t h̃`, `φ = P` on `ker η`, `ξ = ∂t`, `η = dt`.
pub fn make_hyperbolic_extension(base: &BaseManifold2D) -> Result<ApaprManifold3D> {
    let u = base.u();
    let (one, zero) = (field("1")?, field("0")?);
    let g = match base.p_kind() {
        // cosh 2t ± sinh 2t = e^{±2t}
        PKind::Product => {
            let gx = field(&format!("exp(2*t)*exp(2*{u})"))?;
            let gy = field(&format!("exp(-2*t)*exp(2*{u})"))?;
            MetricField::from_upper(|i, j| match (i, j) {
                (0, 0) => one.clone(),
                (1, 1) => gx.clone(),
                (2, 2) => gy.clone(),
                _ => zero.clone(),
            })
        }
        PKind::Swap => {
            let d = field(&format!("cosh(2*t)*exp(2*{u})"))?;
            let o = field(&format!("sinh(2*t)*exp(2*{u})"))?;
            MetricField::from_upper(|i, j| match (i, j) {
                (0, 0) => one.clone(),
                (1, 2) => o.clone(),
                (a, b) if a == b => d.clone(),
                _ => zero.clone(),
            })
        }
    };
    let (phi, xi, eta) = structure_fields(base);
    Ok(ApaprManifold3D::new(
        g,
        phi,
        xi,
        eta,
        ConstructionTag::HyperbolicExtension,
        Some(base.clone()),
    ))
}

/// How to draw random chart points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingPlan {
    pub count: usize,
    pub seed: u64,
    pub t_range: (f64, f64),
    pub xy_box: (f64, f64),
}

impl SamplingPlan {
    pub fn new(count: usize, seed: u64) -> Self {
        Self {
            count,
            seed,
            t_range: DEFAULT_T_RANGE,
            xy_box: DEFAULT_XY_BOX,
        }
    }
}

/// Seeded points with `t` log-uniform on `t_range` and `(x, y)` uniform on
/// `xy_box²`, redrawn while outside the base chart. The generator is ChaCha8
/// seeded from `plan.seed`.
pub fn sample_points(m: &ApaprManifold3D, plan: &SamplingPlan) -> Result<Vec<ChartPoint<3>>> {
    let (lo, hi) = plan.t_range;
    if !(lo > m.t_min() && hi >= lo && hi.is_finite()) {
        return Err(Error::Domain(format!("invalid t range [{lo}, {hi}]")));
    }
    let (a, b) = plan.xy_box;
    if !(a <= b && a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("invalid xy box [{a}, {b}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut draw = |lo: f64, hi: f64| if hi > lo { rng.gen_range(lo..hi) } else { lo };
    let mut out = Vec::with_capacity(plan.count);
    while out.len() < plan.count {
        let t = draw(lo.ln(), hi.ln()).exp();
        let mut attempts = 0;
        loop {
            let (x, y) = (draw(a, b), draw(a, b));
            match m.point(t, x, y) {
                Ok(p) => {
                    out.push(p);
                    break;
                }
                Err(Error::Domain(_)) if attempts < 1000 => attempts += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// Inputs of the closed-form tables at `p`: `t`, `k′` at the base point, `θ′`
/// on the paracontact vectors of the canonical φ-basis and, for the
/// hyperbolic extension, the derivative terms
/// `g(∇_{e1} θ′♯, e1)` and `g(∇_{e2} Pθ′♯, e1)`.
///
/// `θ′♯` is the `h`-dual of `θ′`, lifted with zero `t` component; its `x`
/// and `y` derivatives are 4th-order finite differences of the jet-computed
/// field.
pub fn oracle_inputs(
    m: &ApaprManifold3D,
    p: &ChartPoint<3>,
    orientation: Orientation,
) -> Result<OracleInput> {
    let base = m
        .base()
        .ok_or_else(|| Error::DegenerateStructure("oracle inputs need a base".into()))?;
    let q = p.base();
    let theta = base_fundamental_fprime(base, &q, Orientation::default())?.theta;
    let frame = m.phi_basis(p, orientation)?;
    let on = |v: &[f64]| theta[0] * v[1] + theta[1] * v[2];
    let theta_prime = [on(&frame.vectors[1]), on(&frame.vectors[2])];
    let nabla_theta_prime = match m.construction() {
        ConstructionTag::HyperbolicExtension => nabla_terms(m, base, p, &frame)?,
        _ => [0.0, 0.0],
    };
    Ok(OracleInput {
        t: p.t(),
        k_prime: base.k_prime(&q)?,
        theta_prime,
        nabla_theta_prime,
    })
}

const FD_STEP: f64 = 1e-3;

fn nabla_terms(
    m: &ApaprManifold3D,
    base: &BaseManifold2D,
    p: &ChartPoint<3>,
    frame: &FrameData,
) -> Result<[f64; 2]> {
    let pm = base.p_kind().matrix();
    let sharp = |x: f64, y: f64| -> Result<[f64; 2]> {
        let q = base.point(x, y)?;
        let theta = base_fundamental_fprime(base, &q, Orientation::default())?.theta;
        let h = base.h(&q)?;
        let det = h.get(&[0, 0]) * h.get(&[1, 1]) - h.get(&[0, 1]).powi(2);
        Ok([
            (h.get(&[1, 1]) * theta[0] - h.get(&[0, 1]) * theta[1]) / det,
            (h.get(&[0, 0]) * theta[1] - h.get(&[1, 0]) * theta[0]) / det,
        ])
    };
    let (x, y) = (p.coords[1], p.coords[2]);
    let v0 = sharp(x, y)?;
    // d[i][k] = ∂_i V^k in 3D coordinates; the lift does not depend on t
    let mut d = vec![vec![0.0; 3]; 3];
    for axis in 0..2 {
        let at = |s: f64| {
            if axis == 0 {
                sharp(x + s, y)
            } else {
                sharp(x, y + s)
            }
        };
        let stencil = |h: f64| -> Result<[f64; 2]> {
            let (p2, p1, m1, m2) = (at(2.0 * h)?, at(h)?, at(-h)?, at(-2.0 * h)?);
            Ok(std::array::from_fn(|k| {
                (-p2[k] + 8.0 * p1[k] - 8.0 * m1[k] + m2[k]) / (12.0 * h)
            }))
        };
        let (coarse, fine) = (stencil(FD_STEP)?, stencil(FD_STEP / 2.0)?);
        for k in 0..2 {
            d[axis + 1][k + 1] = (16.0 * fine[k] - coarse[k]) / 15.0;
        }
    }
    let v = [0.0, v0[0], v0[1]];
    let pv = [
        0.0,
        pm[0][0] * v0[0] + pm[0][1] * v0[1],
        pm[1][0] * v0[0] + pm[1][1] * v0[1],
    ];
    let mut dp = vec![vec![0.0; 3]; 3];
    for i in 0..3 {
        for k in 1..3 {
            dp[i][k] = (1..3).map(|j| pm[k - 1][j - 1] * d[i][j]).sum();
        }
    }
    // work in the linear chart of the frame, where e_a are the unit vectors
    let gamma = christoffel_in_frame(m.metric(), p, frame)?;
    let c = frame.coframe()?;
    let b = &frame.vectors;
    let vec_in = |v: &[f64]| -> Vec<f64> {
        (0..3)
            .map(|a| (0..3).map(|k| c[(a, k)] * v[k]).sum())
            .collect()
    };
    let jac_in = |d: &[Vec<f64>]| -> Vec<Vec<f64>> {
        (0..3)
            .map(|a| {
                (0..3)
                    .map(|r| {
                        (0..3)
                            .map(|i| b[a][i] * (0..3).map(|k| c[(r, k)] * d[i][k]).sum::<f64>())
                            .sum()
                    })
                    .collect()
            })
            .collect()
    };
    let unit = |a: usize| -> Vec<f64> { (0..3).map(|i| (i == a) as u8 as f64).collect() };
    let n1 = covariant_derivative_vector(&gamma, &vec_in(&v), &jac_in(&d), &unit(1));
    let n2 = covariant_derivative_vector(&gamma, &vec_in(&pv), &jac_in(&dp), &unit(2));
    let gram = |n: &[f64]| -> f64 { (0..3).map(|a| n[a] * frame.gram[a][1]).sum() };
    Ok([gram(&n1), gram(&n2)])
}

/// Gaussian curvature at `(x, y)` of the slice metric
/// `g_t = cosh 2t h + sinh 2t h̃` with `t` frozen.
pub fn extension_slice_curvature(base: &BaseManifold2D, p: &ChartPoint<3>) -> Result<f64> {
    let t = p.t();
    let (c, s) = ((2.0 * t).cosh(), (2.0 * t).sinh());
    let u = base.u();
    let m = base.p_kind().matrix();
    let xy = ["x", "y"];
    let entry = |i: usize, j: usize| -> Result<ScalarField> {
        let coeff = if i == j { c } else { 0.0 } + s * m[i][j];
        Ok(ScalarField::parse(&format!("{coeff}*exp(2*{u})"), &xy)?)
    };
    let rows = [[entry(0, 0)?, entry(0, 1)?], [entry(1, 0)?, entry(1, 1)?]];
    let metric = MetricField::from_upper(|i, j| rows[i][j].clone());
    let q = p.base();
    let frame = orthonormal_frame(&metric.value(&q)?)?;
    let pack = curvature_in_frame(&metric, &q, &frame, None)?;
    sectional(&pack.riemann, &pack.metric, &[1.0, 0.0], &[0.0, 1.0])
}

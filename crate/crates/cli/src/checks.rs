//! The checks run by `verify`.

use apapr_core::apapr::{ApaprManifold3D, ConstructionTag};
use apapr_core::classify::{w0_check, BasicClass};
use apapr_core::constructions::{
    extension_slice_curvature, oracle_expected, oracle_inputs, para_eta_einstein_residual,
    ricci_star_residual, OracleInput, OracleTable,
};
use apapr_core::evaluate::{evaluate_point, PointEvaluation};
use apapr_core::expr::ChartPoint;
use apapr_core::tensor::Orientation;

use crate::report::CheckResult;
use crate::spec::Tolerances;

/// Everything `verify` needs at one point.
pub struct PointData {
    pub eval: PointEvaluation,
    pub input: OracleInput,
    pub oracle: OracleTable,
    pub connection: f64,
    pub symmetries: f64,
    /// Gaussian curvature of the `t`-slice (extension only).
    pub slice_curvature: Option<f64>,
}

pub fn point_data(
    m: &ApaprManifold3D,
    p: &ChartPoint<3>,
    tol: &Tolerances,
) -> apapr_core::Result<PointData> {
    let eval = evaluate_point(m, p, Orientation::default(), tol.structure, tol.class)?;
    let input = oracle_inputs(m, p, Orientation::default())?;
    let oracle = oracle_expected(m.construction(), &input)?;
    let slice_curvature = match m.construction() {
        ConstructionTag::HyperbolicExtension => Some(extension_slice_curvature(
            m.base().expect("constructed"),
            p,
        )?),
        _ => None,
    };
    Ok(PointData {
        connection: m.connection_identities(p)?.max(),
        symmetries: eval.curvature.symmetries().max_relative(),
        eval,
        input,
        oracle,
        slice_curvature,
    })
}

/// A running maximum for one check.
struct Acc {
    id: &'static str,
    statement: &'static str,
    below: bool,
    tolerance: f64,
    value: f64,
}

impl Acc {
    fn new(id: &'static str, statement: &'static str, tolerance: f64) -> Self {
        Self {
            id,
            statement,
            below: true,
            tolerance,
            value: 0.0,
        }
    }

    fn present(id: &'static str, statement: &'static str, tolerance: f64) -> Self {
        Self {
            below: false,
            ..Self::new(id, statement, tolerance)
        }
    }

    fn add(&mut self, v: f64) {
        if v.is_nan() || self.value.is_nan() {
            self.value = f64::NAN;
        } else {
            self.value = self.value.max(v);
        }
    }

    fn finish(self) -> CheckResult {
        let pass = if self.below {
            self.value < self.tolerance
        } else {
            self.value > self.tolerance
        };
        CheckResult {
            id: self.id,
            statement: self.statement.to_string(),
            below: self.below,
            value: self.value,
            tolerance: self.tolerance,
            pass,
        }
    }
}

fn max_diff<'a>(a: impl IntoIterator<Item = &'a f64>, b: impl IntoIterator<Item = &'a f64>) -> f64 {
    a.into_iter().zip(b).fold(0.0, |m: f64, (x, y)| {
        let d = (x - y).abs();
        if d.is_nan() {
            f64::NAN
        } else {
            m.max(d)
        }
    })
}

fn f_diff(d: &PointData) -> f64 {
    let want: Vec<f64> = d.oracle.f.iter().flatten().flatten().copied().collect();
    max_diff(d.eval.f.data(), &want)
}

fn lee_diff(d: &PointData) -> f64 {
    let l = &d.eval.lee;
    let o = &d.oracle;
    max_diff(&l.theta, &o.theta)
        .max(max_diff(&l.theta_star, &o.theta_star))
        .max(max_diff(&l.omega, &o.omega))
}

fn riemann_diff(d: &PointData, keep: impl Fn([usize; 4]) -> bool) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    if keep([i, j, k, l]) {
                        let diff = (d.eval.riemann_frame.get(&[i, j, k, l])
                            - d.oracle.riemann[i][j][k][l])
                            .abs();
                        worst = if diff.is_nan() {
                            f64::NAN
                        } else {
                            worst.max(diff)
                        };
                    }
                }
            }
        }
    }
    worst
}

/// `1 + ‖F‖`, the scale of the class cut.
fn f_scale(d: &PointData) -> f64 {
    1.0 + d.eval.classification.f_norm
}

fn class_norm(d: &PointData, class: BasicClass) -> f64 {
    d.eval.classification.norm(class) / f_scale(d)
}

fn norms_outside(d: &PointData, allowed: &[BasicClass]) -> f64 {
    BasicClass::ALL
        .into_iter()
        .filter(|c| !allowed.contains(c))
        .map(|c| class_norm(d, c))
        .fold(0.0, f64::max)
}

/// Whether the base is of type W₀ at the base points of the sample.
pub fn base_is_w0(
    m: &ApaprManifold3D,
    points: &[ChartPoint<3>],
    tolerance: f64,
) -> apapr_core::Result<bool> {
    let base = m.base().expect("constructed");
    let q: Vec<_> = points.iter().map(|p| p.base()).collect();
    Ok(w0_check(base, &q, tolerance)?.is_w0)
}

pub fn run(
    m: &ApaprManifold3D,
    data: &[PointData],
    w0: bool,
    tol: &Tolerances,
) -> Vec<CheckResult> {
    let mut common = vec![
        Acc::new(
            "structure",
            "almost paracontact axioms and compatibility of g",
            tol.structure,
        ),
        Acc::new(
            "curvature_symmetries",
            "R symmetries and first Bianchi identity, relative",
            tol.class,
        ),
        Acc::new(
            "decomposition",
            "F equals the sum of its class components, relative to 1 + ‖F‖",
            tol.class,
        ),
        Acc::new("tau_star", "the *-scalar curvature vanishes", tol.curvature),
        Acc::new(
            "connection",
            "covariant derivatives along ξ of lifted base fields",
            tol.class,
        ),
        Acc::new(
            "fundamental_tensor",
            "F matches the closed form, relative to 1 + ‖F‖",
            tol.class,
        ),
        Acc::new(
            "lee_forms",
            "θ, θ*, ω match the closed form, relative to 1 + ‖F‖",
            tol.class,
        ),
    ];
    for d in data {
        let ev = &d.eval;
        let scale = f_scale(d);
        let vals = [
            ev.structure.max(),
            d.symmetries,
            ev.classification.residual / scale,
            ev.scalar_star.abs(),
            d.connection,
            f_diff(d) / scale,
            lee_diff(d) / scale,
        ];
        for (acc, v) in common.iter_mut().zip(vals) {
            acc.add(v);
        }
    }
    let specific = match m.construction() {
        ConstructionTag::Cone => cone(data, w0, tol),
        _ => extension(data, w0, tol),
    };
    common
        .into_iter()
        .chain(specific)
        .map(Acc::finish)
        .collect()
}

fn cone(data: &[PointData], w0: bool, tol: &Tolerances) -> Vec<Acc> {
    let mut r1212 = Acc::new("cone_r1212", "R(e1,e2,e1,e2) = -(k'-1)/t²", tol.curvature);
    let mut table = Acc::new(
        "cone_riemann",
        "all φ-basis components of R match the closed form",
        tol.curvature,
    );
    let mut k0i = Acc::new(
        "cone_k0i",
        "sectional curvatures of planes through ξ vanish",
        tol.class,
    );
    let mut tau = Acc::new("cone_scalar", "τ = 2(k'-1)/t²", tol.curvature);
    let mut span = Acc::new(
        "cone_class",
        "F lies in F1 ⊕ F5; class norms relative to 1 + ‖F‖",
        tol.class,
    );
    let mut f5 = Acc::present("cone_f5", "the F5 component is present", tol.class);
    let mut f1 = if w0 {
        Acc::new("cone_f1", "W0 base: F is of pure class F5", tol.class)
    } else {
        Acc::present(
            "cone_f1",
            "non-W0 base: the F1 component is present",
            tol.class,
        )
    };
    let flat_base = data.iter().all(|d| (d.input.k_prime - 1.0).abs() < 1e-12);
    let mut flat = Acc::new("cone_flat", "k' ≡ 1: the cone is flat", tol.class);
    for d in data {
        let ev = &d.eval;
        let t2 = d.input.t * d.input.t;
        r1212.add((ev.riemann_frame.get(&[1, 2, 1, 2]) + (d.input.k_prime - 1.0) / t2).abs());
        table.add(riemann_diff(d, |_| true));
        k0i.add(ev.k01.abs().max(ev.k02.abs()));
        tau.add((ev.scalar - d.oracle.scalar).abs());
        span.add(norms_outside(d, &[BasicClass::F1, BasicClass::F5]));
        f5.add(class_norm(d, BasicClass::F5));
        f1.add(class_norm(d, BasicClass::F1));
        flat.add(
            [
                ev.riemann_frame.max_abs(),
                ev.ricci_frame.max_abs(),
                ev.ricci_star_frame.max_abs(),
                ev.scalar.abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max),
        );
    }
    let mut out = vec![r1212, table, k0i, tau, span, f5, f1];
    if flat_base {
        out.push(flat);
    }
    out
}

fn extension(data: &[PointData], w0: bool, tol: &Tolerances) -> Vec<Acc> {
    let mut k0i = Acc::new(
        "ext_k0i",
        "sectional curvatures of planes through ξ equal -1",
        tol.curvature,
    );
    let mut rho00 = Acc::new("ext_rho00", "ρ(ξ, ξ) = -2", tol.curvature);
    let mut xi = Acc::new(
        "ext_riemann_xi",
        "components of R with a ξ index match the closed form",
        tol.curvature,
    );
    let mut r1221 = if w0 {
        Acc::new(
            "ext_r1221",
            "R(e1,e2,e2,e1) matches the closed form, relative to 1 + |R1221|",
            tol.curvature,
        )
    } else {
        Acc::new(
            "ext_r1221",
            "R(e1,e2,e2,e1) = 1 + K of the t-slice, relative to 1 + |R1221|",
            tol.curvature,
        )
    };
    let mut tau = Acc::new(
        "ext_scalar",
        "τ = 2 R(e1,e2,e2,e1) - 4, relative to 1 + |τ|",
        tol.curvature,
    );
    let mut span = Acc::new(
        "ext_class",
        "F lies in F1 ⊕ F4; class norms relative to 1 + ‖F‖",
        tol.class,
    );
    let mut f4 = Acc::present("ext_f4", "the F4 component is present", tol.class);
    let mut f1 = if w0 {
        Acc::new("ext_f1", "W0 base: F is of pure class F4", tol.class)
    } else {
        Acc::present(
            "ext_f1",
            "non-W0 base: the F1 component is present",
            tol.class,
        )
    };
    let mut einstein = Acc::new(
        "ext_para_eta_einstein",
        "W0 base: ρ = k'cosh2t g - (2 + k'cosh2t) η⊗η, relative to 1 + |k'|cosh2t",
        tol.curvature,
    );
    let mut star = Acc::new(
        "ext_ricci_star",
        "W0 base: ρ* = -(1 + k'cosh2t)(g̃ - η⊗η), relative to 1 + |k'|cosh2t",
        tol.curvature,
    );
    for d in data {
        let ev = &d.eval;
        k0i.add((ev.k01 + 1.0).abs().max((ev.k02 + 1.0).abs()));
        rho00.add((ev.ricci_frame.get(&[0, 0]) + 2.0).abs());
        xi.add(riemann_diff(d, |idx| idx.contains(&0)));
        let want = if w0 {
            d.oracle.riemann[1][2][2][1]
        } else {
            1.0 + d.slice_curvature.expect("extension")
        };
        // these grow like cosh 2t, and so does the rounding noise in them
        r1221.add((ev.riemann_frame.get(&[1, 2, 2, 1]) - want).abs() / (1.0 + want.abs()));
        let tau_want = 2.0 * want - 4.0;
        tau.add((ev.scalar - tau_want).abs() / (1.0 + tau_want.abs()));
        span.add(norms_outside(d, &[BasicClass::F1, BasicClass::F4]));
        f4.add(class_norm(d, BasicClass::F4));
        f1.add(class_norm(d, BasicClass::F1));
        let scale = 1.0 + d.input.k_prime.abs() * (2.0 * d.input.t).cosh();
        einstein
            .add(para_eta_einstein_residual(&ev.ricci_frame, d.input.t, d.input.k_prime) / scale);
        star.add(ricci_star_residual(&ev.ricci_star_frame, d.input.t, d.input.k_prime) / scale);
    }
    let mut out = vec![k0i, rho00, xi, r1221, tau, span, f4, f1];
    if w0 {
        out.extend([einstein, star]);
    }
    out
}

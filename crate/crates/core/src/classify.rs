//! Basic-class decomposition of the fundamental tensor in dimension 3 and the
//! W₀ test for base charts.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::apapr::{base_fundamental_fprime, f_symmetry_residuals, ConstructionTag, LeeForms};
use crate::constructions::BaseManifold2D;
use crate::expr::ChartPoint;
use crate::tensor::{Orientation, TensorValue, Variance};
use crate::{Error, Result};

pub const DEFAULT_CLASS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BasicClass {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
    F9,
    F10,
    F11,
}

impl BasicClass {
    pub const ALL: [BasicClass; 11] = [
        BasicClass::F1,
        BasicClass::F2,
        BasicClass::F3,
        BasicClass::F4,
        BasicClass::F5,
        BasicClass::F6,
        BasicClass::F7,
        BasicClass::F8,
        BasicClass::F9,
        BasicClass::F10,
        BasicClass::F11,
    ];

    /// Classes with non-trivial components in dimension 3.
    pub const ADMISSIBLE: [BasicClass; 7] = [
        BasicClass::F1,
        BasicClass::F4,
        BasicClass::F5,
        BasicClass::F8,
        BasicClass::F9,
        BasicClass::F10,
        BasicClass::F11,
    ];

    pub fn index(self) -> usize {
        self as usize + 1
    }

    pub fn is_admissible(self) -> bool {
        Self::ADMISSIBLE.contains(&self)
    }
}

impl fmt::Display for BasicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.index())
    }
}

/// The scalars that determine every class component.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ClassParameters {
    pub theta: [f64; 3],
    pub theta_star: [f64; 3],
    pub omega: [f64; 3],
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
}

type F3 = [[[f64; 3]; 3]; 3];

/// Component `Fⁱ` in the φ-basis built from `p`. Classes without components
/// in dimension 3 give zero.
pub fn class_component(class: BasicClass, p: &ClassParameters) -> TensorValue {
    TensorValue::from_fn(3, vec![Variance::Lower; 3], |idx| {
        let (x, y, z) = (idx[0], idx[1], idx[2]);
        let xs = |k: usize| (x == k) as u8 as f64;
        // y^a z^b + y^b z^a
        let pair =
            |a: usize, b: usize| ((y == a && z == b) as u8 + (y == b && z == a) as u8) as f64;
        let diag = ((y == 1 && z == 1) as u8 as f64) - ((y == 2 && z == 2) as u8 as f64);
        match class {
            BasicClass::F1 => (xs(1) * p.theta[1] - xs(2) * p.theta[2]) * diag,
            BasicClass::F4 => 0.5 * p.theta[0] * (xs(1) * pair(0, 1) + xs(2) * pair(0, 2)),
            BasicClass::F5 => 0.5 * p.theta_star[0] * (xs(1) * pair(0, 2) + xs(2) * pair(0, 1)),
            BasicClass::F8 => p.lambda * (xs(1) * pair(0, 1) - xs(2) * pair(0, 2)),
            BasicClass::F9 => p.mu * (xs(1) * pair(0, 2) - xs(2) * pair(0, 1)),
            BasicClass::F10 => p.nu * xs(0) * diag,
            BasicClass::F11 => xs(0) * (p.omega[1] * pair(0, 1) + p.omega[2] * pair(0, 2)),
            _ => 0.0,
        }
    })
}

/// Result of [`decompose`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    /// `Fⁱ` for the admissible classes, φ-basis components `[x][y][z]`.
    pub components: BTreeMap<BasicClass, F3>,
    /// Frobenius norms of all eleven components.
    pub norms: BTreeMap<BasicClass, f64>,
    pub parameters: ClassParameters,
    /// `‖F − ΣFⁱ‖`.
    pub residual: f64,
    pub f_norm: f64,
    pub membership: Vec<BasicClass>,
    pub tolerance: f64,
    /// `tolerance · (1 + ‖F‖)`, the cut applied to norms and residual.
    pub threshold: f64,
    /// Whether `F` lies in the direct sum of the member classes.
    pub complete: bool,
}

impl ClassificationReport {
    pub fn norm(&self, class: BasicClass) -> f64 {
        self.norms.get(&class).copied().unwrap_or(0.0)
    }

    pub fn is_member(&self, class: BasicClass) -> bool {
        self.membership.contains(&class)
    }

    pub fn membership_label(&self) -> String {
        let names: Vec<String> = self.membership.iter().map(|c| c.to_string()).collect();
        format!("{{{}}}", names.join(", "))
    }
}

/// Splits the φ-basis components `f` into the basic-class components.
///
/// `λ`, `μ`, `ν` are the antisymmetric parts of the `(F₁₁₀, F₂₂₀)`,
/// `(F₁₂₀, F₂₁₀)` and `(F₀₁₁, F₀₂₂)` pairs; the symmetric parts are carried
/// by `θ₀`, `θ*₀` and the `F₂`-type relation `F₀₁₁ = −F₀₂₂`.
pub fn decompose(f: &TensorValue, lee: &LeeForms, tolerance: f64) -> Result<ClassificationReport> {
    if f.dim() != 3 || f.variance() != [Variance::Lower; 3] {
        return Err(Error::Shape(
            "decompose expects (0,3) components in dimension 3".into(),
        ));
    }
    let f_norm = f.norm();
    let threshold = tolerance * (1.0 + f_norm);
    let sym = f_symmetry_residuals(f).max();
    if sym > threshold {
        return Err(Error::SymmetryViolation {
            residual: sym,
            tolerance: threshold,
        });
    }
    let c = |i: usize, j: usize, k: usize| f.get(&[i, j, k]);
    let parameters = ClassParameters {
        theta: lee.theta,
        theta_star: lee.theta_star,
        omega: lee.omega,
        lambda: 0.5 * (c(1, 1, 0) - c(2, 2, 0)),
        mu: 0.5 * (c(1, 2, 0) - c(2, 1, 0)),
        nu: 0.5 * (c(0, 1, 1) - c(0, 2, 2)),
    };
    let mut components = BTreeMap::new();
    let mut norms = BTreeMap::new();
    let mut sum = TensorValue::zeros(3, vec![Variance::Lower; 3]);
    let mut membership = Vec::new();
    for class in BasicClass::ALL {
        let part = class_component(class, &parameters);
        let norm = part.norm();
        norms.insert(class, norm);
        if class.is_admissible() {
            sum = sum.add(&part)?;
            if norm > threshold {
                membership.push(class);
            }
            components.insert(class, to_array(&part));
        }
    }
    let residual = f.sub(&sum)?.norm();
    Ok(ClassificationReport {
        components,
        norms,
        parameters,
        residual,
        f_norm,
        membership,
        tolerance,
        threshold,
        complete: residual < threshold,
    })
}

fn to_array(t: &TensorValue) -> F3 {
    std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| t.get(&[i, j, k]))))
}

/// Outcome of [`impossibility_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Impossibility {
    /// The report does not come from one of the two constructions.
    NotApplicable,
    /// The construction's guaranteed class (`F₅` for the cone, `F₄` for the
    /// extension) has the given norm, above the membership threshold, so the
    /// manifold is not of pure class `F₁`.
    Holds { class: BasicClass, norm: f64 },
    /// The guaranteed class vanished: the engine is wrong.
    Violated { class: BasicClass, norm: f64 },
}

pub fn impossibility_check(
    report: &ClassificationReport,
    construction: ConstructionTag,
) -> Impossibility {
    let class = match construction {
        ConstructionTag::Cone => BasicClass::F5,
        ConstructionTag::HyperbolicExtension => BasicClass::F4,
        ConstructionTag::Custom => return Impossibility::NotApplicable,
    };
    let norm = report.norm(class);
    if norm > report.threshold {
        Impossibility::Holds { class, norm }
    } else {
        Impossibility::Violated { class, norm }
    }
}

/// Result of [`w0_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct W0Report {
    pub is_w0: bool,
    /// Largest `‖∇′P‖` over the points.
    pub max_nabla_p: f64,
    /// Largest `‖θ′‖` (`h`-norm) over the points; vanishes together with
    /// `∇′P` for a W₁ base.
    pub max_theta_prime: f64,
    pub tolerance: f64,
}

/// Whether `∇′P = 0` at every given point.
pub fn w0_check(
    base: &BaseManifold2D,
    points: &[ChartPoint<2>],
    tolerance: f64,
) -> Result<W0Report> {
    let mut out = W0Report {
        is_w0: true,
        max_nabla_p: 0.0,
        max_theta_prime: 0.0,
        tolerance,
    };
    for p in points {
        let bf = base_fundamental_fprime(base, p, Orientation::default())?;
        let [a, b] = bf.theta_frame();
        out.max_nabla_p = out.max_nabla_p.max(bf.nabla_p_norm);
        out.max_theta_prime = out.max_theta_prime.max(a.hypot(b));
    }
    out.is_w0 = out.max_nabla_p < tolerance;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apapr::lee_forms;

    fn params(seed: u64) -> ClassParameters {
        // deterministic values bounded away from zero, alternating in sign
        let v = |k: u64| {
            let m = 0.5 + ((seed * 31 + k * 17) % 23) as f64 / 10.0;
            if k % 2 == 0 {
                m
            } else {
                -m
            }
        };
        ClassParameters {
            theta: [v(1), v(2), v(3)],
            theta_star: [v(4), -v(2), -v(3)],
            omega: [0.0, v(5), v(6)],
            lambda: v(7),
            mu: v(8),
            nu: v(9),
        }
    }

    #[test]
    fn every_admissible_class_round_trips() {
        for seed in 0..5 {
            let p = params(seed);
            for class in BasicClass::ADMISSIBLE {
                let f = class_component(class, &p);
                assert!(f.norm() > 0.1, "{class} vanished");
                let report = decompose(&f, &lee_forms(&f), DEFAULT_CLASS_TOLERANCE).unwrap();
                assert_eq!(report.membership, vec![class]);
                assert!(report.residual < 1e-12);
            }
        }
    }

    #[test]
    fn sum_of_all_classes_is_recovered() {
        let p = params(3);
        let mut f = TensorValue::zeros(3, vec![Variance::Lower; 3]);
        for class in BasicClass::ADMISSIBLE {
            f = f.add(&class_component(class, &p)).unwrap();
        }
        let report = decompose(&f, &lee_forms(&f), DEFAULT_CLASS_TOLERANCE).unwrap();
        assert_eq!(report.membership, BasicClass::ADMISSIBLE.to_vec());
        assert!(report.residual < 1e-12);
        for class in BasicClass::ADMISSIBLE {
            let want = class_component(class, &p);
            let got = &report.components[&class];
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        assert!((got[i][j][k] - want.get(&[i, j, k])).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn structurally_zero_classes() {
        let p = params(1);
        for class in [
            BasicClass::F2,
            BasicClass::F3,
            BasicClass::F6,
            BasicClass::F7,
        ] {
            assert_eq!(class_component(class, &p).max_abs(), 0.0);
        }
    }

    #[test]
    fn invalid_f_is_rejected() {
        let mut f = TensorValue::zeros(3, vec![Variance::Lower; 3]);
        f.set(&[0, 1, 2], 1.0);
        let err = decompose(&f, &lee_forms(&f), DEFAULT_CLASS_TOLERANCE).unwrap_err();
        assert!(matches!(err, Error::SymmetryViolation { .. }));
    }

    #[test]
    fn custom_reports_are_not_checked() {
        let f = class_component(BasicClass::F1, &params(2));
        let report = decompose(&f, &lee_forms(&f), DEFAULT_CLASS_TOLERANCE).unwrap();
        assert_eq!(
            impossibility_check(&report, ConstructionTag::Custom),
            Impossibility::NotApplicable
        );
    }
}

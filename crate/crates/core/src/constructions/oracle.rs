use serde::Serialize;

use crate::apapr::ConstructionTag;
use crate::tensor::TensorValue;
use crate::{Error, Result};

type R4 = [[[[f64; 3]; 3]; 3]; 3];

/// Arguments of the closed-form tables. `theta_prime` holds `θ′(e1)`,
/// `θ′(e2)` for the φ-basis vectors `e1`, `e2`; `nabla_theta_prime` holds
/// `g(∇_{e1}θ′♯, e1)` and `g(∇_{e2}Pθ′♯, e1)` (extension only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleInput {
    pub t: f64,
    pub k_prime: f64,
    pub theta_prime: [f64; 2],
    pub nabla_theta_prime: [f64; 2],
}

/// Expected φ-basis components of a construction at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleTable {
    pub construction: ConstructionTag,
    pub f: [[[f64; 3]; 3]; 3],
    pub theta: [f64; 3],
    pub theta_star: [f64; 3],
    pub omega: [f64; 3],
    pub riemann: R4,
    pub k01: f64,
    pub k02: f64,
    pub k12: f64,
    pub ricci: [[f64; 3]; 3],
    pub ricci_star: [[f64; 3]; 3],
    pub scalar: f64,
    pub scalar_star: f64,
}

/// Sets `R_ijkw = v` together with every component related to it by the
/// algebraic symmetries.
fn set_r(r: &mut R4, [i, j, k, w]: [usize; 4], v: f64) {
    for (a, b, c, d, s) in [
        (i, j, k, w, v),
        (j, i, k, w, -v),
        (i, j, w, k, -v),
        (j, i, w, k, v),
        (k, w, i, j, v),
        (w, k, i, j, -v),
        (k, w, j, i, -v),
        (w, k, j, i, v),
    ] {
        r[a][b][c][d] = s;
    }
}

fn set_sym(m: &mut [[f64; 3]; 3], i: usize, j: usize, v: f64) {
    m[i][j] = v;
    m[j][i] = v;
}

/// The `F¹` part `(x¹θ₁ − x²θ₂)(y¹z¹ − y²z²)`.
fn add_f1(f: &mut [[[f64; 3]; 3]; 3], theta: [f64; 2]) {
    f[1][1][1] += theta[0];
    f[1][2][2] -= theta[0];
    f[2][1][1] -= theta[1];
    f[2][2][2] += theta[1];
}

/// Closed-form values for the cone and the hyperbolic extension.
pub fn oracle_expected(tag: ConstructionTag, input: &OracleInput) -> Result<OracleTable> {
    let OracleInput {
        t,
        k_prime: k,
        theta_prime: [a1, a2],
        nabla_theta_prime: [n1, n2],
    } = *input;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    let mut f = [[[0.0; 3]; 3]; 3];
    let mut r = [[[[0.0; 3]; 3]; 3]; 3];
    let mut ricci = [[0.0; 3]; 3];
    let mut ricci_star = [[0.0; 3]; 3];
    add_f1(&mut f, [a1, a2]);
    let table = match tag {
        ConstructionTag::Cone => {
            for [i, j, l] in [[1, 2, 0], [1, 0, 2], [2, 1, 0], [2, 0, 1]] {
                f[i][j][l] = -1.0 / t;
            }
            let c = (k - 1.0) / (t * t);
            set_r(&mut r, [1, 2, 1, 2], -c);
            set_sym(&mut ricci, 1, 1, c);
            set_sym(&mut ricci, 2, 2, c);
            set_sym(&mut ricci_star, 1, 2, -c);
            OracleTable {
                construction: tag,
                f,
                theta: [0.0, a1, a2],
                theta_star: [-2.0 / t, -a2, -a1],
                omega: [0.0; 3],
                riemann: r,
                k01: 0.0,
                k02: 0.0,
                k12: c,
                ricci,
                ricci_star,
                scalar: 2.0 * c,
                scalar_star: 0.0,
            }
        }
        ConstructionTag::HyperbolicExtension => {
            for [i, j, l] in [[1, 0, 1], [1, 1, 0], [2, 0, 2], [2, 2, 0]] {
                f[i][j][l] = -1.0;
            }
            let (ch, sh) = ((2.0 * t).cosh(), (2.0 * t).sinh());
            let r1221 = k * ch + 1.0 + 0.5 * sh * (n1 + n2) + 0.5 * a1 * a2;
            set_r(&mut r, [1, 2, 2, 1], r1221);
            set_r(&mut r, [1, 2, 1, 0], -a2);
            set_r(&mut r, [1, 2, 2, 0], a1);
            set_r(&mut r, [0, 1, 1, 0], -1.0);
            set_r(&mut r, [0, 2, 2, 0], -1.0);
            set_sym(&mut ricci, 1, 1, r1221 - 1.0);
            set_sym(&mut ricci, 2, 2, r1221 - 1.0);
            set_sym(&mut ricci, 0, 0, -2.0);
            set_sym(&mut ricci, 0, 1, a1);
            set_sym(&mut ricci, 0, 2, a2);
            set_sym(&mut ricci_star, 1, 2, -r1221);
            set_sym(&mut ricci_star, 0, 1, -a2);
            set_sym(&mut ricci_star, 0, 2, -a1);
            OracleTable {
                construction: tag,
                f,
                theta: [-2.0, a1, a2],
                theta_star: [0.0, -a2, -a1],
                omega: [0.0; 3],
                riemann: r,
                k01: -1.0,
                k02: -1.0,
                k12: r1221,
                ricci,
                ricci_star,
                scalar: 2.0 * r1221 - 4.0,
                scalar_star: 0.0,
            }
        }
        ConstructionTag::Custom => {
            return Err(Error::DegenerateStructure(
                "closed-form tables exist for the cone and the hyperbolic extension only".into(),
            ))
        }
    };
    Ok(table)
}

/// Largest φ-basis deviation of `ρ` from `k′cosh2t g − (2 + k′cosh2t) η⊗η`.
pub fn para_eta_einstein_residual(ricci_frame: &TensorValue, t: f64, k_prime: f64) -> f64 {
    let a = k_prime * (2.0 * t).cosh();
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let g = (i == j) as u8 as f64;
            let ee = (i == 0 && j == 0) as u8 as f64;
            let want = a * g - (2.0 + a) * ee;
            worst = worst.max((ricci_frame.get(&[i, j]) - want).abs());
        }
    }
    worst
}

/// Largest φ-basis component of `ρ* + (1 + k′cosh2t)(g̃ − η⊗η)`.
pub fn ricci_star_residual(ricci_star_frame: &TensorValue, t: f64, k_prime: f64) -> f64 {
    let a = 1.0 + k_prime * (2.0 * t).cosh();
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            // g̃ − η⊗η on the φ-basis is g(e_i, φe_j): nonzero only for (1,2), (2,1)
            let twisted = ((i, j) == (1, 2) || (i, j) == (2, 1)) as u8 as f64;
            worst = worst.max((ricci_star_frame.get(&[i, j]) + a * twisted).abs());
        }
    }
    worst
}

use serde::Serialize;

use crate::tensor::TensorValue;

/// `φ` on the φ-basis: `φe0 = 0`, `φe1 = e2`, `φe2 = e1`.
const PHI: [Option<usize>; 3] = [None, Some(2), Some(1)];

/// Lee forms in φ-basis components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeeForms {
    pub theta: [f64; 3],
    pub theta_star: [f64; 3],
    pub omega: [f64; 3],
    /// Largest deviation from the dimension-3 component relations
    /// (`θ₀ = F₁₁₀ + F₂₂₀`, `θ₁ = F₁₁₁ = −F₁₂₂ = −θ*₂`, ...).
    pub relation_residual: f64,
}

/// Residuals of `F(x,y,z) = F(x,z,y)` and
/// `F(x,y,z) = −F(x,φy,φz) + η(y)F(x,ξ,z) + η(z)F(x,y,ξ)` over basis triples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FSymmetryResiduals {
    pub symmetric: f64,
    pub twisted: f64,
}

impl FSymmetryResiduals {
    pub fn max(&self) -> f64 {
        self.symmetric.max(self.twisted)
    }
}

pub fn f_symmetry_residuals(f: &TensorValue) -> FSymmetryResiduals {
    let mut out = FSymmetryResiduals {
        symmetric: 0.0,
        twisted: 0.0,
    };
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let v = f.get(&[i, j, k]);
                out.symmetric = out.symmetric.max((v - f.get(&[i, k, j])).abs());
                let mut rhs = match (PHI[j], PHI[k]) {
                    (Some(a), Some(b)) => -f.get(&[i, a, b]),
                    _ => 0.0,
                };
                if j == 0 {
                    rhs += f.get(&[i, 0, k]);
                }
                if k == 0 {
                    rhs += f.get(&[i, j, 0]);
                }
                out.twisted = out.twisted.max((v - rhs).abs());
            }
        }
    }
    out
}

/// `θ(z) = ĝ^{ij}F(e_i,e_j,z)`, `θ*(z) = ĝ^{ij}F(e_i,φe_j,z)`,
/// `ω(z) = F(ξ,ξ,z)`, where `ĝ^{ij}` runs over the paracontact directions
/// `e1, e2` of the φ-basis.
pub fn lee_forms(f: &TensorValue) -> LeeForms {
    let c = |i: usize, j: usize, k: usize| f.get(&[i, j, k]);
    let theta: [f64; 3] = std::array::from_fn(|z| c(1, 1, z) + c(2, 2, z));
    let theta_star: [f64; 3] = std::array::from_fn(|z| c(1, 2, z) + c(2, 1, z));
    let omega: [f64; 3] = std::array::from_fn(|z| c(0, 0, z));
    let residual = [
        theta[0] - (c(1, 1, 0) + c(2, 2, 0)),
        theta[1] - c(1, 1, 1),
        theta[1] + c(1, 2, 2),
        theta[1] + theta_star[2],
        theta_star[0] - (c(1, 2, 0) + c(2, 1, 0)),
        theta[2] - c(2, 2, 2),
        theta[2] + c(2, 1, 1),
        theta[2] + theta_star[1],
        omega[0],
        omega[1] - c(0, 0, 1),
        omega[2] - c(0, 0, 2),
    ]
    .into_iter()
    .fold(0.0_f64, |m, v| m.max(v.abs()));
    LeeForms {
        theta,
        theta_star,
        omega,
        relation_residual: residual,
    }
}

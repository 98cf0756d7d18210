use nalgebra::DMatrix;
use serde::Serialize;

use super::{metric_matrix, TensorValue, Variance};
use crate::{Error, Result};

/// Tangent vectors at a point (coordinate components) together with their
/// Gram matrix under the metric used to build them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameData {
    pub vectors: Vec<Vec<f64>>,
    pub gram: Vec<Vec<f64>>,
}

/// Residuals of the six defining conditions of a phi-basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiBasisResiduals {
    /// `|phi e0|`
    pub phi_e0: f64,
    /// `|phi e1 - e2|`
    pub phi_e1: f64,
    /// `|phi e2 - e1|`
    pub phi_e2: f64,
    /// `|xi - e0|`
    pub xi_e0: f64,
    /// `|eta(e0) - 1| + |eta(e1)| + |eta(e2)|`
    pub eta: f64,
    /// `max |g(e_i, e_j) - delta_ij|`
    pub orthonormal: f64,
}

impl PhiBasisResiduals {
    pub fn max(&self) -> f64 {
        [
            self.phi_e0,
            self.phi_e1,
            self.phi_e2,
            self.xi_e0,
            self.eta,
            self.orthonormal,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Sign choices for the eigenvectors of the paracomplex structure. The
/// canonical frame uses `Orientation::default()`: each eigenvector has its
/// first non-negligible coordinate component positive. A flip negates the
/// eigenvector after that normalisation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Orientation {
    pub flip_plus: bool,
    pub flip_minus: bool,
}

impl FrameData {
    pub fn new(vectors: Vec<Vec<f64>>, g: &TensorValue) -> Result<Self> {
        let n = g.dim();
        if vectors.len() != n || vectors.iter().any(|v| v.len() != n) {
            return Err(Error::Shape(format!(
                "a frame needs {n} vectors of length {n}"
            )));
        }
        let gram = vectors
            .iter()
            .map(|a| vectors.iter().map(|b| inner(g, a, b)).collect())
            .collect();
        Ok(Self { vectors, gram })
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Matrix whose columns are the frame vectors.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, a| self.vectors[a][i])
    }

    /// Dual coframe: row `a` is the covector dual to vector `a`.
    pub fn coframe(&self) -> Result<DMatrix<f64>> {
        self.matrix().try_inverse().ok_or_else(|| {
            Error::DegenerateStructure("frame vectors are linearly dependent".into())
        })
    }

    pub fn gram_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.gram.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }

    /// Checks the phi-basis conditions against coordinate components of
    /// `phi` (a `(1,1)` tensor), `eta` and `xi`.
    pub fn phi_basis_residuals(
        &self,
        phi: &TensorValue,
        eta: &[f64],
        xi: &[f64],
    ) -> PhiBasisResiduals {
        let e = &self.vectors;
        let apply = |v: &[f64]| -> Vec<f64> {
            (0..3)
                .map(|k| (0..3).map(|j| phi.get(&[k, j]) * v[j]).sum())
                .collect()
        };
        let dist = |a: &[f64], b: &[f64]| -> f64 {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let zero = [0.0; 3];
        let eta_of = |v: &[f64]| -> f64 { eta.iter().zip(v).map(|(a, b)| a * b).sum() };
        PhiBasisResiduals {
            phi_e0: dist(&apply(&e[0]), &zero),
            phi_e1: dist(&apply(&e[1]), &e[2]),
            phi_e2: dist(&apply(&e[2]), &e[1]),
            xi_e0: dist(xi, &e[0]),
            eta: (eta_of(&e[0]) - 1.0).abs() + eta_of(&e[1]).abs() + eta_of(&e[2]).abs(),
            orthonormal: self.gram_residual(),
        }
    }
}

/// `g(a, b)` with compensated summation. On badly conditioned metrics the
/// terms can exceed the result by the condition number of `g`.
pub(crate) fn inner(g: &TensorValue, a: &[f64], b: &[f64]) -> f64 {
    let n = g.dim();
    let (mut s, mut c) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (p, e) = two_product(g.get(&[i, j]), a[i]);
            let (q, f) = two_product(p, b[j]);
            let (t, err) = two_sum(s, q);
            s = t;
            c += err + f + e * b[j];
        }
    }
    s + c
}

fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let v = s - a;
    (s, (a - (s - v)) + (b - v))
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Kernel direction of `endo - lambda I` (rank `n - 1` expected).
fn eigenvector(endo: &TensorValue, lambda: f64) -> Result<Vec<f64>> {
    let n = endo.dim();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| endo.get(&[i, j]) - if i == j { lambda } else { 0.0 })
                .collect()
        })
        .collect();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(1.0);
    let candidate: Vec<f64> = if n == 2 {
        let rows = [vec![-a[0][1], a[0][0]], vec![-a[1][1], a[1][0]]];
        rows.into_iter()
            .max_by(|u, v| norm(u).total_cmp(&norm(v)))
            .expect("two rows")
    } else {
        [(0, 1), (0, 2), (1, 2)]
            .into_iter()
            .map(|(i, j)| cross(&a[i], &a[j]).to_vec())
            .max_by(|u, v| norm(u).total_cmp(&norm(v)))
            .expect("three pairs")
    };
    let size = norm(&candidate);
    let threshold = if n == 2 {
        1e-12 * scale
    } else {
        1e-12 * scale * scale
    };
    if !(size > threshold) {
        return Err(Error::DegenerateStructure(format!(
            "no simple eigenvector for eigenvalue {lambda}"
        )));
    }
    Ok(candidate)
}

fn normalized(g: &TensorValue, mut v: Vec<f64>, flip: bool) -> Result<Vec<f64>> {
    let len2 = inner(g, &v, &v);
    if !(len2 > 0.0) {
        return Err(Error::DegenerateStructure(
            "eigenvector has non-positive length".into(),
        ));
    }
    let len = len2.sqrt();
    v.iter_mut().for_each(|c| *c /= len);
    let max = v.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let lead = v
        .iter()
        .copied()
        .find(|c| c.abs() > 1e-12 * max)
        .unwrap_or(1.0);
    let sign = if (lead < 0.0) != flip { -1.0 } else { 1.0 };
    v.iter_mut().for_each(|c| *c *= sign);
    Ok(v)
}

fn plus_minus_pair(
    g: &TensorValue,
    endo: &TensorValue,
    orientation: Orientation,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let p_plus = normalized(g, eigenvector(endo, 1.0)?, orientation.flip_plus)?;
    let p_minus = normalized(g, eigenvector(endo, -1.0)?, orientation.flip_minus)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let e1 = p_plus
        .iter()
        .zip(&p_minus)
        .map(|(a, b)| r * (a + b))
        .collect();
    let e2 = p_plus
        .iter()
        .zip(&p_minus)
        .map(|(a, b)| r * (a - b))
        .collect();
    Ok((e1, e2))
}

/// Canonical phi-basis `{xi, e1, e2}` at a point of a 3-dimensional chart.
///
/// `p+` and `p-` are the `+1` and `-1` eigenvectors of `phi` (they lie in
/// `ker eta` and are `g`-orthogonal), normalised to unit length; then
/// `e1 = (p+ + p-)/sqrt 2` and `e2 = (p+ - p-)/sqrt 2`, so `phi e1 = e2`.
pub fn build_phi_basis(
    g: &TensorValue,
    phi: &TensorValue,
    xi: &[f64],
    orientation: Orientation,
) -> Result<FrameData> {
    if g.dim() != 3 || phi.dim() != 3 || xi.len() != 3 {
        return Err(Error::Shape("phi-basis needs a 3-dimensional chart".into()));
    }
    if phi.variance() != [Variance::Upper, Variance::Lower] {
        return Err(Error::VarianceMismatch("phi must be a (1,1) tensor".into()));
    }
    metric_matrix(g)?;
    let (e1, e2) = plus_minus_pair(g, phi, orientation)?;
    FrameData::new(vec![xi.to_vec(), e1, e2], g)
}

/// Orthonormal `P`-adapted basis `{e1, e2}` with `P e1 = e2` on a
/// 2-dimensional chart, built by the same rule as [`build_phi_basis`].
pub fn build_paracomplex_basis(
    h: &TensorValue,
    p: &TensorValue,
    orientation: Orientation,
) -> Result<FrameData> {
    if h.dim() != 2 || p.dim() != 2 {
        return Err(Error::Shape(
            "paracomplex basis needs a 2-dimensional chart".into(),
        ));
    }
    metric_matrix(h)?;
    let (e1, e2) = plus_minus_pair(h, p, orientation)?;
    FrameData::new(vec![e1, e2], h)
}

use crate::constructions::BaseManifold2D;
use crate::expr::ChartPoint;
use crate::riemann::covariant_derivative_11;
use crate::tensor::{FrameData, Orientation, TensorValue, Variance};
use crate::Result;

/// `F′(x, y, z) = h((∇′_x P)y, z)` on a base chart, with its Lee forms.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseFundamental {
    pub coordinate: TensorValue,
    /// Orthonormal `P`-adapted frame `{e1, e2}`, `Pe1 = e2`.
    pub frame: FrameData,
    pub components: TensorValue,
    /// `θ′_c = h^{ab} F′_abc`, coordinate components.
    pub theta: Vec<f64>,
    /// `θ′*_c = h^{ab} F′(∂_a, P∂_b, ∂_c)`, coordinate components.
    pub theta_star: Vec<f64>,
    /// Largest frame-component deviation of `F′` from the shape rebuilt from
    /// `θ′` and `θ′*`.
    pub w1_residual: f64,
    /// `max |θ′*(e_a) + θ′(P e_a)|`.
    pub theta_star_residual: f64,
    /// Frobenius norm of `∇′P` in coordinates.
    pub nabla_p_norm: f64,
}

impl BaseFundamental {
    pub fn theta_on(&self, v: &[f64]) -> f64 {
        self.theta.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    pub fn theta_frame(&self) -> [f64; 2] {
        [
            self.theta_on(&self.frame.vectors[0]),
            self.theta_on(&self.frame.vectors[1]),
        ]
    }
}

pub fn base_fundamental_fprime(
    base: &BaseManifold2D,
    p: &ChartPoint<2>,
    orientation: Orientation,
) -> Result<BaseFundamental> {
    let h = base.h(p)?;
    let pm = base.p_kind().matrix();
    let nabla = covariant_derivative_11(&base.p_fields(), base.metric(), p)?;
    let coordinate = TensorValue::from_fn(2, vec![Variance::Lower; 3], |idx| {
        let (a, b, c) = (idx[0], idx[1], idx[2]);
        (0..2).map(|l| nabla.get(&[a, l, b]) * h.get(&[l, c])).sum()
    });
    let hinv = {
        let det = h.get(&[0, 0]) * h.get(&[1, 1]) - h.get(&[0, 1]) * h.get(&[1, 0]);
        [
            [h.get(&[1, 1]) / det, -h.get(&[0, 1]) / det],
            [-h.get(&[1, 0]) / det, h.get(&[0, 0]) / det],
        ]
    };
    let theta: Vec<f64> = (0..2)
        .map(|c| {
            let mut s = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    s += hinv[a][b] * coordinate.get(&[a, b, c]);
                }
            }
            s
        })
        .collect();
    let theta_star: Vec<f64> = (0..2)
        .map(|c| {
            let mut s = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    for m in 0..2 {
                        s += hinv[a][b] * pm[m][b] * coordinate.get(&[a, m, c]);
                    }
                }
            }
            s
        })
        .collect();

    let frame = base.frame(p, orientation)?;
    let components = coordinate.to_frame(&frame)?;
    let on =
        |form: &[f64], a: usize| -> f64 { (0..2).map(|i| form[i] * frame.vectors[a][i]).sum() };
    let th = [on(&theta, 0), on(&theta, 1)];
    let ths = [on(&theta_star, 0), on(&theta_star, 1)];
    let swap = [1, 0];
    let delta = |a: usize, b: usize| (a == b) as u8 as f64;
    let mut w1_residual: f64 = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                let rebuilt = 0.5
                    * (delta(a, b) * th[c]
                        + delta(a, c) * th[b]
                        + delta(a, swap[b]) * ths[c]
                        + delta(a, swap[c]) * ths[b]);
                w1_residual = w1_residual.max((components.get(&[a, b, c]) - rebuilt).abs());
            }
        }
    }
    let theta_star_residual = (0..2).fold(0.0_f64, |m, a| m.max((ths[a] + th[swap[a]]).abs()));
    Ok(BaseFundamental {
        nabla_p_norm: nabla.norm(),
        coordinate,
        frame,
        components,
        theta,
        theta_star,
        w1_residual,
        theta_star_residual,
    })
}

/// `θ′` at `p` in coordinate components.
pub fn base_lee_theta_prime(base: &BaseManifold2D, p: &ChartPoint<2>) -> Result<Vec<f64>> {
    Ok(base_fundamental_fprime(base, p, Orientation::default())?.theta)
}

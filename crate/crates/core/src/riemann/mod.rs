//! Levi-Civita connection and curvature of a metric field on a chart.
//!
//! Conventions: `gamma[k][i][j] = Γ^k_ij`, `R(∂_i, ∂_j)∂_k = R^l_ijk ∂_l`
//! with `R(X,Y) = [∇_X, ∇_Y] − ∇_[X,Y]`, and `R_ijkw = g(R(∂_i,∂_j)∂_k, ∂_w)`.
//! With these, a round sphere has positive sectional curvature
//! `k = R(x,y,y,x) / π₁(x,y,y,x)`.
//!
//! `∂Γ` is obtained by running the Christoffel formula on first-order jets of
//! `g` and `∂g`, so only second derivatives of the metric are needed.

mod dual;

use nalgebra::DMatrix;

use crate::expr::{ChartPoint, ScalarField};
use crate::tensor::{
    condition_number, metric_matrix, FrameData, TensorValue, Variance, MAX_CONDITION,
};
use crate::{Error, Result};

pub use dual::{christoffel_from, invert, Field, Jet1};

/// Relative threshold below which a plane counts as degenerate.
pub const DEGENERATE_PLANE: f64 = 1e-10;

type Mat<const N: usize> = [[f64; N]; N];
type Rank3<const N: usize> = [[[f64; N]; N]; N];

/// Symmetric matrix of scalar fields `g_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField<const N: usize> {
    entries: [[ScalarField; N]; N],
}

/// Metric value and its exact first and second partial derivatives at a
/// point: `dg[m][i][j] = ∂_m g_ij`, `ddg[m][n][i][j] = ∂_m ∂_n g_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJets<const N: usize> {
    pub g: Mat<N>,
    pub dg: Rank3<N>,
    pub ddg: [[Mat<N>; N]; N],
}

impl<const N: usize> MetricJets<N> {
    /// Jets of the same metric in the linear chart `x = p + B q`, where
    /// column `a` of `b` (`b[i][a]`) is the `a`-th basis vector.
    ///
    /// With `B` orthonormal for `g(p)` the transformed metric is close to the
    /// identity, so the Christoffel symbols and curvature computed from the
    /// result do not suffer from an ill-conditioned coordinate metric.
    pub fn in_basis(&self, b: &Mat<N>) -> Self {
        let mut out = Self {
            g: [[0.0; N]; N],
            dg: [[[0.0; N]; N]; N],
            ddg: [[[[0.0; N]; N]; N]; N],
        };
        let pair = |m: &Mat<N>, a: usize, c: usize| -> f64 {
            let mut s = 0.0;
            for i in 0..N {
                for j in 0..N {
                    s += b[i][a] * m[i][j] * b[j][c];
                }
            }
            s
        };
        // first pull back the derivative slots, then the metric slots
        let mut dg1: Rank3<N> = [[[0.0; N]; N]; N];
        let mut ddg1 = [[[[0.0; N]; N]; N]; N];
        for a in 0..N {
            for i in 0..N {
                for j in 0..N {
                    dg1[a][i][j] = (0..N).map(|m| b[m][a] * self.dg[m][i][j]).sum();
                }
            }
        }
        for a in 0..N {
            for d in 0..N {
                for i in 0..N {
                    for j in 0..N {
                        let mut s = 0.0;
                        for m in 0..N {
                            for n in 0..N {
                                s += b[m][a] * b[n][d] * self.ddg[m][n][i][j];
                            }
                        }
                        ddg1[a][d][i][j] = s;
                    }
                }
            }
        }
        for x in 0..N {
            for y in 0..N {
                out.g[x][y] = pair(&self.g, x, y);
                for a in 0..N {
                    out.dg[a][x][y] = pair(&dg1[a], x, y);
                    for d in 0..N {
                        out.ddg[a][d][x][y] = pair(&ddg1[a][d], x, y);
                    }
                }
            }
        }
        out
    }
}

impl<const N: usize> MetricField<N> {
    /// Builds the field from `f(i, j)`, which is only called for `i <= j`.
    pub fn from_upper(mut f: impl FnMut(usize, usize) -> ScalarField) -> Self {
        let mut upper: Vec<Vec<Option<ScalarField>>> = vec![vec![None; N]; N];
        for i in 0..N {
            for j in i..N {
                upper[i][j] = Some(f(i, j));
            }
        }
        let entries = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                upper[a][b].clone().expect("upper triangle filled")
            })
        });
        Self { entries }
    }

    /// Parses the upper triangle of `rows`; the lower triangle is ignored.
    pub fn parse(rows: [[&str; N]; N], coords: &[&str]) -> Result<Self> {
        let mut err = None;
        let field = Self::from_upper(|i, j| match ScalarField::parse(rows[i][j], coords) {
            Ok(f) => f,
            Err(e) => {
                err.get_or_insert(e);
                ScalarField::constant(0.0, coords)
            }
        });
        match err {
            Some(e) => Err(e.into()),
            None => Ok(field),
        }
    }

    pub fn component(&self, i: usize, j: usize) -> &ScalarField {
        &self.entries[i][j]
    }

    /// Jets of every component, after checking positive definiteness by
    /// leading principal minors and conditioning.
    pub fn jets(&self, p: &ChartPoint<N>) -> Result<MetricJets<N>> {
        let mut out = MetricJets {
            g: [[0.0; N]; N],
            dg: [[[0.0; N]; N]; N],
            ddg: [[[[0.0; N]; N]; N]; N],
        };
        for i in 0..N {
            for j in i..N {
                let jet = self.entries[i][j].eval_jet2(&p.coords)?;
                for (a, b) in [(i, j), (j, i)] {
                    out.g[a][b] = jet.value;
                    for m in 0..N {
                        out.dg[m][a][b] = jet.gradient[m];
                        for n in 0..N {
                            out.ddg[m][n][a][b] = jet.hessian[m][n];
                        }
                    }
                }
            }
        }
        check_positive_definite(&out.g)?;
        Ok(out)
    }

    pub fn value(&self, p: &ChartPoint<N>) -> Result<TensorValue> {
        let mut g = [[0.0; N]; N];
        for i in 0..N {
            for j in i..N {
                let v = self.entries[i][j].eval(&p.coords)?;
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        check_positive_definite(&g)?;
        Ok(TensorValue::covariant_matrix(&g))
    }
}

fn check_positive_definite<const N: usize>(g: &Mat<N>) -> Result<()> {
    for k in 1..=N {
        let minor = DMatrix::from_fn(k, k, |i, j| g[i][j]).determinant();
        if !(minor > 0.0) {
            return Err(Error::NotPositiveDefinite {
                minor: k,
                value: minor,
            });
        }
    }
    let condition = condition_number(&DMatrix::from_fn(N, N, |i, j| g[i][j]));
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularMetric { condition });
    }
    Ok(())
}

fn singular() -> Error {
    Error::SingularMetric {
        condition: f64::INFINITY,
    }
}

/// `Γ^k_ij` at `p` as a `(1,2)` tensor indexed `[k][i][j]`.
pub fn christoffel<const N: usize>(g: &MetricField<N>, p: &ChartPoint<N>) -> Result<TensorValue> {
    let jets = g.jets(p)?;
    let gamma = christoffel_from(&jets.g, &jets.dg).ok_or_else(singular)?;
    Ok(rank3_tensor(
        &gamma,
        [Variance::Upper, Variance::Lower, Variance::Lower],
    ))
}

fn rank3_tensor<const N: usize>(a: &Rank3<N>, variance: [Variance; 3]) -> TensorValue {
    TensorValue::from_fn(N, variance.to_vec(), |i| a[i[0]][i[1]][i[2]])
}

/// Everything curvature-related at one point, in the components of one chart.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePack {
    pub metric: TensorValue,
    pub metric_inverse: TensorValue,
    /// `Γ^k_ij`, indexed `[k][i][j]`.
    pub gamma: TensorValue,
    /// `R^l_ijk`, indexed `[l][i][j][k]`.
    pub riemann_up: TensorValue,
    /// `R_ijkw`.
    pub riemann: TensorValue,
    pub ricci: TensorValue,
    pub scalar: f64,
    pub ricci_star: Option<TensorValue>,
    pub scalar_star: Option<f64>,
}

/// Absolute residuals of the algebraic curvature identities, and the scale
/// (largest `|R_ijkw|`) they should be compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSymmetries {
    pub gamma_symmetry: f64,
    pub antisymmetry_12: f64,
    pub antisymmetry_34: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
    pub scale: f64,
}

impl CurvatureSymmetries {
    /// Largest residual divided by `max(1, scale)`.
    pub fn max_relative(&self) -> f64 {
        [
            self.gamma_symmetry,
            self.antisymmetry_12,
            self.antisymmetry_34,
            self.pair_symmetry,
            self.bianchi,
        ]
        .into_iter()
        .fold(0.0, f64::max)
            / self.scale.max(1.0)
    }
}

impl CurvaturePack {
    /// Every tensor of the pack in components with respect to `frame`.
    /// `Γ` transforms as a tensor, which is valid for linear changes of chart.
    pub fn to_frame(&self, frame: &FrameData) -> Result<Self> {
        Ok(Self {
            metric: self.metric.to_frame(frame)?,
            metric_inverse: self.metric_inverse.to_frame(frame)?,
            gamma: self.gamma.to_frame(frame)?,
            riemann_up: self.riemann_up.to_frame(frame)?,
            riemann: self.riemann.to_frame(frame)?,
            ricci: self.ricci.to_frame(frame)?,
            scalar: self.scalar,
            ricci_star: self
                .ricci_star
                .as_ref()
                .map(|r| r.to_frame(frame))
                .transpose()?,
            scalar_star: self.scalar_star,
        })
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// `(ρ*, τ*)`, which exist only when the structure was supplied.
    pub fn starred(&self) -> Result<(&TensorValue, f64)> {
        match (&self.ricci_star, self.scalar_star) {
            (Some(r), Some(s)) => Ok((r, s)),
            _ => Err(Error::MissingStructure),
        }
    }

    pub fn symmetries(&self) -> CurvatureSymmetries {
        let n = self.dim();
        let r = |i, j, k, w| self.riemann.get(&[i, j, k, w]);
        let mut s = CurvatureSymmetries {
            gamma_symmetry: 0.0,
            antisymmetry_12: 0.0,
            antisymmetry_34: 0.0,
            pair_symmetry: 0.0,
            bianchi: 0.0,
            scale: self.riemann.max_abs(),
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let d = (self.gamma.get(&[k, i, j]) - self.gamma.get(&[k, j, i])).abs();
                    s.gamma_symmetry = s.gamma_symmetry.max(d);
                    for w in 0..n {
                        let v = r(i, j, k, w);
                        s.antisymmetry_12 = s.antisymmetry_12.max((v + r(j, i, k, w)).abs());
                        s.antisymmetry_34 = s.antisymmetry_34.max((v + r(i, j, w, k)).abs());
                        s.pair_symmetry = s.pair_symmetry.max((v - r(k, w, i, j)).abs());
                        s.bianchi = s.bianchi.max((v + r(j, k, i, w) + r(k, i, j, w)).abs());
                    }
                }
            }
        }
        s
    }
}

/// Connection, curvature, Ricci and scalar curvature at `p`. The starred
/// quantities are filled in when the structure endomorphism `phi` (indexed
/// `[m][j] = φ^m_j`) is given.
///
/// Curvature is computed in the linear chart of a `g(p)`-orthonormal
/// eigenframe and transformed back, which keeps it accurate when the
/// coordinate metric is badly conditioned.
pub fn curvature<const N: usize>(
    g: &MetricField<N>,
    p: &ChartPoint<N>,
    phi: Option<&TensorValue>,
) -> Result<CurvaturePack> {
    let jets = g.jets(p)?;
    let frame = orthonormal_frame(&TensorValue::covariant_matrix(&jets.g))?;
    let phi_local = phi.map(|f| f.to_frame(&frame)).transpose()?;
    let local = curvature_from_jets(&jets.in_basis(&basis_matrix(&frame)?), phi_local.as_ref())?;
    // back to coordinates: ∂_i = C^a_i e_a with C the coframe
    let coframe = frame.coframe()?;
    let back = FrameData::new(
        (0..N)
            .map(|i| (0..N).map(|a| coframe[(a, i)]).collect())
            .collect(),
        &local.metric,
    )?;
    let mut pack = local.to_frame(&back)?;
    pack.metric = TensorValue::covariant_matrix(&jets.g);
    // Γ itself is most faithful to the coordinate data when taken directly
    let gamma = christoffel_from(&jets.g, &jets.dg).ok_or_else(singular)?;
    pack.gamma = rank3_tensor(&gamma, [Variance::Upper, Variance::Lower, Variance::Lower]);
    Ok(pack)
}

/// Like [`curvature`], but every component is taken with respect to the
/// basis `frame` (in the linear chart `x = p + E q`). `phi` is given in
/// coordinates. For an orthonormal frame this is the accurate way to obtain
/// frame components when the coordinate metric is badly conditioned.
pub fn curvature_in_frame<const N: usize>(
    g: &MetricField<N>,
    p: &ChartPoint<N>,
    frame: &FrameData,
    phi: Option<&TensorValue>,
) -> Result<CurvaturePack> {
    let jets = g.jets(p)?.in_basis(&basis_matrix(frame)?);
    let phi = phi.map(|f| f.to_frame(frame)).transpose()?;
    curvature_from_jets(&jets, phi.as_ref())
}

/// `Γ` in the linear chart of `frame`, indexed `[k][i][j]`.
pub fn christoffel_in_frame<const N: usize>(
    g: &MetricField<N>,
    p: &ChartPoint<N>,
    frame: &FrameData,
) -> Result<TensorValue> {
    let jets = g.jets(p)?.in_basis(&basis_matrix(frame)?);
    let gamma = christoffel_from(&jets.g, &jets.dg).ok_or_else(singular)?;
    Ok(rank3_tensor(
        &gamma,
        [Variance::Upper, Variance::Lower, Variance::Lower],
    ))
}

pub(crate) fn basis_matrix<const N: usize>(frame: &FrameData) -> Result<Mat<N>> {
    if frame.dim() != N {
        return Err(Error::Shape(format!(
            "frame of dimension {} on a {N}-dimensional chart",
            frame.dim()
        )));
    }
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|a| frame.vectors[a][i])
    }))
}

/// A `g`-orthonormal basis from the eigen-decomposition of `g`.
pub fn orthonormal_frame(g: &TensorValue) -> Result<FrameData> {
    let n = g.dim();
    let m = metric_matrix(g)?;
    let eig = m.symmetric_eigen();
    let vectors = (0..n)
        .map(|a| {
            let scale = eig.eigenvalues[a].sqrt();
            (0..n).map(|i| eig.eigenvectors[(i, a)] / scale).collect()
        })
        .collect();
    FrameData::new(vectors, g)
}

/// Connection and curvature from metric jets, in the chart the jets are
/// given in. Accurate when `jets.g` is well conditioned.
pub fn curvature_from_jets<const N: usize>(
    jets: &MetricJets<N>,
    phi: Option<&TensorValue>,
) -> Result<CurvaturePack> {
    let g_jet: [[Jet1<N>; N]; N] = std::array::from_fn(|i| {
        std::array::from_fn(|j| Jet1::new(jets.g[i][j], std::array::from_fn(|m| jets.dg[m][i][j])))
    });
    let dg_jet: [[[Jet1<N>; N]; N]; N] = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            std::array::from_fn(|c| {
                Jet1::new(
                    jets.dg[a][b][c],
                    std::array::from_fn(|m| jets.ddg[m][a][b][c]),
                )
            })
        })
    });
    let gamma_jet = christoffel_from(&g_jet, &dg_jet).ok_or_else(singular)?;
    let gamma: Rank3<N> = std::array::from_fn(|k| {
        std::array::from_fn(|i| std::array::from_fn(|j| gamma_jet[k][i][j].value))
    });
    let dgamma = |m: usize, k: usize, i: usize, j: usize| gamma_jet[k][i][j].gradient[m];
    let ginv = invert(&jets.g).ok_or_else(singular)?;

    let mut up = [[[[0.0; N]; N]; N]; N];
    for l in 0..N {
        for i in 0..N {
            for j in 0..N {
                for k in 0..N {
                    let mut v = dgamma(i, l, j, k) - dgamma(j, l, i, k);
                    for m in 0..N {
                        v += gamma[l][i][m] * gamma[m][j][k] - gamma[l][j][m] * gamma[m][i][k];
                    }
                    up[l][i][j][k] = v;
                }
            }
        }
    }
    let mut down = [[[[0.0; N]; N]; N]; N];
    for i in 0..N {
        for j in 0..N {
            for k in 0..N {
                for w in 0..N {
                    down[i][j][k][w] = (0..N).map(|l| jets.g[l][w] * up[l][i][j][k]).sum();
                }
            }
        }
    }
    let mut ricci = [[0.0; N]; N];
    for y in 0..N {
        for z in 0..N {
            let mut s = 0.0;
            for i in 0..N {
                for w in 0..N {
                    s += ginv[i][w] * down[i][y][z][w];
                }
            }
            ricci[y][z] = s;
        }
    }
    let trace = |m: &Mat<N>| -> f64 {
        (0..N)
            .flat_map(|a| (0..N).map(move |b| (a, b)))
            .map(|(a, b)| ginv[a][b] * m[a][b])
            .sum()
    };
    let scalar = trace(&ricci);

    let (ricci_star, scalar_star) = match phi {
        None => (None, None),
        Some(phi) => {
            if phi.dim() != N || phi.variance() != [Variance::Upper, Variance::Lower] {
                return Err(Error::VarianceMismatch(
                    "structure must be a (1,1) tensor of the chart dimension".into(),
                ));
            }
            let mut rs = [[0.0; N]; N];
            for y in 0..N {
                for z in 0..N {
                    let mut s = 0.0;
                    for i in 0..N {
                        for j in 0..N {
                            for m in 0..N {
                                s += ginv[i][j] * down[i][y][z][m] * phi.get(&[m, j]);
                            }
                        }
                    }
                    rs[y][z] = s;
                }
            }
            let ts = trace(&rs);
            (Some(TensorValue::covariant_matrix(&rs)), Some(ts))
        }
    };

    Ok(CurvaturePack {
        metric: TensorValue::covariant_matrix(&jets.g),
        metric_inverse: TensorValue::from_fn(N, vec![Variance::Upper; 2], |i| ginv[i[0]][i[1]]),
        gamma: rank3_tensor(&gamma, [Variance::Upper, Variance::Lower, Variance::Lower]),
        riemann_up: TensorValue::from_fn(
            N,
            vec![
                Variance::Upper,
                Variance::Lower,
                Variance::Lower,
                Variance::Lower,
            ],
            |i| up[i[0]][i[1]][i[2]][i[3]],
        ),
        riemann: TensorValue::from_fn(N, vec![Variance::Lower; 4], |i| {
            down[i[0]][i[1]][i[2]][i[3]]
        }),
        ricci: TensorValue::covariant_matrix(&ricci),
        scalar,
        ricci_star,
        scalar_star,
    })
}

fn inner(g: &TensorValue, a: &[f64], b: &[f64]) -> f64 {
    g.evaluate(&[a, b])
}

fn apply(phi: &TensorValue, v: &[f64]) -> Vec<f64> {
    let n = phi.dim();
    (0..n)
        .map(|k| (0..n).map(|j| phi.get(&[k, j]) * v[j]).sum())
        .collect()
}

/// Sectional curvature of the plane spanned by `x` and `y`.
pub fn sectional(riemann: &TensorValue, g: &TensorValue, x: &[f64], y: &[f64]) -> Result<f64> {
    if riemann.variance() != [Variance::Lower; 4] {
        return Err(Error::VarianceMismatch(
            "sectional curvature needs the (0,4) tensor".into(),
        ));
    }
    let (p1, _) = pi_values(g, None, x, y, y, x);
    let scale = inner(g, x, x) * inner(g, y, y);
    if !(p1.abs() > DEGENERATE_PLANE * scale) {
        return Err(Error::DegeneratePlane { value: p1 });
    }
    Ok(riemann.evaluate(&[x, y, y, x]) / p1)
}

fn pi_values(
    g: &TensorValue,
    phi: Option<&TensorValue>,
    x: &[f64],
    y: &[f64],
    z: &[f64],
    w: &[f64],
) -> (f64, f64) {
    let p1 = inner(g, y, z) * inner(g, x, w) - inner(g, x, z) * inner(g, y, w);
    let p2 = phi.map_or(0.0, |phi| {
        let (fx, fy, fz) = (apply(phi, x), apply(phi, y), apply(phi, z));
        inner(g, y, &fz) * inner(g, &fx, w) - inner(g, x, &fz) * inner(g, &fy, w)
    });
    (p1, p2)
}

/// `(π₁(x,y,z,w), π₂(x,y,z,w))`.
pub fn pi_tensors(
    g: &TensorValue,
    phi: &TensorValue,
    x: &[f64],
    y: &[f64],
    z: &[f64],
    w: &[f64],
) -> (f64, f64) {
    pi_values(g, Some(phi), x, y, z, w)
}

/// `(∇_i T)^k_j = ∂_i T^k_j + Γ^k_im T^m_j − Γ^m_ij T^k_m`, indexed
/// `[i][k][j]`, from the value `t[k][j]` and partials `dt[i][k][j]`.
pub fn covariant_derivative_11_from(
    gamma: &TensorValue,
    t: &[Vec<f64>],
    dt: &[Vec<Vec<f64>>],
) -> TensorValue {
    let n = gamma.dim();
    TensorValue::from_fn(
        n,
        vec![Variance::Lower, Variance::Upper, Variance::Lower],
        |idx| {
            let (i, k, j) = (idx[0], idx[1], idx[2]);
            let mut v = dt[i][k][j];
            for m in 0..n {
                v += gamma.get(&[k, i, m]) * t[m][j] - gamma.get(&[m, i, j]) * t[k][m];
            }
            v
        },
    )
}

/// Covariant derivative of a `(1,1)` tensor field given by components
/// `t[k][j]`.
pub fn covariant_derivative_11<const N: usize>(
    t: &[[ScalarField; N]; N],
    g: &MetricField<N>,
    p: &ChartPoint<N>,
) -> Result<TensorValue> {
    let gamma = christoffel(g, p)?;
    let mut value = vec![vec![0.0; N]; N];
    let mut partial = vec![vec![vec![0.0; N]; N]; N];
    for k in 0..N {
        for j in 0..N {
            let jet = t[k][j].eval_jet2(&p.coords)?;
            value[k][j] = jet.value;
            for i in 0..N {
                partial[i][k][j] = jet.gradient[i];
            }
        }
    }
    Ok(covariant_derivative_11_from(&gamma, &value, &partial))
}

/// `∇_w v` for a vector field with value `v` and partials `dv[i][k] = ∂_i v^k`.
pub fn covariant_derivative_vector(
    gamma: &TensorValue,
    v: &[f64],
    dv: &[Vec<f64>],
    w: &[f64],
) -> Vec<f64> {
    let n = gamma.dim();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|i| {
                    let conn: f64 = (0..n).map(|j| gamma.get(&[k, i, j]) * v[j]).sum();
                    w[i] * (dv[i][k] + conn)
                })
                .sum()
        })
        .collect()
}

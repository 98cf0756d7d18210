//! Finite-difference reference derivatives.
//!
//! Everything here works on plain closures and `Vec<f64>` so that it shares no
//! code path with the jet-based engine it is used to check. Derivatives use the
//! fourth-order central stencil with one Richardson step (steps `h` and `h/2`).

/// Step used throughout the test suites.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Step for [`riemann_down`] on metrics evaluated in plain `f64`, where the
/// rounding noise of nested differences at [`DEFAULT_STEP`] dominates.
pub const CURVATURE_STEP: f64 = 1e-2;

fn stencil(f: &dyn Fn(f64) -> Vec<f64>, h: f64) -> Vec<f64> {
    let (p2, p1, m1, m2) = (f(2.0 * h), f(h), f(-h), f(-2.0 * h));
    (0..p1.len())
        .map(|k| (-p2[k] + 8.0 * p1[k] - 8.0 * m1[k] + m2[k]) / (12.0 * h))
        .collect()
}

/// Partial derivative of a vector-valued function along coordinate `axis`.
pub fn partial(f: &dyn Fn(&[f64]) -> Vec<f64>, p: &[f64], axis: usize, h: f64) -> Vec<f64> {
    let shifted = |s: f64| {
        let mut q = p.to_vec();
        q[axis] += s;
        f(&q)
    };
    let coarse = stencil(&shifted, h);
    let fine = stencil(&shifted, h / 2.0);
    coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (16.0 * f - c) / 15.0)
        .collect()
}

pub fn gradient(f: &dyn Fn(&[f64]) -> f64, p: &[f64], h: f64) -> Vec<f64> {
    let wrapped = |q: &[f64]| vec![f(q)];
    (0..p.len())
        .map(|i| partial(&wrapped, p, i, h)[0])
        .collect()
}

pub fn hessian(f: &dyn Fn(&[f64]) -> f64, p: &[f64], h: f64) -> Vec<Vec<f64>> {
    let grad = |q: &[f64]| gradient(f, q, h);
    let n = p.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        let d = partial(&grad, p, i, h);
        for j in 0..n {
            out[i][j] = d[j];
        }
    }
    out
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn invert(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col];
        assert!(d != 0.0, "singular matrix in oracle");
        for j in 0..n {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for r in 0..n {
            if r != col {
                let factor = a[r][col];
                for j in 0..n {
                    a[r][j] -= factor * a[col][j];
                    inv[r][j] -= factor * inv[col][j];
                }
            }
        }
    }
    inv
}

pub type Metric<'a> = &'a dyn Fn(&[f64]) -> Vec<Vec<f64>>;

fn flatten(m: Vec<Vec<f64>>) -> Vec<f64> {
    m.into_iter().flatten().collect()
}

/// `gamma[k][i][j]` by the Koszul formula with differenced metric components.
pub fn christoffel(metric: Metric<'_>, p: &[f64], h: f64) -> Vec<Vec<Vec<f64>>> {
    let flat = |q: &[f64]| flatten(metric(q));
    christoffel_with(&flat, &metric(p), p, h)
}

/// [`christoffel`] from metric offsets, as in [`riemann_down_from_offsets`].
pub fn christoffel_from_offsets(delta: Metric<'_>, g: &[Vec<f64>], h: f64) -> Vec<Vec<Vec<f64>>> {
    let flat = |d: &[f64]| flatten(delta(d));
    christoffel_with(&flat, g, &vec![0.0; g.len()], h)
}

fn christoffel_with(
    flat: &dyn Fn(&[f64]) -> Vec<f64>,
    g: &[Vec<f64>],
    p: &[f64],
    h: f64,
) -> Vec<Vec<Vec<f64>>> {
    let n = p.len();
    // dg[i][a*n + b] = d_i g_ab
    let dg: Vec<Vec<f64>> = (0..n).map(|i| partial(flat, p, i, h)).collect();
    let ginv = invert(g);
    let mut gamma = vec![vec![vec![0.0; n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += ginv[k][l] * (dg[i][j * n + l] + dg[j][i * n + l] - dg[l][i * n + j]);
                }
                gamma[k][i][j] = 0.5 * s;
            }
        }
    }
    gamma
}

/// `r[l][i][j][k]` with `R(d_i, d_j) d_k = r[l][i][j][k] d_l` and
/// `R(X, Y) = [nabla_X, nabla_Y] - nabla_[X, Y]`.
pub fn riemann_up(metric: Metric<'_>, p: &[f64], h: f64) -> Vec<Vec<Vec<Vec<f64>>>> {
    let n = p.len();
    let flat_gamma = |q: &[f64]| -> Vec<f64> {
        christoffel(metric, q, h)
            .into_iter()
            .flatten()
            .flatten()
            .collect()
    };
    let gamma = christoffel(metric, p, h);
    let dgamma: Vec<Vec<f64>> = (0..n).map(|i| partial(&flat_gamma, p, i, h)).collect();
    let at = |m: usize, k: usize, i: usize, j: usize| dgamma[m][(k * n + i) * n + j];
    let mut r = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = at(i, l, j, k) - at(j, l, i, k);
                    for m in 0..n {
                        v += gamma[l][i][m] * gamma[m][j][k] - gamma[l][j][m] * gamma[m][i][k];
                    }
                    r[l][i][j][k] = v;
                }
            }
        }
    }
    r
}

/// `r[i][j][k][w] = g(R(d_i, d_j) d_k, d_w)`, from second differences of the
/// metric and Christoffel symbols of the first kind `G_{w,jk}`:
/// `r_ijkw = d_i G_{w,jk} - d_j G_{w,ik} + g^{mn} (G_{m,jw} G_{n,ik} - G_{m,iw} G_{n,jk})`.
pub fn riemann_down(metric: Metric<'_>, p: &[f64], h: f64) -> Vec<Vec<Vec<Vec<f64>>>> {
    let gp = metric(p);
    let delta = |d: &[f64]| {
        let q: Vec<f64> = p.iter().zip(d).map(|(a, b)| a + b).collect();
        let gq = metric(&q);
        (0..p.len())
            .map(|i| (0..p.len()).map(|j| gq[i][j] - gp[i][j]).collect())
            .collect()
    };
    riemann_down_from_offsets(&delta, &gp, h)
}

/// [`riemann_down`] from metric offsets `delta(d) = g(p + d) - g(p)` and `g(p)`.
///
/// The stencils only ever see differences, so rounding noise scales with the
/// size of the offsets rather than with the metric itself. On badly
/// conditioned charts, where the quadratic term amplifies errors in the first
/// derivatives by roughly the condition number of `g`, callers should compute
/// `delta` in extended precision and use a small step such as [`DEFAULT_STEP`].
pub fn riemann_down_from_offsets(
    delta: Metric<'_>,
    g: &[Vec<f64>],
    h: f64,
) -> Vec<Vec<Vec<Vec<f64>>>> {
    let n = g.len();
    let origin = vec![0.0; n];
    let flat = |d: &[f64]| flatten(delta(d));
    let dg: Vec<Vec<f64>> = (0..n).map(|i| partial(&flat, &origin, i, h)).collect();
    // ddg[a][b][c*n + d] = d_a d_b g_cd
    let ddg: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|a| {
            let da = |d: &[f64]| partial(&flat, d, a, h);
            (0..n).map(|b| partial(&da, &origin, b, h)).collect()
        })
        .collect();
    let d2 = |a: usize, b: usize, c: usize, d: usize| {
        0.5 * (ddg[a][b][c * n + d] + ddg[b][a][c * n + d])
    };
    let first = |w: usize, j: usize, k: usize| {
        0.5 * (dg[j][k * n + w] + dg[k][j * n + w] - dg[w][j * n + k])
    };
    // d_i G_{w,jk}
    let d_first = |i: usize, w: usize, j: usize, k: usize| {
        0.5 * (d2(i, j, k, w) + d2(i, k, j, w) - d2(i, w, j, k))
    };
    let ginv = invert(g);
    let mut r = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for w in 0..n {
                    let mut v = d_first(i, w, j, k) - d_first(j, w, i, k);
                    for m in 0..n {
                        for l in 0..n {
                            v += ginv[m][l]
                                * (first(m, j, w) * first(l, i, k)
                                    - first(m, i, w) * first(l, j, k));
                        }
                    }
                    r[i][j][k][w] = v;
                }
            }
        }
    }
    r
}

/// `(nabla_i T)^k_j` for a (1,1) tensor field `t(q)[k][j]`, indexed `[i][k][j]`.
pub fn covariant_derivative_11(
    metric: Metric<'_>,
    t: &dyn Fn(&[f64]) -> Vec<Vec<f64>>,
    p: &[f64],
    h: f64,
) -> Vec<Vec<Vec<f64>>> {
    let n = p.len();
    let gamma = christoffel(metric, p, h);
    let flat = |q: &[f64]| flatten(t(q));
    let tp = t(p);
    let mut out = vec![vec![vec![0.0; n]; n]; n];
    for i in 0..n {
        let d = partial(&flat, p, i, h);
        for k in 0..n {
            for j in 0..n {
                let mut v = d[k * n + j];
                for m in 0..n {
                    v += gamma[k][i][m] * tp[m][j] - gamma[m][i][j] * tp[k][m];
                }
                out[i][k][j] = v;
            }
        }
    }
    out
}

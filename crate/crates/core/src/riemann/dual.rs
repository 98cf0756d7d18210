//! First-order jets used to differentiate the Christoffel symbols through the
//! metric inverse without a third derivative of the metric.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Minimal field interface shared by `f64` and [`Jet1`].
pub trait Field:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn re(&self) -> f64;
}

impl Field for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn re(&self) -> f64 {
        *self
    }
}

/// Value and gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1<const N: usize> {
    pub value: f64,
    pub gradient: [f64; N],
}

impl<const N: usize> Jet1<N> {
    pub fn new(value: f64, gradient: [f64; N]) -> Self {
        Self { value, gradient }
    }
}

impl<const N: usize> Field for Jet1<N> {
    fn from_f64(v: f64) -> Self {
        Self::new(v, [0.0; N])
    }

    fn re(&self) -> f64 {
        self.value
    }
}

impl<const N: usize> Add for Jet1<N> {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(
            self.value + r.value,
            std::array::from_fn(|i| self.gradient[i] + r.gradient[i]),
        )
    }
}

impl<const N: usize> Sub for Jet1<N> {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(
            self.value - r.value,
            std::array::from_fn(|i| self.gradient[i] - r.gradient[i]),
        )
    }
}

impl<const N: usize> Neg for Jet1<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, self.gradient.map(|g| -g))
    }
}

impl<const N: usize> Mul for Jet1<N> {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Self::new(
            self.value * r.value,
            std::array::from_fn(|i| self.value * r.gradient[i] + r.value * self.gradient[i]),
        )
    }
}

impl<const N: usize> Div for Jet1<N> {
    type Output = Self;
    fn div(self, r: Self) -> Self {
        let q = self.value / r.value;
        Self::new(
            q,
            std::array::from_fn(|i| (self.gradient[i] - q * r.gradient[i]) / r.value),
        )
    }
}

/// Gauss-Jordan inverse with partial pivoting on the real parts.
pub fn invert<T: Field, const N: usize>(m: &[[T; N]; N]) -> Option<[[T; N]; N]> {
    let mut a = *m;
    let mut inv: [[T; N]; N] =
        std::array::from_fn(|i| std::array::from_fn(|j| T::from_f64((i == j) as u8 as f64)));
    for col in 0..N {
        let pivot =
            (col..N).max_by(|&r, &s| a[r][col].re().abs().total_cmp(&a[s][col].re().abs()))?;
        if a[pivot][col].re() == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col];
        for j in 0..N {
            a[col][j] = a[col][j] / d;
            inv[col][j] = inv[col][j] / d;
        }
        for r in 0..N {
            if r != col {
                let f = a[r][col];
                for j in 0..N {
                    a[r][j] = a[r][j] - f * a[col][j];
                    inv[r][j] = inv[r][j] - f * inv[col][j];
                }
            }
        }
    }
    Some(inv)
}

/// `gamma[k][i][j] = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)` with
/// `dg[i][j][l] = d_i g_jl`.
pub fn christoffel_from<T: Field, const N: usize>(
    g: &[[T; N]; N],
    dg: &[[[T; N]; N]; N],
) -> Option<[[[T; N]; N]; N]> {
    let ginv = invert(g)?;
    let half = T::from_f64(0.5);
    Some(std::array::from_fn(|k| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut s = T::from_f64(0.0);
                for l in 0..N {
                    s = s + ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
                half * s
            })
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_division_matches_quotient_rule() {
        let a = Jet1::new(3.0, [1.0, 0.0]);
        let b = Jet1::new(2.0, [0.0, 1.0]);
        let q = a / b;
        assert_eq!(q.value, 1.5);
        assert_eq!(q.gradient, [0.5, -0.75]);
    }

    #[test]
    fn inverse_of_jet_matrix() {
        // m(s) = [[1+s, 0], [0, 2]] -> d/ds m^-1 = [[-1, 0], [0, 0]] at s = 0
        let m = [
            [Jet1::new(1.0, [1.0]), Jet1::from_f64(0.0)],
            [Jet1::from_f64(0.0), Jet1::from_f64(2.0)],
        ];
        let inv = invert(&m).unwrap();
        assert_eq!(inv[0][0].gradient, [-1.0]);
        assert_eq!(inv[1][1].value, 0.5);
    }
}

//! Second-order jets: value, gradient and Hessian carried together through
//! every arithmetic operation.

use std::ops::{Add, Mul, Neg, Sub};

/// Value, gradient and Hessian of a scalar function at one point of an
/// `N`-dimensional chart.
///
/// Only the upper triangle of the Hessian is ever computed; the lower triangle
/// is a copy, so the matrix is symmetric bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2<const N: usize> {
    pub value: f64,
    pub gradient: [f64; N],
    pub hessian: [[f64; N]; N],
}

impl<const N: usize> Jet2<N> {
    pub fn constant(value: f64) -> Self {
        Self {
            value,
            gradient: [0.0; N],
            hessian: [[0.0; N]; N],
        }
    }

    /// The coordinate function `x_index` evaluated at `value`.
    pub fn variable(index: usize, value: f64) -> Self {
        let mut jet = Self::constant(value);
        jet.gradient[index] = 1.0;
        jet
    }

    /// Composes a univariate function with this jet, given `f(u)`, `f'(u)`
    /// and `f''(u)` at `u = self.value`.
    pub fn chain(&self, f: f64, df: f64, d2f: f64) -> Self {
        let mut out = Self::constant(f);
        for i in 0..N {
            out.gradient[i] = df * self.gradient[i];
        }
        for i in 0..N {
            for j in i..N {
                let h = df * self.hessian[i][j] + d2f * self.gradient[i] * self.gradient[j];
                out.hessian[i][j] = h;
                out.hessian[j][i] = h;
            }
        }
        out
    }

    /// Reciprocal `1/self`; the caller guarantees `self.value != 0`.
    pub fn recip(&self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..N).all(|i| (0..N).all(|j| self.hessian[i][j] == self.hessian[j][i]))
    }
}

impl<const N: usize> Add for Jet2<N> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        out.value += rhs.value;
        for i in 0..N {
            out.gradient[i] += rhs.gradient[i];
            for j in 0..N {
                out.hessian[i][j] += rhs.hessian[i][j];
            }
        }
        out
    }
}

impl<const N: usize> Sub for Jet2<N> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const N: usize> Neg for Jet2<N> {
    type Output = Self;

    fn neg(self) -> Self {
        let mut out = self;
        out.value = -out.value;
        for i in 0..N {
            out.gradient[i] = -out.gradient[i];
            for j in 0..N {
                out.hessian[i][j] = -out.hessian[i][j];
            }
        }
        out
    }
}

impl<const N: usize> Mul for Jet2<N> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self, &rhs);
        let mut out = Self::constant(a.value * b.value);
        for i in 0..N {
            out.gradient[i] = a.value * b.gradient[i] + b.value * a.gradient[i];
        }
        for i in 0..N {
            for j in i..N {
                let h = a.value * b.hessian[i][j]
                    + b.value * a.hessian[i][j]
                    + (a.gradient[i] * b.gradient[j] + b.gradient[i] * a.gradient[j]);
                out.hessian[i][j] = h;
                out.hessian[j][i] = h;
            }
        }
        out
    }
}

//! Small dense tensors in dimension 2 or 3.
//!
//! Components are stored row-major in slot order; each slot carries its own
//! [`Variance`]. Everything here is plain linear algebra at a single point.

mod frame;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::{Error, Result};

pub use frame::{build_paracomplex_basis, build_phi_basis, FrameData, Orientation};

/// Condition number above which a metric is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Variance {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Raise,
    Lower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorValue {
    dim: usize,
    variance: Vec<Variance>,
    data: Vec<f64>,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::Shape(format!("dimension {dim} is not supported")))
    }
}

impl TensorValue {
    pub fn new(dim: usize, variance: Vec<Variance>, data: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        let want = dim.pow(variance.len() as u32);
        if data.len() != want {
            return Err(Error::Shape(format!(
                "{} components supplied, {want} expected",
                data.len()
            )));
        }
        Ok(Self {
            dim,
            variance,
            data,
        })
    }

    pub fn zeros(dim: usize, variance: Vec<Variance>) -> Self {
        let n = dim.pow(variance.len() as u32);
        Self {
            dim,
            variance,
            data: vec![0.0; n],
        }
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        Self {
            dim,
            variance: Vec::new(),
            data: vec![value],
        }
    }

    pub fn from_fn(dim: usize, variance: Vec<Variance>, f: impl Fn(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(dim, variance);
        for flat in 0..t.data.len() {
            let idx = t.unflatten(flat);
            t.data[flat] = f(&idx);
        }
        t
    }

    /// `(0,2)` tensor from a square matrix.
    pub fn covariant_matrix<const N: usize>(m: &[[f64; N]; N]) -> Self {
        Self::from_fn(N, vec![Variance::Lower; 2], |i| m[i[0]][i[1]])
    }

    /// `(1,1)` tensor `m[k][j]` acting as `v^j -> m[k][j] v^j`.
    pub fn endomorphism<const N: usize>(m: &[[f64; N]; N]) -> Self {
        Self::from_fn(N, vec![Variance::Upper, Variance::Lower], |i| m[i[0]][i[1]])
    }

    pub fn vector(v: &[f64]) -> Self {
        Self::from_fn(v.len(), vec![Variance::Upper], |i| v[i[0]])
    }

    pub fn covector(v: &[f64]) -> Self {
        Self::from_fn(v.len(), vec![Variance::Lower], |i| v[i[0]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn flatten(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.rank()];
        for slot in (0..self.rank()).rev() {
            idx[slot] = flat % self.dim;
            flat /= self.dim;
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flatten(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let k = self.flatten(idx);
        self.data[k] = value;
    }

    /// Value of a rank-0 tensor.
    pub fn as_scalar(&self) -> Option<f64> {
        (self.rank() == 0).then(|| self.data[0])
    }

    /// Rank-2 tensor as a nested matrix.
    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        assert_eq!(self.rank(), 2, "to_matrix on a rank-{} tensor", self.rank());
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(&[i, j])).collect())
            .collect()
    }

    /// Full contraction with one argument per slot: vectors in lower slots,
    /// covectors in upper slots.
    pub fn evaluate(&self, args: &[&[f64]]) -> f64 {
        assert_eq!(args.len(), self.rank(), "one argument per slot");
        let mut sum = 0.0;
        for flat in 0..self.data.len() {
            let v = self.data[flat];
            if v == 0.0 {
                continue;
            }
            let idx = self.unflatten(flat);
            sum += idx.iter().zip(args).fold(v, |acc, (&i, a)| acc * a[i]);
        }
        sum
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest componentwise difference; tensors must have the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= factor);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.variance != other.variance {
            return Err(Error::Shape("addition of tensors of different type".into()));
        }
        let mut out = self.clone();
        out.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }

    /// Tensor with its slots reordered: slot `s` of the result is slot
    /// `perm[s]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rank());
        let variance = perm.iter().map(|&p| self.variance[p]).collect();
        Self::from_fn(self.dim, variance, |idx| {
            let mut src = vec![0; idx.len()];
            for (s, &p) in perm.iter().enumerate() {
                src[p] = idx[s];
            }
            self.get(&src)
        })
    }

    pub fn outer(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Shape("outer product of different dimensions".into()));
        }
        let mut variance = self.variance.clone();
        variance.extend_from_slice(&other.variance);
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Ok(Self {
            dim: self.dim,
            variance,
            data,
        })
    }

    /// Trace over one upper and one lower slot.
    pub fn contract(&self, slot_i: usize, slot_j: usize) -> Result<Self> {
        let rank = self.rank();
        for s in [slot_i, slot_j] {
            if s >= rank {
                return Err(Error::SlotOutOfRange { slot: s, rank });
            }
        }
        if slot_i == slot_j {
            return Err(Error::VarianceMismatch(
                "cannot contract a slot with itself".into(),
            ));
        }
        if self.variance[slot_i] == self.variance[slot_j] {
            return Err(Error::VarianceMismatch(format!(
                "slots {slot_i} and {slot_j} are both {:?}",
                self.variance[slot_i]
            )));
        }
        let kept: Vec<usize> = (0..rank).filter(|&s| s != slot_i && s != slot_j).collect();
        let variance = kept.iter().map(|&s| self.variance[s]).collect();
        let mut out = Self::zeros(self.dim, variance);
        let mut src = vec![0; rank];
        for flat in 0..out.data.len() {
            let idx = out.unflatten(flat);
            for (k, &s) in kept.iter().enumerate() {
                src[s] = idx[k];
            }
            let mut sum = 0.0;
            for m in 0..self.dim {
                src[slot_i] = m;
                src[slot_j] = m;
                sum += self.get(&src);
            }
            out.data[flat] = sum;
        }
        Ok(out)
    }

    /// Applies `matrix` (`new_a = sum_i matrix[a][i] old_i`) along one slot.
    fn transform_slot(&self, slot: usize, matrix: &[Vec<f64>], variance: Variance) -> Self {
        let mut out = Self::zeros(self.dim, self.variance.clone());
        out.variance[slot] = variance;
        for flat in 0..out.data.len() {
            let mut idx = out.unflatten(flat);
            let a = idx[slot];
            let mut sum = 0.0;
            for (i, m) in matrix[a].iter().enumerate() {
                idx[slot] = i;
                sum += m * self.get(&idx);
            }
            out.data[flat] = sum;
        }
        out
    }

    /// Raises or lowers one slot with the metric `g`.
    pub fn raise_lower(&self, slot: usize, g: &TensorValue, direction: Direction) -> Result<Self> {
        if slot >= self.rank() {
            return Err(Error::SlotOutOfRange {
                slot,
                rank: self.rank(),
            });
        }
        let gm = metric_matrix(g)?;
        if gm.nrows() != self.dim {
            return Err(Error::Shape("metric and tensor dimensions differ".into()));
        }
        let (matrix, variance) = match direction {
            Direction::Raise => {
                if self.variance[slot] != Variance::Lower {
                    return Err(Error::VarianceMismatch(format!(
                        "slot {slot} is already upper"
                    )));
                }
                let inv = gm.try_inverse().ok_or(Error::SingularMetric {
                    condition: f64::INFINITY,
                })?;
                (to_rows(&inv), Variance::Upper)
            }
            Direction::Lower => {
                if self.variance[slot] != Variance::Upper {
                    return Err(Error::VarianceMismatch(format!(
                        "slot {slot} is already lower"
                    )));
                }
                (to_rows(&gm), Variance::Lower)
            }
        };
        Ok(self.transform_slot(slot, &matrix, variance))
    }

    /// Components with respect to `frame`; rank-0 tensors are unchanged.
    pub fn to_frame(&self, frame: &FrameData) -> Result<Self> {
        if frame.dim() != self.dim {
            return Err(Error::Shape(format!(
                "frame of dimension {} applied to a {}-dimensional tensor",
                frame.dim(),
                self.dim
            )));
        }
        let basis = frame.matrix();
        let lower: Vec<Vec<f64>> = (0..self.dim)
            .map(|a| (0..self.dim).map(|i| basis[(i, a)]).collect())
            .collect();
        let upper = to_rows(&frame.coframe()?);
        let mut out = self.clone();
        for slot in 0..self.rank() {
            out = match self.variance[slot] {
                Variance::Lower => out.transform_slot(slot, &lower, Variance::Lower),
                Variance::Upper => out.transform_slot(slot, &upper, Variance::Upper),
            };
        }
        Ok(out)
    }
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Validated symmetric `(0,2)` metric as a matrix.
pub fn metric_matrix(g: &TensorValue) -> Result<DMatrix<f64>> {
    if g.variance() != [Variance::Lower, Variance::Lower] {
        return Err(Error::VarianceMismatch(
            "metric must be a (0,2) tensor".into(),
        ));
    }
    let n = g.dim();
    let m = DMatrix::from_fn(n, n, |i, j| g.get(&[i, j]));
    let scale = m.amax().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::Shape("metric is not symmetric".into()));
            }
        }
    }
    let condition = condition_number(&m);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularMetric { condition });
    }
    Ok(m)
}

/// Ratio of extreme absolute eigenvalues of a symmetric matrix.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let eig = m.clone().symmetric_eigenvalues();
    let max = eig.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let min = eig.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Eigenvalues of a symmetric rank-2 tensor, ascending.
pub fn symmetric_eigenvalues(t: &TensorValue) -> Vec<f64> {
    let n = t.dim();
    let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (t.get(&[i, j]) + t.get(&[j, i])));
    let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Number of positive and negative eigenvalues, with `|lambda| <= tol` ignored.
pub fn signature(t: &TensorValue, tol: f64) -> (usize, usize) {
    let eig = symmetric_eigenvalues(t);
    (
        eig.iter().filter(|&&v| v > tol).count(),
        eig.iter().filter(|&&v| v < -tol).count(),
    )
}

use crate::{Error, Result};

/// Default lower bound on `t` for the 3-dimensional construction charts.
pub const DEFAULT_T_MIN: f64 = 1e-6;

/// A point of an `N`-dimensional chart. 3D construction charts order the
/// coordinates `(t, x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint<const N: usize> {
    pub coords: [f64; N],
}

impl<const N: usize> ChartPoint<N> {
    pub fn new(coords: [f64; N]) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite coordinate in {coords:?}"
            )));
        }
        Ok(Self { coords })
    }
}

impl ChartPoint<3> {
    /// A point `(t, x, y)` of a construction chart with `t > t_min`.
    pub fn construction(t: f64, x: f64, y: f64, t_min: f64) -> Result<Self> {
        if !(t > t_min) {
            return Err(Error::Domain(format!(
                "t = {t} is not above t_min = {t_min}"
            )));
        }
        Self::new([t, x, y])
    }

    pub fn t(&self) -> f64 {
        self.coords[0]
    }

    /// The base coordinates `(x, y)`.
    pub fn base(&self) -> ChartPoint<2> {
        ChartPoint {
            coords: [self.coords[1], self.coords[2]],
        }
    }
}

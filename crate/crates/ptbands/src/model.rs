//! Physical parameters and the single-well / periodized Pöschl-Teller
//! potential, in units ħ = m = 1.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("well index l must be >= 1, got {0}")]
    InvalidWellIndex(u32),
    #[error("{name} must be a positive finite real, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

/// Configuration of the lattice: well index `l`, inverse length `alpha`,
/// and half-period `a`. One cell is the interval `[-a, a]`; the lattice
/// period is `2a`. Energies are in units of ħ²/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    l: u32,
    alpha: f64,
    a: f64,
}

impl ModelParams {
    pub fn new(l: u32, alpha: f64, a: f64) -> Result<Self, ModelError> {
        if l < 1 {
            return Err(ModelError::InvalidWellIndex(l));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(ModelError::NonPositive { name: "alpha", value: alpha });
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(ModelError::NonPositive { name: "a", value: a });
        }
        Ok(ModelParams { l, alpha, a })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Half-period: the cell is `[-a, a]`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Lattice period `2a`.
    pub fn period(&self) -> f64 {
        2.0 * self.a
    }

    /// Depth of the well: `V(0) = -l(l+1) α²/2`.
    pub fn well_depth(&self) -> f64 {
        let l = f64::from(self.l);
        0.5 * self.alpha * self.alpha * l * (l + 1.0)
    }

    /// Single (non-periodic) well: `V(x) = -(α²/2) l(l+1) / cosh²(αx)`.
    pub fn potential(&self, x: f64) -> f64 {
        let sech = (self.alpha * x).cosh().recip();
        -self.well_depth() * sech * sech
    }

    /// Reduce `x` modulo the period `2a` into the symmetric cell `[-a, a)`.
    /// The boundary point `x = a` is identified with `-a`.
    pub fn reduce_to_cell(&self, x: f64) -> f64 {
        let period = self.period();
        let mut r = x - period * (x / period).round();
        if r >= self.a {
            r -= period;
        }
        r
    }

    /// Periodized potential: the single well evaluated at the cell
    /// coordinate of `x`. Periodic with period `2a`, even on each cell.
    pub fn potential_periodic(&self, x: f64) -> f64 {
        self.potential(self.reduce_to_cell(x))
    }
}

//! Bracketing root finder for continuous monotone functions.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    /// Stop once the bracket is narrower than this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for Bisection {
    fn default() -> Self {
        Bisection {
            tolerance: 1e-12,
            max_iterations: 200,
        }
    }
}

impl Bisection {
    /// Finds a root of `f` in `[lo, hi]`. `f(lo)` and `f(hi)` must differ in
    /// sign (a zero at either end is returned directly).
    pub fn solve<F>(&self, mut f: F, lo: f64, hi: f64) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        let (mut lo, mut hi) = (lo, hi);
        let mut f_lo = f(lo);
        let f_hi = f(hi);
        if !f_lo.is_finite() || !f_hi.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite value at bracket end: f({lo}) = {f_lo}, f({hi}) = {f_hi}"
            )));
        }
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_hi == 0.0 {
            return Ok(hi);
        }
        if f_lo.signum() == f_hi.signum() {
            return Err(Error::Numeric(format!(
                "no sign change on [{lo}, {hi}]: f = {f_lo}, {f_hi}"
            )));
        }
        for _ in 0..self.max_iterations {
            if hi - lo < self.tolerance {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f_mid = f(mid);
            if f_mid == 0.0 {
                return Ok(mid);
            }
            if !f_mid.is_finite() {
                return Err(Error::Numeric(format!("f({mid}) = {f_mid}")));
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

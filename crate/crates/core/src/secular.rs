//! Root finding for the secular equation `F(z) = alpha`.
//!
//! `F` increases strictly between consecutive poles and sweeps all of the
//! real line there, so each interval holds exactly one root. Bisection
//! narrows the bracket; a few Newton steps, kept inside the bracket, polish
//! the result.

use crate::error::{Result, SebaError};
use crate::spectral::SpectralFunction;

/// Relative bracket width at which bisection stops.
pub const BISECTION_WIDTH: f64 = 1e-10;

/// Newton steps attempted after bisection.
pub const NEWTON_STEPS: usize = 5;

/// Bracket expansion on the bottom interval gives up past `-BRACKET_LIMIT`.
pub const BRACKET_LIMIT: f64 = 1e300;

impl SpectralFunction<'_> {
    /// Unique `z` in `(lo, hi)` with `F(z) = alpha`. `lo = None` stands for
    /// `-inf`. The interval must not contain a pole of `F`.
    pub fn solve_secular_on_interval(&self, lo: Option<f64>, hi: f64, alpha: f64) -> Result<f64> {
        if !alpha.is_finite() {
            return Err(SebaError::InvalidArgument(format!(
                "coupling must be finite, got {alpha}"
            )));
        }
        let lo_value = lo.unwrap_or(f64::NEG_INFINITY);
        if lo_value.is_nan() || hi.is_nan() || lo_value >= hi || hi > self.basis().cutoff() {
            return Err(SebaError::InvalidInterval { lo: lo_value, hi });
        }
        let poles = self.poles();
        let first_inside = poles.partition_point(|&e| e <= lo_value);
        if poles.get(first_inside).is_some_and(|&e| e < hi) {
            return Err(SebaError::InvalidInterval { lo: lo_value, hi });
        }

        let (lo, hi) = match lo {
            Some(lo) => (lo, hi),
            None => self.expand_bracket(hi, alpha)?,
        };
        Ok(self.bisect_and_polish(lo, hi, alpha))
    }

    /// Walks `z = hi - 2^m` downwards until `F(z) < alpha`.
    fn expand_bracket(&self, hi: f64, alpha: f64) -> Result<(f64, f64)> {
        let mut upper = hi;
        let mut step = 1.0;
        loop {
            let z = hi - step;
            if z < -BRACKET_LIMIT {
                return Err(SebaError::NoRoot {
                    alpha,
                    bound: -BRACKET_LIMIT,
                });
            }
            let f = self.eval_unchecked(z);
            if f < alpha {
                return Ok((z, upper));
            }
            if f == alpha {
                return Ok((z, z));
            }
            upper = z;
            step *= 2.0;
        }
    }

    fn bisect_and_polish(&self, mut lo: f64, mut hi: f64, alpha: f64) -> f64 {
        if lo == hi {
            return lo;
        }
        let mut z = 0.5 * (lo + hi);
        loop {
            if hi - lo <= BISECTION_WIDTH * z.abs().max(1.0) || z <= lo || z >= hi {
                break;
            }
            let f = self.eval_unchecked(z) - alpha;
            if f > 0.0 {
                hi = z;
            } else if f < 0.0 {
                lo = z;
            } else {
                return z;
            }
            z = 0.5 * (lo + hi);
        }
        for _ in 0..NEWTON_STEPS {
            let f = self.eval_unchecked(z) - alpha;
            if f == 0.0 {
                break;
            }
            let next = z - f / self.derivative_unchecked(z);
            if !(next > lo && next < hi) || next == z {
                break;
            }
            z = next;
        }
        z
    }
}

//! Brownian-motion exit functionals used as hydrodynamic references.

use crate::error::{check_range, Result};
use crate::linops::exprel2;
use crate::model::{validate_interval_start, Interval};

const MU_LINEAR: f64 = 1e-10;
const MU_SERIES: f64 = 1e-6;

pub fn bm_exit_prob_upper(iv: Interval, x: f64) -> Result<f64> {
    validate_interval_start(iv, x)?;
    Ok((x - iv.a()) / iv.len())
}

pub fn bm_mean_exit_time(iv: Interval, x: f64) -> Result<f64> {
    validate_interval_start(iv, x)?;
    Ok((iv.b() - x) * (x - iv.a()))
}

/// `P(exit at b)` for Brownian motion with drift `mu` and unit variance rate.
pub fn bm_drift_exit_prob_upper(iv: Interval, x: f64, mu: f64) -> Result<f64> {
    validate_interval_start(iv, x)?;
    let (t, len) = (x - iv.a(), iv.len());
    if mu.abs() < MU_LINEAR {
        return Ok(t / len);
    }
    let k = -2.0 * mu;
    if k < 0.0 {
        Ok((k * t).exp_m1() / (k * len).exp_m1())
    } else {
        // divide through by e^{k len} so every exponent is non-positive
        let num = (-k * (len - t)).exp() * -(-k * t).exp_m1();
        Ok(num / -(-k * len).exp_m1())
    }
}

/// Mean exit time of Brownian motion with drift `mu`.
pub fn bm_drift_mean_exit_time(iv: Interval, x: f64, mu: f64) -> Result<f64> {
    validate_interval_start(iv, x)?;
    let (t, len) = (x - iv.a(), iv.len());
    let k = -2.0 * mu;
    if mu.abs() * len < MU_SERIES {
        return Ok(t * (len - t) * (1.0 + k * (2.0 * t - len) / 6.0));
    }
    if (k * len).abs() <= 1.0 {
        // len P - t = k² t len (t g(kt) - len g(k len)) / expm1(k len), g = exprel2
        let num = t * exprel2(k * t) - len * exprel2(k * len);
        return Ok(-2.0 * k * t * len * num / (k * len).exp_m1());
    }
    let p = bm_drift_exit_prob_upper(iv, x, mu)?;
    Ok((len * p - t) / mu)
}

/// `((L - y)/L, y (L - y))`: lower-exit probability and mean exit time of
/// planar Brownian motion in the strip `0 <= y <= L`.
pub fn bm_strip_refs(l: f64, y: f64) -> Result<(f64, f64)> {
    check_range("y", y, 0.0, l)?;
    Ok(((l - y) / l, y * (l - y)))
}

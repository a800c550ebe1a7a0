//! Symmetric telegraph process on `[a,b]`: exit-side probabilities and mean exit times.

use crate::error::{check_range, Result};
use crate::linops::Vec2;
use crate::model::{validate_interval_start, Interval, TelegraphParams};

/// Probabilities conditional on starting in `D0`, in `D1`, and with a fair coin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitProbTriple {
    pub u0: f64,
    pub u1: f64,
    pub u: f64,
}

impl ExitProbTriple {
    pub(crate) fn from_pair(u0: f64, u1: f64) -> Self {
        Self {
            u0,
            u1,
            u: 0.5 * (u0 + u1),
        }
    }

    pub fn complement(&self) -> Self {
        Self::from_pair(1.0 - self.u0, 1.0 - self.u1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanExitTriple {
    pub h0: f64,
    pub h1: f64,
    pub h: f64,
}

impl MeanExitTriple {
    pub(crate) fn from_pair(h0: f64, h1: f64) -> Self {
        Self {
            h0,
            h1,
            h: 0.5 * (h0 + h1),
        }
    }
}

/// Probability of leaving through `b`.
pub fn exit_prob_upper(p: TelegraphParams, iv: Interval, x: f64) -> Result<ExitProbTriple> {
    validate_interval_start(iv, x)?;
    let (c, lambda) = (p.c(), p.lambda());
    let den = c + lambda * (iv.b() - iv.a());
    let u0 = (c + lambda * (x - iv.a())) / den;
    let u1 = lambda * (x - iv.a()) / den;
    Ok(ExitProbTriple::from_pair(u0, u1))
}

/// Probability of leaving through `a`, by the same initial directions.
pub fn exit_prob_lower(p: TelegraphParams, iv: Interval, x: f64) -> Result<ExitProbTriple> {
    Ok(exit_prob_upper(p, iv, x)?.complement())
}

pub fn mean_exit_time(p: TelegraphParams, iv: Interval, x: f64) -> Result<MeanExitTriple> {
    validate_interval_start(iv, x)?;
    let (c, lambda) = (p.c(), p.lambda());
    let q = lambda / (c * c) * (iv.b() - x) * (x - iv.a());
    Ok(MeanExitTriple::from_pair(
        q + (iv.b() - x) / c,
        q + (x - iv.a()) / c,
    ))
}

fn check_interior(iv: Interval, x: f64, h_step: f64) -> Result<()> {
    check_range("x", x, iv.a() + h_step, iv.b() - h_step)?;
    check_range("h_step", h_step, f64::MIN_POSITIVE, iv.len())
}

pub(crate) fn central<F: Fn(f64) -> Result<Vec2>>(f: F, x: f64, h: f64) -> Result<Vec2> {
    let hi = f(x + h)?;
    let lo = f(x - h)?;
    Ok((0.5 / h) * (hi - lo))
}

pub(crate) fn second_central<F: Fn(f64) -> Result<f64>>(f: F, x: f64, h: f64) -> Result<f64> {
    Ok((f(x + h)? - 2.0 * f(x)? + f(x - h)?) / (h * h))
}

/// Central-difference residuals of `u0' = -(λ/c)(u1-u0)`, `u1' = -(λ/c)(u1-u0)`.
pub fn residual_u_system(p: TelegraphParams, iv: Interval, x: f64, h_step: f64) -> Result<Vec2> {
    check_interior(iv, x, h_step)?;
    let k = p.lambda() / p.c();
    let d = central(
        |s| exit_prob_upper(p, iv, s).map(|t| Vec2::new(t.u0, t.u1)),
        x,
        h_step,
    )?;
    let u = exit_prob_upper(p, iv, x)?;
    let rhs = -k * (u.u1 - u.u0);
    Ok(Vec2::new(d.v0 - rhs, d.v1 - rhs))
}

/// Central-difference residuals of `h0' = -(λ/c)(h1-h0) - 1/c`, `h1' = -(λ/c)(h1-h0) + 1/c`.
pub fn residual_h_system(p: TelegraphParams, iv: Interval, x: f64, h_step: f64) -> Result<Vec2> {
    check_interior(iv, x, h_step)?;
    let (c, k) = (p.c(), p.lambda() / p.c());
    let d = central(
        |s| mean_exit_time(p, iv, s).map(|t| Vec2::new(t.h0, t.h1)),
        x,
        h_step,
    )?;
    let h = mean_exit_time(p, iv, x)?;
    let common = -k * (h.h1 - h.h0);
    Ok(Vec2::new(
        d.v0 - (common - 1.0 / c),
        d.v1 - (common + 1.0 / c),
    ))
}

/// Second difference of the unconditional exit probability (should vanish).
pub fn residual_u_ode(p: TelegraphParams, iv: Interval, x: f64, h_step: f64) -> Result<f64> {
    check_interior(iv, x, h_step)?;
    second_central(|s| exit_prob_upper(p, iv, s).map(|t| t.u), x, h_step)
}

/// Second difference of the unconditional mean exit time.
pub fn h_curvature(p: TelegraphParams, iv: Interval, x: f64, h_step: f64) -> Result<f64> {
    check_interior(iv, x, h_step)?;
    second_central(|s| mean_exit_time(p, iv, s).map(|t| t.h), x, h_step)
}

/// `h'' + 2λ/c²` by second differences.
pub fn residual_h_ode(p: TelegraphParams, iv: Interval, x: f64, h_step: f64) -> Result<f64> {
    Ok(h_curvature(p, iv, x, h_step)? + 2.0 * p.lambda() / (p.c() * p.c()))
}

//! Telegraph process with direction-dependent speeds and rates on `[a,b]`.
//!
//! Exponentials `e^{r t}` are evaluated relative to the endpoint that keeps every
//! exponent non-positive (`a` when `r <= 0`, `b` when `r > 0`), and differences of
//! exponentials go through `expm1`.

use crate::brownian::bm_drift_exit_prob_upper;
use crate::error::{check_range, Error, Result};
use crate::interval::{central, exit_prob_upper, second_central, ExitProbTriple, MeanExitTriple};
use crate::linops::Vec2;
use crate::model::{validate_interval_start, DriftTelegraphParams, Interval, TelegraphParams};

const DEGENERATE_EXPONENT: f64 = 1e-7;
const SYMMETRY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftRate {
    /// `λ0/c0 - λ1/c1`
    pub r: f64,
    /// `λ0 c1 - λ1 c0`
    pub denom: f64,
}

impl DriftRate {
    pub fn of(p: &DriftTelegraphParams) -> Self {
        let denom = p.lambda0() * p.c1() - p.lambda1() * p.c0();
        // r = denom / (c0 c1) keeps r and denom zero together
        Self {
            r: denom / (p.c0() * p.c1()),
            denom,
        }
    }
}

fn rel_diff(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs())
}

fn nearly_symmetric(p: &DriftTelegraphParams) -> bool {
    rel_diff(p.c0(), p.c1()) < SYMMETRY_TOL && rel_diff(p.lambda0(), p.lambda1()) < SYMMETRY_TOL
}

/// Shifted exponential factors for one evaluation point.
struct Shifted {
    /// `λ0 c1 / e^{r s}`-scaled denominator `λ0 c1 E(b) - λ1 c0 E(a)`
    d: f64,
    /// `E(x) - E(a)`
    ex_minus_ea: f64,
    /// `E(b) - E(x)`
    eb_minus_ex: f64,
}

impl Shifted {
    fn new(p: &DriftTelegraphParams, rate: DriftRate, iv: Interval, x: f64) -> Self {
        let r = rate.r;
        let s = if r > 0.0 { iv.b() } else { iv.a() };
        let e = |t: f64| (r * (t - s)).exp();
        let em = |t: f64| (r * (t - s)).exp_m1();
        let (l0c1, l1c0) = (p.lambda0() * p.c1(), p.lambda1() * p.c0());
        Self {
            d: rate.denom + l0c1 * em(iv.b()) - l1c0 * em(iv.a()),
            ex_minus_ea: e(iv.a()) * (r * (x - iv.a())).exp_m1(),
            eb_minus_ex: e(x) * (r * (iv.b() - x)).exp_m1(),
        }
    }
}

/// Probability of leaving through `b`.
pub fn drift_exit_prob_upper(
    p: DriftTelegraphParams,
    iv: Interval,
    x: f64,
) -> Result<ExitProbTriple> {
    validate_interval_start(iv, x)?;
    let rate = DriftRate::of(&p);
    if rate.r.abs() * iv.len() < DEGENERATE_EXPONENT {
        if !nearly_symmetric(&p) {
            return Err(Error::DegenerateAsymmetric);
        }
        return exit_prob_upper(TelegraphParams::new(p.c0(), p.lambda0())?, iv, x);
    }
    let sh = Shifted::new(&p, rate, iv, x);
    let l0c1 = p.lambda0() * p.c1();
    // numerator of u0 is D - λ0 c1 (E(b) - E(x)); at x = b it is D itself
    let u0 = (sh.d - l0c1 * sh.eb_minus_ex) / sh.d;
    let u1 = p.lambda1() * p.c0() * sh.ex_minus_ea / sh.d;
    Ok(ExitProbTriple::from_pair(u0, u1))
}

/// Mean exit time. Refuses the symmetric case `λ0 c1 = λ1 c0`, where the
/// formulas become `0/0`.
pub fn drift_mean_exit_time(
    p: DriftTelegraphParams,
    iv: Interval,
    x: f64,
) -> Result<MeanExitTriple> {
    validate_interval_start(iv, x)?;
    let rate = DriftRate::of(&p);
    let l0c1 = p.lambda0() * p.c1();
    let l1c0 = p.lambda1() * p.c0();
    if rate.denom.abs() < DEGENERATE_EXPONENT * l0c1 {
        return Err(Error::DegenerateSymmetric);
    }
    let sh = Shifted::new(&p, rate, iv, x);
    let (t, len) = (x - iv.a(), iv.len());
    let lsum = p.lambda0() + p.lambda1();
    let csum = p.c0() + p.c1();
    let k = lsum / rate.denom;
    let u0 = (sh.d - l0c1 * sh.eb_minus_ex) / sh.d;
    let h0 = k * t - k * len * u0 + l0c1 * csum / rate.denom * sh.eb_minus_ex / sh.d;
    let h1 = k * t - l1c0 * (csum + lsum * len) / rate.denom * sh.ex_minus_ea / sh.d;
    Ok(MeanExitTriple::from_pair(h0, h1))
}

/// Residuals of both first-order systems (probabilities, then mean times).
pub fn residual_drift_systems(
    p: DriftTelegraphParams,
    iv: Interval,
    x: f64,
    h_step: f64,
) -> Result<(Vec2, Vec2)> {
    check_range("x", x, iv.a() + h_step, iv.b() - h_step)?;
    let k0 = p.lambda0() / p.c0();
    let k1 = p.lambda1() / p.c1();

    let du = central(
        |s| drift_exit_prob_upper(p, iv, s).map(|t| Vec2::new(t.u0, t.u1)),
        x,
        h_step,
    )?;
    let u = drift_exit_prob_upper(p, iv, x)?;
    let ru = Vec2::new(du.v0 + k0 * (u.u1 - u.u0), du.v1 + k1 * (u.u1 - u.u0));

    let dh = central(
        |s| drift_mean_exit_time(p, iv, s).map(|t| Vec2::new(t.h0, t.h1)),
        x,
        h_step,
    )?;
    let h = drift_mean_exit_time(p, iv, x)?;
    let rh = Vec2::new(
        dh.v0 - (-k0 * (h.h1 - h.h0) - 1.0 / p.c0()),
        dh.v1 - (-k1 * (h.h1 - h.h0) + 1.0 / p.c1()),
    );
    Ok((ru, rh))
}

/// Residuals of the scalar equations `u'' + (λ1/c1 - λ0/c0) u' = 0` and
/// `h'' + (λ1/c1 - λ0/c0) h' = -(λ0+λ1)/(c0 c1)`, by central differences.
pub fn residual_drift_odes(
    p: DriftTelegraphParams,
    iv: Interval,
    x: f64,
    h_step: f64,
) -> Result<(f64, f64)> {
    check_range("x", x, iv.a() + h_step, iv.b() - h_step)?;
    let slope = p.lambda1() / p.c1() - p.lambda0() / p.c0();
    let u = |s| drift_exit_prob_upper(p, iv, s).map(|t| t.u);
    let h = |s| drift_mean_exit_time(p, iv, s).map(|t| t.h);
    let du = (u(x + h_step)? - u(x - h_step)?) / (2.0 * h_step);
    let dh = (h(x + h_step)? - h(x - h_step)?) / (2.0 * h_step);
    let ru = second_central(u, x, h_step)? + slope * du;
    let rh = second_central(h, x, h_step)?
        + slope * dh
        + (p.lambda0() + p.lambda1()) / (p.c0() * p.c1());
    Ok((ru, rh))
}

/// Speeds and rates that realise drift `mu` at the given scale:
/// `c0 = scale`, `c1 = scale + 2 mu`, `λj = cj²`.
pub fn hydrodynamic_drift_params(mu: f64, scale: f64) -> Result<DriftTelegraphParams> {
    if !(scale.is_finite() && scale >= 1.0 && mu.is_finite() && mu.abs() <= scale / 4.0) {
        return Err(Error::InvalidScale { scale, mu });
    }
    let c0 = scale;
    let c1 = scale + 2.0 * mu;
    DriftTelegraphParams::new(c0, c1, c0 * c0, c1 * c1)
}

/// `(u(x)` of the scaled drift process, drifted Brownian reference`)`.
pub fn hydrodynamic_drift_limit_check(
    mu: f64,
    scale: f64,
    iv: Interval,
    x: f64,
) -> Result<(f64, f64)> {
    let p = hydrodynamic_drift_params(mu, scale)?;
    let u = drift_exit_prob_upper(p, iv, x)?.u;
    Ok((u, bm_drift_exit_prob_upper(iv, x, mu)?))
}

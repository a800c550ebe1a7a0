//! Orthogonal four-direction motion in the strip `0 <= y <= L`, exiting
//! through the lower boundary.
//!
//! Densities are functions of the horizontal offset `d = z - x` between the
//! exit abscissa `z` and the starting abscissa `x`. Their Fourier inversions are
//! written over `w = αc / sqrt(λ² + α²c²) ∈ [0,1)`, where with `κ = λ/c` and
//! `θ = κw` the common denominator (scaled by `e^{-θL}`) is
//! `D(w) = (1+w)² - (1-w)² e^{-2θL} = 4w + (1-w)²(1 - e^{-2θL})`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{validate_strip_start, Direction2D, PlanarStripProblem};
use crate::quadrature::{
    integrate_w_singular_oscillatory, node, trapezoid_from_samples, QuadError, WNode,
    DEFAULT_BUDGET,
};

pub type ComplexVal = Complex64;

/// Lower-boundary exit probabilities by initial direction, and unconditional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripExitProbs {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p: f64,
}

impl StripExitProbs {
    pub fn get(&self, j: Direction2D) -> f64 {
        [self.p0, self.p1, self.p2, self.p3][j.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripMeanTimes {
    pub h0: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub h: f64,
}

impl StripMeanTimes {
    pub fn get(&self, j: Direction2D) -> f64 {
        [self.h0, self.h1, self.h2, self.h3][j.index()]
    }
}

pub fn exit_prob_lower_strip(prob: PlanarStripProblem, y: f64) -> Result<StripExitProbs> {
    validate_strip_start(prob, y)?;
    let (c, lambda, l) = (prob.c(), prob.lambda(), prob.height());
    let den = lambda * l + 2.0 * c;
    let p1 = lambda * (l - y) / den;
    let p3 = (2.0 * c + lambda * (l - y)) / den;
    let p0 = 0.5 * (p1 + p3);
    Ok(StripExitProbs {
        p0,
        p1,
        p2: p0,
        p3,
        p: 0.25 * (p0 + p1 + p0 + p3),
    })
}

pub fn mean_exit_time_strip(prob: PlanarStripProblem, y: f64) -> Result<StripMeanTimes> {
    validate_strip_start(prob, y)?;
    let (c, lambda, l) = (prob.c(), prob.lambda(), prob.height());
    let q = lambda * y * (l - y) / (c * c);
    let h1 = q + 2.0 * (l - y) / c;
    let h3 = q + 2.0 * y / c;
    let h0 = 0.5 * (h1 + h3) + 1.0 / lambda;
    Ok(StripMeanTimes {
        h0,
        h1,
        h2: h0,
        h3,
        h: 0.25 * (h0 + h1 + h0 + h3),
    })
}

/// Probability of leaving through the bottom with no change of direction
/// after a downward start: the atom of the exit law at `z = x`.
pub fn singular_mass(prob: PlanarStripProblem, y: f64) -> Result<f64> {
    validate_strip_start(prob, y)?;
    Ok((-prob.lambda() * y / prob.c()).exp())
}

/// `h''(y) + 2λ/c²` for the unconditional mean exit time, from its exact
/// quadratic coefficient. The mean time does not depend on `x`, so the
/// fourth-order mixed term vanishes identically.
pub fn residual_poisson_pde(prob: PlanarStripProblem, y: f64) -> Result<f64> {
    Ok(residual_poisson_pde_conditional(prob, y)?[4])
}

/// The same residual for `h0..h3` and then `h`.
pub fn residual_poisson_pde_conditional(prob: PlanarStripProblem, y: f64) -> Result<[f64; 5]> {
    if !(y > 0.0 && y < prob.height()) {
        return Err(Error::OutOfDomain {
            name: "y",
            value: y,
            lo: 0.0,
            hi: prob.height(),
        });
    }
    let (c, lambda) = (prob.c(), prob.lambda());
    // every h_j is λ y (L - y)/c² plus an affine function of y
    let curvature = -2.0 * lambda / (c * c);
    let target = 2.0 * lambda / (c * c);
    Ok([curvature + target; 5])
}

fn check_open(prob: PlanarStripProblem, y: f64) -> Result<()> {
    if y > 0.0 && y < prob.height() {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            name: "y",
            value: y,
            lo: 0.0,
            hi: prob.height(),
        })
    }
}

/// Frequency-dependent pieces of the transforms, shared by all directions.
struct FourierParts {
    /// `ũ1 e^{-iαz}`
    g1: f64,
    /// `ũ3 e^{-iαz}`
    g3: f64,
}

fn fourier_parts(prob: PlanarStripProblem, alpha: f64, y: f64) -> FourierParts {
    let (c, lambda, l) = (prob.c(), prob.lambda(), prob.height());
    let ac = alpha.abs() * c;
    if ac == 0.0 {
        let den = lambda * l + 2.0 * c;
        return FourierParts {
            g1: lambda * (l - y) / den,
            g3: (2.0 * c + lambda * (l - y)) / den,
        };
    }
    let s = lambda.hypot(ac);
    let theta = alpha.abs() * lambda / s;
    let m = (lambda / (s + ac)).powi(2);
    // everything below is divided by λ²; m = (λ/(s+|α|c))²
    let cross = 4.0 * (s / lambda) * (ac / lambda);
    let e_full = -(-2.0 * theta * l).exp_m1();
    let e_rest = -(-2.0 * theta * (l - y)).exp_m1();
    let den = cross + m * e_full;
    let decay = (-theta * y).exp();
    FourierParts {
        g1: decay * e_rest / den,
        g3: decay * (cross + m * e_rest) / den,
    }
}

fn phase(alpha: f64, z: f64) -> Complex64 {
    Complex64::from_polar(1.0, alpha * z)
}

/// Fourier transform in the starting abscissa of the exit density after an
/// upward start.
pub fn fourier_u1(prob: PlanarStripProblem, alpha: f64, y: f64, z: f64) -> Result<ComplexVal> {
    validate_strip_start(prob, y)?;
    Ok(phase(alpha, z) * fourier_parts(prob, alpha, y).g1)
}

/// Transform after a downward start, including the atom at `z = x`.
pub fn fourier_u3(prob: PlanarStripProblem, alpha: f64, y: f64, z: f64) -> Result<ComplexVal> {
    validate_strip_start(prob, y)?;
    Ok(phase(alpha, z) * fourier_parts(prob, alpha, y).g3)
}

fn horizontal(
    prob: PlanarStripProblem,
    alpha: f64,
    y: f64,
    z: f64,
    sign: f64,
) -> Result<ComplexVal> {
    validate_strip_start(prob, y)?;
    let parts = fourier_parts(prob, alpha, y);
    let lambda = prob.lambda();
    let factor = lambda / (2.0 * Complex64::new(lambda, sign * prob.c() * alpha));
    Ok(phase(alpha, z) * factor * (parts.g1 + parts.g3))
}

/// Transform after a start along `+x`.
pub fn fourier_u0(prob: PlanarStripProblem, alpha: f64, y: f64, z: f64) -> Result<ComplexVal> {
    horizontal(prob, alpha, y, z, 1.0)
}

/// Transform after a start along `-x`.
pub fn fourier_u2(prob: PlanarStripProblem, alpha: f64, y: f64, z: f64) -> Result<ComplexVal> {
    horizontal(prob, alpha, y, z, -1.0)
}

/// Central differences in `y` of `ũ1, ũ3` minus the right-hand sides of the
/// first-order system they satisfy. At `α = 0` both transforms are affine in `y`
/// and their exact slope is used.
pub fn residual_fourier_system(
    prob: PlanarStripProblem,
    alpha: f64,
    y: f64,
    h_step: f64,
) -> Result<(ComplexVal, ComplexVal)> {
    if !(h_step > 0.0 && h_step < y.min(prob.height() - y)) {
        return Err(Error::OutOfDomain {
            name: "h_step",
            value: h_step,
            lo: 0.0,
            hi: y.min(prob.height() - y),
        });
    }
    let (c, lambda) = (prob.c(), prob.lambda());
    let z = 0.0;
    let a2 = c * c * alpha * alpha;
    let den = 2.0 * c * (lambda * lambda + a2);
    let diag = (lambda.powi(3) + 2.0 * lambda * a2) / den;
    let off = lambda.powi(3) / den;
    let u1 = fourier_u1(prob, alpha, y, z)?;
    let u3 = fourier_u3(prob, alpha, y, z)?;
    let (d1, d3) = if alpha == 0.0 {
        let slope = -lambda / (lambda * prob.height() + 2.0 * c);
        (Complex64::new(slope, 0.0), Complex64::new(slope, 0.0))
    } else {
        let inv = 0.5 / h_step;
        (
            (fourier_u1(prob, alpha, y + h_step, z)? - fourier_u1(prob, alpha, y - h_step, z)?)
                * inv,
            (fourier_u3(prob, alpha, y + h_step, z)? - fourier_u3(prob, alpha, y - h_step, z)?)
                * inv,
        )
    };
    Ok((d1 - (u1 * diag - u3 * off), d3 - (u1 * off - u3 * diag)))
}

/// Accuracy controls for the density inversions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityOptions {
    /// Absolute tolerance of each inversion integral.
    pub tol: f64,
    pub budget: usize,
}

impl Default for DensityOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue {
    pub value: f64,
    pub err_estimate: f64,
    /// Magnitude of a small negative quadrature result that was set to zero.
    pub clamped: f64,
}

/// `w`-dependent factors of the inversion integrands at one node.
struct WParts {
    /// `(1 - e^{-2θ(L-y)}) e^{-θy} / D`, the upward-start factor
    r1: f64,
    /// `ũ3/e^{iαz} - m`, the downward-start factor minus its atom
    r3: f64,
    /// `(ũ1 + ũ3)/e^{iαz} - m`
    g: f64,
}

struct StripGeometry {
    kappa: f64,
    l: f64,
    y: f64,
    m: f64,
    p1: f64,
    p3: f64,
}

impl StripGeometry {
    fn new(prob: PlanarStripProblem, y: f64) -> Self {
        let kappa = prob.lambda() / prob.c();
        let l = prob.height();
        let p1 = kappa * (l - y) / (kappa * l + 2.0);
        Self {
            kappa,
            l,
            y,
            m: (-kappa * y).exp(),
            p1,
            p3: p1 + 2.0 / (kappa * l + 2.0),
        }
    }

    fn parts(&self, n: WNode) -> WParts {
        let (w, omw) = (n.w, n.one_minus_w);
        if w == 0.0 {
            let r1 = self.kappa * (self.l - self.y) / (2.0 + self.kappa * self.l);
            return WParts {
                r1,
                r3: self.p3 - self.m,
                g: self.p1 + self.p3 - self.m,
            };
        }
        let theta = self.kappa * w;
        let e_full = -(-2.0 * theta * self.l).exp_m1();
        let e_rest = -(-2.0 * theta * (self.l - self.y)).exp_m1();
        let den = 4.0 * w + omw * omw * e_full;
        let decay = (-theta * self.y).exp();
        let r1 = decay * e_rest / den;
        if w < 0.5 {
            let g3 = decay * (4.0 * w + omw * omw * e_rest) / den;
            let g = 2.0 * decay * (2.0 * w + omw * e_rest) / den;
            return WParts {
                r1,
                r3: g3 - self.m,
                g: g - self.m,
            };
        }
        // near w = 1 both ũ3 and ũ1 + ũ3 approach m; subtract it analytically
        let m = self.m;
        let eps = (self.kappa * omw * self.y).exp_m1();
        let keep_rest = 1.0 - e_rest;
        let keep_full = 1.0 - e_full;
        let opw = 1.0 + w;
        let r3 = (opw * opw * m * eps - omw * omw * keep_full * ((theta * self.y).exp() - m)) / den;
        let g = m
            * (omw * (opw - 2.0 * (1.0 + eps) * keep_rest + omw * keep_full) + 2.0 * eps * opw)
            / den;
        WParts { r1, r3, g }
    }
}

fn finish(
    result: std::result::Result<crate::quadrature::QuadResult, QuadError>,
    scale: f64,
    add: f64,
) -> Result<DensityValue> {
    let r = result?;
    let value = scale * r.value + add;
    let err = scale.abs() * r.err_estimate;
    if value >= 0.0 {
        return Ok(DensityValue {
            value,
            err_estimate: err,
            clamped: 0.0,
        });
    }
    if -value <= err.max(1e-12) * 10.0 {
        return Ok(DensityValue {
            value: 0.0,
            err_estimate: err,
            clamped: -value,
        });
    }
    Err(Error::Quadrature(QuadError::NegativeDensity {
        value,
        err_estimate: err,
    }))
}

/// Exit density at `z` on the lower boundary after an upward start at `(x, y)`.
pub fn density_u1(prob: PlanarStripProblem, x: f64, y: f64, z: f64) -> Result<f64> {
    Ok(density_u1_with(prob, x, y, z, DensityOptions::default())?.value)
}

pub fn density_u1_with(
    prob: PlanarStripProblem,
    x: f64,
    y: f64,
    z: f64,
    opts: DensityOptions,
) -> Result<DensityValue> {
    check_open(prob, y)?;
    let geo = StripGeometry::new(prob, y);
    let k = geo.kappa * (z - x).abs();
    let scale = geo.kappa / std::f64::consts::PI;
    let f = |n: WNode| (k * n.cot()).cos() * geo.parts(n).r1 / n.root;
    finish(
        integrate_w_singular_oscillatory(f, k, opts.tol / scale, opts.budget),
        scale,
        0.0,
    )
}

/// Continuous part `u3*` of the exit law after a downward start, normalised to
/// unit mass: the full law is `m δ(z - x) + (1 - m) u3*` with `m` the
/// [`singular_mass`].
pub fn density_u3_continuous(prob: PlanarStripProblem, x: f64, y: f64, z: f64) -> Result<f64> {
    Ok(density_u3_continuous_with(prob, x, y, z, DensityOptions::default())?.value)
}

pub fn density_u3_continuous_with(
    prob: PlanarStripProblem,
    x: f64,
    y: f64,
    z: f64,
    opts: DensityOptions,
) -> Result<DensityValue> {
    check_open(prob, y)?;
    let geo = StripGeometry::new(prob, y);
    let k = geo.kappa * (z - x).abs();
    let scale = geo.kappa / (std::f64::consts::PI * (1.0 - geo.m));
    let f = |n: WNode| (k * n.cot()).cos() * geo.parts(n).r3 / (n.root * n.root * n.root);
    finish(
        integrate_w_singular_oscillatory(f, k, opts.tol / scale, opts.budget),
        scale,
        0.0,
    )
}

/// Shared inversion for horizontal starts; `sign = +1` for `D0`, `-1` for `D2`.
///
/// The transform decays only like `1/α`. Its leading part
/// `m λ/(2(λ ± icα))` is inverted in closed form: it is the law of "one turn
/// downwards, then straight to the boundary", `(κ m/2) e^{-κ|d|}` on the side
/// the motion started towards, with the midpoint value at `d = 0`.
fn density_horizontal(
    prob: PlanarStripProblem,
    x: f64,
    y: f64,
    z: f64,
    sign: f64,
    opts: DensityOptions,
) -> Result<DensityValue> {
    check_open(prob, y)?;
    let geo = StripGeometry::new(prob, y);
    let d = sign * (z - x);
    let k = geo.kappa * d;
    let scale = geo.kappa / (2.0 * std::f64::consts::PI);
    let f = |n: WNode| {
        let t = k * n.cot();
        (n.root * t.cos() + n.w * t.sin()) / (n.root * n.root) * geo.parts(n).g
    };
    let jump = 0.5 * geo.kappa * geo.m * (-geo.kappa * d.abs()).exp();
    let atom_side = if d > 0.0 {
        jump
    } else if d == 0.0 {
        0.5 * jump
    } else {
        0.0
    };
    finish(
        integrate_w_singular_oscillatory(f, k.abs(), opts.tol / scale, opts.budget),
        scale,
        atom_side,
    )
}

/// Exit density after a start along `+x`. At `z = x` the density jumps; the
/// midpoint of the two one-sided limits is returned there.
pub fn density_u0(prob: PlanarStripProblem, x: f64, y: f64, z: f64) -> Result<f64> {
    Ok(density_horizontal(prob, x, y, z, 1.0, DensityOptions::default())?.value)
}

pub fn density_u0_with(
    prob: PlanarStripProblem,
    x: f64,
    y: f64,
    z: f64,
    opts: DensityOptions,
) -> Result<DensityValue> {
    density_horizontal(prob, x, y, z, 1.0, opts)
}

/// Exit density after a start along `-x`; the mirror image of [`density_u0`].
pub fn density_u2(prob: PlanarStripProblem, x: f64, y: f64, z: f64) -> Result<f64> {
    Ok(density_horizontal(prob, x, y, z, -1.0, DensityOptions::default())?.value)
}

pub fn density_u2_with(
    prob: PlanarStripProblem,
    x: f64,
    y: f64,
    z: f64,
    opts: DensityOptions,
) -> Result<DensityValue> {
    density_horizontal(prob, x, y, z, -1.0, opts)
}

/// The continuous exit density for direction `j` (`u3*` for `D3`).
pub fn density_with(
    prob: PlanarStripProblem,
    j: Direction2D,
    x: f64,
    y: f64,
    z: f64,
    opts: DensityOptions,
) -> Result<DensityValue> {
    match j {
        Direction2D::D0 => density_u0_with(prob, x, y, z, opts),
        Direction2D::D1 => density_u1_with(prob, x, y, z, opts),
        Direction2D::D2 => density_u2_with(prob, x, y, z, opts),
        Direction2D::D3 => density_u3_continuous_with(prob, x, y, z, opts),
    }
}

/// Tabulated exit density on a grid of exit abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub z_grid: Vec<f64>,
    /// Continuous density per unit length; for `D3` this is `u3*`.
    pub values: Vec<f64>,
    /// Atom at `z = x`; zero unless `j = D3`.
    pub singular_mass: f64,
    pub j: Direction2D,
    pub origin: (f64, f64),
}

impl DensityProfile {
    /// Density of the full law restricted to its continuous part:
    /// `(1 - singular_mass) * values`.
    pub fn continuous_part(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| (1.0 - self.singular_mass) * v)
            .collect()
    }
}

fn check_grid(z_grid: &[f64]) -> Result<()> {
    if z_grid.is_empty() {
        return Err(Error::EmptySample);
    }
    for w in z_grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidParameter {
                name: "z_grid",
                value: w[1],
            });
        }
    }
    Ok(())
}

/// Evaluates the density for direction `j` at every grid point in parallel.
pub fn density_profile(
    prob: PlanarStripProblem,
    j: Direction2D,
    x: f64,
    y: f64,
    z_grid: &[f64],
    opts: DensityOptions,
) -> Result<DensityProfile> {
    check_open(prob, y)?;
    check_grid(z_grid)?;
    let values = z_grid
        .par_iter()
        .map(|&z| density_with(prob, j, x, y, z, opts).map(|v| v.value))
        .collect::<Result<Vec<f64>>>()?;
    let singular_mass = if j == Direction2D::D3 {
        singular_mass(prob, y)?
    } else {
        0.0
    };
    Ok(DensityProfile {
        z_grid: z_grid.to_vec(),
        values,
        singular_mass,
        j,
        origin: (x, y),
    })
}

/// Controls for recovering exit probabilities from densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    /// Trapezoid nodes across the window; forced odd so that `z = x` is a node.
    pub nodes: usize,
    pub density: DensityOptions,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            nodes: 2001,
            density: DensityOptions {
                tol: 1e-7,
                budget: DEFAULT_BUDGET,
            },
        }
    }
}

/// Half-width of the integration window: 50 times the larger of the mean
/// free path `c/λ` and the horizontal range `c h(y)`.
pub fn integration_half_width(prob: PlanarStripProblem, y: f64) -> Result<f64> {
    let h = mean_exit_time_strip(prob, y)?.h;
    Ok(50.0 * (prob.c() / prob.lambda()).max(prob.c() * h))
}

/// `p_j` as the integral of the exit density over the exit abscissa
/// (trapezoid rule over `[x - W, x + W]`), plus the atom for `D3`.
pub fn pj_by_density_integration(
    prob: PlanarStripProblem,
    x: f64,
    y: f64,
    j: Direction2D,
) -> Result<f64> {
    pj_by_density_integration_with(prob, x, y, j, IntegrationOptions::default())
}

pub fn pj_by_density_integration_with(
    prob: PlanarStripProblem,
    x: f64,
    y: f64,
    j: Direction2D,
    opts: IntegrationOptions,
) -> Result<f64> {
    check_open(prob, y)?;
    let n = opts.nodes.max(3) | 1;
    let half = integration_half_width(prob, y)?;
    let (lo, hi) = (x - half, x + half);
    let grid: Vec<f64> = (0..n).map(|i| node(lo, hi, n, i)).collect();
    let profile = density_profile(prob, j, x, y, &grid, opts.density)?;
    let integral = trapezoid_from_samples(&profile.values, lo, hi)?;
    let m = profile.singular_mass;
    Ok(m + (1.0 - m) * integral)
}

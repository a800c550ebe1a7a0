//! 2x2 linear ODE machinery: `dV/dx = A V + g` for matrices with `A^2 = tr(A) A`.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m00: f64,
    pub m01: f64,
    pub m10: f64,
    pub m11: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub v0: f64,
    pub v1: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { v0: 0.0, v1: 0.0 };

    pub fn new(v0: f64, v1: f64) -> Self {
        Self { v0, v1 }
    }

    pub fn max_abs(&self) -> f64 {
        self.v0.abs().max(self.v1.abs())
    }
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        m00: 1.0,
        m01: 0.0,
        m10: 0.0,
        m11: 1.0,
    };
    pub const ZERO: Mat2 = Mat2 {
        m00: 0.0,
        m01: 0.0,
        m10: 0.0,
        m11: 0.0,
    };

    pub fn new(m00: f64, m01: f64, m10: f64, m11: f64) -> Self {
        Self { m00, m01, m10, m11 }
    }

    pub fn trace(&self) -> f64 {
        self.m00 + self.m11
    }

    pub fn max_abs(&self) -> f64 {
        self.m00
            .abs()
            .max(self.m01.abs())
            .max(self.m10.abs())
            .max(self.m11.abs())
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2::new(s * self.m00, s * self.m01, s * self.m10, s * self.m11)
    }

    /// Generator of the symmetric exit-probability system on `[a,b]`.
    pub fn driftless_generator(c: f64, lambda: f64) -> Mat2 {
        let k = lambda / c;
        Mat2::new(k, -k, k, -k)
    }

    /// Generator of the system with direction-dependent speeds and rates.
    pub fn drift_generator(c0: f64, c1: f64, lambda0: f64, lambda1: f64) -> Mat2 {
        let k0 = lambda0 / c0;
        let k1 = lambda1 / c1;
        Mat2::new(k0, -k0, k1, -k1)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m00 + o.m00,
            self.m01 + o.m01,
            self.m10 + o.m10,
            self.m11 + o.m11,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m00 - o.m00,
            self.m01 - o.m01,
            self.m10 - o.m10,
            self.m11 - o.m11,
        )
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m00 * o.m00 + self.m01 * o.m10,
            self.m00 * o.m01 + self.m01 * o.m11,
            self.m10 * o.m00 + self.m11 * o.m10,
            self.m10 * o.m01 + self.m11 * o.m11,
        )
    }
}

impl Mul<Vec2> for Mat2 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.m00 * v.v0 + self.m01 * v.v1,
            self.m10 * v.v0 + self.m11 * v.v1,
        )
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.v0 + o.v0, self.v1 + o.v1)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.v0 - o.v0, self.v1 - o.v1)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        Vec2::new(self * v.v0, self * v.v1)
    }
}

const RECURRENCE_TOL: f64 = 1e-12;
const SERIES_SWITCH: f64 = 1e-8;

/// `(e^z - 1)/z`, with the Taylor series near zero.
pub(crate) fn exprel(z: f64) -> f64 {
    if z.abs() < SERIES_SWITCH {
        1.0 + z * (0.5 + z / 6.0)
    } else {
        z.exp_m1() / z
    }
}

/// `(e^z - 1 - z)/z^2`, with the Taylor series for `|z| < 0.1`.
pub(crate) fn exprel2(z: f64) -> f64 {
    if z.abs() < 0.1 {
        // sum_k z^k / (k+2)!
        let mut term = 0.5;
        let mut sum = 0.5;
        for k in 1..14 {
            term *= z / (k as f64 + 2.0);
            sum += term;
        }
        sum
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

pub fn mat_exp_nilpotent(a: Mat2, x: f64) -> Result<Mat2> {
    let residual = (a * a).max_abs();
    let norm = a.max_abs();
    if residual > RECURRENCE_TOL * norm * norm {
        return Err(Error::NotNilpotent { residual });
    }
    Ok(Mat2::IDENTITY + a.scale(x))
}

fn recurrence_scalar(a: Mat2) -> Result<f64> {
    let r = a.trace();
    let residual = (a * a - a.scale(r)).max_abs();
    let norm = a.max_abs();
    if residual > RECURRENCE_TOL * norm * norm {
        return Err(Error::NotRank1Recurrent { residual });
    }
    Ok(r)
}

/// `e^{Ax} = I + x exprel(r x) A` where `r = tr(A)`.
pub fn mat_exp_rank1_recurrent(a: Mat2, x: f64) -> Result<Mat2> {
    let r = recurrence_scalar(a)?;
    if r == 0.0 {
        return mat_exp_nilpotent(a, x);
    }
    Ok(Mat2::IDENTITY + a.scale(x * exprel(r * x)))
}

/// `e^{A(x-x0)} K + (int_{x0}^{x} e^{A(x-s)} ds) g`.
pub fn solve_inhomogeneous(a: Mat2, g: Vec2, x0: f64, k: Vec2, x: f64) -> Result<Vec2> {
    let r = recurrence_scalar(a)?;
    let t = x - x0;
    let prop = Mat2::IDENTITY + a.scale(t * exprel(r * t));
    // int_0^t e^{As} ds = t I + t^2 exprel2(r t) A
    let integral = Mat2::IDENTITY.scale(t) + a.scale(t * t * exprel2(r * t));
    Ok(prop * k + integral * g)
}

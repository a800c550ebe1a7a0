//! Parameter and domain types shared by every solver.

use crate::error::{check_range, Error, Result};

/// Speed and switching intensity of the symmetric telegraph process.
///
/// `lambda = 0` is accepted and describes a motion that never turns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelegraphParams {
    c: f64,
    lambda: f64,
}

impl TelegraphParams {
    pub fn new(c: f64, lambda: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter {
                name: "c",
                value: c,
            });
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
            });
        }
        Ok(Self { c, lambda })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Direction-dependent speeds and rates: index 0 moves right, index 1 moves left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftTelegraphParams {
    c0: f64,
    c1: f64,
    lambda0: f64,
    lambda1: f64,
}

impl DriftTelegraphParams {
    pub fn new(c0: f64, c1: f64, lambda0: f64, lambda1: f64) -> Result<Self> {
        for (name, value) in [
            ("c0", c0),
            ("c1", c1),
            ("lambda0", lambda0),
            ("lambda1", lambda1),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(Self {
            c0,
            c1,
            lambda0,
            lambda1,
        })
    }

    /// Same speed and rate in both directions.
    pub fn symmetric(c: f64, lambda: f64) -> Result<Self> {
        Self::new(c, c, lambda, lambda)
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn speed(&self, d: Direction1D) -> f64 {
        match d {
            Direction1D::D0 => self.c0,
            Direction1D::D1 => self.c1,
        }
    }

    pub fn rate(&self, d: Direction1D) -> f64 {
        match d {
            Direction1D::D0 => self.lambda0,
            Direction1D::D1 => self.lambda1,
        }
    }
}

impl From<TelegraphParams> for DriftTelegraphParams {
    /// Exact embedding; only the simulator accepts the resulting zero rates.
    fn from(p: TelegraphParams) -> Self {
        Self {
            c0: p.c,
            c1: p.c,
            lambda0: p.lambda,
            lambda1: p.lambda,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidParameter {
                name: "a",
                value: a,
            });
        }
        if !(b.is_finite() && b > a) {
            return Err(Error::InvalidParameter {
                name: "b",
                value: b,
            });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
}

/// `D0` moves towards `b`, `D1` towards `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction1D {
    D0,
    D1,
}

impl Direction1D {
    pub fn index(self) -> usize {
        match self {
            Direction1D::D0 => 0,
            Direction1D::D1 => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(Direction1D::D0),
            1 => Some(Direction1D::D1),
            _ => None,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction1D::D0 => Direction1D::D1,
            Direction1D::D1 => Direction1D::D0,
        }
    }
}

/// `Dj` points along `(cos(j pi/2), sin(j pi/2))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction2D {
    D0,
    D1,
    D2,
    D3,
}

impl Direction2D {
    pub const ALL: [Direction2D; 4] = [
        Direction2D::D0,
        Direction2D::D1,
        Direction2D::D2,
        Direction2D::D3,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn ccw(self) -> Self {
        Self::ALL[(self.index() + 1) % 4]
    }

    pub fn cw(self) -> Self {
        Self::ALL[(self.index() + 3) % 4]
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, Direction2D::D0 | Direction2D::D2)
    }
}

/// Orthogonal planar motion confined to the strip `0 <= y <= L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarStripProblem {
    params: TelegraphParams,
    l: f64,
}

impl PlanarStripProblem {
    pub fn new(params: TelegraphParams, l: f64) -> Result<Self> {
        if params.lambda() <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: params.lambda(),
            });
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidParameter {
                name: "L",
                value: l,
            });
        }
        Ok(Self { params, l })
    }

    pub fn from_values(c: f64, lambda: f64, l: f64) -> Result<Self> {
        Self::new(TelegraphParams::new(c, lambda)?, l)
    }

    pub fn params(&self) -> TelegraphParams {
        self.params
    }

    pub fn c(&self) -> f64 {
        self.params.c()
    }

    pub fn lambda(&self) -> f64 {
        self.params.lambda()
    }

    pub fn height(&self) -> f64 {
        self.l
    }
}

pub fn validate_interval_start(iv: Interval, x: f64) -> Result<()> {
    check_range("x", x, iv.a, iv.b)
}

pub fn validate_strip_start(p: PlanarStripProblem, y: f64) -> Result<()> {
    check_range("y", y, 0.0, p.l)
}

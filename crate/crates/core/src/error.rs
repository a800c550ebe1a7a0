use thiserror::Error;

use crate::quadrature::QuadError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("`{name}` = {value} outside [{lo}, {hi}]")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("matrix is not nilpotent (|A^2| = {residual:e})")]
    NotNilpotent { residual: f64 },

    #[error("matrix does not satisfy A^2 = tr(A) A (residual {residual:e})")]
    NotRank1Recurrent { residual: f64 },

    #[error("drift exponent vanishes but speeds/rates are not symmetric")]
    DegenerateAsymmetric,

    #[error("lambda0*c1 == lambda1*c0: use the symmetric formulas")]
    DegenerateSymmetric,

    #[error("invalid hydrodynamic scale {scale} for drift {mu}")]
    InvalidScale { scale: f64, mu: f64 },

    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadError),

    #[error("sample contains no usable records")]
    EmptySample,

    #[error("path did not exit after {events} direction changes")]
    SimulationDiverged { events: u64 },
}

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            name,
            value,
            lo,
            hi,
        })
    }
}

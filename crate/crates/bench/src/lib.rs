//! Parameter points shared by the benchmark targets.

use telex_core::{DriftTelegraphParams, Interval, PlanarStripProblem, TelegraphParams};

pub fn unit_interval() -> Interval {
    Interval::new(0.0, 1.0).expect("valid interval")
}

pub fn telegraph() -> TelegraphParams {
    TelegraphParams::new(2.0, 4.0).expect("valid params")
}

pub fn drift() -> DriftTelegraphParams {
    DriftTelegraphParams::new(2.0, 1.0, 1.0, 1.0).expect("valid params")
}

/// The strip used for the density figures: `L = 1`, `c = 5`, `λ = 10`.
pub fn strip() -> PlanarStripProblem {
    PlanarStripProblem::from_values(5.0, 10.0, 1.0).expect("valid strip")
}

//! Maxwell velocity averaging and lineshape metrics.
//!
//! Two quadrature rules are provided. Gauss–Hermite is the production rule; a
//! uniform trapezoid on [−5u, 5u] is kept as an independent reference. Dressed
//! resonances can be much narrower in velocity than the Gauss–Hermite node
//! spacing, so every average goes through a guard that inspects the velocity
//! poles of the integrand and, on a Gauss–Hermite grid, falls back to adaptive
//! Gauss–Kronrod integration when a pole is narrower than three node spacings.

mod metrics;
mod quadrature;
mod spectrum;

pub use metrics::{line_metrics, LineMetrics};
pub use quadrature::{
    adaptive_maxwell_average, check_poles, guarded_average, make_grid, maxwell_weight, velocity_average,
    GuardReport, QuadratureKind, QuadratureUsed, VelocityGrid, GUARD_SPACINGS, VELOCITY_CUTOFF,
};
pub use spectrum::{
    average_response, average_with_model, averaged_spectrum, detuning_range, AveragedPoint, AveragedSpectrum,
    ComplexSpectrum,
};

/// Default number of Gauss–Hermite nodes.
pub const DEFAULT_NODES: usize = 128;

/// Node count of the trapezoid reference rule.
pub const ORACLE_NODES: usize = 8192;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown preset `{0}` (known: na2, fig1b, fig1c)")]
    UnknownPreset(String),

    #[error("invalid response selector `{0}` (expected chi1, chi4, chi4nl or chi4nl_sq)")]
    InvalidSelector(String),

    #[error("velocity grid needs at least 8 nodes, got {0}")]
    GridTooSmall(usize),

    #[error("non-positive linewidth for transition {0}")]
    NonPositiveWidth(&'static str),

    #[error("spectrum peak lies on the scan boundary at {position} MHz")]
    BoundaryPeak { position: f64 },

    #[error("spectrum is multi-modal: local maxima above half of the global maximum at {peaks:?} MHz")]
    MultiModal { peaks: Vec<f64> },

    #[error("profile never falls to half maximum inside the scan window")]
    NoHalfMaximum,

    #[error("no compensation geometry: control-field Doppler term cannot cancel the two-photon Doppler shift ({0})")]
    NoCompensationGeometry(String),

    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("no interior minimum of {0} inside the search bracket")]
    NoInteriorMinimum(&'static str),

    #[error(
        "unresolved narrow feature: velocity half-width {width:.3} m/s spans fewer than 3 nodes at {points} detunings; use the gh quadrature or more velocity nodes"
    )]
    UnresolvedFeature { width: f64, points: usize },

    #[error("ODE step size underflow at z = {z}")]
    StepUnderflow { z: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::UnknownPreset(_)
            | Error::InvalidSelector(_)
            | Error::GridTooSmall(_)
            | Error::NonPositiveWidth(_) => 2,
            Error::NoCompensationGeometry(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

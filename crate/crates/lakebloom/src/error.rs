//! Crate-wide error type with process exit-code mapping.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model parameter violates its documented range or ordering.
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// Simulation settings are inconsistent (step size, span, stride).
    #[error("invalid settings: {0}")]
    InvalidSettings(String),

    /// A derivative evaluated to NaN or infinity.
    #[error("non-finite derivative in component '{component}' at t = {time}")]
    NonFiniteDerivative { component: &'static str, time: f64 },

    /// The integrator produced a non-finite state (divergence).
    #[error("state diverged (non-finite '{component}') at t = {time}")]
    Divergence { component: &'static str, time: f64 },

    /// A state component went negative beyond tolerance; the step size is
    /// too coarse for the local dynamics.
    #[error(
        "component '{component}' reached {value:.3e} at t = {time}; \
         the dynamics are too stiff for the current step, use a smaller dt"
    )]
    Stiffness {
        component: &'static str,
        time: f64,
        value: f64,
    },

    /// Forcing data does not cover the requested simulation span.
    #[error("forcing covers [{have_start}, {have_end}] but the run needs [{need_start}, {need_end}]")]
    ForcingCoverage {
        have_start: f64,
        have_end: f64,
        need_start: f64,
        need_end: f64,
    },

    /// Input value outside the supported domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structured CSV parse failure (1-based data line number).
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// Run-configuration problem (unknown key, bad value, missing section).
    #[error("config error: {0}")]
    Config(String),

    /// A calibration or override name does not resolve to any parameter.
    #[error("unknown parameter name '{0}'")]
    UnknownParameter(String),

    /// Calibration bounds are malformed.
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    /// An observation lies outside the simulated span.
    #[error("observation at t = {time} is outside the simulated span [{start}, {end}]")]
    ObservationOutsideSpan { time: f64, start: f64, end: f64 },

    /// Sensitivity outputs carry no variance; indices are undefined.
    #[error("degenerate sensitivity outputs: pooled variance is zero")]
    DegenerateOutputs,

    /// Too many sensitivity rows failed to simulate.
    #[error("{failed} of {total} sensitivity rows failed (budget {budget}); first failures: {sample:?}")]
    SensitivityRowFailures {
        failed: usize,
        total: usize,
        budget: usize,
        sample: Vec<usize>,
    },

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code: 1 for validation problems the user can fix in
    /// inputs, 2 for runtime/model failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_)
            | Error::InvalidSettings(_)
            | Error::Domain(_)
            | Error::Parse { .. }
            | Error::Config(_)
            | Error::UnknownParameter(_)
            | Error::InvalidBounds(_)
            | Error::ObservationOutsideSpan { .. }
            | Error::ForcingCoverage { .. } => 1,
            _ => 2,
        }
    }
}

use thiserror::Error;

use crate::ivp::{StepFailure, StepKind};

/// Rejected problem or integrator configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("final time {t_final} must exceed initial time {t0}")]
    EmptyInterval { t0: f64, t_final: f64 },
    #[error("initial state has length {found}, system dimension is {expected}")]
    InitialStateLength { expected: usize, found: usize },
    #[error("number of steps must be positive")]
    NoSteps,
    #[error("order {0} out of range (supported: 1..={max})", max = crate::pipeline::MAX_ORDER)]
    OrderOutOfRange(usize),
    #[error("order {order} needs at least {required} steps, got {nt}")]
    TooFewSteps {
        order: usize,
        nt: usize,
        required: usize,
    },
    #[error(
        "restart interval {interval} is shorter than the {required} startup steps of order {order}"
    )]
    RestartTooShort {
        order: usize,
        interval: usize,
        required: usize,
    },
    #[error("stepper is {stepper} but the integrator was configured for {configured}")]
    ModeMismatch {
        configured: StepKind,
        stepper: StepKind,
    },
    #[error("grid [{grid_t0}, {grid_t_final}] does not match problem interval [{t0}, {t_final}]")]
    GridMismatch {
        t0: f64,
        t_final: f64,
        grid_t0: f64,
        grid_t_final: f64,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum RidcError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// The user step routine failed while advancing `level` from node `step`.
    #[error("step routine failed on level {level} at step {step}: {source}")]
    Step {
        level: usize,
        step: usize,
        #[source]
        source: StepFailure,
    },
    #[error("worker thread panicked on level {level}")]
    WorkerPanic { level: usize },
}

impl RidcError {
    /// `(level, step)` of a step failure, used to pick the first failure
    /// when several workers fail.
    pub fn location(&self) -> Option<(usize, usize)> {
        match self {
            RidcError::Step { level, step, .. } => Some((*level, *step)),
            RidcError::WorkerPanic { level } => Some((*level, usize::MAX)),
            RidcError::Config(_) => None,
        }
    }
}

//! Revisionist integral deferred correction (RIDC).
//!
//! Wraps a first-order explicit or implicit time stepper into a `P`th-order
//! integrator. Each correction level runs on its own thread and trails the
//! level below it by a few nodes, so with enough cores a `P`th-order
//! solution costs about as much wall time as the stepper alone.
//!
//! ```
//! use ridc::{ridc_solve, IvpProblem, ForwardEuler, RidcConfig, StepKind, TimeGrid};
//!
//! let problem = IvpProblem::from_fn(0.0, 1.0, vec![1.0], |_, y, dy| dy[0] = -y[0]).unwrap();
//! let euler = ForwardEuler::new(problem.system().clone());
//! let grid = TimeGrid::for_problem(&problem, 100).unwrap();
//! let config = RidcConfig::new(4, 100, StepKind::Explicit).pipelined();
//! let result = ridc_solve(&problem, &euler, &grid, &config).unwrap();
//! assert!((result.y_final[0] - (-1.0f64).exp()).abs() < 1e-9);
//! ```

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corrector;
pub mod error;
pub mod harness;
pub mod ivp;
pub mod linalg;
pub mod pipeline;
pub mod problems;
pub mod quadrature;

pub use error::{ConfigError, RidcError};
pub use ivp::{
    euler_reference_solve, FnStepper, FnSystem, ForwardEuler, IvpProblem, OdeSystem, StepFailure,
    StepKind, Stepper, TimeGrid,
};
pub use pipeline::{
    efficiency_ratio, ridc_solve, startup_schedule, startup_steps, Diagnostics, Executor,
    RidcConfig, RidcResult, StartupSchedule, MAX_ORDER, WORKERS_ENV,
};
pub use quadrature::{integration_matrix, IntegrationMatrix, Regime};

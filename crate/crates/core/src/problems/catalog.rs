//! Named problems for the command-line harness and examples.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::brusselator::{brusselator_problem, BrusselatorConfig};
use super::scalar::{
    decay_exact, decay_problem, polynomial_problem, stiff_exact, stiff_problem, DecayBackwardEuler,
    StiffBackwardEuler,
};
use crate::error::ConfigError;
use crate::ivp::{FnStepper, ForwardEuler, IvpProblem, StepKind, Stepper};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    Decay,
    Stiff,
    Brusselator,
    Polynomial,
}

impl ProblemId {
    pub const ALL: [ProblemId; 4] = [
        ProblemId::Decay,
        ProblemId::Stiff,
        ProblemId::Brusselator,
        ProblemId::Polynomial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::Decay => "decay",
            ProblemId::Stiff => "stiff",
            ProblemId::Brusselator => "brusselator",
            ProblemId::Polynomial => "polynomial",
        }
    }

    pub fn names() -> String {
        Self::ALL.map(ProblemId::name).join(", ")
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                ConfigError::Invalid(format!(
                    "unknown problem '{s}' (available: {})",
                    ProblemId::names()
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetupOptions {
    /// Stiffness of the `stiff` problem.
    pub lambda: f64,
    pub brusselator: BrusselatorConfig,
}

impl Default for SetupOptions {
    fn default() -> Self {
        Self {
            lambda: -100.0,
            brusselator: BrusselatorConfig::default(),
        }
    }
}

/// A problem paired with a stepper of the requested kind.
pub struct ProblemSetup {
    pub id: ProblemId,
    pub problem: IvpProblem,
    pub stepper: Box<dyn Stepper>,
    /// Closed-form solution, when one exists.
    pub exact: Option<fn(f64) -> Vec<f64>>,
}

impl fmt::Debug for ProblemSetup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSetup")
            .field("id", &self.id)
            .field("problem", &self.problem)
            .field("kind", &self.stepper.kind())
            .finish()
    }
}

fn polynomial_exact(t: f64) -> Vec<f64> {
    vec![t * t]
}

impl ProblemSetup {
    pub fn new(id: ProblemId, mode: StepKind, opts: &SetupOptions) -> Result<Self, ConfigError> {
        let setup = match id {
            ProblemId::Decay => {
                let problem = decay_problem();
                let stepper: Box<dyn Stepper> = match mode {
                    StepKind::Explicit => Box::new(ForwardEuler::new(problem.system().clone())),
                    StepKind::Implicit => Box::new(DecayBackwardEuler),
                };
                Self {
                    id,
                    problem,
                    stepper,
                    exact: Some(decay_exact),
                }
            }
            ProblemId::Stiff => {
                if !(opts.lambda < 0.0) {
                    return Err(ConfigError::Invalid(format!(
                        "stiff problem needs lambda < 0, got {}",
                        opts.lambda
                    )));
                }
                let problem = stiff_problem(opts.lambda);
                let stepper: Box<dyn Stepper> = match mode {
                    StepKind::Explicit => Box::new(ForwardEuler::new(problem.system().clone())),
                    StepKind::Implicit => Box::new(StiffBackwardEuler {
                        lambda: opts.lambda,
                    }),
                };
                Self {
                    id,
                    problem,
                    stepper,
                    exact: Some(stiff_exact),
                }
            }
            ProblemId::Brusselator => {
                let (problem, be) = brusselator_problem(opts.brusselator)?;
                let stepper: Box<dyn Stepper> = match mode {
                    StepKind::Explicit => Box::new(ForwardEuler::new(problem.system().clone())),
                    StepKind::Implicit => Box::new(be),
                };
                Self {
                    id,
                    problem,
                    stepper,
                    exact: None,
                }
            }
            ProblemId::Polynomial => {
                let problem = polynomial_problem();
                let stepper: Box<dyn Stepper> = match mode {
                    StepKind::Explicit => Box::new(ForwardEuler::new(problem.system().clone())),
                    StepKind::Implicit => Box::new(FnStepper::new(
                        StepKind::Implicit,
                        |t, dt, v: &[f64], out: &mut [f64]| {
                            out[0] = v[0] + dt * 2.0 * (t + dt);
                            Ok(())
                        },
                    )),
                };
                Self {
                    id,
                    problem,
                    stepper,
                    exact: Some(polynomial_exact),
                }
            }
        };
        Ok(setup)
    }

    pub fn with_defaults(id: ProblemId, mode: StepKind) -> Result<Self, ConfigError> {
        Self::new(id, mode, &SetupOptions::default())
    }

    pub fn system(&self) -> &Arc<dyn crate::ivp::OdeSystem> {
        self.problem.system()
    }
}

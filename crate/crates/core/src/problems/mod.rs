//! Bundled test problems with matching first-order steppers.

mod brusselator;
mod catalog;
mod scalar;

pub use brusselator::{
    brusselator_problem, discrete_laplacian, Brusselator, BrusselatorConfig,
    BrusselatorImplicitEuler,
};
pub use catalog::{ProblemId, ProblemSetup, SetupOptions};
pub use scalar::{
    decay_exact, decay_problem, linear_problem, polynomial_problem, stiff_exact, stiff_problem,
    DecayBackwardEuler, LinearBackwardEuler, StiffBackwardEuler,
};

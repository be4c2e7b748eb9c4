//! Small problems with closed-form solutions.

use std::sync::Arc;

use crate::ivp::{FnSystem, IvpProblem, StepFailure, StepKind, Stepper};

/// `y_i' = -(i+1) t y_i`, `y_i(0) = 1`, `i = 0, 1` on `[0, 1]`.
pub fn decay_problem() -> IvpProblem {
    let system = FnSystem::new(2, |t, y: &[f64], d: &mut [f64]| {
        for (i, (di, yi)) in d.iter_mut().zip(y).enumerate() {
            *di = -((i + 1) as f64) * t * yi;
        }
    });
    IvpProblem::new(Arc::new(system), 0.0, 1.0, vec![1.0, 1.0]).expect("valid problem")
}

/// `y_i(t) = exp(-(i+1) t^2 / 2)`.
pub fn decay_exact(t: f64) -> Vec<f64> {
    (0..2)
        .map(|i| (-((i + 1) as f64) * t * t / 2.0).exp())
        .collect()
}

/// Backward Euler for [`decay_problem`], solved in closed form.
#[derive(Debug, Clone, Copy, Default)]
pub struct DecayBackwardEuler;

impl Stepper for DecayBackwardEuler {
    fn kind(&self) -> StepKind {
        StepKind::Implicit
    }

    fn advance(&self, t: f64, dt: f64, v: &[f64], out: &mut [f64]) -> Result<(), StepFailure> {
        let t1 = t + dt;
        for (i, (o, vi)) in out.iter_mut().zip(v).enumerate() {
            *o = vi / (1.0 + (i + 1) as f64 * t1 * dt);
        }
        Ok(())
    }
}

/// `y' = λ (y - cos t) - sin t`, `y(0) = 1` on `[0, 1]`; exact `y = cos t`.
///
/// Stiff for large `|λ|`: transients decay at rate `λ` onto the smooth
/// solution.
pub fn stiff_problem(lambda: f64) -> IvpProblem {
    assert!(lambda < 0.0, "stiffness parameter must be negative");
    let system = FnSystem::new(1, move |t, y: &[f64], d: &mut [f64]| {
        d[0] = lambda * (y[0] - t.cos()) - t.sin();
    });
    IvpProblem::new(Arc::new(system), 0.0, 1.0, vec![1.0]).expect("valid problem")
}

pub fn stiff_exact(t: f64) -> Vec<f64> {
    vec![t.cos()]
}

/// Backward Euler for [`stiff_problem`], solved in closed form.
#[derive(Debug, Clone, Copy)]
pub struct StiffBackwardEuler {
    pub lambda: f64,
}

impl Stepper for StiffBackwardEuler {
    fn kind(&self) -> StepKind {
        StepKind::Implicit
    }

    fn advance(&self, t: f64, dt: f64, v: &[f64], out: &mut [f64]) -> Result<(), StepFailure> {
        let t1 = t + dt;
        let l = self.lambda;
        out[0] = (v[0] - dt * l * t1.cos() - dt * t1.sin()) / (1.0 - dt * l);
        Ok(())
    }
}

/// Scalar `y' = λ y`, `y(0) = 1` on `[0, t_final]`.
pub fn linear_problem(lambda: f64, t_final: f64) -> IvpProblem {
    let system = FnSystem::new(1, move |_, y: &[f64], d: &mut [f64]| d[0] = lambda * y[0]);
    IvpProblem::new(Arc::new(system), 0.0, t_final, vec![1.0]).expect("valid problem")
}

#[derive(Debug, Clone, Copy)]
pub struct LinearBackwardEuler {
    pub lambda: f64,
}

impl Stepper for LinearBackwardEuler {
    fn kind(&self) -> StepKind {
        StepKind::Implicit
    }

    fn advance(&self, _t: f64, dt: f64, v: &[f64], out: &mut [f64]) -> Result<(), StepFailure> {
        out[0] = v[0] / (1.0 - dt * self.lambda);
        Ok(())
    }
}

/// `y' = 2t`, `y(0) = 0` on `[0, 1]`; exact `y = t^2`. Every correction
/// level integrates this right-hand side exactly.
pub fn polynomial_problem() -> IvpProblem {
    let system = FnSystem::new(1, |t, _: &[f64], d: &mut [f64]| d[0] = 2.0 * t);
    IvpProblem::new(Arc::new(system), 0.0, 1.0, vec![0.0]).expect("valid problem")
}

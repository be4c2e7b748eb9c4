//! One-step prediction and correction updates around the user stepper.
//!
//! Explicit correction (post-process):
//!
//! ```text
//! ṽ         = step(t_n, dt, u_n^[p+1])
//! u_{n+1}^[p+1] = ṽ - dt f(t_n, u_n^[p]) + Q_n[f(·, u^[p])]
//! ```
//!
//! Implicit correction (pre-process):
//!
//! ```text
//! ṽ         = u_n^[p+1] - dt f(t_{n+1}, u_{n+1}^[p]) + Q_n[f(·, u^[p])]
//! u_{n+1}^[p+1] = step(t_n, dt, ṽ)
//! ```
//!
//! where `Q_n` is the quadrature over `[t_n, t_{n+1}]` and the anchor value
//! `f(·, u^[p])` is taken from the same stored window the quadrature reads.

use crate::ivp::{StepFailure, StepKind, Stepper};
use crate::quadrature::{IntegrationMatrix, Regime};

/// Inputs of one correction step on level `p + 1`.
#[derive(Debug, Clone, Copy)]
pub struct LevelStencil<'a, V> {
    /// Level being advanced (`p + 1 >= 1`).
    pub level: usize,
    /// Stored `f(t, u^[p])` values in the `ν` order of the regime in use.
    pub window: &'a [V],
    /// `u_n^[p+1]`.
    pub u_current: &'a [f64],
    /// Index into `window` of the value subtracted as `dt * f`:
    /// node `t_n` for explicit, `t_{n+1}` for implicit correction.
    pub anchor: usize,
}

impl<'a, V: AsRef<[f64]>> LevelStencil<'a, V> {
    fn check(&self, matrix: &IntegrationMatrix) {
        assert!(self.level >= 1, "level 0 is the prediction level");
        assert_eq!(
            matrix.level() + 1,
            self.level,
            "integration matrix level does not match stencil level"
        );
        assert_eq!(
            self.window.len(),
            self.level + 1,
            "stencil window must hold level + 1 values"
        );
        assert!(self.anchor < self.window.len(), "anchor outside window");
    }

    pub fn anchor_value(&self) -> &[f64] {
        self.window[self.anchor].as_ref()
    }
}

/// Level-0 update: the raw user step.
pub fn predict_step(
    stepper: &dyn Stepper,
    t_n: f64,
    dt: f64,
    u_n: &[f64],
    out: &mut [f64],
) -> Result<(), StepFailure> {
    stepper.advance(t_n, dt, u_n, out)
}

/// Forward-Euler correction. `scratch` must have the state length.
#[allow(clippy::too_many_arguments)]
pub fn correct_step_explicit<V: AsRef<[f64]>>(
    stepper: &dyn Stepper,
    stencil: &LevelStencil<'_, V>,
    matrix: &IntegrationMatrix,
    regime: Regime,
    t_n: f64,
    dt: f64,
    out: &mut [f64],
    scratch: &mut [f64],
) -> Result<(), StepFailure> {
    assert_eq!(
        stepper.kind(),
        StepKind::Explicit,
        "explicit corrector needs an explicit stepper"
    );
    stencil.check(matrix);
    stepper.advance(t_n, dt, stencil.u_current, out)?;
    matrix.apply_into(regime, stencil.window, scratch);
    let anchor = stencil.anchor_value();
    for ((o, &q), &f) in out.iter_mut().zip(scratch.iter()).zip(anchor) {
        *o = (*o - dt * f) + q;
    }
    Ok(())
}

/// Backward-Euler correction. `scratch` must have the state length.
#[allow(clippy::too_many_arguments)]
pub fn correct_step_implicit<V: AsRef<[f64]>>(
    stepper: &dyn Stepper,
    stencil: &LevelStencil<'_, V>,
    matrix: &IntegrationMatrix,
    regime: Regime,
    t_n: f64,
    dt: f64,
    out: &mut [f64],
    scratch: &mut [f64],
) -> Result<(), StepFailure> {
    assert_eq!(
        stepper.kind(),
        StepKind::Implicit,
        "implicit corrector needs an implicit stepper"
    );
    stencil.check(matrix);
    matrix.apply_into(regime, stencil.window, scratch);
    let anchor = stencil.anchor_value();
    for ((v, &u), &f) in scratch.iter_mut().zip(stencil.u_current).zip(anchor) {
        *v += u - dt * f;
    }
    stepper.advance(t_n, dt, scratch, out)
}

/// Dispatches on the stepper kind.
#[allow(clippy::too_many_arguments)]
pub fn correct_step<V: AsRef<[f64]>>(
    stepper: &dyn Stepper,
    stencil: &LevelStencil<'_, V>,
    matrix: &IntegrationMatrix,
    regime: Regime,
    t_n: f64,
    dt: f64,
    out: &mut [f64],
    scratch: &mut [f64],
) -> Result<(), StepFailure> {
    match stepper.kind() {
        StepKind::Explicit => {
            correct_step_explicit(stepper, stencil, matrix, regime, t_n, dt, out, scratch)
        }
        StepKind::Implicit => {
            correct_step_implicit(stepper, stencil, matrix, regime, t_n, dt, out, scratch)
        }
    }
}

//! Problem definitions and the user stepper contract.
//!
//! A user brings two things: an [`OdeSystem`] (the right-hand side `f(t, y)`)
//! and a first-order [`Stepper`] that advances a state by one step of size
//! `dt`. Everything else (quadrature, corrections, pipelining) is handled by
//! the framework.

use std::error::Error as StdError;
use std::fmt;
use std::sync::Arc;

use crate::error::{ConfigError, RidcError};

/// Boxed error returned by user step routines.
pub type StepFailure = Box<dyn StdError + Send + Sync + 'static>;

/// Right-hand side of `y'(t) = f(t, y)`.
///
/// Implementations must be pure: the framework calls `rhs` concurrently from
/// several level workers.
pub trait OdeSystem: Send + Sync {
    /// Number of equations.
    fn dim(&self) -> usize;

    /// Writes `f(t, y)` into `dydt`. Both slices have length [`dim`](Self::dim).
    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]);
}

/// Whether a stepper is a forward (explicit) or backward (implicit) Euler step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    /// `u = v + dt * f(t, v)`.
    Explicit,
    /// `u = v + dt * f(t + dt, u)`, solved to the user's tolerance.
    Implicit,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepKind::Explicit => f.write_str("fe"),
            StepKind::Implicit => f.write_str("be"),
        }
    }
}

/// A user-supplied first-order time step.
///
/// `advance` maps `(t, dt, v)` to the state one step later. It must not carry
/// hidden mutable state between calls; the pipelined executor calls it from
/// one thread per correction level at the same time.
pub trait Stepper: Send + Sync {
    fn kind(&self) -> StepKind;

    fn advance(&self, t: f64, dt: f64, v: &[f64], out: &mut [f64]) -> Result<(), StepFailure>;
}

impl<S: Stepper + ?Sized> Stepper for &S {
    fn kind(&self) -> StepKind {
        (**self).kind()
    }

    fn advance(&self, t: f64, dt: f64, v: &[f64], out: &mut [f64]) -> Result<(), StepFailure> {
        (**self).advance(t, dt, v, out)
    }
}

impl<S: Stepper + ?Sized> Stepper for Box<S> {
    fn kind(&self) -> StepKind {
        (**self).kind()
    }

    fn advance(&self, t: f64, dt: f64, v: &[f64], out: &mut [f64]) -> Result<(), StepFailure> {
        (**self).advance(t, dt, v, out)
    }
}

/// Adapts a closure `Fn(t, y, dydt)` into an [`OdeSystem`].
pub struct FnSystem<F> {
    dim: usize,
    f: F,
}

impl<F> FnSystem<F>
where
    F: Fn(f64, &[f64], &mut [f64]) + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> OdeSystem for FnSystem<F>
where
    F: Fn(f64, &[f64], &mut [f64]) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        (self.f)(t, y, dydt)
    }
}

/// Adapts a closure into a [`Stepper`] of the declared kind.
pub struct FnStepper<F> {
    kind: StepKind,
    f: F,
}

impl<F> FnStepper<F>
where
    F: Fn(f64, f64, &[f64], &mut [f64]) -> Result<(), StepFailure> + Send + Sync,
{
    pub fn new(kind: StepKind, f: F) -> Self {
        Self { kind, f }
    }
}

impl<F> Stepper for FnStepper<F>
where
    F: Fn(f64, f64, &[f64], &mut [f64]) -> Result<(), StepFailure> + Send + Sync,
{
    fn kind(&self) -> StepKind {
        self.kind
    }

    fn advance(&self, t: f64, dt: f64, v: &[f64], out: &mut [f64]) -> Result<(), StepFailure> {
        (self.f)(t, dt, v, out)
    }
}

/// Forward Euler built directly from a system's right-hand side.
pub struct ForwardEuler {
    system: Arc<dyn OdeSystem>,
}

impl ForwardEuler {
    pub fn new(system: Arc<dyn OdeSystem>) -> Self {
        Self { system }
    }
}

impl Stepper for ForwardEuler {
    fn kind(&self) -> StepKind {
        StepKind::Explicit
    }

    fn advance(&self, t: f64, dt: f64, v: &[f64], out: &mut [f64]) -> Result<(), StepFailure> {
        self.system.rhs(t, v, out);
        for (o, &vi) in out.iter_mut().zip(v) {
            *o = vi + dt * *o;
        }
        Ok(())
    }
}

/// An initial value problem `y' = f(t, y)`, `y(t0) = y0` on `[t0, t_final]`.
#[derive(Clone)]
pub struct IvpProblem {
    system: Arc<dyn OdeSystem>,
    t0: f64,
    t_final: f64,
    y0: Vec<f64>,
}

impl fmt::Debug for IvpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IvpProblem")
            .field("dim", &self.dim())
            .field("t0", &self.t0)
            .field("t_final", &self.t_final)
            .field("y0", &self.y0)
            .finish()
    }
}

impl IvpProblem {
    pub fn new(
        system: Arc<dyn OdeSystem>,
        t0: f64,
        t_final: f64,
        y0: Vec<f64>,
    ) -> Result<Self, ConfigError> {
        if !(t_final > t0) {
            return Err(ConfigError::EmptyInterval { t0, t_final });
        }
        if y0.len() != system.dim() || y0.is_empty() {
            return Err(ConfigError::InitialStateLength {
                expected: system.dim(),
                found: y0.len(),
            });
        }
        Ok(Self {
            system,
            t0,
            t_final,
            y0,
        })
    }

    /// Convenience constructor from a closure right-hand side.
    pub fn from_fn<F>(t0: f64, t_final: f64, y0: Vec<f64>, f: F) -> Result<Self, ConfigError>
    where
        F: Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
    {
        let system = Arc::new(FnSystem::new(y0.len(), f));
        Self::new(system, t0, t_final, y0)
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn y0(&self) -> &[f64] {
        &self.y0
    }

    pub fn system(&self) -> &Arc<dyn OdeSystem> {
        &self.system
    }

    /// Evaluates `f(t, y)` into `out`.
    ///
    /// Panics on a length mismatch; that is a caller bug, not a runtime
    /// condition.
    pub fn eval_rhs_into(&self, t: f64, y: &[f64], out: &mut [f64]) {
        let n = self.dim();
        assert_eq!(y.len(), n, "state length does not match problem dimension");
        assert_eq!(
            out.len(),
            n,
            "output length does not match problem dimension"
        );
        self.system.rhs(t, y, out);
    }

    pub fn eval_rhs(&self, t: f64, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_rhs_into(t, y, &mut out);
        out
    }
}

/// Uniform time grid `t_n = t0 + n * dt`, `n = 0..=nt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    t_final: f64,
    nt: usize,
    dt: f64,
}

impl TimeGrid {
    pub fn new(t0: f64, t_final: f64, nt: usize) -> Result<Self, ConfigError> {
        if nt == 0 {
            return Err(ConfigError::NoSteps);
        }
        if !(t_final > t0) {
            return Err(ConfigError::EmptyInterval { t0, t_final });
        }
        Ok(Self {
            t0,
            t_final,
            nt,
            dt: (t_final - t0) / nt as f64,
        })
    }

    pub fn for_problem(problem: &IvpProblem, nt: usize) -> Result<Self, ConfigError> {
        Self::new(problem.t0(), problem.t_final(), nt)
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Node time, always `t0 + n * dt` so every level sees identical values.
    #[inline]
    pub fn node(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.dt
    }
}

/// Plain sequential solve: applies the stepper `nt` times.
///
/// This is the serial baseline the pipelined integrator is measured against,
/// and what an order-1 RIDC run must reproduce bit for bit.
pub fn euler_reference_solve(
    problem: &IvpProblem,
    stepper: &dyn Stepper,
    grid: &TimeGrid,
) -> Result<Vec<f64>, RidcError> {
    let mut u = problem.y0().to_vec();
    let mut next = vec![0.0; u.len()];
    for n in 0..grid.nt() {
        stepper
            .advance(grid.node(n), grid.dt(), &u, &mut next)
            .map_err(|source| RidcError::Step {
                level: 0,
                step: n,
                source,
            })?;
        std::mem::swap(&mut u, &mut next);
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_decay() -> IvpProblem {
        IvpProblem::from_fn(0.0, 1.0, vec![1.0], |_, y, d| d[0] = -y[0]).unwrap()
    }

    fn backward_euler_decay() -> impl Stepper {
        FnStepper::new(StepKind::Implicit, |_, dt, v: &[f64], out: &mut [f64]| {
            out[0] = v[0] / (1.0 + dt);
            Ok(())
        })
    }

    #[test]
    fn rhs_of_decay_system() {
        let p = IvpProblem::from_fn(0.0, 1.0, vec![1.0, 1.0], |t, y, d| {
            for i in 0..2 {
                d[i] = -((i + 1) as f64) * t * y[i];
            }
        })
        .unwrap();
        assert_eq!(p.eval_rhs(1.0, &[1.0, 1.0]), vec![-1.0, -2.0]);
        assert_eq!(p.eval_rhs(0.3, &[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(p.eval_rhs(0.7, &[0.4, 2.0]), p.eval_rhs(0.7, &[0.4, 2.0]));
    }

    #[test]
    #[should_panic(expected = "state length")]
    fn rhs_dimension_mismatch_panics() {
        scalar_decay().eval_rhs(0.0, &[1.0, 2.0]);
    }

    #[test]
    fn grid_nodes_are_not_accumulated() {
        let g = TimeGrid::new(0.0, 1.0, 10).unwrap();
        assert_eq!(g.dt(), 0.1);
        assert_eq!(g.node(3), 3.0 * 0.1);
        assert_eq!(g.node(10), 10.0 * 0.1);
        assert!(TimeGrid::new(0.0, 1.0, 0).is_err());
        assert!(TimeGrid::new(1.0, 1.0, 4).is_err());
    }

    #[test]
    fn problem_validation() {
        assert!(IvpProblem::from_fn(1.0, 0.0, vec![1.0], |_, _, _| {}).is_err());
        let sys = Arc::new(FnSystem::new(2, |_, _: &[f64], _: &mut [f64]| {}));
        assert!(IvpProblem::new(sys, 0.0, 1.0, vec![1.0]).is_err());
    }

    #[test]
    fn reference_solve_zero_dynamics() {
        let p = IvpProblem::from_fn(0.0, 2.0, vec![3.0, -1.5], |_, _, d| d.fill(0.0)).unwrap();
        let s = ForwardEuler::new(p.system().clone());
        let g = TimeGrid::for_problem(&p, 17).unwrap();
        assert_eq!(euler_reference_solve(&p, &s, &g).unwrap(), vec![3.0, -1.5]);
    }

    #[test]
    fn reference_solve_euler_products() {
        let p = scalar_decay();
        let g = TimeGrid::for_problem(&p, 10).unwrap();
        let fe = ForwardEuler::new(p.system().clone());
        let y = euler_reference_solve(&p, &fe, &g).unwrap();
        assert!((y[0] - 0.9f64.powi(10)).abs() < 1e-15);
        assert!((y[0] - 0.348_678_44).abs() < 1e-8);

        let be = backward_euler_decay();
        let y = euler_reference_solve(&p, &be, &g).unwrap();
        assert!((y[0] - (1.0 / 1.1f64).powi(10)).abs() < 1e-15);
        assert!((y[0] - 0.385_543_29).abs() < 1e-8);
    }

    #[test]
    fn reference_solve_propagates_failure() {
        let p = scalar_decay();
        let g = TimeGrid::for_problem(&p, 5).unwrap();
        let s = FnStepper::new(StepKind::Explicit, |t, _, _: &[f64], _: &mut [f64]| {
            if t > 0.25 {
                Err("boom".into())
            } else {
                Ok(())
            }
        });
        match euler_reference_solve(&p, &s, &g) {
            Err(RidcError::Step {
                level: 0, step: 2, ..
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}

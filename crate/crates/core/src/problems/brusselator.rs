//! One-dimensional Brusselator reaction-diffusion system
//!
//! ```text
//! u_t = A + u² v - (B + 1) u + α u_xx
//! v_t = B u - u² v           + α v_xx
//! ```
//!
//! on `x ∈ [0, 1]` with `u = 1`, `v = 3` at both ends and
//! `u(0, x) = 1 + sin 2πx`, `v(0, x) = 3`. Space is discretized with
//! second-order central differences on `M` interior points; the state
//! interleaves `(u_1, v_1, u_2, v_2, …)` so the Jacobian has two sub- and
//! two super-diagonals.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::ConfigError;
use crate::ivp::{IvpProblem, OdeSystem, StepFailure, StepKind, Stepper};
use crate::linalg::{newton_solve, BandedMatrix, NewtonConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrusselatorConfig {
    pub a: f64,
    pub b: f64,
    /// Diffusion coefficient.
    pub alpha: f64,
    /// Interior grid points `M`; `dx = 1 / (M + 1)`.
    pub interior_points: usize,
    pub t_final: f64,
}

impl Default for BrusselatorConfig {
    fn default() -> Self {
        Self {
            a: 1.0,
            b: 3.0,
            alpha: 0.02,
            interior_points: 200,
            t_final: 1.0,
        }
    }
}

impl BrusselatorConfig {
    pub fn with_points(mut self, m: usize) -> Self {
        self.interior_points = m;
        self
    }

    pub fn dx(&self) -> f64 {
        1.0 / (self.interior_points + 1) as f64
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.interior_points < 3 {
            return Err(ConfigError::Invalid(format!(
                "Brusselator needs at least 3 interior points, got {}",
                self.interior_points
            )));
        }
        if !(self.t_final > 0.0) {
            return Err(ConfigError::EmptyInterval {
                t0: 0.0,
                t_final: self.t_final,
            });
        }
        Ok(())
    }
}

#[inline]
fn second_difference(left: f64, centre: f64, right: f64) -> f64 {
    left - 2.0 * centre + right
}

/// Central-difference `w_xx` at the interior points, with Dirichlet values
/// `left` and `right` folded in.
pub fn discrete_laplacian(interior: &[f64], left: f64, right: f64, dx: f64) -> Vec<f64> {
    let m = interior.len();
    (0..m)
        .map(|j| {
            let l = if j == 0 { left } else { interior[j - 1] };
            let r = if j + 1 == m { right } else { interior[j + 1] };
            second_difference(l, interior[j], r) / (dx * dx)
        })
        .collect()
}

/// Method-of-lines right-hand side. Boundary values are the homogeneous
/// steady state `u = A`, `v = B / A` (1 and 3 for the default parameters).
#[derive(Debug, Clone)]
pub struct Brusselator {
    cfg: BrusselatorConfig,
    /// `α / dx²`.
    diff: f64,
    u_boundary: f64,
    v_boundary: f64,
}

impl Brusselator {
    pub fn new(cfg: BrusselatorConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let dx = cfg.dx();
        Ok(Self {
            cfg,
            diff: cfg.alpha / (dx * dx),
            u_boundary: cfg.a,
            v_boundary: cfg.b / cfg.a,
        })
    }

    pub fn config(&self) -> &BrusselatorConfig {
        &self.cfg
    }

    pub fn initial_state(&self) -> Vec<f64> {
        let m = self.cfg.interior_points;
        let dx = self.cfg.dx();
        let mut y = Vec::with_capacity(2 * m);
        for j in 1..=m {
            let x = j as f64 * dx;
            y.push(1.0 + (2.0 * PI * x).sin());
            y.push(3.0);
        }
        y
    }

    /// Jacobian of the right-hand side, band (2, 2).
    pub fn jacobian(&self, y: &[f64]) -> BandedMatrix {
        let mut jac = BandedMatrix::zeros(y.len(), 2, 2);
        self.fill_jacobian_scaled(y, 0.0, -1.0, &mut jac);
        jac
    }

    /// Writes `shift * I - scale * J(y)`.
    fn fill_jacobian_scaled(&self, y: &[f64], shift: f64, scale: f64, jac: &mut BandedMatrix) {
        let m = self.cfg.interior_points;
        let (a_b1, b) = (self.cfg.b + 1.0, self.cfg.b);
        let d = self.diff;
        for j in 0..m {
            let (iu, iv) = (2 * j, 2 * j + 1);
            let (u, v) = (y[iu], y[iv]);
            jac.set(iu, iu, shift - scale * (2.0 * u * v - a_b1 - 2.0 * d));
            jac.set(iu, iv, -scale * (u * u));
            jac.set(iv, iu, -scale * (b - 2.0 * u * v));
            jac.set(iv, iv, shift - scale * (-u * u - 2.0 * d));
            if j > 0 {
                jac.set(iu, iu - 2, -scale * d);
                jac.set(iv, iv - 2, -scale * d);
            }
            if j + 1 < m {
                jac.set(iu, iu + 2, -scale * d);
                jac.set(iv, iv + 2, -scale * d);
            }
        }
    }
}

impl OdeSystem for Brusselator {
    fn dim(&self) -> usize {
        2 * self.cfg.interior_points
    }

    fn rhs(&self, _t: f64, y: &[f64], dydt: &mut [f64]) {
        let m = self.cfg.interior_points;
        let (a, b) = (self.cfg.a, self.cfg.b);
        let d = self.diff;
        for j in 0..m {
            let (u, v) = (y[2 * j], y[2 * j + 1]);
            let (ul, vl) = if j == 0 {
                (self.u_boundary, self.v_boundary)
            } else {
                (y[2 * j - 2], y[2 * j - 1])
            };
            let (ur, vr) = if j + 1 == m {
                (self.u_boundary, self.v_boundary)
            } else {
                (y[2 * j + 2], y[2 * j + 3])
            };
            let uuv = u * u * v;
            dydt[2 * j] = a + uuv - (b + 1.0) * u + d * second_difference(ul, u, ur);
            dydt[2 * j + 1] = b * u - uuv + d * second_difference(vl, v, vr);
        }
    }
}

/// Backward Euler with a banded Newton solve per step.
///
/// Each call allocates its own Newton workspace, so one instance can be
/// shared by all level workers.
#[derive(Debug, Clone)]
pub struct BrusselatorImplicitEuler {
    system: Arc<Brusselator>,
    newton: NewtonConfig,
}

impl BrusselatorImplicitEuler {
    pub fn new(system: Arc<Brusselator>) -> Self {
        Self {
            system,
            newton: NewtonConfig::default(),
        }
    }

    pub fn with_newton(mut self, newton: NewtonConfig) -> Self {
        self.newton = newton;
        self
    }

    pub fn newton(&self) -> &NewtonConfig {
        &self.newton
    }
}

impl Stepper for BrusselatorImplicitEuler {
    fn kind(&self) -> StepKind {
        StepKind::Implicit
    }

    fn advance(&self, t: f64, dt: f64, v: &[f64], out: &mut [f64]) -> Result<(), StepFailure> {
        let sys = &*self.system;
        let t1 = t + dt;
        let n = v.len();
        let report = newton_solve(
            |u, r| {
                sys.rhs(t1, u, r);
                for ((ri, &ui), &vi) in r.iter_mut().zip(u).zip(v) {
                    *ri = ui - vi - dt * *ri;
                }
            },
            |u| {
                let mut jac = BandedMatrix::zeros(n, 2, 2);
                sys.fill_jacobian_scaled(u, 1.0, dt, &mut jac);
                jac
            },
            v,
            &self.newton,
        )?;
        out.copy_from_slice(&report.solution);
        Ok(())
    }
}

/// Builds the semi-discrete Brusselator and its implicit Euler stepper.
pub fn brusselator_problem(
    cfg: BrusselatorConfig,
) -> Result<(IvpProblem, BrusselatorImplicitEuler), ConfigError> {
    let system = Arc::new(Brusselator::new(cfg)?);
    let y0 = system.initial_state();
    let problem = IvpProblem::new(system.clone(), 0.0, cfg.t_final, y0)?;
    Ok((problem, BrusselatorImplicitEuler::new(system)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::NewtonConfig;

    fn small() -> BrusselatorConfig {
        BrusselatorConfig::default().with_points(20)
    }

    #[test]
    fn steady_state_is_a_fixed_point() {
        let sys = Brusselator::new(BrusselatorConfig::default()).unwrap();
        let y: Vec<f64> = (0..200).flat_map(|_| [1.0, 3.0]).collect();
        let f = {
            let mut f = vec![1.0; 400];
            sys.rhs(0.0, &y, &mut f);
            f
        };
        assert!(f.iter().all(|&x| x.abs() < 1e-12), "{f:?}");
    }

    #[test]
    fn initial_state_samples() {
        let cfg = BrusselatorConfig::default();
        let sys = Brusselator::new(cfg).unwrap();
        let y = sys.initial_state();
        assert_eq!(y.len(), 400);
        for j in [0usize, 49, 199] {
            let x = (j + 1) as f64 * cfg.dx();
            assert_eq!(y[2 * j], 1.0 + (2.0 * PI * x).sin());
            assert_eq!(y[2 * j + 1], 3.0);
        }
    }

    #[test]
    fn laplacian_of_linear_profile_vanishes() {
        let m = 9;
        let dx = 1.0 / (m + 1) as f64;
        let line = |x: f64| 2.0 - 3.0 * x;
        let interior: Vec<f64> = (1..=m).map(|j| line(j as f64 * dx)).collect();
        let lap = discrete_laplacian(&interior, line(0.0), line(1.0), dx);
        assert!(lap.iter().all(|x| x.abs() < 1e-12), "{lap:?}");
        let quad: Vec<f64> = (1..=m).map(|j| (j as f64 * dx).powi(2)).collect();
        let lap = discrete_laplacian(&quad, 0.0, 1.0, dx);
        assert!(lap.iter().all(|x| (x - 2.0).abs() < 1e-9));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let sys = Brusselator::new(small()).unwrap();
        let y = sys.initial_state();
        let jac = sys.jacobian(&y);
        let n = y.len();
        let mut f_plus = vec![0.0; n];
        let mut f_minus = vec![0.0; n];
        for k in 0..n {
            let h = 1e-6 * (1.0 + y[k].abs());
            let mut yp = y.clone();
            let mut ym = y.clone();
            yp[k] += h;
            ym[k] -= h;
            sys.rhs(0.0, &yp, &mut f_plus);
            sys.rhs(0.0, &ym, &mut f_minus);
            for i in 0..n {
                let fd = (f_plus[i] - f_minus[i]) / (2.0 * h);
                let exact = jac.get(i, k);
                let scale = exact.abs().max(1.0);
                assert!(
                    (fd - exact).abs() <= 1e-6 * scale,
                    "({i},{k}): {fd} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn implicit_step_satisfies_contract() {
        let (problem, stepper) = brusselator_problem(small()).unwrap();
        let v = problem.y0().to_vec();
        let dt = 0.05;
        let mut u = vec![0.0; v.len()];
        stepper.advance(0.0, dt, &v, &mut u).unwrap();
        let f = problem.eval_rhs(dt, &u);
        let res = u
            .iter()
            .zip(&v)
            .zip(&f)
            .map(|((ui, vi), fi)| (ui - vi - dt * fi).abs())
            .fold(0.0, f64::max);
        assert!(res <= stepper.newton().abs_tolerance, "residual {res}");
    }

    #[test]
    fn newton_failure_surfaces() {
        let (problem, stepper) = brusselator_problem(small()).unwrap();
        let stepper = stepper.with_newton(NewtonConfig {
            abs_tolerance: 1e-30,
            max_iterations: 2,
            ..NewtonConfig::default()
        });
        let mut u = vec![0.0; problem.dim()];
        let err = stepper.advance(0.0, 0.1, problem.y0(), &mut u).unwrap_err();
        assert!(err.to_string().contains("did not converge"));
    }

    #[test]
    fn too_few_points_rejected() {
        assert!(brusselator_problem(BrusselatorConfig::default().with_points(2)).is_err());
    }
}

use super::{norm_inf, BandedMatrix, DenseMatrix, LinalgError};

/// A Jacobian that can solve `J δ = r`.
pub trait JacobianSolve {
    fn solve_linear(&self, rhs: &[f64]) -> Result<Vec<f64>, LinalgError>;
}

impl JacobianSolve for DenseMatrix {
    fn solve_linear(&self, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
        super::solve_dense(self, rhs)
    }
}

impl JacobianSolve for BandedMatrix {
    fn solve_linear(&self, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
        self.solve(rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Damping {
    None,
    /// Halve the update until the residual norm decreases (at most 30 times).
    Halving,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Converged once `‖residual‖∞ <= abs_tolerance`.
    pub abs_tolerance: f64,
    pub max_iterations: usize,
    pub damping: Damping,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            abs_tolerance: 1e-12,
            max_iterations: 25,
            damping: Damping::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub residual_norm: f64,
}

/// Solves `residual(x) = 0` from `x0`.
///
/// `residual` writes into its second argument; `jacobian` returns the
/// Jacobian of the residual at `x`.
pub fn newton_solve<R, J, M>(
    mut residual: R,
    mut jacobian: J,
    x0: &[f64],
    config: &NewtonConfig,
) -> Result<NewtonReport, LinalgError>
where
    R: FnMut(&[f64], &mut [f64]),
    J: FnMut(&[f64]) -> M,
    M: JacobianSolve,
{
    if !(config.abs_tolerance > 0.0) {
        return Err(LinalgError::InvalidConfig("tolerance must be positive"));
    }
    if config.max_iterations == 0 {
        return Err(LinalgError::InvalidConfig(
            "max_iterations must be at least 1",
        ));
    }
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut r_trial = vec![0.0; n];
    residual(&x, &mut r);
    let mut norm = norm_inf(&r);

    let mut iterations = 0;
    while !(norm <= config.abs_tolerance) {
        if iterations == config.max_iterations || !norm.is_finite() {
            return Err(LinalgError::NoConvergence {
                iterations,
                residual_norm: norm,
            });
        }
        iterations += 1;
        let delta = jacobian(&x).solve_linear(&r)?;
        let mut lambda = 1.0;
        let mut halvings = 0;
        loop {
            for ((t, xi), d) in trial.iter_mut().zip(&x).zip(&delta) {
                *t = xi - lambda * d;
            }
            residual(&trial, &mut r_trial);
            let trial_norm = norm_inf(&r_trial);
            let accept = match config.damping {
                Damping::None => true,
                Damping::Halving => trial_norm < norm || halvings == 30,
            };
            if accept {
                std::mem::swap(&mut x, &mut trial);
                std::mem::swap(&mut r, &mut r_trial);
                norm = trial_norm;
                break;
            }
            lambda *= 0.5;
            halvings += 1;
        }
    }
    Ok(NewtonReport {
        solution: x,
        iterations,
        residual_norm: norm,
    })
}

//! Plugging in a user problem and stepper: the pendulum
//! θ'' = -sin θ with a hand-written implicit Euler step (Newton on θ).

use ridc::linalg::{newton_solve, DenseMatrix, NewtonConfig};
use ridc::{ridc_solve, FnStepper, IvpProblem, RidcConfig, StepKind, TimeGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = IvpProblem::from_fn(0.0, 10.0, vec![1.0, 0.0], |_, y, d| {
        d[0] = y[1];
        d[1] = -y[0].sin();
    })?;

    // Solve u - v - dt f(u) = 0.
    let step = FnStepper::new(StepKind::Implicit, |_t, dt, v: &[f64], out: &mut [f64]| {
        let report = newton_solve(
            |u: &[f64], r: &mut [f64]| {
                r[0] = u[0] - v[0] - dt * u[1];
                r[1] = u[1] - v[1] + dt * u[0].sin();
            },
            |u: &[f64]| DenseMatrix::from_rows(&[vec![1.0, -dt], vec![dt * u[0].cos(), 1.0]]),
            v,
            &NewtonConfig::default(),
        )?;
        out.copy_from_slice(&report.solution);
        Ok(())
    });

    let energy = |y: &[f64]| 0.5 * y[1] * y[1] - y[0].cos();
    let e0 = energy(problem.y0());
    for order in 1..=4 {
        let nt = 400;
        let grid = TimeGrid::for_problem(&problem, nt)?;
        let r = ridc_solve(
            &problem,
            &step,
            &grid,
            &RidcConfig::new(order, nt, StepKind::Implicit),
        )?;
        println!(
            "order {order}: theta(10) = {:+.10}, energy drift {:.3e}",
            r.y_final[0],
            energy(&r.y_final) - e0
        );
    }
    Ok(())
}

//! Backward Euler wrapped into RIDC on the stiff problem
//! y' = λ(y - cos t) - sin t, compared with the plain stepper.

use ridc::problems::{stiff_exact, stiff_problem, StiffBackwardEuler};
use ridc::{euler_reference_solve, ridc_solve, RidcConfig, StepKind, TimeGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lambda = -1.0e4;
    let problem = stiff_problem(lambda);
    let stepper = StiffBackwardEuler { lambda };
    let exact = stiff_exact(problem.t_final())[0];

    println!("{:>6} {:>14} {:>14}", "steps", "backward-euler", "ridc-4");
    for nt in [20, 40, 80, 160] {
        let grid = TimeGrid::for_problem(&problem, nt)?;
        let be = euler_reference_solve(&problem, &stepper, &grid)?;
        let config = RidcConfig::new(4, nt, StepKind::Implicit).pipelined();
        let r4 = ridc_solve(&problem, &stepper, &grid, &config)?;
        println!(
            "{nt:>6} {:>14.3e} {:>14.3e}",
            (be[0] - exact).abs(),
            (r4.y_final[0] - exact).abs()
        );
    }
    Ok(())
}

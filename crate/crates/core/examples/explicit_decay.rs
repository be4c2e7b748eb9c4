//! Fourth-order RIDC around forward Euler on y_i' = -(i+1) t y_i.
//!
//! cargo run --example explicit_decay -- [order] [steps]

use ridc::problems::{decay_exact, decay_problem};
use ridc::{ridc_solve, ForwardEuler, RidcConfig, StepKind, TimeGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let order: usize = args.next().map_or(Ok(4), |s| s.parse())?;
    let nt: usize = args.next().map_or(Ok(100), |s| s.parse())?;

    let problem = decay_problem();
    let euler = ForwardEuler::new(problem.system().clone());
    let grid = TimeGrid::for_problem(&problem, nt)?;
    let config = RidcConfig::new(order, nt, StepKind::Explicit).pipelined();
    let result = ridc_solve(&problem, &euler, &grid, &config)?;

    let exact = decay_exact(problem.t_final());
    for (i, (y, e)) in result.y_final.iter().zip(&exact).enumerate() {
        println!(
            "y_{i}({}) = {y:.15}  error {:.3e}",
            problem.t_final(),
            (y - e).abs()
        );
    }
    let d = &result.diagnostics;
    println!(
        "order {order}, {nt} steps, {} workers, {} startup steps, {:?}",
        d.workers, d.startup_steps, d.wall_time
    );
    Ok(())
}

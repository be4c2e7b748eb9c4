//! 1-D Brusselator (method of lines, M interior points) with backward
//! Euler + Newton inside each level.
//!
//! cargo run --release --example brusselator -- [points] [order] [steps]

use ridc::problems::{brusselator_problem, BrusselatorConfig};
use ridc::{euler_reference_solve, ridc_solve, RidcConfig, StepKind, TimeGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let points: usize = args.next().map_or(Ok(200), |s| s.parse())?;
    let order: usize = args.next().map_or(Ok(4), |s| s.parse())?;
    let nt: usize = args.next().map_or(Ok(200), |s| s.parse())?;

    let (problem, stepper) = brusselator_problem(BrusselatorConfig::default().with_points(points))?;
    let grid = TimeGrid::for_problem(&problem, nt)?;

    let t = std::time::Instant::now();
    euler_reference_solve(&problem, &stepper, &grid)?;
    let euler_time = t.elapsed();

    let config = RidcConfig::new(order, nt, StepKind::Implicit).pipelined();
    let result = ridc_solve(&problem, &stepper, &grid, &config)?;
    let d = &result.diagnostics;

    let mid = points / 2;
    println!("u(x=1/2, t=1) = {:.12}", result.y_final[2 * mid]);
    println!("v(x=1/2, t=1) = {:.12}", result.y_final[2 * mid + 1]);
    println!("backward Euler: {euler_time:?}");
    println!("RIDC-{order} on {} workers: {:?}", d.workers, d.wall_time);
    for (level, busy) in d.busy_per_level.iter().enumerate() {
        println!("  level {level}: busy {busy:?}");
    }
    Ok(())
}

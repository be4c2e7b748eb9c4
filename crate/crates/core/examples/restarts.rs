//! Restarting every K steps trades accuracy for a shorter pipeline fill.

use ridc::problems::{decay_exact, decay_problem};
use ridc::{efficiency_ratio, ridc_solve, ForwardEuler, RidcConfig, StepKind, TimeGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = decay_problem();
    let euler = ForwardEuler::new(problem.system().clone());
    let nt = 400;
    let grid = TimeGrid::for_problem(&problem, nt)?;
    let exact = decay_exact(problem.t_final());

    println!(
        "{:>6} {:>9} {:>10} {:>12}",
        "K", "segments", "ratio", "error"
    );
    for k in [None, Some(200), Some(100), Some(50), Some(20), Some(10)] {
        let mut config = RidcConfig::new(4, nt, StepKind::Explicit);
        if let Some(k) = k {
            config = config.with_restarts(k);
        }
        let r = ridc_solve(&problem, &euler, &grid, &config)?;
        let err = r
            .y_final
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "{:>6} {:>9} {:>10.4} {:>12.3e}",
            k.map_or("-".to_string(), |k| k.to_string()),
            r.diagnostics.segments,
            k.map_or(1.0, |k| efficiency_ratio(4, k)),
            err
        );
    }
    Ok(())
}

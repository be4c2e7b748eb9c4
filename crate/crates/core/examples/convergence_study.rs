//! Error against step size for orders 1 to 4, written as CSV.
//!
//! cargo run --release --example convergence_study -- [problem] [fe|be] > conv.csv

use ridc::harness::{parse_mode, run_converge, ConvergeRequest};
use ridc::problems::ProblemId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let problem: ProblemId = args.next().as_deref().unwrap_or("decay").parse()?;
    let mode = parse_mode(args.next().as_deref().unwrap_or("fe"))?;

    let req = ConvergeRequest::new(problem, vec![1, 2, 3, 4], vec![25, 50, 100, 200, 400], mode);
    let report = run_converge(&req)?;
    report.write_csv(std::io::stdout().lock())?;
    for s in &report.series {
        eprintln!("{}", s.summary_line(problem, mode));
    }
    Ok(())
}

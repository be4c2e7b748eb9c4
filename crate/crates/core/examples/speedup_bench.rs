//! Walltime of the plain stepper, serial RIDC and pipelined RIDC.
//! Speedup needs one core per level and an expensive step.
//!
//! cargo run --release --example speedup_bench -- [points] [steps]

use ridc::harness::{run_bench, BenchRequest};
use ridc::problems::{ProblemId, SetupOptions};
use ridc::StepKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let points: usize = args.next().map_or(Ok(200), |s| s.parse())?;
    let nt: usize = args.next().map_or(Ok(200), |s| s.parse())?;

    let mut options = SetupOptions::default();
    options.brusselator = options.brusselator.with_points(points);
    let req = BenchRequest {
        problem: ProblemId::Brusselator,
        orders: vec![1, 2, 3, 4],
        nt,
        repeats: 3,
        mode: StepKind::Implicit,
        options,
    };
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    println!("{cores} cores available");
    for s in run_bench(&req)?.summaries {
        println!("{}", s.summary_line());
    }
    Ok(())
}

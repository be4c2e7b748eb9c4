use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ridc::harness::{
    self, format_real, parse_executor, parse_mode, write_records, BenchRequest, ConvergeRequest,
    HarnessError, SolveRequest,
};
use ridc::problems::{ProblemId, SetupOptions};

#[derive(Parser)]
#[command(
    name = "ridc",
    version,
    about = "RIDC solve, convergence and benchmark runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ProblemArgs {
    /// decay, stiff, brusselator or polynomial
    problem: String,
    /// fe (forward Euler) or be (backward Euler)
    #[arg(long, default_value = "fe")]
    mode: String,
    /// Stiffness of the stiff problem
    #[arg(long, default_value_t = -100.0, allow_hyphen_values = true)]
    lambda: f64,
    /// Interior grid points of the Brusselator
    #[arg(long, default_value_t = 200)]
    points: usize,
}

impl ProblemArgs {
    fn options(&self) -> SetupOptions {
        let mut opts = SetupOptions {
            lambda: self.lambda,
            ..SetupOptions::default()
        };
        opts.brusselator = opts.brusselator.with_points(self.points);
        opts
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve once and report the error at the final time
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// serial or pipelined
        #[arg(long, default_value = "pipelined")]
        executor: String,
        /// Restart interval K
        #[arg(long)]
        restart: Option<usize>,
        /// Worker thread cap (overrides RIDC_NUM_THREADS)
        #[arg(long)]
        threads: Option<usize>,
        /// CSV file for the run record (stdout if omitted)
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// CSV file for the final state
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Convergence study: error against dt for each order
    Converge {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        orders: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "25,50,100,200,400")]
        steps: Vec<usize>,
        #[arg(long, default_value = "pipelined")]
        executor: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Time the plain stepper against serial and pipelined RIDC
    Bench {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 400)]
        steps: usize,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<u8, HarnessError> {
    match cli.command {
        Command::Solve {
            problem,
            order,
            steps,
            executor,
            restart,
            threads,
            output,
            state,
        } => {
            let id: ProblemId = problem.problem.parse()?;
            let mut req = SolveRequest::new(id, order, steps, parse_mode(&problem.mode)?);
            req.executor = parse_executor(&executor)?;
            req.restart_interval = restart;
            req.max_workers = threads;
            req.options = problem.options();
            let out = harness::run_solve(&req)?;
            let mut w = open_output(output.as_deref())?;
            write_records(&mut w, std::slice::from_ref(&out.record))?;
            w.flush()?;
            if let Some(path) = state {
                let mut w = BufWriter::new(File::create(path)?);
                writeln!(w, "component,value")?;
                for (i, v) in out.result.y_final.iter().enumerate() {
                    writeln!(w, "{i},{}", format_real(*v))?;
                }
                w.flush()?;
            }
            let d = &out.result.diagnostics;
            let against = match out.reference.nt {
                None => "exact solution".to_string(),
                Some(nt) => format!("order-4 reference with {nt} steps"),
            };
            eprintln!("error_inf {:.6e} (vs {against})", out.record.error_inf);
            eprintln!(
                "walltime {:.3e}s, workers {}, segments {}, stencil slots {}, startup steps {}",
                out.record.walltime_s, d.workers, d.segments, d.stencil_slots, d.startup_steps
            );
            Ok(0)
        }
        Command::Converge {
            problem,
            orders,
            steps,
            executor,
            output,
        } => {
            let id: ProblemId = problem.problem.parse()?;
            let mut req = ConvergeRequest::new(id, orders, steps, parse_mode(&problem.mode)?);
            req.executor = parse_executor(&executor)?;
            req.options = problem.options();
            let report = harness::run_converge(&req)?;
            let mut w = open_output(output.as_deref())?;
            report.write_csv(&mut w)?;
            w.flush()?;
            for s in &report.series {
                eprintln!("{}", s.summary_line(report.problem, report.mode));
            }
            if let Some(reason) = &report.incomplete {
                eprintln!("incomplete: {reason}");
            }
            Ok(report.exit_code())
        }
        Command::Bench {
            problem,
            orders,
            steps,
            repeats,
            output,
        } => {
            let id: ProblemId = problem.problem.parse()?;
            let req = BenchRequest {
                problem: id,
                orders,
                nt: steps,
                repeats,
                mode: parse_mode(&problem.mode)?,
                options: problem.options(),
            };
            let report = harness::run_bench(&req)?;
            let mut w = open_output(output.as_deref())?;
            write_records(&mut w, &report.rows)?;
            w.flush()?;
            for s in &report.summaries {
                eprintln!("{}", s.summary_line());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("ridc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

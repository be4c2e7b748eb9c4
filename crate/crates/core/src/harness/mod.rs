//! Solve, convergence-study and benchmark workflows behind the `ridc`
//! binary. Each workflow returns [`RunRecord`]s that serialize to the
//! stable CSV schema in [`csv`].

pub mod csv;
pub mod fit;

use std::fmt;
use std::io;
use std::time::{Duration, Instant};

pub use self::csv::{format_real, incomplete_marker, write_records, RunRecord, HEADER};
pub use self::fit::{least_squares, loglog_fit, LineFit};

use crate::error::{ConfigError, RidcError};
use crate::ivp::{euler_reference_solve, StepKind, TimeGrid};
use crate::pipeline::{ridc_solve, Executor, RidcConfig, RidcResult};
use crate::problems::{ProblemId, ProblemSetup, SetupOptions};

/// Reference order for problems without a closed-form solution.
pub const REFERENCE_ORDER: usize = 4;
/// Reference runs use this many times the finest step count.
pub const REFERENCE_REFINEMENT: usize = 8;
/// Errors at or below `FLOOR_ULPS * eps * max(1, |y|)` count as round-off.
pub const FLOOR_ULPS: f64 = 64.0;

#[derive(Debug)]
pub enum HarnessError {
    Config(ConfigError),
    Run(RidcError),
    Io(io::Error),
}

impl HarnessError {
    /// 1 for bad configuration, 2 for failures during a run.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) | HarnessError::Run(RidcError::Config(_)) => 1,
            HarnessError::Run(_) | HarnessError::Io(_) => 2,
        }
    }
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Config(e) => write!(f, "configuration error: {e}"),
            HarnessError::Run(RidcError::Config(e)) => write!(f, "configuration error: {e}"),
            HarnessError::Run(e) => {
                write!(f, "run failed: {e}")?;
                let mut src = std::error::Error::source(e);
                while let Some(s) = src {
                    write!(f, ": {s}")?;
                    src = s.source();
                }
                Ok(())
            }
            HarnessError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<ConfigError> for HarnessError {
    fn from(e: ConfigError) -> Self {
        HarnessError::Config(e)
    }
}

impl From<RidcError> for HarnessError {
    fn from(e: RidcError) -> Self {
        HarnessError::Run(e)
    }
}

impl From<io::Error> for HarnessError {
    fn from(e: io::Error) -> Self {
        HarnessError::Io(e)
    }
}

pub fn mode_name(mode: StepKind) -> &'static str {
    match mode {
        StepKind::Explicit => "fe",
        StepKind::Implicit => "be",
    }
}

pub fn parse_mode(s: &str) -> Result<StepKind, ConfigError> {
    match s {
        "fe" => Ok(StepKind::Explicit),
        "be" => Ok(StepKind::Implicit),
        _ => Err(ConfigError::Invalid(format!(
            "unknown mode '{s}' (expected fe or be)"
        ))),
    }
}

pub fn executor_name(executor: Executor) -> &'static str {
    match executor {
        Executor::Serial => "serial",
        Executor::Pipelined => "pipelined",
    }
}

pub fn parse_executor(s: &str) -> Result<Executor, ConfigError> {
    match s {
        "serial" => Ok(Executor::Serial),
        "pipelined" => Ok(Executor::Pipelined),
        _ => Err(ConfigError::Invalid(format!(
            "unknown executor '{s}' (expected serial or pipelined)"
        ))),
    }
}

pub fn error_inf(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "state lengths differ");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// What a run's final state is compared against.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub state: Vec<f64>,
    /// `None` for closed-form solutions, otherwise the step count of the
    /// high-order reference run.
    pub nt: Option<usize>,
}

impl Reference {
    /// Closed-form value at `t_final`, or an order-4 implicit run with
    /// `nt` steps.
    pub fn for_problem(
        id: ProblemId,
        opts: &SetupOptions,
        nt: usize,
    ) -> Result<Self, HarnessError> {
        let setup = ProblemSetup::new(id, StepKind::Implicit, opts)?;
        if let Some(exact) = setup.exact {
            return Ok(Self {
                state: exact(setup.problem.t_final()),
                nt: None,
            });
        }
        let grid = TimeGrid::for_problem(&setup.problem, nt)?;
        let config = RidcConfig::new(REFERENCE_ORDER, nt, StepKind::Implicit).pipelined();
        let result = ridc_solve(&setup.problem, setup.stepper.as_ref(), &grid, &config)?;
        Ok(Self {
            state: result.y_final,
            nt: Some(nt),
        })
    }

    /// Error below which a run is indistinguishable from round-off.
    pub fn floor(&self) -> f64 {
        let scale = self.state.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        FLOOR_ULPS * f64::EPSILON * scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveRequest {
    pub problem: ProblemId,
    pub order: usize,
    pub nt: usize,
    pub mode: StepKind,
    pub executor: Executor,
    pub restart_interval: Option<usize>,
    pub max_workers: Option<usize>,
    pub options: SetupOptions,
}

impl SolveRequest {
    pub fn new(problem: ProblemId, order: usize, nt: usize, mode: StepKind) -> Self {
        Self {
            problem,
            order,
            nt,
            mode,
            executor: Executor::Pipelined,
            restart_interval: None,
            max_workers: None,
            options: SetupOptions::default(),
        }
    }

    pub fn config(&self) -> RidcConfig {
        let mut c = RidcConfig::new(self.order, self.nt, self.mode).with_executor(self.executor);
        c.restart_interval = self.restart_interval;
        c.max_workers = self.max_workers;
        c
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub record: RunRecord,
    pub result: RidcResult,
    pub reference: Reference,
}

fn record(
    id: ProblemId,
    order: usize,
    grid: &TimeGrid,
    mode: StepKind,
    executor: &str,
    error: f64,
    wall: Duration,
) -> RunRecord {
    RunRecord {
        problem: id.name().to_string(),
        order,
        nt: grid.nt(),
        dt: grid.dt(),
        mode: mode_name(mode).to_string(),
        executor: executor.to_string(),
        error_inf: error,
        walltime_s: wall.as_secs_f64(),
    }
}

fn solve_with(
    req: &SolveRequest,
    setup: &ProblemSetup,
    reference: &Reference,
) -> Result<(RunRecord, RidcResult), HarnessError> {
    let config = req.config();
    config.validate()?;
    let grid = TimeGrid::for_problem(&setup.problem, req.nt)?;
    let began = Instant::now();
    let result = ridc_solve(&setup.problem, setup.stepper.as_ref(), &grid, &config)?;
    let wall = began.elapsed();
    let err = error_inf(&result.y_final, &reference.state);
    let rec = record(
        req.problem,
        req.order,
        &grid,
        req.mode,
        executor_name(req.executor),
        err,
        wall,
    );
    Ok((rec, result))
}

/// One RIDC run, with its error against the exact solution or a
/// reference run at `REFERENCE_REFINEMENT` times the resolution.
pub fn run_solve(req: &SolveRequest) -> Result<SolveOutcome, HarnessError> {
    req.config().validate()?;
    let setup = ProblemSetup::new(req.problem, req.mode, &req.options)?;
    let reference =
        Reference::for_problem(req.problem, &req.options, req.nt * REFERENCE_REFINEMENT)?;
    let (record, result) = solve_with(req, &setup, &reference)?;
    Ok(SolveOutcome {
        record,
        result,
        reference,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeRequest {
    pub problem: ProblemId,
    pub orders: Vec<usize>,
    /// Step counts of every series, strictly increasing.
    pub nts: Vec<usize>,
    pub mode: StepKind,
    pub executor: Executor,
    pub options: SetupOptions,
}

impl ConvergeRequest {
    pub fn new(problem: ProblemId, orders: Vec<usize>, nts: Vec<usize>, mode: StepKind) -> Self {
        Self {
            problem,
            orders,
            nts,
            mode,
            executor: Executor::Pipelined,
            options: SetupOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.orders.is_empty() {
            return Err(ConfigError::Invalid("no orders given".into()));
        }
        if self.nts.len() < 3 {
            return Err(ConfigError::Invalid(format!(
                "a convergence series needs at least 3 step counts, got {}",
                self.nts.len()
            )));
        }
        if self.nts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::Invalid(
                "step counts must be strictly increasing".into(),
            ));
        }
        for &order in &self.orders {
            RidcConfig::new(order, self.nts[0], self.mode).validate()?;
        }
        Ok(())
    }
}

/// Fit of one order's series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSummary {
    pub order: usize,
    /// `None` when the series hit the round-off floor.
    pub fit: Option<LineFit>,
    pub floor_reached: bool,
}

impl SeriesSummary {
    pub fn summary_line(&self, problem: ProblemId, mode: StepKind) -> String {
        match self.fit {
            Some(fit) => format!(
                "{} {} order {}: slope {:.4} intercept {:.4}",
                problem,
                mode_name(mode),
                self.order,
                fit.slope,
                fit.intercept
            ),
            None if self.floor_reached => format!(
                "{} {} order {}: floor reached, slope not fitted",
                problem,
                mode_name(mode),
                self.order
            ),
            None => format!(
                "{} {} order {}: too few points to fit",
                problem,
                mode_name(mode),
                self.order
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub problem: ProblemId,
    pub mode: StepKind,
    pub rows: Vec<RunRecord>,
    pub series: Vec<SeriesSummary>,
    /// Why the study stopped early.
    pub incomplete: Option<String>,
    pub reference_nt: Option<usize>,
}

impl ConvergenceReport {
    pub fn series_for(&self, order: usize) -> Option<&SeriesSummary> {
        self.series.iter().find(|s| s.order == order)
    }

    pub fn slope(&self, order: usize) -> Option<f64> {
        self.series_for(order)?.fit.map(|f| f.slope)
    }

    pub fn exit_code(&self) -> u8 {
        if self.incomplete.is_some() {
            2
        } else {
            0
        }
    }

    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        write_records(&mut w, &self.rows)?;
        if let Some(reason) = &self.incomplete {
            writeln!(w, "{}", incomplete_marker(reason))?;
        }
        Ok(())
    }
}

fn summarize(order: usize, rows: &[RunRecord], floor: f64) -> SeriesSummary {
    let floor_reached = rows.iter().any(|r| !(r.error_inf > floor));
    let fit = if floor_reached {
        None
    } else {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.dt, r.error_inf)).collect();
        loglog_fit(&pts)
    };
    SeriesSummary {
        order,
        fit,
        floor_reached,
    }
}

/// Runs every `(order, nt)` pair and fits `log(error)` against `log(dt)`
/// per order. A failed run stops the study; the rows so far are kept and
/// the report is flagged incomplete.
pub fn run_converge(req: &ConvergeRequest) -> Result<ConvergenceReport, HarnessError> {
    req.validate()?;
    let setup = ProblemSetup::new(req.problem, req.mode, &req.options)?;
    let finest = *req.nts.last().expect("validated non-empty");
    let reference =
        Reference::for_problem(req.problem, &req.options, finest * REFERENCE_REFINEMENT)?;
    run_converge_with(req, &setup, &reference)
}

/// [`run_converge`] with a caller-supplied problem and reference.
pub fn run_converge_with(
    req: &ConvergeRequest,
    setup: &ProblemSetup,
    reference: &Reference,
) -> Result<ConvergenceReport, HarnessError> {
    req.validate()?;
    let floor = reference.floor();
    let mut report = ConvergenceReport {
        problem: req.problem,
        mode: req.mode,
        rows: Vec::new(),
        series: Vec::new(),
        incomplete: None,
        reference_nt: reference.nt,
    };
    for &order in &req.orders {
        let start = report.rows.len();
        for &nt in &req.nts {
            let solve = SolveRequest {
                problem: req.problem,
                order,
                nt,
                mode: req.mode,
                executor: req.executor,
                restart_interval: None,
                max_workers: None,
                options: req.options,
            };
            match solve_with(&solve, setup, reference) {
                Ok((rec, _)) => report.rows.push(rec),
                Err(e) => {
                    report.incomplete = Some(format!("order {order}, nt {nt}: {e}"));
                    return Ok(report);
                }
            }
        }
        report
            .series
            .push(summarize(order, &report.rows[start..], floor));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRequest {
    pub problem: ProblemId,
    pub orders: Vec<usize>,
    pub nt: usize,
    pub repeats: usize,
    pub mode: StepKind,
    pub options: SetupOptions,
}

impl BenchRequest {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.repeats < 3 {
            return Err(ConfigError::Invalid(format!(
                "benchmarks need at least 3 repeats, got {}",
                self.repeats
            )));
        }
        if self.orders.is_empty() {
            return Err(ConfigError::Invalid("no orders given".into()));
        }
        for &order in &self.orders {
            RidcConfig::new(order, self.nt, self.mode).validate()?;
        }
        Ok(())
    }
}

/// Median walltimes for one order.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub order: usize,
    pub workers: usize,
    pub euler_s: f64,
    pub serial_s: f64,
    pub pipelined_s: f64,
    /// `serial / pipelined / P`.
    pub parallel_efficiency: f64,
    /// Pipelined walltime relative to the plain stepper.
    pub euler_ratio: f64,
    /// Serial and pipelined final states agree bit for bit.
    pub identical: bool,
}

impl BenchSummary {
    pub fn summary_line(&self) -> String {
        format!(
            "order {} ({} workers): euler {:.3e}s serial {:.3e}s pipelined {:.3e}s efficiency {:.3} pipelined/euler {:.3}{}",
            self.order,
            self.workers,
            self.euler_s,
            self.serial_s,
            self.pipelined_s,
            self.parallel_efficiency,
            self.euler_ratio,
            if self.identical { "" } else { " RESULTS DIFFER" }
        )
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    /// Median-time row per configuration.
    pub rows: Vec<RunRecord>,
    pub summaries: Vec<BenchSummary>,
}

pub fn median(xs: &mut [f64]) -> f64 {
    assert!(!xs.is_empty());
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

fn timed<T>(
    repeats: usize,
    mut run: impl FnMut() -> Result<T, HarnessError>,
) -> Result<(T, f64), HarnessError> {
    let mut times = Vec::with_capacity(repeats);
    let mut last = None;
    for _ in 0..repeats {
        let began = Instant::now();
        let out = run()?;
        times.push(began.elapsed().as_secs_f64());
        last = Some(out);
    }
    Ok((last.expect("repeats >= 1"), median(&mut times)))
}

/// Times the plain stepper, serial RIDC and pipelined RIDC for each order.
pub fn run_bench(req: &BenchRequest) -> Result<BenchReport, HarnessError> {
    req.validate()?;
    let setup = ProblemSetup::new(req.problem, req.mode, &req.options)?;
    let reference =
        Reference::for_problem(req.problem, &req.options, req.nt * REFERENCE_REFINEMENT)?;
    let grid = TimeGrid::for_problem(&setup.problem, req.nt)?;
    let stepper = setup.stepper.as_ref();

    let (euler, euler_s) = timed(req.repeats, || {
        Ok(euler_reference_solve(&setup.problem, stepper, &grid)?)
    })?;
    let mut rows = vec![RunRecord {
        walltime_s: euler_s,
        ..record(
            req.problem,
            1,
            &grid,
            req.mode,
            "euler",
            error_inf(&euler, &reference.state),
            Duration::ZERO,
        )
    }];
    let mut summaries = Vec::new();
    for &order in &req.orders {
        let serial_cfg = RidcConfig::new(order, req.nt, req.mode);
        let pipe_cfg = serial_cfg.clone().pipelined();
        let (serial, serial_s) = timed(req.repeats, || {
            Ok(ridc_solve(&setup.problem, stepper, &grid, &serial_cfg)?)
        })?;
        let (pipe, pipelined_s) = timed(req.repeats, || {
            Ok(ridc_solve(&setup.problem, stepper, &grid, &pipe_cfg)?)
        })?;
        for (res, exec, wall) in [
            (&serial, "serial", serial_s),
            (&pipe, "pipelined", pipelined_s),
        ] {
            rows.push(RunRecord {
                walltime_s: wall,
                ..record(
                    req.problem,
                    order,
                    &grid,
                    req.mode,
                    exec,
                    error_inf(&res.y_final, &reference.state),
                    Duration::ZERO,
                )
            });
        }
        summaries.push(BenchSummary {
            order,
            workers: pipe.diagnostics.workers,
            euler_s,
            serial_s,
            pipelined_s,
            parallel_efficiency: serial_s / pipelined_s / order as f64,
            euler_ratio: pipelined_s / euler_s,
            identical: serial
                .y_final
                .iter()
                .zip(&pipe.y_final)
                .all(|(a, b)| a.to_bits() == b.to_bits()),
        });
    }
    Ok(BenchReport { rows, summaries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for m in [StepKind::Explicit, StepKind::Implicit] {
            assert_eq!(parse_mode(mode_name(m)).unwrap(), m);
        }
        for e in [Executor::Serial, Executor::Pipelined] {
            assert_eq!(parse_executor(executor_name(e)).unwrap(), e);
        }
        assert!(parse_mode("rk4").is_err());
        assert!(parse_executor("gpu").is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn solve_decay_order_four() {
        let out = run_solve(&SolveRequest::new(
            ProblemId::Decay,
            4,
            100,
            StepKind::Explicit,
        ))
        .unwrap();
        assert!(out.record.error_inf < 1e-8, "{}", out.record.error_inf);
        assert!(out.record.error_inf > 0.0);
        assert_eq!(out.reference.nt, None);
    }

    #[test]
    fn solve_rejects_order_zero() {
        let err = run_solve(&SolveRequest::new(
            ProblemId::Decay,
            0,
            100,
            StepKind::Explicit,
        ))
        .unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn converge_validation() {
        let mut req =
            ConvergeRequest::new(ProblemId::Decay, vec![2], vec![10, 20], StepKind::Explicit);
        assert!(run_converge(&req).is_err());
        req.nts = vec![10, 40, 20];
        assert!(run_converge(&req).is_err());
        req.nts = vec![10, 20, 40];
        req.orders.clear();
        assert!(run_converge(&req).is_err());
    }

    #[test]
    fn converge_euler_slope() {
        let req = ConvergeRequest::new(
            ProblemId::Decay,
            vec![1, 2],
            vec![25, 50, 100, 200],
            StepKind::Explicit,
        );
        let report = run_converge(&req).unwrap();
        assert_eq!(report.rows.len(), 8);
        assert!((report.slope(1).unwrap() - 1.0).abs() < 0.25);
        assert!((report.slope(2).unwrap() - 2.0).abs() < 0.3);
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn converge_floor_flag() {
        let req = ConvergeRequest::new(
            ProblemId::Polynomial,
            vec![1, 3],
            vec![10, 20, 40],
            StepKind::Explicit,
        );
        let report = run_converge(&req).unwrap();
        let euler = report.series_for(1).unwrap();
        assert!(!euler.floor_reached);
        assert!((euler.fit.unwrap().slope - 1.0).abs() < 1e-6);
        let third = report.series_for(3).unwrap();
        assert!(third.floor_reached);
        assert!(third.fit.is_none());
        assert!(third
            .summary_line(ProblemId::Polynomial, StepKind::Explicit)
            .contains("floor reached"));
    }

    #[test]
    fn converge_failure_is_partial() {
        use crate::ivp::FnStepper;
        let mut setup = ProblemSetup::with_defaults(ProblemId::Decay, StepKind::Explicit).unwrap();
        // Order 1 takes 70 steps in total; order 2 fails during its second run.
        let calls = std::sync::atomic::AtomicUsize::new(0);
        setup.stepper = Box::new(FnStepper::new(
            StepKind::Explicit,
            move |_, _dt: f64, v: &[f64], out: &mut [f64]| {
                if calls.fetch_add(1, std::sync::atomic::Ordering::Relaxed) >= 100 {
                    return Err("step budget exhausted".into());
                }
                out.copy_from_slice(v);
                Ok(())
            },
        ));
        let reference = Reference {
            state: vec![1.0, 1.0],
            nt: None,
        };
        let req = ConvergeRequest::new(
            ProblemId::Decay,
            vec![1, 2],
            vec![10, 20, 40],
            StepKind::Explicit,
        );
        let report = run_converge_with(&req, &setup, &reference).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.series.len(), 1);
        assert_eq!(report.exit_code(), 2);
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().last().unwrap().starts_with("# incomplete"));
        assert!(text.contains("step budget exhausted"));
    }

    #[test]
    fn bench_small() {
        let req = BenchRequest {
            problem: ProblemId::Decay,
            orders: vec![1, 3],
            nt: 60,
            repeats: 3,
            mode: StepKind::Explicit,
            options: SetupOptions::default(),
        };
        let report = run_bench(&req).unwrap();
        assert_eq!(report.rows.len(), 5);
        assert_eq!(report.rows[0].executor, "euler");
        assert!(report.summaries.iter().all(|s| s.identical));
        // Order 1 RIDC is the plain stepper.
        assert_eq!(report.rows[1].error_inf, report.rows[0].error_inf);
        let bad = BenchRequest { repeats: 2, ..req };
        assert_eq!(run_bench(&bad).unwrap_err().exit_code(), 1);
    }
}

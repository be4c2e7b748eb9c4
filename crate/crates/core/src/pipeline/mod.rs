//! The RIDC driver.
//!
//! Level 0 runs the user stepper on the original problem. Level `p + 1`
//! solves the error equation built from level `p`'s stored right-hand side
//! values, lagging one node behind it. With `P` levels the result is
//! `P`th-order accurate, and with one worker per level all levels march
//! concurrently.
//!
//! ```
//! use ridc::{ridc_solve, IvpProblem, ForwardEuler, RidcConfig, StepKind, TimeGrid};
//!
//! let problem = IvpProblem::from_fn(0.0, 1.0, vec![1.0], |_, y, dy| dy[0] = -y[0]).unwrap();
//! let stepper = ForwardEuler::new(problem.system().clone());
//! let grid = TimeGrid::for_problem(&problem, 50).unwrap();
//! let result = ridc_solve(&problem, &stepper, &grid, &RidcConfig::new(4, 50, StepKind::Explicit)).unwrap();
//! assert!((result.y_final[0] - (-1.0f64).exp()).abs() < 1e-8);
//! ```

mod executor;
mod schedule;
mod stencil;

use std::time::{Duration, Instant};

pub use schedule::{startup_schedule, startup_steps, StartupSchedule};

use crate::error::{ConfigError, RidcError};
use crate::ivp::{IvpProblem, StepKind, Stepper, TimeGrid};
use executor::{run_pipelined, run_serial, SegmentInput};

/// Highest supported order. Beyond this the moment systems behind the
/// quadrature weights become too ill-conditioned.
pub const MAX_ORDER: usize = 12;

/// Environment variable capping the number of pipelined worker threads.
pub const WORKERS_ENV: &str = "RIDC_NUM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Executor {
    /// All levels on the calling thread.
    Serial,
    /// One worker thread per level (capped by [`WORKERS_ENV`] or
    /// [`RidcConfig::max_workers`]).
    Pipelined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidcConfig {
    pub order: usize,
    pub nt: usize,
    /// Restart from the top level's solution every `K` steps.
    pub restart_interval: Option<usize>,
    pub executor: Executor,
    pub mode: StepKind,
    /// Worker cap for [`Executor::Pipelined`]; overrides the environment.
    pub max_workers: Option<usize>,
    /// Keep the top level's state at every node in [`RidcResult::trajectory`].
    pub record_trajectory: bool,
}

impl RidcConfig {
    pub fn new(order: usize, nt: usize, mode: StepKind) -> Self {
        Self {
            order,
            nt,
            restart_interval: None,
            executor: Executor::Serial,
            mode,
            max_workers: None,
            record_trajectory: false,
        }
    }

    pub fn pipelined(mut self) -> Self {
        self.executor = Executor::Pipelined;
        self
    }

    pub fn with_executor(mut self, executor: Executor) -> Self {
        self.executor = executor;
        self
    }

    pub fn with_restarts(mut self, interval: usize) -> Self {
        self.restart_interval = Some(interval);
        self
    }

    pub fn with_max_workers(mut self, workers: usize) -> Self {
        self.max_workers = Some(workers);
        self
    }

    pub fn recording_trajectory(mut self) -> Self {
        self.record_trajectory = true;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=MAX_ORDER).contains(&self.order) {
            return Err(ConfigError::OrderOutOfRange(self.order));
        }
        if self.nt == 0 {
            return Err(ConfigError::NoSteps);
        }
        let required = startup_steps(self.order);
        if self.nt < required {
            return Err(ConfigError::TooFewSteps {
                order: self.order,
                nt: self.nt,
                required,
            });
        }
        if let Some(k) = self.restart_interval {
            if k == 0 || k < required {
                return Err(ConfigError::RestartTooShort {
                    order: self.order,
                    interval: k,
                    required: required.max(1),
                });
            }
        }
        if self.max_workers == Some(0) {
            return Err(ConfigError::Invalid("max_workers must be positive".into()));
        }
        Ok(())
    }

    /// Worker threads a pipelined run will use.
    pub fn worker_count(&self) -> usize {
        let env_cap = std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&w| w > 0);
        let cap = self.max_workers.or(env_cap).unwrap_or(self.order);
        cap.clamp(1, self.order)
    }

    /// `(start node, length)` of each restart segment. A trailing remainder
    /// too short for the startup schedule is folded into the last full
    /// segment.
    pub fn segments(&self) -> Vec<(usize, usize)> {
        let k = match self.restart_interval {
            None => return vec![(0, self.nt)],
            Some(k) => k.min(self.nt),
        };
        let mut segs: Vec<(usize, usize)> = (0..self.nt / k).map(|i| (i * k, k)).collect();
        let rem = self.nt % k;
        if rem > 0 {
            match segs.last_mut() {
                Some(last) if rem < startup_steps(self.order) => last.1 += rem,
                _ => segs.push((self.nt - rem, rem)),
            }
        }
        segs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub startup_steps: usize,
    pub steps_per_level: Vec<usize>,
    /// Time each level spent computing (excluding waits).
    pub busy_per_level: Vec<Duration>,
    pub wall_time: Duration,
    /// `1 + (P-1)^2 / K` when restarts are enabled.
    pub efficiency_ratio: Option<f64>,
    /// Solution/right-hand-side vectors held by the stencil.
    pub stencil_slots: usize,
    /// Largest number of stencil vectors simultaneously live.
    pub peak_live_slots: usize,
    pub segments: usize,
    pub workers: usize,
    pub cross_level_reads: u64,
    /// Reads that found a slot not yet written for the requested node.
    /// Always zero unless the pipeline is broken.
    pub stale_reads: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidcResult {
    /// Highest-level solution at `t_final`.
    pub y_final: Vec<f64>,
    /// Final state of every level, prediction first.
    pub level_finals: Vec<Vec<f64>>,
    /// Top-level state at every node when requested.
    pub trajectory: Option<Vec<Vec<f64>>>,
    pub diagnostics: Diagnostics,
}

/// `1 + (P-1)^2 / K`: steps taken by `P`th-order RIDC with restarts every
/// `K` steps relative to the plain stepper.
pub fn efficiency_ratio(order: usize, restart_interval: usize) -> f64 {
    assert!(order >= 1 && restart_interval >= 1);
    let lag = (order - 1) as f64;
    1.0 + lag * lag / restart_interval as f64
}

/// Integrates `problem` to its final time with `config.order` levels.
pub fn ridc_solve(
    problem: &IvpProblem,
    stepper: &dyn Stepper,
    grid: &TimeGrid,
    config: &RidcConfig,
) -> Result<RidcResult, RidcError> {
    config.validate()?;
    if stepper.kind() != config.mode {
        return Err(ConfigError::ModeMismatch {
            configured: config.mode,
            stepper: stepper.kind(),
        }
        .into());
    }
    if grid.nt() != config.nt {
        return Err(ConfigError::Invalid(format!(
            "grid has {} steps, configuration {}",
            grid.nt(),
            config.nt
        ))
        .into());
    }
    if grid.t0() != problem.t0() || grid.t_final() != problem.t_final() {
        return Err(ConfigError::GridMismatch {
            t0: problem.t0(),
            t_final: problem.t_final(),
            grid_t0: grid.t0(),
            grid_t_final: grid.t_final(),
        }
        .into());
    }

    let began = Instant::now();
    let order = config.order;
    let workers = match config.executor {
        Executor::Serial => 1,
        Executor::Pipelined => config.worker_count(),
    };
    let segments = config.segments();
    let mut y = problem.y0().to_vec();
    let mut trajectory = config.record_trajectory.then(|| vec![y.clone()]);
    let mut steps = vec![0; order];
    let mut busy = vec![Duration::ZERO; order];
    let mut finals = Vec::new();
    let (mut slots, mut peak, mut reads, mut stale) = (0, 0, 0, 0);

    for &(start, len) in &segments {
        let input = SegmentInput {
            problem,
            stepper,
            grid,
            order,
            start,
            len,
            y_start: &y,
            record_trajectory: config.record_trajectory,
        };
        let out = match config.executor {
            Executor::Serial => run_serial(&input)?,
            Executor::Pipelined => run_pipelined(&input, workers)?,
        };
        for l in 0..order {
            steps[l] += out.steps[l];
            busy[l] += out.busy[l];
        }
        if let Some(traj) = trajectory.as_mut() {
            traj.extend(out.trajectory.into_iter().skip(1));
        }
        slots = out.slot_count;
        peak = peak.max(out.peak_live);
        reads += out.reads;
        stale += out.stale_reads;
        y = out.finals[order - 1].clone();
        finals = out.finals;
    }

    Ok(RidcResult {
        y_final: y,
        level_finals: finals,
        trajectory,
        diagnostics: Diagnostics {
            startup_steps: startup_steps(order),
            steps_per_level: steps,
            busy_per_level: busy,
            wall_time: began.elapsed(),
            efficiency_ratio: config.restart_interval.map(|k| efficiency_ratio(order, k)),
            stencil_slots: slots,
            peak_live_slots: peak,
            segments: segments.len(),
            workers,
            cross_level_reads: reads,
            stale_reads: stale,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivp::{euler_reference_solve, FnStepper, ForwardEuler};

    fn decay() -> IvpProblem {
        IvpProblem::from_fn(0.0, 1.0, vec![1.0], |_, y, d| d[0] = -y[0]).unwrap()
    }

    #[test]
    fn efficiency_values() {
        assert_eq!(efficiency_ratio(1, 7), 1.0);
        assert!((efficiency_ratio(4, 100) - 1.09).abs() < 1e-15);
        assert_eq!(efficiency_ratio(4, 9), 2.0);
    }

    #[test]
    fn config_validation() {
        let c = RidcConfig::new(0, 10, StepKind::Explicit);
        assert_eq!(c.validate(), Err(ConfigError::OrderOutOfRange(0)));
        let c = RidcConfig::new(13, 100, StepKind::Explicit);
        assert!(c.validate().is_err());
        let c = RidcConfig::new(4, 7, StepKind::Explicit);
        assert!(matches!(
            c.validate(),
            Err(ConfigError::TooFewSteps { required: 8, .. })
        ));
        assert!(RidcConfig::new(4, 8, StepKind::Explicit).validate().is_ok());
        let c = RidcConfig::new(4, 50, StepKind::Explicit).with_restarts(5);
        assert!(matches!(
            c.validate(),
            Err(ConfigError::RestartTooShort { .. })
        ));
        let c = RidcConfig::new(1, 50, StepKind::Explicit).with_restarts(0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn segments_fold_short_tail() {
        let c = RidcConfig::new(4, 100, StepKind::Explicit);
        assert_eq!(c.segments(), vec![(0, 100)]);
        // Startup needs 8 steps: a 4-step tail is folded in.
        let c = c.with_restarts(32);
        assert_eq!(c.segments(), vec![(0, 32), (32, 32), (64, 36)]);
        let c = RidcConfig::new(4, 100, StepKind::Explicit).with_restarts(45);
        assert_eq!(c.segments(), vec![(0, 45), (45, 45), (90, 10)]);
        let c = RidcConfig::new(2, 10, StepKind::Explicit).with_restarts(20);
        assert_eq!(c.segments(), vec![(0, 10)]);
    }

    #[test]
    fn mode_mismatch_rejected() {
        let p = decay();
        let s = ForwardEuler::new(p.system().clone());
        let g = TimeGrid::for_problem(&p, 10).unwrap();
        let err = ridc_solve(&p, &s, &g, &RidcConfig::new(2, 10, StepKind::Implicit)).unwrap_err();
        assert!(matches!(
            err,
            RidcError::Config(ConfigError::ModeMismatch { .. })
        ));
        let err = ridc_solve(&p, &s, &g, &RidcConfig::new(2, 11, StepKind::Explicit)).unwrap_err();
        assert!(matches!(err, RidcError::Config(_)));
    }

    #[test]
    fn order_one_is_the_reference_solve() {
        let p = decay();
        let s = ForwardEuler::new(p.system().clone());
        let g = TimeGrid::for_problem(&p, 37).unwrap();
        let reference = euler_reference_solve(&p, &s, &g).unwrap();
        for exec in [Executor::Serial, Executor::Pipelined] {
            let r = ridc_solve(
                &p,
                &s,
                &g,
                &RidcConfig::new(1, 37, StepKind::Explicit).with_executor(exec),
            )
            .unwrap();
            assert_eq!(r.y_final, reference);
        }
    }

    #[test]
    fn lags_and_steps() {
        let p = decay();
        let s = ForwardEuler::new(p.system().clone());
        let g = TimeGrid::for_problem(&p, 40).unwrap();
        let r = ridc_solve(&p, &s, &g, &RidcConfig::new(5, 40, StepKind::Explicit)).unwrap();
        assert_eq!(r.diagnostics.steps_per_level, vec![40; 5]);
        assert_eq!(r.diagnostics.stencil_slots, 15);
        assert_eq!(r.diagnostics.peak_live_slots, 15);
        assert_eq!(r.diagnostics.stale_reads, 0);
        assert!(r.diagnostics.cross_level_reads > 0);
        assert_eq!(r.level_finals.len(), 5);
        assert_eq!(r.level_finals[4], r.y_final);
    }

    #[test]
    fn single_segment_restart_is_plain_run() {
        let p = decay();
        let s = ForwardEuler::new(p.system().clone());
        let g = TimeGrid::for_problem(&p, 30).unwrap();
        let a = ridc_solve(&p, &s, &g, &RidcConfig::new(3, 30, StepKind::Explicit)).unwrap();
        let b = ridc_solve(
            &p,
            &s,
            &g,
            &RidcConfig::new(3, 30, StepKind::Explicit).with_restarts(30),
        )
        .unwrap();
        assert_eq!(a.y_final, b.y_final);
        assert_eq!(b.diagnostics.segments, 1);
        assert_eq!(b.diagnostics.efficiency_ratio, Some(1.0 + 4.0 / 30.0));
    }

    #[test]
    fn restarts_stay_accurate() {
        let p = decay();
        let s = ForwardEuler::new(p.system().clone());
        let g = TimeGrid::for_problem(&p, 60).unwrap();
        for exec in [Executor::Serial, Executor::Pipelined] {
            let cfg = RidcConfig::new(3, 60, StepKind::Explicit)
                .with_restarts(20)
                .with_executor(exec)
                .recording_trajectory();
            let r = ridc_solve(&p, &s, &g, &cfg).unwrap();
            assert_eq!(r.diagnostics.segments, 3);
            assert!((r.y_final[0] - (-1.0f64).exp()).abs() < 1e-5);
            let traj = r.trajectory.unwrap();
            assert_eq!(traj.len(), 61);
            assert_eq!(traj[60], r.y_final);
            for (n, y) in traj.iter().enumerate() {
                assert!((y[0] - (-g.node(n)).exp()).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn stepper_failure_carries_location() {
        let p = decay();
        let g = TimeGrid::for_problem(&p, 20).unwrap();
        let s = FnStepper::new(StepKind::Explicit, |t, dt, v: &[f64], o: &mut [f64]| {
            if t >= 0.5 - 1e-12 {
                return Err("refused".into());
            }
            o[0] = v[0] - dt * v[0];
            Ok(())
        });
        for exec in [Executor::Serial, Executor::Pipelined] {
            let err = ridc_solve(
                &p,
                &s,
                &g,
                &RidcConfig::new(3, 20, StepKind::Explicit).with_executor(exec),
            )
            .unwrap_err();
            assert_eq!(err.location(), Some((0, 10)), "{err}");
        }
    }

    #[test]
    fn worker_cap() {
        let c = RidcConfig::new(4, 10, StepKind::Explicit).with_max_workers(2);
        assert_eq!(c.worker_count(), 2);
        let c = RidcConfig::new(2, 10, StepKind::Explicit).with_max_workers(9);
        assert_eq!(c.worker_count(), 2);
    }
}

//! Serial and pipelined executors for one restart segment.
//!
//! Both executors drive the same [`LevelWorker::compute`] and
//! [`LevelWorker::publish`] calls on the same [`Stencil`]; only the order
//! in which levels are visited differs. Every level therefore performs an
//! identical sequence of floating-point operations regardless of the
//! executor, which is what makes the results bitwise reproducible.

use std::thread;
use std::time::{Duration, Instant};

use super::schedule::StartupSchedule;
use super::stencil::{Stencil, WindowSpec};
use crate::corrector::{correct_step, predict_step, LevelStencil};
use crate::error::RidcError;
use crate::ivp::{IvpProblem, StepKind, Stepper, TimeGrid};
use crate::quadrature::{integration_matrix, IntegrationMatrix};

pub(crate) struct SegmentInput<'a> {
    pub problem: &'a IvpProblem,
    pub stepper: &'a dyn Stepper,
    pub grid: &'a TimeGrid,
    pub order: usize,
    /// Absolute node index the segment starts from.
    pub start: usize,
    /// Steps in this segment.
    pub len: usize,
    pub y_start: &'a [f64],
    pub record_trajectory: bool,
}

pub(crate) struct SegmentOutput {
    pub finals: Vec<Vec<f64>>,
    pub steps: Vec<usize>,
    pub busy: Vec<Duration>,
    pub trajectory: Vec<Vec<f64>>,
    pub slot_count: usize,
    pub peak_live: usize,
    pub reads: u64,
    pub stale_reads: u64,
}

pub(crate) struct LevelWorker<'a> {
    level: usize,
    ctx: &'a SegmentInput<'a>,
    matrix: Option<std::sync::Arc<IntegrationMatrix>>,
    kind: StepKind,
    /// Local node index.
    node: usize,
    u: Vec<f64>,
    next: Vec<f64>,
    f_next: Vec<f64>,
    scratch: Vec<f64>,
    pending: bool,
    steps: usize,
    busy: Duration,
    trajectory: Vec<Vec<f64>>,
}

pub(crate) enum Progress {
    Advanced,
    Blocked,
    Done,
}

impl<'a> LevelWorker<'a> {
    fn new(level: usize, ctx: &'a SegmentInput<'a>) -> Self {
        let n = ctx.y_start.len();
        let matrix = (level > 0).then(|| integration_matrix(level - 1, ctx.grid.dt()));
        let trajectory = if ctx.record_trajectory && level + 1 == ctx.order {
            vec![ctx.y_start.to_vec()]
        } else {
            Vec::new()
        };
        Self {
            level,
            ctx,
            matrix,
            kind: ctx.stepper.kind(),
            node: 0,
            u: ctx.y_start.to_vec(),
            next: vec![0.0; n],
            f_next: vec![0.0; n],
            scratch: vec![0.0; n],
            pending: false,
            steps: 0,
            busy: Duration::ZERO,
            trajectory,
        }
    }

    fn done(&self) -> bool {
        self.node == self.ctx.len && !self.pending
    }

    /// Publishes `f(t_start, y_start)` as node 0 of this level's ring.
    fn seed(&mut self, stencil: &Stencil) {
        if stencil.has_consumer(self.level) {
            let t = self.ctx.grid.node(self.ctx.start);
            self.ctx.problem.eval_rhs_into(t, &self.u, &mut self.f_next);
            stencil.publish(self.level, 0, &self.f_next);
        }
    }

    fn can_compute(&self, stencil: &Stencil) -> bool {
        !self.pending && self.node < self.ctx.len && stencil.input_ready(self.level, self.node)
    }

    fn can_publish(&self, stencil: &Stencil) -> bool {
        self.pending && stencil.can_publish(self.level, self.node)
    }

    /// Advances this level from `node` to `node + 1`.
    fn compute(&mut self, stencil: &Stencil) -> Result<(), RidcError> {
        let began = Instant::now();
        let n = self.node;
        let grid = self.ctx.grid;
        let t_n = grid.node(self.ctx.start + n);
        let dt = grid.dt();
        let result = match &self.matrix {
            None => predict_step(self.ctx.stepper, t_n, dt, &self.u, &mut self.next),
            Some(matrix) => {
                let spec = WindowSpec::for_step(self.level, n);
                let guards = stencil.read_window(self.level, &spec);
                let window: Vec<&[f64]> = guards.iter().map(|g| g.data.as_slice()).collect();
                let ls = LevelStencil {
                    level: self.level,
                    window: &window,
                    u_current: &self.u,
                    anchor: spec.anchor(n, self.kind),
                };
                correct_step(
                    self.ctx.stepper,
                    &ls,
                    matrix,
                    spec.regime,
                    t_n,
                    dt,
                    &mut self.next,
                    &mut self.scratch,
                )
            }
        };
        result.map_err(|source| RidcError::Step {
            level: self.level,
            step: self.ctx.start + n,
            source,
        })?;
        if stencil.has_consumer(self.level) {
            let t_next = grid.node(self.ctx.start + n + 1);
            self.ctx
                .problem
                .eval_rhs_into(t_next, &self.next, &mut self.f_next);
            self.pending = true;
        }
        std::mem::swap(&mut self.u, &mut self.next);
        self.node = n + 1;
        self.steps += 1;
        if self.ctx.record_trajectory && !stencil.has_consumer(self.level) {
            self.trajectory.push(self.u.clone());
        }
        self.busy += began.elapsed();
        stencil.set_position(self.level, self.node);
        Ok(())
    }

    fn publish(&mut self, stencil: &Stencil) {
        stencil.publish(self.level, self.node, &self.f_next);
        self.pending = false;
    }

    fn try_progress(&mut self, stencil: &Stencil) -> Result<Progress, RidcError> {
        if self.pending {
            if self.can_publish(stencil) {
                self.publish(stencil);
                return Ok(Progress::Advanced);
            }
            return Ok(Progress::Blocked);
        }
        if self.node == self.ctx.len {
            return Ok(Progress::Done);
        }
        if !self.can_compute(stencil) {
            return Ok(Progress::Blocked);
        }
        self.compute(stencil)?;
        if self.can_publish(stencil) {
            self.publish(stencil);
        }
        Ok(Progress::Advanced)
    }

    /// Full step for the serial executor; the schedule guarantees that the
    /// inputs are ready and the output slot is free.
    fn step_in_order(&mut self, stencil: &Stencil) -> Result<(), RidcError> {
        assert!(
            self.can_compute(stencil),
            "schedule advanced level {} from node {} before its inputs were ready",
            self.level,
            self.node
        );
        self.compute(stencil)?;
        if self.pending {
            assert!(
                self.can_publish(stencil),
                "schedule would overwrite a live slot of level {}",
                self.level
            );
            self.publish(stencil);
        }
        Ok(())
    }
}

fn collect(workers: Vec<LevelWorker<'_>>, stencil: &Stencil) -> SegmentOutput {
    let mut out = SegmentOutput {
        finals: Vec::with_capacity(workers.len()),
        steps: Vec::with_capacity(workers.len()),
        busy: Vec::with_capacity(workers.len()),
        trajectory: Vec::new(),
        slot_count: stencil.slot_count(),
        peak_live: stencil.peak_live(),
        reads: stencil.reads(),
        stale_reads: stencil.stale_reads(),
    };
    for w in workers {
        out.finals.push(w.u);
        out.steps.push(w.steps);
        out.busy.push(w.busy);
        if !w.trajectory.is_empty() {
            out.trajectory = w.trajectory;
        }
    }
    out
}

fn seeded<'a>(ctx: &'a SegmentInput<'a>, stencil: &Stencil) -> Vec<LevelWorker<'a>> {
    (0..ctx.order)
        .map(|l| {
            let mut w = LevelWorker::new(l, ctx);
            w.seed(stencil);
            w
        })
        .collect()
}

/// Single thread: startup schedule, then lockstep marching with levels
/// visited from the top down so consumers finish before producers overwrite.
pub(crate) fn run_serial(ctx: &SegmentInput<'_>) -> Result<SegmentOutput, RidcError> {
    let stencil = Stencil::new(ctx.order, ctx.y_start.len());
    let mut workers = seeded(ctx, &stencil);
    let schedule = StartupSchedule::new(ctx.order);
    for step in schedule.steps() {
        for &l in step.iter().rev() {
            if workers[l].node < ctx.len {
                workers[l].step_in_order(&stencil)?;
            }
        }
    }
    loop {
        let mut any = false;
        for w in workers.iter_mut().rev() {
            if w.node < ctx.len {
                w.step_in_order(&stencil)?;
                any = true;
            }
        }
        if !any {
            break;
        }
    }
    Ok(collect(workers, &stencil))
}

/// Sets the abort flag if a worker unwinds, so its peers stop waiting.
struct AbortOnPanic<'a>(&'a Stencil);

impl Drop for AbortOnPanic<'_> {
    fn drop(&mut self) {
        if thread::panicking() {
            self.0.abort();
        }
    }
}

/// One thread per group of levels. Each thread repeatedly advances whichever
/// of its levels has its inputs ready and parks when none can move.
pub(crate) fn run_pipelined(
    ctx: &SegmentInput<'_>,
    workers_wanted: usize,
) -> Result<SegmentOutput, RidcError> {
    let stencil = Stencil::new(ctx.order, ctx.y_start.len());
    let workers = seeded(ctx, &stencil);
    let threads = workers_wanted.clamp(1, ctx.order);
    let cores = thread::available_parallelism().map_or(1, |n| n.get());
    let spin = if cores >= threads { 2_000 } else { 0 };

    let mut groups: Vec<Vec<LevelWorker<'_>>> = (0..threads).map(|_| Vec::new()).collect();
    let per = ctx.order.div_ceil(threads);
    for w in workers {
        let g = w.level / per;
        groups[g].push(w);
    }

    let stencil_ref = &stencil;
    let results: Vec<(Vec<LevelWorker<'_>>, Option<RidcError>, Option<usize>)> =
        thread::scope(|scope| {
            let handles: Vec<_> = groups
                .into_iter()
                .map(|mut group| {
                    let first_level = group.first().map_or(0, |w| w.level);
                    let handle = scope.spawn(move || {
                        let _guard = AbortOnPanic(stencil_ref);
                        let err = drive_group(&mut group, stencil_ref, spin).err();
                        if err.is_some() {
                            stencil_ref.abort();
                        }
                        (group, err)
                    });
                    (first_level, handle)
                })
                .collect();
            handles
                .into_iter()
                .map(|(level, h)| match h.join() {
                    Ok((group, err)) => (group, err, None),
                    Err(_) => (Vec::new(), None, Some(level)),
                })
                .collect()
        });

    let mut errors = Vec::new();
    let mut workers = Vec::new();
    for (group, err, panicked) in results {
        workers.extend(group);
        errors.extend(err);
        if let Some(level) = panicked {
            errors.push(RidcError::WorkerPanic { level });
        }
    }
    if let Some(first) = errors.into_iter().min_by_key(|e| e.location()) {
        return Err(first);
    }
    workers.sort_by_key(|w| w.level);
    Ok(collect(workers, &stencil))
}

fn drive_group(
    group: &mut [LevelWorker<'_>],
    stencil: &Stencil,
    spin: usize,
) -> Result<(), RidcError> {
    loop {
        if stencil.aborted() {
            return Ok(());
        }
        let seen = stencil.generation();
        let mut progressed = false;
        let mut all_done = true;
        // Top-down so a multiplexed consumer frees slots before its producer
        // tries to publish.
        for w in group.iter_mut().rev() {
            match w.try_progress(stencil)? {
                Progress::Advanced => progressed = true,
                Progress::Blocked => all_done = false,
                Progress::Done => {}
            }
        }
        if group.iter().all(|w| w.done()) && all_done {
            return Ok(());
        }
        if !progressed {
            stencil.wait(seen, spin);
        }
    }
}

//! Stall-aware startup schedule.
//!
//! Before all levels can march together with a one-node lag, the stencil
//! has to be filled. Lower levels are held back while a newly started
//! corrector catches up, so no ring ever stores more than its steady-state
//! share of nodes. For each new level `p = 1..P`:
//!
//! 1. advance levels `0..p` together for one step,
//! 2. advance level `p` alone for `p - 1` steps,
//! 3. advance levels `0..=p` together for one step.
//!
//! The final step of the last round is the first fully pipelined step.

use super::MAX_ORDER;

/// Number of initialization steps before pipelined marching starts:
/// `max(1, P(P+1)/2 - 1) - 1`.
pub fn startup_steps(order: usize) -> usize {
    assert!(
        (1..=MAX_ORDER).contains(&order),
        "order {order} outside 1..={MAX_ORDER}"
    );
    (order * (order + 1) / 2).saturating_sub(1).max(1) - 1
}

/// Per-step sets of levels to advance during startup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StartupSchedule {
    order: usize,
    steps: Vec<Vec<usize>>,
}

impl StartupSchedule {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "order must be at least 1");
        let mut steps = Vec::new();
        for p in 1..order {
            steps.push((0..p).collect());
            for _ in 0..p - 1 {
                steps.push(vec![p]);
            }
            steps.push((0..=p).collect());
        }
        Self { order, steps }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Levels advanced at each step, ascending within a step.
    pub fn steps(&self) -> &[Vec<usize>] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Node index reached by each level once the schedule has run.
    pub fn final_nodes(&self) -> Vec<usize> {
        let mut nodes = vec![0; self.order];
        for step in &self.steps {
            for &l in step {
                nodes[l] += 1;
            }
        }
        nodes
    }
}

pub fn startup_schedule(order: usize) -> StartupSchedule {
    StartupSchedule::new(order)
}

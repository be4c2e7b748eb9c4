//! Per-level ring buffers of stored `f` values and the progress counters
//! that gate access to them.
//!
//! Level `ℓ < P - 1` owns a ring of `ℓ + 2` slots read by level `ℓ + 1`.
//! The top level keeps only its current solution, so the stencil holds
//! `Σ_{ℓ<P-1} (ℓ + 2) + 1 = P(P+1)/2` vectors.
//!
//! A producer may overwrite a slot only once the consumer's current window
//! no longer covers it; a consumer may start a step only once every node of
//! its window has been published. Publication stores the node count with
//! release ordering after the slot contents are written.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::{Condvar, Mutex, RwLock, RwLockReadGuard};

use crate::ivp::StepKind;
use crate::quadrature::Regime;

#[derive(Debug)]
pub(crate) struct Slot {
    node: usize,
    written_at: u64,
    pub(crate) data: Vec<f64>,
}

#[derive(Debug)]
struct Ring {
    slots: Vec<RwLock<Slot>>,
    /// Largest number of nodes that were live (published and still inside
    /// the consumer's window) at once.
    peak_live: AtomicUsize,
}

/// Which stored nodes a consumer step reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct WindowSpec {
    pub regime: Regime,
    /// First node of the window.
    pub lo: usize,
    /// Last node of the window.
    pub hi: usize,
}

impl WindowSpec {
    /// Window for advancing level `consumer >= 1` from node `n`.
    pub fn for_step(consumer: usize, n: usize) -> Self {
        let p = consumer - 1;
        let regime = Regime::for_step(p, n);
        match regime {
            Regime::StartupRow(_) => Self {
                regime,
                lo: 0,
                hi: p + 1,
            },
            Regime::Steady => Self {
                regime,
                lo: n - p,
                hi: n + 1,
            },
        }
    }

    /// Nodes in `ν` order.
    pub fn nodes(&self) -> Vec<usize> {
        match self.regime {
            Regime::StartupRow(_) => (self.lo..=self.hi).collect(),
            Regime::Steady => (self.lo..=self.hi).rev().collect(),
        }
    }

    /// Position of the anchor `f` value within `nodes()`.
    pub fn anchor(&self, n: usize, kind: StepKind) -> usize {
        let node = match kind {
            StepKind::Explicit => n,
            StepKind::Implicit => n + 1,
        };
        match self.regime {
            Regime::StartupRow(_) => node,
            Regime::Steady => self.hi - node,
        }
    }
}

#[derive(Debug)]
pub(crate) struct Stencil {
    order: usize,
    rings: Vec<Ring>,
    /// Number of nodes published by each ring.
    published: Vec<AtomicUsize>,
    /// Current node of each level.
    position: Vec<AtomicUsize>,
    clock: AtomicU64,
    reads: AtomicU64,
    stale_reads: AtomicU64,
    generation: AtomicU64,
    abort: AtomicBool,
    park: Mutex<()>,
    wake: Condvar,
}

impl Stencil {
    pub fn new(order: usize, dim: usize) -> Self {
        let rings = (0..order.saturating_sub(1))
            .map(|l| Ring {
                slots: (0..l + 2)
                    .map(|_| {
                        RwLock::new(Slot {
                            node: usize::MAX,
                            written_at: 0,
                            data: vec![0.0; dim],
                        })
                    })
                    .collect(),
                peak_live: AtomicUsize::new(0),
            })
            .collect();
        Self {
            order,
            rings,
            published: (0..order).map(|_| AtomicUsize::new(0)).collect(),
            position: (0..order).map(|_| AtomicUsize::new(0)).collect(),
            clock: AtomicU64::new(1),
            reads: AtomicU64::new(0),
            stale_reads: AtomicU64::new(0),
            generation: AtomicU64::new(0),
            abort: AtomicBool::new(false),
            park: Mutex::new(()),
            wake: Condvar::new(),
        }
    }

    pub fn has_consumer(&self, level: usize) -> bool {
        level + 1 < self.order
    }

    /// Allocated vectors: ring slots plus the top level's solution.
    pub fn slot_count(&self) -> usize {
        self.rings.iter().map(|r| r.slots.len()).sum::<usize>() + 1
    }

    pub fn peak_live(&self) -> usize {
        self.rings
            .iter()
            .map(|r| r.peak_live.load(Ordering::Relaxed))
            .sum::<usize>()
            + 1
    }

    pub fn reads(&self) -> u64 {
        self.reads.load(Ordering::Relaxed)
    }

    pub fn stale_reads(&self) -> u64 {
        self.stale_reads.load(Ordering::Relaxed)
    }

    fn consumer_low(&self, producer: usize) -> usize {
        let pos = self.position[producer + 1].load(Ordering::Acquire);
        // Consumer p = producer: startup window starts at node 0.
        pos.saturating_sub(producer)
    }

    /// Whether every node level `level` needs to advance from `n` is published.
    pub fn input_ready(&self, level: usize, n: usize) -> bool {
        if level == 0 {
            return true;
        }
        let spec = WindowSpec::for_step(level, n);
        self.published[level - 1].load(Ordering::Acquire) > spec.hi
    }

    /// Whether `level` may publish `node` without clobbering a live slot.
    pub fn can_publish(&self, level: usize, node: usize) -> bool {
        let cap = level + 2;
        node < self.consumer_low(level) + cap
    }

    pub fn publish(&self, level: usize, node: usize, f: &[f64]) {
        debug_assert!(self.can_publish(level, node));
        debug_assert_eq!(self.published[level].load(Ordering::Relaxed), node);
        let ring = &self.rings[level];
        let cap = ring.slots.len();
        {
            let mut slot = ring.slots[node % cap]
                .write()
                .unwrap_or_else(|e| e.into_inner());
            slot.data.copy_from_slice(f);
            slot.node = node;
            slot.written_at = self.clock.fetch_add(1, Ordering::Relaxed);
        }
        let live = node + 1 - self.consumer_low(level).min(node);
        ring.peak_live.fetch_max(live, Ordering::Relaxed);
        self.published[level].store(node + 1, Ordering::Release);
        self.notify();
    }

    pub fn set_position(&self, level: usize, node: usize) {
        self.position[level].store(node, Ordering::Release);
        self.notify();
    }

    /// Read guards over the window of `consumer` stepping from `n`, in `ν`
    /// order. Each read is checked against the slot's node tag and write
    /// clock.
    pub fn read_window(
        &self,
        consumer: usize,
        spec: &WindowSpec,
    ) -> Vec<RwLockReadGuard<'_, Slot>> {
        let ring = &self.rings[consumer - 1];
        let cap = ring.slots.len();
        spec.nodes()
            .into_iter()
            .map(|node| {
                let guard = ring.slots[node % cap]
                    .read()
                    .unwrap_or_else(|e| e.into_inner());
                let now = self.clock.fetch_add(1, Ordering::Relaxed);
                self.reads.fetch_add(1, Ordering::Relaxed);
                if guard.node != node || guard.written_at >= now {
                    self.stale_reads.fetch_add(1, Ordering::Relaxed);
                }
                guard
            })
            .collect()
    }

    pub fn generation(&self) -> u64 {
        self.generation.load(Ordering::SeqCst)
    }

    pub fn abort(&self) {
        self.abort.store(true, Ordering::SeqCst);
        self.notify();
    }

    pub fn aborted(&self) -> bool {
        self.abort.load(Ordering::SeqCst)
    }

    fn notify(&self) {
        self.generation.fetch_add(1, Ordering::SeqCst);
        // Taking the lock orders this wake-up after any waiter's check.
        drop(self.park.lock().unwrap_or_else(|e| e.into_inner()));
        self.wake.notify_all();
    }

    /// Blocks until some progress counter moved past generation `seen`.
    pub fn wait(&self, seen: u64, spin: usize) {
        for _ in 0..spin {
            if self.generation() != seen || self.aborted() {
                return;
            }
            std::hint::spin_loop();
        }
        let mut guard = self.park.lock().unwrap_or_else(|e| e.into_inner());
        while self.generation() == seen && !self.aborted() {
            guard = self.wake.wait(guard).unwrap_or_else(|e| e.into_inner());
        }
    }
}

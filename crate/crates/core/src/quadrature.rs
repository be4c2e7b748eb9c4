//! Integration matrices for the correction sweeps.
//!
//! Level `p` of the pipeline integrates `f(t, u^[p])` over one step
//! `[t_n, t_{n+1}]` with the degree-`(p + 1)` interpolant through `p + 2`
//! consecutive stored nodes. Two windows are used:
//!
//! * steady (`n >= p`): the trailing nodes `t_{n-p} ..= t_{n+1}`. Weight `ν`
//!   multiplies the value at `t_{n+1-ν}`, so `ν = 0` is the newest node.
//! * startup (`n < p`): the leading nodes `t_0 ..= t_{p+1}`. Weight `ν`
//!   multiplies the value at `t_ν`; row `n` integrates over `[t_n, t_{n+1}]`.
//!
//! Weights come from the moment equations `Σ_j w_j x_j^d = ∫ x^d dx` on
//! integer nodes, solved once per level and scaled by `dt`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::linalg::{solve_dense, DenseMatrix};

/// Window selection for [`IntegrationMatrix::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Steady,
    /// Leading-node window, integrating over `[t_n, t_{n+1}]`, `n < p`.
    StartupRow(usize),
}

impl Regime {
    /// Regime used when level `p` data is integrated from node `n`.
    pub fn for_step(p: usize, n: usize) -> Self {
        if n < p {
            Regime::StartupRow(n)
        } else {
            Regime::Steady
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationMatrix {
    level: usize,
    dt: f64,
    steady: Vec<f64>,
    startup: Vec<Vec<f64>>,
}

impl IntegrationMatrix {
    /// Builds the weights for level `p` and step `dt`.
    pub fn new(level: usize, dt: f64) -> Self {
        assert!(dt > 0.0 && dt.is_finite(), "step size must be positive");
        let unit = unit_weights(level);
        Self {
            level,
            dt,
            steady: unit.steady.iter().map(|w| w * dt).collect(),
            startup: unit
                .startup
                .iter()
                .map(|row| row.iter().map(|w| w * dt).collect())
                .collect(),
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of nodes in every window, `p + 2`.
    pub fn window_len(&self) -> usize {
        self.level + 2
    }

    /// Steady weights in `ν` order (`ν = 0` ↔ `t_{n+1}`).
    pub fn steady_weights(&self) -> &[f64] {
        &self.steady
    }

    /// Startup rows; row `n` weights the nodes `t_0 ..= t_{p+1}`.
    pub fn startup_weights(&self) -> &[Vec<f64>] {
        &self.startup
    }

    pub fn weights(&self, regime: Regime) -> &[f64] {
        match regime {
            Regime::Steady => &self.steady,
            Regime::StartupRow(n) => {
                assert!(
                    n < self.level,
                    "startup row {n} requested from a level-{} matrix",
                    self.level
                );
                &self.startup[n]
            }
        }
    }

    /// Writes `Σ_ν w_ν f_window[ν]` into `out`, accumulating in ascending `ν`.
    ///
    /// `f_window` must follow the `ν` convention of `regime`.
    pub fn apply_into<V: AsRef<[f64]>>(&self, regime: Regime, f_window: &[V], out: &mut [f64]) {
        let weights = self.weights(regime);
        assert_eq!(
            f_window.len(),
            weights.len(),
            "quadrature window has {} entries, level {} needs {}",
            f_window.len(),
            self.level,
            weights.len()
        );
        let first = f_window[0].as_ref();
        assert_eq!(first.len(), out.len(), "window vector length mismatch");
        for (o, &f) in out.iter_mut().zip(first) {
            *o = weights[0] * f;
        }
        for (w, fv) in weights.iter().zip(f_window).skip(1) {
            let fv = fv.as_ref();
            assert_eq!(fv.len(), out.len(), "window vector length mismatch");
            for (o, &f) in out.iter_mut().zip(fv) {
                *o += w * f;
            }
        }
    }

    pub fn apply<V: AsRef<[f64]>>(&self, regime: Regime, f_window: &[V]) -> Vec<f64> {
        let n = f_window.first().map_or(0, |v| v.as_ref().len());
        let mut out = vec![0.0; n];
        self.apply_into(regime, f_window, &mut out);
        out
    }
}

struct UnitWeights {
    steady: Vec<f64>,
    startup: Vec<Vec<f64>>,
}

/// Weights on integer nodes `0 ..= p+1` integrating over `[a, a + 1]`.
///
/// Returned in node order. The system is solved in coordinates centred on
/// the window, which keeps the monomial moments small.
fn interval_weights(p: usize, a: usize) -> Vec<f64> {
    let m = p + 2;
    let centre = (p + 1) as f64 / 2.0;
    let nodes: Vec<f64> = (0..m).map(|j| j as f64 - centre).collect();
    let lo = a as f64 - centre;
    let hi = lo + 1.0;
    let mut vt = DenseMatrix::zeros(m);
    let mut moments = vec![0.0; m];
    for d in 0..m {
        for (j, &x) in nodes.iter().enumerate() {
            vt[(d, j)] = x.powi(d as i32);
        }
        let k = (d + 1) as i32;
        moments[d] = (hi.powi(k) - lo.powi(k)) / k as f64;
    }
    let mut w = solve_dense(&vt, &moments).expect("moment matrix on distinct nodes is nonsingular");
    // One round of iterative refinement.
    let r: Vec<f64> = vt
        .mul_vec(&w)
        .iter()
        .zip(&moments)
        .map(|(vw, m)| m - vw)
        .collect();
    let dw = solve_dense(&vt, &r).expect("moment matrix on distinct nodes is nonsingular");
    for (wi, d) in w.iter_mut().zip(dw) {
        *wi += d;
    }
    w
}

fn build_unit(p: usize) -> UnitWeights {
    // Trailing window: window position j holds t_{n-p+j}; integrate over the
    // last subinterval, then reverse into ν order.
    let mut steady = interval_weights(p, p);
    steady.reverse();
    let startup = (0..p).map(|n| interval_weights(p, n)).collect();
    UnitWeights { steady, startup }
}

fn unit_weights(p: usize) -> Arc<UnitWeights> {
    static UNIT: OnceLock<Mutex<HashMap<usize, Arc<UnitWeights>>>> = OnceLock::new();
    let cache = UNIT.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(p)
        .or_insert_with(|| Arc::new(build_unit(p)))
        .clone()
}

/// Shared, immutable matrix for `(p, dt)`.
///
/// Repeated lookups with identical arguments return the same allocation.
pub fn integration_matrix(level: usize, dt: f64) -> Arc<IntegrationMatrix> {
    type Cache = Mutex<HashMap<(usize, u64), Arc<IntegrationMatrix>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (level, dt.to_bits());
    if let Some(m) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return m.clone();
    }
    let built = Arc::new(IntegrationMatrix::new(level, dt));
    cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .entry(key)
        .or_insert(built)
        .clone()
}

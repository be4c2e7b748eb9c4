//! Shared test fixtures: an unpipelined reference implementation of RIDC
//! with exact rational quadrature weights.

#![allow(dead_code)]

use std::sync::Arc;

use ridc::problems::{ProblemId, ProblemSetup, SetupOptions};
use ridc::{StepKind, Stepper};

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Exact rational, always normalised with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: i128,
    pub den: i128,
}

impl Ratio {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0);
        let g = gcd(num, den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Self {
            num: s * num / g,
            den: s * den / g,
        }
    }

    pub fn int(n: i128) -> Self {
        Self::new(n, 1)
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    pub fn mul(self, o: Self) -> Self {
        Self::new(self.num * o.num, self.den * o.den)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// `∫_a^{a+1} ℓ_j(x) dx` for every Lagrange basis polynomial `ℓ_j` on the
/// integer nodes `0..m`, computed exactly.
pub fn exact_weights(m: usize, a: usize) -> Vec<Ratio> {
    (0..m)
        .map(|j| {
            // Expand prod_{k != j} (x - k) into monomial coefficients.
            let mut coeffs = vec![1i128];
            let mut denom = 1i128;
            for k in 0..m {
                if k == j {
                    continue;
                }
                let mut next = vec![0i128; coeffs.len() + 1];
                for (d, c) in coeffs.iter().enumerate() {
                    next[d + 1] += c;
                    next[d] -= c * k as i128;
                }
                coeffs = next;
                denom *= j as i128 - k as i128;
            }
            let (lo, hi) = (a as i128, a as i128 + 1);
            let mut total = Ratio::int(0);
            for (d, c) in coeffs.iter().enumerate() {
                let k = d as u32 + 1;
                let moment = Ratio::new(hi.pow(k) - lo.pow(k), k as i128);
                total = total.add(moment.mul(Ratio::int(*c)));
            }
            total.mul(Ratio::new(1, denom))
        })
        .collect()
}

/// Solves `u - dt f(t, u) = rhs` for `u`.
pub type ImplicitSolve<'a> = dyn Fn(f64, f64, &[f64]) -> Vec<f64> + 'a;

pub struct OracleTable {
    /// `u[p][n]` for every level and node.
    pub u: Vec<Vec<Vec<f64>>>,
}

impl OracleTable {
    pub fn top(&self) -> &[Vec<f64>] {
        self.u.last().unwrap()
    }
}

/// Level-by-level RIDC on a full table. `implicit` selects the backward
/// Euler form of the correction and must then come with a solver.
pub fn oracle_solve(
    f: &dyn Fn(f64, &[f64]) -> Vec<f64>,
    implicit: Option<&ImplicitSolve<'_>>,
    t0: f64,
    t_final: f64,
    y0: &[f64],
    order: usize,
    nt: usize,
) -> OracleTable {
    let dt = (t_final - t0) / nt as f64;
    let t = |n: usize| t0 + n as f64 * dt;
    let dim = y0.len();
    let mut u: Vec<Vec<Vec<f64>>> = Vec::new();

    // Prediction.
    let mut pred = vec![y0.to_vec()];
    for n in 0..nt {
        let un = &pred[n];
        let next = match implicit {
            None => {
                let fn_ = f(t(n), un);
                (0..dim).map(|i| un[i] + dt * fn_[i]).collect()
            }
            Some(solve) => solve(t(n + 1), dt, un),
        };
        pred.push(next);
    }
    u.push(pred);

    for p in 0..order.saturating_sub(1) {
        let prev = &u[p];
        let fp: Vec<Vec<f64>> = (0..=nt).map(|n| f(t(n), &prev[n])).collect();
        let m = p + 2;
        let steady: Vec<f64> = exact_weights(m, p).iter().map(|r| r.to_f64()).collect();
        let startup: Vec<Vec<f64>> = (0..p)
            .map(|n| exact_weights(m, n).iter().map(|r| r.to_f64()).collect())
            .collect();
        let mut cur = vec![y0.to_vec()];
        for n in 0..nt {
            let (lo, w) = if n >= p {
                (n - p, &steady)
            } else {
                (0, &startup[n])
            };
            let q: Vec<f64> = (0..dim)
                .map(|i| dt * (0..m).map(|j| w[j] * fp[lo + j][i]).sum::<f64>())
                .collect();
            let un = &cur[n];
            let next = match implicit {
                None => {
                    let fu = f(t(n), un);
                    (0..dim)
                        .map(|i| un[i] + dt * (fu[i] - fp[n][i]) + q[i])
                        .collect()
                }
                Some(solve) => {
                    let rhs: Vec<f64> =
                        (0..dim).map(|i| un[i] - dt * fp[n + 1][i] + q[i]).collect();
                    solve(t(n + 1), dt, &rhs)
                }
            };
            cur.push(next);
        }
        u.push(cur);
    }
    OracleTable { u }
}

/// Oracle for one of the bundled problems. Scalar problems use their
/// closed-form implicit solves; the Brusselator reuses the library's
/// Newton stepper as its implicit solver.
pub fn oracle_for(
    id: ProblemId,
    mode: StepKind,
    opts: &SetupOptions,
    order: usize,
    nt: usize,
) -> OracleTable {
    let setup = ProblemSetup::new(id, mode, opts).unwrap();
    let sys = setup.system().clone();
    let f = move |t: f64, y: &[f64]| {
        let mut d = vec![0.0; y.len()];
        sys.rhs(t, y, &mut d);
        d
    };
    let lambda = opts.lambda;
    let stepper: Arc<dyn Stepper> = Arc::from(setup.stepper);
    let implicit: Box<ImplicitSolve<'_>> = match id {
        // y_i' = -(i+1) t y_i
        ProblemId::Decay => Box::new(|t, dt, rhs: &[f64]| {
            rhs.iter()
                .enumerate()
                .map(|(i, r)| r / (1.0 + dt * (i + 1) as f64 * t))
                .collect()
        }),
        // y' = λ (y - cos t) - sin t
        ProblemId::Stiff => Box::new(move |t, dt, rhs: &[f64]| {
            vec![(rhs[0] - dt * (lambda * t.cos() + t.sin())) / (1.0 - dt * lambda)]
        }),
        ProblemId::Polynomial => Box::new(|t, dt, rhs: &[f64]| vec![rhs[0] + dt * 2.0 * t]),
        ProblemId::Brusselator => {
            let s = stepper.clone();
            Box::new(move |t, dt, rhs: &[f64]| {
                let mut out = vec![0.0; rhs.len()];
                s.advance(t - dt, dt, rhs, &mut out).unwrap();
                out
            })
        }
    };
    let p = &setup.problem;
    let implicit = match mode {
        StepKind::Explicit => None,
        StepKind::Implicit => Some(implicit.as_ref()),
    };
    oracle_solve(&f, implicit, p.t0(), p.t_final(), p.y0(), order, nt)
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale
}

pub fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

/// Options with a Brusselator small enough for exhaustive sweeps and for
/// forward Euler to stay stable at `dt = 1/8`.
pub fn small_options() -> SetupOptions {
    let mut opts = SetupOptions::default();
    opts.brusselator = opts.brusselator.with_points(10);
    opts
}

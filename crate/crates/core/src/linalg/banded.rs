use super::{DenseMatrix, LinalgError};

/// Square band matrix with `lower` sub- and `upper` super-diagonals.
///
/// Storage is row-major by diagonal: entry `(i, j)` with
/// `i - lower <= j <= i + upper` lives at `data[i * width + (j + lower - i)]`
/// where `width = lower + upper + 1`. Positions falling outside the matrix
/// (the corners of the first and last rows) are kept at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        assert!(
            n == 0 || (lower < n && upper < n),
            "bandwidth must be smaller than the dimension"
        );
        Self {
            n,
            lower,
            upper,
            data: vec![0.0; n * (lower + upper + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.lower >= i && j <= i + self.upper
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[i * self.width() + j + self.lower - i]
        } else {
            0.0
        }
    }

    /// Panics if `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) is outside the band");
        let w = self.width();
        self.data[i * w + j + self.lower - i] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let v = self.get(i, j);
        self.set(i, j, v + value);
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.lower);
                let hi = (i + self.upper).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.lower);
            let hi = (i + self.upper).min(self.n - 1);
            for j in lo..=hi {
                d[(i, j)] = self.get(i, j);
            }
        }
        d
    }

    /// LU with partial pivoting inside the band, then substitution.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let n = self.n;
        if rhs.len() != n {
            return Err(LinalgError::Dimension {
                expected: n,
                found: rhs.len(),
            });
        }
        let kl = self.lower;
        // Row swaps widen U to kl + ku super-diagonals.
        let ku = self.upper + kl;
        let w = kl + ku + 1;
        let idx = |i: usize, j: usize| i * w + j + kl - i;

        let mut a = vec![0.0; n * w];
        let mut scale = 0.0f64;
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + self.upper).min(n.saturating_sub(1));
            for j in lo..=hi {
                let v = self.get(i, j);
                scale = scale.max(v.abs());
                a[idx(i, j)] = v;
            }
        }
        let tiny = n as f64 * f64::EPSILON * scale;
        let mut b = rhs.to_vec();

        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + ku).min(n - 1);
            let mut piv_row = k;
            let mut piv = a[idx(k, k)].abs();
            for r in k + 1..=last_row {
                let v = a[idx(r, k)].abs();
                if v > piv {
                    piv = v;
                    piv_row = r;
                }
            }
            if piv <= tiny || piv == 0.0 {
                return Err(LinalgError::Singular {
                    column: k,
                    pivot: piv,
                });
            }
            if piv_row != k {
                for j in k..=last_col {
                    a.swap(idx(k, j), idx(piv_row, j));
                }
                b.swap(k, piv_row);
            }
            let akk = a[idx(k, k)];
            for i in k + 1..=last_row {
                let l = a[idx(i, k)] / akk;
                if l == 0.0 {
                    continue;
                }
                a[idx(i, k)] = 0.0;
                for j in k + 1..=last_col {
                    a[idx(i, j)] -= l * a[idx(k, j)];
                }
                b[i] -= l * b[k];
            }
        }

        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let last_col = (k + ku).min(n - 1);
            let mut s = b[k];
            for j in k + 1..=last_col {
                s -= a[idx(k, j)] * x[j];
            }
            x[k] = s / a[idx(k, k)];
        }
        Ok(x)
    }
}

/// A band matrix paired with its right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSystem {
    pub matrix: BandedMatrix,
    pub rhs: Vec<f64>,
}

pub fn solve_banded(system: &BandedSystem) -> Result<Vec<f64>, LinalgError> {
    system.matrix.solve(&system.rhs)
}

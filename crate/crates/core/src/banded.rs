//! Symmetric banded matrices and their Cholesky factorization.

use crate::error::{Error, Result};

/// Pivots below this fraction of the original diagonal count as singular.
const PIVOT_TOLERANCE: f64 = 1e-14;

/// Symmetric matrix stored by its lower band.
///
/// Row `i` holds `A[i][i-bw..=i]`; entries outside the band are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBanded {
    n: usize,
    bw: usize,
    band: Vec<f64>,
}

impl SymBanded {
    pub fn zeros(n: usize, bw: usize) -> Self {
        SymBanded {
            n,
            bw,
            band: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (j + self.bw - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            0.0
        } else {
            self.band[self.slot(i, j)]
        }
    }

    /// Adds `v` to `A[i][j]` (and so to `A[j][i]`).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.bw, "entry ({i}, {j}) outside bandwidth {}", self.bw);
        let s = self.slot(i, j);
        self.band[s] += v;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.band[self.slot(i, i)]).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let row = &self.band[i * (self.bw + 1)..(i + 1) * (self.bw + 1)];
            let off = self.bw + lo - i;
            let mut acc = row[self.bw] * x[i];
            for j in lo..i {
                let a = row[off + j - lo];
                acc += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += acc;
        }
        y
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut rows = vec![0.0; self.n];
        for i in 0..self.n {
            for j in i.saturating_sub(self.bw)..=i {
                let a = self.get(i, j).abs();
                rows[i] += a;
                if j != i {
                    rows[j] += a;
                }
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Principal submatrix on increasing indices `idx`.
    pub fn principal(&self, idx: &[usize]) -> SymBanded {
        let mut bw = 0;
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx[..a].iter().enumerate().rev() {
                if i - j > self.bw {
                    break;
                }
                if self.get(i, j) != 0.0 {
                    bw = bw.max(a - b);
                }
            }
        }
        let mut out = SymBanded::zeros(idx.len(), bw);
        for (a, &i) in idx.iter().enumerate() {
            for b in a.saturating_sub(bw)..=a {
                let v = self.get(i, idx[b]);
                if v != 0.0 {
                    let s = out.slot(a, b);
                    out.band[s] = v;
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn cholesky(&self) -> Result<Cholesky> {
        let (n, bw) = (self.n, self.bw);
        let mut l = self.band.clone();
        let w = bw + 1;
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                // L[i][j] = (A[i][j] - Σ_k L[i][k] L[j][k]) / L[j][j]
                let klo = lo.max(j.saturating_sub(bw));
                let mut s = l[i * w + (j + bw - i)];
                for k in klo..j {
                    s -= l[i * w + (k + bw - i)] * l[j * w + (k + bw - j)];
                }
                if j == i {
                    let d = self.band[i * w + bw];
                    if !(s > PIVOT_TOLERANCE * d.abs()) || !s.is_finite() {
                        return Err(Error::SingularSystem { row: i, pivot: s });
                    }
                    l[i * w + bw] = s.sqrt();
                } else {
                    l[i * w + (j + bw - i)] = s / l[j * w + bw];
                }
            }
        }
        Ok(Cholesky { n, bw, l })
    }
}

/// `A = L Lᵀ` with `L` banded lower triangular.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let mut y = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = y[i];
            for k in lo..i {
                s -= self.l[i * w + (k + bw - i)] * y[k];
            }
            y[i] = s / self.l[i * w + bw];
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut s = y[i];
            for k in i + 1..=hi {
                s -= self.l[k * w + (i + bw - k)] * y[k];
            }
            y[i] = s / self.l[i * w + bw];
        }
        y
    }

    /// Solve followed by one step of iterative refinement against `a`.
    pub fn solve_refined(&self, a: &SymBanded, b: &[f64]) -> Vec<f64> {
        let mut x = self.solve(b);
        let ax = a.mul_vec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let dx = self.solve(&r);
        for (x, d) in x.iter_mut().zip(dx) {
            *x += d;
        }
        x
    }
}

/// Factor and solve `A x = b` in one go.
pub fn solve_spd(a: &SymBanded, b: &[f64]) -> Result<Vec<f64>> {
    Ok(a.cholesky()?.solve_refined(a, b))
}

/// Dense symmetric positive definite solve, for the small systems of the
/// hinge and threshold computations.
pub fn solve_dense_spd(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut m = SymBanded::zeros(n, n.saturating_sub(1));
    for i in 0..n {
        for j in 0..=i {
            m.add(i, j, if i == j { a[i][i] } else { 0.5 * (a[i][j] + a[j][i]) });
        }
    }
    solve_spd(&m, b)
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

//! Convex quadratic minimization under lower bounds on some unknowns.
//!
//! Primal-dual active sets with diagonal scaling; if the active sets start to
//! cycle, a primal active-set method finishes from the current point.

use std::collections::HashSet;

use crate::banded::{norm_inf, SymBanded};
use crate::error::{Error, Result};
use crate::fem::QuadraticForm;
use crate::layout::BoundDof;

const MAX_PDAS: usize = 200;

pub(super) struct Solution {
    pub x: Vec<f64>,
    /// One per bound, zero off the active set.
    pub multipliers: Vec<f64>,
    pub iterations: usize,
    /// Unscaled first-order residual (stationarity, feasibility, complementarity).
    pub kkt: f64,
    pub method: &'static str,
}

struct BoxQp<'a> {
    h: &'a SymBanded,
    g: &'a [f64],
    dofs: Vec<usize>,
    lower: Vec<f64>,
}

impl BoxQp<'_> {
    /// Minimizer with the active bounds held at their values.
    fn solve_with(&self, active: &[bool]) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.g.len();
        let mut fixed = vec![false; n];
        let mut x = vec![0.0; n];
        for (k, &a) in active.iter().enumerate() {
            if a {
                fixed[self.dofs[k]] = true;
                x[self.dofs[k]] = self.lower[k];
            }
        }
        let free: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
        if !free.is_empty() {
            let hx = self.h.mul_vec(&x);
            let rhs: Vec<f64> = free.iter().map(|&i| self.g[i] - hx[i]).collect();
            let sub = self.h.principal(&free);
            let y = sub.cholesky()?.solve_refined(&sub, &rhs);
            for (k, &i) in free.iter().enumerate() {
                x[i] = y[k];
            }
        }
        let grad = self.gradient(&x);
        let lam = active
            .iter()
            .enumerate()
            .map(|(k, &a)| if a { grad[self.dofs[k]] } else { 0.0 })
            .collect();
        Ok((x, lam))
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.h.mul_vec(x);
        for (r, g) in r.iter_mut().zip(self.g) {
            *r -= g;
        }
        r
    }

    fn kkt(&self, x: &[f64], lam: &[f64]) -> f64 {
        let mut grad = self.gradient(x);
        let mut worst: f64 = 0.0;
        for (k, &i) in self.dofs.iter().enumerate() {
            let gap = x[i] - self.lower[k];
            worst = worst.max((-gap).max(0.0)).max((-lam[k]).max(0.0)).max(lam[k].min(gap).abs());
            grad[i] -= lam[k];
        }
        worst.max(norm_inf(&grad))
    }

    fn pdas(&self) -> Result<(Vec<f64>, Vec<f64>, usize, bool)> {
        let diag = self.h.diagonal();
        let nb = self.dofs.len();
        let mut active = vec![false; nb];
        let (mut x, mut lam) = self.solve_with(&active)?;
        let mut seen: HashSet<Vec<bool>> = HashSet::new();
        seen.insert(active.clone());
        for it in 0..MAX_PDAS {
            let next: Vec<bool> = (0..nb)
                .map(|k| lam[k] + diag[self.dofs[k]] * (self.lower[k] - x[self.dofs[k]]) > 0.0)
                .collect();
            if next == active {
                return Ok((x, lam, it + 1, true));
            }
            if !seen.insert(next.clone()) {
                log::debug!("active sets cycle after {it} iterations, switching to primal active set");
                return Ok((x, lam, it + 1, false));
            }
            active = next;
            (x, lam) = self.solve_with(&active)?;
        }
        Ok((x, lam, MAX_PDAS, false))
    }

    /// Primal active-set method started from the projection of `x0`.
    fn primal(&self, x0: &[f64], tol: f64) -> Result<(Vec<f64>, Vec<f64>, usize)> {
        let nb = self.dofs.len();
        let mut x = x0.to_vec();
        let mut working = vec![false; nb];
        for k in 0..nb {
            let i = self.dofs[k];
            if x[i] <= self.lower[k] {
                x[i] = self.lower[k];
                working[k] = true;
            }
        }
        let cap = 10 * (nb + 10);
        for it in 0..cap {
            let (target, lam) = self.solve_with(&working)?;
            // largest feasible step toward the working-set minimizer
            let mut step = 1.0;
            let mut blocking = None;
            for k in (0..nb).filter(|&k| !working[k]) {
                let i = self.dofs[k];
                if target[i] < self.lower[k] {
                    let t = (x[i] - self.lower[k]) / (x[i] - target[i]);
                    if t < step {
                        step = t;
                        blocking = Some(k);
                    }
                }
            }
            for (xi, ti) in x.iter_mut().zip(&target) {
                *xi += step * (ti - *xi);
            }
            if let Some(k) = blocking {
                x[self.dofs[k]] = self.lower[k];
                working[k] = true;
                continue;
            }
            x = target;
            let worst = (0..nb)
                .filter(|&k| working[k])
                .min_by(|&a, &b| lam[a].total_cmp(&lam[b]));
            match worst {
                Some(k) if lam[k] < -tol => working[k] = false,
                _ => {
                    let lam = lam.iter().map(|&l| l.max(0.0)).collect();
                    return Ok((x, lam, it + 1));
                }
            }
        }
        Err(Error::MaxIterations {
            solver: "primal active set",
            iterations: cap,
            residual: f64::NAN,
        })
    }
}

pub(super) fn solve(form: &QuadraticForm, bounds: &[BoundDof], tol: f64) -> Result<Solution> {
    let qp = BoxQp {
        h: &form.h,
        g: &form.g,
        dofs: bounds.iter().map(|b| b.dof).collect(),
        lower: bounds.iter().map(|b| b.bound).collect(),
    };
    let (x, lam, it, converged) = qp.pdas()?;
    let (x, lam, iterations, method) = if converged {
        (x, lam, it, "primal-dual-active-set")
    } else {
        let scale = tol * (1.0 + norm_inf(&form.g));
        let (x, lam, more) = qp.primal(&x, scale)?;
        (x, lam, it + more, "primal-active-set")
    };
    let kkt = qp.kkt(&x, &lam);
    Ok(Solution {
        x,
        multipliers: lam,
        iterations,
        kkt,
        method,
    })
}

/// Minimizes `½xᵀHx − gᵀx` subject to `x[i] >= l` for each `(i, l)` in
/// `lower`. Returns the minimizer and one multiplier per bound.
pub fn solve_box_qp(h: &SymBanded, g: &[f64], lower: &[(usize, f64)], tol: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let form = QuadraticForm {
        h: h.clone(),
        g: g.to_vec(),
        c: 0.0,
    };
    let bounds: Vec<BoundDof> = lower
        .iter()
        .map(|&(dof, bound)| BoundDof {
            node: 0,
            side: None,
            dof,
            bound,
        })
        .collect();
    let s = solve(&form, &bounds, tol)?;
    Ok((s.x, s.multipliers))
}

//! Weak residuals of the Euler-Lagrange equations.
//!
//! An equation `Σ c (v'')'' + Σ terms = 0` on an interval `(a, b)` is tested
//! against smooth bubbles `φ_k = (1 - t²)² P_k(t)`, `t` the affine image of
//! `(a, b)` on `(-1, 1)`, so that `φ_k ∈ H²₀(a, b)`. Each test gives
//! `r_k = ∫ Σ c v'' φ_k'' + Σ term φ_k`. The reported residual is a
//! dual-norm ratio: `max_k |r_k| / ‖φ_k''‖` over the largest
//! `|∫ term φ_k| / ‖φ_k''‖` of any single term, i.e. the residual measured
//! against the strength of the terms it balances.
//! Quadrature runs on the once-refined mesh with eight Gauss points.

use serde::{Deserialize, Serialize};

use crate::mesh::Mesh;
use crate::quadrature::GaussRule;

/// Number of bubbles per interval.
pub const TEST_FUNCTIONS: usize = 6;

const POINTS: usize = 8;

/// Residual of one equation on one interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerResidual {
    pub equation: String,
    pub a: f64,
    pub b: f64,
    /// Residual relative to the largest single term, in the dual norm.
    pub residual: f64,
    /// Largest absolute residual over the test functions.
    pub absolute: f64,
    pub tests: usize,
}

/// Coefficient evaluated at `x` inside element `e`.
pub(crate) type Coef<'a> = Box<dyn Fn(usize, f64) -> f64 + 'a>;

/// `∫ Σ second·φ'' + Σ zeroth·φ`.
pub(crate) struct WeakForm<'a> {
    pub second: Vec<Coef<'a>>,
    pub zeroth: Vec<Coef<'a>>,
}

fn legendre(k: usize) -> Vec<f64> {
    let mut p0 = vec![1.0];
    if k == 0 {
        return p0;
    }
    let mut p1 = vec![0.0, 1.0];
    for n in 1..k {
        // (n+1) P_{n+1} = (2n+1) t P_n - n P_{n-1}
        let mut next = vec![0.0; n + 2];
        for (i, c) in p1.iter().enumerate() {
            next[i + 1] += (2 * n + 1) as f64 * c;
        }
        for (i, c) in p0.iter().enumerate() {
            next[i] -= n as f64 * c;
        }
        for c in &mut next {
            *c /= (n + 1) as f64;
        }
        p0 = p1;
        p1 = next;
    }
    p1
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn deriv(a: &[f64]) -> Vec<f64> {
    if a.len() <= 1 {
        return vec![0.0];
    }
    a.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect()
}

fn horner(a: &[f64], t: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// Monomial coefficients in `t` of `φ_k` and `φ_k''`.
fn bubble(k: usize) -> (Vec<f64>, Vec<f64>) {
    let q = mul(&[1.0, 0.0, -2.0, 0.0, 1.0], &legendre(k));
    let q2 = deriv(&deriv(&q));
    (q, q2)
}

/// Tests `form` on the nodes `i0..=i1` of `mesh`.
pub(crate) fn residual(mesh: &Mesh, i0: usize, i1: usize, form: &WeakForm, equation: &str) -> EulerResidual {
    let nodes = mesh.nodes();
    let (a, b) = (nodes[i0], nodes[i1]);
    let scale2 = (2.0 / (b - a)).powi(2);
    let rule = GaussRule::new(POINTS);
    // coefficient values at every quadrature point, computed once
    let mut pts: Vec<(f64, f64, Vec<f64>, Vec<f64>)> = Vec::new();
    for e in i0..i1 {
        let (x0, x1) = mesh.element(e);
        let m = 0.5 * (x0 + x1);
        for (lo, hi) in [(x0, m), (m, x1)] {
            for (x, w) in rule.mapped(lo, hi) {
                let t = (2.0 * x - a - b) / (b - a);
                let s: Vec<f64> = form.second.iter().map(|c| c(e, x)).collect();
                let z: Vec<f64> = form.zeroth.iter().map(|c| c(e, x)).collect();
                pts.push((t, w, s, z));
            }
        }
    }
    let mut worst: f64 = 0.0;
    let mut strength: f64 = 0.0;
    let mut abs: f64 = 0.0;
    let nterms = form.second.len() + form.zeroth.len();
    for k in 0..TEST_FUNCTIONS {
        let (q, q2) = bubble(k);
        let mut terms = vec![0.0; nterms];
        let mut norm2 = 0.0;
        for (t, w, sec, zer) in &pts {
            let phi = horner(&q, *t);
            let phi2 = horner(&q2, *t) * scale2;
            norm2 += w * phi2 * phi2;
            for (j, c) in sec.iter().enumerate() {
                terms[j] += w * c * phi2;
            }
            for (j, c) in zer.iter().enumerate() {
                terms[sec.len() + j] += w * c * phi;
            }
        }
        let r: f64 = terms.iter().sum();
        let norm = norm2.sqrt();
        abs = abs.max(r.abs());
        worst = worst.max(r.abs() / norm);
        for t in &terms {
            strength = strength.max(t.abs() / norm);
        }
    }
    let rel = if strength > 0.0 { worst / strength } else { 0.0 };
    EulerResidual {
        equation: equation.to_string(),
        a,
        b,
        residual: rel,
        absolute: abs,
        tests: TEST_FUNCTIONS,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::breaks::BreakConfig;
    use crate::mesh::build_mesh;

    #[test]
    fn legendre_values_at_one() {
        for k in 0..8 {
            assert!((horner(&legendre(k), 1.0) - 1.0).abs() < 1e-12);
        }
        // P_2 = (3t² - 1)/2
        let p2 = legendre(2);
        assert!((p2[0] + 0.5).abs() < 1e-15 && (p2[2] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn bubbles_are_clamped() {
        for k in 0..TEST_FUNCTIONS {
            let (q, _) = bubble(k);
            let d = deriv(&q);
            for t in [-1.0, 1.0] {
                assert!(horner(&q, t).abs() < 1e-12);
                assert!(horner(&d, t).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_beam_has_zero_residual() {
        // u = x⁴ solves u'''' = 24; the weak form ∫ u''φ'' - 24φ vanishes
        let mesh = build_mesh(8, &BreakConfig::empty()).unwrap();
        let form = WeakForm {
            second: vec![Box::new(|_, x: f64| 12.0 * x * x)],
            zeroth: vec![Box::new(|_, _| -24.0)],
        };
        let r = residual(&mesh, 0, 8, &form, "test");
        assert!(r.residual < 1e-13, "{}", r.residual);
        // a wrong load is detected
        let bad = WeakForm {
            second: vec![Box::new(|_, x: f64| 12.0 * x * x)],
            zeroth: vec![Box::new(|_, _| -23.0)],
        };
        assert!(residual(&mesh, 0, 8, &bad, "test").residual > 1e-3);
    }
}

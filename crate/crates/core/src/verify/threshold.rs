//! Sufficient condition for the unbroken minimizer to be the only one, and
//! the clamped Poincaré constant it uses.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::breaks::BreakConfig;
use crate::energy::Problem;
use crate::error::{Error, Result};
use crate::fem::QuadraticForm;
use crate::hermite::{bending_matrix, mass_matrix};
use crate::layout::{Clamping, Layout};
use crate::mesh::{build_mesh, Mesh};
use crate::params::ProblemKind;
use crate::quadrature::GaussRule;
use crate::solve::solve_fixed;

/// Mesh resolution behind the cached constant used by [`check_threshold`].
pub const POINCARE_RESOLUTION: usize = 512;

const MAX_INVERSE_ITERATIONS: usize = 2000;

/// Best `C` with `∫ v² ≤ C ∫ v''²` for `v ∈ H²₀(-1, 1)`, from the smallest
/// generalized eigenvalue of the clamped Hermite bending/mass pair on `n`
/// uniform elements. Needs `n >= 16`.
pub fn poincare_constant(n: usize) -> Result<f64> {
    if n < 16 {
        return Err(Error::EigenFailure(format!("{n} elements are too few for the clamped eigenproblem")));
    }
    let mesh = build_mesh(n, &BreakConfig::empty())?;
    let layout = Layout::single(&mesh, Clamping::homogeneous());
    let bw = layout.bandwidth(&mesh);
    let mut k = QuadraticForm::zeros(layout.n_dofs, bw);
    let mut m = QuadraticForm::zeros(layout.n_dofs, bw);
    for e in 0..mesh.element_count() {
        let h = mesh.element_length(e);
        let a = layout.primary.element(e);
        k.add_quadratic(&a, &bending_matrix(h), 0.5);
        m.add_quadratic(&a, &mass_matrix(h), 0.5);
    }
    let chol = k.h.cholesky()?;
    let mut x: Vec<f64> = (0..layout.n_dofs).map(|i| 1.0 + (i % 7) as f64 * 1e-3).collect();
    let mut lambda = f64::INFINITY;
    for _ in 0..MAX_INVERSE_ITERATIONS {
        let y = chol.solve_refined(&k.h, &m.h.mul_vec(&x));
        let norm = m.h.quad_form(&y).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::EigenFailure("inverse iteration collapsed".into()));
        }
        x = y.iter().map(|v| v / norm).collect();
        let next = rayleigh(&layout, &mesh, &x)?;
        // the Rayleigh quotients decrease; a rise is round-off
        if lambda - next <= 1e-13 * next {
            return Ok(1.0 / next);
        }
        lambda = next;
    }
    Err(Error::EigenFailure(format!(
        "inverse iteration stalled at eigenvalue {lambda}"
    )))
}

/// `∫ v''² / ∫ v²` from element curvatures; `xᵀKx` loses digits to
/// cancellation once `‖K‖ ~ n⁴` is large.
fn rayleigh(layout: &Layout, mesh: &Mesh, x: &[f64]) -> Result<f64> {
    let v = layout.primary.reconstruct(mesh, x)?;
    let rule = GaussRule::element();
    let (mut num, mut den) = (0.0, 0.0);
    for e in 0..mesh.element_count() {
        let c = v.element(e);
        num += c.bending_energy();
        let (a, b) = mesh.element(e);
        den += rule.mapped(a, b).map(|(x, w)| w * c.value(x).powi(2)).sum::<f64>();
    }
    Ok(num / den)
}

/// As [`poincare_constant`] on `(a, b)`; the constant scales with length⁴.
pub fn poincare_constant_on(a: f64, b: f64, n: usize) -> Result<f64> {
    if !(b > a) {
        return Err(Error::DegenerateMesh(format!("empty interval ({a}, {b})")));
    }
    Ok(poincare_constant(n)? * ((b - a) / 2.0).powi(4))
}

fn cached_poincare() -> Result<f64> {
    static C: OnceLock<Result<f64>> = OnceLock::new();
    C.get_or_init(|| poincare_constant(POINCARE_RESOLUTION)).clone()
}

/// Terms of the uniqueness threshold. The unbroken minimizer is the unique
/// minimizer when `lhs < rhs = beta - unbroken_minimum`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub problem: ProblemKind,
    /// `‖f_r‖² / 4μ`.
    pub load_term: f64,
    /// `C_P ‖f_r + f_p‖² / 2γ` (strengthening only).
    pub poincare_term: f64,
    /// `γ ‖w''‖²` (strengthening only).
    pub datum_term: f64,
    /// `∫ (f_r + f_p) w`.
    pub work_term: f64,
    pub lhs: f64,
    pub beta: f64,
    pub unbroken_minimum: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
    pub poincare_constant: Option<f64>,
}

fn integrate(f: impl Fn(f64) -> f64) -> f64 {
    let rule = GaussRule::new(8);
    let cells = 256;
    let h = 2.0 / cells as f64;
    (0..cells)
        .map(|c| {
            let a = -1.0 + c as f64 * h;
            rule.integrate(a, a + h, &f)
        })
        .sum()
}

/// Evaluates the threshold; the unbroken minimum is computed on the nodes of `mesh`.
pub fn check_threshold(problem: &Problem, mesh: &Mesh) -> Result<ThresholdReport> {
    if problem.kind == ProblemKind::G1 {
        return Err(Error::Unsupported("no uniqueness threshold for the elastic-plastic energy".into()));
    }
    let p = &problem.params;
    let free = problem.clone().with_constraint(false);
    let unbroken = solve_fixed(&free, &mesh.with_breaks(&BreakConfig::empty())?)?;
    let m = unbroken.energy.total;
    let f_r = problem.f_r();
    let f_p = problem.f_p();
    let load_term = f_r.l2_norm_squared() / (4.0 * p.mu);
    let (poincare_term, datum_term, c_p) = if problem.kind == ProblemKind::F1 {
        let c = cached_poincare()?;
        let sum = integrate(|x| (f_r.eval(x) + f_p.eval(x)).powi(2));
        let w2 = integrate(|x| problem.w.curvature(x).powi(2));
        (c / (2.0 * p.gamma) * sum, p.gamma * w2, Some(c))
    } else {
        (0.0, 0.0, None)
    };
    let work_term = integrate(|x| (f_r.eval(x) + f_p.eval(x)) * problem.w.value(x));
    let lhs = load_term + poincare_term + datum_term + work_term;
    let rhs = p.beta - m;
    Ok(ThresholdReport {
        problem: problem.kind,
        load_term,
        poincare_term,
        datum_term,
        work_term,
        lhs,
        beta: p.beta,
        unbroken_minimum: m,
        rhs,
        margin: rhs - lhs,
        holds: lhs < rhs,
        poincare_constant: c_p,
    })
}

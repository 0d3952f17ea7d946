//! Energy of a stationary point rewritten through the work of the loads.
//!
//! Testing the Euler equations with the solution itself removes the bending
//! energy, leaving (traces at ±1 are the inner ones, `[z] = z(1) - z(-1)`):
//!
//! * hard device: `E = J + μ∫(w² - wu) - ½∫fu + η[ü u̇ - u⃛ u]`;
//! * strengthening: `F = J - ½∫f_r u_r - ½∫f_p u_p
//!   + [γ(u_p'' u_p' - u_p''' u_p) + η(ü_r u̇_r - u⃛_r u_r)]`.
//!
//! The glue terms cancel in the second identity; the variant carrying an
//! extra `-μ∫(u_r - u_p)²` is evaluated too, for comparison.

use serde::{Deserialize, Serialize};

use crate::data::LoadField;
use crate::energy::{Fields, Problem};
use crate::error::Result;
use crate::field::{PiecewiseDisplacement, Side};
use crate::params::ProblemKind;
use crate::quadrature::GaussRule;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceReport {
    /// Energy of the solution.
    pub energy: f64,
    pub damage: f64,
    /// `μ∫(w² - wu)`; zero for the strengthening energy.
    pub glue_term: f64,
    /// `-½∫f_r u_r`.
    pub load_term_r: f64,
    /// `-½∫f_p u_p`.
    pub load_term_p: f64,
    /// Reinforcement terms at ±1.
    pub boundary_r: f64,
    /// Plate terms at ±1.
    pub boundary_p: f64,
    /// Right-hand side of the identity.
    pub work_form: f64,
    /// `|energy - work_form| / max(|energy|, |work_form|)`.
    pub relative_gap: f64,
    /// Same terms at interior breaks, where the natural conditions make them vanish.
    pub interior_break_terms: f64,
    /// `-μ∫(u_r - u_p)²` (strengthening only).
    pub extra_glue_term: Option<f64>,
    /// Gap of the variant that keeps the extra glue term.
    pub extra_glue_relative_gap: Option<f64>,
}

fn integrate(u: &PiecewiseDisplacement, f: impl Fn(usize, f64) -> f64) -> f64 {
    let rule = GaussRule::new(8);
    let mesh = u.mesh();
    (0..mesh.element_count())
        .map(|e| {
            let (a, b) = mesh.element(e);
            rule.integrate(a, b, |x| f(e, x))
        })
        .sum()
}

/// `c(ü u̇ - u⃛ u)` on one side of a node.
fn moment_work(u: &PiecewiseDisplacement, node: usize, side: Side, c: f64) -> f64 {
    match (u.second_derivative(node, side), u.third_derivative(node, side)) {
        (Some(d2), Some(d3)) => {
            let t = u.trace(node, side);
            c * (d2 * t.slope - d3 * t.value)
        }
        _ => 0.0,
    }
}

/// `c[ü u̇ - u⃛ u]` between the inner traces at ±1.
fn boundary(u: &PiecewiseDisplacement, c: f64) -> f64 {
    let last = u.mesh().last_node();
    moment_work(u, last, Side::Left, c) - moment_work(u, 0, Side::Right, c)
}

/// Sum of `c[ü u̇ - u⃛ u]` jumps (left minus right limits) at interior breaks.
fn interior(u: &PiecewiseDisplacement, c: f64) -> f64 {
    let mesh = u.mesh();
    mesh.break_nodes()
        .filter(|(i, _)| !mesh.is_endpoint(*i))
        .map(|(i, _)| moment_work(u, i, Side::Left, c) - moment_work(u, i, Side::Right, c))
        .sum()
}

fn load_work(u: &PiecewiseDisplacement, f: &LoadField) -> f64 {
    -0.5 * integrate(u, |e, x| f.eval(x) * u.element(e).value(x))
}

fn gap(a: f64, b: f64) -> f64 {
    let d = a.abs().max(b.abs());
    if d == 0.0 {
        0.0
    } else {
        (a - b).abs() / d
    }
}

/// The identity for an unconstrained hard-device or strengthening solution;
/// `None` otherwise.
pub fn check_compliance(problem: &Problem, fields: &Fields, energy: f64, damage: f64) -> Result<Option<ComplianceReport>> {
    if problem.constrained || problem.kind == ProblemKind::G1 {
        return Ok(None);
    }
    let p = &problem.params;
    let u = fields.primary();
    let load_term_r = load_work(u, problem.f_r());
    let boundary_r = boundary(u, p.eta);
    let mut interior_break_terms = interior(u, p.eta);
    let report = match fields.plate() {
        None => {
            let w = &problem.w;
            let glue_term = p.mu * integrate(u, |e, x| {
                let wv = w.value(x);
                wv * wv - wv * u.element(e).value(x)
            });
            let work_form = damage + glue_term + load_term_r + boundary_r;
            ComplianceReport {
                energy,
                damage,
                glue_term,
                load_term_r,
                load_term_p: 0.0,
                boundary_r,
                boundary_p: 0.0,
                work_form,
                relative_gap: gap(energy, work_form),
                interior_break_terms,
                extra_glue_term: None,
                extra_glue_relative_gap: None,
            }
        }
        Some(up) => {
            let f_p = problem.f_p();
            let load_term_p = load_work(up, &f_p);
            let boundary_p = boundary(up, p.gamma);
            interior_break_terms += interior(up, p.gamma);
            let work_form = damage + load_term_r + load_term_p + boundary_r + boundary_p;
            let extra = -p.mu * integrate(u, |e, x| (u.element(e).value(x) - up.element(e).value(x)).powi(2));
            ComplianceReport {
                energy,
                damage,
                glue_term: 0.0,
                load_term_r,
                load_term_p,
                boundary_r,
                boundary_p,
                work_form,
                relative_gap: gap(energy, work_form),
                interior_break_terms,
                extra_glue_term: Some(extra),
                extra_glue_relative_gap: Some(gap(energy, work_form + extra)),
            }
        }
    };
    Ok(Some(report))
}

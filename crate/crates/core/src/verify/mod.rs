//! Checks a computed minimizer against the conditions it must satisfy.
//!
//! Every condition has a descriptive name (see [`CONDITIONS`]); a report
//! carries exactly the conditions of [`schema`] for its problem, each with
//! the number of places it applies and its largest normalized violation.
//! Trace conditions are normalized by `‖ü‖∞`, weak residuals by the size of
//! the integrals they balance, first-order residuals by `1 + ‖g‖∞ + ‖H‖∞‖x‖∞`.
//! One-sided third derivatives at breaks are recovered from the equation on
//! the adjacent element, which makes them second-order accurate.

mod compliance;
mod euler;
mod threshold;

use serde::{Deserialize, Serialize};

use crate::breaks::{BreakConfig, BreakKind};
use crate::energy::{eval_energy, Fields, Problem};
use crate::error::Result;
use crate::field::{PiecewiseDisplacement, Side};
use crate::mesh::Mesh;
use crate::params::ProblemKind;
use crate::solve::{first_order_residual, Discretization, SolveReport};

pub use compliance::{check_compliance, ComplianceReport};
pub use euler::{EulerResidual, TEST_FUNCTIONS};
pub use threshold::{check_threshold, poincare_constant, poincare_constant_on, ThresholdReport, POINCARE_RESOLUTION};

use euler::{residual, Coef, WeakForm};

/// Relative gap below which a bounded unknown counts as sitting on its bound.
const CONTACT_TOLERANCE: f64 = 1e-10;

/// Name and statement of every condition a report may carry.
pub const CONDITIONS: &[(&str, &str)] = &[
    ("discrete_stationarity", "first-order conditions of the discrete problem"),
    ("pde_on_pieces", "η u'''' + μ(u - w) = f/2 on each piece (strengthening: w = u_p, f = f_r)"),
    ("pde_distributional", "η (ü)'' + μ(u - w) = f/2 in the sense of distributions on (-1, 1)"),
    ("crack_interior_traces", "ü± = u⃛± = 0 at interior cracks"),
    ("crease_interior_traces", "ü± = [u⃛] = 0 at interior creases"),
    ("crack_endpoint_traces", "ü = u⃛ = 0 on the inner side of a cracked end"),
    ("crease_endpoint_traces", "ü = 0 on the inner side of a creased end"),
    ("equal_release_traces", "when α = β: ü± = u⃛± = 0 at every break"),
    ("compliance_identity", "energy equals damage plus the work form of the loads"),
    ("plate_distributional", "γ u_p'''' + μ(u_p - u_r) = f_p/2 in the sense of distributions"),
    ("sum_on_pieces", "η u_r'''' + γ u_p'''' = (f_r + f_p)/2 on each piece"),
    ("sum_distributional", "η (ü_r)'' + γ u_p'''' = (f_r + f_p)/2 in the sense of distributions"),
    (
        "combined_distributional",
        "2η (ü_r)'' + μ(u_r - u_p) + γ u_p'''' = f_r + f_p/2 in the sense of distributions",
    ),
    ("hinge_moment_relation", "observed: 2η ü = σ sign([u̇]) at hinges, |2η ü| ≤ σ where the jump vanishes"),
    ("pde_off_contact", "the reinforcement equation holds away from the contact set"),
    ("plate_off_contact", "the plate equation holds away from the contact set"),
    ("contact_feasibility", "the unilateral constraint holds"),
    ("multiplier_sign", "contact multipliers are non-negative"),
    ("complementarity", "multipliers vanish off contact"),
    ("contact_second_derivative_right", "ü⁺ ≥ 0 at break traces in contact, except at x = 1"),
    ("contact_second_derivative_left", "ü⁻ ≥ 0 at break traces in contact, except at x = -1"),
    ("contact_third_derivative", "observed only: no condition on u⃛± at break traces in contact"),
];

/// Conditions carried by a report for `kind`, with or without the constraint.
pub fn schema(kind: ProblemKind, constrained: bool) -> Vec<&'static str> {
    const TRACES: [&str; 5] = [
        "crack_interior_traces",
        "crease_interior_traces",
        "crack_endpoint_traces",
        "crease_endpoint_traces",
        "equal_release_traces",
    ];
    const CONTACT: [&str; 6] = [
        "contact_feasibility",
        "multiplier_sign",
        "complementarity",
        "contact_second_derivative_right",
        "contact_second_derivative_left",
        "contact_third_derivative",
    ];
    let mut out = vec!["discrete_stationarity"];
    match (kind, constrained) {
        (ProblemKind::G1, _) => {
            out.extend(["pde_on_pieces", "plate_distributional", "sum_on_pieces", "hinge_moment_relation"]);
        }
        (_, false) => {
            out.extend(["pde_on_pieces", "pde_distributional"]);
            out.extend(TRACES);
            out.push("compliance_identity");
            if kind == ProblemKind::F1 {
                out.extend([
                    "plate_distributional",
                    "sum_on_pieces",
                    "sum_distributional",
                    "combined_distributional",
                ]);
            }
        }
        (_, true) => {
            out.push("pde_off_contact");
            out.extend(TRACES);
            out.extend(CONTACT);
            if kind == ProblemKind::F1 {
                out.extend(["plate_off_contact", "sum_on_pieces"]);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// An equation; the value is a normalized residual.
    Equation,
    /// An inequality; the value is a normalized violation.
    Sign,
    /// Recorded for information, not a condition the minimizer must meet.
    Observed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    pub kind: CheckKind,
    /// Number of places (intervals, breaks, constraints) where it applies.
    pub count: usize,
    /// Largest normalized violation; zero when `count` is zero.
    pub value: f64,
}

/// One-sided traces of the reinforcement at a break.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakTraces {
    pub node: usize,
    pub x: f64,
    pub kind: BreakKind,
    pub endpoint: bool,
    /// Some trace at this node sits on the obstacle.
    pub contact: bool,
    pub d2_left: Option<f64>,
    pub d2_right: Option<f64>,
    /// Third derivatives, recovered from the equation off the obstacle.
    pub d3_left: Option<f64>,
    pub d3_right: Option<f64>,
    pub value_jump: f64,
    pub slope_jump: f64,
}

/// Moment balance at a hinge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HingeRelation {
    pub node: usize,
    pub x: f64,
    pub jump: f64,
    /// `2η ü` on the inner (right, at x = 1 left) side.
    pub moment: f64,
    pub sigma: f64,
    pub residual: f64,
}

/// A trace in contact at a break.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactTrace {
    pub node: usize,
    pub x: f64,
    pub side: Side,
    pub d2: f64,
    pub d3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViReport {
    pub constraints: usize,
    pub active: usize,
    /// Largest `bound - value`, clipped at zero.
    pub infeasibility: f64,
    /// Largest `-λ`, clipped at zero.
    pub negative_multiplier: f64,
    /// Largest `|min(λ, gap)|`.
    pub complementarity: f64,
    pub contact_traces: Vec<ContactTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub problem: ProblemKind,
    pub constrained: bool,
    pub breaks: BreakConfig,
    pub stationarity: f64,
    /// `‖ü‖∞`, the scale of the trace conditions.
    pub curvature_scale: f64,
    pub euler: Vec<EulerResidual>,
    pub break_traces: Vec<BreakTraces>,
    pub hinges: Vec<HingeRelation>,
    pub compliance: Option<ComplianceReport>,
    pub vi: Option<ViReport>,
    /// Filled in by callers that also want the uniqueness threshold.
    pub threshold: Option<ThresholdReport>,
    pub conditions: Vec<ConditionCheck>,
}

impl VerificationReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionCheck> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// Largest value among the equations and sign conditions.
    pub fn worst(&self) -> f64 {
        self.conditions
            .iter()
            .filter(|c| c.kind != CheckKind::Observed)
            .map(|c| c.value)
            .fold(0.0, f64::max)
    }
}

struct Ledger {
    checks: Vec<ConditionCheck>,
}

impl Ledger {
    fn record(&mut self, name: &str, kind: CheckKind, values: impl IntoIterator<Item = f64>) {
        let (mut count, mut value) = (0, 0.0_f64);
        for v in values {
            count += 1;
            value = value.max(v);
        }
        self.checks.push(ConditionCheck {
            name: name.to_string(),
            kind,
            count,
            value,
        });
    }
}

fn curvature_coef<'a>(u: &'a PiecewiseDisplacement, c: f64) -> Coef<'a> {
    Box::new(move |e, x| c * u.element(e).d2(x))
}

fn value_coef<'a>(u: &'a PiecewiseDisplacement, c: f64) -> Coef<'a> {
    Box::new(move |e, x| c * u.element(e).value(x))
}

/// Node ranges of `pieces` split at `cuts`, keeping those with two elements or more.
fn split(pieces: &[(usize, usize)], cuts: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for &(a, b) in pieces {
        let mut start = a;
        for &c in cuts.iter().filter(|&&c| c > a && c < b) {
            out.push((start, c));
            start = c;
        }
        out.push((start, b));
    }
    out.retain(|(a, b)| b - a >= 2);
    out
}

/// `u''''` of the reinforcement at `x` in element `e`, from its equation on a
/// free piece.
fn fourth_derivative(problem: &Problem, fields: &Fields, e: usize, x: f64) -> f64 {
    let p = &problem.params;
    let u = fields.primary().element(e).value(x);
    let target = match fields.plate() {
        None => problem.w.value(x),
        Some(up) => up.element(e).value(x),
    };
    (0.5 * problem.f_r().eval(x) - p.mu * (u - target)) / p.eta
}

/// One-sided `u⃛` at `node`. The element's constant third derivative is
/// superconvergent at its midpoint; the equation carries it to the node.
/// Elements touching the obstacle keep the raw value.
fn recovered_d3(problem: &Problem, fields: &Fields, contact_nodes: &[usize], node: usize, side: Side) -> Option<f64> {
    let u = fields.primary();
    let e = u.element_on(node, side)?;
    let c = u.element(e);
    if contact_nodes.contains(&e) || contact_nodes.contains(&(e + 1)) {
        return Some(c.d3());
    }
    let (a, b) = u.mesh().element(e);
    let m = 0.5 * (a + b);
    Some(c.d3() + (u.mesh().nodes()[node] - m) * fourth_derivative(problem, fields, e, m))
}

fn break_traces(problem: &Problem, fields: &Fields, contact_nodes: &[usize]) -> Vec<BreakTraces> {
    let u = fields.primary();
    let mesh = u.mesh();
    let d3 = |i, side| recovered_d3(problem, fields, contact_nodes, i, side);
    mesh.break_nodes()
        .map(|(i, kind)| {
            let jump = u.jump(i);
            BreakTraces {
                node: i,
                x: mesh.nodes()[i],
                kind,
                endpoint: mesh.is_endpoint(i),
                contact: contact_nodes.contains(&i),
                d2_left: u.second_derivative(i, Side::Left),
                d2_right: u.second_derivative(i, Side::Right),
                d3_left: d3(i, Side::Left),
                d3_right: d3(i, Side::Right),
                value_jump: jump.value,
                slope_jump: jump.slope,
            }
        })
        .collect()
}

fn record_traces(ledger: &mut Ledger, traces: &[BreakTraces], scale: f64, equal_release: bool) {
    let bilateral: Vec<&BreakTraces> = traces.iter().filter(|t| !t.contact).collect();
    let abs = |v: Option<f64>| v.map_or(0.0, f64::abs) / scale;
    let select = |kind: BreakKind, endpoint: bool| {
        bilateral
            .iter()
            .filter(move |t| t.kind == kind && t.endpoint == endpoint)
            .copied()
    };
    let all = |t: &BreakTraces| {
        abs(t.d2_left)
            .max(abs(t.d2_right))
            .max(abs(t.d3_left))
            .max(abs(t.d3_right))
    };
    ledger.record("crack_interior_traces", CheckKind::Equation, select(BreakKind::Crack, false).map(all));
    ledger.record(
        "crease_interior_traces",
        CheckKind::Equation,
        select(BreakKind::Crease, false).map(|t| {
            let d3 = (t.d3_right.unwrap_or(0.0) - t.d3_left.unwrap_or(0.0)).abs() / scale;
            abs(t.d2_left).max(abs(t.d2_right)).max(d3)
        }),
    );
    ledger.record("crack_endpoint_traces", CheckKind::Equation, select(BreakKind::Crack, true).map(all));
    ledger.record(
        "crease_endpoint_traces",
        CheckKind::Equation,
        select(BreakKind::Crease, true).map(|t| abs(t.d2_left).max(abs(t.d2_right))),
    );
    let released = bilateral.iter().filter(|t| t.kind != BreakKind::Hinge).map(|t| all(t));
    if equal_release {
        ledger.record("equal_release_traces", CheckKind::Equation, released);
    } else {
        ledger.record("equal_release_traces", CheckKind::Equation, std::iter::empty());
    }
}

fn hinge_relations(u: &PiecewiseDisplacement, eta: f64, sigma: f64) -> Vec<HingeRelation> {
    let mesh = u.mesh();
    mesh.break_nodes()
        .filter(|(_, k)| *k == BreakKind::Hinge)
        .map(|(i, _)| {
            let side = if i == mesh.last_node() { Side::Left } else { Side::Right };
            let moment = 2.0 * eta * u.second_derivative(i, side).unwrap_or(0.0);
            let jump = u.jump(i).slope;
            let residual = if jump != 0.0 {
                (moment - sigma * jump.signum()).abs()
            } else {
                (moment.abs() - sigma).max(0.0)
            };
            HingeRelation {
                node: i,
                x: mesh.nodes()[i],
                jump,
                moment,
                sigma,
                residual,
            }
        })
        .collect()
}

/// Weak residuals of the equations in the schema of `problem`.
pub fn check_euler(problem: &Problem, fields: &Fields, contact_nodes: &[usize]) -> Vec<EulerResidual> {
    let p = &problem.params;
    let u = fields.primary();
    let mesh = u.mesh();
    let whole = [(0, mesh.last_node())];
    let pieces = mesh.pieces();
    let f_r = problem.f_r();
    let f_p = problem.f_p();
    let mut out = Vec::new();
    fn push<'a>(out: &mut Vec<EulerResidual>, mesh: &Mesh, ranges: &[(usize, usize)], name: &str, make: &dyn Fn() -> WeakForm<'a>) {
        for &(a, b) in ranges {
            out.push(residual(mesh, a, b, &make(), name));
        }
    }
    let load = |f: &crate::data::LoadField, c: f64| -> Coef<'_> {
        let f = f.clone();
        Box::new(move |_, x| c * f.eval(x))
    };
    match fields.plate() {
        None => {
            let w = &problem.w;
            let form = || WeakForm {
                second: vec![curvature_coef(u, p.eta)],
                zeroth: vec![
                    Box::new(|e, x| p.mu * (u.element(e).value(x) - w.value(x))),
                    load(f_r, -0.5),
                ],
            };
            if problem.constrained {
                push(&mut out, mesh, &split(&pieces, contact_nodes), "pde_off_contact", &form);
            } else {
                push(&mut out, mesh, &pieces, "pde_on_pieces", &form);
                push(&mut out, mesh, &whole, "pde_distributional", &form);
            }
        }
        Some(up) => {
            let r_form = || WeakForm {
                second: vec![curvature_coef(u, p.eta)],
                zeroth: vec![value_coef(u, p.mu), value_coef(up, -p.mu), load(f_r, -0.5)],
            };
            let p_form = || WeakForm {
                second: vec![curvature_coef(up, p.gamma)],
                zeroth: vec![value_coef(up, p.mu), value_coef(u, -p.mu), load(&f_p, -0.5)],
            };
            let sum_form = || WeakForm {
                second: vec![curvature_coef(u, p.eta), curvature_coef(up, p.gamma)],
                zeroth: vec![load(f_r, -0.5), load(&f_p, -0.5)],
            };
            let combined = || WeakForm {
                second: vec![curvature_coef(u, 2.0 * p.eta), curvature_coef(up, p.gamma)],
                zeroth: vec![value_coef(u, p.mu), value_coef(up, -p.mu), load(f_r, -1.0), load(&f_p, -0.5)],
            };
            if problem.constrained {
                push(&mut out, mesh, &split(&pieces, contact_nodes), "pde_off_contact", &r_form);
                push(&mut out, mesh, &split(&whole, contact_nodes), "plate_off_contact", &p_form);
                push(&mut out, mesh, &pieces, "sum_on_pieces", &sum_form);
            } else {
                push(&mut out, mesh, &pieces, "pde_on_pieces", &r_form);
                push(&mut out, mesh, &whole, "plate_distributional", &p_form);
                push(&mut out, mesh, &pieces, "sum_on_pieces", &sum_form);
                if problem.kind == ProblemKind::F1 {
                    push(&mut out, mesh, &whole, "pde_distributional", &r_form);
                    push(&mut out, mesh, &whole, "sum_distributional", &sum_form);
                    push(&mut out, mesh, &whole, "combined_distributional", &combined);
                }
            }
        }
    }
    out
}

/// Trace tables of the reinforcement at its breaks.
pub fn check_breaks(problem: &Problem, fields: &Fields, contact_nodes: &[usize]) -> Vec<BreakTraces> {
    break_traces(problem, fields, contact_nodes)
}

/// Feasibility, multiplier signs, complementarity and contact traces.
/// Multipliers come from `report`; gaps are recomputed from its unknowns.
pub fn check_vi(d: &Discretization, report: &SolveReport, u: &PiecewiseDisplacement) -> ViReport {
    let x = &report.dofs;
    let grad = d.form.gradient(x);
    let mut infeasibility: f64 = 0.0;
    let mut negative_multiplier: f64 = 0.0;
    let mut complementarity: f64 = 0.0;
    let mut active = 0;
    let mut contact_traces = Vec::new();
    let mesh = u.mesh();
    for (k, b) in d.layout.bounds.iter().enumerate() {
        let gap = x[b.dof] - b.bound;
        let lam = report.contacts.get(k).map_or_else(|| grad[b.dof].max(0.0), |c| c.multiplier);
        infeasibility = infeasibility.max(-gap);
        negative_multiplier = negative_multiplier.max(-lam);
        complementarity = complementarity.max(lam.min(gap).abs());
        if gap > CONTACT_TOLERANCE * (1.0 + b.bound.abs()) {
            continue;
        }
        active += 1;
        if mesh.kind_at(b.node).is_none() {
            continue;
        }
        let sides: &[Side] = match b.side {
            Some(Side::Left) => &[Side::Left],
            Some(Side::Right) => &[Side::Right],
            None => &[Side::Left, Side::Right],
        };
        for &side in sides {
            if let (Some(d2), Some(d3)) = (u.second_derivative(b.node, side), u.third_derivative(b.node, side)) {
                contact_traces.push(ContactTrace {
                    node: b.node,
                    x: mesh.nodes()[b.node],
                    side,
                    d2,
                    d3,
                });
            }
        }
    }
    ViReport {
        constraints: d.layout.bounds.len(),
        active,
        infeasibility,
        negative_multiplier,
        complementarity,
        contact_traces,
    }
}

fn contact_nodes(d: &Discretization, x: &[f64]) -> Vec<usize> {
    let mut nodes: Vec<usize> = d
        .layout
        .bounds
        .iter()
        .filter(|b| x[b.dof] - b.bound <= CONTACT_TOLERANCE * (1.0 + b.bound.abs()))
        .map(|b| b.node)
        .collect();
    nodes.dedup();
    nodes
}

/// Verifies `report` as a minimizer of `problem`. Fields are rebuilt from
/// the unknown vector, so a tampered vector shows up in every check.
pub fn verify_solution(problem: &Problem, report: &SolveReport) -> Result<VerificationReport> {
    let mesh: Mesh = report.fields.primary().mesh().clone();
    let d = Discretization::new(problem, &mesh)?;
    let fields = d.fields(&report.dofs)?;
    let breaks = d.breaks();
    let energy = eval_energy(problem.kind, &problem.params, &problem.w, &problem.loads, &breaks, &fields)?;
    let u = fields.primary();
    let p = &problem.params;
    let stationarity = first_order_residual(problem, &d, &report.dofs);
    let contacts = if problem.constrained {
        contact_nodes(&d, &report.dofs)
    } else {
        Vec::new()
    };
    let scale = match u.max_abs_second_derivative() {
        s if s > 0.0 => s,
        _ => 1.0,
    };
    let euler = check_euler(problem, &fields, &contacts);
    let traces = check_breaks(problem, &fields, &contacts);
    let hinges = if problem.kind == ProblemKind::G1 {
        hinge_relations(u, p.eta, p.sigma)
    } else {
        Vec::new()
    };
    let compliance = check_compliance(problem, &fields, energy.total, energy.damage)?;
    let vi = problem.constrained.then(|| check_vi(&d, report, u));

    let mut ledger = Ledger { checks: Vec::new() };
    ledger.record("discrete_stationarity", CheckKind::Equation, [stationarity]);
    for name in [
        "pde_on_pieces",
        "pde_distributional",
        "pde_off_contact",
        "plate_distributional",
        "plate_off_contact",
        "sum_on_pieces",
        "sum_distributional",
        "combined_distributional",
    ] {
        if euler.iter().any(|r| r.equation == name) {
            ledger.record(
                name,
                CheckKind::Equation,
                euler.iter().filter(|r| r.equation == name).map(|r| r.residual),
            );
        } else if schema(problem.kind, problem.constrained).contains(&name) {
            // no interval long enough to test on
            ledger.record(name, CheckKind::Equation, std::iter::empty());
        }
    }
    if problem.kind != ProblemKind::G1 {
        record_traces(&mut ledger, &traces, scale, p.alpha == p.beta);
    }
    if let Some(c) = &compliance {
        ledger.record("compliance_identity", CheckKind::Equation, [c.relative_gap]);
    }
    if problem.kind == ProblemKind::G1 {
        let norm = p.sigma.max(2.0 * p.eta * scale);
        ledger.record("hinge_moment_relation", CheckKind::Observed, hinges.iter().map(|h| h.residual / norm));
    }
    if let Some(v) = &vi {
        let bound_scale = 1.0 + d.layout.bounds.iter().map(|b| b.bound.abs()).fold(0.0, f64::max);
        let gs = d.gradient_scale();
        ledger.record("contact_feasibility", CheckKind::Sign, [v.infeasibility.max(0.0) / bound_scale]);
        ledger.record("multiplier_sign", CheckKind::Sign, [v.negative_multiplier.max(0.0) / gs]);
        ledger.record("complementarity", CheckKind::Equation, [v.complementarity]);
        let last = mesh.last_node();
        ledger.record(
            "contact_second_derivative_right",
            CheckKind::Sign,
            v.contact_traces
                .iter()
                .filter(|t| t.side == Side::Right && t.node != last)
                .map(|t| (-t.d2).max(0.0) / scale),
        );
        ledger.record(
            "contact_second_derivative_left",
            CheckKind::Sign,
            v.contact_traces
                .iter()
                .filter(|t| t.side == Side::Left && t.node != 0)
                .map(|t| (-t.d2).max(0.0) / scale),
        );
        ledger.record(
            "contact_third_derivative",
            CheckKind::Observed,
            v.contact_traces.iter().map(|t| t.d3.abs() / scale),
        );
    }
    // schema order
    let order = schema(problem.kind, problem.constrained);
    let mut conditions = Vec::with_capacity(order.len());
    for name in &order {
        if let Some(pos) = ledger.checks.iter().position(|c| c.name == *name) {
            conditions.push(ledger.checks.swap_remove(pos));
        }
    }
    Ok(VerificationReport {
        problem: problem.kind,
        constrained: problem.constrained,
        breaks,
        stationarity,
        curvature_scale: scale,
        euler,
        break_traces: traces,
        hinges,
        compliance,
        vi,
        threshold: None,
        conditions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DirichletDatum, LoadField, Loads};
    use crate::mesh::build_mesh;
    use crate::params::ModelParams;
    use crate::solve::solve_fixed;

    fn e1(f: f64) -> Problem {
        Problem::new(
            ProblemKind::E1,
            ModelParams::default(),
            DirichletDatum::polynomial(vec![0.1, 0.2]),
            Loads::single(LoadField::Constant(f)),
        )
    }

    #[test]
    fn schema_names_are_declared_once() {
        for kind in [ProblemKind::E1, ProblemKind::F1, ProblemKind::G1] {
            for c in [false, true] {
                let s = schema(kind, c);
                for name in &s {
                    assert_eq!(CONDITIONS.iter().filter(|(n, _)| n == name).count(), 1, "{name}");
                    assert_eq!(s.iter().filter(|n| n == &name).count(), 1, "{name}");
                }
            }
        }
    }

    #[test]
    fn report_follows_schema() {
        let problem = e1(1.0);
        let k = BreakConfig::single(0.0, BreakKind::Crack).unwrap();
        let sol = solve_fixed(&problem, &build_mesh(32, &k).unwrap()).unwrap();
        let rep = verify_solution(&problem, &sol).unwrap();
        let names: Vec<&str> = rep.conditions.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, schema(ProblemKind::E1, false));
        assert!(rep.conditions.iter().all(|c| c.value.is_finite()));
        assert!(rep.stationarity < 1e-10);
        assert_eq!(rep.condition("crack_interior_traces").unwrap().count, 1);
    }

    #[test]
    fn tampering_is_visible() {
        let problem = e1(1.0);
        let mut sol = solve_fixed(&problem, &build_mesh(16, &BreakConfig::empty()).unwrap()).unwrap();
        sol.dofs[3] += 1e-3;
        let rep = verify_solution(&problem, &sol).unwrap();
        assert!(rep.stationarity > 1e-6);
    }

    #[test]
    fn split_drops_short_intervals() {
        assert_eq!(split(&[(0, 10)], &[1, 5]), vec![(1, 5), (5, 10)]);
    }
}

//! Exact minimization for a fixed break configuration.

mod g1;
mod obstacle;

use serde::{Deserialize, Serialize};

use crate::banded::{norm_inf, solve_spd};
use crate::breaks::BreakConfig;
use crate::data::{DirichletDatum, LoadField, Loads};
use crate::energy::{eval_energy, EnergyBreakdown, Fields, Problem};
use crate::error::{Error, Result};
use crate::fem::{assemble_problem, QuadraticForm};
use crate::field::Side;
use crate::layout::Layout;
use crate::mesh::Mesh;
use crate::params::{ModelParams, ProblemKind};

pub use g1::minimize_l1_quadratic;
pub use obstacle::solve_box_qp;

/// Default stationarity tolerance for the iterative solvers.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Inner problem on one mesh: unknown layout and the smooth quadratic part.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub kind: ProblemKind,
    pub mesh: Mesh,
    pub layout: Layout,
    pub form: QuadraticForm,
}

impl Discretization {
    pub fn new(problem: &Problem, mesh: &Mesh) -> Result<Self> {
        problem.validate()?;
        mesh.break_config().validate_for(problem.kind)?;
        let layout = Layout::for_problem(problem.kind, mesh, &problem.w, problem.constrained)?;
        let f_p = problem.f_p();
        let form = assemble_problem(
            problem.kind,
            &problem.params,
            &problem.w,
            problem.f_r(),
            problem.kind.is_pair().then_some(&f_p),
            mesh,
            &layout,
        );
        Ok(Discretization {
            kind: problem.kind,
            mesh: mesh.clone(),
            layout,
            form,
        })
    }

    /// Fields described by the unknown vector `x`.
    pub fn fields(&self, x: &[f64]) -> Result<Fields> {
        if x.len() != self.layout.n_dofs {
            return Err(Error::MeshMismatch(format!(
                "expected {} unknowns, got {}",
                self.layout.n_dofs,
                x.len()
            )));
        }
        let u = self.layout.primary.reconstruct(&self.mesh, x)?;
        Ok(match &self.layout.plate {
            None => Fields::Single(u),
            Some(p) => {
                let plate_mesh = self.mesh.with_breaks(&BreakConfig::empty())?;
                Fields::Pair {
                    reinforcement: u,
                    plate: p.reconstruct(&plate_mesh, x)?,
                }
            }
        })
    }

    pub fn breaks(&self) -> BreakConfig {
        self.mesh.break_config()
    }

    /// `1 + ‖g‖∞`, the scale of first-order residuals.
    pub fn gradient_scale(&self) -> f64 {
        1.0 + norm_inf(&self.form.g)
    }
}

/// A unilateral constraint at the solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    pub node: usize,
    pub x: f64,
    /// Trace side when the constraint acts on one side of a break or an end.
    pub side: Option<Side>,
    /// Constrained quantity minus its bound.
    pub gap: f64,
    /// Lagrange multiplier; zero off the active set.
    pub multiplier: f64,
    pub active: bool,
}

/// Result of a fixed-break solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub breaks: BreakConfig,
    pub dofs: Vec<f64>,
    pub fields: Fields,
    pub energy: EnergyBreakdown,
    /// Largest violation of the first-order conditions, relative to `1 + ‖g‖∞ + ‖H‖∞‖x‖∞`.
    pub kkt_residual: f64,
    pub iterations: usize,
    /// Nodes where the unilateral constraint is active.
    pub active_set: Vec<usize>,
    /// Every unilateral constraint, active or not.
    pub contacts: Vec<Contact>,
    pub solver: String,
}

fn report(
    problem: &Problem,
    d: &Discretization,
    dofs: Vec<f64>,
    kkt_residual: f64,
    iterations: usize,
    contacts: Vec<Contact>,
    solver: &str,
) -> Result<SolveReport> {
    let fields = d.fields(&dofs)?;
    let breaks = d.breaks();
    let energy = eval_energy(problem.kind, &problem.params, &problem.w, &problem.loads, &breaks, &fields)?;
    let mut active_set: Vec<usize> = contacts.iter().filter(|c| c.active).map(|c| c.node).collect();
    active_set.dedup();
    Ok(SolveReport {
        breaks,
        dofs,
        fields,
        energy,
        kkt_residual,
        iterations,
        active_set,
        contacts,
        solver: solver.to_string(),
    })
}

/// Stationarity of the smooth problem, relative to `1 + ‖g‖∞ + ‖H‖∞‖x‖∞`.
pub fn stationarity(form: &QuadraticForm, x: &[f64]) -> f64 {
    norm_inf(&form.gradient(x)) / form.residual_scale(x)
}

/// First-order residual of `x` for the inner problem of `d`, relative to
/// `1 + ‖g‖∞ + ‖H‖∞‖x‖∞`: stationarity of the smooth part, subgradient conditions on
/// hinge jumps, and sign/complementarity conditions on bounded unknowns.
/// Multipliers are read off the gradient at unknowns sitting on their bound.
pub fn first_order_residual(problem: &Problem, d: &Discretization, x: &[f64]) -> f64 {
    let grad = d.form.gradient(x);
    let n = grad.len();
    let mut special = vec![false; n];
    let mut worst: f64 = 0.0;
    if problem.kind == ProblemKind::G1 {
        let sigma = problem.params.sigma;
        for j in &d.layout.jumps {
            special[j.dof] = true;
            let (q, v) = (grad[j.dof], x[j.dof]);
            let r = if v != 0.0 {
                (q + sigma * v.signum()).abs()
            } else {
                (q.abs() - sigma).max(0.0)
            };
            worst = worst.max(r);
        }
    }
    if problem.constrained {
        for b in &d.layout.bounds {
            special[b.dof] = true;
            let gap = x[b.dof] - b.bound;
            let r = if gap <= 0.0 {
                // on the bound: the multiplier is the gradient and must be >= 0
                (-gap).max((-grad[b.dof]).max(0.0))
            } else {
                grad[b.dof].abs()
            };
            worst = worst.max(r);
        }
    }
    for i in 0..n {
        if !special[i] {
            worst = worst.max(grad[i].abs());
        }
    }
    worst / d.form.residual_scale(x)
}

fn solve_linear(problem: &Problem, d: &Discretization) -> Result<SolveReport> {
    let x = solve_spd(&d.form.h, &d.form.g)?;
    let r = stationarity(&d.form, &x);
    report(problem, d, x, r, 1, Vec::new(), "banded-cholesky")
}

/// Minimizer of `problem` with the breaks carried by `mesh`.
pub fn solve_fixed(problem: &Problem, mesh: &Mesh) -> Result<SolveReport> {
    solve_fixed_with(problem, mesh, DEFAULT_TOLERANCE)
}

/// As [`solve_fixed`] with an explicit stationarity tolerance for the
/// iterative (hinge and obstacle) solvers.
pub fn solve_fixed_with(problem: &Problem, mesh: &Mesh, tol: f64) -> Result<SolveReport> {
    let d = Discretization::new(problem, mesh)?;
    solve_discretized(problem, &d, tol)
}

pub fn solve_discretized(problem: &Problem, d: &Discretization, tol: f64) -> Result<SolveReport> {
    if problem.constrained {
        let sol = obstacle::solve(&d.form, &d.layout.bounds, tol)?;
        let contacts = d
            .layout
            .bounds
            .iter()
            .zip(&sol.multipliers)
            .map(|(b, &lam)| Contact {
                node: b.node,
                x: d.mesh.nodes()[b.node],
                side: b.side,
                gap: sol.x[b.dof] - b.bound,
                multiplier: lam,
                active: lam > 0.0 || sol.x[b.dof] == b.bound,
            })
            .collect();
        let r = sol.kkt / d.form.residual_scale(&sol.x);
        return report(problem, d, sol.x, r, sol.iterations, contacts, sol.method);
    }
    match problem.kind {
        ProblemKind::E1 | ProblemKind::F1 => solve_linear(problem, d),
        ProblemKind::G1 => {
            if d.layout.jumps.is_empty() {
                return solve_linear(problem, d);
            }
            let jumps: Vec<usize> = d.layout.jumps.iter().map(|j| j.dof).collect();
            let sol = g1::solve(&d.form, &jumps, problem.params.sigma, tol * d.gradient_scale())?;
            let r = sol.residual / d.form.residual_scale(&sol.x);
            report(problem, d, sol.x, r, sol.iterations, Vec::new(), "schur-coordinate-descent")
        }
    }
}

fn mesh_for(mesh: &Mesh, k: &BreakConfig) -> Result<Mesh> {
    if mesh.break_config() == *k {
        Ok(mesh.clone())
    } else {
        mesh.with_breaks(k)
    }
}

/// Hard-device minimizer for fixed breaks `k` (which must sit on nodes of `mesh`).
pub fn solve_e1_fixed(p: &ModelParams, w: &DirichletDatum, f: &LoadField, k: &BreakConfig, mesh: &Mesh) -> Result<SolveReport> {
    let problem = Problem::new(ProblemKind::E1, *p, w.clone(), Loads::single(f.clone()));
    solve_fixed(&problem, &mesh_for(mesh, k)?)
}

/// Strengthening minimizer for fixed breaks of the reinforcement.
pub fn solve_f1_fixed(
    p: &ModelParams,
    w: &DirichletDatum,
    f_r: &LoadField,
    f_p: &LoadField,
    k: &BreakConfig,
    mesh: &Mesh,
) -> Result<SolveReport> {
    let problem = Problem::new(ProblemKind::F1, *p, w.clone(), Loads::pair(f_r.clone(), f_p.clone()));
    solve_fixed(&problem, &mesh_for(mesh, k)?)
}

/// Elastic-plastic minimizer for fixed hinges.
pub fn solve_g1_fixed(
    p: &ModelParams,
    w: &DirichletDatum,
    f_r: &LoadField,
    f_p: &LoadField,
    k: &BreakConfig,
    mesh: &Mesh,
) -> Result<SolveReport> {
    let problem = Problem::new(ProblemKind::G1, *p, w.clone(), Loads::pair(f_r.clone(), f_p.clone()));
    solve_fixed(&problem, &mesh_for(mesh, k)?)
}

/// Hard-device minimizer under `u >= w`.
pub fn solve_e1_obstacle(p: &ModelParams, w: &DirichletDatum, f: &LoadField, k: &BreakConfig, mesh: &Mesh) -> Result<SolveReport> {
    let problem = Problem::new(ProblemKind::E1, *p, w.clone(), Loads::single(f.clone())).with_constraint(true);
    solve_fixed(&problem, &mesh_for(mesh, k)?)
}

/// Strengthening minimizer under `u_r >= u_p`.
pub fn solve_f1_obstacle(
    p: &ModelParams,
    w: &DirichletDatum,
    f_r: &LoadField,
    f_p: &LoadField,
    k: &BreakConfig,
    mesh: &Mesh,
) -> Result<SolveReport> {
    let problem =
        Problem::new(ProblemKind::F1, *p, w.clone(), Loads::pair(f_r.clone(), f_p.clone())).with_constraint(true);
    solve_fixed(&problem, &mesh_for(mesh, k)?)
}

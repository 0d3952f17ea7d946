//! The three energies, evaluated term by term on piecewise-cubic fields.

use serde::{Deserialize, Serialize};

use crate::breaks::{damage_count, BreakConfig, BreakKind};
use crate::data::{DirichletDatum, LoadField, Loads};
use crate::error::{Error, Result};
use crate::field::PiecewiseDisplacement;
use crate::params::{validate_params, ModelParams, ProblemKind};
use crate::quadrature::GaussRule;

/// Everything that defines an instance except the mesh and the breaks.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub kind: ProblemKind,
    pub params: ModelParams,
    pub w: DirichletDatum,
    pub loads: Loads,
    /// Unilateral constraint: `u >= w` for E1, `u_r >= u_p` for F1.
    pub constrained: bool,
}

impl Problem {
    pub fn new(kind: ProblemKind, params: ModelParams, w: DirichletDatum, loads: Loads) -> Self {
        Problem {
            kind,
            params,
            w,
            loads,
            constrained: false,
        }
    }

    pub fn with_constraint(mut self, constrained: bool) -> Self {
        self.constrained = constrained;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_params(&self.params, self.kind)?;
        if self.constrained && self.kind == ProblemKind::G1 {
            return Err(Error::Unsupported(
                "unilateral constraint is available for E1 and F1 only".into(),
            ));
        }
        Ok(())
    }

    pub fn f_r(&self) -> &LoadField {
        self.loads.reinforcement()
    }

    /// Plate load; zero when absent.
    pub fn f_p(&self) -> LoadField {
        self.loads.plate().cloned().unwrap_or_default()
    }
}

/// The displacement(s) an energy is evaluated on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Fields {
    Single(PiecewiseDisplacement),
    Pair {
        reinforcement: PiecewiseDisplacement,
        plate: PiecewiseDisplacement,
    },
}

impl Fields {
    /// The broken field: `u` for E1, `u_r` otherwise.
    pub fn primary(&self) -> &PiecewiseDisplacement {
        match self {
            Fields::Single(u) => u,
            Fields::Pair { reinforcement, .. } => reinforcement,
        }
    }

    pub fn plate(&self) -> Option<&PiecewiseDisplacement> {
        match self {
            Fields::Single(_) => None,
            Fields::Pair { plate, .. } => Some(plate),
        }
    }
}

/// Per-term values of an energy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `α·#cracks + β·#creases`, or `β·#hinges` for G1.
    pub damage: f64,
    /// `η∫|ü_r|²`.
    pub bending_r: f64,
    /// `−∫f_r u_r`.
    pub load_r: f64,
    /// `μ∫|u−w|²` (E1) or `μ∫|u_r−u_p|²`.
    pub glue: f64,
    /// `γ∫|u_p''|²`.
    pub bending_p: f64,
    /// `−∫f_p u_p`.
    pub load_p: f64,
    /// `σ·Σ|[u̇_r]|` over hinges.
    pub plastic: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn parts_sum(&self) -> f64 {
        self.damage + self.bending_r + self.load_r + self.glue + self.bending_p + self.load_p + self.plastic
    }

    /// Elastic part: everything but damage and plastic work.
    pub fn elastic(&self) -> f64 {
        self.bending_r + self.load_r + self.glue + self.bending_p + self.load_p
    }
}

fn check_conforms(u: &PiecewiseDisplacement, k: &BreakConfig) -> Result<()> {
    if u.mesh().break_config() != *k {
        return Err(Error::MeshMismatch(format!(
            "field carries breaks {} but the configuration is {k}",
            u.mesh().break_config()
        )));
    }
    Ok(())
}

fn bending(u: &PiecewiseDisplacement) -> f64 {
    (0..u.mesh().element_count()).map(|e| u.element(e).bending_energy()).sum()
}

fn integrate(u: &PiecewiseDisplacement, rule: &GaussRule, g: impl Fn(f64, f64) -> f64) -> f64 {
    let m = u.mesh();
    (0..m.element_count())
        .map(|e| {
            let (a, b) = m.element(e);
            let c = u.element(e);
            rule.mapped(a, b).map(|(x, wq)| wq * g(x, c.value(x))).sum::<f64>()
        })
        .sum()
}

/// `Σ |[u̇]|` over the hinge nodes of `u`.
pub fn hinge_jump_sum(u: &PiecewiseDisplacement) -> f64 {
    u.mesh()
        .break_nodes()
        .filter(|&(_, k)| k == BreakKind::Hinge)
        .map(|(i, _)| u.jump(i).slope.abs())
        .sum()
}

/// Evaluates the energy of `problem` term by term.
///
/// The field(s) must carry exactly the breaks in `k`; the plate is unbroken.
/// Element integrals use the 4-point Gauss rule, exact for the squared
/// second derivative and the mass terms of cubics.
pub fn eval_energy(
    problem: ProblemKind,
    p: &ModelParams,
    w: &DirichletDatum,
    loads: &Loads,
    k: &BreakConfig,
    fields: &Fields,
) -> Result<EnergyBreakdown> {
    let rule = GaussRule::element();
    let u = fields.primary();
    check_conforms(u, k)?;
    k.validate_for(problem)?;
    let f_r = loads.reinforcement();
    let mut out = EnergyBreakdown {
        damage: damage_count(k, p, problem),
        bending_r: p.eta * bending(u),
        load_r: -integrate(u, &rule, |x, v| f_r.eval(x) * v),
        ..Default::default()
    };
    match (problem, fields) {
        (ProblemKind::E1, Fields::Single(u)) => {
            out.glue = p.mu * integrate(u, &rule, |x, v| (v - w.value(x)).powi(2));
        }
        (ProblemKind::F1 | ProblemKind::G1, Fields::Pair { reinforcement, plate }) => {
            if plate.mesh().nodes() != reinforcement.mesh().nodes() {
                return Err(Error::MeshMismatch("plate and reinforcement meshes differ".into()));
            }
            if plate.mesh().break_nodes().next().is_some() {
                return Err(Error::MeshMismatch("the plate cannot carry breaks".into()));
            }
            let rm = reinforcement.mesh();
            out.glue = p.mu
                * (0..rm.element_count())
                    .map(|e| {
                        let (a, b) = rm.element(e);
                        let (cr, cp) = (reinforcement.element(e), plate.element(e));
                        rule.mapped(a, b)
                            .map(|(x, wq)| wq * (cr.value(x) - cp.value(x)).powi(2))
                            .sum::<f64>()
                    })
                    .sum::<f64>();
            out.bending_p = p.gamma * bending(plate);
            let zero = LoadField::zero();
            let f_p = loads.plate().unwrap_or(&zero);
            out.load_p = -integrate(plate, &rule, |x, v| f_p.eval(x) * v);
            if problem == ProblemKind::G1 {
                out.plastic = p.sigma * hinge_jump_sum(reinforcement);
            }
        }
        _ => {
            return Err(Error::MeshMismatch(format!(
                "{problem} needs {} field(s)",
                if problem.is_pair() { "two" } else { "one" }
            )))
        }
    }
    out.total = out.parts_sum();
    Ok(out)
}

/// Hard-device energy written as a second-order segmentation functional:
/// `J(v) + η∫|v̈|² + μ∫(v − g)²` with `g = w + f/(2μ)`, minus the constant
/// `∫(fw + f²/(4μ))`. Equals [`eval_energy`] for E1.
pub fn blake_zisserman_form(
    p: &ModelParams,
    w: &DirichletDatum,
    f: &LoadField,
    k: &BreakConfig,
    u: &PiecewiseDisplacement,
) -> Result<(f64, f64)> {
    check_conforms(u, k)?;
    let rule = GaussRule::element();
    let g = |x: f64| w.value(x) + f.eval(x) / (2.0 * p.mu);
    let bz = damage_count(k, p, ProblemKind::E1)
        + p.eta * bending(u)
        + p.mu * integrate(u, &rule, |x, v| (v - g(x)).powi(2));
    let m = u.mesh();
    let shift: f64 = (0..m.element_count())
        .map(|e| {
            let (a, b) = m.element(e);
            rule.integrate(a, b, |x| {
                let fx = f.eval(x);
                fx * w.value(x) + fx * fx / (4.0 * p.mu)
            })
        })
        .sum();
    Ok((bz, shift))
}

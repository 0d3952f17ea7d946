//! Problem definitions read from TOML.
//!
//! ```toml
//! problem = "E1"            # E1 | F1 | G1
//! constrained = false
//! n = 64
//!
//! [params]
//! eta = 1.0
//! beta = 0.5
//!
//! [datum]
//! expression = "0.1 * x"    # or polynomial = [...], or [datum.spline]
//!
//! [loads]
//! reinforcement = "1 + x"   # number, expression, or { x = [...], y = [...] }
//!
//! [[breaks]]
//! x = 0.0
//! kind = "crack"
//! ```

use serde::{Deserialize, Serialize};

use flexbeam_core::{
    Break, BreakConfig, CubicSpline, DirichletDatum, LoadField, Loads, ModelParams, Problem, ProblemKind, SearchPolicy,
    SplineEnds,
};

use crate::error::CliError;

fn default_n() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub problem: String,
    #[serde(default)]
    pub constrained: bool,
    /// Number of uniform elements.
    #[serde(default = "default_n")]
    pub n: usize,
    /// Stationarity tolerance of the iterative inner solvers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default)]
    pub params: ParamsSpec,
    #[serde(default)]
    pub datum: DatumSpec,
    #[serde(default)]
    pub loads: LoadsSpec,
    #[serde(default)]
    pub breaks: Vec<BreakSpec>,
    #[serde(default)]
    pub search: SearchSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spline: Option<SplineSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplineSpec {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
    /// `natural` (default) or `clamped`, which needs both slopes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ends: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LoadSpec {
    Constant(f64),
    Expression(String),
    Samples { x: Vec<f64>, y: Vec<f64> },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadsSpec {
    #[serde(default, alias = "f", skip_serializing_if = "Option::is_none")]
    pub reinforcement: Option<LoadSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plate: Option<LoadSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BreakSpec {
    pub x: f64,
    pub kind: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustive_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refine_positions: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate_nodes: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Dotted path of a scalar in this spec, e.g. `params.beta`.
    pub field: String,
    pub values: Vec<f64>,
    /// `search` (default) or `solve`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<bool>,
}

fn field_err(field: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Spec(format!("{field}: {e}"))
}

impl ProblemSpec {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let spec: ProblemSpec = toml::from_str(text).map_err(|e| CliError::Spec(e.to_string()))?;
        spec.problem()?;
        Ok(spec)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, CliError> {
        serde_json::from_value(value.clone()).map_err(|e| CliError::Spec(format!("spec echo: {e}")))
    }

    pub fn kind(&self) -> Result<ProblemKind, CliError> {
        self.problem.parse().map_err(|e| field_err("problem", e))
    }

    pub fn params(&self) -> ModelParams {
        let d = ModelParams::default();
        let p = &self.params;
        ModelParams {
            eta: p.eta.unwrap_or(d.eta),
            mu: p.mu.unwrap_or(d.mu),
            gamma: p.gamma.unwrap_or(d.gamma),
            alpha: p.alpha.unwrap_or(d.alpha),
            beta: p.beta.unwrap_or(d.beta),
            sigma: p.sigma.unwrap_or(d.sigma),
        }
    }

    pub fn datum(&self) -> Result<DirichletDatum, CliError> {
        let d = &self.datum;
        let given = [d.expression.is_some(), d.polynomial.is_some(), d.spline.is_some()];
        if given.iter().filter(|&&g| g).count() > 1 {
            return Err(field_err("datum", "give one of expression, polynomial or spline"));
        }
        if let Some(src) = &d.expression {
            return DirichletDatum::expression(src).map_err(|e| field_err("datum.expression", e));
        }
        if let Some(c) = &d.polynomial {
            if c.is_empty() {
                return Err(field_err("datum.polynomial", "needs at least one coefficient"));
            }
            return Ok(DirichletDatum::polynomial(c.clone()));
        }
        if let Some(s) = &d.spline {
            let ends = match s.ends.as_deref().unwrap_or("natural") {
                "natural" => SplineEnds::Natural,
                "clamped" => match (s.left_slope, s.right_slope) {
                    (Some(l), Some(r)) => SplineEnds::Clamped {
                        left_slope: l,
                        right_slope: r,
                    },
                    _ => return Err(field_err("datum.spline", "clamped ends need left_slope and right_slope")),
                },
                other => return Err(field_err("datum.spline.ends", format!("unknown end condition `{other}`"))),
            };
            let spline =
                CubicSpline::new(s.knots.clone(), s.values.clone(), ends).map_err(|e| field_err("datum.spline", e))?;
            return Ok(DirichletDatum::Spline(spline));
        }
        Ok(DirichletDatum::zero())
    }

    fn load(spec: &Option<LoadSpec>, field: &str) -> Result<LoadField, CliError> {
        match spec {
            None => Ok(LoadField::zero()),
            Some(LoadSpec::Constant(c)) => Ok(LoadField::Constant(*c)),
            Some(LoadSpec::Expression(s)) => LoadField::expression(s).map_err(|e| field_err(field, e)),
            Some(LoadSpec::Samples { x, y }) => LoadField::samples(x.clone(), y.clone()).map_err(|e| field_err(field, e)),
        }
    }

    pub fn loads(&self) -> Result<Loads, CliError> {
        let f_r = Self::load(&self.loads.reinforcement, "loads.reinforcement")?;
        if self.kind()?.is_pair() {
            Ok(Loads::pair(f_r, Self::load(&self.loads.plate, "loads.plate")?))
        } else {
            if self.loads.plate.is_some() {
                return Err(field_err("loads.plate", "the hard-device energy has no plate"));
            }
            Ok(Loads::single(f_r))
        }
    }

    /// The validated problem.
    pub fn problem(&self) -> Result<Problem, CliError> {
        let kind = self.kind()?;
        if self.n < 2 {
            return Err(field_err("n", "at least two elements are needed"));
        }
        let problem = Problem::new(kind, self.params(), self.datum()?, self.loads()?).with_constraint(self.constrained);
        problem.validate().map_err(|e| field_err("params", e))?;
        Ok(problem)
    }

    pub fn breaks(&self) -> Result<BreakConfig, CliError> {
        let list = self
            .breaks
            .iter()
            .map(|b| Ok(Break::new(b.x, b.kind.parse().map_err(|e| field_err("breaks.kind", e))?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        BreakConfig::new(list).map_err(|e| field_err("breaks", e))
    }

    pub fn policy(&self) -> SearchPolicy {
        let d = SearchPolicy::default();
        let s = &self.search;
        SearchPolicy {
            candidate_nodes: s.candidate_nodes.clone(),
            k_max: s.k_max.unwrap_or(d.k_max),
            exhaustive_cap: s.exhaustive_cap.unwrap_or(d.exhaustive_cap),
            refine_positions: s.refine_positions.unwrap_or(d.refine_positions),
            tolerance: self.tol.unwrap_or(d.tolerance),
        }
    }

    /// Copy with the scalar at dotted `path` replaced by `value`.
    pub fn with_field(&self, path: &str, value: f64) -> Result<ProblemSpec, CliError> {
        let mut v = serde_json::to_value(self).map_err(|e| CliError::Spec(e.to_string()))?;
        let not_scalar = || field_err("sweep.field", format!("`{path}` does not name a scalar"));
        let (parents, last) = match path.rsplit_once('.') {
            Some((p, l)) => (p.split('.').collect::<Vec<_>>(), l),
            None => (Vec::new(), path),
        };
        let mut cur = &mut v;
        for part in parents {
            cur = cur
                .as_object_mut()
                .ok_or_else(not_scalar)?
                .entry(part.to_string())
                .or_insert_with(|| serde_json::json!({}));
        }
        let slot = cur
            .as_object_mut()
            .ok_or_else(not_scalar)?
            .entry(last.to_string())
            .or_insert(serde_json::Value::Null);
        if slot.is_object() || slot.is_array() {
            return Err(not_scalar());
        }
        *slot = if matches!(last, "n" | "k_max" | "exhaustive_cap") {
            serde_json::Value::from(value as u64)
        } else {
            serde_json::Value::from(value)
        };
        let spec: ProblemSpec =
            serde_json::from_value(v).map_err(|e| field_err("sweep.field", format!("`{path}`: {e}")))?;
        spec.problem()?;
        Ok(spec)
    }
}

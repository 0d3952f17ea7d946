//! The singular set of a displacement: finitely many cracks, creases or hinges.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ModelParams, ProblemKind};

/// Minimum separation between two break locations.
pub const MIN_BREAK_SEPARATION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BreakKind {
    /// Jump of the displacement (and, freely, of its slope).
    Crack,
    /// Continuous displacement with a slope jump.
    Crease,
    /// Elastic-plastic slope jump, priced per unit of jump as well.
    Hinge,
}

impl BreakKind {
    pub fn name(self) -> &'static str {
        match self {
            BreakKind::Crack => "crack",
            BreakKind::Crease => "crease",
            BreakKind::Hinge => "hinge",
        }
    }

    /// Whether the displacement may jump here.
    pub fn releases_value(self) -> bool {
        matches!(self, BreakKind::Crack)
    }

    /// Kinds admitted by an energy.
    pub fn admissible_for(kind: ProblemKind) -> &'static [BreakKind] {
        match kind {
            ProblemKind::E1 | ProblemKind::F1 => &[BreakKind::Crack, BreakKind::Crease],
            ProblemKind::G1 => &[BreakKind::Hinge],
        }
    }
}

impl fmt::Display for BreakKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BreakKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "crack" => Ok(BreakKind::Crack),
            "crease" => Ok(BreakKind::Crease),
            "hinge" => Ok(BreakKind::Hinge),
            other => Err(Error::InvalidBreaks(format!("unknown break kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Break {
    pub x: f64,
    pub kind: BreakKind,
}

impl Break {
    pub fn new(x: f64, kind: BreakKind) -> Self {
        Break { x, kind }
    }
}

/// Sorted, duplicate-free list of breaks in [-1, 1].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Break>", into = "Vec<Break>")]
pub struct BreakConfig {
    breaks: Vec<Break>,
}

impl TryFrom<Vec<Break>> for BreakConfig {
    type Error = Error;

    fn try_from(v: Vec<Break>) -> Result<Self> {
        BreakConfig::new(v)
    }
}

impl From<BreakConfig> for Vec<Break> {
    fn from(k: BreakConfig) -> Self {
        k.breaks
    }
}

impl BreakConfig {
    pub fn empty() -> Self {
        BreakConfig::default()
    }

    /// Sorts the breaks and checks range and separation.
    pub fn new(mut breaks: Vec<Break>) -> Result<Self> {
        if let Some(b) = breaks.iter().find(|b| !b.x.is_finite() || b.x < -1.0 || b.x > 1.0) {
            return Err(Error::InvalidBreaks(format!("location {} outside [-1, 1]", b.x)));
        }
        breaks.sort_by(|a, b| a.x.total_cmp(&b.x));
        for w in breaks.windows(2) {
            if w[1].x - w[0].x < MIN_BREAK_SEPARATION {
                return Err(Error::InvalidBreaks(format!(
                    "breaks at {} and {} are not separated",
                    w[0].x, w[1].x
                )));
            }
        }
        Ok(BreakConfig { breaks })
    }

    pub fn single(x: f64, kind: BreakKind) -> Result<Self> {
        BreakConfig::new(vec![Break::new(x, kind)])
    }

    pub fn breaks(&self) -> &[Break] {
        &self.breaks
    }

    pub fn len(&self) -> usize {
        self.breaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breaks.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Break> {
        self.breaks.iter()
    }

    pub fn count(&self, kind: BreakKind) -> usize {
        self.breaks.iter().filter(|b| b.kind == kind).count()
    }

    /// Checks that every break kind is admitted by `problem`.
    pub fn validate_for(&self, problem: ProblemKind) -> Result<()> {
        let allowed = BreakKind::admissible_for(problem);
        match self.breaks.iter().find(|b| !allowed.contains(&b.kind)) {
            Some(b) => Err(Error::InvalidBreaks(format!(
                "{} at {} is not admissible for {problem}",
                b.kind, b.x
            ))),
            None => Ok(()),
        }
    }

    /// Lexicographic order on (location, kind) sequences; shorter prefixes first.
    pub fn lex_cmp(&self, other: &BreakConfig) -> Ordering {
        for (a, b) in self.breaks.iter().zip(&other.breaks) {
            let o = a.x.total_cmp(&b.x).then(a.kind.cmp(&b.kind));
            if o != Ordering::Equal {
                return o;
            }
        }
        self.breaks.len().cmp(&other.breaks.len())
    }
}

impl fmt::Display for BreakConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, b) in self.breaks.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}@{}", b.kind, b.x)?;
        }
        f.write_str("}")
    }
}

/// Damage energy priced from the configuration: `alpha`·cracks + `beta`·creases
/// for E1/F1, `beta`·hinges for G1. Slope-jump magnitudes of hinges are priced
/// separately.
pub fn damage_count(k: &BreakConfig, p: &ModelParams, problem: ProblemKind) -> f64 {
    match problem {
        ProblemKind::E1 | ProblemKind::F1 => {
            p.alpha * k.count(BreakKind::Crack) as f64 + p.beta * k.count(BreakKind::Crease) as f64
        }
        ProblemKind::G1 => p.beta * k.count(BreakKind::Hinge) as f64,
    }
}

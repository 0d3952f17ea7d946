//! Constitutive constants and the three energy variants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which reinforced-beam energy is being minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProblemKind {
    /// Hard device: the substrate displacement is prescribed.
    E1,
    /// Strengthening: reinforcement and plate both deform, glued together.
    F1,
    /// Elastic-plastic strengthening: continuous reinforcement with priced hinges.
    G1,
}

impl ProblemKind {
    /// Whether the energy has a second (plate) field.
    pub fn is_pair(self) -> bool {
        !matches!(self, ProblemKind::E1)
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProblemKind::E1 => "E1",
            ProblemKind::F1 => "F1",
            ProblemKind::G1 => "G1",
        };
        f.write_str(s)
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "E1" => Ok(ProblemKind::E1),
            "F1" => Ok(ProblemKind::F1),
            "G1" => Ok(ProblemKind::G1),
            other => Err(Error::ParamViolation(format!(
                "unknown problem kind `{other}` (expected E1, F1 or G1)"
            ))),
        }
    }
}

/// Constitutive constants shared by all three energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Bending stiffness of the reinforcement.
    pub eta: f64,
    /// Adhesive stiffness.
    pub mu: f64,
    /// Bending stiffness of the plate.
    pub gamma: f64,
    /// Crack release energy.
    pub alpha: f64,
    /// Crease (hinge) release energy.
    pub beta: f64,
    /// Plastic yield modulus, priced per unit slope jump.
    pub sigma: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            eta: 1.0,
            mu: 1.0,
            gamma: 1.0,
            alpha: 1.0,
            beta: 1.0,
            sigma: 0.0,
        }
    }
}

impl ModelParams {
    /// Checks the admissibility constraints for `kind`.
    pub fn validate(&self, kind: ProblemKind) -> Result<()> {
        validate_params(self, kind)
    }
}

fn violation(msg: impl Into<String>) -> Error {
    Error::ParamViolation(msg.into())
}

/// Checks the constitutive constants against the requirements of `kind`.
///
/// E1 and F1 admit cracks, which needs `0 < beta <= alpha <= 2 beta`.
/// G1 only prices hinges, so `beta >= 0` suffices there.
pub fn validate_params(p: &ModelParams, kind: ProblemKind) -> Result<()> {
    let all = [p.eta, p.mu, p.gamma, p.alpha, p.beta, p.sigma];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(violation("all parameters must be finite"));
    }
    if p.eta <= 0.0 {
        return Err(violation("eta > 0"));
    }
    if p.mu <= 0.0 {
        return Err(violation("mu > 0"));
    }
    if kind.is_pair() && p.gamma <= 0.0 {
        return Err(violation("gamma > 0"));
    }
    if p.sigma < 0.0 {
        return Err(violation("sigma >= 0"));
    }
    match kind {
        ProblemKind::E1 | ProblemKind::F1 => {
            if p.beta <= 0.0 {
                return Err(violation("0 < beta"));
            }
            if p.alpha < p.beta {
                return Err(violation("beta <= alpha"));
            }
            if p.alpha > 2.0 * p.beta {
                return Err(violation("alpha <= 2 beta"));
            }
        }
        ProblemKind::G1 => {
            if p.beta < 0.0 {
                return Err(violation("beta >= 0"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(alpha: f64, beta: f64) -> ModelParams {
        ModelParams {
            alpha,
            beta,
            ..ModelParams::default()
        }
    }

    #[test]
    fn equal_release_energies_are_admissible() {
        assert!(validate_params(&p(1.0, 1.0), ProblemKind::E1).is_ok());
    }

    #[test]
    fn crack_energy_above_twice_crease_is_rejected() {
        let err = validate_params(&p(3.0, 1.0), ProblemKind::E1).unwrap_err();
        assert_eq!(err, Error::ParamViolation("alpha <= 2 beta".into()));
    }

    #[test]
    fn crack_cheaper_than_crease_is_rejected() {
        let err = validate_params(&p(0.5, 1.0), ProblemKind::F1).unwrap_err();
        assert_eq!(err, Error::ParamViolation("beta <= alpha".into()));
    }

    #[test]
    fn elastic_plastic_allows_free_hinges() {
        let params = ModelParams {
            beta: 0.0,
            sigma: 1.0,
            gamma: 1.0,
            ..ModelParams::default()
        };
        assert!(validate_params(&params, ProblemKind::G1).is_ok());
        assert!(validate_params(&params, ProblemKind::E1).is_err());
    }

    #[test]
    fn stiffnesses_must_be_positive() {
        let mut params = ModelParams::default();
        params.mu = 0.0;
        assert_eq!(
            validate_params(&params, ProblemKind::E1).unwrap_err(),
            Error::ParamViolation("mu > 0".into())
        );
        params.mu = 1.0;
        params.gamma = 0.0;
        assert!(validate_params(&params, ProblemKind::E1).is_ok());
        assert!(validate_params(&params, ProblemKind::F1).is_err());
    }

    #[test]
    fn kind_parses_case_insensitively() {
        assert_eq!("g1".parse::<ProblemKind>().unwrap(), ProblemKind::G1);
        assert!("H1".parse::<ProblemKind>().is_err());
    }
}

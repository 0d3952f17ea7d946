//! Minimizers of the one-dimensional reinforced-beam energies.
//!
//! Three energies are supported on a clamped beam over [-1, 1]:
//!
//! * `E1`, hard-device reinforcement glued to a prescribed substrate `w`;
//! * `F1`, strengthening reinforcement glued to a deformable plate;
//! * `F1`'s elastic-plastic variant `G1`, where the reinforcement stays
//!   continuous and slope jumps (hinges) are priced by count and magnitude.
//!
//! The reinforcement may crack (value jump, price `alpha`) or crease (slope
//! jump, price `beta`). For a fixed break set the energies are convex
//! quadratics, minimized exactly on an H²-conforming cubic Hermite mesh; the
//! break set itself is found by [`search`]. [`verify`] checks computed
//! minimizers against the first-order conditions they must satisfy.

pub mod banded;
pub mod breaks;
pub mod data;
pub mod energy;
pub mod error;
pub mod expr;
pub mod fem;
pub mod field;
pub mod hermite;
pub mod layout;
pub mod mesh;
pub mod params;
pub mod quadrature;
pub mod search;
pub mod solve;
pub mod verify;

pub use breaks::{damage_count, Break, BreakConfig, BreakKind};
pub use data::{CubicSpline, DirichletDatum, LoadField, Loads, SplineEnds};
pub use energy::{blake_zisserman_form, eval_energy, EnergyBreakdown, Fields, Problem};
pub use error::{Error, Result};
pub use fem::{assemble_bending, assemble_load, assemble_mass, QuadraticForm};
pub use field::{PiecewiseDisplacement, Side, Trace};
pub use mesh::{build_mesh, Mesh};
pub use params::{validate_params, ModelParams, ProblemKind};
pub use search::{refine_positions, search, Certificate, SearchPolicy, SearchResult};
pub use solve::{
    solve_e1_fixed, solve_e1_obstacle, solve_f1_fixed, solve_f1_obstacle, solve_fixed, solve_g1_fixed, Discretization,
    SolveReport,
};
pub use verify::{poincare_constant, verify_solution, VerificationReport};

//! Solvers for monotone variational inequalities and complementarity problems
//! over separable cones.
//!
//! Three fixed-point iterations are provided:
//!
//! * [`iterative::solve_exact`]: the projection method
//!   `x ← Π_C(x − αF(x))`;
//! * [`iterative::solve_bertsekas`]: the same iteration projected onto
//!   `Ĉ = C ∩ span(Φ)`;
//! * [`iterative::solve_galerkin`]: the two-projection Galerkin iteration
//!   `x = Π_C(z)`, `z ← Π_Φ(x − αF(x))`, which only ever projects onto `C`
//!   or onto `span(Φ)`.
//!
//! For affine operators the Galerkin fixed point is also the solution of a
//! linear complementarity problem with an identity-plus-low-rank matrix,
//! solved by the interior-point method in [`projective`] at `O(nk²)` per
//! iteration.
//!
//! [`transforms`] turns polyhedral and equality-constrained problems into
//! problems over separable cones. [`io`] and [`generate`] provide the text
//! file formats and a seeded instance generator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod cones;
pub mod error;
pub mod generate;
pub mod io;
pub mod iterative;
mod linalg;
pub mod operators;
pub mod projective;
pub mod transforms;

pub use basis::Basis;
pub use cones::{Segment, SegmentKind, SeparableCone};
pub use error::{Error, Result};
pub use iterative::{
    bound_report, certify, project_intersection, project_intersection_dykstra, solve_bertsekas,
    solve_exact, solve_exact_split, solve_galerkin, BoundComparison, Method, OptimalityCertificate,
    SolveConfig, SolveReport, Trace,
};
pub use operators::{
    contraction_params, iteration_bound, lipschitz_constant, monotone_modulus, AffineOperator,
    ContractionParams, FnOperator, Operator,
};
pub use projective::{solve_diag_plus_lowrank, solve_ipm, IpmConfig, IpmSummary, ProjectiveLcp};

//! A-priori error bounds of the two Galerkin approximations, checked against
//! the exact solution.
//!
//! With `x*` the exact solution and `z* = x* − αF(x*)`:
//!
//! * Bertsekas: `‖x̂ − x*‖ ≤ ‖Π_Ĉ(x*) − x*‖/(1 − γ)`;
//! * two-projection: `‖z̄ − z*‖` and `‖x̄ − x*‖` are both
//!   `≤ ‖z* − Π_Φ z*‖/(1 − γ)`.
//!
//! The two representation errors are reported side by side; no ordering
//! between them is asserted.

use nalgebra::DVector;

use crate::basis::Basis;
use crate::cones::SeparableCone;
use crate::error::{Error, Result};
use crate::iterative::{
    project_intersection, solve_bertsekas, solve_exact, solve_galerkin, OptimalityCertificate,
    SolveConfig,
};
use crate::operators::{ContractionParams, Operator};

/// Absolute slack used for the `actual ≤ bound` verdicts.
pub const BOUND_SLACK: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct BertsekasComparison {
    /// `‖Π_Ĉ(x*) − x*‖`.
    pub representation_error: f64,
    pub bound: f64,
    /// `‖x̂ − x*‖`.
    pub error: f64,
    pub holds: bool,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct GalerkinComparison {
    /// `‖z* − Π_Φ z*‖`.
    pub representation_error: f64,
    pub bound: f64,
    /// `‖x̄ − x*‖`.
    pub error_x: f64,
    /// `‖z̄ − z*‖`.
    pub error_z: f64,
    pub holds_x: bool,
    pub holds_z: bool,
    pub iterations: usize,
    pub converged: bool,
    pub certificate: Option<OptimalityCertificate>,
}

#[derive(Debug, Clone)]
pub struct BoundComparison {
    pub params: ContractionParams,
    pub x_star: DVector<f64>,
    pub z_star: DVector<f64>,
    pub exact_iterations: usize,
    pub exact_converged: bool,
    /// `Err` carries the reason the Bertsekas side was skipped.
    pub bertsekas: std::result::Result<BertsekasComparison, Error>,
    pub galerkin: std::result::Result<GalerkinComparison, Error>,
}

impl BoundComparison {
    pub fn bertsekas_holds(&self) -> bool {
        matches!(&self.bertsekas, Ok(b) if b.holds)
    }

    pub fn galerkin_holds(&self) -> bool {
        matches!(&self.galerkin, Ok(g) if g.holds_x && g.holds_z)
    }
}

/// Solves the problem three ways and compares the actual approximation errors
/// with the a-priori bounds.
///
/// Fails only if the exact problem itself cannot be set up (dimensions, or an
/// operator that is not strongly monotone). Failures of the approximate
/// solvers are recorded in the corresponding field.
pub fn bound_report<O: Operator + ?Sized>(
    op: &O,
    cone: &SeparableCone,
    basis: &Basis,
    cfg: &SolveConfig,
) -> Result<BoundComparison> {
    if cfg.alpha_override.is_some() {
        return Err(Error::InvalidArgument(
            "bound comparison requires the contraction step alpha = beta/L^2".into(),
        ));
    }
    let cfg = SolveConfig {
        start: None,
        record_trace: false,
        ..cfg.clone()
    };
    let exact = solve_exact(op, cone, &cfg)?;
    let params = exact
        .contraction
        .expect("iterative solvers set contraction");
    let x_star = exact.x;
    let z_star = &x_star - op.eval(&x_star) * params.alpha;
    let scale = 1.0 / (1.0 - params.gamma);

    let bertsekas = (|| {
        let proj =
            project_intersection(cone, basis, &x_star, cfg.dykstra_tol, cfg.dykstra_max_iter)?;
        let representation_error = (proj - &x_star).norm();
        let bound = representation_error * scale;
        let r = solve_bertsekas(op, cone, basis, &cfg, None)?;
        let error = (&r.x - &x_star).norm();
        Ok(BertsekasComparison {
            representation_error,
            bound,
            error,
            holds: error <= bound + BOUND_SLACK,
            iterations: r.iterations,
            converged: r.converged,
        })
    })();

    let galerkin = (|| {
        let representation_error = basis.representation_error(&z_star)?;
        let bound = representation_error * scale;
        let r = solve_galerkin(op, cone, basis, &cfg, None)?;
        let error_x = (&r.x - &x_star).norm();
        let error_z = (r.z.as_ref().expect("galerkin sets z") - &z_star).norm();
        Ok(GalerkinComparison {
            representation_error,
            bound,
            error_x,
            error_z,
            holds_x: error_x <= bound + BOUND_SLACK,
            holds_z: error_z <= bound + BOUND_SLACK,
            iterations: r.iterations,
            converged: r.converged,
            certificate: r.certificate,
        })
    })();

    Ok(BoundComparison {
        params,
        x_star,
        z_star,
        exact_iterations: exact.iterations,
        exact_converged: exact.converged,
        bertsekas,
        galerkin,
    })
}

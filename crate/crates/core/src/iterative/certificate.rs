use nalgebra::DVector;

use crate::basis::Basis;
use crate::cones::SeparableCone;
use crate::error::{check_dim, Error, Result};
use crate::operators::Operator;

/// Evidence that `−F(x̄) + ε ∈ N_C(x̄)` for a residual `ε ∈ null(Φᵀ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityCertificate {
    /// `ε = (z̄ − (x̄ − αF(x̄)))/α`.
    pub epsilon: DVector<f64>,
    /// Whether `z̄ − x̄ ∈ N_C(x̄)` at the certification tolerance.
    pub normal_cone_ok: bool,
    /// `‖Qᵀε‖` for the orthonormal factor `Q` of `Φ`.
    pub null_space_violation: f64,
    /// `|x̄ᵀ(F(x̄) − ε)|`.
    pub complementarity_gap: f64,
    pub tol: f64,
}

impl OptimalityCertificate {
    /// `normal_cone_ok` and `‖Qᵀε‖ ≤ tol·(1 + ‖ε‖)`.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.normal_cone_ok && self.null_space_violation <= tol * (1.0 + self.epsilon.norm())
    }
}

/// Builds the optimality certificate of an (approximate) Galerkin fixed point.
///
/// Violations are reported in the certificate, never raised. An `x̄` outside
/// the cone simply fails the normal-cone test.
pub fn certify<O: Operator + ?Sized>(
    op: &O,
    cone: &SeparableCone,
    basis: &Basis,
    x_bar: &DVector<f64>,
    z_bar: &DVector<f64>,
    alpha: f64,
    cert_tol: f64,
) -> Result<OptimalityCertificate> {
    let n = cone.dim();
    check_dim("certificate operator", n, op.dim())?;
    check_dim("certificate basis", n, basis.dim())?;
    check_dim("certificate x", n, x_bar.len())?;
    check_dim("certificate z", n, z_bar.len())?;
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha = {alpha} must be positive"
        )));
    }

    let fx = op.eval(x_bar);
    let eps_prime = z_bar - (x_bar - &fx * alpha);
    let epsilon = eps_prime / alpha;
    let null_space_violation = basis.ortho().tr_mul(&epsilon).norm();
    let direction = z_bar - x_bar;
    let normal_cone_ok = cone
        .in_normal_cone(x_bar, &direction, cert_tol)
        .unwrap_or(false);
    let complementarity_gap = x_bar.dot(&(&fx - &epsilon)).abs();

    Ok(OptimalityCertificate {
        epsilon,
        normal_cone_ok,
        null_space_violation,
        complementarity_gap,
        tol: cert_tol,
    })
}

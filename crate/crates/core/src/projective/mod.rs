//! The Galerkin fixed point of an affine problem as a projective LCP.
//!
//! For `F(x) = Mx + q` and an orthonormal basis factor `Q`, the fixed points of
//! the two-projection Galerkin iteration are exactly the solutions of
//! `CP(Nx + r, K)` with
//!
//! ```text
//! N = I − QQᵀ + αQQᵀM = I + Q·W,   W = αQᵀM − Qᵀ,   r = αQQᵀq.
//! ```
//!
//! `N` is identity plus rank `k`, so an interior-point Newton step reduces to
//! a diagonal-plus-low-rank solve costing `O(nk²)`.

mod ipm;
mod woodbury;

use nalgebra::{DMatrix, DVector};

use crate::basis::Basis;
use crate::error::{check_dim, Error, Result};
use crate::operators::{monotone_modulus, AffineOperator, Operator};

pub use ipm::{solve_ipm, IpmConfig, IpmSummary};
pub use woodbury::solve_diag_plus_lowrank;

#[derive(Debug, Clone)]
pub struct ProjectiveLcp {
    q: DMatrix<f64>,
    w: DMatrix<f64>,
    r: DVector<f64>,
    alpha: f64,
}

impl ProjectiveLcp {
    /// Forms `W = αQᵀM − Qᵀ` and `r = αQ(Qᵀq)`; one `k×n` by `n×n` product.
    pub fn build(op: &AffineOperator, basis: &Basis, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "alpha = {alpha} must be positive"
            )));
        }
        check_dim("projective LCP basis", op.dim(), basis.dim())?;
        let q = basis.ortho().clone();
        let mut w = q.tr_mul(op.matrix()) * alpha;
        w -= q.transpose();
        let r = &q * (q.tr_mul(op.offset()) * alpha);
        Ok(ProjectiveLcp { q, w, r, alpha })
    }

    pub fn n(&self) -> usize {
        self.q.nrows()
    }

    pub fn rank(&self) -> usize {
        self.q.ncols()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn q_factor(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn w(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn offset(&self) -> &DVector<f64> {
        &self.r
    }

    /// `Nx = x + Q(Wx)` in `O(nk)`.
    pub fn apply_n(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim("N argument", self.n(), x.len())?;
        Ok(self.apply_n_unchecked(x))
    }

    pub(crate) fn apply_n_unchecked(&self, x: &DVector<f64>) -> DVector<f64> {
        x + &self.q * (&self.w * x)
    }

    /// Dense `N = I + QW`. Only meant for small instances and checks.
    pub fn materialize(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::identity(n, n) + &self.q * &self.w
    }

    /// `λ_min((N + Nᵀ)/2)`, positive when `M` is positive definite and `α = β/L²`.
    pub fn verify_pd(&self) -> f64 {
        monotone_modulus(&self.materialize())
    }
}

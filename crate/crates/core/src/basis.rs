//! Basis matrices `Φ` and the orthogonal projector onto their span.
//!
//! The user's `Φ` is reduced to an orthonormal factor `Q` by Householder QR
//! with column pivoting. Nearly dependent columns are dropped. All
//! projections go through `Q(Qᵀz)`; the `n×n` projector is never formed.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};

pub const DEFAULT_DROP_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Basis {
    raw: DMatrix<f64>,
    ortho: DMatrix<f64>,
    drop_tol: f64,
}

impl Basis {
    /// Orthonormalizes `raw` (n×k). Columns whose pivot falls below
    /// `drop_tol` times the largest pivot are dropped.
    pub fn orthonormalize(raw: DMatrix<f64>, drop_tol: f64) -> Result<Self> {
        let (n, k) = raw.shape();
        if n == 0 || k == 0 {
            return Err(Error::InvalidArgument(format!("basis matrix is {n}x{k}")));
        }
        if !(drop_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "drop_tol = {drop_tol} must be positive"
            )));
        }
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "basis has non-finite entries".into(),
            ));
        }
        let ortho = pivoted_householder_q(&raw, drop_tol);
        if ortho.ncols() == 0 {
            return Err(Error::EmptyBasis);
        }
        Ok(Basis {
            raw,
            ortho,
            drop_tol,
        })
    }

    /// The full space `ℝⁿ`, for which `Π_Φ = I`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::orthonormalize(DMatrix::identity(n, n), DEFAULT_DROP_TOL)
    }

    pub fn dim(&self) -> usize {
        self.raw.nrows()
    }

    /// Numerical rank `k'`, the number of orthonormal columns kept.
    pub fn rank(&self) -> usize {
        self.ortho.ncols()
    }

    pub fn raw(&self) -> &DMatrix<f64> {
        &self.raw
    }

    pub fn ortho(&self) -> &DMatrix<f64> {
        &self.ortho
    }

    pub fn drop_tol(&self) -> f64 {
        self.drop_tol
    }

    /// `Qᵀz`, the coordinates of `Π_Φ z` in the orthonormal basis.
    pub fn coefficients(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim("basis coefficients", self.dim(), z.len())?;
        Ok(self.ortho.tr_mul(z))
    }

    /// `Π_Φ z = Q(Qᵀz)`, in `O(nk')`.
    pub fn project_span(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim("span projection", self.dim(), z.len())?;
        Ok(self.project_unchecked(z))
    }

    pub(crate) fn project_unchecked(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.ortho * self.ortho.tr_mul(z)
    }

    /// `v − Π_Φ v`, the component of `v` in `null(Φᵀ)`.
    pub fn null_residual(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim("null-space residual", self.dim(), v.len())?;
        Ok(v - self.project_unchecked(v))
    }

    /// `‖z − Π_Φ z‖₂`.
    pub fn representation_error(&self, z: &DVector<f64>) -> Result<f64> {
        Ok(self.null_residual(z)?.norm())
    }
}

/// Householder QR with column pivoting; returns the first `rank` columns of Q.
fn pivoted_householder_q(raw: &DMatrix<f64>, drop_tol: f64) -> DMatrix<f64> {
    let (n, k) = raw.shape();
    let mut a = raw.clone();
    let mut reflectors: Vec<(DVector<f64>, f64)> = Vec::new();
    let mut largest = 0.0;

    for j in 0..n.min(k) {
        // Pick the remaining column with the largest trailing norm.
        let (p, pivot) =
            (j..k)
                .map(|c| (c, a.view((j, c), (n - j, 1)).norm()))
                .fold(
                    (j, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if j == 0 {
            largest = pivot;
        }
        if largest == 0.0 || pivot < drop_tol * largest {
            break;
        }
        a.swap_columns(j, p);

        let mut v: DVector<f64> = a.view((j, j), (n - j, 1)).column(0).into_owned();
        let alpha = if v[0] >= 0.0 { -pivot } else { pivot };
        v[0] -= alpha;
        let vnorm2 = v.norm_squared();
        let tau = if vnorm2 > 0.0 { 2.0 / vnorm2 } else { 0.0 };
        {
            let mut block = a.view_mut((j, j), (n - j, k - j));
            let w: DVector<f64> = block.tr_mul(&v).column(0) * tau;
            block.ger(-1.0, &v, &w, 1.0);
        }
        reflectors.push((v, tau));
    }

    let rank = reflectors.len();
    let mut q = DMatrix::<f64>::identity(n, rank);
    for (j, (v, tau)) in reflectors.iter().enumerate().rev() {
        let mut block = q.view_mut((j, 0), (n - j, rank));
        let w: DVector<f64> = block.tr_mul(v).column(0) * *tau;
        block.ger(-1.0, v, &w, 1.0);
    }
    q
}

//! Operators `F` and the contraction parameters of the projection step.
//!
//! For a `β`-strongly monotone, `L`-Lipschitz operator the step size
//! `α = β/L²` makes `I − αF` a contraction with factor
//! `γ = sqrt(1 − β²/L²)`. For a general step `α` the factor is
//! `sqrt(1 − 2αβ + α²L²)`, which is what [`ContractionParams::with_step`]
//! reports.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::linalg;

/// Moduli below `STRONG_MONOTONE_RTOL · L` are treated as zero: an operator
/// that is only monotone up to rounding must not be certified as a contraction.
pub const STRONG_MONOTONE_RTOL: f64 = 1e-12;

/// An operator `F: ℝⁿ → ℝⁿ` together with its monotonicity modulus `β` and
/// Lipschitz constant `L`.
pub trait Operator {
    fn dim(&self) -> usize;

    /// Evaluates `F(x)`. `x.len()` must equal `dim()`.
    fn eval(&self, x: &DVector<f64>) -> DVector<f64>;

    /// `β` in `(x−y)ᵀ(F(x)−F(y)) ≥ β‖x−y‖²`; negative when `F` is not monotone.
    fn monotone_modulus(&self) -> f64;

    fn lipschitz_constant(&self) -> f64;

    fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim("operator argument", self.dim(), x.len())?;
        Ok(self.eval(x))
    }

    /// `(β, L, α = β/L², γ)`; fails unless the operator is strongly monotone.
    fn contraction_params(&self) -> Result<ContractionParams> {
        ContractionParams::from_moduli(self.monotone_modulus(), self.lipschitz_constant())
    }
}

/// `F(x) = Mx + q` with lazily computed and cached moduli.
#[derive(Debug, Clone)]
pub struct AffineOperator {
    m: DMatrix<f64>,
    q: DVector<f64>,
    beta: OnceLock<f64>,
    lipschitz: OnceLock<f64>,
}

impl AffineOperator {
    pub fn new(m: DMatrix<f64>, q: DVector<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidArgument(format!(
                "operator matrix is {}x{}, not square",
                m.nrows(),
                m.ncols()
            )));
        }
        check_dim("operator offset", m.nrows(), q.len())?;
        if m.iter().chain(q.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "operator has non-finite entries".into(),
            ));
        }
        Ok(AffineOperator {
            m,
            q,
            beta: OnceLock::new(),
            lipschitz: OnceLock::new(),
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn offset(&self) -> &DVector<f64> {
        &self.q
    }

    pub fn into_parts(self) -> (DMatrix<f64>, DVector<f64>) {
        (self.m, self.q)
    }
}

impl Operator for AffineOperator {
    fn dim(&self) -> usize {
        self.q.len()
    }

    fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.m * x + &self.q
    }

    fn monotone_modulus(&self) -> f64 {
        *self.beta.get_or_init(|| monotone_modulus(&self.m))
    }

    fn lipschitz_constant(&self) -> f64 {
        *self.lipschitz.get_or_init(|| lipschitz_constant(&self.m))
    }
}

/// A general (possibly nonlinear) operator with caller-declared moduli.
///
/// The declared values are trusted; they are not estimated.
pub struct FnOperator<F> {
    dim: usize,
    f: F,
    beta: f64,
    lipschitz: f64,
}

impl<F> FnOperator<F>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    pub fn new(dim: usize, f: F, beta: f64, lipschitz: f64) -> Result<Self> {
        if !(beta >= 0.0 && lipschitz > 0.0 && beta <= lipschitz) {
            return Err(Error::InvalidArgument(format!(
                "declared moduli must satisfy 0 <= beta <= L and L > 0 (beta = {beta}, L = {lipschitz})"
            )));
        }
        Ok(FnOperator {
            dim,
            f,
            beta,
            lipschitz,
        })
    }
}

impl<F> Operator for FnOperator<F>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.f)(x)
    }

    fn monotone_modulus(&self) -> f64 {
        self.beta
    }

    fn lipschitz_constant(&self) -> f64 {
        self.lipschitz
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionParams {
    pub beta: f64,
    pub lipschitz: f64,
    pub alpha: f64,
    pub gamma: f64,
}

impl ContractionParams {
    /// The step `α = β/L²` and its factor `γ = sqrt(1 − β²/L²)`.
    pub fn from_moduli(beta: f64, lipschitz: f64) -> Result<Self> {
        if !(beta > STRONG_MONOTONE_RTOL * lipschitz) || !(lipschitz > 0.0) {
            return Err(Error::NotStronglyMonotone { beta });
        }
        let ratio = beta / lipschitz;
        Ok(ContractionParams {
            beta,
            lipschitz,
            alpha: beta / (lipschitz * lipschitz),
            gamma: (1.0 - ratio * ratio).max(0.0).sqrt(),
        })
    }

    /// Lipschitz bound `sqrt(1 − 2αβ + α²L²)` of `I − αF` for an arbitrary
    /// step. The result may be `≥ 1`, in which case no contraction is implied.
    pub fn with_step(beta: f64, lipschitz: f64, alpha: f64) -> Self {
        let sq = 1.0 - 2.0 * alpha * beta + alpha * alpha * lipschitz * lipschitz;
        ContractionParams {
            beta,
            lipschitz,
            alpha,
            gamma: sq.max(0.0).sqrt(),
        }
    }

    pub fn is_contraction(&self) -> bool {
        self.gamma < 1.0
    }
}

/// `β = λ_min((M + Mᵀ)/2)`. Negative values mean `M` is not monotone.
pub fn monotone_modulus(m: &DMatrix<f64>) -> f64 {
    linalg::min_eigenvalue_symmetric(&linalg::symmetric_part(m))
}

/// An upper bound on `‖M‖₂`, tight to about `1e-10` relative.
pub fn lipschitz_constant(m: &DMatrix<f64>) -> f64 {
    linalg::spectral_norm_upper(m)
}

pub fn contraction_params(m: &DMatrix<f64>) -> Result<ContractionParams> {
    ContractionParams::from_moduli(monotone_modulus(m), lipschitz_constant(m))
}

/// Number of contraction steps `⌈ln ε / ln γ⌉` that shrink the initial error by `ε`.
pub fn iteration_bound(gamma: f64, eps: f64) -> Result<usize> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma = {gamma} is not in (0, 1)"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "eps = {eps} is not in (0, 1)"
        )));
    }
    Ok((eps.ln() / gamma.ln()).ceil() as usize)
}

//! Dense eigenvalue and norm estimates used to certify operator moduli.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Largest size handled by a dense symmetric eigendecomposition; larger
/// problems fall back to power iteration.
pub const DENSE_EIGEN_MAX_DIM: usize = 2000;

const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITER: usize = 20_000;

/// Result of a power iteration on a symmetric positive semidefinite operator.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PowerEstimate {
    /// Rayleigh quotient at the final vector.
    pub value: f64,
    /// `‖Av − λv‖` at the final unit vector `v`.
    pub residual: f64,
}

pub(crate) fn seeded_unit_vector(n: usize) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1e55);
    let v: DVector<f64> = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
    let norm = v.norm();
    v / norm
}

/// Power iteration for the dominant eigenvalue of a symmetric PSD operator.
pub(crate) fn power_iteration<F>(apply: F, mut v: DVector<f64>) -> PowerEstimate
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut est = PowerEstimate {
        value: 0.0,
        residual: 0.0,
    };
    for _ in 0..POWER_MAX_ITER {
        let w = apply(&v);
        let lambda = v.dot(&w);
        let residual = (&w - &v * lambda).norm();
        est = PowerEstimate {
            value: lambda,
            residual,
        };
        let wn = w.norm();
        if wn == 0.0 || residual <= POWER_TOL * lambda.abs() {
            break;
        }
        v = w / wn;
    }
    est
}

pub(crate) fn symmetric_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Smallest eigenvalue of a symmetric matrix.
pub(crate) fn min_eigenvalue_symmetric(s: &DMatrix<f64>) -> f64 {
    let n = s.nrows();
    if n <= DENSE_EIGEN_MAX_DIM {
        return SymmetricEigen::new(s.clone()).eigenvalues.min();
    }
    // Shift by a Gershgorin bound so that `shift·I − S` is PSD, then take its
    // dominant eigenvalue. The residual is subtracted to stay conservative.
    let shift = s
        .row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let est = power_iteration(|v| v * shift - s * v, seeded_unit_vector(n));
    shift - est.value - est.residual
}

/// Upper bound on the spectral norm `‖M‖₂` via power iteration on `MᵀM`,
/// padded by the final eigen-residual.
pub(crate) fn spectral_norm_upper(m: &DMatrix<f64>) -> f64 {
    let n = m.ncols();
    let mtm = |v: &DVector<f64>| m.tr_mul(&(m * v));
    let start = if n <= DENSE_EIGEN_MAX_DIM {
        // Warm start from the dense dominant eigenvector so that clustered top
        // singular values do not stall the iteration.
        let eig = SymmetricEigen::new(m.tr_mul(m));
        let imax = eig.eigenvalues.imax();
        let v = eig.eigenvectors.column(imax).into_owned();
        if v.norm() > 0.0 {
            v.normalize()
        } else {
            seeded_unit_vector(n)
        }
    } else {
        seeded_unit_vector(n)
    };
    let est = power_iteration(mtm, start);
    (est.value + est.residual).max(0.0).sqrt()
}

//! Seeded random test instances.
//!
//! Within one build the same arguments always produce bitwise-identical
//! instances. Nothing is promised across builds or platforms.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::basis::{Basis, DEFAULT_DROP_TOL};
use crate::error::{Error, Result};
use crate::operators::{lipschitz_constant, monotone_modulus, AffineOperator};

const MAX_ATTEMPTS: usize = 100;
/// Relative window around the requested Lipschitz constant.
pub const LIPSCHITZ_WINDOW: f64 = 0.05;

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// A random strongly monotone affine operator and a random basis.
///
/// `M = βI + c(GᵀG + S)` with `G` Gaussian and `S` skew-symmetric, so the
/// symmetric part is `βI + cGᵀG` and `monotone_modulus(M) ≥ β`. The scale `c`
/// is found by bisection until `‖M‖₂` is within 1% of `l_target`. `q` and the
/// raw basis are standard Gaussian.
pub fn generate_instance(
    n: usize,
    k: usize,
    beta_target: f64,
    l_target: f64,
    seed: u64,
) -> Result<(AffineOperator, Basis)> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= n (n = {n}, k = {k})"
        )));
    }
    if !(beta_target > 0.0 && beta_target < l_target && l_target.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < beta < L (beta = {beta_target}, L = {l_target})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (n as f64).sqrt();
    let g = gaussian_matrix(&mut rng, n, n) * scale;
    let h = gaussian_matrix(&mut rng, n, n) * scale;
    let direction = g.tr_mul(&g) + (&h - h.transpose()) * 0.5;
    let q = gaussian_vector(&mut rng, n);
    let raw_basis = gaussian_matrix(&mut rng, n, k);

    let identity = DMatrix::<f64>::identity(n, n) * beta_target;
    let build = |c: f64| &identity + &direction * c;

    // Bracket, then bisect on c.
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut attempts = 0;
    let mut m = build(hi);
    let mut l = lipschitz_constant(&m);
    while l < l_target {
        attempts += 1;
        if attempts >= MAX_ATTEMPTS {
            return Err(Error::Generation(format!("could not reach L = {l_target}")));
        }
        lo = hi;
        hi *= 2.0;
        m = build(hi);
        l = lipschitz_constant(&m);
    }
    while (l - l_target).abs() > 0.01 * l_target {
        attempts += 1;
        if attempts >= MAX_ATTEMPTS {
            return Err(Error::Generation(format!(
                "Lipschitz target {l_target} not met after {MAX_ATTEMPTS} attempts (last {l})"
            )));
        }
        let mid = 0.5 * (lo + hi);
        m = build(mid);
        l = lipschitz_constant(&m);
        if l < l_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let beta = monotone_modulus(&m);
    if beta < beta_target * (1.0 - 1e-6) {
        return Err(Error::Generation(format!(
            "monotonicity modulus {beta} fell below the target {beta_target}"
        )));
    }
    let op = AffineOperator::new(m, q)?;
    let basis = Basis::orthonormalize(raw_basis, DEFAULT_DROP_TOL)?;
    Ok((op, basis))
}

/// A cheap large-scale instance: `M = I + T` with `T` skew-symmetric and
/// `‖T‖_F = skew_norm`.
///
/// Since `xᵀTx = 0`, `β = 1` and `‖M‖₂ = sqrt(1 + ‖T‖₂²) ≤ sqrt(1 + skew_norm²)`,
/// so valid contraction moduli are known without any eigenvalue work. Costs
/// `O(n²)` to build.
pub fn skew_instance(n: usize, k: usize, skew_norm: f64, seed: u64) -> Result<SkewInstance> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= n (n = {n}, k = {k})"
        )));
    }
    if !(skew_norm >= 0.0 && skew_norm.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "skew_norm = {skew_norm} must be >= 0"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = gaussian_matrix(&mut rng, n, n);
    let mut t = &h - h.transpose();
    let fro = t.norm();
    if fro > 0.0 {
        t *= skew_norm / fro;
    }
    for i in 0..n {
        t[(i, i)] += 1.0;
    }
    let q = gaussian_vector(&mut rng, n);
    let raw_basis = gaussian_matrix(&mut rng, n, k);
    Ok(SkewInstance {
        op: AffineOperator::new(t, q)?,
        basis: Basis::orthonormalize(raw_basis, DEFAULT_DROP_TOL)?,
        beta: 1.0,
        lipschitz_bound: (1.0 + skew_norm * skew_norm).sqrt(),
    })
}

#[derive(Debug, Clone)]
pub struct SkewInstance {
    pub op: AffineOperator,
    pub basis: Basis,
    pub beta: f64,
    pub lipschitz_bound: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Operator;

    #[test]
    fn small_instance_meets_targets() {
        let (op, basis) = generate_instance(10, 3, 1.0, 4.0, 0).unwrap();
        assert!(op.monotone_modulus() >= 0.999999);
        let l = op.lipschitz_constant();
        assert!((l - 4.0).abs() <= LIPSCHITZ_WINDOW * 4.0);
        assert_eq!(basis.rank(), 3);
    }

    #[test]
    fn deterministic() {
        let (a, ba) = generate_instance(12, 4, 0.5, 3.0, 42).unwrap();
        let (b, bb) = generate_instance(12, 4, 0.5, 3.0, 42).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert_eq!(a.offset(), b.offset());
        assert_eq!(ba.raw(), bb.raw());
        let (c, _) = generate_instance(12, 4, 0.5, 3.0, 43).unwrap();
        assert_ne!(a.matrix(), c.matrix());
    }

    #[test]
    fn full_rank_basis_when_k_equals_n() {
        let (_, basis) = generate_instance(6, 6, 1.0, 2.0, 3).unwrap();
        assert_eq!(basis.rank(), 6);
    }

    #[test]
    fn rejects_bad_targets() {
        assert!(generate_instance(5, 2, 2.0, 1.0, 0).is_err());
        assert!(generate_instance(5, 6, 1.0, 2.0, 0).is_err());
        assert!(generate_instance(5, 2, 0.0, 2.0, 0).is_err());
    }

    #[test]
    fn skew_instance_moduli() {
        let inst = skew_instance(30, 4, 0.5, 9).unwrap();
        assert!((inst.op.monotone_modulus() - 1.0).abs() < 1e-12);
        assert!(inst.op.lipschitz_constant() <= inst.lipschitz_bound + 1e-12);
    }
}

//! Independent reference computations for the integration tests.
//!
//! Nothing here calls into the library's numerical routines; only its data
//! types are used to hand values over.

#![allow(dead_code)]

use galerkin_vi::{SegmentKind, SeparableCone};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix.
pub fn jacobi_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut a = a.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() < 1e-15 * a.norm().max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

pub fn oracle_beta(m: &DMatrix<f64>) -> f64 {
    jacobi_eigenvalues(&((m + m.transpose()) * 0.5))[0]
}

pub fn oracle_lipschitz(m: &DMatrix<f64>) -> f64 {
    let ev = jacobi_eigenvalues(&(m.transpose() * m));
    ev.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let n = a.nrows();
    let mut a = a.clone();
    let mut b = b.clone();
    for col in 0..n {
        let piv =
            (col..n).max_by(|&i, &j| a[(i, col)].abs().partial_cmp(&a[(j, col)].abs()).unwrap())?;
        if a[(piv, col)].abs() < 1e-14 {
            return None;
        }
        a.swap_rows(col, piv);
        b.swap_rows(col, piv);
        for r in col + 1..n {
            let f = a[(r, col)] / a[(col, col)];
            if f != 0.0 {
                for c in col..n {
                    a[(r, c)] -= f * a[(col, c)];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = DVector::zeros(n);
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[(r, c)] * x[c]).sum();
        x[r] = (b[r] - s) / a[(r, r)];
    }
    Some(x)
}

/// Solves `CP(Mx + q, K)` for a cone of nonnegative and free segments by
/// enumerating which nonnegative coordinates are positive.
///
/// Exponential in the number of nonnegative coordinates; meant for `n ≤ 12`.
pub fn lcp_enumerate(
    m: &DMatrix<f64>,
    q: &DVector<f64>,
    cone: &SeparableCone,
) -> Option<DVector<f64>> {
    let n = q.len();
    let kinds: Vec<SegmentKind> = cone.kinds().collect();
    assert!(kinds.iter().all(|k| *k != SegmentKind::Zero));
    let nn: Vec<usize> = (0..n)
        .filter(|&i| kinds[i] == SegmentKind::NonNegative)
        .collect();
    let free: Vec<usize> = (0..n).filter(|&i| kinds[i] == SegmentKind::Free).collect();
    let tol = 1e-10;
    for mask in 0u64..(1u64 << nn.len()) {
        let mut basic = free.clone();
        basic.extend(
            nn.iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &i)| i),
        );
        basic.sort_unstable();
        let k = basic.len();
        let sub = DMatrix::from_fn(k, k, |r, c| m[(basic[r], basic[c])]);
        let rhs = DVector::from_fn(k, |r, _| -q[basic[r]]);
        let xb = if k == 0 {
            DVector::zeros(0)
        } else {
            match gauss_solve(&sub, &rhs) {
                Some(v) => v,
                None => continue,
            }
        };
        let mut x = DVector::zeros(n);
        for (r, &i) in basic.iter().enumerate() {
            x[i] = xb[r];
        }
        let w = m * &x + q;
        let scale = 1.0 + x.amax() + w.amax();
        let ok = nn
            .iter()
            .all(|&i| x[i] >= -tol * scale && w[i] >= -tol * scale);
        if ok {
            return Some(x);
        }
    }
    None
}

/// Dense `N = I − QQᵀ + αQQᵀM` and `r = αQQᵀq`, written out term by term.
pub fn dense_projective(
    q: &DMatrix<f64>,
    m: &DMatrix<f64>,
    off: &DVector<f64>,
    alpha: f64,
) -> (DMatrix<f64>, DVector<f64>) {
    let n = m.nrows();
    let p = q * q.transpose();
    let big = DMatrix::identity(n, n) - &p + &p * m * alpha;
    let r = &p * off * alpha;
    (big, r)
}

/// Random cone mixing nonnegative and free segments.
pub fn mixed_cone(n: usize, free: usize) -> SeparableCone {
    assert!(free < n);
    if free == 0 {
        SeparableCone::orthant(n).unwrap()
    } else {
        SeparableCone::orthant(n - free)
            .unwrap()
            .product(&SeparableCone::free(free).unwrap())
    }
}

pub fn rel_err(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

/// `M = shift·I + GᵀG/n + (H − Hᵀ)/2`, so `λ_min((M + Mᵀ)/2) ≥ shift`.
pub fn random_monotone(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> DMatrix<f64> {
    let g = gaussian_matrix(rng, n, n);
    let h = gaussian_matrix(rng, n, n);
    DMatrix::identity(n, n) * shift + g.transpose() * &g / n as f64 + (&h - h.transpose()) * 0.5
}

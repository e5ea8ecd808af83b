//! Euclidean projection onto `Ĉ = C ∩ span(Φ)`.
//!
//! With `Q` the orthonormal basis factor, `Π_Ĉ(z) = Q c*` where `c*` is the
//! projection of `c₀ = Qᵀz` onto the polyhedral cone
//! `P = {c : (Qc)ᵢ ≥ 0 on nonnegative rows, (Qc)ᵢ = 0 on zero rows}`.
//! By Moreau's decomposition `c* = c₀ − Π_{P°}(c₀)`, and projecting onto the
//! polar cone `P°` (generated by `−Qᵢ` and `±Qⱼ`) is a nonnegative least
//! squares problem with `k` rows, solved exactly by the Lawson–Hanson active
//! set method.

use nalgebra::{DMatrix, DVector};

use crate::basis::Basis;
use crate::cones::{SegmentKind, SeparableCone};
use crate::error::{check_dim, Error, Result};

/// Euclidean projection of `z` onto `C ∩ span(Φ)`.
///
/// Solved exactly in the basis coefficients; if the result fails its
/// feasibility check (severe ill-conditioning), falls back to
/// [`project_intersection_dykstra`] with `tol` and `max_iter`. The returned
/// point lies in `C` exactly.
pub fn project_intersection(
    cone: &SeparableCone,
    basis: &Basis,
    z: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    check_inputs(cone, basis, z, tol, max_iter)?;
    match project_exact(cone, basis, z) {
        Some(x) => Ok(x),
        None => project_intersection_dykstra(cone, basis, z, tol, max_iter),
    }
}

/// The same projection by Dykstra's alternating projections.
///
/// Each sweep projects onto the subspace and then onto the cone, so the
/// returned point lies in `C` exactly and in `span(Φ)` up to the stopping
/// tolerance. Stops when both half-steps move by at most `tol`. The linear
/// rate depends on the angle between the two sets and can be very slow.
pub fn project_intersection_dykstra(
    cone: &SeparableCone,
    basis: &Basis,
    z: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    check_inputs(cone, basis, z, tol, max_iter)?;
    let n = z.len();
    let mut x = z.clone();
    let mut y = DVector::zeros(n);
    // Correction terms for the subspace and the cone.
    let mut p = DVector::<f64>::zeros(n);
    let mut q = DVector::<f64>::zeros(n);
    let mut last_move = f64::INFINITY;

    for it in 0..max_iter {
        let y_next = basis.project_unchecked(&(&x + &p));
        p += &x - &y_next;

        let mut x_next = &y_next + &q;
        cone.project_in_place(&mut x_next);
        q += &y_next - &x_next;

        let dx = (&x_next - &x).norm();
        let dy = if it == 0 {
            f64::INFINITY
        } else {
            (&y_next - &y).norm()
        };
        last_move = dx.max(dy);
        x = x_next;
        y = y_next;
        if last_move <= tol {
            return Ok(x);
        }
    }
    Err(Error::IntersectionProjectionFailed {
        iterations: max_iter,
        last_move,
    })
}

fn check_inputs(
    cone: &SeparableCone,
    basis: &Basis,
    z: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<()> {
    check_dim("intersection projection (cone)", cone.dim(), z.len())?;
    check_dim("intersection projection (basis)", basis.dim(), z.len())?;
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::InvalidArgument(
            "intersection projection needs a positive tolerance and iteration limit".into(),
        ));
    }
    Ok(())
}

fn project_exact(cone: &SeparableCone, basis: &Basis, z: &DVector<f64>) -> Option<DVector<f64>> {
    let q = basis.ortho();
    let k = q.ncols();
    let c0 = q.tr_mul(z);

    let mut gens: Vec<DVector<f64>> = Vec::new();
    for (i, kind) in cone.kinds().enumerate() {
        let row = q.row(i).transpose();
        match kind {
            SegmentKind::NonNegative => gens.push(-row),
            SegmentKind::Zero => {
                gens.push(row.clone());
                gens.push(-row);
            }
            SegmentKind::Free => {}
        }
    }
    let c = if gens.is_empty() {
        c0.clone()
    } else {
        let e = DMatrix::from_columns(&gens);
        let lambda = nnls(&e, &c0)?;
        let polar = &e * lambda;
        let c = &c0 - &polar;
        if c.dot(&polar).abs() > 1e-9 * (1.0 + c0.norm_squared()) {
            return None;
        }
        c
    };
    debug_assert_eq!(c.len(), k);

    let mut x = q * c;
    let ftol = 1e-9 * (1.0 + z.norm());
    let feasible = cone.kinds().zip(x.iter()).all(|(kind, &v)| match kind {
        SegmentKind::NonNegative => v >= -ftol,
        SegmentKind::Zero => v.abs() <= ftol,
        SegmentKind::Free => true,
    });
    if !feasible {
        return None;
    }
    cone.project_in_place(&mut x);
    Some(x)
}

/// Lawson–Hanson: `argmin ‖Aλ − b‖` over `λ ≥ 0`. `None` if the iteration
/// budget runs out or a subproblem cannot be solved.
fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let m = a.ncols();
    let col_scale = a.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let w_tol = 1e-12 * (1.0 + b.norm()) * col_scale.max(1.0);
    let mut x = DVector::<f64>::zeros(m);
    let mut passive = vec![false; m];

    let lsq = |passive: &[bool]| -> Option<DVector<f64>> {
        let idx: Vec<usize> = (0..m).filter(|&j| passive[j]).collect();
        let sub = DMatrix::from_columns(&idx.iter().map(|&j| a.column(j)).collect::<Vec<_>>());
        let sol = sub.svd(true, true).solve(b, 1e-13).ok()?;
        let mut full = DVector::zeros(m);
        for (r, &j) in idx.iter().enumerate() {
            full[j] = sol[r];
        }
        Some(full)
    };

    for _outer in 0..3 * m + 10 {
        let w = a.tr_mul(&(b - a * &x));
        let next = (0..m)
            .filter(|&j| !passive[j] && w[j] > w_tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = next else {
            return Some(x);
        };
        passive[j] = true;

        let mut inner = 0;
        loop {
            inner += 1;
            if inner > 3 * m + 10 {
                return None;
            }
            let s = lsq(&passive)?;
            let blocking = (0..m).filter(|&i| passive[i] && s[i] <= 0.0);
            let step = blocking
                .map(|i| x[i] / (x[i] - s[i]))
                .fold(f64::INFINITY, f64::min);
            if !step.is_finite() {
                x = s;
                break;
            }
            x += (&s - &x) * step;
            for i in 0..m {
                if passive[i] && x[i] <= 1e-15 * (1.0 + x.amax()) {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
        }
    }
    None
}

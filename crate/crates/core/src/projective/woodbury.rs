use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};

/// Solves `(D + QW) x = rhs` for a positive diagonal `D` (n), `Q` (n×k) and
/// `W` (k×n) through the Woodbury identity:
///
/// ```text
/// u = D⁻¹ rhs
/// (I + W D⁻¹ Q) y = W u
/// x = u − D⁻¹ Q y
/// ```
///
/// Cost `O(nk² + k³)`; only a `k×k` system is factored.
pub fn solve_diag_plus_lowrank(
    d: &DVector<f64>,
    q: &DMatrix<f64>,
    w: &DMatrix<f64>,
    rhs: &DVector<f64>,
) -> Result<DVector<f64>> {
    let n = d.len();
    let k = q.ncols();
    check_dim("Woodbury rhs", n, rhs.len())?;
    check_dim("Woodbury Q rows", n, q.nrows())?;
    check_dim("Woodbury W rows", k, w.nrows())?;
    check_dim("Woodbury W cols", n, w.ncols())?;
    if let Some(bad) = d.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::IpmBreakdown(format!(
            "diagonal entry {bad:e} is not strictly positive"
        )));
    }

    let u = rhs.component_div(d);
    if k == 0 {
        return Ok(u);
    }
    let mut dinv_q = q.clone();
    for (mut row, &di) in dinv_q.row_iter_mut().zip(d.iter()) {
        row /= di;
    }
    let mut capacitance = w * &dinv_q;
    for i in 0..k {
        capacitance[(i, i)] += 1.0;
    }
    let y = capacitance
        .lu()
        .solve(&(w * &u))
        .filter(|y| y.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::IpmBreakdown("singular capacitance matrix".into()))?;
    Ok(u - dinv_q * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn empty_low_rank_part() {
        let d = dvector![2.0, 4.0];
        let x = solve_diag_plus_lowrank(
            &d,
            &DMatrix::zeros(2, 0),
            &DMatrix::zeros(0, 2),
            &dvector![2.0, 2.0],
        )
        .unwrap();
        assert_eq!(x, dvector![1.0, 0.5]);
    }

    #[test]
    fn zero_low_rank_product() {
        let d = DVector::from_element(3, 1.0);
        let q = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 3.0]);
        let w = DMatrix::zeros(1, 3);
        let rhs = dvector![1.0, -2.0, 0.5];
        assert_eq!(solve_diag_plus_lowrank(&d, &q, &w, &rhs).unwrap(), rhs);
    }

    #[test]
    fn rejects_nonpositive_diagonal() {
        let d = dvector![1.0, 0.0];
        let r = solve_diag_plus_lowrank(
            &d,
            &DMatrix::zeros(2, 0),
            &DMatrix::zeros(0, 2),
            &dvector![1.0, 1.0],
        );
        assert!(matches!(r, Err(Error::IpmBreakdown(_))));
    }

    #[test]
    fn singular_system_is_breakdown() {
        // D + QW = [[1,0],[0,1]] + [[-1],[0]]·[[1,0]] has a zero row.
        let d = dvector![1.0, 1.0];
        let q = DMatrix::from_row_slice(2, 1, &[-1.0, 0.0]);
        let w = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let r = solve_diag_plus_lowrank(&d, &q, &w, &dvector![1.0, 1.0]);
        assert!(matches!(r, Err(Error::IpmBreakdown(_))));
    }
}

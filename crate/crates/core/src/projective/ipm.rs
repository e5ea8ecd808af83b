//! Infeasible-start primal-dual path following for `CP(Nx + r, K)`.
//!
//! On nonnegative coordinates the pair `(xᵢ, sᵢ)` is kept strictly positive
//! and driven to `xᵢsᵢ = σμ`; on free coordinates there is no pair and
//! `(Nx + r)ᵢ = 0` is a plain equation. Linearizing
//! `s − Nx − r = 0`, `XS e = σμ e` and eliminating `ds` leaves
//!
//! ```text
//! (D + QW) dx = rhs,   D = I + S X⁻¹ (zero on free rows of S X⁻¹),
//! ```
//!
//! which is solved by the Woodbury identity in `O(nk²)`.

use std::time::{Duration, Instant};

use nalgebra::DVector;

use super::{solve_diag_plus_lowrank, ProjectiveLcp};
use crate::cones::{SegmentKind, SeparableCone};
use crate::error::{check_dim, Error, Result};
use crate::iterative::{Method, SolveReport};

#[derive(Debug, Clone, Copy)]
pub struct IpmConfig {
    /// Target for the average complementarity product.
    pub mu_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
    /// Fraction-to-boundary factor.
    pub step_fraction: f64,
    /// Centering parameter.
    pub sigma: f64,
}

impl Default for IpmConfig {
    fn default() -> Self {
        IpmConfig {
            mu_tol: 1e-10,
            feas_tol: 1e-10,
            max_iter: 200,
            step_fraction: 0.99,
            sigma: 0.1,
        }
    }
}

impl IpmConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.mu_tol > 0.0
            && self.feas_tol > 0.0
            && self.max_iter >= 1
            && self.step_fraction > 0.0
            && self.step_fraction < 1.0
            && self.sigma > 0.0
            && self.sigma < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "invalid interior-point settings: {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone)]
pub struct IpmSummary {
    /// `s = Nx + r` at the returned `x`.
    pub s: DVector<f64>,
    /// Average of `xᵢsᵢ` over nonnegative coordinates, with `s = Nx + r`.
    pub gap: f64,
    /// Worst violation of `s ≥ 0` (nonnegative rows) or `s = 0` (free rows).
    pub infeasibility: f64,
    pub iterations: usize,
    pub elapsed: Duration,
}

impl IpmSummary {
    /// Mean wall time of one interior-point iteration.
    pub fn per_iteration(&self) -> Duration {
        self.elapsed / self.iterations.max(1) as u32
    }
}

struct Residuals {
    v: DVector<f64>,
    gap: f64,
    total_gap: f64,
    infeasibility: f64,
}

/// Solves `CP(Nx + r, K)` for a cone made of nonnegative and free segments.
///
/// Stops when, with `s = Nx + r` evaluated afresh, `s` is feasible to within
/// `feas_tol`, the average gap `Σ xᵢsᵢ / #nn` is at most `mu_tol` and the total
/// gap `xᵀs` is at most `mu_tol·(1 + ‖x‖‖s‖)`.
pub fn solve_ipm(
    plcp: &ProjectiveLcp,
    cone: &SeparableCone,
    cfg: &IpmConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    let n = plcp.n();
    check_dim("interior point cone", n, cone.dim())?;
    if cone.count(SegmentKind::Zero) > 0 {
        return Err(Error::InvalidArgument(
            "interior point solver supports only nonnegative and free segments".into(),
        ));
    }
    let started = Instant::now();
    let nonneg: Vec<bool> = cone
        .kinds()
        .map(|k| k == SegmentKind::NonNegative)
        .collect();
    let n_nonneg = nonneg.iter().filter(|b| **b).count();

    let mut x = DVector::from_iterator(n, nonneg.iter().map(|&nn| if nn { 1.0 } else { 0.0 }));
    let v0 = plcp.apply_n_unchecked(&x) + plcp.offset();
    let mut s = DVector::from_iterator(
        n,
        nonneg
            .iter()
            .zip(v0.iter())
            .map(|(&nn, &vi)| if nn { vi.max(1.0) } else { 0.0 }),
    );

    let evaluate = |x: &DVector<f64>| {
        let v = plcp.apply_n_unchecked(x) + plcp.offset();
        let mut total_gap = 0.0;
        let mut infeasibility: f64 = 0.0;
        for i in 0..n {
            if nonneg[i] {
                total_gap += x[i] * v[i];
                infeasibility = infeasibility.max(-v[i]).max(-x[i]);
            } else {
                infeasibility = infeasibility.max(v[i].abs());
            }
        }
        let gap = if n_nonneg == 0 {
            0.0
        } else {
            total_gap / n_nonneg as f64
        };
        Residuals {
            v,
            gap,
            total_gap,
            infeasibility,
        }
    };

    let mut iterations = 0;
    let mut last_step = f64::INFINITY;
    let mut res = evaluate(&x);
    let mut converged = false;
    loop {
        let x_norm = x.norm();
        if res.infeasibility <= cfg.feas_tol
            && res.gap <= cfg.mu_tol
            && res.total_gap.abs() <= cfg.mu_tol * (1.0 + x_norm * res.v.norm())
        {
            converged = true;
            break;
        }
        if iterations == cfg.max_iter {
            break;
        }
        iterations += 1;

        let mu = if n_nonneg == 0 {
            0.0
        } else {
            nonneg
                .iter()
                .enumerate()
                .filter(|(_, nn)| **nn)
                .map(|(i, _)| x[i] * s[i])
                .sum::<f64>()
                / n_nonneg as f64
        };
        let target = cfg.sigma * mu;

        let mut d = DVector::from_element(n, 1.0);
        let mut rhs = DVector::zeros(n);
        for i in 0..n {
            // Residual of s − Nx − r, with s ≡ 0 on free rows.
            let rp = if nonneg[i] {
                s[i] - res.v[i]
            } else {
                -res.v[i]
            };
            if nonneg[i] {
                d[i] += s[i] / x[i];
                rhs[i] = (target - x[i] * s[i]) / x[i] + rp;
            } else {
                rhs[i] = rp;
            }
        }
        let dx = solve_diag_plus_lowrank(&d, plcp.q_factor(), plcp.w(), &rhs)?;

        let mut ds = DVector::zeros(n);
        let mut max_step = f64::INFINITY;
        for i in (0..n).filter(|&i| nonneg[i]) {
            ds[i] = (target - x[i] * s[i] - s[i] * dx[i]) / x[i];
            if dx[i] < 0.0 {
                max_step = max_step.min(-x[i] / dx[i]);
            }
            if ds[i] < 0.0 {
                max_step = max_step.min(-s[i] / ds[i]);
            }
        }
        let step = (cfg.step_fraction * max_step).min(1.0);
        if !(step > 0.0) || dx.iter().any(|v| !v.is_finite()) {
            return Err(Error::IpmBreakdown(format!(
                "no admissible step at iteration {iterations}"
            )));
        }
        x.axpy(step, &dx, 1.0);
        s.axpy(step, &ds, 1.0);
        last_step = step * dx.norm();
        res = evaluate(&x);
    }

    let summary = IpmSummary {
        s: res.v,
        gap: res.gap,
        infeasibility: res.infeasibility,
        iterations,
        elapsed: started.elapsed(),
    };
    Ok(SolveReport {
        method: Method::InteriorPoint,
        x,
        z: None,
        iterations,
        final_step_norm: last_step,
        contraction: None,
        guaranteed: false,
        apriori_bound: None,
        certificate: None,
        converged,
        trace: None,
        ipm: Some(summary),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Basis;
    use crate::operators::AffineOperator;
    use nalgebra::{dmatrix, dvector, DMatrix};

    #[test]
    fn identity_reduced_problem() {
        let op = AffineOperator::new(DMatrix::identity(2, 2), dvector![-1.0, 1.0]).unwrap();
        let p = ProjectiveLcp::build(&op, &Basis::identity(2).unwrap(), 1.0).unwrap();
        let r = solve_ipm(
            &p,
            &SeparableCone::orthant(2).unwrap(),
            &IpmConfig::default(),
        )
        .unwrap();
        assert!(r.converged);
        assert!((r.x - dvector![1.0, 0.0]).amax() < 1e-8);
    }

    #[test]
    fn zero_offset_gives_zero_solution() {
        let m = dmatrix![2.0, 1.0, 0.0; -1.0, 2.0, 0.5; 0.0, -0.5, 1.0];
        let op = AffineOperator::new(m, DVector::zeros(3)).unwrap();
        let basis = Basis::orthonormalize(dmatrix![1.0; 1.0; 0.0], 1e-10).unwrap();
        let p = ProjectiveLcp::build(&op, &basis, 0.2).unwrap();
        assert!(p.verify_pd() > 0.0);
        let r = solve_ipm(
            &p,
            &SeparableCone::orthant(3).unwrap(),
            &IpmConfig::default(),
        )
        .unwrap();
        assert!(r.converged);
        // Degenerate solution: both x and s vanish, so x only shrinks like sqrt(gap).
        let lambda = p.verify_pd();
        let gap = r.ipm.unwrap().gap * 3.0;
        assert!(r.x.norm() <= (gap / lambda).sqrt() * 1.01);
        assert!(r.x.norm() <= 1e-4);
    }

    #[test]
    fn all_free_is_a_linear_solve() {
        let m = dmatrix![3.0, 1.0; -1.0, 2.0];
        let q = dvector![1.0, -4.0];
        let op = AffineOperator::new(m.clone(), q.clone()).unwrap();
        let p = ProjectiveLcp::build(&op, &Basis::identity(2).unwrap(), 1.0).unwrap();
        let r = solve_ipm(&p, &SeparableCone::free(2).unwrap(), &IpmConfig::default()).unwrap();
        assert!(r.converged);
        let oracle = m.lu().solve(&(-q)).unwrap();
        assert!((r.x - oracle).amax() < 1e-10);
        assert!(r.iterations <= 2);
    }

    #[test]
    fn zero_segments_are_rejected() {
        let op = AffineOperator::new(DMatrix::identity(2, 2), dvector![0.0, 0.0]).unwrap();
        let p = ProjectiveLcp::build(&op, &Basis::identity(2).unwrap(), 1.0).unwrap();
        let k: SeparableCone = "nn:1,zero:1".parse().unwrap();
        assert!(solve_ipm(&p, &k, &IpmConfig::default()).is_err());
    }

    #[test]
    fn iteration_limit_reports_non_convergence() {
        let op = AffineOperator::new(DMatrix::identity(2, 2), dvector![-1.0, 1.0]).unwrap();
        let p = ProjectiveLcp::build(&op, &Basis::identity(2).unwrap(), 1.0).unwrap();
        let cfg = IpmConfig {
            max_iter: 1,
            ..IpmConfig::default()
        };
        let r = solve_ipm(&p, &SeparableCone::orthant(2).unwrap(), &cfg).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 1);
    }
}

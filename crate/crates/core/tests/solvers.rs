mod common;

use common::*;
use galerkin_vi::{
    bound_report, certify, project_intersection, project_intersection_dykstra, solve_bertsekas,
    solve_exact, solve_exact_split, solve_galerkin, AffineOperator, Basis, Error, FnOperator,
    Operator, SeparableCone, SolveConfig,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn instance(seed: u64, n: usize, free: usize) -> (AffineOperator, SeparableCone) {
    let mut r = rng(seed);
    let m = random_monotone(&mut r, n, 0.3);
    let q = gaussian_vector(&mut r, n) * 2.0;
    (AffineOperator::new(m, q).unwrap(), mixed_cone(n, free))
}

/// Nonnegative columns with disjoint supports, so `C ∩ span(Φ)` is the cone
/// generated by the columns.
fn block_basis(seed: u64, n: usize, k: usize) -> DMatrix<f64> {
    let mut r = rng(seed ^ 0xb10c);
    let w = gaussian_vector(&mut r, n).map(|v| v.abs() + 0.1);
    DMatrix::from_fn(n, k, |i, j| if i % k == j { w[i] } else { 0.0 })
}

fn traced() -> SolveConfig {
    SolveConfig {
        record_trace: true,
        tol: 1e-12,
        ..SolveConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_solution_matches_active_set_oracle(seed in 0u64..10_000, n in 1usize..8, free in 0usize..3) {
        let free = free.min(n - 1);
        let (op, cone) = instance(seed, n, free);
        let r = solve_exact(&op, &cone, &SolveConfig::default()).unwrap();
        prop_assert!(r.converged);
        let oracle = lcp_enumerate(op.matrix(), op.offset(), &cone).unwrap();
        prop_assert!(rel_err(&r.x, &oracle) <= 1e-8);
    }

    #[test]
    fn exact_iterates_are_feasible_and_contract(seed in 0u64..10_000, n in 2usize..10) {
        let (op, cone) = instance(seed, n, n / 3);
        let r = solve_exact(&op, &cone, &traced()).unwrap();
        let gamma = r.gamma().unwrap();
        let trace = r.trace.unwrap();
        for x in &trace.iterates {
            prop_assert!(cone.contains(x, 0.0).unwrap());
        }
        let d = trace.distances_to_final();
        for w in d.windows(2) {
            prop_assert!(w[1] <= gamma * w[0] + 1e-10);
        }
    }

    #[test]
    fn split_form_reproduces_the_exact_iterates(seed in 0u64..10_000, n in 2usize..8) {
        let (op, cone) = instance(seed, n, 1);
        let cfg = SolveConfig { max_iter: Some(25), ..traced() };
        let a = solve_exact(&op, &cone, &cfg).unwrap().trace.unwrap();
        let b = solve_exact_split(&op, &cone, &cfg).unwrap().trace.unwrap();
        prop_assert_eq!(a.iterates.len(), b.iterates.len());
        for (x, y) in a.iterates.iter().zip(&b.iterates) {
            prop_assert!((x - y).amax() <= 1e-12 * (1.0 + x.amax()));
        }
    }

    #[test]
    fn galerkin_fixed_point_matches_reduced_lcp_oracle(seed in 0u64..10_000, n in 2usize..9, kf in 0.2..1.0f64, free in 0usize..3) {
        let free = free.min(n - 1);
        let k = ((n as f64 * kf) as usize).clamp(1, n);
        let (op, cone) = instance(seed, n, free);
        let basis = Basis::orthonormalize(gaussian_matrix(&mut rng(seed + 1), n, k), 1e-10).unwrap();
        let r = solve_galerkin(&op, &cone, &basis, &SolveConfig::default(), None).unwrap();
        prop_assert!(r.converged);
        let alpha = r.alpha().unwrap();
        let (big, off) = dense_projective(basis.ortho(), op.matrix(), op.offset(), alpha);
        let oracle = lcp_enumerate(&big, &off, &cone).unwrap();
        prop_assert!(rel_err(&r.x, &oracle) <= 1e-7, "{} vs {}", r.x, oracle);
    }

    #[test]
    fn galerkin_iterates_stay_in_their_sets(seed in 0u64..10_000, n in 3usize..10) {
        let (op, cone) = instance(seed, n, 1);
        let basis = Basis::orthonormalize(gaussian_matrix(&mut rng(seed + 7), n, 2), 1e-10).unwrap();
        let r = solve_galerkin(&op, &cone, &basis, &traced(), None).unwrap();
        let gamma = r.gamma().unwrap();
        let trace = r.trace.as_ref().unwrap();
        for x in &trace.iterates {
            prop_assert!(cone.contains(x, 0.0).unwrap());
        }
        for z in trace.z_iterates.iter().skip(1) {
            prop_assert!(basis.representation_error(z).unwrap() <= 1e-12 * (1.0 + z.norm()));
        }
        let d = trace.z_distances_to_final();
        for w in d.windows(2) {
            prop_assert!(w[1] <= gamma * w[0] + 1e-10);
        }
    }

    #[test]
    fn converged_galerkin_solves_are_certified(seed in 0u64..10_000, n in 2usize..12, k in 1usize..5) {
        let k = k.min(n);
        let (op, cone) = instance(seed, n, n / 4);
        let basis = Basis::orthonormalize(gaussian_matrix(&mut rng(seed + 3), n, k), 1e-10).unwrap();
        let r = solve_galerkin(&op, &cone, &basis, &SolveConfig::default(), None).unwrap();
        prop_assert!(r.converged);
        let c = r.certificate.unwrap();
        prop_assert!(c.is_valid(1e-8));
        prop_assert!(c.complementarity_gap <= 1e-8 * (1.0 + r.x.norm() * c.epsilon.norm()));
    }

    #[test]
    fn bertsekas_matches_the_coefficient_lcp(seed in 0u64..10_000, n in 2usize..9, k in 1usize..4) {
        let k = k.min(n);
        let (op, cone) = instance(seed, n, 0);
        let raw = block_basis(seed, n, k);
        let basis = Basis::orthonormalize(raw.clone(), 1e-10).unwrap();
        let cfg = SolveConfig { record_trace: true, ..SolveConfig::default() };
        let r = solve_bertsekas(&op, &cone, &basis, &cfg, None).unwrap();
        prop_assert!(r.converged);
        for x in &r.trace.as_ref().unwrap().iterates {
            prop_assert!(cone.contains(x, 1e-10).unwrap());
            prop_assert!(basis.representation_error(x).unwrap() <= 1e-9 * (1.0 + x.norm()));
        }
        // x = Φc with c ≥ 0 and Φᵀ F(Φc) ⊥ c.
        let reduced_m = raw.transpose() * op.matrix() * &raw;
        let reduced_q = raw.transpose() * op.offset();
        let c = lcp_enumerate(&reduced_m, &reduced_q, &SeparableCone::orthant(k).unwrap()).unwrap();
        prop_assert!(rel_err(&r.x, &(&raw * c)) <= 1e-7);
    }

    #[test]
    fn intersection_projection_is_the_nearest_point(seed in 0u64..10_000, n in 2usize..9, k in 1usize..4) {
        let k = k.min(n);
        let cone = SeparableCone::orthant(n).unwrap();
        let raw = block_basis(seed, n, k);
        let basis = Basis::orthonormalize(raw.clone(), 1e-10).unwrap();
        let mut r = rng(seed);
        let z = gaussian_vector(&mut r, n) * 3.0;
        let x = project_intersection(&cone, &basis, &z, 1e-13, 100_000).unwrap();
        for _ in 0..10 {
            let y = &raw * gaussian_vector(&mut r, k).abs();
            prop_assert!((&z - &x).dot(&(&y - &x)) <= 1e-8 * (1.0 + z.norm() * y.norm()));
        }
    }

    #[test]
    fn dykstra_agrees_with_the_exact_projection(seed in 0u64..10_000, n in 2usize..9, k in 1usize..4) {
        let k = k.min(n);
        let cone = mixed_cone(n, n / 3);
        let basis = Basis::orthonormalize(block_basis(seed, n, k), 1e-10).unwrap();
        let z = gaussian_vector(&mut rng(seed + 5), n) * 3.0;
        let exact = project_intersection(&cone, &basis, &z, 1e-13, 10).unwrap();
        let slow = project_intersection_dykstra(&cone, &basis, &z, 1e-13, 200_000).unwrap();
        prop_assert!((&exact - &slow).amax() <= 1e-9 * (1.0 + z.norm()));
    }

    #[test]
    fn span_error_never_exceeds_intersection_error(seed in 0u64..10_000, n in 2usize..12, k in 1usize..5) {
        let k = k.min(n);
        let cone = mixed_cone(n, n / 4);
        let basis = Basis::orthonormalize(gaussian_matrix(&mut rng(seed), n, k), 1e-10).unwrap();
        let z = gaussian_vector(&mut rng(seed + 2), n);
        let x = project_intersection(&cone, &basis, &z, 1e-12, 10_000).unwrap();
        prop_assert!(cone.contains(&x, 0.0).unwrap());
        prop_assert!(basis.representation_error(&x).unwrap() <= 1e-9 * (1.0 + z.norm()));
        prop_assert!(basis.representation_error(&z).unwrap() <= (&x - &z).norm() + 1e-10);
    }

    #[test]
    fn bounds_hold_on_random_instances(seed in 0u64..10_000, n in 3usize..10, k in 1usize..4) {
        let k = k.min(n);
        let (op, cone) = instance(seed, n, 0);
        let raw = if seed % 2 == 0 { block_basis(seed, n, k) } else { gaussian_matrix(&mut rng(seed), n, k) };
        let basis = Basis::orthonormalize(raw, 1e-10).unwrap();
        let rep = bound_report(&op, &cone, &basis, &SolveConfig::default()).unwrap();
        prop_assert!(rep.bertsekas_holds());
        prop_assert!(rep.galerkin_holds());
    }
}

#[test]
fn identity_basis_collapses_all_three_methods() {
    for seed in 0..10 {
        let (op, cone) = instance(seed, 7, 2);
        let basis = Basis::identity(7).unwrap();
        let cfg = SolveConfig::default();
        let x = solve_exact(&op, &cone, &cfg).unwrap().x;
        let b = solve_bertsekas(&op, &cone, &basis, &cfg, None).unwrap().x;
        let g = solve_galerkin(&op, &cone, &basis, &cfg, None).unwrap().x;
        assert!(rel_err(&b, &x) <= 1e-8);
        assert!(rel_err(&g, &x) <= 1e-8);
    }
}

#[test]
fn nonlinear_operator() {
    // F(x) = x + tanh(x) + q: β = 1, L = 2.
    let q = DVector::from_vec(vec![-1.0, 0.5, -3.0, 2.0]);
    let f = |x: &DVector<f64>| x + x.map(f64::tanh) + &q;
    let op = FnOperator::new(4, f, 1.0, 2.0).unwrap();
    let cone = SeparableCone::orthant(4).unwrap();
    let r = solve_exact(&op, &cone, &SolveConfig::default()).unwrap();
    assert!(r.converged);
    let fx = op.eval(&r.x);
    assert!(cone.is_complementary(&r.x, &fx, 1e-8).unwrap());
    assert!(r.x[1].abs() < 1e-12 && r.x[3].abs() < 1e-12);
    let g = solve_galerkin(
        &op,
        &cone,
        &Basis::identity(4).unwrap(),
        &SolveConfig::default(),
        None,
    )
    .unwrap();
    assert!(rel_err(&g.x, &r.x) <= 1e-8);
}

#[test]
fn apriori_bounds_are_reported_for_references() {
    let (op, cone) = instance(11, 6, 0);
    let basis = Basis::orthonormalize(block_basis(11, 6, 2), 1e-10).unwrap();
    let cfg = SolveConfig::default();
    let x_star = solve_exact(&op, &cone, &cfg).unwrap().x;
    let alpha = op.contraction_params().unwrap().alpha;
    let z_star = &x_star - op.eval(&x_star) * alpha;
    let b = solve_bertsekas(&op, &cone, &basis, &cfg, Some(&x_star)).unwrap();
    assert!((&b.x - &x_star).norm() <= b.apriori_bound.unwrap() + 1e-8);
    let g = solve_galerkin(&op, &cone, &basis, &cfg, Some(&z_star)).unwrap();
    let bound = g.apriori_bound.unwrap();
    assert!((g.z.as_ref().unwrap() - &z_star).norm() <= bound + 1e-8);
    assert!((&g.x - &x_star).norm() <= bound + 1e-8);
}

#[test]
fn certificate_detects_a_perturbed_point() {
    let (op, cone) = instance(2, 5, 0);
    let basis = Basis::orthonormalize(gaussian_matrix(&mut rng(9), 5, 2), 1e-10).unwrap();
    let r = solve_galerkin(&op, &cone, &basis, &SolveConfig::default(), None).unwrap();
    let z = r.z.unwrap();
    let alpha = r.contraction.unwrap().alpha;
    let mut z_bad = z.clone();
    z_bad[0] += 0.5;
    let x_bad = cone.project(&z_bad).unwrap();
    let c = certify(&op, &cone, &basis, &x_bad, &z_bad, alpha, 1e-8).unwrap();
    assert!(!c.is_valid(1e-8));
}

#[test]
fn rejects_operators_that_are_not_strongly_monotone() {
    let op = AffineOperator::new(
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
        DVector::zeros(2),
    )
    .unwrap();
    let cone = SeparableCone::orthant(2).unwrap();
    assert!(matches!(
        solve_exact(&op, &cone, &SolveConfig::default()),
        Err(Error::NotStronglyMonotone { .. })
    ));
}

#[test]
fn rejects_mismatched_dimensions() {
    let (op, _) = instance(0, 4, 0);
    let cfg = SolveConfig::default();
    assert!(matches!(
        solve_exact(&op, &SeparableCone::orthant(3).unwrap(), &cfg),
        Err(Error::DimensionMismatch { .. })
    ));
    let cone = SeparableCone::orthant(4).unwrap();
    assert!(solve_galerkin(&op, &cone, &Basis::identity(3).unwrap(), &cfg, None).is_err());
}

#[test]
fn iteration_limit_is_reported_not_raised() {
    let (op, cone) = instance(4, 6, 0);
    let cfg = SolveConfig {
        max_iter: Some(2),
        tol: 1e-15,
        ..SolveConfig::default()
    };
    let r = solve_exact(&op, &cone, &cfg).unwrap();
    assert!(!r.converged);
    assert_eq!(r.iterations, 2);
}

mod common;

use common::{random_pd, random_simplex};
use erep_core::baselines::{orsad_step, OrsadParams};
use erep_core::linalg::{dot, Matrix};
use erep_core::optimizer::{
    brute_force_simplex_min, composite_newton_step, composite_objective, group_norm,
    group_norm_subgradient, CompositeStepParams, CurvatureMatrix, SubproblemSolver,
};
use erep_core::portfolio::project_simplex;
use erep_core::Grouping;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn groupings(dim: usize) -> Grouping {
    match dim {
        2 => Grouping::from_indices(2, &[&[0], &[1]]).unwrap(),
        3 => Grouping::from_indices(3, &[&[0, 1], &[2]]).unwrap(),
        _ => Grouping::from_indices(4, &[&[0, 1], &[2, 3]]).unwrap(),
    }
}

fn vec_strategy(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-5.0..5.0f64, dim)
}

proptest! {
    #[test]
    fn group_norm_is_a_norm(u in vec_strategy(4), v in vec_strategy(4), c in -3.0..3.0f64) {
        let g = groupings(4);
        let lu = group_norm(&u, &g).unwrap();
        let lv = group_norm(&v, &g).unwrap();
        prop_assert!(lu >= 0.0);
        let cu: Vec<f64> = u.iter().map(|x| c * x).collect();
        prop_assert!((group_norm(&cu, &g).unwrap() - c.abs() * lu).abs() <= 1e-12 * (1.0 + lu));
        let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        prop_assert!(group_norm(&sum, &g).unwrap() <= lu + lv + 1e-12);
    }

    #[test]
    fn subgradient_inequality(x in vec_strategy(4), y in vec_strategy(4)) {
        let g = groupings(4);
        let s = group_norm_subgradient(&x, &g).unwrap();
        let d: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
        let lhs = group_norm(&y, &g).unwrap();
        let rhs = group_norm(&x, &g).unwrap() + dot(&s, &d);
        prop_assert!(lhs >= rhs - 1e-12, "{} < {}", lhs, rhs);
    }

    #[test]
    fn projection_satisfies_threshold_conditions(v in vec_strategy(6)) {
        let p = project_simplex(&v).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let (i, _) = p.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let tau = v[i] - p[i];
        for (pi, vi) in p.iter().zip(&v) {
            prop_assert!(*pi >= 0.0);
            if *pi > 0.0 {
                prop_assert!((vi - pi - tau).abs() < 1e-9);
            } else {
                prop_assert!(*vi <= tau + 1e-9);
            }
        }
    }

    #[test]
    fn curvature_stays_above_initial_floor(
        grads in proptest::collection::vec(vec_strategy(3), 1..20),
        eps in 0.01..5.0f64,
    ) {
        let mut a = CurvatureMatrix::new(3, eps).unwrap();
        for g in &grads {
            a.add_gradient(g).unwrap();
        }
        prop_assert!(a.min_eigenvalue().unwrap() >= eps - 1e-9 * (1.0 + eps));
        prop_assert_eq!(a.matrix().max_asymmetry(), 0.0);
    }
}

/// Smallest eigenvalue by power iteration on `cI − A`, independent of the Jacobi solver.
fn power_min_eigenvalue(a: &Matrix) -> f64 {
    let n = a.rows();
    let c: f64 = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 * 0.1).collect();
    let mut mu = 0.0;
    for _ in 0..20_000 {
        let av = a.mul_vec(&v);
        let w: Vec<f64> = v.iter().zip(&av).map(|(x, y)| c * x - y).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        mu = dot(&v, &w) / dot(&v, &v);
        v = w.into_iter().map(|x| x / norm).collect();
    }
    c - mu
}

#[test]
fn min_eigenvalue_matches_power_iteration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let mut a = CurvatureMatrix::new(4, 0.5).unwrap();
        for _ in 0..6 {
            let g: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            a.add_gradient(&g).unwrap();
        }
        let jacobi = a.min_eigenvalue().unwrap();
        let power = power_min_eigenvalue(a.matrix());
        assert!(
            (jacobi - power).abs() < 1e-6 * (1.0 + power.abs()),
            "{jacobi} vs {power}"
        );
    }
}

#[test]
fn composite_step_matches_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..30 {
        let dim = 2 + case % 3;
        let g = groupings(dim);
        let a = CurvatureMatrix::from_matrix(random_pd(&mut rng, dim, 0.1)).unwrap();
        let grad: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let w_prev = random_simplex(&mut rng, dim);
        let params = CompositeStepParams {
            eta: rng.gen_range(0.1..2.0),
            lambda: [0.0, 0.1, 1.0][case % 3],
            ..Default::default()
        };
        let sol = composite_newton_step(&grad, &a, &w_prev, &params, &g).unwrap();
        let f = |w: &[f64]| composite_objective(&grad, &a, &w_prev, &params, &g, w);
        let (_, grid) = brute_force_simplex_min(f, dim, 0.01).unwrap();
        assert!(sol.converged);
        assert!(
            sol.objective <= grid + 1e-6,
            "case {case}: {} > {grid}",
            sol.objective
        );
    }
}

#[test]
fn subgradient_solver_is_close_to_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let g = groupings(4);
        let a = CurvatureMatrix::from_matrix(random_pd(&mut rng, 4, 0.5)).unwrap();
        let grad: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w_prev = random_simplex(&mut rng, 4);
        let exact_params = CompositeStepParams {
            eta: 1.0,
            lambda: 0.1,
            ..Default::default()
        };
        let slow_params = CompositeStepParams {
            solver: SubproblemSolver::ProjectedSubgradient,
            ..exact_params
        };
        let exact = composite_newton_step(&grad, &a, &w_prev, &exact_params, &g).unwrap();
        let slow = composite_newton_step(&grad, &a, &w_prev, &slow_params, &g).unwrap();
        assert!(slow.objective >= exact.objective - 1e-10);
        assert!(slow.objective - exact.objective < 1e-3);
    }
}

#[test]
fn orsad_step_matches_constrained_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let g = groupings(3);
    for _ in 0..30 {
        let k = rng.gen_range(0.5..1.0);
        let params = OrsadParams {
            eta: rng.gen_range(0.01..2.0),
            k,
        };
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(0.8..1.25)).collect();
        // feasible previous point
        let b_prev = loop {
            let b = random_simplex(&mut rng, 3);
            if b[0] + b[1] <= k && b[2] <= k {
                break b;
            }
        };
        let f = |b: &[f64]| {
            if group_norm(b, &g).unwrap() > k + 1e-9 {
                return f64::INFINITY;
            }
            let d2: f64 = b.iter().zip(&b_prev).map(|(u, v)| (u - v) * (u - v)).sum();
            -params.eta * dot(b, &x).ln() + 0.5 * d2
        };
        let b = orsad_step(&b_prev, &x, &params, &g).unwrap();
        let (_, grid) = brute_force_simplex_min(f, 3, 0.005).unwrap();
        assert!(group_norm(&b, &g).unwrap() <= k + 1e-9);
        assert!(f(&b) <= grid + 1e-6, "{} > {grid}", f(&b));
    }
}

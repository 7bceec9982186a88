use proptest::prelude::*;
use sfinv_perturb::experiment::{locus_residual, LimitClass};
use sfinv_perturb::field::ScalarField;
use sfinv_perturb::multiplier::leading_term_kernel_variation;
use sfinv_perturb::scenario::{self, distance};
use sfinv_perturb::{
    convergence_filter, leading_term, newton_critical_point, run_localisation, NewtonOptions, RunOptions, Scenario,
};

const EPSILONS: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Root of `4x(x^2 - 1) + eps` near -1, by bisection.
fn circle_root_near_minus_one(eps: f64) -> f64 {
    let g = |x: f64| 4.0 * x * (x * x - 1.0) + eps;
    let (mut lo, mut hi) = (-1.5, -0.9);
    assert!(g(lo) * g(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(lo) * g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn sorted_indices(r: &sfinv_perturb::ExperimentReport) -> Vec<usize> {
    let mut v: Vec<usize> = r.found.iter().map(|f| f.index.unwrap()).collect();
    v.sort();
    v
}

#[test]
fn newton_on_the_circle_family_matches_bisection() {
    let sc = scenario::circle();
    let field = sc.family.at(0.01);
    let out = newton_critical_point(&field, &[-1.0, 0.0, 0.0], NewtonOptions::default()).unwrap();
    let root = circle_root_near_minus_one(0.01);
    assert!((out.point[0] - root).abs() < 1e-12, "{} vs {root}", out.point[0]);
    assert!((root + 1.00125).abs() < 1e-5);
    assert!(out.point[1].abs() < 1e-14 && out.point[2].abs() < 1e-14);
}

#[test]
fn far_seed_fails_or_lands_outside_the_basin() {
    let sc = scenario::circle();
    let field = sc.family.at(0.01);
    match newton_critical_point(&field, &[10.0, 10.0, 10.0], NewtonOptions::default()) {
        Err(_) => {}
        Ok(out) => {
            let d = (sc.z0_distance)(&out.point);
            let near_prediction = sc.predicted.iter().any(|p| distance(&p.point(), &out.point) < 0.1);
            assert!(d >= 0.5 || near_prediction, "{:?}", out.point);
        }
    }
}

#[test]
fn circle_localises_with_predicted_indices() {
    let sc = scenario::circle();
    let reports = run_localisation(&sc, &EPSILONS, &RunOptions::default()).unwrap();
    for r in &reports {
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.found.len(), 2);
        assert_eq!(sorted_indices(r), vec![0, 1]);
        assert_eq!(r.signed_count, 0);
        assert_eq!(r.expected_signed_count, Some(0));
        assert!(r.found.iter().all(|f| f.grad_norm < 1e-10 && f.min_abs_eigenvalue > r.gap));
        let minus = r.found.iter().find(|f| f.point[0] < 0.0).unwrap();
        assert!((minus.point[0] - circle_root_near_minus_one(r.epsilon)).abs() < 1e-12);
    }
}

#[test]
fn sphere_localises_with_signed_count_two() {
    let sc = scenario::sphere();
    let reports = run_localisation(&sc, &[1e-1, 5e-2, 1e-2, 1e-3], &RunOptions::default()).unwrap();
    for r in &reports {
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(sorted_indices(r), vec![0, 2]);
        assert_eq!(r.signed_count, 2);
        // Axial reduction: 4z(z^2 - 1) + eps = 0 on the z-axis.
        for f in &r.found {
            let z = f.point[2];
            assert!((4.0 * z * (z * z - 1.0) + r.epsilon).abs() < 1e-9);
            assert!(f.point[0].abs() < 1e-12 && f.point[1].abs() < 1e-12);
        }
    }
}

#[test]
fn negative_epsilon_uses_compactly_supported_count() {
    for sc in [scenario::circle(), scenario::sphere()] {
        let reports = run_localisation(&sc, &[-1e-1, -1e-2, -1e-3], &RunOptions::default()).unwrap();
        let chi_c = sc.components[0].euler_char_c;
        for r in &reports {
            assert!(r.passed(), "{}: {:?}", sc.name, r.failures);
            assert_eq!(r.signed_count, chi_c);
        }
    }
    let r = run_localisation(&scenario::circle(), &[-0.01], &RunOptions::default()).unwrap();
    let plus = r[0].found.iter().find(|f| f.point[0] > 0.0).unwrap();
    assert_eq!(plus.index, Some(0));
}

#[test]
fn linear_model_finds_the_leading_term_critical_points() {
    let sc = scenario::linear();
    let reports = run_localisation(&sc, &EPSILONS, &RunOptions::default()).unwrap();
    for r in &reports {
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.found.len(), 3);
        assert_eq!(r.checks.signed_count, None);
        assert_eq!(r.expected_signed_count, None);
        for f in &r.found {
            let w = f.point[2];
            // Exact critical points: u1 = -eps w^3, u2 = -eps/4.
            assert!((f.point[0] + r.epsilon * w.powi(3)).abs() < 1e-12);
            assert!((f.point[1] + r.epsilon / 4.0).abs() < 1e-12);
            let expected = if w.abs() < 1e-6 { 1 } else { 0 };
            assert_eq!(f.index, Some(expected));
        }
    }
}

#[test]
fn escape_scenario_keeps_only_the_local_point() {
    let sc = scenario::escape();
    let r = &run_localisation(&sc, &[0.1, 0.01], &RunOptions::default()).unwrap();
    for rep in r {
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(rep.found.len(), 1);
        assert_eq!(rep.signed_count, 1);
    }
}

#[test]
fn flat_family_abstains() {
    let sc = scenario::flat();
    let r = run_localisation(&sc, &[0.1], &RunOptions::default()).unwrap();
    assert!(r[0].degenerate);
    assert!(r[0].found.is_empty());
    assert_eq!(r[0].checks.bijection, None);
    assert!(r[0].passed());
}

#[test]
fn circle_trajectories_localise() {
    let sc = scenario::circle();
    let reports = run_localisation(&sc, &EPSILONS, &RunOptions::default()).unwrap();
    for target in [1.0, -1.0] {
        let seq: Vec<(f64, Vec<f64>)> = reports
            .iter()
            .map(|r| {
                let f = r.found.iter().find(|f| f.point[0].signum() == target).unwrap();
                (r.epsilon, f.point.clone())
            })
            .collect();
        let v = convergence_filter(&sc, &seq, 1e3).unwrap();
        assert_eq!(v.class, LimitClass::Localises, "{v:?}");
        assert!(distance(&v.limit, &[target, 0.0, 0.0]) < 1e-5);
    }
}

#[test]
fn constant_sequence_on_z1_localises() {
    let sc = scenario::circle();
    let v = convergence_filter(&sc, &[(0.0, vec![1.0, 0.0, 0.0]), (0.0, vec![1.0, 0.0, 0.0])], 1e3).unwrap();
    assert_eq!(v.class, LimitClass::Localises);
    assert_eq!(v.residual, 0.0);
}

#[test]
fn far_branch_escapes() {
    let sc = scenario::escape();
    let seq: Vec<(f64, Vec<f64>)> = [1e-1, 1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&eps| {
            let field = sc.family.at(eps);
            let out = newton_critical_point(&field, &[1.2 / eps], NewtonOptions::default()).unwrap();
            assert!((out.point[0] * eps - 1.0).abs() < 1e-9);
            (eps, out.point)
        })
        .collect();
    let v = convergence_filter(&sc, &seq, 1e3).unwrap();
    assert_eq!(v.class, LimitClass::Escapes);
}

#[test]
fn points_off_the_locus_are_classified() {
    let sc = scenario::circle();
    let v = convergence_filter(&sc, &[(0.0, vec![0.0, 1.0, 0.0])], 1e3).unwrap();
    assert_eq!(v.class, LimitClass::OffLocus);
    let v = convergence_filter(&sc, &[(0.0, vec![0.5, 0.0, 0.0])], 1e3).unwrap();
    assert_eq!(v.class, LimitClass::OffLocus);
    assert!(locus_residual(&sc, &[1.0, 0.0, 0.0]) < 1e-15);
    // sin(t) ~ 1e-3 of tangential gradient sits between the thresholds.
    let t: f64 = 2e-3;
    let v = convergence_filter(&sc, &[(0.0, vec![t.cos(), t.sin(), 0.0])], 1e3).unwrap();
    assert_eq!(v.class, LimitClass::Inconclusive);
}

#[test]
fn multiplier_kernel_invariance_on_builtins() {
    for sc in [scenario::circle(), scenario::sphere(), scenario::linear(), scenario::escape()] {
        for p in &sc.predicted {
            let x = p.point();
            assert!(leading_term_kernel_variation(&sc.family, &x).unwrap() < 1e-8, "{}", sc.name);
            assert!(leading_term(&sc.family, &x).unwrap().is_finite());
        }
    }
}

fn builtins() -> Vec<Scenario> {
    vec![scenario::circle(), scenario::sphere(), scenario::linear(), scenario::escape()]
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn finite_differences_agree_with_analytic_derivatives(
        which in 0usize..4,
        coords in prop::collection::vec(-1.5f64..1.5, 3),
        eps in -0.2f64..0.2,
    ) {
        let sc = &builtins()[which];
        let x = &coords[..sc.dim()];
        let field = sc.family.at(eps);
        for f in [&sc.family.s0, &sc.family.s1, &sc.family.s2, &field] {
            let (g, fd) = (f.gradient(x), f.fd_gradient(x));
            prop_assert!((&g - &fd).norm() <= 1e-6 * g.norm().max(1.0), "{} {g} {fd}", sc.name);
            let (h, fdh) = (f.hessian(x), f.fd_hessian(x));
            prop_assert!((&h - &fdh).norm() <= 1e-6 * h.norm().max(1.0), "{} {h} {fdh}", sc.name);
        }
    }

    #[test]
    fn value_only_fields_fall_back_to_differences(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let f = ScalarField::new(2, |x| x[0].sin() * x[1].exp());
        let g = f.gradient(&[a, b]);
        prop_assert!(relative_gap(g[0], a.cos() * b.exp()) < 1e-6);
        prop_assert!(relative_gap(g[1], a.sin() * b.exp()) < 1e-6);
        let h = f.hessian(&[a, b]);
        prop_assert!((h[(0, 1)] - a.cos() * b.exp()).abs() < 1e-5 * b.exp().max(1.0));
    }
}

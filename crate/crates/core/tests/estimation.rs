// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trackmap::estimation::{
    continuity_residuals, jacobian_fd, levenberg_marquardt, measurement_residual, total_error, AssignmentSet,
    ContinuityWeights, InfoMatrix, LeastSquaresProblem, LmConfig, Measurement, ResidualSystem, Termination,
};
use trackmap::geometry::{foot_point, Point2, Pose, TrackElement};
use trackmap::simulation::{reference_track, simulate_dataset, SimConfig};
use trackmap::trackmap::{build_chain, fill_gaps, reparameterize, OptParamSet, ParamBlock};
use trackmap::Error;

use common::{central_jacobian, grid_foot_point};

fn replication(seed: u64, sigma: f64) -> (OptParamSet<f64>, AssignmentSet<f64>) {
    let config = SimConfig {
        seed,
        noise_sigma: sigma,
        paper_replication: true,
        ..SimConfig::default()
    };
    let ds = simulate_dataset::<f64>(&config).unwrap();
    let params = reparameterize(&fill_gaps(&ds.initial).unwrap()).unwrap();
    (params, ds.gnss.assignments)
}

fn straight_10() -> OptParamSet<f64> {
    OptParamSet::new(
        vec![1],
        vec![ParamBlock::Straight {
            start: Point2::new(0.0, 0.0),
            end: Point2::new(10.0, 0.0),
        }],
    )
    .unwrap()
}

fn fix(track_id: u32, xi: f64, eta: f64) -> Measurement<f64> {
    Measurement {
        track_id,
        z: Point2::new(xi, eta),
        omega: InfoMatrix::isotropic(10.0).unwrap(),
    }
}

#[test]
fn residual_examples() {
    let p = straight_10();
    assert_eq!(
        measurement_residual(&p, &fix(1, 5.0, 3.0)).unwrap(),
        Point2::new(0.0, 3.0)
    );
    assert_eq!(
        measurement_residual(&p, &fix(1, 5.0, 0.0)).unwrap(),
        Point2::new(0.0, 0.0)
    );
    assert!(matches!(
        measurement_residual(&p, &fix(7, 5.0, 0.0)),
        Err(Error::Assignment(_))
    ));
}

#[test]
fn first_reference_residual_matches_grid_oracle() {
    let (params, assignments) = replication(1, 10.0);
    let m = assignments.measurements()[0];
    let e = measurement_residual(&params, &m).unwrap();
    let placed = build_chain(&params).unwrap();
    let (element, start) = placed.elements[0];
    let (_, foot, _) = grid_foot_point(&element, &start, m.z, 0.01);
    let oracle = m.z - foot;
    assert!((e - oracle).norm() < 1e-3, "{e:?} vs {oracle:?}");
}

#[test]
fn total_error_is_zero_on_track_and_scales_with_omega() {
    let map = reference_track::<f64>();
    let params = OptParamSet::from_compact(&map).unwrap();
    let on_track = AssignmentSet::new(
        map.stations(25.0)
            .unwrap()
            .into_iter()
            .map(|st| Measurement {
                track_id: st.id.unwrap(),
                z: st.pose.position(),
                omega: InfoMatrix::isotropic(10.0).unwrap(),
            })
            .collect(),
    );
    assert!(total_error(&params, &on_track).unwrap() < 1e-16);

    let (p, a) = replication(1, 10.0);
    let f1 = total_error(&p, &a).unwrap();
    let f10 = total_error(&p, &a.with_scaled_information(10.0)).unwrap();
    assert!(f1 > 0.0);
    assert!((f10 / f1 - 10.0).abs() < 1e-12);
}

#[test]
fn golden_initial_cost() {
    let (p, a) = replication(1, 10.0);
    let system = ResidualSystem::new(p.clone(), a, ContinuityWeights::default()).unwrap();
    let eval = system.evaluate(&p.flatten()).unwrap();
    // frozen from the first oracle-checked run; the continuity rows dominate
    // the total because the published initial set leaves metre-scale gaps
    assert!((eval.measurement_cost() / 2.387_648_432_454_777e3 - 1.0).abs() < 1e-9);
    assert!((eval.total_cost() / 6.929_148_023_800_561e7 - 1.0).abs() < 1e-9);
    // in unweighted square metres the fixes alone contribute ~2.4e5
    assert!((eval.measurement_cost() * 100.0 - 2.39e5).abs() < 0.01e5);
}

#[test]
fn residual_layout_and_determinism() {
    let (p, a) = replication(2, 10.0);
    let n = a.len();
    let system = ResidualSystem::new(p.clone(), a, ContinuityWeights::default()).unwrap();
    assert_eq!(system.residual_count(), 2 * n + 3 * 2);
    assert_eq!(system.parameter_count(), 20);
    let r1 = system.residuals(&p.flatten()).unwrap();
    let r2 = system.residuals(&p.flatten()).unwrap();
    assert_eq!(r1.len(), system.residual_count());
    assert!(r1.iter().zip(&r2).all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn continuity_rows_scale_with_sigma() {
    let (p, _) = replication(1, 10.0);
    let w = ContinuityWeights::default();
    let base = continuity_residuals(&p, &w).unwrap();
    let doubled = continuity_residuals(
        &p,
        &ContinuityWeights {
            position_sigma: 2.0 * w.position_sigma,
            ..w
        },
    )
    .unwrap();
    for (i, (a, b)) in base.iter().zip(&doubled).enumerate() {
        if i % 3 == 2 {
            assert_eq!(a, b);
        } else {
            assert!((a / 2.0 - b).abs() <= 1e-12 * a.abs());
        }
    }
    assert!(base.iter().any(|v| v.abs() > 100.0), "initial chain has visible gaps");
    let exact = OptParamSet::from_compact(&reference_track::<f64>()).unwrap();
    assert!(continuity_residuals(&exact, &w).unwrap().iter().all(|v| v.abs() < 1e-6));
}

/// Worst column-relative disagreement `max_i |fd - cd| / max_i |cd|` of the
/// forward-difference Jacobian with central differences (h = 1e-4 max(1, |x|)),
/// and the worst entry-wise relative disagreement over entries above 1e-8.
///
/// Rows of fixes whose foot point lies within 1 m of an element end are
/// skipped: clamping makes the residual non-differentiable there and the
/// central step can cross the kink.
fn jacobian_disagreement(system: &ResidualSystem<f64>, x: &[f64]) -> (f64, f64) {
    let fd = jacobian_fd(system, x, 1e-6).unwrap();
    let cd = central_jacobian(system, x, 1e-4);
    let placed = build_chain(&system.params_at(x).unwrap()).unwrap();
    let smooth: Vec<bool> = system
        .assignments()
        .measurements()
        .iter()
        .map(|m| {
            let (e, start) = placed.elements[placed.position_of(m.track_id).unwrap()];
            let f = foot_point(&e, &start, m.z);
            f.s > 1.0 && f.s < e.length() - 1.0
        })
        .collect();
    let (mut column, mut entry): (f64, f64) = (0.0, 0.0);
    for (j, col) in cd.iter().enumerate() {
        let scale = col.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut worst: f64 = 0.0;
        for (i, &c) in col.iter().enumerate() {
            if smooth.get(i / 2) == Some(&false) {
                continue;
            }
            let f = fd.get(i, j);
            worst = worst.max((f - c).abs());
            if c.abs().max(f.abs()) > 1e-8 {
                entry = entry.max((f - c).abs() / c.abs().max(f.abs()));
            }
        }
        if scale > 0.0 {
            column = column.max(worst / scale);
        }
    }
    (column, entry)
}

#[test]
fn jacobian_matches_central_differences_at_initialization() {
    let (p, a) = replication(1, 10.0);
    let system = ResidualSystem::new(p.clone(), a, ContinuityWeights::default()).unwrap();
    let (column, entry) = jacobian_disagreement(&system, &p.flatten());
    assert!(column < 1e-4, "column-relative disagreement {column:e}");
    // entries a million times below their column scale carry the O(h)
    // truncation error of the forward step; reported, not asserted
    println!("entry-wise relative disagreement {entry:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jacobian_matches_central_differences_at_random_params(seed in 0u64..1000, scale in 0.0f64..5.0) {
        let (p, a) = replication(1 + seed % 3, 10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = p
            .flatten()
            .iter()
            .map(|v| v + scale * rand::Rng::random_range(&mut rng, -1.0..1.0))
            .collect();
        let system = ResidualSystem::new(p, a, ContinuityWeights::default()).unwrap();
        let (column, _) = jacobian_disagreement(&system, &x);
        prop_assert!(column < 1e-4, "column-relative disagreement {:e}", column);
    }
}

fn tight() -> LmConfig {
    LmConfig {
        relative_step_tolerance: 1e-13,
        gradient_tolerance: 0.0,
        max_iterations: 2000,
        ..LmConfig::default()
    }
}

/// `x` is a minimizer of `system` to working precision: restarting the
/// solver from it lowers the cost by less than `1e-12` relative.
fn assert_stationary(system: &ResidualSystem<f64>, x: &[f64]) {
    let restart = levenberg_marquardt(system, x, &tight()).unwrap();
    let gain = (restart.initial_cost - restart.final_cost) / restart.initial_cost;
    assert!(gain < 1e-12, "restart lowered the cost by {gain:e}");
}

// Per-coordinate agreement of the two minimizers is limited by the
// conditioning of the transition/curve trade-off; the tests check that each
// solution minimizes the other objective instead.

#[test]
fn lm_is_permutation_invariant() {
    let (p, a) = replication(3, 10.0);
    let mut shuffled = a.measurements().to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(9));
    let b = AssignmentSet::new(shuffled);
    let sa = ResidualSystem::new(p.clone(), a, ContinuityWeights::default()).unwrap();
    let sb = ResidualSystem::new(p.clone(), b, ContinuityWeights::default()).unwrap();
    let x0 = p.flatten();
    let fa = sa.evaluate(&x0).unwrap().total_cost();
    let fb = sb.evaluate(&x0).unwrap().total_cost();
    assert!((fa - fb).abs() <= 1e-9 * fa);
    let ra = levenberg_marquardt(&sa, &x0, &tight()).unwrap();
    let rb = levenberg_marquardt(&sb, &x0, &tight()).unwrap();
    assert!((ra.final_cost - rb.final_cost).abs() <= 1e-9 * ra.final_cost);
    assert_stationary(&sa, &rb.x);
    assert_stationary(&sb, &ra.x);
}

#[test]
fn lm_is_invariant_to_information_scaling() {
    let (p, a) = replication(4, 10.0);
    let x0 = p.flatten();
    let s1 = ResidualSystem::new(p.clone(), a.clone(), ContinuityWeights::default()).unwrap();
    let s10 = ResidualSystem::new(p, a.with_scaled_information(10.0), ContinuityWeights::default()).unwrap();
    let r1 = levenberg_marquardt(&s1, &x0, &tight()).unwrap();
    let r10 = levenberg_marquardt(&s10, &x0, &tight()).unwrap();
    assert!(r1.is_monotone() && r10.is_monotone());
    assert!((r10.final_cost / r1.final_cost - 10.0).abs() < 1e-9);
    assert_stationary(&s1, &r10.x);
    assert_stationary(&s10, &r1.x);
}

#[test]
fn lm_on_reference_problem_is_monotone_and_converges() {
    let (p, a) = replication(1, 10.0);
    let system = ResidualSystem::new(p.clone(), a, ContinuityWeights::default()).unwrap();
    let report = levenberg_marquardt(&system, &p.flatten(), &LmConfig::default()).unwrap();
    assert!(report.is_monotone());
    assert_eq!(report.termination, Termination::RelativeStep);
    let drops = report.accepted_decreases();
    let first = drops[0];
    assert!(drops[1..].iter().all(|d| *d < first));
    assert!(report.final_cost < 1e-4 * report.initial_cost);
}

#[test]
fn zero_iterations_returns_start() {
    let (p, a) = replication(1, 10.0);
    let system = ResidualSystem::new(p.clone(), a, ContinuityWeights::default()).unwrap();
    let config = LmConfig {
        max_iterations: 0,
        ..LmConfig::default()
    };
    let report = levenberg_marquardt(&system, &p.flatten(), &config).unwrap();
    assert_eq!(report.x, p.flatten());
    assert!(report.history.is_empty());
    assert_eq!(report.termination, Termination::MaxIterations);
}

#[test]
fn unknown_assignment_is_rejected_up_front() {
    let bad = AssignmentSet::new(vec![fix(42, 0.0, 0.0)]);
    assert!(matches!(
        ResidualSystem::new(straight_10(), bad, ContinuityWeights::default()),
        Err(Error::Assignment(_))
    ));
}

#[test]
fn info_matrix_must_be_positive_definite() {
    assert!(InfoMatrix::<f64>::new(1.0, 2.0, 1.0).is_err());
    assert!(InfoMatrix::<f64>::new(-1.0, 0.0, 1.0).is_err());
    assert!(InfoMatrix::<f64>::isotropic(0.0).is_err());
    let m = InfoMatrix::<f64>::new(2.0, 0.5, 1.0).unwrap();
    let e = Point2::new(0.3, -1.2);
    let w = m.whiten(e);
    assert!((w[0] * w[0] + w[1] * w[1] - m.quadratic_form(e)).abs() < 1e-12);
}

#[test]
fn single_circle_fit_recovers_radius() {
    // a lone circular arc cannot be parameterized on its own; use st-ta-ca-ta-st
    let elements = vec![
        TrackElement::straight(1, 200.0).unwrap(),
        TrackElement::transitional_arc(2, 80.0, 0.0, 1.0 / 400.0).unwrap(),
        TrackElement::circular_arc(3, 150.0, 400.0).unwrap(),
        TrackElement::transitional_arc(4, 80.0, 1.0 / 400.0, 0.0).unwrap(),
        TrackElement::straight(5, 200.0).unwrap(),
    ];
    let map = trackmap::trackmap::CompactTrackMap::new(Pose::default(), elements).unwrap();
    let truth = OptParamSet::from_compact(&map).unwrap();
    let fixes = AssignmentSet::new(
        map.stations(2.0)
            .unwrap()
            .into_iter()
            .map(|st| Measurement {
                track_id: st.id.unwrap(),
                z: st.pose.position(),
                omega: InfoMatrix::isotropic(1.0).unwrap(),
            })
            .collect(),
    );
    let mut x0: Vec<f64> = truth.flatten();
    x0[5] = 430.0; // radius
    x0[6] = 140.0; // circle length
    let system = ResidualSystem::new(truth.clone(), fixes, ContinuityWeights::default()).unwrap();
    let report = levenberg_marquardt(&system, &x0, &LmConfig::default()).unwrap();
    assert!((report.x[5] - 400.0).abs() < 1e-3, "radius {}", report.x[5]);
    assert!((report.x[6] - 150.0).abs() < 1e-3, "length {}", report.x[6]);
}

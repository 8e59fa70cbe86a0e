// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trackmap::estimation::{AssignmentSet, InfoMatrix, Measurement};
use trackmap::evaluation::{evaluate, Candidate};
use trackmap::geometry::{Point2, Pose, Shape};
use trackmap::pipeline::{optimize_map, place_track_ends, EndRule, OptimizeOptions};
use trackmap::simulation::{simulate_dataset, SimConfig};
use trackmap::trackmap::{InitialElementSet, InitialEntry, OptParamSet, ParamBlock};
use trackmap::Error;

fn straight_set(length: f64) -> InitialElementSet<f64> {
    InitialElementSet::new(vec![InitialEntry {
        id: 1,
        shape: Shape::Straight.into(),
        length,
        radius: None,
        start: Some(Pose::new(0.0, 0.0, 0.0)),
    }])
    .unwrap()
}

fn fixes(points: &[(f64, f64)]) -> AssignmentSet<f64> {
    let omega = InfoMatrix::isotropic(1.0).unwrap();
    AssignmentSet::new(
        points
            .iter()
            .map(|&(x, y)| Measurement {
                track_id: 1,
                z: Point2::new(x, y),
                omega,
            })
            .collect(),
    )
}

fn straight_ends(params: &OptParamSet<f64>) -> (Point2<f64>, Point2<f64>) {
    match params.blocks()[0] {
        ParamBlock::Straight { start, end } => (start, end),
        ref other => panic!("expected a straight, got {other:?}"),
    }
}

fn options(ends: EndRule) -> OptimizeOptions<f64> {
    OptimizeOptions {
        ends,
        ..OptimizeOptions::default()
    }
}

/// Fixes every 10 m from x = 5 to x = 95, scattered about y = 0 so that
/// the least-squares line is the axis itself.
fn even_fixes() -> Vec<(f64, f64)> {
    const Y: [f64; 10] = [1.0, 0.0, 0.0, 0.0, -1.0, -1.0, 0.0, 0.0, 0.0, 1.0];
    (0..10).map(|i| (5.0 + 10.0 * i as f64, Y[i])).collect()
}

#[test]
fn single_straight_fits_its_fixes() {
    let run = optimize_map(
        &straight_set(50.0),
        &fixes(&even_fixes()),
        &options(EndRule::OutermostFix),
    )
    .unwrap();
    let (start, end) = straight_ends(&run.final_params);
    // default solver tolerance
    let tol = 1e-4;
    assert!((start.xi - 5.0).abs() < tol && start.eta.abs() < tol, "{start:?}");
    assert!((end.xi - 95.0).abs() < tol && end.eta.abs() < tol, "{end:?}");
    let map = run.emit(&Default::default()).unwrap();
    assert_eq!(map.len(), 1);
    assert!((map.total_length() - 90.0).abs() < tol);
}

#[test]
fn end_rules_differ_only_at_the_outer_ends() {
    let mut pts = even_fixes();
    // last fix far past the steady spacing
    pts.push((130.0, 0.0));
    let set = straight_set(50.0);
    let a = fixes(&pts);
    let solver = optimize_map(&set, &a, &options(EndRule::Solver)).unwrap();
    let outer = optimize_map(&set, &a, &options(EndRule::OutermostFix)).unwrap();
    let steady = optimize_map(&set, &a, &options(EndRule::SteadyRate)).unwrap();

    // the line itself is identical
    assert_eq!(solver.report.x, outer.report.x);
    assert_eq!(solver.report.x, steady.report.x);
    assert_eq!(
        solver.final_params,
        solver.initial_params.with_vector(&solver.report.x).unwrap()
    );

    let (os, oe) = straight_ends(&outer.final_params);
    assert!((os.xi - 5.0).abs() < 1e-4 && (oe.xi - 130.0).abs() < 1e-4);
    let (ss, se) = straight_ends(&steady.final_params);
    // a linear fit of sorted stations against rank pulls the lone outlier in
    assert!(se.xi < 130.0 && se.xi > 95.0, "{se:?}");
    assert!(ss.xi < 5.0 + 1e-4, "{ss:?}");
}

#[test]
fn steady_rate_keeps_evenly_spaced_ends() {
    let set = straight_set(50.0);
    let run = optimize_map(&set, &fixes(&even_fixes()), &options(EndRule::SteadyRate)).unwrap();
    let (start, end) = straight_ends(&run.final_params);
    assert!((start.xi - 5.0).abs() < 1e-4 && (end.xi - 95.0).abs() < 1e-4);
}

#[test]
fn end_placement_ignores_input_order() {
    let mut pts = even_fixes();
    pts.push((130.0, 0.0));
    let run = optimize_map(&straight_set(50.0), &fixes(&pts), &options(EndRule::Solver)).unwrap();
    let mut shuffled = pts.clone();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(1));
    for rule in [EndRule::OutermostFix, EndRule::SteadyRate] {
        let a = place_track_ends(&run.final_params, &fixes(&pts), rule).unwrap();
        let b = place_track_ends(&run.final_params, &fixes(&shuffled), rule).unwrap();
        let (da, db) = (straight_ends(&a), straight_ends(&b));
        assert!(da.0.distance(db.0) < 1e-9 && da.1.distance(db.1) < 1e-9, "{rule:?}");
    }
}

#[test]
fn shuffled_fixes_give_the_same_map() {
    let ds = simulate_dataset::<f64>(&SimConfig {
        seed: 2,
        paper_replication: true,
        ..SimConfig::default()
    })
    .unwrap();
    let mut shuffled = ds.measurements().measurements().to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(5));
    let options = OptimizeOptions::default();
    let a = optimize_map(&ds.initial, ds.measurements(), &options).unwrap();
    let b = optimize_map(&ds.initial, &AssignmentSet::new(shuffled), &options).unwrap();
    assert!((a.report.final_cost - b.report.final_cost).abs() <= 1e-9 * a.report.final_cost);
    let map_a = a.emit(&options.threshold).unwrap();
    let map_b = b.emit(&options.threshold).unwrap();
    let reference = map_a.polyline(1.0).unwrap();
    let report = evaluate(Candidate::Map(&map_b), &reference, 1.0).unwrap();
    assert!(report.max_abs_error < 0.05, "{}", report.max_abs_error);
    assert!((map_a.total_length() - map_b.total_length()).abs() < 0.05);
}

#[test]
fn optimized_map_beats_the_naive_one() {
    let ds = simulate_dataset::<f64>(&SimConfig {
        seed: 7,
        paper_replication: true,
        ..SimConfig::default()
    })
    .unwrap();
    let options = OptimizeOptions::default();
    let run = optimize_map(&ds.initial, ds.measurements(), &options).unwrap();
    assert!(run.report.final_cost < run.report.initial_cost);
    let map = run.emit(&options.threshold).unwrap();
    let optimized = evaluate(Candidate::Map(&map), &ds.truth_polyline, 1.0).unwrap();
    let naive = evaluate(Candidate::Map(&run.naive), &ds.truth_polyline, 1.0).unwrap();
    assert!(optimized.mean_abs_error < naive.mean_abs_error);
    assert!(optimized.mean_abs_error < 2.0, "{}", optimized.mean_abs_error);
}

#[test]
fn fixes_on_missing_elements_are_rejected() {
    let mut a = fixes(&even_fixes()).measurements().to_vec();
    a[3].track_id = 7;
    let err = optimize_map(&straight_set(50.0), &AssignmentSet::new(a), &OptimizeOptions::default()).unwrap_err();
    assert!(matches!(err, Error::Assignment(_)), "{err:?}");
}

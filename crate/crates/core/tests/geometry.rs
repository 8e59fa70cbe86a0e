// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use proptest::prelude::*;
use trackmap::geometry::{
    element_pose, end_pose, foot_point, polyline_length, sample_element, Point2, Pose, Shape, TrackElement,
};
use trackmap::Error;

use common::{grid_foot_point, oracle_heading, oracle_position};

fn radius() -> impl Strategy<Value = f64> {
    (150.0f64..5000.0, any::<bool>()).prop_map(|(r, neg)| if neg { -r } else { r })
}

fn start_pose() -> impl Strategy<Value = Pose<f64>> {
    (-1e4f64..1e4, -1e4f64..1e4, -3.1f64..3.1).prop_map(|(x, y, p)| Pose::new(x, y, p))
}

fn element() -> impl Strategy<Value = TrackElement<f64>> {
    (0u8..3, 1.0f64..300.0, radius(), any::<bool>()).prop_map(|(kind, length, r, entering)| match kind {
        0 => TrackElement::straight(1, length).unwrap(),
        1 => TrackElement::circular_arc(1, length, r).unwrap(),
        _ if entering => TrackElement::transitional_arc(1, length, 0.0, 1.0 / r).unwrap(),
        _ => TrackElement::transitional_arc(1, length, 1.0 / r, 0.0).unwrap(),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn endpoint_matches_quadrature(e in element(), start in start_pose()) {
        let end = end_pose(&e, &start);
        let oracle = oracle_position(&start, e.kappa_start(), e.kappa_end(), e.length(), e.length(), 1e-10);
        prop_assert!(end.position().distance(oracle) < 1e-6, "{:?} vs {:?}", end, oracle);
        let heading = oracle_heading(&start, e.kappa_start(), e.kappa_end(), e.length(), e.length());
        prop_assert!(trackmap::scalar::wrap_angle(end.phi - heading).abs() < 1e-9);
    }

    #[test]
    fn clothoid_with_equal_curvatures_reduces_to_circle(length in 1.0f64..300.0, r in radius(), start in start_pose()) {
        let k = 1.0 / r;
        let arc = TrackElement::circular_arc(1, length, r).unwrap();
        let via_clothoid = trackmap::geometry::clothoid::integrate(&start, k, 0.0, length);
        prop_assert!(end_pose(&arc, &start).position().distance(via_clothoid.position()) < 1e-8);
        let straight = TrackElement::straight(1, length).unwrap();
        let flat = trackmap::geometry::clothoid::integrate(&start, 0.0, 0.0, length);
        prop_assert!(end_pose(&straight, &start).position().distance(flat.position()) < 1e-8);
    }

    #[test]
    fn dense_samples_have_element_length(e in element(), start in start_pose()) {
        let pts: Vec<Point2<f64>> = sample_element(&e, &start, 0.5).unwrap().into_iter().map(|(_, p)| p.position()).collect();
        // chord deficit of a 0.5 m polyline is far below 1e-3 at these radii
        prop_assert!((polyline_length(&pts) - e.length()).abs() < 1e-3 * e.length().max(1.0));
    }

    #[test]
    fn interior_foot_point_is_perpendicular(e in element(), start in start_pose(), t in 0.05f64..0.95, off in -60.0f64..60.0) {
        let p = element_pose(&e, &start, t * e.length()).unwrap();
        let normal = Point2::new(p.tangent().eta, -p.tangent().xi);
        let z = p.position() + normal * off;
        let f = foot_point(&e, &start, z);
        if !f.on_boundary {
            let tangent = element_pose(&e, &start, f.s).unwrap().tangent();
            let d = z - f.point;
            prop_assert!(d.dot(tangent).abs() < 1e-6 * d.norm().max(1.0), "residual not perpendicular");
        }
        prop_assert!(f.s >= 0.0 && f.s <= e.length());
        prop_assert!(element_pose(&e, &start, f.s).unwrap().position().distance(f.point) < 1e-9);
    }

    #[test]
    fn foot_point_is_minimal(e in element(), start in start_pose(), dx in -300.0f64..300.0, dy in -300.0f64..300.0) {
        let z = start.position() + Point2::new(dx, dy);
        let f = foot_point(&e, &start, z);
        let (_, _, grid) = grid_foot_point(&e, &start, z, 0.05);
        // the grid can only be farther, by at most half a step squared over 2d
        prop_assert!(f.point.distance(z) <= grid + 1e-9);
        prop_assert!(grid - f.point.distance(z) < 2e-3);
    }
}

#[test]
fn reference_clothoid_endpoint() {
    // first transition of the reference track
    let start = Pose::from_degrees(984.808, 173.648, 10.0);
    let e = TrackElement::transitional_arc(2, 250.0, 0.0, -1.0 / 887.0).unwrap();
    let oracle = oracle_position(&start, 0.0, -1.0 / 887.0, 250.0, 250.0, 1e-11);
    assert!(end_pose(&e, &start).position().distance(oracle) < 1e-7);
    // heading change of a clothoid is L / 2R
    let turn = end_pose(&e, &start).phi - start.phi;
    assert!((turn - 250.0 / (2.0 * 887.0)).abs() < 1e-12);
}

#[test]
fn degenerate_transition_is_rejected() {
    assert!(matches!(
        TrackElement::<f64>::transitional_arc(1, 10.0, 0.0, 0.0),
        Err(Error::DegenerateShape(_))
    ));
    assert!(TrackElement::<f64>::transitional_arc(1, 10.0, 0.01, 0.02).is_err());
    assert!(TrackElement::<f64>::circular_arc(1, 10.0, 0.0).is_err());
    assert!(TrackElement::<f64>::straight(1, -1.0).is_err());
    assert!(TrackElement::<f64>::straight(1, f64::NAN).is_err());
}

#[test]
fn station_outside_element_is_rejected() {
    let e = TrackElement::straight(1, 10.0).unwrap();
    assert!(element_pose(&e, &Pose::default(), 10.5).is_err());
    assert!(element_pose(&e, &Pose::default(), -0.1).is_err());
}

#[test]
fn positive_radius_turns_right() {
    let e = TrackElement::circular_arc(1, 100.0, 500.0).unwrap();
    let end = end_pose(&e, &Pose::default());
    assert!(end.eta < 0.0 && end.phi < 0.0);
    assert_eq!(e.shape(), Shape::CircularArc);
}

#[test]
fn f32_matches_f64() {
    let e64 = TrackElement::transitional_arc(1, 200.0, 0.0, 1.0 / 300.0).unwrap();
    let e32 = TrackElement::<f32>::transitional_arc(1, 200.0, 0.0, 1.0 / 300.0).unwrap();
    let a = end_pose(&e64, &Pose::default());
    let b = end_pose(&e32, &Pose::default());
    assert!((a.xi - b.xi as f64).abs() < 1e-3 && (a.eta - b.eta as f64).abs() < 1e-3);
}

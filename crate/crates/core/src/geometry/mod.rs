// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Track primitives: straights, transitional arcs (clothoids) and circular arcs.
//!
//! Headings are measured counterclockwise from the ξ-axis. Curvature follows
//! the radius sign of the track tables: a positive radius turns right, so the
//! heading evolves as `dφ/ds = -κ(s)`.

pub mod clothoid;
mod projection;

use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Real};

pub use projection::{foot_point, ElementProjector, FootPoint, FootPointConfig};

/// A planar point in the (ξ, η) frame, meters.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2<T> {
    pub xi: T,
    pub eta: T,
}

impl<T: Real> Point2<T> {
    pub fn new(xi: T, eta: T) -> Self {
        Point2 { xi, eta }
    }

    pub fn dot(self, other: Self) -> T {
        self.xi * other.xi + self.eta * other.eta
    }

    pub fn norm(self) -> T {
        self.xi.hypot(self.eta)
    }

    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    /// Unit vector pointing along `heading`.
    pub fn from_heading(heading: T) -> Self {
        let (s, c) = heading.sin_cos();
        Point2 { xi: c, eta: s }
    }
}

impl<T: Real> Add for Point2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Point2::new(self.xi + rhs.xi, self.eta + rhs.eta)
    }
}

impl<T: Real> Sub for Point2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Point2::new(self.xi - rhs.xi, self.eta - rhs.eta)
    }
}

impl<T: Real> Mul<T> for Point2<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        Point2::new(self.xi * rhs, self.eta * rhs)
    }
}

/// Position and heading. The heading is kept in `(-pi, pi]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Pose<T> {
    pub xi: T,
    pub eta: T,
    pub phi: T,
}

impl<T: Real> Pose<T> {
    pub fn new(xi: T, eta: T, phi: T) -> Self {
        Pose {
            xi,
            eta,
            phi: wrap_angle(phi),
        }
    }

    pub fn from_degrees(xi: T, eta: T, phi_deg: T) -> Self {
        Pose::new(xi, eta, phi_deg.to_radians())
    }

    pub fn position(&self) -> Point2<T> {
        Point2::new(self.xi, self.eta)
    }

    pub fn tangent(&self) -> Point2<T> {
        Point2::from_heading(self.phi)
    }
}

/// The three track primitives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Straight,
    TransitionalArc,
    CircularArc,
}

impl Shape {
    /// Short tag used in map tables and files.
    pub fn tag(self) -> &'static str {
        match self {
            Shape::Straight => "st",
            Shape::TransitionalArc => "ta",
            Shape::CircularArc => "ca",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Shape> {
        match tag {
            "st" => Some(Shape::Straight),
            "ta" => Some(Shape::TransitionalArc),
            "ca" => Some(Shape::CircularArc),
            _ => None,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One geometric primitive with its intrinsic parameters.
///
/// Curvatures are signed like the radius: `κ = 1/r`, positive to the right.
/// Only the constructors can build a value, so every element satisfies the
/// shape invariants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackElement<T> {
    id: u32,
    shape: Shape,
    length: T,
    kappa_start: T,
    kappa_end: T,
}

fn check_length<T: Real>(length: T) -> Result<()> {
    if length.is_finite() && length > T::zero() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "element length must be positive and finite, got {length}"
        )))
    }
}

fn check_radius<T: Real>(radius: T) -> Result<()> {
    if radius.is_finite() && radius != T::zero() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "radius must be finite and nonzero, got {radius}"
        )))
    }
}

impl<T: Real> TrackElement<T> {
    pub fn straight(id: u32, length: T) -> Result<Self> {
        check_length(length)?;
        Ok(TrackElement {
            id,
            shape: Shape::Straight,
            length,
            kappa_start: T::zero(),
            kappa_end: T::zero(),
        })
    }

    pub fn circular_arc(id: u32, length: T, radius: T) -> Result<Self> {
        check_length(length)?;
        check_radius(radius)?;
        let kappa = radius.recip();
        Ok(TrackElement {
            id,
            shape: Shape::CircularArc,
            length,
            kappa_start: kappa,
            kappa_end: kappa,
        })
    }

    /// A clothoid whose curvature runs linearly from `kappa_start` to
    /// `kappa_end`. Exactly one end must be zero.
    pub fn transitional_arc(id: u32, length: T, kappa_start: T, kappa_end: T) -> Result<Self> {
        check_length(length)?;
        if kappa_start == kappa_end {
            return Err(Error::DegenerateShape(kappa_start.to_f64_lossy()));
        }
        if !(kappa_start.is_finite() && kappa_end.is_finite()) {
            return Err(Error::Domain("transitional arc curvature must be finite".into()));
        }
        if kappa_start != T::zero() && kappa_end != T::zero() {
            return Err(Error::Domain(format!(
                "transitional arc must start or end with zero curvature, got {kappa_start} and {kappa_end}"
            )));
        }
        Ok(TrackElement {
            id,
            shape: Shape::TransitionalArc,
            length,
            kappa_start,
            kappa_end,
        })
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn kappa_start(&self) -> T {
        self.kappa_start
    }

    pub fn kappa_end(&self) -> T {
        self.kappa_end
    }

    /// Signed radius: the circle's radius for circular arcs, the radius at the
    /// curved end for transitional arcs, `None` for straights.
    pub fn radius(&self) -> Option<T> {
        match self.shape {
            Shape::Straight => None,
            Shape::CircularArc => Some(self.kappa_start.recip()),
            Shape::TransitionalArc => {
                let k = if self.kappa_start != T::zero() {
                    self.kappa_start
                } else {
                    self.kappa_end
                };
                Some(k.recip())
            }
        }
    }

    /// Rate of curvature change along the element.
    pub fn curvature_rate(&self) -> T {
        (self.kappa_end - self.kappa_start) / self.length
    }

    pub fn curvature_at(&self, s: T) -> T {
        self.kappa_start + self.curvature_rate() * s
    }

    fn check_station(&self, s: T) -> Result<()> {
        if s.is_nan() || s < T::zero() || s > self.length {
            Err(Error::Domain(format!(
                "arc length {s} outside [0, {}] of element {}",
                self.length, self.id
            )))
        } else {
            Ok(())
        }
    }

    /// Heading at arc length `s` (no range check).
    pub(crate) fn heading_at(&self, start: &Pose<T>, s: T) -> T {
        let half = T::lit(0.5);
        start.phi - (self.kappa_start * s + half * self.curvature_rate() * s * s)
    }

    /// Pose at `s` without the range check; `s` may be any finite value.
    pub(crate) fn pose_unchecked(&self, start: &Pose<T>, s: T) -> Pose<T> {
        match self.shape {
            Shape::Straight => {
                let t = start.tangent();
                Pose::new(start.xi + t.xi * s, start.eta + t.eta * s, start.phi)
            }
            Shape::CircularArc => circular_pose(start, self.kappa_start, s),
            Shape::TransitionalArc => clothoid::integrate(start, self.kappa_start, self.curvature_rate(), s),
        }
    }

    /// Pose at `s` given the pose at `from` on the same element.
    pub(crate) fn advance(&self, start: &Pose<T>, from: &Pose<T>, s_from: T, s_to: T) -> Pose<T> {
        match self.shape {
            Shape::TransitionalArc => {
                let mut p = clothoid::advance(from, self.curvature_at(s_from), self.curvature_rate(), s_to - s_from);
                p.phi = wrap_angle(self.heading_at(start, s_to));
                p
            }
            _ => self.pose_unchecked(start, s_to),
        }
    }
}

/// Closed-form pose on a circle of curvature `kappa` (chord form, stable for small `kappa * s`).
fn circular_pose<T: Real>(start: &Pose<T>, kappa: T, s: T) -> Pose<T> {
    let half = T::lit(0.5);
    let half_turn = half * kappa * s;
    let chord = if half_turn.abs() < T::lit(1e-4) {
        // sin(x)/x series
        let x2 = half_turn * half_turn;
        s * (T::one() - x2 / T::lit(6.0) + x2 * x2 / T::lit(120.0))
    } else {
        half_turn.sin() / half_turn * s
    };
    let mid = start.phi - half_turn;
    let (sm, cm) = mid.sin_cos();
    Pose::new(start.xi + chord * cm, start.eta + chord * sm, start.phi - kappa * s)
}

/// Pose at arc length `s` along `element` placed at `start`.
pub fn element_pose<T: Real>(element: &TrackElement<T>, start: &Pose<T>, s: T) -> Result<Pose<T>> {
    element.check_station(s)?;
    Ok(element.pose_unchecked(start, s))
}

/// Poses at `0, spacing, 2 spacing, …` along the element, always ending at `s = L`.
pub fn sample_element<T: Real>(element: &TrackElement<T>, start: &Pose<T>, spacing: T) -> Result<Vec<(T, Pose<T>)>> {
    if !(spacing.is_finite() && spacing > T::zero()) {
        return Err(Error::Domain(format!("sample spacing must be positive, got {spacing}")));
    }
    let length = element.length();
    // stations closer than this to the end collapse onto the endpoint
    let merge = length * T::lit(1e-9);
    let count = (length / spacing).floor().to_usize().unwrap_or(0);
    let mut out = Vec::with_capacity(count + 2);
    let mut prev = (T::zero(), *start);
    out.push(prev);
    for k in 1..=count {
        let s = spacing * T::from_usize(k).unwrap();
        if s >= length - merge {
            break;
        }
        let pose = element.advance(start, &prev.1, prev.0, s);
        prev = (s, pose);
        out.push(prev);
    }
    if length > merge {
        out.push((length, element.advance(start, &prev.1, prev.0, length)));
    }
    Ok(out)
}

/// Pose at the end of the element.
pub fn end_pose<T: Real>(element: &TrackElement<T>, start: &Pose<T>) -> Pose<T> {
    element.pose_unchecked(start, element.length())
}

/// Total length of a polyline.
pub fn polyline_length<T: Real>(points: &[Point2<T>]) -> T {
    points.windows(2).fold(T::zero(), |acc, w| acc + w[0].distance(w[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn straight_pose_matches_trigonometry() {
        let st = TrackElement::<f64>::straight(1, 1000.0).unwrap();
        let start = Pose::from_degrees(0.0, 0.0, 10.0);
        let p = element_pose(&st, &start, 1000.0).unwrap();
        assert!(close(p.xi, 984.807753, 1e-5));
        assert!(close(p.eta, 173.648178, 1e-5));
    }

    #[test]
    fn quarter_circle_right_turn() {
        let ca = TrackElement::<f64>::circular_arc(1, 50.0 * PI, 100.0).unwrap();
        let p = element_pose(&ca, &Pose::new(0.0, 0.0, 0.0), 50.0 * PI).unwrap();
        assert!(close(p.xi, 100.0, 1e-9));
        assert!(close(p.eta, -100.0, 1e-9));
        assert!(close(p.phi, -PI / 2.0, 1e-12));
    }

    #[test]
    fn negative_radius_turns_left() {
        let ca = TrackElement::<f64>::circular_arc(1, 100.0, -900.0).unwrap();
        let p = element_pose(&ca, &Pose::new(0.0, 0.0, 0.0), 100.0).unwrap();
        assert!(p.phi > 0.0 && p.eta > 0.0);
    }

    #[test]
    fn station_out_of_range() {
        let st = TrackElement::<f64>::straight(1, 10.0).unwrap();
        let start = Pose::default();
        assert!(matches!(element_pose(&st, &start, -0.1), Err(Error::Domain(_))));
        assert!(matches!(element_pose(&st, &start, 10.5), Err(Error::Domain(_))));
        assert!(element_pose(&st, &start, 10.0).is_ok());
    }

    #[test]
    fn constructor_rules() {
        assert!(matches!(
            TrackElement::<f64>::transitional_arc(1, 10.0, 0.01, 0.01),
            Err(Error::DegenerateShape(_))
        ));
        assert!(matches!(
            TrackElement::<f64>::transitional_arc(1, 10.0, 0.0, 0.0),
            Err(Error::DegenerateShape(_))
        ));
        assert!(TrackElement::<f64>::transitional_arc(1, 10.0, 0.01, 0.02).is_err());
        assert!(TrackElement::<f64>::circular_arc(1, 10.0, f64::INFINITY).is_err());
        assert!(TrackElement::<f64>::circular_arc(1, 10.0, 0.0).is_err());
        assert!(TrackElement::<f64>::straight(1, 0.0).is_err());
        assert!(TrackElement::<f64>::straight(1, -3.0).is_err());
        let ta = TrackElement::<f64>::transitional_arc(2, 231.0, 0.0, -1.0 / 900.0).unwrap();
        assert!(close(ta.radius().unwrap(), -900.0, 1e-9));
        assert_eq!(TrackElement::<f64>::straight(1, 5.0).unwrap().radius(), None);
    }

    #[test]
    fn sampling_includes_endpoint() {
        let start = Pose::default();
        let s10: Vec<f64> = sample_element(&TrackElement::<f64>::straight(1, 10.0).unwrap(), &start, 5.0)
            .unwrap()
            .iter()
            .map(|(s, _)| *s)
            .collect();
        assert_eq!(s10, vec![0.0, 5.0, 10.0]);
        let s9: Vec<f64> = sample_element(&TrackElement::<f64>::straight(1, 9.0).unwrap(), &start, 5.0)
            .unwrap()
            .iter()
            .map(|(s, _)| *s)
            .collect();
        assert_eq!(s9, vec![0.0, 5.0, 9.0]);
        assert!(sample_element(&TrackElement::<f64>::straight(1, 9.0).unwrap(), &start, 0.0).is_err());
    }

    #[test]
    fn half_arc_sample_heading() {
        let len = 50.0 * PI;
        let ca = TrackElement::<f64>::circular_arc(1, len, 100.0).unwrap();
        let samples = sample_element(&ca, &Pose::default(), len / 2.0).unwrap();
        assert_eq!(samples.len(), 3);
        assert!(close(samples[1].1.phi, -PI / 4.0, 1e-12));
    }

    #[test]
    fn arc_length_consistency() {
        let start = Pose::from_degrees(12.0, -3.0, 33.0);
        let elements = [
            TrackElement::<f64>::transitional_arc(1, 231.0, 0.0, -1.0 / 900.0).unwrap(),
            TrackElement::<f64>::circular_arc(2, 206.0, 300.0).unwrap(),
            TrackElement::<f64>::transitional_arc(3, 108.0, 1.0 / 300.0, 0.0).unwrap(),
        ];
        for el in &elements {
            let pts: Vec<_> = sample_element(el, &start, 0.01)
                .unwrap()
                .iter()
                .map(|(_, p)| p.position())
                .collect();
            let len = polyline_length(&pts);
            assert!((len - el.length()).abs() <= 1e-4 * el.length());
        }
    }

    #[test]
    fn works_in_single_precision() {
        let ca = TrackElement::<f32>::circular_arc(1, 50.0 * std::f32::consts::PI, 100.0).unwrap();
        let p = element_pose(&ca, &Pose::new(0.0, 0.0, 0.0), ca.length()).unwrap();
        assert!((p.xi - 100.0).abs() < 1e-3 && (p.eta + 100.0).abs() < 1e-3);
        let ta = TrackElement::<f32>::transitional_arc(1, 108.0, 0.0, 1.0 / 300.0).unwrap();
        let q = end_pose(&ta, &Pose::default());
        let r = end_pose(
            &TrackElement::<f64>::transitional_arc(1, 108.0, 0.0, 1.0 / 300.0).unwrap(),
            &Pose::default(),
        );
        assert!((q.xi as f64 - r.xi).abs() < 1e-3 && (q.eta as f64 - r.eta).abs() < 1e-3);
    }
}

// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Perpendicular foot points of planar points on track elements.

use super::{Point2, Pose, Shape, TrackElement};
use crate::scalar::Real;

/// Result of dropping a point onto an element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FootPoint<T> {
    /// Arc length of the foot point, `0 <= s <= L`.
    pub s: T,
    pub point: Point2<T>,
    /// The minimizer was clamped to an element endpoint.
    pub on_boundary: bool,
}

/// Tuning for the clothoid projection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FootPointConfig<T> {
    /// Spacing of the coarse scan that brackets local minima.
    pub scan_step: T,
    /// Newton stops once the update is below this many meters.
    pub tolerance: T,
    pub max_newton_iterations: usize,
}

impl<T: Real> Default for FootPointConfig<T> {
    fn default() -> Self {
        FootPointConfig {
            scan_step: T::lit(5.0),
            tolerance: T::lit(1e-6),
            max_newton_iterations: 50,
        }
    }
}

/// A placed element prepared for repeated projections.
///
/// For clothoids the coarse scan poses are computed once and shared by every
/// query.
#[derive(Clone, Debug)]
pub struct ElementProjector<T> {
    element: TrackElement<T>,
    start: Pose<T>,
    config: FootPointConfig<T>,
    nodes: Vec<(T, Pose<T>)>,
}

impl<T: Real> ElementProjector<T> {
    pub fn new(element: TrackElement<T>, start: Pose<T>, config: FootPointConfig<T>) -> Self {
        let nodes = if element.shape() == Shape::TransitionalArc {
            let step = if config.scan_step > T::zero() {
                config.scan_step
            } else {
                T::lit(5.0)
            };
            super::sample_element(&element, &start, step).expect("positive scan step")
        } else {
            Vec::new()
        };
        ElementProjector {
            element,
            start,
            config,
            nodes,
        }
    }

    pub fn element(&self) -> &TrackElement<T> {
        &self.element
    }

    pub fn start(&self) -> &Pose<T> {
        &self.start
    }

    pub fn project(&self, z: Point2<T>) -> FootPoint<T> {
        match self.element.shape() {
            Shape::Straight => self.project_straight(z),
            Shape::CircularArc => self.project_circle(z),
            Shape::TransitionalArc => self.project_clothoid(z),
        }
    }

    fn foot(&self, s: T) -> FootPoint<T> {
        let length = self.element.length();
        FootPoint {
            s,
            point: self.element.pose_unchecked(&self.start, s).position(),
            on_boundary: s <= T::zero() || s >= length,
        }
    }

    fn project_straight(&self, z: Point2<T>) -> FootPoint<T> {
        let length = self.element.length();
        let along = (z - self.start.position()).dot(self.start.tangent());
        self.foot(along.max(T::zero()).min(length))
    }

    fn project_circle(&self, z: Point2<T>) -> FootPoint<T> {
        let kappa = self.element.kappa_start();
        let length = self.element.length();
        let (sin0, cos0) = self.start.phi.sin_cos();
        // center sits to the right for positive curvature
        let center = self.start.position() + Point2::new(sin0, -cos0) * kappa.recip();
        let w = z - center;
        if w.norm() == T::zero() {
            return self.foot(T::zero());
        }
        let sign = kappa.signum();
        let heading_at_z = w.eta.atan2(w.xi) - sign * T::FRAC_PI_2();
        let mut swept = sign * (self.start.phi - heading_at_z);
        let tau = T::TAU();
        swept = swept % tau;
        if swept < T::zero() {
            swept = swept + tau;
        }
        let s = swept / kappa.abs();
        if s <= length {
            return self.foot(s);
        }
        let first = self.foot(T::zero());
        let last = self.foot(length);
        if z.distance(first.point) <= z.distance(last.point) {
            first
        } else {
            last
        }
    }

    /// Derivative of `|p(s) - z|² / 2` and its second derivative.
    fn distance_slope(&self, s: T, pose: &Pose<T>, z: Point2<T>) -> (T, T) {
        let d = pose.position() - z;
        let tangent = pose.tangent();
        let kappa = self.element.curvature_at(s);
        let (sp, cp) = pose.phi.sin_cos();
        let dtangent = Point2::new(sp, -cp) * kappa;
        (d.dot(tangent), T::one() + d.dot(dtangent))
    }

    fn pose_near(&self, s: T) -> Pose<T> {
        let step = self.nodes[1].0 - self.nodes[0].0;
        let idx = (s / step).floor().to_usize().unwrap_or(0).min(self.nodes.len() - 1);
        let (s0, p0) = self.nodes[idx];
        self.element.advance(&self.start, &p0, s0, s)
    }

    fn refine(&self, lo: T, hi: T, guess: T, z: Point2<T>) -> T {
        let tol = self.config.tolerance;
        let mut s = guess;
        for _ in 0..self.config.max_newton_iterations {
            let pose = self.pose_near(s);
            let (g, h) = self.distance_slope(s, &pose, z);
            if h <= T::zero() {
                break;
            }
            let next = s - g / h;
            if next < lo || next > hi || !next.is_finite() {
                break;
            }
            let delta = (next - s).abs();
            s = next;
            if delta < tol {
                return s;
            }
        }
        self.bisect(lo, hi, z)
    }

    /// Root of the distance slope on `[lo, hi]`, or the better endpoint when
    /// the slope does not change sign.
    fn bisect(&self, mut lo: T, mut hi: T, z: Point2<T>) -> T {
        let slope = |s: T| {
            let pose = self.pose_near(s);
            self.distance_slope(s, &pose, z).0
        };
        let mut g_lo = slope(lo);
        let g_hi = slope(hi);
        if g_lo >= T::zero() || g_hi <= T::zero() {
            let d_lo = self.pose_near(lo).position().distance(z);
            let d_hi = self.pose_near(hi).position().distance(z);
            return if d_lo <= d_hi { lo } else { hi };
        }
        let tol = self.config.tolerance * T::lit(1e-3);
        for _ in 0..200 {
            let mid = T::lit(0.5) * (lo + hi);
            if hi - lo <= tol {
                return mid;
            }
            let g = slope(mid);
            if (g < T::zero()) == (g_lo < T::zero()) {
                lo = mid;
                g_lo = g;
            } else {
                hi = mid;
            }
        }
        T::lit(0.5) * (lo + hi)
    }

    fn project_clothoid(&self, z: Point2<T>) -> FootPoint<T> {
        let length = self.element.length();
        let dist: Vec<T> = self.nodes.iter().map(|(_, p)| p.position().distance(z)).collect();
        let last = self.nodes.len() - 1;
        let mut best = self.foot(T::zero());
        let mut best_d = best.point.distance(z);
        let end = self.foot(length);
        if end.point.distance(z) < best_d {
            best_d = end.point.distance(z);
            best = end;
        }
        for k in 0..=last {
            let left = if k > 0 { dist[k - 1] } else { T::infinity() };
            let right = if k < last { dist[k + 1] } else { T::infinity() };
            if dist[k] > left || dist[k] > right {
                continue;
            }
            let lo = self.nodes[k.saturating_sub(1)].0;
            let hi = self.nodes[(k + 1).min(last)].0;
            let s = self.refine(lo, hi, self.nodes[k].0, z);
            let candidate = self.foot(s);
            let d = candidate.point.distance(z);
            if d < best_d {
                best_d = d;
                best = candidate;
            }
        }
        best
    }
}

/// Foot point of `z` on `element` placed at `start`, using default settings.
pub fn foot_point<T: Real>(element: &TrackElement<T>, start: &Pose<T>, z: Point2<T>) -> FootPoint<T> {
    ElementProjector::new(*element, *start, FootPointConfig::default()).project(z)
}

// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Clothoid evaluation by composite Gauss-Legendre quadrature.
//!
//! The heading along a clothoid is quadratic in arc length,
//! `φ(t) = φ₀ - κ₀ t - c t² / 2`, and the position is the integral of
//! `(cos φ, sin φ)`. Each panel is at most [`MAX_PANEL`] meters long and is
//! integrated with a 20-point rule, which is exact to rounding for the heading
//! changes that occur over a panel of track geometry.

use std::sync::OnceLock;

use super::Pose;
use crate::scalar::Real;

/// Longest quadrature panel, meters.
pub const MAX_PANEL: f64 = 10.0;

const ORDER: usize = 20;

/// Nodes on `[-1, 1]` and weights of the Gauss-Legendre rule.
fn gauss_legendre() -> &'static ([f64; ORDER], [f64; ORDER]) {
    static RULE: OnceLock<([f64; ORDER], [f64; ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER as f64;
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        for i in 0..ORDER {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Legendre recurrence for P_n(x) and its derivative
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=ORDER {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

/// Pose reached after travelling `ds` meters from `from`, where the curvature
/// at `from` is `kappa` and changes at `rate` per meter. `ds` may be negative.
pub fn advance<T: Real>(from: &Pose<T>, kappa: T, rate: T, ds: T) -> Pose<T> {
    if ds == T::zero() {
        return *from;
    }
    let (nodes, weights) = gauss_legendre();
    let half = T::lit(0.5);
    let panels = (ds.abs() / T::lit(MAX_PANEL)).ceil().max(T::one());
    let h = ds / panels;
    let panels = panels.to_usize().unwrap_or(1);
    let heading = |t: T| from.phi - (kappa * t + half * rate * t * t);
    let (mut dx, mut dy) = (T::zero(), T::zero());
    for j in 0..panels {
        let a = h * T::from_usize(j).unwrap();
        let mid = a + half * h;
        let (mut sx, mut sy) = (T::zero(), T::zero());
        for (x, w) in nodes.iter().zip(weights.iter()) {
            let t = mid + half * h * T::lit(*x);
            let (s, c) = heading(t).sin_cos();
            let w = T::lit(*w);
            sx = sx + w * c;
            sy = sy + w * s;
        }
        dx = dx + sx * half * h;
        dy = dy + sy * half * h;
    }
    Pose::new(from.xi + dx, from.eta + dy, heading(ds))
}

/// Pose at arc length `s` on the clothoid starting at `start` with initial
/// curvature `kappa_start` and curvature rate `rate`.
///
/// With `rate = 0` this reduces to a circular arc (or a straight when the
/// curvature is zero as well).
pub fn integrate<T: Real>(start: &Pose<T>, kappa_start: T, rate: T, s: T) -> Pose<T> {
    advance(start, kappa_start, rate, s)
}

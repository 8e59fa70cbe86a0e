// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Independent oracles shared by the integration tests. None of them calls
//! the code path it checks.

#![allow(dead_code)]

use trackmap::estimation::LeastSquaresProblem;
use trackmap::geometry::{sample_element, Point2, Pose, TrackElement};

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 50)
}

/// Heading along an element: `phi(s) = phi0 - (k0 s + (k1 - k0) s² / 2L)`.
pub fn oracle_heading(start: &Pose<f64>, k0: f64, k1: f64, length: f64, s: f64) -> f64 {
    start.phi - (k0 * s + 0.5 * (k1 - k0) / length * s * s)
}

/// Position at `s` by integrating the unit tangent with adaptive Simpson.
pub fn oracle_position(start: &Pose<f64>, k0: f64, k1: f64, length: f64, s: f64, tol: f64) -> Point2<f64> {
    let h = |t: f64| oracle_heading(start, k0, k1, length, t);
    // split so that each piece turns by a bounded angle
    let pieces = ((s.abs() / 5.0).ceil() as usize).max(1);
    let (mut x, mut y) = (start.xi, start.eta);
    for i in 0..pieces {
        let a = s * i as f64 / pieces as f64;
        let b = s * (i + 1) as f64 / pieces as f64;
        x += adaptive_simpson(&|t| h(t).cos(), a, b, tol / pieces as f64);
        y += adaptive_simpson(&|t| h(t).sin(), a, b, tol / pieces as f64);
    }
    Point2::new(x, y)
}

/// Nearest point among samples every `step` meters along the element,
/// returned as `(s, point, distance)`.
pub fn grid_foot_point(
    element: &TrackElement<f64>,
    start: &Pose<f64>,
    z: Point2<f64>,
    step: f64,
) -> (f64, Point2<f64>, f64) {
    sample_element(element, start, step)
        .unwrap()
        .into_iter()
        .map(|(s, p)| (s, p.position(), p.position().distance(z)))
        .fold((0.0, Point2::new(0.0, 0.0), f64::INFINITY), |best, c| {
            if c.2 < best.2 {
                c
            } else {
                best
            }
        })
}

/// Discrete Fréchet distance by exhaustive enumeration of every monotone
/// coupling (no dynamic programming).
pub fn brute_force_frechet(p: &[Point2<f64>], q: &[Point2<f64>]) -> f64 {
    fn walk(p: &[Point2<f64>], q: &[Point2<f64>], i: usize, j: usize, worst: f64, best: &mut f64) {
        let worst = worst.max(p[i].distance(q[j]));
        if i + 1 == p.len() && j + 1 == q.len() {
            *best = best.min(worst);
            return;
        }
        if i + 1 < p.len() {
            walk(p, q, i + 1, j, worst, best);
        }
        if j + 1 < q.len() {
            walk(p, q, i, j + 1, worst, best);
        }
        if i + 1 < p.len() && j + 1 < q.len() {
            walk(p, q, i + 1, j + 1, worst, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(p, q, 0, 0, 0.0, &mut best);
    best
}

/// Central-difference Jacobian, columns of `d r / d x_j`, with
/// `h_j = step · max(1, |x_j|)`.
pub fn central_jacobian<P: LeastSquaresProblem<f64>>(problem: &P, x: &[f64], step: f64) -> Vec<Vec<f64>> {
    (0..x.len())
        .map(|j| {
            let h = step * x[j].abs().max(1.0);
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            let rp = problem.residuals(&xp).unwrap();
            let rm = problem.residuals(&xm).unwrap();
            rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
        })
        .collect()
}

/// Median of a non-empty slice.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

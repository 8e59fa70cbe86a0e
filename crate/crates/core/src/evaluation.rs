// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Map quality metrics: absolute error profile, its CDF, discrete Fréchet
//! distance and storage size in data fields.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, Shape};
use crate::scalar::Real;
use crate::trackmap::CompactTrackMap;

/// Maximum vertex spacing of polylines fed to the metrics.
pub const DENSE_SPACING: f64 = 1.0;

/// Resolution of the error CDF in meters.
pub const CDF_RESOLUTION: f64 = 0.1;

/// A curve under evaluation.
#[derive(Clone, Copy, Debug)]
pub enum Candidate<'a, T> {
    Map(&'a CompactTrackMap<T>),
    Polyline(&'a [Point2<T>]),
}

impl<T: Real> Candidate<'_, T> {
    /// Points every `step` meters of the candidate's own arc length,
    /// including both ends.
    pub fn resample(&self, step: T) -> Result<Vec<(T, Point2<T>)>> {
        match self {
            Candidate::Map(map) => {
                if map.is_empty() {
                    return Err(Error::Input("candidate map has no elements".into()));
                }
                Ok(map
                    .sample_uniform(step)?
                    .into_iter()
                    .map(|(s, p)| (s, p.position()))
                    .collect())
            }
            Candidate::Polyline(points) => resample_polyline(points, step),
        }
    }

    pub fn field_count(&self) -> usize {
        match self {
            Candidate::Map(map) => map_field_count(map),
            Candidate::Polyline(points) => polyline_field_count(points),
        }
    }
}

/// Points every `step` meters along the polyline plus its last vertex.
pub fn resample_polyline<T: Real>(points: &[Point2<T>], step: T) -> Result<Vec<(T, Point2<T>)>> {
    check_step(step)?;
    let Some(&first) = points.first() else {
        return Err(Error::Input("empty polyline".into()));
    };
    let mut cumulative = Vec::with_capacity(points.len());
    let mut acc = T::zero();
    cumulative.push(acc);
    for w in points.windows(2) {
        acc = acc + w[0].distance(w[1]);
        cumulative.push(acc);
    }
    let total = acc;
    if points.len() == 1 || total == T::zero() {
        return Ok(vec![(T::zero(), first)]);
    }
    let merge = total * T::lit(1e-9);
    let mut out = Vec::new();
    let mut seg = 0;
    for k in 0usize.. {
        let mut s = step * T::from_usize(k).unwrap();
        let last = s >= total - merge;
        if last {
            s = total;
        }
        while seg + 2 < points.len() && s > cumulative[seg + 1] {
            seg += 1;
        }
        let len = cumulative[seg + 1] - cumulative[seg];
        let t = if len > T::zero() {
            ((s - cumulative[seg]) / len).max(T::zero()).min(T::one())
        } else {
            T::zero()
        };
        out.push((s, points[seg] + (points[seg + 1] - points[seg]) * t));
        if last {
            break;
        }
    }
    Ok(out)
}

/// Keeps every vertex and subdivides each segment evenly so that no two
/// consecutive points are more than `max_spacing` apart.
pub fn densify<T: Real>(points: &[Point2<T>], max_spacing: T) -> Result<Vec<Point2<T>>> {
    check_step(max_spacing)?;
    let mut out = Vec::with_capacity(points.len());
    if let Some(&first) = points.first() {
        out.push(first);
    }
    for w in points.windows(2) {
        // Slack keeps segments of exactly `max_spacing` (up to rounding) whole.
        let ratio = w[0].distance(w[1]) / max_spacing - T::from_f64(1e-9).unwrap();
        let parts = ratio.ceil().to_usize().unwrap_or(1).max(1);
        let n = T::from_usize(parts).unwrap();
        for i in 1..parts {
            let t = T::from_usize(i).unwrap() / n;
            out.push(w[0] + (w[1] - w[0]) * t);
        }
        out.push(w[1]);
    }
    Ok(out)
}

fn check_step<T: Real>(step: T) -> Result<()> {
    if step.is_finite() && step > T::zero() {
        Ok(())
    } else {
        Err(Error::Domain(format!("step must be positive, got {step}")))
    }
}

fn segment_distance<T: Real>(a: Point2<T>, b: Point2<T>, z: Point2<T>) -> T {
    let d = b - a;
    let len2 = d.dot(d);
    if len2 == T::zero() {
        return a.distance(z);
    }
    let t = ((z - a).dot(d) / len2).max(T::zero()).min(T::one());
    (a + d * t).distance(z)
}

/// Distance from `z` to the nearest point of the polyline.
pub fn distance_to_polyline<T: Real>(points: &[Point2<T>], z: Point2<T>) -> T {
    match points {
        [] => T::infinity(),
        [p] => p.distance(z),
        _ => points
            .windows(2)
            .fold(T::infinity(), |best, w| best.min(segment_distance(w[0], w[1], z))),
    }
}

/// `(s, |ε|)` for the candidate sampled every `step` meters of its own arc
/// length, where `|ε|` is the distance to the nearest point of the
/// reference polyline (densified to 1 m first).
pub fn abs_error_profile<T: Real>(
    candidate: Candidate<'_, T>,
    reference: &[Point2<T>],
    step: T,
) -> Result<Vec<(T, T)>> {
    check_step(step)?;
    if reference.is_empty() {
        return Err(Error::Input("empty reference polyline".into()));
    }
    let reference = densify(reference, T::lit(DENSE_SPACING))?;
    let samples = candidate.resample(step)?;
    Ok(samples
        .par_iter()
        .map(|&(s, p)| (s, distance_to_polyline(&reference, p)))
        .collect())
}

/// Discrete Fréchet distance between the raw vertex sequences.
///
/// Dynamic programming over the coupling lattice with a single rolling row;
/// both inputs must be non-empty.
pub fn discrete_frechet<T: Real>(p: &[Point2<T>], q: &[Point2<T>]) -> Result<T> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::Input("discrete Fréchet needs non-empty polylines".into()));
    }
    let mut row = vec![T::zero(); q.len()];
    for (i, &pi) in p.iter().enumerate() {
        let mut diag = T::zero();
        for (j, &qj) in q.iter().enumerate() {
            let d = pi.distance(qj);
            let up = row[j];
            let value = match (i, j) {
                (0, 0) => d,
                (0, _) => row[j - 1].max(d),
                (_, 0) => up.max(d),
                _ => diag.min(up).min(row[j - 1]).max(d),
            };
            diag = up;
            row[j] = value;
        }
    }
    Ok(row[q.len() - 1])
}

/// Discrete Fréchet distance after densifying both inputs to 1 m spacing.
pub fn frechet_distance<T: Real>(p: &[Point2<T>], q: &[Point2<T>]) -> Result<T> {
    let spacing = T::lit(DENSE_SPACING);
    discrete_frechet(&densify(p, spacing)?, &densify(q, spacing)?)
}

/// Empirical CDF of the errors at levels `0, 0.1, …` up to the first level
/// covering the largest error.
pub fn error_cdf<T: Real>(errors: &[T]) -> Result<Vec<(T, T)>> {
    if errors.is_empty() {
        return Err(Error::Input("empty error profile".into()));
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = T::from_usize(sorted.len()).unwrap();
    let steps_per_meter = T::lit(1.0 / CDF_RESOLUTION);
    let max = sorted[sorted.len() - 1];
    let top = (max * steps_per_meter).ceil().to_usize().unwrap_or(0);
    let mut out = Vec::with_capacity(top + 1);
    let mut count = 0;
    for k in 0..=top {
        let level = T::from_usize(k).unwrap() / steps_per_meter;
        while count < sorted.len() && sorted[count] <= level {
            count += 1;
        }
        out.push((level, T::from_usize(count).unwrap() / n));
    }
    // guard against the top level rounding just below the maximum
    if let Some(last) = out.last_mut() {
        last.1 = T::one();
    }
    Ok(out)
}

/// Value of a step CDF at `level`: the fraction at the largest tabulated
/// level not above it.
pub fn cdf_at<T: Real>(cdf: &[(T, T)], level: T) -> T {
    cdf.iter()
        .take_while(|(l, _)| *l <= level)
        .last()
        .map(|&(_, f)| f)
        .unwrap_or(T::zero())
}

/// Storage size of a compact map: 3 anchor fields plus, per element, a
/// shape tag, a length and a radius. Straights carry no radius.
pub fn map_field_count<T: Real>(map: &CompactTrackMap<T>) -> usize {
    3 + map
        .elements()
        .iter()
        .map(|e| if e.shape() == Shape::Straight { 2 } else { 3 })
        .sum::<usize>()
}

/// Storage size of a data-point map: two coordinates per point.
pub fn polyline_field_count<T>(points: &[Point2<T>]) -> usize {
    2 * points.len()
}

/// Summary metrics of one candidate against a reference.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport<T> {
    pub mean_abs_error: T,
    pub max_abs_error: T,
    pub error_profile: Vec<(T, T)>,
    pub cdf: Vec<(T, T)>,
    pub frechet: T,
    pub field_count: usize,
}

/// Serialized form of [`EvalReport`] without the profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub mean_abs_error_m: f64,
    pub max_abs_error_m: f64,
    pub frechet_m: f64,
    pub field_count: usize,
    pub cdf: Vec<[f64; 2]>,
}

impl<T: Real> EvalReport<T> {
    pub fn summary(&self) -> EvalSummary {
        EvalSummary {
            mean_abs_error_m: self.mean_abs_error.to_f64_lossy(),
            max_abs_error_m: self.max_abs_error.to_f64_lossy(),
            frechet_m: self.frechet.to_f64_lossy(),
            field_count: self.field_count,
            cdf: self
                .cdf
                .iter()
                .map(|&(l, f)| [l.to_f64_lossy(), f.to_f64_lossy()])
                .collect(),
        }
    }
}

/// Error profile with sampling `step`, CDF, Fréchet distance on 1 m
/// resamplings and field count.
pub fn evaluate<T: Real>(candidate: Candidate<'_, T>, reference: &[Point2<T>], step: T) -> Result<EvalReport<T>> {
    let error_profile = abs_error_profile(candidate, reference, step)?;
    let errors: Vec<T> = error_profile.iter().map(|&(_, e)| e).collect();
    let n = T::from_usize(errors.len()).unwrap();
    let mean_abs_error = errors.iter().fold(T::zero(), |a, &e| a + e) / n;
    let max_abs_error = errors.iter().fold(T::zero(), |a, &e| a.max(e));
    let cdf = error_cdf(&errors)?;
    let dense: Vec<Point2<T>> = candidate
        .resample(T::lit(DENSE_SPACING))?
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    let frechet = frechet_distance(&dense, reference)?;
    Ok(EvalReport {
        mean_abs_error,
        max_abs_error,
        error_profile,
        cdf,
        frechet,
        field_count: candidate.field_count(),
    })
}

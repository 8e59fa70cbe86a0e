// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end map generation: initial set and assigned fixes in, compact
//! map out.

use crate::error::Result;
use crate::estimation::{levenberg_marquardt, AssignmentSet, ContinuityWeights, LmConfig, LmReport, ResidualSystem};
use crate::scalar::Real;
use crate::trackmap::{
    build_chain, emit_compact, fill_gaps, naive_concatenation, reparameterize, CompactTrackMap, EmissionThreshold,
    InitialElementSet, OptParamSet, ParamBlock, PlacedTrack,
};

/// Settings for [`optimize_map`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizeOptions<T> {
    pub lm: LmConfig,
    pub continuity: ContinuityWeights<T>,
    pub threshold: EmissionThreshold<T>,
    pub ends: EndRule,
}

impl<T: Real> Default for OptimizeOptions<T> {
    fn default() -> Self {
        OptimizeOptions {
            lm: LmConfig::default(),
            continuity: ContinuityWeights::default(),
            threshold: EmissionThreshold::default(),
            ends: EndRule::default(),
        }
    }
}

/// Everything produced by one optimization run.
#[derive(Clone, Debug)]
pub struct Optimization<T> {
    /// Simple concatenation of the initial elements.
    pub naive: CompactTrackMap<T>,
    pub initial_params: OptParamSet<T>,
    pub final_params: OptParamSet<T>,
    /// Optimized elements before stitching, with their remaining gaps.
    pub placed: PlacedTrack<T>,
    pub report: LmReport<T>,
    pub system: ResidualSystem<T>,
}

impl<T: Real> Optimization<T> {
    /// Stitches the optimized parameters into a continuous compact map.
    pub fn emit(&self, threshold: &EmissionThreshold<T>) -> Result<CompactTrackMap<T>> {
        emit_compact(&self.final_params, threshold)
    }
}

/// Fills the gaps of the initial set, jointly optimizes all element
/// parameters against the fixes and places the result.
pub fn optimize_map<T: Real>(
    initial: &InitialElementSet<T>,
    assignments: &AssignmentSet<T>,
    options: &OptimizeOptions<T>,
) -> Result<Optimization<T>> {
    let filled = fill_gaps(initial)?;
    let naive = naive_concatenation(&filled)?;
    let initial_params = reparameterize(&filled)?;
    let system = ResidualSystem::new(initial_params.clone(), assignments.clone(), options.continuity)?;
    let report = levenberg_marquardt(&system, &initial_params.flatten(), &options.lm)?;
    let final_params = place_track_ends(&initial_params.with_vector(&report.x)?, assignments, options.ends)?;
    let placed = build_chain(&final_params)?;
    Ok(Optimization {
        naive,
        initial_params,
        final_params,
        placed,
        report,
        system,
    })
}

/// How the outer ends of the first and last straights are fixed after the
/// solve. Beyond the outermost foot point an end does not influence the
/// cost, so the solver alone cannot locate it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EndRule {
    /// Keep the solver output.
    Solver,
    /// Move to the outermost fix.
    OutermostFix,
    /// Fit the sorted along-track stations of the element's fixes linearly
    /// against their rank and use the fitted first and last station. Removes
    /// the outward bias of the outermost noisy fix when fixes are evenly
    /// spaced, and does not depend on the order of the input.
    #[default]
    SteadyRate,
}

/// Moves the outer ends of the first and last straights according to `rule`.
pub fn place_track_ends<T: Real>(
    params: &OptParamSet<T>,
    assignments: &AssignmentSet<T>,
    rule: EndRule,
) -> Result<OptParamSet<T>> {
    if rule == EndRule::Solver {
        return Ok(params.clone());
    }
    let placed = build_chain(params)?;
    let mut blocks = params.blocks().to_vec();
    let last = blocks.len() - 1;
    let mut outer = vec![0];
    if last != 0 {
        outer.push(last);
    }
    for idx in outer {
        let ParamBlock::Straight { start, end } = blocks[idx] else {
            continue;
        };
        let id = params.ids()[idx];
        let origin = start;
        let dir = placed.elements[idx].1.tangent();
        // along-track coordinate on the unbounded line, so fixes past an end
        // are not clamped onto it
        let stations: Vec<T> = assignments
            .measurements()
            .iter()
            .filter(|m| m.track_id == id)
            .map(|m| (m.z - origin).dot(dir))
            .collect();
        let Some((lo, hi)) = extent(&stations, rule) else {
            continue;
        };
        let length = (end - start).norm();
        let new_start = if idx == 0 { origin + dir * lo } else { start };
        let new_end = if idx == last { origin + dir * hi } else { end };
        let lo = if idx == 0 { lo } else { T::zero() };
        let hi = if idx == last { hi } else { length };
        if hi > lo {
            blocks[idx] = ParamBlock::Straight {
                start: new_start,
                end: new_end,
            };
        }
    }
    OptParamSet::new(params.ids().to_vec(), blocks)
}

/// Covered station range of one element's fixes.
fn extent<T: Real>(stations: &[T], rule: EndRule) -> Option<(T, T)> {
    let mut stations = stations.to_vec();
    stations.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let (&lo, &hi) = (stations.first()?, stations.last()?);
    if rule == EndRule::OutermostFix || stations.len() < 3 {
        return Some((lo, hi));
    }
    let n = T::from_usize(stations.len()).unwrap();
    let mean_i = (n - T::one()) * T::lit(0.5);
    let mean_s = stations.iter().fold(T::zero(), |a, &s| a + s) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (i, &s) in stations.iter().enumerate() {
        let di = T::from_usize(i).unwrap() - mean_i;
        sxy = sxy + di * (s - mean_s);
        sxx = sxx + di * di;
    }
    let slope = sxy / sxx;
    if !(slope.is_finite() && slope > T::zero()) {
        return Some((lo, hi));
    }
    Some((mean_s - slope * mean_i, mean_s + slope * mean_i))
}

// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use super::{
    fill_gaps, infer_transition, transition_side, CompactTrackMap, InitialElementSet, InitialShape, OptParamSet,
    ParamBlock,
};
use crate::error::{Error, Result};
use crate::geometry::{end_pose, sample_element, Point2, Pose, Shape, TrackElement};
use crate::scalar::{wrap_angle, Real};

/// Mismatch between the end of the chain and the stored start of a straight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapRecord<T> {
    pub straight_id: u32,
    /// Stored straight start minus chain end, meters.
    pub position: Point2<T>,
    /// Straight heading minus chain-end heading, radians.
    pub heading: T,
}

impl<T: Real> GapRecord<T> {
    pub fn distance(&self) -> T {
        self.position.norm()
    }
}

/// Gap list carried by a refused emission.
#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    pub gaps: Vec<GapRecord<f64>>,
    pub position_threshold: f64,
    pub heading_threshold: f64,
}

impl fmt::Display for GapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "continuity gaps above {} m / {} rad:",
            self.position_threshold, self.heading_threshold
        )?;
        for g in &self.gaps {
            let flag = g.distance() > self.position_threshold || g.heading.abs() > self.heading_threshold;
            write!(
                f,
                " [straight {}: {:.4} m, {:.6} rad{}]",
                g.straight_id,
                g.distance(),
                g.heading,
                if flag { ", over" } else { "" }
            )?;
        }
        Ok(())
    }
}

/// Largest gaps accepted by [`emit_compact`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmissionThreshold<T> {
    pub position: T,
    pub heading: T,
}

impl<T: Real> Default for EmissionThreshold<T> {
    fn default() -> Self {
        EmissionThreshold {
            position: T::lit(0.5),
            heading: T::lit(0.01),
        }
    }
}

/// Elements placed in the plane, with the continuity gaps left between arc
/// groups and the straights that follow them.
#[derive(Clone, Debug, PartialEq)]
pub struct PlacedTrack<T> {
    pub elements: Vec<(TrackElement<T>, Pose<T>)>,
    pub gaps: Vec<GapRecord<T>>,
}

impl<T: Real> PlacedTrack<T> {
    pub fn max_gap(&self) -> T {
        self.gaps.iter().fold(T::zero(), |acc, g| acc.max(g.distance()))
    }

    pub fn max_heading_gap(&self) -> T {
        self.gaps.iter().fold(T::zero(), |acc, g| acc.max(g.heading.abs()))
    }

    /// Index of the element with `id`.
    pub fn position_of(&self, id: u32) -> Option<usize> {
        self.elements.iter().position(|(e, _)| e.id() == id)
    }

    /// Dense samples of every element, in order. The polyline jumps at gaps.
    pub fn polyline(&self, spacing: T) -> Result<Vec<Point2<T>>> {
        let mut out = Vec::new();
        for (element, start) in &self.elements {
            out.extend(
                sample_element(element, start, spacing)?
                    .into_iter()
                    .map(|(_, p)| p.position()),
            );
        }
        Ok(out)
    }
}

fn arc_element<T: Real>(params: &OptParamSet<T>, shapes: &[Shape], i: usize) -> Result<TrackElement<T>> {
    let id = params.ids()[i];
    match params.blocks()[i] {
        ParamBlock::Circular { radius, length } => TrackElement::circular_arc(id, length, radius),
        ParamBlock::Transition { length } => {
            let (side, arc) = transition_side(shapes, i)
                .ok_or_else(|| Error::Structure(format!("transitional arc {id} has no circular neighbour")))?;
            let radius = match params.blocks()[arc] {
                ParamBlock::Circular { radius, .. } => radius,
                _ => unreachable!("transition_side returns a circular arc"),
            };
            infer_transition(id, radius, length, side)
        }
        ParamBlock::Straight { .. } => unreachable!("straights are placed from their endpoints"),
    }
}

fn straight_from_block<T: Real>(id: u32, start: Point2<T>, end: Point2<T>) -> Result<(TrackElement<T>, Pose<T>)> {
    let d = end - start;
    let length = d.norm();
    if !(length.is_finite() && length > T::zero()) {
        return Err(Error::DegenerateParameter(format!(
            "straight {id} has coincident or invalid endpoints"
        )));
    }
    let element = TrackElement::straight(id, length)?;
    Ok((element, Pose::new(start.xi, start.eta, d.eta.atan2(d.xi))))
}

/// Places straights by their endpoints and arc groups by forward
/// concatenation from the end of the preceding straight.
pub fn build_chain<T: Real>(params: &OptParamSet<T>) -> Result<PlacedTrack<T>> {
    let shapes = params.shapes();
    let mut elements = Vec::with_capacity(params.len());
    let mut gaps = Vec::new();
    let mut chain_end: Option<Pose<T>> = None;
    for (i, block) in params.blocks().iter().enumerate() {
        let id = params.ids()[i];
        match *block {
            ParamBlock::Straight { start, end } => {
                let (element, pose) = straight_from_block(id, start, end)?;
                if let Some(prev) = chain_end {
                    gaps.push(GapRecord {
                        straight_id: id,
                        position: start - prev.position(),
                        heading: wrap_angle(pose.phi - prev.phi),
                    });
                }
                chain_end = Some(end_pose(&element, &pose));
                elements.push((element, pose));
            }
            _ => {
                let start =
                    chain_end.ok_or_else(|| Error::Structure("arc group without a preceding straight".into()))?;
                let element = arc_element(params, &shapes, i)?;
                chain_end = Some(end_pose(&element, &start));
                elements.push((element, start));
            }
        }
    }
    Ok(PlacedTrack { elements, gaps })
}

/// Stitches the parameter set into an exactly continuous compact map.
///
/// The anchor is the first straight's start. Every later straight starts at
/// the chain end with the chain-end heading; its length is the projection of
/// its stored end onto that heading.
pub fn emit_compact<T: Real>(params: &OptParamSet<T>, threshold: &EmissionThreshold<T>) -> Result<CompactTrackMap<T>> {
    let placed = build_chain(params)?;
    let over = placed
        .gaps
        .iter()
        .any(|g| !(g.distance() <= threshold.position && g.heading.abs() <= threshold.heading));
    if over {
        return Err(Error::EmissionRefused(GapReport {
            gaps: placed
                .gaps
                .iter()
                .map(|g| GapRecord {
                    straight_id: g.straight_id,
                    position: Point2::new(g.position.xi.to_f64_lossy(), g.position.eta.to_f64_lossy()),
                    heading: g.heading.to_f64_lossy(),
                })
                .collect(),
            position_threshold: threshold.position.to_f64_lossy(),
            heading_threshold: threshold.heading.to_f64_lossy(),
        }));
    }

    let (_, anchor) = placed.elements[0];
    let mut chain = anchor;
    let mut elements = Vec::with_capacity(params.len());
    for (i, block) in params.blocks().iter().enumerate() {
        let id = params.ids()[i];
        let element = match *block {
            ParamBlock::Straight { end, .. } => {
                let length = if i == 0 {
                    placed.elements[0].0.length()
                } else {
                    (end - chain.position()).dot(chain.tangent())
                };
                if length.is_nan() || length <= T::zero() {
                    return Err(Error::DegenerateParameter(format!(
                        "straight {id} has non-positive length {length} after stitching"
                    )));
                }
                TrackElement::straight(id, length)?
            }
            _ => placed.elements[i].0,
        };
        chain = end_pose(&element, &chain);
        elements.push(element);
    }
    CompactTrackMap::new(anchor, elements)
}

/// Simple concatenation of the initial elements with their filter lengths,
/// starting at the first straight's reported pose. Errors in early elements
/// propagate to everything after them.
pub fn naive_concatenation<T: Real>(initial: &InitialElementSet<T>) -> Result<CompactTrackMap<T>> {
    let filled = fill_gaps(initial)?;
    let shapes = filled
        .shapes()
        .ok_or_else(|| Error::Structure("unknown entries remain".into()))?;
    let first = filled
        .entries
        .first()
        .ok_or_else(|| Error::Input("empty initial set".into()))?;
    let anchor = first
        .start
        .ok_or_else(|| Error::Input(format!("entry {} has no start pose", first.id)))?;
    let mut elements = Vec::with_capacity(filled.len());
    for (i, e) in filled.entries.iter().enumerate() {
        let element = match e.shape {
            InitialShape::Straight => TrackElement::straight(e.id, e.length)?,
            InitialShape::CircularArc => TrackElement::circular_arc(
                e.id,
                e.length,
                e.radius
                    .ok_or_else(|| Error::Input(format!("circular arc {} has no radius", e.id)))?,
            )?,
            InitialShape::TransitionalArc => {
                let (side, arc) = transition_side(&shapes, i)
                    .ok_or_else(|| Error::Structure(format!("transition {} unsupported", e.id)))?;
                let radius = filled.entries[arc]
                    .radius
                    .ok_or_else(|| Error::Input("circular arc without radius".into()))?;
                infer_transition(e.id, radius, e.length, side)?
            }
            InitialShape::Unknown => unreachable!("gaps are filled"),
        };
        elements.push(element);
    }
    CompactTrackMap::new(anchor, elements)
}

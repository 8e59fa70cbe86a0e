// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Compact geometric track-maps and the initial element sets they are built from.
//!
//! A compact map is an anchor pose followed by an ordered list of primitives.
//! The initial set is what an upstream localization filter reports: straights
//! and circular arcs with rough parameters, and unidentified gaps in between
//! that can only be transitional arcs.

mod chain;
mod params;

use crate::error::{Error, Result};
use crate::geometry::{end_pose, sample_element, Point2, Pose, Shape, TrackElement};
use crate::scalar::Real;

pub use chain::{build_chain, emit_compact, naive_concatenation, EmissionThreshold, GapRecord, GapReport, PlacedTrack};
pub use params::{reparameterize, OptParamSet, ParamBlock};

/// Checks the neighbourhood rules shared by maps and parameter sets: a
/// straight never touches a circular arc, and every transitional arc sits
/// between one straight and one circular arc.
pub(crate) fn check_shape_sequence(shapes: &[Shape]) -> Result<()> {
    for (i, pair) in shapes.windows(2).enumerate() {
        if matches!(
            (pair[0], pair[1]),
            (Shape::Straight, Shape::CircularArc) | (Shape::CircularArc, Shape::Straight)
        ) {
            return Err(Error::Structure(format!(
                "elements {} and {} join a straight directly to a circular arc",
                i + 1,
                i + 2
            )));
        }
    }
    for (i, shape) in shapes.iter().enumerate() {
        if *shape != Shape::TransitionalArc {
            continue;
        }
        let before = i.checked_sub(1).and_then(|j| shapes.get(j)).copied();
        let after = shapes.get(i + 1).copied();
        let ok = matches!(
            (before, after),
            (Some(Shape::Straight), Some(Shape::CircularArc)) | (Some(Shape::CircularArc), Some(Shape::Straight))
        );
        if !ok {
            return Err(Error::Structure(format!(
                "transitional arc at position {} is not between a straight and a circular arc",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Which end of a transitional arc touches the circular arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Curvature ramps from zero up to the circle (straight → circle).
    Entering,
    /// Curvature ramps from the circle down to zero (circle → straight).
    Exiting,
}

/// Builds the transitional arc that connects to a circle of `neighbor_radius`.
pub fn infer_transition<T: Real>(id: u32, neighbor_radius: T, gap_length: T, side: Side) -> Result<TrackElement<T>> {
    if !neighbor_radius.is_finite() || neighbor_radius == T::zero() {
        return Err(Error::Domain(format!(
            "neighbouring radius must be finite and nonzero, got {neighbor_radius}"
        )));
    }
    let kappa = neighbor_radius.recip();
    match side {
        Side::Entering => TrackElement::transitional_arc(id, gap_length, T::zero(), kappa),
        Side::Exiting => TrackElement::transitional_arc(id, gap_length, kappa, T::zero()),
    }
}

/// Transition at index `i` of `shapes`: the side facing the circular arc and its index.
pub(crate) fn transition_side(shapes: &[Shape], i: usize) -> Option<(Side, usize)> {
    if shapes.get(i + 1) == Some(&Shape::CircularArc) {
        Some((Side::Entering, i + 1))
    } else if i > 0 && shapes.get(i - 1) == Some(&Shape::CircularArc) {
        Some((Side::Exiting, i - 1))
    } else {
        None
    }
}

/// Anchor pose plus an ordered, curvature-continuous element sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactTrackMap<T> {
    anchor: Pose<T>,
    elements: Vec<TrackElement<T>>,
}

impl<T: Real> CompactTrackMap<T> {
    /// Validates ids, neighbourhood rules and curvature continuity.
    pub fn new(anchor: Pose<T>, elements: Vec<TrackElement<T>>) -> Result<Self> {
        if !(anchor.xi.is_finite() && anchor.eta.is_finite() && anchor.phi.is_finite()) {
            return Err(Error::Validation("anchor pose must be finite".into()));
        }
        if let Some(first) = elements.first() {
            if first.id() != 1 {
                return Err(Error::Validation(format!(
                    "element ids must start at 1, got {}",
                    first.id()
                )));
            }
        }
        for pair in elements.windows(2) {
            if pair[1].id() <= pair[0].id() {
                return Err(Error::Validation(format!(
                    "element ids must increase strictly, got {} after {}",
                    pair[1].id(),
                    pair[0].id()
                )));
            }
        }
        let shapes: Vec<Shape> = elements.iter().map(|e| e.shape()).collect();
        check_shape_sequence(&shapes)?;
        for pair in elements.windows(2) {
            let (a, b) = (pair[0].kappa_end(), pair[1].kappa_start());
            let scale = a.abs().max(b.abs());
            if (a - b).abs() > scale * T::lit(1e-9) {
                return Err(Error::Validation(format!(
                    "curvature jumps from {a} to {b} between elements {} and {}",
                    pair[0].id(),
                    pair[1].id()
                )));
            }
        }
        Ok(CompactTrackMap { anchor, elements })
    }

    pub fn anchor(&self) -> &Pose<T> {
        &self.anchor
    }

    pub fn elements(&self) -> &[TrackElement<T>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn total_length(&self) -> T {
        self.elements.iter().fold(T::zero(), |acc, e| acc + e.length())
    }

    /// Each element with its start pose, obtained by forward concatenation.
    pub fn placements(&self) -> Vec<(TrackElement<T>, Pose<T>)> {
        let mut pose = self.anchor;
        self.elements
            .iter()
            .map(|e| {
                let start = pose;
                pose = end_pose(e, &start);
                (*e, start)
            })
            .collect()
    }

    pub fn end_pose(&self) -> Pose<T> {
        self.placements()
            .last()
            .map(|(e, p)| end_pose(e, p))
            .unwrap_or(self.anchor)
    }

    /// Samples along the whole map. Element boundaries are always sampled and
    /// inside each element stations are `spacing` apart from the element start.
    pub fn sample(&self, spacing: T) -> Result<Vec<(T, Pose<T>)>> {
        let mut out: Vec<(T, Pose<T>)> = Vec::new();
        let mut offset = T::zero();
        for (element, start) in self.placements() {
            let samples = sample_element(&element, &start, spacing)?;
            let skip = usize::from(!out.is_empty());
            out.extend(samples.into_iter().skip(skip).map(|(s, p)| (offset + s, p)));
            offset = offset + element.length();
        }
        if out.is_empty() {
            out.push((T::zero(), self.anchor));
        }
        Ok(out)
    }

    /// Poses at global stations `0, spacing, 2 spacing, …` plus the map end.
    pub fn sample_uniform(&self, spacing: T) -> Result<Vec<(T, Pose<T>)>> {
        Ok(self.stations(spacing)?.into_iter().map(|st| (st.s, st.pose)).collect())
    }

    /// Like [`sample_uniform`](Self::sample_uniform), with curvature and
    /// element id at every station. A station on an element boundary belongs
    /// to the element that ends there.
    pub fn stations(&self, spacing: T) -> Result<Vec<Station<T>>> {
        if !(spacing.is_finite() && spacing > T::zero()) {
            return Err(Error::Domain(format!("sample spacing must be positive, got {spacing}")));
        }
        let placements = self.placements();
        if placements.is_empty() {
            return Ok(vec![Station {
                s: T::zero(),
                local_s: T::zero(),
                pose: self.anchor,
                kappa: T::zero(),
                id: None,
            }]);
        }
        let total = self.total_length();
        let merge = total * T::lit(1e-9);
        let mut out = Vec::new();
        let mut idx = 0;
        let mut offset = T::zero();
        for k in 0usize.. {
            let mut s = spacing * T::from_usize(k).unwrap();
            let last = s >= total - merge;
            if last {
                s = total;
            }
            while idx + 1 < placements.len() && s > offset + placements[idx].0.length() {
                offset = offset + placements[idx].0.length();
                idx += 1;
            }
            let (element, start) = &placements[idx];
            let local = (s - offset).max(T::zero()).min(element.length());
            out.push(Station {
                s,
                local_s: local,
                pose: element.pose_unchecked(start, local),
                kappa: element.curvature_at(local),
                id: Some(element.id()),
            });
            if last {
                break;
            }
        }
        Ok(out)
    }

    pub fn polyline(&self, spacing: T) -> Result<Vec<Point2<T>>> {
        Ok(self.sample(spacing)?.into_iter().map(|(_, p)| p.position()).collect())
    }
}

/// One sample of [`CompactTrackMap::stations`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Station<T> {
    pub s: T,
    /// Station within the containing element.
    pub local_s: T,
    pub pose: Pose<T>,
    pub kappa: T,
    /// Element containing the station; `None` only for an empty map.
    pub id: Option<u32>,
}

/// Shape of an entry reported by the localization filter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialShape {
    Straight,
    TransitionalArc,
    CircularArc,
    Unknown,
}

impl InitialShape {
    pub fn known(self) -> Option<Shape> {
        match self {
            InitialShape::Straight => Some(Shape::Straight),
            InitialShape::TransitionalArc => Some(Shape::TransitionalArc),
            InitialShape::CircularArc => Some(Shape::CircularArc),
            InitialShape::Unknown => None,
        }
    }
}

impl From<Shape> for InitialShape {
    fn from(shape: Shape) -> Self {
        match shape {
            Shape::Straight => InitialShape::Straight,
            Shape::TransitionalArc => InitialShape::TransitionalArc,
            Shape::CircularArc => InitialShape::CircularArc,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialEntry<T> {
    pub id: u32,
    pub shape: InitialShape,
    pub length: T,
    pub radius: Option<T>,
    pub start: Option<Pose<T>>,
}

/// Ordered filter output, one entry per identified or unidentified element.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialElementSet<T> {
    pub entries: Vec<InitialEntry<T>>,
}

impl<T: Real> InitialElementSet<T> {
    pub fn new(entries: Vec<InitialEntry<T>>) -> Result<Self> {
        for e in &entries {
            if !(e.length.is_finite() && e.length > T::zero()) {
                return Err(Error::Validation(format!(
                    "entry {} has non-positive length {}",
                    e.id, e.length
                )));
            }
            if e.shape == InitialShape::Unknown && e.radius.is_some() {
                return Err(Error::Validation(format!(
                    "unknown entry {} must not carry a radius",
                    e.id
                )));
            }
        }
        Ok(InitialElementSet { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Element shapes, or `None` while unknown entries remain.
    pub fn shapes(&self) -> Option<Vec<Shape>> {
        self.entries.iter().map(|e| e.shape.known()).collect()
    }
}

/// Replaces every unidentified gap by a transitional arc whose curved end
/// takes the radius of the neighbouring circular arc.
pub fn fill_gaps<T: Real>(initial: &InitialElementSet<T>) -> Result<InitialElementSet<T>> {
    let entries = &initial.entries;
    let n = entries.len();
    for i in 0..n {
        if entries[i].shape != InitialShape::Unknown {
            continue;
        }
        if i + 1 < n && entries[i + 1].shape == InitialShape::Unknown {
            return Err(Error::UnsupportedTopology(format!(
                "consecutive unknown entries {} and {}",
                entries[i].id,
                entries[i + 1].id
            )));
        }
        if i == 0 || i + 1 == n {
            return Err(Error::UnsupportedTopology(format!(
                "unknown entry {} at the end of the sequence has only one neighbour",
                entries[i].id
            )));
        }
    }
    let shapes: Vec<Shape> = entries
        .iter()
        .map(|e| e.shape.known().unwrap_or(Shape::TransitionalArc))
        .collect();
    // known neighbours must alternate straight / circular arc around each gap
    for (i, pair) in shapes.windows(2).enumerate() {
        if pair[0] == pair[1] && pair[0] != Shape::TransitionalArc {
            return Err(Error::Structure(format!(
                "entries {} and {} are both {} with no gap between them",
                entries[i].id,
                entries[i + 1].id,
                pair[0]
            )));
        }
    }
    check_shape_sequence(&shapes)?;

    let mut filled = entries.clone();
    for (i, entry) in filled.iter_mut().enumerate() {
        if shapes[i] != Shape::TransitionalArc {
            continue;
        }
        let (_, arc) = transition_side(&shapes, i).expect("checked above");
        let radius = entries[arc]
            .radius
            .ok_or_else(|| Error::Input(format!("circular arc {} has no radius", entries[arc].id)))?;
        entry.shape = InitialShape::TransitionalArc;
        entry.radius = Some(radius);
    }
    Ok(InitialElementSet { entries: filled })
}

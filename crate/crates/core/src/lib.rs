// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Compact geometric track-maps from noisy GNSS fixes.
//!
//! A track is an anchor pose plus a sequence of straights, transitional arcs
//! (clothoids) and circular arcs. Starting from a rough element list, all
//! element parameters are tuned jointly with Levenberg-Marquardt so that the
//! perpendicular distances of the fixes to their elements become minimal.
//!
//! The core is generic over the scalar type; `f64` and `f32` aliases are
//! provided below.

pub mod error;
pub mod estimation;
pub mod evaluation;
pub mod geometry;
pub mod io;
pub mod pipeline;
pub mod scalar;
pub mod simulation;
pub mod trackmap;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Point2f64 = geometry::Point2<f64>;
pub type Pose64 = geometry::Pose<f64>;
pub type TrackElement64 = geometry::TrackElement<f64>;
pub type CompactTrackMap64 = trackmap::CompactTrackMap<f64>;
pub type InitialElementSet64 = trackmap::InitialElementSet<f64>;
pub type OptParamSet64 = trackmap::OptParamSet<f64>;
pub type AssignmentSet64 = estimation::AssignmentSet<f64>;
pub type Measurement64 = estimation::Measurement<f64>;
pub type ResidualSystem64 = estimation::ResidualSystem<f64>;
pub type EvalReport64 = evaluation::EvalReport<f64>;
pub type SimDataset64 = simulation::SimDataset<f64>;

pub type Point2f32 = geometry::Point2<f32>;
pub type Pose32 = geometry::Pose<f32>;
pub type TrackElement32 = geometry::TrackElement<f32>;
pub type CompactTrackMap32 = trackmap::CompactTrackMap<f32>;
pub type InitialElementSet32 = trackmap::InitialElementSet<f32>;
pub type OptParamSet32 = trackmap::OptParamSet<f32>;
pub type AssignmentSet32 = estimation::AssignmentSet<f32>;
pub type Measurement32 = estimation::Measurement<f32>;

// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

use super::{check_shape_sequence, CompactTrackMap, InitialElementSet, InitialShape};
use crate::error::{Error, Result};
use crate::geometry::{end_pose, Point2, Shape};
use crate::scalar::Real;

/// Optimization parameters of one element.
///
/// Straights are anchored in the plane by their endpoints; arcs only carry
/// intrinsic parameters and hang off the preceding straight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamBlock<T> {
    Straight { start: Point2<T>, end: Point2<T> },
    Transition { length: T },
    Circular { radius: T, length: T },
}

impl<T: Real> ParamBlock<T> {
    pub fn shape(&self) -> Shape {
        match self {
            ParamBlock::Straight { .. } => Shape::Straight,
            ParamBlock::Transition { .. } => Shape::TransitionalArc,
            ParamBlock::Circular { .. } => Shape::CircularArc,
        }
    }

    /// Number of scalar parameters in the block.
    pub fn width(&self) -> usize {
        match self {
            ParamBlock::Straight { .. } => 4,
            ParamBlock::Transition { .. } => 1,
            ParamBlock::Circular { .. } => 2,
        }
    }

    fn push_to(&self, out: &mut Vec<T>) {
        match *self {
            ParamBlock::Straight { start, end } => out.extend([start.xi, start.eta, end.xi, end.eta]),
            ParamBlock::Transition { length } => out.push(length),
            ParamBlock::Circular { radius, length } => out.extend([radius, length]),
        }
    }

    fn read(shape: Shape, x: &[T]) -> Self {
        match shape {
            Shape::Straight => ParamBlock::Straight {
                start: Point2::new(x[0], x[1]),
                end: Point2::new(x[2], x[3]),
            },
            Shape::TransitionalArc => ParamBlock::Transition { length: x[0] },
            Shape::CircularArc => ParamBlock::Circular {
                radius: x[0],
                length: x[1],
            },
        }
    }
}

/// Per-element parameter blocks with a fixed flattening order.
#[derive(Clone, Debug, PartialEq)]
pub struct OptParamSet<T> {
    ids: Vec<u32>,
    blocks: Vec<ParamBlock<T>>,
}

impl<T: Real> OptParamSet<T> {
    /// The sequence must start with a straight so the first arc group has
    /// something to hang off.
    pub fn new(ids: Vec<u32>, blocks: Vec<ParamBlock<T>>) -> Result<Self> {
        if ids.len() != blocks.len() {
            return Err(Error::Input(format!(
                "{} ids for {} parameter blocks",
                ids.len(),
                blocks.len()
            )));
        }
        match blocks.first() {
            None => return Err(Error::Input("empty parameter set".into())),
            Some(b) if b.shape() != Shape::Straight => {
                return Err(Error::Structure("parameter set must start with a straight".into()))
            }
            _ => {}
        }
        let shapes: Vec<Shape> = blocks.iter().map(|b| b.shape()).collect();
        check_shape_sequence(&shapes)?;
        Ok(OptParamSet { ids, blocks })
    }

    /// Encodes a compact map exactly: straight endpoints come from forward
    /// concatenation, so the resulting chain has no gaps.
    pub fn from_compact(map: &CompactTrackMap<T>) -> Result<Self> {
        let mut ids = Vec::with_capacity(map.len());
        let mut blocks = Vec::with_capacity(map.len());
        for (element, start) in map.placements() {
            ids.push(element.id());
            blocks.push(match element.shape() {
                Shape::Straight => ParamBlock::Straight {
                    start: start.position(),
                    end: end_pose(&element, &start).position(),
                },
                Shape::TransitionalArc => ParamBlock::Transition {
                    length: element.length(),
                },
                Shape::CircularArc => ParamBlock::Circular {
                    radius: element.radius().expect("circular arc radius"),
                    length: element.length(),
                },
            });
        }
        OptParamSet::new(ids, blocks)
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn blocks(&self) -> &[ParamBlock<T>] {
        &self.blocks
    }

    pub fn shapes(&self) -> Vec<Shape> {
        self.blocks.iter().map(|b| b.shape()).collect()
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Length of the flattened parameter vector.
    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.width()).sum()
    }

    pub fn straight_count(&self) -> usize {
        self.blocks.iter().filter(|b| b.shape() == Shape::Straight).count()
    }

    /// Concatenates the blocks in element order.
    pub fn flatten(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.dimension());
        for b in &self.blocks {
            b.push_to(&mut out);
        }
        out
    }

    /// A parameter set with this layout and the values in `x`.
    pub fn with_vector(&self, x: &[T]) -> Result<Self> {
        if x.len() != self.dimension() {
            return Err(Error::Input(format!(
                "parameter vector has {} entries, layout needs {}",
                x.len(),
                self.dimension()
            )));
        }
        let mut offset = 0;
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let block = ParamBlock::read(b.shape(), &x[offset..offset + b.width()]);
                offset += b.width();
                block
            })
            .collect();
        Ok(OptParamSet {
            ids: self.ids.clone(),
            blocks,
        })
    }

    /// Index of the element with `id`.
    pub fn position_of(&self, id: u32) -> Option<usize> {
        self.ids.iter().position(|&i| i == id)
    }
}

/// Converts a gap-filled initial set into optimization parameters.
///
/// Straights become endpoint blocks `p₀` and `p₀ + L (cos φ₀, sin φ₀)`.
/// Transitional arcs keep only their length; their curvature is read from the
/// neighbouring circular arc when the chain is built.
pub fn reparameterize<T: Real>(initial: &InitialElementSet<T>) -> Result<OptParamSet<T>> {
    let mut ids = Vec::with_capacity(initial.len());
    let mut blocks = Vec::with_capacity(initial.len());
    for e in &initial.entries {
        ids.push(e.id);
        blocks.push(match e.shape {
            InitialShape::Unknown => {
                return Err(Error::Structure(format!(
                    "entry {} is still unknown; fill the gaps first",
                    e.id
                )))
            }
            InitialShape::Straight => {
                let start = e
                    .start
                    .ok_or_else(|| Error::Input(format!("straight {} has no start pose", e.id)))?;
                let p0 = start.position();
                ParamBlock::Straight {
                    start: p0,
                    end: p0 + start.tangent() * e.length,
                }
            }
            InitialShape::TransitionalArc => ParamBlock::Transition { length: e.length },
            InitialShape::CircularArc => ParamBlock::Circular {
                radius: e
                    .radius
                    .ok_or_else(|| Error::Input(format!("circular arc {} has no radius", e.id)))?,
                length: e.length,
            },
        });
    }
    OptParamSet::new(ids, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Pose;
    use crate::trackmap::{fill_gaps, InitialEntry};

    #[test]
    fn straight_endpoint_block() {
        let set = InitialElementSet::new(vec![InitialEntry {
            id: 1,
            shape: InitialShape::Straight,
            length: 1035.0,
            radius: None,
            start: Some(Pose::<f64>::from_degrees(0.0, 0.0, 10.0)),
        }])
        .unwrap();
        let p = reparameterize(&fill_gaps(&set).unwrap()).unwrap();
        let x = p.flatten();
        assert_eq!(x.len(), 4);
        assert!((x[2] - 1019.28).abs() < 0.01 && (x[3] - 179.73).abs() < 0.01);
        let heading = (x[3] - x[1]).atan2(x[2] - x[0]);
        assert!((heading - 10f64.to_radians()).abs() < 1e-9);
    }

    #[test]
    fn missing_start_is_input_error() {
        let set = InitialElementSet::new(vec![InitialEntry {
            id: 1,
            shape: InitialShape::Straight,
            length: 10.0,
            radius: None,
            start: None,
        }])
        .unwrap();
        assert!(matches!(reparameterize(&set), Err(Error::Input(_))));
    }

    #[test]
    fn vector_layout_mismatch() {
        let p = OptParamSet::new(
            vec![1],
            vec![ParamBlock::Straight {
                start: Point2::new(0.0, 0.0),
                end: Point2::new(1.0, 0.0),
            }],
        )
        .unwrap();
        assert!(p.with_vector(&[1.0, 2.0]).is_err());
        assert_eq!(
            p.with_vector(&[1.0, 2.0, 3.0, 4.0]).unwrap().flatten(),
            vec![1.0, 2.0, 3.0, 4.0]
        );
    }
}

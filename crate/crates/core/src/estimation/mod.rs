// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Residuals of GNSS measurements against a parameterized track and the
//! least-squares machinery that tunes all parameters jointly.
//!
//! The total error is `F(X) = Σ_t Σ_i e_{t,i}ᵀ Ω_{t,i} e_{t,i}` with
//! `e = z - ẑ`, where `ẑ` is the perpendicular foot point of `z` on its
//! assigned element. Continuity between arc groups and the following
//! straights is kept by additional weighted gap rows.

mod lm;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{ElementProjector, FootPointConfig, Point2};
use crate::scalar::Real;
use crate::trackmap::{build_chain, OptParamSet, PlacedTrack};

pub use lm::{
    jacobian_fd, levenberg_marquardt, Damping, IterationRecord, LeastSquaresProblem, LmConfig, LmReport, Matrix,
    Termination,
};

/// Symmetric positive-definite 2×2 information matrix, 1/m².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InfoMatrix<T> {
    xx: T,
    xy: T,
    yy: T,
}

impl<T: Real> InfoMatrix<T> {
    pub fn new(xx: T, xy: T, yy: T) -> Result<Self> {
        let det = xx * yy - xy * xy;
        if !(xx.is_finite() && xy.is_finite() && yy.is_finite()) || xx <= T::zero() || det <= T::zero() {
            return Err(Error::Validation(format!(
                "information matrix [[{xx}, {xy}], [{xy}, {yy}]] is not positive definite"
            )));
        }
        Ok(InfoMatrix { xx, xy, yy })
    }

    /// `I / σ²`.
    pub fn isotropic(sigma: T) -> Result<Self> {
        let w = (sigma * sigma).recip();
        InfoMatrix::new(w, T::zero(), w)
    }

    pub fn xx(&self) -> T {
        self.xx
    }

    pub fn xy(&self) -> T {
        self.xy
    }

    pub fn yy(&self) -> T {
        self.yy
    }

    pub fn scaled(&self, alpha: T) -> Self {
        InfoMatrix {
            xx: self.xx * alpha,
            xy: self.xy * alpha,
            yy: self.yy * alpha,
        }
    }

    /// `eᵀ Ω e`.
    pub fn quadratic_form(&self, e: Point2<T>) -> T {
        self.xx * e.xi * e.xi + T::lit(2.0) * self.xy * e.xi * e.eta + self.yy * e.eta * e.eta
    }

    /// `R e` with `Ω = Rᵀ R` (upper Cholesky factor), so `|R e|² = eᵀ Ω e`.
    pub fn whiten(&self, e: Point2<T>) -> [T; 2] {
        let a = self.xx.sqrt();
        let b = self.xy / a;
        let c = (self.yy - b * b).sqrt();
        [a * e.xi + b * e.eta, c * e.eta]
    }

    fn mean_eigenvalue(&self) -> T {
        T::lit(0.5) * (self.xx + self.yy)
    }
}

/// A GNSS position with its information matrix and assigned element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurement<T> {
    pub track_id: u32,
    pub z: Point2<T>,
    pub omega: InfoMatrix<T>,
}

/// All measurements, each belonging to exactly one element.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AssignmentSet<T> {
    measurements: Vec<Measurement<T>>,
}

impl<T: Real> AssignmentSet<T> {
    pub fn new(measurements: Vec<Measurement<T>>) -> Self {
        AssignmentSet { measurements }
    }

    pub fn measurements(&self) -> &[Measurement<T>] {
        &self.measurements
    }

    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    /// Measurements grouped by element id.
    pub fn by_track(&self) -> BTreeMap<u32, Vec<&Measurement<T>>> {
        let mut groups: BTreeMap<u32, Vec<&Measurement<T>>> = BTreeMap::new();
        for m in &self.measurements {
            groups.entry(m.track_id).or_default().push(m);
        }
        groups
    }

    /// Copy with every information matrix multiplied by `alpha`.
    pub fn with_scaled_information(&self, alpha: T) -> Self {
        AssignmentSet {
            measurements: self
                .measurements
                .iter()
                .map(|m| Measurement {
                    omega: m.omega.scaled(alpha),
                    ..*m
                })
                .collect(),
        }
    }

    /// Every referenced id must exist in `params`.
    pub fn check_against(&self, params: &OptParamSet<T>) -> Result<()> {
        for m in &self.measurements {
            if params.position_of(m.track_id).is_none() {
                return Err(Error::Assignment(format!(
                    "measurement assigned to unknown element {}",
                    m.track_id
                )));
            }
        }
        Ok(())
    }

    /// Mean of `trace(Ω) / 2` over all measurements.
    pub fn mean_information(&self) -> Option<T> {
        if self.measurements.is_empty() {
            return None;
        }
        let sum = self
            .measurements
            .iter()
            .fold(T::zero(), |acc, m| acc + m.omega.mean_eigenvalue());
        Some(sum / T::from_usize(self.measurements.len()).unwrap())
    }
}

/// Assigns each point to the element with the nearest foot point.
///
/// Only a convenience for data without filter assignments.
pub fn assign_nearest<T: Real>(
    params: &OptParamSet<T>,
    points: &[(Point2<T>, InfoMatrix<T>)],
) -> Result<AssignmentSet<T>> {
    let placed = build_chain(params)?;
    let projectors = projectors(&placed, FootPointConfig::default());
    let measurements = points
        .iter()
        .map(|(z, omega)| {
            let (best, _) = projectors
                .iter()
                .map(|p| (p.element().id(), p.project(*z).point.distance(*z)))
                .fold((0, T::infinity()), |acc, c| if c.1 < acc.1 { c } else { acc });
            Measurement {
                track_id: best,
                z: *z,
                omega: *omega,
            }
        })
        .collect();
    Ok(AssignmentSet::new(measurements))
}

fn projectors<T: Real>(placed: &PlacedTrack<T>, config: FootPointConfig<T>) -> Vec<ElementProjector<T>> {
    placed
        .elements
        .iter()
        .map(|(e, start)| ElementProjector::new(*e, *start, config))
        .collect()
}

/// `e = z - ẑ` for a single measurement.
pub fn measurement_residual<T: Real>(params: &OptParamSet<T>, m: &Measurement<T>) -> Result<Point2<T>> {
    let idx = params
        .position_of(m.track_id)
        .ok_or_else(|| Error::Assignment(format!("unknown element {}", m.track_id)))?;
    let placed = build_chain(params)?;
    let (element, start) = placed.elements[idx];
    let foot = ElementProjector::new(element, start, FootPointConfig::default()).project(m.z);
    Ok(m.z - foot.point)
}

/// Measurement part of the total error, `Σ eᵀ Ω e`.
pub fn total_error<T: Real>(params: &OptParamSet<T>, assignments: &AssignmentSet<T>) -> Result<T> {
    let system = ResidualSystem::new(params.clone(), assignments.clone(), ContinuityWeights::default())?;
    Ok(system.evaluate(&params.flatten())?.measurement_cost())
}

/// Standard deviations that turn continuity gaps into residual rows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuityWeights<T> {
    pub position_sigma: T,
    pub heading_sigma: T,
    /// Measurement information level, 1/m², at which the gap rows equal
    /// `gap / sigma`. At other levels the rows scale with the square root of
    /// the mean measurement information, so a global rescaling of every Ω
    /// rescales the whole objective.
    pub reference_information: T,
}

impl<T: Real> Default for ContinuityWeights<T> {
    fn default() -> Self {
        ContinuityWeights {
            position_sigma: T::lit(0.01),
            heading_sigma: T::lit(0.001),
            reference_information: T::lit(0.01),
        }
    }
}

/// Gap rows `[Δξ/σ_pos, Δη/σ_pos, Δφ/σ_head]` for every straight after the first.
pub fn continuity_residuals<T: Real>(params: &OptParamSet<T>, weights: &ContinuityWeights<T>) -> Result<Vec<T>> {
    let placed = build_chain(params)?;
    Ok(gap_rows(&placed, weights, T::one()))
}

fn gap_rows<T: Real>(placed: &PlacedTrack<T>, weights: &ContinuityWeights<T>, factor: T) -> Vec<T> {
    let mut rows = Vec::with_capacity(3 * placed.gaps.len());
    for g in &placed.gaps {
        rows.push(factor * g.position.xi / weights.position_sigma);
        rows.push(factor * g.position.eta / weights.position_sigma);
        rows.push(factor * g.heading / weights.heading_sigma);
    }
    rows
}

/// One residual evaluation.
#[derive(Clone, Debug)]
pub struct Evaluation<T> {
    /// `e = z - ẑ` per measurement, in input order.
    pub errors: Vec<Point2<T>>,
    /// Weighted gap rows.
    pub continuity: Vec<T>,
    pub placed: PlacedTrack<T>,
    whitened: Vec<[T; 2]>,
    terms: Vec<T>,
}

impl<T: Real> Evaluation<T> {
    pub fn measurement_cost(&self) -> T {
        self.whitened
            .iter()
            .fold(T::zero(), |acc, w| acc + w[0] * w[0] + w[1] * w[1])
    }

    pub fn continuity_cost(&self) -> T {
        self.continuity.iter().fold(T::zero(), |acc, r| acc + *r * *r)
    }

    pub fn total_cost(&self) -> T {
        self.measurement_cost() + self.continuity_cost()
    }

    /// Measurement residuals weighted by Ω, one `eᵀΩe` per measurement.
    pub fn weighted_terms(&self) -> &[T] {
        &self.terms
    }

    /// Stacked whitened residual vector: measurements first, then gaps.
    pub fn stacked(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(2 * self.whitened.len() + self.continuity.len());
        for w in &self.whitened {
            out.extend_from_slice(w);
        }
        out.extend_from_slice(&self.continuity);
        out
    }
}

/// Binds a parameter layout to its measurements and continuity weights.
#[derive(Clone, Debug)]
pub struct ResidualSystem<T> {
    layout: OptParamSet<T>,
    assignments: AssignmentSet<T>,
    weights: ContinuityWeights<T>,
    foot_config: FootPointConfig<T>,
    continuity_factor: T,
    element_index: HashMap<u32, usize>,
}

impl<T: Real> ResidualSystem<T> {
    pub fn new(layout: OptParamSet<T>, assignments: AssignmentSet<T>, weights: ContinuityWeights<T>) -> Result<Self> {
        assignments.check_against(&layout)?;
        let continuity_factor = assignments
            .mean_information()
            .map(|info| (info / weights.reference_information).sqrt())
            .unwrap_or_else(T::one);
        let element_index = layout.ids().iter().enumerate().map(|(i, id)| (*id, i)).collect();
        Ok(ResidualSystem {
            layout,
            assignments,
            weights,
            foot_config: FootPointConfig::default(),
            continuity_factor,
            element_index,
        })
    }

    pub fn layout(&self) -> &OptParamSet<T> {
        &self.layout
    }

    pub fn assignments(&self) -> &AssignmentSet<T> {
        &self.assignments
    }

    pub fn weights(&self) -> &ContinuityWeights<T> {
        &self.weights
    }

    /// Scale applied to the gap rows, see [`ContinuityWeights::reference_information`].
    pub fn continuity_factor(&self) -> T {
        self.continuity_factor
    }

    pub fn params_at(&self, x: &[T]) -> Result<OptParamSet<T>> {
        self.layout.with_vector(x)
    }

    pub fn evaluate(&self, x: &[T]) -> Result<Evaluation<T>> {
        let params = self.layout.with_vector(x)?;
        let placed = build_chain(&params)?;
        let projectors = projectors(&placed, self.foot_config);
        let errors: Vec<Point2<T>> = self
            .assignments
            .measurements()
            .par_iter()
            .map(|m| {
                let p = &projectors[self.element_index[&m.track_id]];
                m.z - p.project(m.z).point
            })
            .collect();
        let whitened = errors
            .iter()
            .zip(self.assignments.measurements())
            .map(|(e, m)| m.omega.whiten(*e))
            .collect();
        let terms = errors
            .iter()
            .zip(self.assignments.measurements())
            .map(|(e, m)| m.omega.quadratic_form(*e))
            .collect();
        let continuity = gap_rows(&placed, &self.weights, self.continuity_factor);
        Ok(Evaluation {
            errors,
            continuity,
            placed,
            whitened,
            terms,
        })
    }
}

impl<T: Real> LeastSquaresProblem<T> for ResidualSystem<T> {
    fn parameter_count(&self) -> usize {
        self.layout.dimension()
    }

    fn residual_count(&self) -> usize {
        2 * self.assignments.len() + 3 * self.layout.straight_count().saturating_sub(1)
    }

    fn residuals(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(self.evaluate(x)?.stacked())
    }
}

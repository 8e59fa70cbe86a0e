// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Synthetic experiment: reference track, noisy GNSS fixes with ground truth,
//! a filter-like initial estimate and the dense data-point baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{AssignmentSet, InfoMatrix, Measurement};
use crate::geometry::{Point2, Pose, Shape, TrackElement};
use crate::scalar::Real;
use crate::trackmap::{CompactTrackMap, InitialElementSet, InitialEntry, InitialShape};

/// Stream used for the filter surrogate so that its draws never shift the
/// measurement noise of the same seed.
const SURROGATE_STREAM: u64 = 1;

/// Parameters of the synthetic experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Arc-length distance between consecutive fixes in meters.
    pub sample_spacing: f64,
    /// Per-axis standard deviation of the position noise in meters.
    pub noise_sigma: f64,
    pub seed: u64,
    /// Relative standard deviation of surrogate element lengths.
    pub length_rel_sigma: f64,
    /// Relative standard deviation of surrogate radii.
    pub radius_rel_sigma: f64,
    /// Standard deviation of surrogate start headings in degrees.
    pub heading_sigma_deg: f64,
    /// Per-axis standard deviation of surrogate start positions in meters.
    pub start_pos_sigma: f64,
    /// Return the published initial values instead of random perturbations.
    pub paper_replication: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            sample_spacing: 10.0,
            noise_sigma: 10.0,
            seed: 1,
            length_rel_sigma: 0.05,
            radius_rel_sigma: 0.02,
            heading_sigma_deg: 1.0,
            start_pos_sigma: 15.0,
            paper_replication: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_spacing.is_finite() && self.sample_spacing > 0.0) {
            return Err(Error::Validation(format!(
                "sample_spacing must be positive, got {}",
                self.sample_spacing
            )));
        }
        let sigmas = [
            ("noise_sigma", self.noise_sigma),
            ("length_rel_sigma", self.length_rel_sigma),
            ("radius_rel_sigma", self.radius_rel_sigma),
            ("heading_sigma_deg", self.heading_sigma_deg),
            ("start_pos_sigma", self.start_pos_sigma),
        ];
        for (name, v) in sigmas {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Validation(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// The three-curve test track: anchor at the origin heading 10°, a left
/// curve of radius 900 m and a right curve of radius 300 m, 4360 m in total.
pub fn reference_track<T: Real>() -> CompactTrackMap<T> {
    let l = T::lit;
    let k_left = l(-1.0 / 900.0);
    let k_right = l(1.0 / 300.0);
    let elements = vec![
        TrackElement::straight(1, l(1000.0)),
        TrackElement::transitional_arc(2, l(231.0), T::zero(), k_left),
        TrackElement::circular_arc(3, l(476.0), l(-900.0)),
        TrackElement::transitional_arc(4, l(231.0), k_left, T::zero()),
        TrackElement::straight(5, l(1000.0)),
        TrackElement::transitional_arc(6, l(108.0), T::zero(), k_right),
        TrackElement::circular_arc(7, l(206.0), l(300.0)),
        TrackElement::transitional_arc(8, l(108.0), k_right, T::zero()),
        TrackElement::straight(9, l(1000.0)),
    ]
    .into_iter()
    .collect::<Result<Vec<_>>>()
    .expect("reference elements are valid");
    CompactTrackMap::new(Pose::from_degrees(T::zero(), T::zero(), l(10.0)), elements).expect("reference map is valid")
}

/// Published filter output for the reference track: identified straights
/// and circular arcs, transitions reported only as gaps.
pub fn published_initial_set<T: Real>() -> InitialElementSet<T> {
    use InitialShape::*;
    #[rustfmt::skip]
    let rows: [(InitialShape, f64, Option<f64>, f64, f64, f64); 9] = [
        (Straight,    1035.0, None,         0.0,    0.0, 10.0),
        (Unknown,      278.0, None,      1019.0,  180.0, 10.0),
        (CircularArc,  415.0, Some(-882.0), 1306.0, 259.0, 23.2),
        (Unknown,      206.0, None,      1635.0,  504.0, 50.1),
        (Straight,     983.0, None,      1772.0,  683.0, 54.9),
        (Unknown,      185.0, None,      2338.0, 1487.0, 54.9),
        (CircularArc,  106.0, Some(297.0), 2480.0, 1631.0, 27.9),
        (Unknown,      165.0, None,      2580.0, 1663.0,  7.4),
        (Straight,     962.0, None,      2763.0, 1660.0, -4.8),
    ];
    let entries = rows
        .iter()
        .enumerate()
        .map(|(i, &(shape, length, radius, xi, eta, phi))| InitialEntry {
            id: i as u32 + 1,
            shape,
            length: T::lit(length),
            radius: radius.map(T::lit),
            start: Some(Pose::from_degrees(T::lit(xi), T::lit(eta), T::lit(phi))),
        })
        .collect();
    InitialElementSet::new(entries).expect("published initial set is valid")
}

/// Where a simulated fix really came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroundTruth<T> {
    pub track_id: u32,
    /// Station along the whole map.
    pub s: T,
    /// Station within the element.
    pub local_s: T,
    /// Noise-free position.
    pub position: Point2<T>,
}

/// Simulated fixes, index-aligned with their ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct GnssSimulation<T> {
    pub assignments: AssignmentSet<T>,
    pub truth: Vec<GroundTruth<T>>,
}

impl<T: Real> GnssSimulation<T> {
    /// `(true s, measured position)` pairs in simulation order.
    pub fn stations(&self) -> Vec<(T, Point2<T>)> {
        self.truth
            .iter()
            .zip(self.assignments.measurements())
            .map(|(t, m)| (t.s, m.z))
            .collect()
    }
}

/// Samples the map every `sample_spacing` meters (plus its end) and adds
/// i.i.d. Gaussian noise per axis. Each fix carries `Ω = I/σ²`, or the
/// identity when σ is zero.
pub fn simulate_gnss<T: Real>(map: &CompactTrackMap<T>, config: &SimConfig) -> Result<GnssSimulation<T>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sigma = T::lit(config.noise_sigma);
    let omega = if config.noise_sigma > 0.0 {
        InfoMatrix::isotropic(sigma)?
    } else {
        InfoMatrix::new(T::one(), T::zero(), T::one())?
    };
    let mut measurements = Vec::new();
    let mut truth = Vec::new();
    for station in map.stations(T::lit(config.sample_spacing))? {
        let Some(track_id) = station.id else {
            break;
        };
        let position = station.pose.position();
        let dx: f64 = rng.sample(StandardNormal);
        let dy: f64 = rng.sample(StandardNormal);
        let noise = Point2::new(T::lit(dx), T::lit(dy)) * sigma;
        measurements.push(Measurement {
            track_id,
            z: position + noise,
            omega,
        });
        truth.push(GroundTruth {
            track_id,
            s: station.s,
            local_s: station.local_s,
            position,
        });
    }
    Ok(GnssSimulation {
        assignments: AssignmentSet::new(measurements),
        truth,
    })
}

/// Stand-in for the localization filter.
///
/// Straights and circular arcs are reported with perturbed lengths, radii
/// and start poses; transitional arcs become unknown gaps with perturbed
/// lengths. In replication mode the published values are returned, which
/// requires `map` to be the reference track.
pub fn filter_surrogate<T: Real>(map: &CompactTrackMap<T>, config: &SimConfig) -> Result<InitialElementSet<T>> {
    config.validate()?;
    if config.paper_replication {
        if *map != reference_track::<T>() {
            return Err(Error::Input(
                "replication mode is only defined for the reference track".into(),
            ));
        }
        return Ok(published_initial_set());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(SURROGATE_STREAM);
    let mut normal = move || -> f64 { rng.sample(StandardNormal) };
    let mut entries = Vec::with_capacity(map.len());
    for (element, start) in map.placements() {
        let length_factor = 1.0 + config.length_rel_sigma * normal();
        // keep perturbed lengths physical even for extreme sigmas
        let length = element.length() * T::lit(length_factor.max(0.1));
        let xi = start.xi + T::lit(config.start_pos_sigma * normal());
        let eta = start.eta + T::lit(config.start_pos_sigma * normal());
        let phi = start.phi + T::lit((config.heading_sigma_deg * normal()).to_radians());
        let (shape, radius) = match element.shape() {
            Shape::Straight => (InitialShape::Straight, None),
            Shape::CircularArc => {
                let factor = T::lit(1.0 + config.radius_rel_sigma * normal());
                (InitialShape::CircularArc, element.radius().map(|r| r * factor))
            }
            Shape::TransitionalArc => (InitialShape::Unknown, None),
        };
        entries.push(InitialEntry {
            id: element.id(),
            shape,
            length,
            radius,
            start: Some(Pose::new(xi, eta, phi)),
        });
    }
    InitialElementSet::new(entries)
}

/// Data-point map: fixes ordered by true station, joined by straight
/// segments and resampled every `spacing` meters of station by linear
/// interpolation. The last station is always included.
pub fn build_datapoint_map<T: Real>(stations: &[(T, Point2<T>)], spacing: T) -> Result<Vec<Point2<T>>> {
    if stations.len() < 2 {
        return Err(Error::Input(format!(
            "data-point map needs at least 2 measurements, got {}",
            stations.len()
        )));
    }
    if !(spacing.is_finite() && spacing > T::zero()) {
        return Err(Error::Domain(format!("spacing must be positive, got {spacing}")));
    }
    let mut sorted = stations.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let s0 = sorted[0].0;
    let s_end = sorted[sorted.len() - 1].0;
    let span = s_end - s0;
    let merge = span.abs().max(T::one()) * T::lit(1e-9);
    let mut out = Vec::new();
    let mut seg = 0;
    for k in 0usize.. {
        let mut s = s0 + spacing * T::from_usize(k).unwrap();
        let last = s >= s_end - merge;
        if last {
            s = s_end;
        }
        while seg + 2 < sorted.len() && s > sorted[seg + 1].0 {
            seg += 1;
        }
        let (sa, pa) = sorted[seg];
        let (sb, pb) = sorted[seg + 1];
        let t = if sb > sa {
            ((s - sa) / (sb - sa)).max(T::zero()).min(T::one())
        } else {
            T::zero()
        };
        out.push(pa + (pb - pa) * t);
        if last {
            break;
        }
    }
    Ok(out)
}

/// Everything one simulated experiment produces.
#[derive(Clone, Debug)]
pub struct SimDataset<T> {
    pub reference: CompactTrackMap<T>,
    pub gnss: GnssSimulation<T>,
    pub initial: InitialElementSet<T>,
    /// Reference polyline sampled every meter.
    pub truth_polyline: Vec<Point2<T>>,
}

impl<T: Real> SimDataset<T> {
    pub fn measurements(&self) -> &AssignmentSet<T> {
        &self.gnss.assignments
    }
}

/// Reference track, fixes and initial estimate for one configuration.
pub fn simulate_dataset<T: Real>(config: &SimConfig) -> Result<SimDataset<T>> {
    let reference = reference_track::<T>();
    let gnss = simulate_gnss(&reference, config)?;
    let initial = filter_surrogate(&reference, config)?;
    let truth_polyline = reference
        .sample_uniform(T::one())?
        .into_iter()
        .map(|(_, p)| p.position())
        .collect();
    Ok(SimDataset {
        reference,
        gnss,
        initial,
        truth_polyline,
    })
}

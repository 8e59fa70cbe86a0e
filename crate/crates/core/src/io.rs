// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

//! File formats: map and initial-set JSON, measurement and table CSV,
//! polyline and report TSV. Every `save_*` writes through a temporary file
//! in the target directory and renames it into place.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{AssignmentSet, InfoMatrix, IterationRecord, LmConfig, Measurement};
use crate::geometry::{Point2, Pose, Shape, TrackElement};
use crate::scalar::Real;
use crate::simulation::GroundTruth;
use crate::trackmap::{infer_transition, CompactTrackMap, InitialElementSet, InitialEntry, InitialShape};

/// Default per-axis sigma for measurements without information columns.
pub const DEFAULT_MEASUREMENT_SIGMA: f64 = 10.0;

/// Relative tolerance for the redundant transitional-arc radius.
const RADIUS_CHECK_TOL: f64 = 1e-9;

// ---------------------------------------------------------------- files

/// Writes `contents` to `path` atomically.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Degrees that convert back to exactly `phi` when possible.
fn lossless_degrees(phi: f64) -> f64 {
    let d = phi.to_degrees();
    if d.to_radians() == phi {
        return d;
    }
    let mut up = d;
    let mut down = d;
    for _ in 0..8 {
        up = up.next_up();
        down = down.next_down();
        if up.to_radians() == phi {
            return up;
        }
        if down.to_radians() == phi {
            return down;
        }
    }
    d
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseJson {
    xi_m: f64,
    eta_m: f64,
    phi_deg: f64,
}

impl PoseJson {
    fn from_pose<T: Real>(p: &Pose<T>) -> Self {
        PoseJson {
            xi_m: p.xi.to_f64_lossy(),
            eta_m: p.eta.to_f64_lossy(),
            phi_deg: lossless_degrees(p.phi.to_f64_lossy()),
        }
    }

    fn to_pose<T: Real>(self, field: &str) -> Result<Pose<T>> {
        if !(self.xi_m.is_finite() && self.eta_m.is_finite() && self.phi_deg.is_finite()) {
            return Err(Error::parse(field, "pose values must be finite"));
        }
        Ok(Pose::new(
            T::lit(self.xi_m),
            T::lit(self.eta_m),
            T::lit(self.phi_deg.to_radians()),
        ))
    }
}

// ---------------------------------------------------------------- map JSON

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapJson {
    anchor: PoseJson,
    elements: Vec<ElementJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementJson {
    id: u32,
    shape: String,
    length_m: f64,
    radius_m: Option<f64>,
}

/// Radius recorded for a transitional arc: the one at its curved end.
fn transition_radius<T: Real>(e: &TrackElement<T>) -> Option<f64> {
    let k = if e.kappa_start() != T::zero() {
        e.kappa_start()
    } else {
        e.kappa_end()
    };
    (k != T::zero()).then(|| k.recip().to_f64_lossy())
}

pub fn map_to_json<T: Real>(map: &CompactTrackMap<T>) -> String {
    let placements = map.placements();
    let elements = map
        .elements()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let radius_m = match e.shape() {
                Shape::Straight => None,
                Shape::CircularArc => e.radius().map(|r| r.to_f64_lossy()),
                // the neighbouring circle is authoritative; store its radius
                Shape::TransitionalArc => [i.wrapping_sub(1), i + 1]
                    .iter()
                    .filter_map(|&j| placements.get(j))
                    .find(|(n, _)| n.shape() == Shape::CircularArc)
                    .and_then(|(n, _)| n.radius().map(|r| r.to_f64_lossy()))
                    .or_else(|| transition_radius(e)),
            };
            ElementJson {
                id: e.id(),
                shape: e.shape().tag().to_string(),
                length_m: e.length().to_f64_lossy(),
                radius_m,
            }
        })
        .collect();
    let doc = MapJson {
        anchor: PoseJson::from_pose(map.anchor()),
        elements,
    };
    serde_json::to_string_pretty(&doc).expect("map serializes") + "\n"
}

fn parse_shape(field: &str, tag: &str) -> Result<Shape> {
    Shape::from_tag(tag).ok_or_else(|| {
        Error::parse(
            field,
            format!("unknown shape tag {tag:?}, expected \"st\", \"ta\" or \"ca\""),
        )
    })
}

fn check_length(field: &str, id: u32, length: f64) -> Result<()> {
    if !length.is_finite() {
        return Err(Error::parse(field, "length must be finite"));
    }
    if length <= 0.0 {
        return Err(Error::Validation(format!(
            "element {id} has non-positive length {length}"
        )));
    }
    Ok(())
}

pub fn map_from_json<T: Real>(text: &str) -> Result<CompactTrackMap<T>> {
    let doc: MapJson = serde_json::from_str(text).map_err(|e| Error::parse("map", e.to_string()))?;
    let anchor = doc.anchor.to_pose("anchor")?;
    let mut shapes = Vec::with_capacity(doc.elements.len());
    for (i, e) in doc.elements.iter().enumerate() {
        shapes.push(parse_shape(&format!("elements[{i}].shape"), &e.shape)?);
        check_length(&format!("elements[{i}].length_m"), e.id, e.length_m)?;
        if let Some(r) = e.radius_m {
            if !r.is_finite() || r == 0.0 {
                return Err(Error::parse(
                    format!("elements[{i}].radius_m"),
                    format!("radius must be finite and nonzero, got {r}"),
                ));
            }
        }
    }
    let mut elements = Vec::with_capacity(doc.elements.len());
    for (i, e) in doc.elements.iter().enumerate() {
        let field = format!("elements[{i}].radius_m");
        let length = T::lit(e.length_m);
        let element = match shapes[i] {
            Shape::Straight => {
                if e.radius_m.is_some() {
                    return Err(Error::parse(field, "straights must have a null radius"));
                }
                TrackElement::straight(e.id, length)?
            }
            Shape::CircularArc => {
                let r = e
                    .radius_m
                    .ok_or_else(|| Error::parse(&field, "circular arc needs a radius"))?;
                TrackElement::circular_arc(e.id, length, T::lit(r))?
            }
            Shape::TransitionalArc => {
                let (side, arc) = crate::trackmap::transition_side(&shapes, i)
                    .ok_or_else(|| Error::Structure(format!("transitional arc {} has no circular neighbour", e.id)))?;
                let neighbour = doc.elements[arc]
                    .radius_m
                    .ok_or_else(|| Error::parse(format!("elements[{arc}].radius_m"), "circular arc needs a radius"))?;
                if let Some(r) = e.radius_m {
                    if (r - neighbour).abs() > RADIUS_CHECK_TOL * neighbour.abs() {
                        return Err(Error::Validation(format!(
                            "transitional arc {} stores radius {r}, its circular neighbour has {neighbour}",
                            e.id
                        )));
                    }
                }
                infer_transition(e.id, T::lit(neighbour), length, side)?
            }
        };
        elements.push(element);
    }
    CompactTrackMap::new(anchor, elements)
}

pub fn save_map<T: Real>(map: &CompactTrackMap<T>, path: &Path) -> Result<()> {
    write_atomic(path, map_to_json(map).as_bytes())
}

pub fn load_map<T: Real>(path: &Path) -> Result<CompactTrackMap<T>> {
    map_from_json(&read_to_string(path)?)
}

// ---------------------------------------------------------------- initial JSON

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialJson {
    elements: Vec<InitialEntryJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialEntryJson {
    id: u32,
    shape: String,
    length_m: f64,
    #[serde(default)]
    radius_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start: Option<PoseJson>,
}

fn initial_tag(shape: InitialShape) -> &'static str {
    match shape.known() {
        Some(s) => s.tag(),
        None => "unknown",
    }
}

pub fn initial_to_json<T: Real>(set: &InitialElementSet<T>) -> String {
    let doc = InitialJson {
        elements: set
            .entries
            .iter()
            .map(|e| InitialEntryJson {
                id: e.id,
                shape: initial_tag(e.shape).to_string(),
                length_m: e.length.to_f64_lossy(),
                radius_m: e.radius.map(|r| r.to_f64_lossy()),
                start: e.start.as_ref().map(PoseJson::from_pose),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("initial set serializes") + "\n"
}

pub fn initial_from_json<T: Real>(text: &str) -> Result<InitialElementSet<T>> {
    let doc: InitialJson = serde_json::from_str(text).map_err(|e| Error::parse("initial set", e.to_string()))?;
    let mut entries = Vec::with_capacity(doc.elements.len());
    for (i, e) in doc.elements.iter().enumerate() {
        let shape = if e.shape == "unknown" {
            InitialShape::Unknown
        } else {
            parse_shape(&format!("elements[{i}].shape"), &e.shape)?.into()
        };
        check_length(&format!("elements[{i}].length_m"), e.id, e.length_m)?;
        if let Some(r) = e.radius_m {
            if !r.is_finite() || r == 0.0 {
                return Err(Error::parse(
                    format!("elements[{i}].radius_m"),
                    format!("radius must be finite and nonzero, got {r}"),
                ));
            }
        }
        let start = match e.start {
            Some(p) => Some(p.to_pose(&format!("elements[{i}].start"))?),
            None => None,
        };
        entries.push(InitialEntry {
            id: e.id,
            shape,
            length: T::lit(e.length_m),
            radius: e.radius_m.map(T::lit),
            start,
        });
    }
    InitialElementSet::new(entries)
}

pub fn save_initial<T: Real>(set: &InitialElementSet<T>, path: &Path) -> Result<()> {
    write_atomic(path, initial_to_json(set).as_bytes())
}

pub fn load_initial<T: Real>(path: &Path) -> Result<InitialElementSet<T>> {
    initial_from_json(&read_to_string(path)?)
}

// ---------------------------------------------------------------- measurement CSV

const MEASUREMENT_COLUMNS: [&str; 6] = ["track_id", "xi_m", "eta_m", "omega_xx", "omega_xy", "omega_yy"];

pub fn measurements_to_csv<T: Real>(set: &AssignmentSet<T>) -> String {
    let mut out = MEASUREMENT_COLUMNS.join(",");
    out.push('\n');
    for m in set.measurements() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            m.track_id,
            m.z.xi.to_f64_lossy(),
            m.z.eta.to_f64_lossy(),
            m.omega.xx().to_f64_lossy(),
            m.omega.xy().to_f64_lossy(),
            m.omega.yy().to_f64_lossy()
        );
    }
    out
}

fn csv_error(line: u64, column: &str, message: impl std::fmt::Display) -> Error {
    Error::parse(format!("line {line}, column {column}"), message.to_string())
}

fn parse_cell<V: std::str::FromStr>(record: &csv::StringRecord, idx: usize, line: u64, column: &str) -> Result<V>
where
    V::Err: std::fmt::Display,
{
    let cell = record
        .get(idx)
        .ok_or_else(|| csv_error(line, column, "missing value"))?
        .trim();
    cell.parse::<V>()
        .map_err(|e| csv_error(line, column, format!("{cell:?}: {e}")))
}

fn parse_finite(record: &csv::StringRecord, idx: usize, line: u64, column: &str) -> Result<f64> {
    let v: f64 = parse_cell(record, idx, line, column)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(csv_error(line, column, "value must be finite"))
    }
}

/// Parses the measurement CSV. The information columns are optional, both
/// as columns and as empty cells; missing ones default to `I/σ²` with
/// σ = 10 m. Errors name the offending line.
pub fn measurements_from_csv<T: Real>(text: &str) -> Result<AssignmentSet<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::parse("line 1, header", e.to_string()))?
        .clone();
    let names: Vec<&str> = headers.iter().collect();
    let with_omega = match names.as_slice() {
        n if n == &MEASUREMENT_COLUMNS[..3] => false,
        n if n == &MEASUREMENT_COLUMNS[..] => true,
        _ => {
            return Err(Error::parse(
                "line 1, header",
                format!(
                    "expected {:?} optionally followed by the omega columns, got {names:?}",
                    &MEASUREMENT_COLUMNS[..3]
                ),
            ))
        }
    };
    let default = InfoMatrix::isotropic(T::lit(DEFAULT_MEASUREMENT_SIGMA))?;
    let mut measurements = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            csv_error(line, "-", e)
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != names.len() {
            return Err(csv_error(
                line,
                "-",
                format!("expected {} fields, found {}", names.len(), record.len()),
            ));
        }
        let track_id: u32 = parse_cell(&record, 0, line, "track_id")?;
        let xi = parse_finite(&record, 1, line, "xi_m")?;
        let eta = parse_finite(&record, 2, line, "eta_m")?;
        let blank = with_omega && (3..6).all(|i| record[i].is_empty());
        let omega = if !with_omega || blank {
            default
        } else {
            let xx = parse_finite(&record, 3, line, "omega_xx")?;
            let xy = parse_finite(&record, 4, line, "omega_xy")?;
            let yy = parse_finite(&record, 5, line, "omega_yy")?;
            InfoMatrix::new(T::lit(xx), T::lit(xy), T::lit(yy)).map_err(|e| csv_error(line, "omega", e))?
        };
        measurements.push(Measurement {
            track_id,
            z: Point2::new(T::lit(xi), T::lit(eta)),
            omega,
        });
    }
    Ok(AssignmentSet::new(measurements))
}

pub fn save_measurements<T: Real>(set: &AssignmentSet<T>, path: &Path) -> Result<()> {
    write_atomic(path, measurements_to_csv(set).as_bytes())
}

pub fn load_measurements<T: Real>(path: &Path) -> Result<AssignmentSet<T>> {
    measurements_from_csv(&read_to_string(path)?)
}

// ---------------------------------------------------------------- truth CSV

const TRUTH_COLUMNS: [&str; 5] = ["track_id", "s_m", "local_s_m", "xi_m", "eta_m"];

/// Ground truth of simulated fixes, one row per measurement row.
pub fn truth_to_csv<T: Real>(truth: &[GroundTruth<T>]) -> String {
    let mut out = TRUTH_COLUMNS.join(",");
    out.push('\n');
    for t in truth {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            t.track_id,
            t.s.to_f64_lossy(),
            t.local_s.to_f64_lossy(),
            t.position.xi.to_f64_lossy(),
            t.position.eta.to_f64_lossy()
        );
    }
    out
}

pub fn truth_from_csv<T: Real>(text: &str) -> Result<Vec<GroundTruth<T>>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::parse("line 1, header", e.to_string()))?;
    if headers.iter().ne(TRUTH_COLUMNS) {
        return Err(Error::parse("line 1, header", format!("expected {TRUTH_COLUMNS:?}")));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            csv_error(line, "-", e)
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        out.push(GroundTruth {
            track_id: parse_cell(&record, 0, line, "track_id")?,
            s: T::lit(parse_finite(&record, 1, line, "s_m")?),
            local_s: T::lit(parse_finite(&record, 2, line, "local_s_m")?),
            position: Point2::new(
                T::lit(parse_finite(&record, 3, line, "xi_m")?),
                T::lit(parse_finite(&record, 4, line, "eta_m")?),
            ),
        });
    }
    Ok(out)
}

pub fn load_truth<T: Real>(path: &Path) -> Result<Vec<GroundTruth<T>>> {
    truth_from_csv(&read_to_string(path)?)
}

// ---------------------------------------------------------------- table CSV

const TABLE_COLUMNS: [&str; 7] = [
    "id",
    "shape",
    "length_m",
    "radius_m",
    "start_xi_m",
    "start_eta_m",
    "start_phi_deg",
];

/// One row per element with its start pose; radius blank for straights.
pub fn map_to_table_csv<T: Real>(map: &CompactTrackMap<T>) -> String {
    let mut out = TABLE_COLUMNS.join(",");
    out.push('\n');
    for (e, start) in map.placements() {
        let radius = match e.shape() {
            Shape::Straight => String::new(),
            Shape::CircularArc => e.radius().map(|r| r.to_f64_lossy().to_string()).unwrap_or_default(),
            Shape::TransitionalArc => transition_radius(&e).map(|r| r.to_string()).unwrap_or_default(),
        };
        let pose = PoseJson::from_pose(&start);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            e.id(),
            e.shape().tag(),
            e.length().to_f64_lossy(),
            radius,
            pose.xi_m,
            pose.eta_m,
            pose.phi_deg
        );
    }
    out
}

/// Reads a table CSV back into a map. The anchor is the first row's start;
/// later start columns are informational and ignored.
pub fn map_from_table_csv<T: Real>(text: &str) -> Result<CompactTrackMap<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::parse("line 1, header", e.to_string()))?;
    if headers.iter().ne(TABLE_COLUMNS) {
        return Err(Error::parse("line 1, header", format!("expected {TABLE_COLUMNS:?}")));
    }
    let mut anchor = None;
    let mut elements = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            csv_error(line, "-", e)
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let id: u32 = parse_cell(&record, 0, line, "id")?;
        let shape = Shape::from_tag(&record[1])
            .ok_or_else(|| csv_error(line, "shape", format!("unknown shape tag {:?}", &record[1])))?;
        let length = parse_finite(&record, 2, line, "length_m")?;
        let radius = if record[3].is_empty() {
            None
        } else {
            Some(parse_finite(&record, 3, line, "radius_m")?)
        };
        if anchor.is_none() {
            anchor = Some(PoseJson {
                xi_m: parse_finite(&record, 4, line, "start_xi_m")?,
                eta_m: parse_finite(&record, 5, line, "start_eta_m")?,
                phi_deg: parse_finite(&record, 6, line, "start_phi_deg")?,
            });
        }
        elements.push(ElementJson {
            id,
            shape: shape.tag().to_string(),
            length_m: length,
            radius_m: radius,
        });
    }
    let anchor = anchor.ok_or_else(|| Error::Input("table has no rows".into()))?;
    let doc = MapJson { anchor, elements };
    map_from_json(&serde_json::to_string(&doc).expect("map serializes"))
}

// ---------------------------------------------------------------- TSV

/// Polyline TSV of a compact map: `s_m xi_m eta_m phi_rad kappa_per_m` at
/// stations `0, spacing, …` plus the end.
pub fn map_to_polyline_tsv<T: Real>(map: &CompactTrackMap<T>, spacing: T) -> Result<String> {
    let mut out = String::from("s_m\txi_m\teta_m\tphi_rad\tkappa_per_m\n");
    for st in map.stations(spacing)? {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            st.s.to_f64_lossy(),
            st.pose.xi.to_f64_lossy(),
            st.pose.eta.to_f64_lossy(),
            st.pose.phi.to_f64_lossy(),
            st.kappa.to_f64_lossy()
        );
    }
    Ok(out)
}

/// Polyline TSV of a plain point sequence: `s_m xi_m eta_m` with `s` the
/// cumulative chord length.
pub fn points_to_polyline_tsv<T: Real>(points: &[Point2<T>]) -> String {
    let mut out = String::from("s_m\txi_m\teta_m\n");
    let mut s = T::zero();
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            s = s + points[i - 1].distance(*p);
        }
        let _ = writeln!(
            out,
            "{}\t{}\t{}",
            s.to_f64_lossy(),
            p.xi.to_f64_lossy(),
            p.eta.to_f64_lossy()
        );
    }
    out
}

/// Reads the `xi_m` and `eta_m` columns of a polyline TSV.
pub fn polyline_from_tsv<T: Real>(text: &str) -> Result<Vec<Point2<T>>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::parse("line 1, header", e.to_string()))?;
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::parse("line 1, header", format!("missing column {name}")))
    };
    let (ix, ie) = (col("xi_m")?, col("eta_m")?);
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            csv_error(line, "-", e)
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        out.push(Point2::new(
            T::lit(parse_finite(&record, ix, line, "xi_m")?),
            T::lit(parse_finite(&record, ie, line, "eta_m")?),
        ));
    }
    Ok(out)
}

pub fn load_polyline<T: Real>(path: &Path) -> Result<Vec<Point2<T>>> {
    polyline_from_tsv(&read_to_string(path)?)
}

/// Error profile TSV: `s_m abs_err_m`.
pub fn profile_to_tsv<T: Real>(profile: &[(T, T)]) -> String {
    let mut out = String::from("s_m\tabs_err_m\n");
    for &(s, e) in profile {
        let _ = writeln!(out, "{}\t{}", s.to_f64_lossy(), e.to_f64_lossy());
    }
    out
}

/// Solver log TSV: one row per pass, preceded by the initial cost as
/// iteration 0.
pub fn iteration_log_tsv(initial_cost: f64, history: &[IterationRecord]) -> String {
    let mut out = String::from("iteration\tF\tstep_norm\tlambda\taccepted\n");
    let _ = writeln!(out, "0\t{initial_cost}\t0\t0\ttrue");
    for r in history {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.iteration, r.cost, r.step_norm, r.lambda, r.accepted
        );
    }
    out
}

// ---------------------------------------------------------------- config JSON

pub fn lm_config_from_json(text: &str) -> Result<LmConfig> {
    serde_json::from_str(text).map_err(|e| Error::parse("solver config", e.to_string()))
}

// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

//! `trackmap`: simulate GNSS data, optimize compact track-maps, evaluate
//! them against a reference and export plot data.

mod config;
mod manifest;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

use trackmap::estimation::{assign_nearest, AssignmentSet};
use trackmap::evaluation::{evaluate, Candidate, EvalReport};
use trackmap::geometry::Point2;
use trackmap::io;
use trackmap::pipeline::{optimize_map, EndRule};
use trackmap::simulation::{build_datapoint_map, simulate_dataset};
use trackmap::trackmap::{fill_gaps, reparameterize, CompactTrackMap};
use trackmap::Error;

use config::RunConfig;
use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "trackmap", version, about = "Compact geometric track-maps from GNSS fixes")]
struct Cli {
    /// Random seed; overrides the configuration file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a dataset on the reference track.
    Simulate(SimulateArgs),
    /// Optimize a compact map from an initial element set and fixes.
    Optimize(OptimizeArgs),
    /// Evaluate a map or polyline against a reference.
    Evaluate(EvaluateArgs),
    /// Export a map as a polyline TSV or element table.
    Export(ExportArgs),
}

#[derive(Debug, clap::Args)]
struct SimulateArgs {
    /// Per-axis noise sigma in meters.
    #[arg(long, value_parser = non_negative)]
    noise_sigma: Option<f64>,
    /// Arc-length spacing of the fixes in meters.
    #[arg(long, value_parser = positive)]
    spacing: Option<f64>,
    /// Use the published initial values instead of a random surrogate.
    #[arg(long)]
    paper_replication: bool,
}

#[derive(Debug, clap::Args)]
struct OptimizeArgs {
    /// Initial element set JSON.
    #[arg(long)]
    initial: PathBuf,
    /// Measurement CSV.
    #[arg(long)]
    measurements: PathBuf,
    /// Maximum solver iterations; 0 emits the naive concatenation.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Relative step tolerance.
    #[arg(long, value_parser = positive)]
    rel_step_tol: Option<f64>,
    /// Initial damping scale.
    #[arg(long, value_parser = positive)]
    tau: Option<f64>,
    /// Placement of the outer track ends.
    #[arg(long, value_enum)]
    end_rule: Option<EndRuleArg>,
    /// Reassign every fix to its nearest initial element.
    #[arg(long)]
    assign_nearest: bool,
}

#[derive(Debug, clap::Args)]
struct EvaluateArgs {
    /// Candidate: map JSON or polyline TSV.
    #[arg(long)]
    candidate: PathBuf,
    /// Reference: map JSON or polyline TSV.
    #[arg(long)]
    reference: PathBuf,
    /// Sampling step along the candidate in meters.
    #[arg(long, value_parser = positive)]
    step: Option<f64>,
    /// Also evaluate the data-point map built from the fixes.
    #[arg(long, requires_all = ["measurements", "truth"])]
    compare: bool,
    /// Measurement CSV for `--compare`.
    #[arg(long)]
    measurements: Option<PathBuf>,
    /// Ground-truth CSV for `--compare`, giving the order of the fixes.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Spacing of the data-point map in meters.
    #[arg(long, value_parser = positive)]
    baseline_spacing: Option<f64>,
}

#[derive(Debug, clap::Args)]
struct ExportArgs {
    /// Map JSON.
    #[arg(long)]
    map: PathBuf,
    /// Station spacing in meters.
    #[arg(long, value_parser = positive, default_value_t = 1.0, allow_negative_numbers = true)]
    spacing: f64,
    /// Write the element table CSV instead of a polyline.
    #[arg(long)]
    table: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndRuleArg {
    Solver,
    OutermostFix,
    SteadyRate,
}

impl From<EndRuleArg> for EndRule {
    fn from(v: EndRuleArg) -> Self {
        match v {
            EndRuleArg::Solver => EndRule::Solver,
            EndRuleArg::OutermostFix => EndRule::OutermostFix,
            EndRuleArg::SteadyRate => EndRule::SteadyRate,
        }
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(v) => Err(format!("must be a positive number, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        Ok(v) => Err(format!("must be a non-negative number, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

/// Files produced by a command, written only after everything succeeded.
#[derive(Default)]
struct Outputs {
    files: BTreeMap<String, Vec<u8>>,
}

impl Outputs {
    fn add(&mut self, name: &str, contents: impl Into<Vec<u8>>) {
        self.files.insert(name.to_string(), contents.into());
    }

    fn names(&self) -> Vec<String> {
        self.files.keys().cloned().collect()
    }

    fn write(self, dir: &Path) -> anyhow::Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (name, contents) in self.files {
            io::write_atomic(&dir.join(&name), &contents)?;
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(out) = cli.out.clone() else {
        Cli::command()
            .error(
                clap::error::ErrorKind::MissingRequiredArgument,
                "the following required argument was not provided: --out <OUT>",
            )
            .exit();
    };
    match run(&cli, &out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli, out: &Path) -> anyhow::Result<()> {
    let started = Instant::now();
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.simulation.seed = seed;
    }
    let mut manifest = RunManifest::new(command_name(&cli.command));
    if let Some(path) = &cli.config {
        manifest.input("config", path);
    }
    let mut outputs = Outputs::default();
    match &cli.command {
        Command::Simulate(args) => simulate(args, &mut config, &mut outputs)?,
        Command::Optimize(args) => optimize(args, &mut config, &mut outputs, &mut manifest)?,
        Command::Evaluate(args) => evaluate_cmd(args, &mut config, &mut outputs, &mut manifest)?,
        Command::Export(args) => export(args, &mut outputs, &mut manifest)?,
    }
    manifest.seed = config.simulation.seed;
    manifest.config = serde_json::to_value(&config)?;
    manifest.outputs = outputs.names();
    manifest.finish(started);
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    outputs.add("manifest.json", manifest.to_json()?);
    outputs.write(out)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Simulate(_) => "simulate",
        Command::Optimize(_) => "optimize",
        Command::Evaluate(_) => "evaluate",
        Command::Export(_) => "export",
    }
}

fn simulate(args: &SimulateArgs, config: &mut RunConfig, outputs: &mut Outputs) -> anyhow::Result<()> {
    let sim = &mut config.simulation;
    if let Some(v) = args.noise_sigma {
        sim.noise_sigma = v;
    }
    if let Some(v) = args.spacing {
        sim.sample_spacing = v;
    }
    sim.paper_replication |= args.paper_replication;
    let ds = simulate_dataset::<f64>(sim)?;
    outputs.add("reference.json", io::map_to_json(&ds.reference));
    outputs.add("measurements.csv", io::measurements_to_csv(ds.measurements()));
    outputs.add("truth.csv", io::truth_to_csv(&ds.gnss.truth));
    outputs.add("initial.json", io::initial_to_json(&ds.initial));
    Ok(())
}

fn optimize(
    args: &OptimizeArgs,
    config: &mut RunConfig,
    outputs: &mut Outputs,
    manifest: &mut RunManifest,
) -> anyhow::Result<()> {
    manifest.input("initial", &args.initial);
    manifest.input("measurements", &args.measurements);
    if let Some(v) = args.max_iters {
        config.solver.max_iterations = v;
    }
    if let Some(v) = args.rel_step_tol {
        config.solver.relative_step_tolerance = v;
    }
    if let Some(v) = args.tau {
        config.solver.tau = v;
    }
    if let Some(v) = args.end_rule {
        config.end_rule = v;
    }
    let initial = io::load_initial::<f64>(&args.initial)?;
    let mut measurements: AssignmentSet<f64> = io::load_measurements(&args.measurements)?;
    if args.assign_nearest {
        let layout = reparameterize(&fill_gaps(&initial)?)?;
        let points: Vec<_> = measurements.measurements().iter().map(|m| (m.z, m.omega)).collect();
        measurements = assign_nearest(&layout, &points)?;
        manifest.warn("fixes were reassigned to their nearest initial element");
    }
    let options = config.optimize_options();
    let result = optimize_map(&initial, &measurements, &options)?;
    outputs.add("naive.json", io::map_to_json(&result.naive));
    outputs.add(
        "iterations.tsv",
        io::iteration_log_tsv(result.report.initial_cost, &result.report.history),
    );
    let optimized = if options.lm.max_iterations == 0 {
        manifest.warn("max iterations is 0; the naive concatenation is emitted as the optimized map");
        result.naive.clone()
    } else {
        match result.emit(&options.threshold) {
            Ok(map) => map,
            Err(Error::EmissionRefused(report)) => {
                bail!("continuity gaps too large to emit a map\n{report}")
            }
            Err(e) => return Err(e.into()),
        }
    };
    if options.lm.max_iterations > 0 && !result.report.termination.converged() {
        manifest.warn(format!(
            "solver stopped after {} iterations without converging",
            result.report.iterations
        ));
    }
    let eval = result.system.evaluate(&result.report.x)?;
    manifest.solver = Some(manifest::SolverSummary {
        termination: result.report.termination.as_str().to_string(),
        converged: result.report.termination.converged(),
        iterations: result.report.iterations,
        accepted_iterations: result.report.history.iter().filter(|h| h.accepted).count(),
        initial_cost: result.report.initial_cost,
        final_cost: result.report.final_cost,
        measurement_cost: eval.measurement_cost(),
        continuity_cost: eval.continuity_cost(),
        max_gap_m: result.placed.max_gap(),
        max_heading_gap_rad: result.placed.max_heading_gap(),
    });
    outputs.add("optimized.json", io::map_to_json(&optimized));
    Ok(())
}

enum Curve {
    Map(CompactTrackMap<f64>),
    Polyline(Vec<Point2<f64>>),
}

impl Curve {
    fn load(path: &Path) -> anyhow::Result<Curve> {
        let is_tsv = path.extension().is_some_and(|e| e == "tsv");
        Ok(if is_tsv {
            Curve::Polyline(io::load_polyline(path)?)
        } else {
            Curve::Map(io::load_map(path)?)
        })
    }

    fn candidate(&self) -> Candidate<'_, f64> {
        match self {
            Curve::Map(m) => Candidate::Map(m),
            Curve::Polyline(p) => Candidate::Polyline(p),
        }
    }

    /// Reference polyline with 1 m spacing for maps.
    fn reference_points(&self) -> anyhow::Result<Vec<Point2<f64>>> {
        Ok(match self {
            Curve::Map(m) => m.sample_uniform(1.0)?.into_iter().map(|(_, p)| p.position()).collect(),
            Curve::Polyline(p) => p.clone(),
        })
    }
}

fn report_outputs(prefix: &str, report: &EvalReport<f64>, outputs: &mut Outputs) -> anyhow::Result<()> {
    outputs.add(
        &format!("{prefix}report.json"),
        serde_json::to_string_pretty(&report.summary())? + "\n",
    );
    outputs.add(
        &format!("{prefix}profile.tsv"),
        io::profile_to_tsv(&report.error_profile),
    );
    Ok(())
}

fn evaluate_cmd(
    args: &EvaluateArgs,
    config: &mut RunConfig,
    outputs: &mut Outputs,
    manifest: &mut RunManifest,
) -> anyhow::Result<()> {
    manifest.input("candidate", &args.candidate);
    manifest.input("reference", &args.reference);
    if let Some(v) = args.step {
        config.evaluation.step_m = v;
    }
    if let Some(v) = args.baseline_spacing {
        config.evaluation.baseline_spacing_m = v;
    }
    let step = config.evaluation.step_m;
    let candidate = Curve::load(&args.candidate)?;
    let reference = Curve::load(&args.reference)?.reference_points()?;
    let report = evaluate(candidate.candidate(), &reference, step)?;
    if !args.compare {
        report_outputs("", &report, outputs)?;
        return Ok(());
    }
    let (Some(mpath), Some(tpath)) = (&args.measurements, &args.truth) else {
        bail!("--compare needs --measurements and --truth");
    };
    manifest.input("measurements", mpath);
    manifest.input("truth", tpath);
    let measurements: AssignmentSet<f64> = io::load_measurements(mpath)?;
    let truth = io::load_truth::<f64>(tpath)?;
    if truth.len() != measurements.len() {
        bail!(Error::Input(format!(
            "{} truth rows for {} measurements",
            truth.len(),
            measurements.len()
        )));
    }
    let stations: Vec<(f64, Point2<f64>)> = truth
        .iter()
        .zip(measurements.measurements())
        .map(|(t, m)| (t.s, m.z))
        .collect();
    let baseline = build_datapoint_map(&stations, config.evaluation.baseline_spacing_m)?;
    let base_report = evaluate(Candidate::Polyline(&baseline), &reference, step)?;
    report_outputs("optimized_", &report, outputs)?;
    report_outputs("baseline_", &base_report, outputs)?;
    outputs.add("baseline.tsv", io::points_to_polyline_tsv(&baseline));
    let (a, b) = (report.summary(), base_report.summary());
    let table = format!(
        "metric\toptimized\tbaseline\n\
         mean_abs_error_m\t{}\t{}\n\
         max_abs_error_m\t{}\t{}\n\
         frechet_m\t{}\t{}\n\
         field_count\t{}\t{}\n",
        a.mean_abs_error_m,
        b.mean_abs_error_m,
        a.max_abs_error_m,
        b.max_abs_error_m,
        a.frechet_m,
        b.frechet_m,
        a.field_count,
        b.field_count
    );
    print!("{table}");
    outputs.add("comparison.tsv", table);
    Ok(())
}

fn export(args: &ExportArgs, outputs: &mut Outputs, manifest: &mut RunManifest) -> anyhow::Result<()> {
    manifest.input("map", &args.map);
    let map = io::load_map::<f64>(&args.map)?;
    if args.table {
        outputs.add("table.csv", io::map_to_table_csv(&map));
    } else {
        outputs.add("polyline.tsv", io::map_to_polyline_tsv(&map, args.spacing)?);
    }
    Ok(())
}

//! Batch command line. Each subcommand reads the project config (plus flag
//! overrides), writes its outputs under the output directory and echoes the resolved
//! config into `<command>.run.json`.
//!
//! Exit codes: 0 success, 2 infeasible result, 64 usage, 65 data format, 74 I/O,
//! 1 anything else.

pub mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::artwork::{build_layer, drc_check, export, DrcReport, ExportFormat, LayerId};
use crate::circuit::{stack_response, stack_response_oblique, SparamSpectrum};
use crate::element::synthesize_lc;
use crate::error::{Error, Result};
use crate::estimator::{boresight_transmission, scanned_sweep};
use crate::feed::{fit_q, FeedSpec, HornData};
use crate::goldberg::{build_goldberg, hemisphere_with_skirt, irreducible_section, GoldbergSpec, GoldbergTessellation, TessellationFile};
use crate::postproc::{gaussian_farfield, gaussian_weighting, normalize_calibration, time_gate, FarFieldGrid, SweepTrace};

use config::{input_error, RUN_SCHEMA};
pub use config::{PolChoice, ProjectConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "fssdome", version, about = "Conformal band-pass FSS design pipeline")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Overrides,
}

/// Flags that override config values.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// TOML project config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Hz.
    #[arg(long, global = true)]
    pub freq_min: Option<f64>,
    /// Hz.
    #[arg(long, global = true)]
    pub freq_max: Option<f64>,
    /// Hz.
    #[arg(long, global = true)]
    pub freq_step: Option<f64>,
    /// Oblique incidence angle for `response`, deg.
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub pol: Option<PolChoice>,
    /// Override-table CSV (p2_mm,g_mm,w_l_mm,w_c_mm) or `table-one`.
    #[arg(long, global = true)]
    pub override_table: Option<String>,
    /// Time-gate width, ns
    #[arg(long, global = true)]
    pub gate_ns: Option<f64>,
    /// Gaussian beam waist, mm
    #[arg(long, global = true)]
    pub w0_mm: Option<f64>,
    /// Use the feed beamwidth relation exactly as printed.
    #[arg(long, global = true)]
    pub literal_a9: bool,
    /// Artwork export format: json, svg or mesh.
    #[arg(long, global = true)]
    pub format: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep (C, L) against the band target.
    Synth,
    /// S-parameters of the configured stack.
    Response,
    /// Layer tessellations and cell statistics.
    Tessellate,
    /// Per-layer artwork, exports and DRC.
    Artwork,
    /// Fit cos^q exponents to horn datasheet curves.
    Feedfit {
        /// CSV freq_hz,gain_dbi,beamwidth_deg.
        #[arg(long)]
        horn: Option<PathBuf>,
    },
    /// Gaussian far-field weighting of a measured scan.
    Gaussproc {
        /// Far-field CSV freq_hz,theta_deg,phi_deg,re_s21,im_s21 with the sample.
        #[arg(long)]
        input: PathBuf,
        /// Same grid without the sample, for calibration.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Time-gate a frequency sweep.
    Timegate {
        /// CSV freq_hz,re_s21,im_s21.
        #[arg(long)]
        input: PathBuf,
    },
    /// Ray-based transmission estimate of the dome.
    Estimate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Synth => "synth",
            Self::Response => "response",
            Self::Tessellate => "tessellate",
            Self::Artwork => "artwork",
            Self::Feedfit { .. } => "feedfit",
            Self::Gaussproc { .. } => "gaussproc",
            Self::Timegate { .. } => "timegate",
            Self::Estimate => "estimate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Infeasible,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Domain(_) | Error::Sampling(_) => EXIT_USAGE,
        Error::DataFormat(_) | Error::Alignment(_) => EXIT_DATA,
        Error::InfeasibleGeometry(_) | Error::InfeasibleArtwork { .. } => EXIT_INFEASIBLE,
        Error::Io(_) => EXIT_IO,
        _ => 1,
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::Infeasible) => EXIT_INFEASIBLE,
        Err(e) => {
            eprintln!("fssdome {}: {e}", cli.command.name());
            exit_code(&e)
        }
    }
}

/// Config file (or defaults) with flag overrides applied, validated.
pub fn resolve_config(opts: &Overrides) -> Result<ProjectConfig> {
    let mut cfg = match &opts.config {
        Some(p) => ProjectConfig::from_toml_path(p)?,
        None => ProjectConfig::default(),
    };
    if let Some(o) = &opts.out {
        cfg.output_dir = o.clone();
    }
    let s = &mut cfg.sweep;
    s.freq_min_hz = opts.freq_min.unwrap_or(s.freq_min_hz);
    s.freq_max_hz = opts.freq_max.unwrap_or(s.freq_max_hz);
    s.freq_step_hz = opts.freq_step.unwrap_or(s.freq_step_hz);
    s.theta_deg = opts.theta.or(s.theta_deg);
    s.pol = opts.pol.unwrap_or(s.pol);
    if let Some(t) = &opts.override_table {
        cfg.artwork.override_table = Some(t.clone());
    }
    if let Some(f) = &opts.format {
        cfg.artwork.format = f.clone();
    }
    cfg.postproc.gate_ns = opts.gate_ns.unwrap_or(cfg.postproc.gate_ns);
    cfg.postproc.w0_mm = opts.w0_mm.unwrap_or(cfg.postproc.w0_mm);
    cfg.feed.literal_a9 |= opts.literal_a9;
    cfg.validate()?;
    cfg.artwork.format.parse::<ExportFormat>()?;
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let cfg = resolve_config(&cli.opts)?;
    let mut run = Run::new(cli.command.name(), &cfg)?;
    let outcome = match &cli.command {
        Command::Synth => cmd_synth(&cfg, &mut run)?,
        Command::Response => cmd_response(&cfg, &mut run)?,
        Command::Tessellate => cmd_tessellate(&cfg, &mut run)?,
        Command::Artwork => cmd_artwork(&cfg, &mut run)?,
        Command::Feedfit { horn } => cmd_feedfit(&cfg, horn.as_deref(), &mut run)?,
        Command::Gaussproc { input, reference } => cmd_gaussproc(&cfg, input, reference.as_deref(), &mut run)?,
        Command::Timegate { input } => cmd_timegate(&cfg, input, &mut run)?,
        Command::Estimate => cmd_estimate(&cfg, &mut run)?,
    };
    run.finish(outcome)?;
    Ok(outcome)
}

/// Output bookkeeping for one command.
pub struct Run<'a> {
    command: &'static str,
    config: &'a ProjectConfig,
    dir: PathBuf,
    inputs: Vec<String>,
    outputs: Vec<String>,
    summary: serde_json::Value,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    schema: &'static str,
    version: &'static str,
    command: &'static str,
    status: &'static str,
    config: &'a ProjectConfig,
    inputs: &'a [String],
    outputs: &'a [String],
    summary: &'a serde_json::Value,
}

impl<'a> Run<'a> {
    fn new(command: &'static str, config: &'a ProjectConfig) -> Result<Self> {
        let dir = config.output_dir.clone();
        std::fs::create_dir_all(&dir)?;
        Ok(Self { command, config, dir, inputs: Vec::new(), outputs: Vec::new(), summary: serde_json::Value::Null })
    }

    fn input(&mut self, p: &Path) {
        self.inputs.push(p.display().to_string());
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), contents)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn write_csv(&mut self, name: &str, schema: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let text = csv_text(schema, header, rows)?;
        self.write(name, &text)
    }

    fn finish(self, outcome: Outcome) -> Result<()> {
        let side = Sidecar {
            schema: RUN_SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            status: match outcome {
                Outcome::Ok => "ok",
                Outcome::Infeasible => "infeasible",
            },
            config: self.config,
            inputs: &self.inputs,
            outputs: &self.outputs,
            summary: &self.summary,
        };
        let text = serde_json::to_string_pretty(&side)? + "\n";
        std::fs::write(self.dir.join(format!("{}.run.json", self.command)), text)?;
        Ok(())
    }
}

/// CSV body preceded by a `# <schema> fssdome <version>` line.
pub fn csv_text(schema: &str, header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let mut out = String::new();
    let _ = writeln!(out, "# {schema} fssdome {}", env!("CARGO_PKG_VERSION"));
    out.push_str(&String::from_utf8(body).map_err(|e| Error::DataFormat(e.to_string()))?);
    Ok(out)
}

/// Shortest round-trip text; scientific for very small or large magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn sparam_rows(s: &SparamSpectrum) -> Vec<Vec<String>> {
    (0..s.len()).map(|i| vec![num(s.freqs[i]), num(s.s11[i].re), num(s.s11[i].im), num(s.s21[i].re), num(s.s21[i].im)]).collect()
}

const SPARAM_HEADER: [&str; 5] = ["freq_hz", "re_s11", "im_s11", "re_s21", "im_s21"];
const TRACE_HEADER: [&str; 3] = ["freq_hz", "re_s21", "im_s21"];

fn stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "input".into())
}

fn cmd_synth(cfg: &ProjectConfig, run: &mut Run) -> Result<Outcome> {
    let s = &cfg.synth;
    let res = synthesize_lc(&s.target, &cfg.stack.template(), &s.c_axis, &s.l_axis)?;
    let rows: Vec<Vec<String>> =
        res.candidates.iter().map(|c| vec![num(c.c_farads), num(c.l_henries), num(c.score_db), c.feasible.to_string()]).collect();
    run.write_csv("synth.csv", "fssdome.synth/1", &["c_farads", "l_henries", "score_db", "feasible"], &rows)?;
    let feasible = res.candidates.iter().filter(|c| c.feasible).count();
    run.summary = serde_json::json!({ "feasible": res.feasible, "feasible_count": feasible, "best": res.best() });
    match res.best() {
        Some(b) if res.feasible => {
            println!("best C = {:.4e} F, L = {:.4e} H ({feasible} feasible of {})", b.c_farads, b.l_henries, res.candidates.len());
            Ok(Outcome::Ok)
        }
        _ => {
            println!("no (C, L) pair meets the target");
            Ok(Outcome::Infeasible)
        }
    }
}

fn cmd_response(cfg: &ProjectConfig, run: &mut Run) -> Result<Outcome> {
    let stack = cfg.stack.build()?;
    let freqs = cfg.sweep.grid()?;
    let resp = stack_response(&stack, &freqs)?;
    run.write_csv("response.csv", "fssdome.sparams/1", &SPARAM_HEADER, &sparam_rows(&resp))?;
    if let Some(theta) = cfg.sweep.theta_deg {
        for pol in cfg.sweep.pol.polarizations() {
            let r = stack_response_oblique(&stack, &freqs, theta.to_radians(), pol)?;
            let name = format!("response_{}_{}deg.csv", serde_json::to_value(pol)?.as_str().unwrap_or("pol"), theta);
            run.write_csv(&name, "fssdome.sparams/1", &SPARAM_HEADER, &sparam_rows(&r))?;
        }
    }
    let db = resp.s21_db();
    let peak = db.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    run.summary = serde_json::json!({ "points": freqs.len(), "max_s21_db": peak, "symmetric": resp.symmetric });
    println!("{} points, max |S21| {peak:.3} dB", freqs.len());
    Ok(Outcome::Ok)
}

/// Hemisphere-with-skirt tessellation of every configured layer.
pub fn build_layers(cfg: &ProjectConfig) -> Result<Vec<GoldbergTessellation>> {
    let t = &cfg.tessellation;
    if t.layer_radii_mm.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Usage("tessellation.layer_radii_mm must be increasing".into()));
    }
    use rayon::prelude::*;
    t.layer_radii_mm
        .par_iter()
        .map(|&r| {
            let spec = GoldbergSpec::new(t.m, r);
            spec.validate().map_err(|e| Error::Usage(e.to_string()))?;
            hemisphere_with_skirt(&build_goldberg(&spec)?, t.skirt_height_mm)
        })
        .collect()
}

/// Histogram bins per mm.
const HIST_BINS_PER_MM: f64 = 10.0;

fn cmd_tessellate(cfg: &ProjectConfig, run: &mut Run) -> Result<Outcome> {
    let layers = build_layers(cfg)?;
    let mut stats = Vec::new();
    let mut hist_rows = Vec::new();
    for (i, t) in layers.iter().enumerate() {
        let file = TessellationFile::from_tessellation(t);
        run.write(&format!("tessellation_layer{i}.json"), &(serde_json::to_string_pretty(&file)? + "\n"))?;
        let (pent, hex) = t.counts();
        let section = irreducible_section(t)?;
        let p2: Vec<f64> = t.hexagons().filter_map(|c| c.p2).collect();
        let (lo, hi) = t.p2_range().unwrap_or((0.0, 0.0));
        let bin = |v: f64| (v * HIST_BINS_PER_MM).floor() as i64;
        for b in bin(lo)..=bin(hi) {
            let (a, z) = (b as f64 / HIST_BINS_PER_MM, (b + 1) as f64 / HIST_BINS_PER_MM);
            let n = p2.iter().filter(|&&v| bin(v) == b).count();
            hist_rows.push(vec![num(t.radius()), num(a), num(z), n.to_string()]);
        }
        stats.push(serde_json::json!({
            "layer": i,
            "radius_mm": t.radius(),
            "pentagons": pent,
            "hexagons": hex,
            "vertices": t.vertices.len(),
            "edges": t.edges.len(),
            "euler_characteristic": t.euler_characteristic(),
            "skirt_rings": t.skirt_rings,
            "p2_min_mm": lo,
            "p2_max_mm": hi,
            "section_cells": section.cell_ids.len(),
        }));
        println!("layer {i}: r = {} mm, {pent} pentagons, {hex} hexagons, p2 [{lo:.3}, {hi:.3}] mm", t.radius());
    }
    run.write_csv("p2_histogram.csv", "fssdome.p2hist/1", &["radius_mm", "bin_lo_mm", "bin_hi_mm", "count"], &hist_rows)?;
    run.summary = serde_json::Value::Array(stats);
    Ok(Outcome::Ok)
}

fn cmd_artwork(cfg: &ProjectConfig, run: &mut Run) -> Result<Outcome> {
    let format: ExportFormat = cfg.artwork.format.parse()?;
    if cfg.tessellation.layer_radii_mm.len() != LayerId::ALL.len() {
        return Err(Error::Usage(format!("artwork needs exactly {} layer radii", LayerId::ALL.len())));
    }
    let params = cfg.artwork.params()?;
    if let Some(p) = cfg.artwork.override_table.as_deref().filter(|p| *p != config::TABLE_ONE) {
        run.input(Path::new(p));
    }
    let tess = build_layers(cfg)?;
    use rayon::prelude::*;
    let layers = LayerId::ALL.par_iter().zip(tess.par_iter()).map(|(&id, t)| build_layer(t, id, &params)).collect::<Result<Vec<_>>>()?;
    for (id, text) in export(&layers, format)? {
        let name = match format {
            ExportFormat::GeometryJson => format!("artwork.{}", format.extension()),
            _ => format!("artwork_{}.{}", id.name(), format.extension()),
        };
        run.write(&name, &text)?;
    }
    let reports: Vec<DrcReport> = layers.par_iter().map(|l| drc_check(l, cfg.artwork.min_width_mm, cfg.artwork.min_gap_mm)).collect();
    run.write("drc.json", &(serde_json::to_string_pretty(&reports)? + "\n"))?;
    let violations: usize = reports.iter().map(|r| r.violations.len()).sum();
    let traces: Vec<usize> = layers.iter().map(|l| l.traces.len()).collect();
    run.summary = serde_json::json!({ "traces": traces, "drc_violations": violations });
    println!("{} traces, {violations} DRC violations", traces.iter().sum::<usize>());
    Ok(if violations == 0 { Outcome::Ok } else { Outcome::Infeasible })
}

fn cmd_feedfit(cfg: &ProjectConfig, horn: Option<&Path>, run: &mut Run) -> Result<Outcome> {
    let path = horn
        .map(Path::to_path_buf)
        .or_else(|| cfg.feed.horn_csv.clone())
        .ok_or_else(|| Error::Usage("feedfit needs --horn or feed.horn_csv".into()))?;
    run.input(&path);
    let data = HornData::from_csv_path(&path).map_err(|e| input_error(&path.display().to_string(), e))?;
    let fit = fit_q(&data, cfg.feed.literal_a9)?;
    let rows: Vec<Vec<String>> =
        fit.iter().map(|p| vec![num(p.freq_hz), opt(p.q_dir), opt(p.q_bw), opt(p.q_avg), p.flagged().to_string()]).collect();
    let name = format!("{}_q.csv", stem(&path));
    run.write_csv(&name, "fssdome.qfit/1", &["freq_hz", "q_dir", "q_bw", "q_avg", "flagged"], &rows)?;
    let flagged = fit.iter().filter(|p| p.flagged()).count();
    run.summary = serde_json::json!({ "points": fit.len(), "flagged": flagged });
    println!("{} frequencies, {flagged} flagged", fit.len());
    Ok(Outcome::Ok)
}

fn read_farfield(path: &Path) -> Result<FarFieldGrid> {
    FarFieldGrid::from_csv_path(path).map_err(|e| input_error(&path.display().to_string(), e))
}

fn cmd_gaussproc(cfg: &ProjectConfig, input: &Path, reference: Option<&Path>, run: &mut Run) -> Result<Outcome> {
    run.input(input);
    let meas = read_farfield(input)?;
    let spec = cfg.postproc.gaussian();
    let ffg = gaussian_farfield(&spec, &meas)?;
    let with = gaussian_weighting(&meas, &ffg)?;
    let rows: Vec<Vec<String>> = meas.freqs.iter().zip(&with).map(|(f, s)| vec![num(*f), num(s.re), num(s.im)]).collect();
    run.write_csv(&format!("{}_gaussian.csv", stem(input)), "fssdome.trace/1", &TRACE_HEADER, &rows)?;
    let mut flagged = 0;
    if let Some(r) = reference {
        run.input(r);
        let cal = read_farfield(r)?;
        if !cal.same_grid(&meas) {
            return Err(Error::Alignment("reference scan is on a different grid".into()));
        }
        let without = gaussian_weighting(&cal, &ffg)?;
        let norm = normalize_calibration(&with, &without)?;
        flagged = norm.iter().filter(|v| v.is_none()).count();
        let rows: Vec<Vec<String>> = meas.freqs.iter().zip(&norm).map(|(f, v)| vec![num(*f), opt(*v)]).collect();
        run.write_csv(&format!("{}_normalized.csv", stem(input)), "fssdome.norm/1", &["freq_hz", "norm_db"], &rows)?;
    }
    run.summary = serde_json::json!({ "frequencies": meas.freqs.len(), "flagged_calibration": flagged });
    println!("{} frequencies weighted with w0 = {} mm", meas.freqs.len(), spec.w0_mm);
    Ok(Outcome::Ok)
}

fn cmd_timegate(cfg: &ProjectConfig, input: &Path, run: &mut Run) -> Result<Outcome> {
    run.input(input);
    let trace = SweepTrace::from_csv_path(input).map_err(|e| input_error(&input.display().to_string(), e))?;
    let p = &cfg.postproc;
    let gated = time_gate(&trace, p.gate_ns, p.gate_center(), p.gate_shape)?;
    let t = &gated.trace;
    let rows: Vec<Vec<String>> = t.freqs.iter().zip(&t.s21).map(|(f, s)| vec![num(*f), num(s.re), num(s.im)]).collect();
    run.write_csv(&format!("{}_gated.csv", stem(input)), "fssdome.trace/1", &TRACE_HEADER, &rows)?;
    run.summary = serde_json::json!({ "center_ns": gated.center_ns, "window_ns": gated.window_ns, "shape": gated.shape });
    println!("gate {} ns centered at {:.4} ns", gated.window_ns, gated.center_ns);
    Ok(Outcome::Ok)
}

fn cmd_estimate(cfg: &ProjectConfig, run: &mut Run) -> Result<Outcome> {
    let stack = cfg.stack.build()?;
    let freqs = cfg.sweep.grid()?;
    let e = &cfg.estimator;
    let shell = e.shell(stack.clone());
    let feed = FeedSpec::boresight(cfg.feed.q)?;
    let bore = boresight_transmission(&shell, &feed, &shell.center, &freqs)?;
    let cell = stack_response(&stack, &freqs)?.s21_db();
    let rows: Vec<Vec<String>> = freqs.iter().zip(bore.iter().zip(&cell)).map(|(f, (b, c))| vec![num(*f), num(*b), num(*c)]).collect();
    run.write_csv("estimate_boresight.csv", "fssdome.estimate/1", &["freq_hz", "norm_db", "unit_cell_db"], &rows)?;
    let probes = e.probes();
    let sweeps = scanned_sweep(&shell, cfg.feed.q, &probes, &freqs)?;
    let mut probe_info = Vec::new();
    for (deg, sweep) in e.theta_probes_deg.iter().zip(&sweeps) {
        let rows: Vec<Vec<String>> =
            sweep.iter().map(|s| vec![num(s.freq_hz), num(s.e_abs_with), num(s.e_abs_without), opt(s.norm_db)]).collect();
        let name = format!("estimate_probe_{deg}deg.csv");
        run.write_csv(&name, "fssdome.estimate/1", &["freq_hz", "e_abs_with", "e_abs_without", "norm_db"], &rows)?;
        if let Some(s) = sweep.first() {
            probe_info.push(serde_json::json!({
                "theta_probe_deg": deg,
                "file": name,
                "surface": s.surface,
                "incidence_deg": s.incidence.to_degrees(),
                "direct_path": s.direct_path,
            }));
        }
    }
    run.summary = serde_json::json!({ "theta_feed_deg": e.theta_feed_deg, "feed_q": cfg.feed.q, "probes": probe_info });
    println!("{} frequencies, {} probes", freqs.len(), sweeps.len());
    Ok(Outcome::Ok)
}

use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use clap::Args;
use hexjet_core::bench::experiments::quad_default_controller;
use hexjet_core::bench::{
    payload_tables, run_matrix, tables_to_csv, tables_to_text, variant_tables, ComparisonReport, ExperimentRecord, MetricSignal, RecordSummary,
};
use hexjet_core::config::{BenchConfig, ConfigDoc, FitConfig, MarginsConfig, SweepConfig};
use hexjet_core::io::{fmt17, write_atomic};
use hexjet_core::lti::freq::{logspace, unwrap};
use hexjet_core::lti::model_file::{write_model, ModelFile};
use hexjet_core::models;
use hexjet_core::par;
use hexjet_core::sysid::{estimate_frequency_response, fit_delayed_tf, open_loop_margins_with, record_sweep, EstimateSpec, MarginOptions, SweepLog};
use serde::Serialize;

use crate::plot::{script, Panel, Series};
use crate::{Common, OUT_ENV};

/// `println!` that tolerates a closed stdout (e.g. piped into `head`).
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

pub enum Outcome {
    Ok,
    /// Finished, but at least one scenario was judged unstable.
    Unstable,
}

pub struct Context {
    pub common: Common,
    pub out: PathBuf,
}

impl Context {
    pub fn new(common: &Common, command: &str) -> Self {
        let out = match &common.out {
            Some(p) => p.clone(),
            None => std::env::var_os(OUT_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("out"))
                .join(command),
        };
        Self {
            common: common.clone(),
            out,
        }
    }

    fn write(&self, rel: impl AsRef<Path>, contents: &str) -> Result<()> {
        let path = self.out.join(rel);
        write_atomic(&path, contents.as_bytes()).with_context(|| format!("writing {}", path.display()))
    }

    /// Loads `--config` (or `default` when absent) and applies `--set`.
    fn doc(&self, default: Option<ConfigDoc>) -> Result<ConfigDoc> {
        let mut doc = match (&self.common.config, default) {
            (Some(p), _) => ConfigDoc::load(p)?,
            (None, Some(d)) => d,
            (None, None) => bail!("--config is required for this command"),
        };
        doc.set_all(&self.common.overrides)?;
        Ok(doc)
    }

    fn origin(&self) -> PathBuf {
        self.common.config.clone().unwrap_or_else(|| PathBuf::from("<defaults>"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bench {
    Step,
    Dist,
    Payload,
}

fn default_bench(kind: Bench) -> Result<ConfigDoc> {
    let (experiment, delays, payloads) = match kind {
        Bench::Step => ("tracking", "[0, 5, 10, 25]", "[0.0]"),
        Bench::Dist => ("disturbance", "[5, 10]", "[0.0]"),
        Bench::Payload => ("disturbance", "[5, 10]", "[0.0, 0.4]"),
    };
    let text = format!(
        "[experiment]\nkind = \"{experiment}\"\n[matrix]\nvariants = [\"baseline\", \"smith\", \"state\"]\ndelays = {delays}\npayloads = {payloads}\n"
    );
    let mut root: toml::Table = text.parse()?;
    root.insert("controller".into(), toml::Value::try_from(quad_default_controller())?);
    Ok(ConfigDoc::from_table(root))
}

pub fn bench(ctx: &Context, kind: Bench) -> Result<Outcome> {
    let doc = ctx.doc(Some(default_bench(kind)?))?;
    run_scenarios(ctx, &doc, kind == Bench::Payload)
}

pub fn simulate(ctx: &Context) -> Result<Outcome> {
    let doc = ctx.doc(None)?;
    run_scenarios(ctx, &doc, false)
}

fn run_scenarios(ctx: &Context, doc: &ConfigDoc, payload_report: bool) -> Result<Outcome> {
    let cfg = BenchConfig::from_doc(doc)?;
    let mut scenarios = cfg.scenarios(&ctx.origin())?;
    if scenarios.is_empty() {
        eprintln!("warning: the configuration defines no scenarios; nothing to do");
        return Ok(Outcome::Ok);
    }
    if let Some(seed) = ctx.common.seed {
        for s in &mut scenarios {
            s.seed = seed;
        }
    }
    let results = par::with_jobs(ctx.common.jobs, || run_matrix(&scenarios));
    let mut records = Vec::with_capacity(results.len());
    for (s, r) in scenarios.iter().zip(results) {
        records.push(r.with_context(|| format!("scenario '{}'", s.name))?);
    }
    let mut jsonl = String::new();
    for r in &records {
        say!("{}", r.summary_line());
        ctx.write(Path::new("traces").join(format!("{}.csv", r.summary.name)), &r.trace.to_csv())?;
        jsonl.push_str(&r.summary_json());
        jsonl.push('\n');
    }
    ctx.write("metrics.jsonl", &jsonl)?;
    let summaries: Vec<RecordSummary> = records.iter().map(|r| r.summary.clone()).collect();
    write_tables(ctx, "report", &variant_tables(&summaries)?)?;
    if payload_report {
        write_tables(ctx, "payload_report", &payload_tables(&summaries)?)?;
    }
    ctx.write("plot.gp", &trace_plot(&records))?;
    say!("wrote {} scenarios to {}", records.len(), ctx.out.display());
    Ok(if records.iter().all(ExperimentRecord::stable) {
        Outcome::Ok
    } else {
        Outcome::Unstable
    })
}

fn write_tables(ctx: &Context, stem: &str, tables: &[ComparisonReport]) -> Result<()> {
    if tables.is_empty() {
        return Ok(());
    }
    let text = tables_to_text(tables);
    say!("\n{text}");
    ctx.write(format!("{stem}.csv"), &tables_to_csv(tables))?;
    ctx.write(format!("{stem}.txt"), &text)
}

/// One panel per (delay, payload) group: attitude in degrees for tracking
/// runs, rate error for disturbance runs.
fn trace_plot(records: &[ExperimentRecord]) -> String {
    let mut panels: Vec<((usize, u64), Panel)> = Vec::new();
    for r in records {
        let s = &r.summary;
        let key = (s.added_delay, s.payload_fraction.to_bits());
        if !panels.iter().any(|(k, _)| *k == key) {
            let title = format!("h = {} samples, payload {:.0}%", s.added_delay, 100.0 * s.payload_fraction);
            let panel = match s.signal {
                MetricSignal::Attitude => {
                    let mut p = Panel::new(title, "time (s)", "roll (deg)");
                    p.series.push(Series::new(format!("traces/{}.csv", s.name), "1:($2*180/pi)", "setpoint"));
                    p
                }
                MetricSignal::Rate => {
                    let mut p = Panel::new(title, "time (s)", "rate error (rad/s)");
                    p.series.push(Series::new(format!("traces/{}.csv", s.name), "1:8", "disturbance"));
                    p
                }
            };
            panels.push((key, panel));
        }
        let panel = &mut panels.iter_mut().find(|(k, _)| *k == key).expect("panel exists").1;
        let using = match s.signal {
            MetricSignal::Attitude => "1:($3*180/pi)",
            MetricSignal::Rate => "1:($4-$5)",
        };
        panel.series.push(Series::new(format!("traces/{}.csv", s.name), using, s.name.clone()));
    }
    let panels: Vec<Panel> = panels.into_iter().map(|(_, p)| p).collect();
    script("traces.png", &panels)
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Metrics file (JSON lines). Repeatable; records are concatenated.
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    /// Compare everything against the record with this name instead of
    /// grouping by delay and payload.
    #[arg(long)]
    pub baseline: Option<String>,
    /// Group by variant and delay, comparing against the payload-free record.
    #[arg(long, conflicts_with = "baseline")]
    pub payload: bool,
}

pub fn report(ctx: &Context, args: &ReportArgs) -> Result<Outcome> {
    let mut records: Vec<RecordSummary> = Vec::new();
    for path in &args.inputs {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let r = serde_json::from_str(line).with_context(|| format!("{}:{}: not a metrics record", path.display(), i + 1))?;
            records.push(r);
        }
    }
    let tables = match &args.baseline {
        Some(name) => {
            let idx = records
                .iter()
                .position(|r| &r.name == name)
                .with_context(|| format!("no record named '{name}'"))?;
            vec![hexjet_core::bench::compare_report(&records, idx)?]
        }
        None if args.payload => payload_tables(&records)?,
        None => variant_tables(&records)?,
    };
    if tables.is_empty() {
        bail!("no group holds two or more comparable records");
    }
    write_tables(ctx, "report", &tables)?;
    Ok(Outcome::Ok)
}

pub fn sysid_sweep(ctx: &Context) -> Result<Outcome> {
    let doc = ctx.doc(None)?;
    let mut cfg: SweepConfig = doc.typed()?;
    if let Some(seed) = ctx.common.seed {
        cfg.seed = seed;
    }
    let (name, plant) = cfg.model.resolve(&doc.base_dir())?;
    let log = record_sweep(&plant, &cfg.sweep, cfg.output_noise_std, cfg.seed)?;
    ctx.write("sweep.csv", &log.render())?;
    let mut u = Panel::new(format!("sweep input, {name}"), "time (s)", "input");
    u.series.push(Series::new("sweep.csv", "1:2", "input"));
    let mut y = Panel::new("response", "time (s)", "output");
    y.series.push(Series::new("sweep.csv", "1:3", "output"));
    ctx.write("plot.gp", &script("sweep.png", &[u, y]))?;
    say!(
        "{name}: {} samples at Ts = {} s, {} to {} Hz, written to {}",
        log.input.len(),
        log.sample_time,
        cfg.sweep.f_start,
        cfg.sweep.f_end,
        ctx.out.join("sweep.csv").display()
    );
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct FitSummary<'a> {
    name: &'a str,
    delay_samples: usize,
    numerator: &'a [f64],
    denominator: &'a [f64],
    sample_time: f64,
    poles: Vec<[f64; 2]>,
    stable: bool,
    residual: f64,
    bins_used: usize,
    /// (delay, residual) per candidate.
    candidates: &'a [(usize, f64)],
}

pub fn sysid_fit(ctx: &Context) -> Result<Outcome> {
    let doc = ctx.doc(None)?;
    let cfg: FitConfig = doc.typed()?;
    let log_path = doc.base_dir().join(&cfg.log);
    let log = SweepLog::read(&log_path).with_context(|| format!("reading sweep log {}", log_path.display()))?;
    let est = EstimateSpec {
        sample_time: log.sample_time,
        nperseg: cfg.estimate.nperseg,
        overlap: cfg.estimate.overlap,
    };
    let fr = estimate_frequency_response(&log.input, &log.output, &est)?;
    let fit = fit_delayed_tf(&fr, &cfg.fit, log.sample_time)?;
    let name = cfg.name.as_deref().unwrap_or("fit");
    let m = &fit.model;
    write_model(&ctx.out.join("model.toml"), Some(name), m)?;

    let fitted = m.frequency_response(fr.frequencies())?;
    let (mag, ph) = (fr.magnitude_db(), fr.phase_deg_unwrapped());
    let (fmag, fph) = (fitted.magnitude_db(), fitted.phase_deg_unwrapped());
    let coh = fr.coherence().map(<[f64]>::to_vec).unwrap_or_else(|| vec![f64::NAN; fr.len()]);
    let mut csv = String::from("frequency_hz,magnitude_db,phase_deg,coherence,fit_magnitude_db,fit_phase_deg\n");
    for i in 0..fr.len() {
        let row = [fr.frequencies()[i], mag[i], ph[i], coh[i], fmag[i], fph[i]].map(fmt17);
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    ctx.write("frequency_response.csv", &csv)?;
    let summary = FitSummary {
        name,
        delay_samples: m.delay_samples(),
        numerator: m.numerator(),
        denominator: m.denominator(),
        sample_time: m.sample_time(),
        poles: fit.poles.iter().map(|p| [p.re, p.im]).collect(),
        stable: fit.stable,
        residual: fit.residual,
        bins_used: fit.bins_used,
        candidates: &fit.candidates,
    };
    ctx.write("fit.json", &(serde_json::to_string_pretty(&summary)? + "\n"))?;

    let mut pm = Panel::new(format!("frequency response, {name}"), "frequency (Hz)", "magnitude (dB)");
    pm.logx = true;
    pm.series.push(Series::new("frequency_response.csv", "1:2", "estimate"));
    pm.series.push(Series::new("frequency_response.csv", "1:5", "fit"));
    let mut pp = Panel::new("phase", "frequency (Hz)", "phase (deg)");
    pp.logx = true;
    pp.series.push(Series::new("frequency_response.csv", "1:3", "estimate"));
    pp.series.push(Series::new("frequency_response.csv", "1:6", "fit"));
    let mut pc = Panel::new("coherence", "frequency (Hz)", "coherence");
    pc.logx = true;
    pc.series.push(Series::new("frequency_response.csv", "1:4", "coherence"));
    ctx.write("plot.gp", &script("bode.png", &[pm, pp, pc]))?;

    say!("{}", ModelFile::from_tf(Some(name), m).render().trim_end());
    say!(
        "# residual {:.4e}, {} bins, poles {}, {}",
        fit.residual,
        fit.bins_used,
        fit.poles.iter().map(|p| format!("{:.6}{:+.6}i", p.re, p.im)).collect::<Vec<_>>().join(" "),
        if fit.stable { "stable" } else { "unstable" }
    );
    Ok(Outcome::Ok)
}

pub fn margins(ctx: &Context) -> Result<Outcome> {
    let doc = ctx.doc(None)?;
    let cfg: MarginsConfig = doc.typed()?;
    let (name, model) = cfg.model.resolve(&doc.base_dir())?;
    let l = model.scaled(cfg.gain).with_delay(model.delay_samples() + cfg.added_delay);
    let opts = MarginOptions {
        f_min: cfg.grid.f_min,
        points: cfg.grid.points,
        ..MarginOptions::default()
    };
    let report = open_loop_margins_with(&l, &opts)?;
    ctx.write("margins.json", &(serde_json::to_string_pretty(&report)? + "\n"))?;

    let f = logspace(cfg.grid.f_min, l.nyquist(), 2000);
    let fr = l.frequency_response(&f)?;
    let phase = unwrap(&fr.gains().iter().map(|g| g.arg()).collect::<Vec<_>>());
    let mut csv = String::from("frequency_hz,magnitude_db,phase_deg\n");
    for ((f, m), p) in f.iter().zip(fr.magnitude_db()).zip(phase) {
        csv.push_str(&format!("{},{},{}\n", fmt17(*f), fmt17(m), fmt17(p.to_degrees())));
    }
    ctx.write("bode.csv", &csv)?;
    let mut pm = Panel::new(format!("open loop {} x {name}", cfg.gain), "frequency (Hz)", "magnitude (dB)");
    pm.logx = true;
    pm.series.push(Series::new("bode.csv", "1:2", "|L|"));
    let mut pp = Panel::new("phase", "frequency (Hz)", "phase (deg)");
    pp.logx = true;
    pp.series.push(Series::new("bode.csv", "1:3", "arg L"));
    ctx.write("plot.gp", &script("margins.png", &[pm, pp]))?;

    let show = |v: Option<f64>| v.map_or("absent".to_string(), |v| format!("{v:.4}"));
    say!("loop = {} * {name}, delay {} samples, Ts {} s", cfg.gain, l.delay_samples(), l.sample_time());
    say!("crossover_hz = {}", show(report.crossover_hz));
    say!("phase_margin_deg = {}", show(report.phase_margin_deg));
    say!("phase_crossing_hz = {}", show(report.phase_crossing_hz));
    say!("gain_margin_db = {}", show(report.gain_margin_db));
    say!("cutoff_hz = {}", show(report.cutoff_hz));
    Ok(Outcome::Ok)
}

pub fn models() -> Result<Outcome> {
    for (name, tf) in models::catalogue() {
        say!("# {name}");
        say!("{}", ModelFile::from_tf(Some(name), &tf).render());
    }
    let ss = models::quad_roll_ss();
    say!("# quad_roll_ss");
    let rows = |m: &nalgebra::DMatrix<f64>| {
        (0..m.nrows())
            .map(|i| format!("[{}]", m.row(i).iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(", ")))
            .collect::<Vec<_>>()
            .join(", ")
    };
    say!("name = \"quad_roll_ss\"");
    say!("a = [{}]", rows(ss.a()));
    say!("b = [{}]", rows(ss.b()));
    say!("c = [{}]", rows(ss.c()));
    say!("d = [{}]", rows(ss.d()));
    say!("delay_samples = {}", ss.delay_samples());
    say!("sample_time = {}", ss.sample_time());
    Ok(Outcome::Ok)
}

//! Run configuration: TOML files with an `include` key, dotted `key=value`
//! overrides, and the typed schemas consumed by the command-line front end.
//! The schema is documented in `docs/config.md`.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use toml::{Table, Value};

use crate::bench::experiments::{DISTURBANCE_AMPLITUDE, EXPERIMENT_DURATION};
use crate::bench::{ControllerConfig, DisturbanceSpec, DoubletSpec, InstabilityCriteria, MetricSignal, PlantSpec, Scenario};
use crate::control::PredictorChoice;
use crate::error::{Error, Result};
use crate::lti::model_file::ModelFile;
use crate::lti::DelayedTransferFunction;
use crate::models;
use crate::sysid::{FitSpec, MarginOptions, SweepSpec};

/// A configuration tree after includes and overrides are applied.
#[derive(Debug, Clone)]
pub struct ConfigDoc {
    pub root: Table,
    /// File the tree was loaded from, if any.
    pub origin: Option<PathBuf>,
    /// Text of `origin` when the tree is exactly that file, used for
    /// line-accurate diagnostics.
    text: Option<String>,
}

impl ConfigDoc {
    pub fn empty() -> Self {
        Self {
            root: Table::new(),
            origin: None,
            text: None,
        }
    }

    /// Tree built in code, e.g. shipped defaults.
    pub fn from_table(root: Table) -> Self {
        Self {
            root,
            origin: None,
            text: None,
        }
    }

    /// Loads `path`, resolving `include` relative to each including file.
    pub fn load(path: &Path) -> Result<Self> {
        let mut seen = HashSet::new();
        let (root, had_include) = load_tree(path, &mut seen)?;
        let text = if had_include { None } else { std::fs::read_to_string(path).ok() };
        Ok(Self {
            root,
            origin: Some(path.to_path_buf()),
            text,
        })
    }

    pub fn parse_str(text: &str, origin: &Path) -> Result<Self> {
        let root: Table = text.parse().map_err(|e: toml::de::Error| Error::config(origin, e.to_string()))?;
        if root.contains_key("include") {
            return Err(Error::config(origin, "include is only supported for files on disk"));
        }
        Ok(Self {
            root,
            origin: Some(origin.to_path_buf()),
            text: Some(text.to_owned()),
        })
    }

    /// Directory that relative paths inside the config resolve against.
    pub fn base_dir(&self) -> PathBuf {
        self.origin
            .as_deref()
            .and_then(Path::parent)
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."))
    }

    fn origin_label(&self) -> PathBuf {
        self.origin.clone().unwrap_or_else(|| PathBuf::from("<defaults>"))
    }

    /// Applies one `dotted.key=value` override. The value is read as a TOML
    /// value and falls back to a bare string.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let label = PathBuf::from("--set");
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::config(&label, format!("expected key=value, got '{assignment}'")))?;
        let key = key.trim();
        let parts: Vec<&str> = key.split('.').collect();
        if key.is_empty() || parts.iter().any(|p| p.is_empty()) {
            return Err(Error::config(&label, format!("malformed key '{key}'")));
        }
        let value = parse_value(raw.trim());
        let mut table = &mut self.root;
        for (i, part) in parts.iter().enumerate() {
            if i + 1 == parts.len() {
                table.insert((*part).to_owned(), value);
                break;
            }
            let entry = table.entry((*part).to_owned()).or_insert_with(|| Value::Table(Table::new()));
            table = match entry {
                Value::Table(t) => t,
                _ => {
                    return Err(Error::config(&label, format!("'{}' is not a table", parts[..=i].join("."))));
                }
            };
        }
        self.text = None;
        Ok(())
    }

    pub fn set_all<S: AsRef<str>>(&mut self, assignments: &[S]) -> Result<()> {
        for a in assignments {
            self.set(a.as_ref())?;
        }
        Ok(())
    }

    /// Deserializes the whole tree into `T`. Errors name the offending
    /// field path, plus line and column when the tree is a single file.
    pub fn typed<T: DeserializeOwned>(&self) -> Result<T> {
        if let Some(text) = &self.text {
            return toml::from_str(text).map_err(|e| Error::config(self.origin_label(), e.to_string().trim_end().to_owned()));
        }
        from_table(self.root.clone(), &self.origin_label())
    }
}

fn from_table<T: DeserializeOwned>(table: Table, origin: &Path) -> Result<T> {
    serde_path_to_error::deserialize(Value::Table(table)).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::config(origin, format!("field '{path}': {}", inner.message()))
    })
}

fn parse_value(raw: &str) -> Value {
    match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.to_owned())),
        Err(_) => Value::String(raw.to_owned()),
    }
}

fn load_tree(path: &Path, seen: &mut HashSet<PathBuf>) -> Result<(Table, bool)> {
    let canonical = path.canonicalize().map_err(|e| Error::config(path, e.to_string()))?;
    if !seen.insert(canonical.clone()) {
        return Err(Error::config(path, "include cycle"));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::config(path, e.to_string()))?;
    let mut own: Table = text.parse().map_err(|e: toml::de::Error| Error::config(path, e.to_string().trim_end().to_owned()))?;
    let includes = match own.remove("include") {
        None => Vec::new(),
        Some(Value::String(s)) => vec![s],
        Some(Value::Array(items)) => items
            .into_iter()
            .map(|v| match v {
                Value::String(s) => Ok(s),
                other => Err(Error::config(path, format!("include entries must be strings, got {other}"))),
            })
            .collect::<Result<_>>()?,
        Some(other) => return Err(Error::config(path, format!("include must be a string or array, got {other}"))),
    };
    let had_include = !includes.is_empty();
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut merged = Table::new();
    for inc in includes {
        let (t, _) = load_tree(&dir.join(&inc), seen)?;
        merge(&mut merged, t);
    }
    merge(&mut merged, own);
    seen.remove(&canonical);
    Ok((merged, had_include))
}

/// Deep merge; tables merge key by key, anything else in `top` replaces.
fn merge(base: &mut Table, top: Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Which standard experiment a matrix expands to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Tracking,
    Disturbance,
}

impl ExperimentKind {
    fn tag(self) -> &'static str {
        match self {
            ExperimentKind::Tracking => "step",
            ExperimentKind::Disturbance => "dist",
        }
    }
}

/// Settings shared by every scenario of a matrix.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub plant: PlantSpec,
    /// Defaults to the 15° doublet for tracking.
    #[serde(default)]
    pub setpoint: Option<DoubletSpec>,
    /// Defaults to a 0.1 doublet at the controller output for disturbance runs.
    #[serde(default)]
    pub disturbance: Option<DisturbanceSpec>,
    #[serde(default = "default_duration")]
    pub duration: f64,
    #[serde(default)]
    pub window: Option<f64>,
    #[serde(default)]
    pub metric: Option<MetricSignal>,
    #[serde(default)]
    pub noise_std: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub instability: InstabilityCriteria,
}

fn default_duration() -> f64 {
    EXPERIMENT_DURATION
}

/// Cartesian product expanded into scenarios, payload-major then delay.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig {
    pub variants: Vec<PredictorChoice>,
    pub delays: Vec<usize>,
    #[serde(default = "default_payloads")]
    pub payloads: Vec<f64>,
}

fn default_payloads() -> Vec<f64> {
    vec![0.0]
}

/// Scenario-matrix file used by `simulate` and the `bench-*` commands.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default)]
    pub controller: Option<ControllerConfig>,
    #[serde(default)]
    pub experiment: Option<ExperimentConfig>,
    #[serde(default)]
    pub matrix: Option<MatrixConfig>,
    /// Explicit scenarios, run after the matrix. A missing `controller`
    /// is taken from the top-level block.
    #[serde(default)]
    pub scenario: Vec<Table>,
}

impl BenchConfig {
    pub fn from_doc(doc: &ConfigDoc) -> Result<Self> {
        doc.typed()
    }

    /// Expands the matrix and the explicit scenarios, validating each.
    pub fn scenarios(&self, origin: &Path) -> Result<Vec<Scenario>> {
        let mut out = Vec::new();
        if let Some(m) = &self.matrix {
            let exp = self
                .experiment
                .as_ref()
                .ok_or_else(|| Error::config(origin, "[matrix] needs an [experiment] block"))?;
            let controller = self
                .controller
                .ok_or_else(|| Error::config(origin, "[matrix] needs a [controller] block"))?;
            for &p in &m.payloads {
                for &h in &m.delays {
                    for &v in &m.variants {
                        out.push(expand(exp, &controller, v, h, p));
                    }
                }
            }
        }
        for (i, table) in self.scenario.iter().enumerate() {
            let mut t = table.clone();
            if !t.contains_key("controller") {
                if let Some(c) = &self.controller {
                    let v = Value::try_from(c).map_err(|e| Error::config(origin, e.to_string()))?;
                    t.insert("controller".into(), v);
                }
            }
            let s: Scenario = from_table(t, origin).map_err(|e| match e {
                Error::Config { path, message } => Error::Config {
                    path,
                    message: format!("scenario[{i}]: {message}"),
                },
                other => other,
            })?;
            out.push(s);
        }
        let mut names = HashSet::new();
        for s in &out {
            s.validate().map_err(|e| Error::config(origin, e.to_string()))?;
            if !names.insert(s.name.clone()) {
                return Err(Error::config(origin, format!("duplicate scenario name '{}'", s.name)));
            }
        }
        Ok(out)
    }
}

fn expand(exp: &ExperimentConfig, controller: &ControllerConfig, v: PredictorChoice, h: usize, p: f64) -> Scenario {
    let plant_tag = match &exp.plant {
        PlantSpec::QuadRoll { .. } => String::new(),
        PlantSpec::HexJet { axis, .. } => format!("hexjet{axis}-"),
        PlantSpec::Tf { .. } => "tf-".into(),
    };
    let mut name = format!("{plant_tag}{}-{v}-h{h}", exp.kind.tag());
    if p > 0.0 {
        name.push_str(&format!("-p{:.0}", 100.0 * p));
    }
    let (setpoint, disturbance) = match exp.kind {
        ExperimentKind::Tracking => (Some(exp.setpoint.unwrap_or_else(DoubletSpec::attitude_default)), exp.disturbance),
        ExperimentKind::Disturbance => (
            exp.setpoint,
            Some(exp.disturbance.unwrap_or_else(|| {
                DisturbanceSpec::new(DoubletSpec::with_amplitude(DISTURBANCE_AMPLITUDE), Default::default())
            })),
        ),
    };
    Scenario {
        name,
        plant: exp.plant.clone(),
        variant: v,
        added_delay: h,
        payload_fraction: p,
        setpoint,
        disturbance,
        duration: exp.duration,
        window: exp.window,
        metric: exp.metric,
        noise_std: exp.noise_std,
        seed: exp.seed,
        controller: *controller,
        instability: exp.instability,
    }
}

/// One transfer function named by exactly one of the three fields.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSource {
    /// Built-in plant name, see `hexjet models`.
    #[serde(default)]
    pub builtin: Option<String>,
    /// Model file, relative to the config file.
    #[serde(default)]
    pub file: Option<PathBuf>,
    #[serde(default)]
    pub inline: Option<ModelFile>,
}

impl ModelSource {
    pub fn resolve(&self, base: &Path) -> Result<(String, DelayedTransferFunction)> {
        let here = PathBuf::from("model");
        match (&self.builtin, &self.file, &self.inline) {
            (Some(n), None, None) => models::by_name(n)
                .map(|tf| (n.clone(), tf))
                .ok_or_else(|| Error::config(&here, format!("unknown built-in model '{n}'"))),
            (None, Some(f), None) => {
                let path = base.join(f);
                let (name, tf) = crate::lti::model_file::read_model(&path)?;
                Ok((name.unwrap_or_else(|| f.display().to_string()), tf))
            }
            (None, None, Some(m)) => Ok((m.name.clone().unwrap_or_else(|| "inline".into()), m.to_tf()?)),
            _ => Err(Error::config(&here, "set exactly one of model.builtin, model.file, model.inline")),
        }
    }
}

/// `sysid-sweep`: excite a plant with a logarithmic chirp and log it.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelSource,
    pub sweep: SweepSpec,
    /// Standard deviation of white noise added to the logged output.
    #[serde(default)]
    pub output_noise_std: f64,
    #[serde(default)]
    pub seed: u64,
}

/// Welch settings without the sample time, which comes from the log.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimateConfig {
    pub nperseg: usize,
    pub overlap: f64,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            nperseg: 1024,
            overlap: 0.5,
        }
    }
}

/// `sysid-fit`: estimate and fit a delayed transfer function from a log.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    /// Sweep log, relative to the config file.
    pub log: PathBuf,
    #[serde(default)]
    pub estimate: EstimateConfig,
    pub fit: FitSpec,
    #[serde(default)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarginGrid {
    pub f_min: f64,
    pub points: usize,
}

impl Default for MarginGrid {
    fn default() -> Self {
        let d = MarginOptions::default();
        Self {
            f_min: d.f_min,
            points: d.points,
        }
    }
}

/// `margins`: stability margins of `gain · model` as an open loop.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginsConfig {
    pub model: ModelSource,
    #[serde(default = "unit")]
    pub gain: f64,
    /// Extra delay samples appended to the model.
    #[serde(default)]
    pub added_delay: usize,
    #[serde(default)]
    pub grid: MarginGrid,
}

fn unit() -> f64 {
    1.0
}

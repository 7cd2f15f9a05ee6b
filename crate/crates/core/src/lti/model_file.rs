//! Plain-text model files: TOML key/value pairs describing one delayed
//! transfer function. See `docs/model-file.md`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tf::DelayedTransferFunction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
    #[serde(default)]
    pub delay_samples: usize,
    pub sample_time: f64,
}

impl ModelFile {
    pub fn from_tf(name: Option<&str>, tf: &DelayedTransferFunction) -> Self {
        Self {
            name: name.map(str::to_owned),
            numerator: tf.numerator().to_vec(),
            denominator: tf.denominator().to_vec(),
            delay_samples: tf.delay_samples(),
            sample_time: tf.sample_time(),
        }
    }

    pub fn to_tf(&self) -> Result<DelayedTransferFunction> {
        DelayedTransferFunction::new(
            self.numerator.clone(),
            self.denominator.clone(),
            self.delay_samples,
            self.sample_time,
        )
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(origin, e.to_string()))
    }

    pub fn render(&self) -> String {
        toml::to_string(self).expect("model file serializes")
    }
}

pub fn read_model(path: &Path) -> Result<(Option<String>, DelayedTransferFunction)> {
    let text = std::fs::read_to_string(path)?;
    let mf = ModelFile::parse(&text, path)?;
    let tf = mf.to_tf().map_err(|e| Error::config(path, e.to_string()))?;
    Ok((mf.name, tf))
}

pub fn write_model(path: &Path, name: Option<&str>, tf: &DelayedTransferFunction) -> Result<()> {
    crate::io::write_atomic(path, ModelFile::from_tf(name, tf).render().as_bytes())
}

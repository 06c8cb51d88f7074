//! On-disk JSON representation of a trained model.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Scaler};
use crate::error::{check_dim, Error, Result};
use crate::minimax::{ClassModule, Hyperbox, MpclModel};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassEntry {
    pub class_id: usize,
    pub boxes: Vec<Hyperbox>,
}

/// Per-class outcome of training, without timings so files stay reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSummary {
    pub class_id: usize,
    /// Outer iterations (ccp), epochs (adam) or emitted boxes (greedy).
    pub steps: usize,
    pub final_objective: Option<f64>,
    pub converged: bool,
    pub impure_boxes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub trainer: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub trace_summary: Vec<ClassSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: u32,
    pub n_features: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_names: Option<Vec<String>>,
    pub classes: Vec<ClassEntry>,
    pub metadata: Metadata,
    #[serde(default)]
    pub scaler: Option<Scaler>,
}

impl ModelFile {
    pub fn new(
        model: &MpclModel,
        metadata: Metadata,
        scaler: Option<Scaler>,
        feature_names: Option<Vec<String>>,
    ) -> Self {
        ModelFile {
            format_version: FORMAT_VERSION,
            n_features: model.n_features(),
            feature_names,
            classes: model
                .modules()
                .iter()
                .map(|m| ClassEntry {
                    class_id: m.class_id(),
                    boxes: m.boxes().to_vec(),
                })
                .collect(),
            metadata,
            scaler,
        }
    }

    /// Builds the model and checks every cross-field invariant.
    pub fn model(&self) -> Result<MpclModel> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::InvalidModel(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        let modules = self
            .classes
            .iter()
            .map(|c| ClassModule::new(c.class_id, c.boxes.clone()))
            .collect::<Result<Vec<_>>>()?;
        let model = MpclModel::new(modules)?;
        check_dim(self.n_features, model.n_features())?;
        if let Some(names) = &self.feature_names {
            check_dim(self.n_features, names.len())?;
        }
        if let Some(s) = &self.scaler {
            check_dim(self.n_features, s.mean.len())?;
            check_dim(self.n_features, s.std.len())?;
            if s.mean.iter().any(|v| !v.is_finite()) || s.std.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::InvalidModel(
                    "scaler needs finite means and positive deviations".into(),
                ));
            }
        }
        Ok(model)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        file.model()?;
        Ok(file)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Applies the stored scaler (if any) to raw data.
    pub fn prepare(&self, ds: &Dataset) -> Result<Dataset> {
        check_dim(self.n_features, ds.n_features())?;
        match &self.scaler {
            Some(s) => crate::data::apply_scaler(ds, s),
            None => Ok(ds.clone()),
        }
    }
}

use std::path::Path;

use gsd_core::preference::ScaleSpec;
use gsd_core::stats::Design;
use serde::{Deserialize, Serialize};

use crate::CliError;

fn default_deltas() -> Vec<f64> {
    vec![0.0]
}

fn default_replicates() -> usize {
    199
}

fn default_alpha() -> f64 {
    0.05
}

fn default_design() -> Design {
    Design::Paired
}

fn default_zeta_grid() -> Vec<f64> {
    vec![0.0]
}

/// Analysis settings; the JSON document uses exactly these field names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
    /// Number of permutation replicates `B`.
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_design")]
    pub design: Design,
    #[serde(default = "default_zeta_grid")]
    pub zeta_grid: Vec<f64>,
    #[serde(default)]
    pub epsilon: f64,
    pub metrics: ScaleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subjects: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opponents: Option<Vec<String>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let cfg: RunConfig = crate::read_json(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.deltas.is_empty() {
            return bad("deltas must not be empty".into());
        }
        if let Some(d) = self.deltas.iter().find(|d| !(0.0..1.0).contains(*d)) {
            return bad(format!("delta {d} outside [0, 1)"));
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha {} outside (0, 1)", self.alpha));
        }
        if self.zeta_grid.iter().any(|z| !(0.0..=1.0).contains(z)) || self.zeta_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("zeta_grid must be strictly increasing within [0, 1]".into());
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon {} must be >= 0", self.epsilon));
        }
        let mut names: Vec<&str> = self.metrics.dimensions.iter().map(|d| d.name.as_str()).collect();
        if names.is_empty() {
            return bad("metrics must declare at least one metric".into());
        }
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return bad(format!("metric {} declared twice", w[0]));
        }
        Ok(())
    }
}

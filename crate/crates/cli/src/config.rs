use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use spr_core::extract::ResourcePaths;
use spr_core::learn::{ForestConfig, LinearConfig};
use spr_core::synth::SynthConfig;

use crate::Failure;

/// Optional PSO overrides; unset fields keep the library defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoSection {
    pub swarm_size: Option<usize>,
    pub max_iter: Option<usize>,
    pub inertia: Option<f64>,
    pub inertia_final: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub velocity_clamp: Option<f64>,
    pub inner_folds: Option<usize>,
    pub linear: Option<LinearConfig>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifySection {
    pub k: Option<usize>,
    pub model: Option<String>,
    pub arm: Option<String>,
    pub scale_inputs: Option<bool>,
    pub forest: Option<ForestConfig>,
    pub linear: Option<LinearConfig>,
}

/// Experiment manifest. Paths are relative to the file that holds them.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    /// Absent means the built-in demo resources.
    pub resources: Option<ResourcePaths>,
    pub corpus: Option<PathBuf>,
    pub matrix: Option<PathBuf>,
    pub weights: Option<PathBuf>,
    pub pso: PsoSection,
    pub classify: ClassifySection,
    pub synth: Option<SynthConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Failure::config(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Ok(cfg.relative_to(base))
    }

    fn relative_to(mut self, base: &Path) -> Self {
        let fix = |p: PathBuf| if p.is_relative() { base.join(p) } else { p };
        self.resources = self.resources.map(|r| r.relative_to(base));
        self.corpus = self.corpus.map(fix);
        self.matrix = self.matrix.map(fix);
        self.weights = self.weights.map(fix);
        self
    }
}

//! Pipeline configuration read from TOML, with command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use hmlcr_core::eval::{EvalConfig, FoldOrientation, Method};
use hmlcr_core::vectorize::Weighting;
use hmlcr_core::{Hyperparams, IndexOptions, LanguageProfile};
use serde::Deserialize;

/// Every field has a default, so an empty file is a valid configuration.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Directory holding the source files.
    pub corpus: PathBuf,
    /// Built-in profile name (`java`, `c`) or path to a profile TOML file.
    pub profile: String,
    /// Optional `path<TAB>label` manifest; every file is its own label
    /// without one.
    pub labels: Option<PathBuf>,
    /// `id<TAB>label<TAB>text` query file used by `eval`.
    pub queries: Option<PathBuf>,
    /// Document-frequency bounds for code features.
    pub bounds: Option<(usize, usize)>,
    /// Separate bounds for relationship features.
    pub relationship_bounds: Option<(usize, usize)>,
    pub weighting: Weighting,
    pub hyper: Hyperparams,
    /// Pick the learning rate by the sufficient-decrease search instead of
    /// using `hyper.eta`.
    pub auto_eta: bool,
    pub alpha: f64,
    pub output: PathBuf,
    /// Overrides `hyper.seed` and seeds the fold assignment.
    pub seed: u64,
    pub eval: EvalSettings,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus: PathBuf::from("corpus"),
            profile: "java".into(),
            labels: None,
            queries: None,
            bounds: None,
            relationship_bounds: None,
            weighting: Weighting::TfIdf,
            hyper: Hyperparams::default(),
            auto_eta: false,
            alpha: 0.5,
            output: PathBuf::from("hmlcr-out"),
            seed: 0,
            eval: EvalSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSettings {
    pub methods: Vec<Method>,
    pub folds: usize,
    pub orientation: FoldOrientation,
    pub precision_cutoffs: Vec<usize>,
    pub recall_cutoffs: Vec<usize>,
    pub ndcg_cutoffs: Vec<usize>,
    pub lm_lambda: f64,
    pub lsi_k: Option<usize>,
}

impl Default for EvalSettings {
    fn default() -> Self {
        let d = EvalConfig::default();
        EvalSettings {
            methods: d.methods,
            folds: d.folds,
            orientation: d.orientation,
            precision_cutoffs: d.precision_cutoffs,
            recall_cutoffs: d.recall_cutoffs,
            ndcg_cutoffs: d.ndcg_cutoffs,
            lm_lambda: d.lm_lambda,
            lsi_k: d.lsi_k,
        }
    }
}

impl PipelineConfig {
    /// Parses and validates; relative paths are taken from `base`.
    pub fn from_toml(text: &str, base: &Path) -> anyhow::Result<Self> {
        let mut config: PipelineConfig = toml::from_str(text).map_err(|e| anyhow::anyhow!("{}", e.message()))?;
        config.resolve(base);
        Ok(config)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        PipelineConfig::from_toml(&text, base).with_context(|| format!("invalid config {}", path.display()))
    }

    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.corpus);
        join(&mut self.output);
        if let Some(p) = self.labels.as_mut() {
            join(p);
        }
        if let Some(p) = self.queries.as_mut() {
            join(p);
        }
        if LanguageProfile::builtin(&self.profile).is_none() && Path::new(&self.profile).is_relative() {
            self.profile = base.join(&self.profile).to_string_lossy().into_owned();
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            bail!("alpha must lie in [0, 1], got {}", self.alpha);
        }
        for (name, b) in [
            ("bounds", self.bounds),
            ("relationship_bounds", self.relationship_bounds),
        ] {
            if let Some((lo, hi)) = b {
                if lo == 0 || lo > hi {
                    bail!("{name} must satisfy 1 <= lower <= upper, got ({lo}, {hi})");
                }
            }
        }
        self.hyper().validate()?;
        self.eval_config().validate()?;
        Ok(())
    }

    pub fn hyper(&self) -> Hyperparams {
        Hyperparams {
            seed: self.seed,
            ..self.hyper
        }
    }

    pub fn index_options(&self) -> IndexOptions {
        IndexOptions {
            snippet_bounds: self.bounds,
            relationship_bounds: self.relationship_bounds,
            weighting: self.weighting,
        }
    }

    pub fn eval_config(&self) -> EvalConfig {
        let e = &self.eval;
        EvalConfig {
            methods: e.methods.clone(),
            precision_cutoffs: e.precision_cutoffs.clone(),
            recall_cutoffs: e.recall_cutoffs.clone(),
            ndcg_cutoffs: e.ndcg_cutoffs.clone(),
            folds: e.folds,
            seed: self.seed,
            orientation: e.orientation,
            hyper: self.hyper(),
            alpha: self.alpha,
            lm_lambda: e.lm_lambda,
            lsi_k: e.lsi_k,
        }
    }

    pub fn index_dir(&self) -> PathBuf {
        self.output.join("index")
    }

    pub fn model_path(&self) -> PathBuf {
        self.output.join("model.txt")
    }
}

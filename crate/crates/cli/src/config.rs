use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use watermark_probe::head::{TrainConfig, DEFAULT_ALPHAS};
use watermark_probe::probe::DEFAULT_THRESHOLD;
use watermark_probe::stamper::{Rgba, DEFAULT_COLOR, DEFAULT_FONT_SIZE, DEFAULT_STRING_LENGTH};
use watermark_probe::Scenario;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// The single JSON file that drives every subcommand. Relative paths resolve
/// against the directory containing the config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    #[serde(default)]
    pub stamp: Option<StampConfig>,
    #[serde(default)]
    pub score: Option<ScoreConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

fn default_top_k() -> usize {
    5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StampConfig {
    pub baseline_dir: PathBuf,
    pub scenarios: Vec<ScenarioConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub font: PathBuf,
    /// Charset file; the scenario's built-in list when absent.
    #[serde(default)]
    pub charset: Option<PathBuf>,
    #[serde(default = "default_color")]
    pub color: Rgba,
    /// Overrides the top-level seed for this scenario.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_string_length")]
    pub string_length: usize,
    #[serde(default = "default_font_size")]
    pub font_size: f32,
}

fn default_color() -> Rgba {
    DEFAULT_COLOR
}

fn default_string_length() -> usize {
    DEFAULT_STRING_LENGTH
}

fn default_font_size() -> f32 {
    DEFAULT_FONT_SIZE
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreConfig {
    pub dumps: Vec<DumpPair>,
    /// One class name per line, indexed by logit class.
    #[serde(default)]
    pub class_names: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpPair {
    pub model: String,
    pub scenario: Scenario,
    pub clean: PathBuf,
    pub stamped: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub train: PathBuf,
    pub eval: PathBuf,
    pub probe_clean: PathBuf,
    pub probe_stamped: PathBuf,
    /// Scores CSV from `score`; computed from the probe dumps when absent.
    #[serde(default)]
    pub scores: Option<PathBuf>,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub training: Option<TrainConfig>,
    #[serde(default)]
    pub parallel: bool,
}

fn default_alphas() -> Vec<f64> {
    DEFAULT_ALPHAS.to_vec()
}

#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threshold: Option<f64>,
}

impl AuditConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut config: AuditConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(format!(
                "unsupported config schema_version {} (expected {SCHEMA_VERSION})",
                config.schema_version
            )));
        }
        if let Some(dir) = &overrides.output_dir {
            config.output_dir = dir.clone();
        }
        if let Some(seed) = overrides.seed {
            config.seed = seed;
        }
        if let Some(t) = overrides.threshold {
            config.threshold = t;
        }
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve(base);
        if !(0.5..1.0).contains(&config.threshold) {
            return Err(CliError::config(format!(
                "threshold {} outside [0.5, 1)",
                config.threshold
            )));
        }
        Ok(config)
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output_dir);
        if let Some(stamp) = &mut self.stamp {
            fix(&mut stamp.baseline_dir);
            for s in &mut stamp.scenarios {
                fix(&mut s.font);
                if let Some(c) = &mut s.charset {
                    fix(c);
                }
            }
        }
        if let Some(score) = &mut self.score {
            for d in &mut score.dumps {
                fix(&mut d.clean);
                fix(&mut d.stamped);
            }
            if let Some(c) = &mut score.class_names {
                fix(c);
            }
        }
        if let Some(sweep) = &mut self.sweep {
            for p in [
                &mut sweep.train,
                &mut sweep.eval,
                &mut sweep.probe_clean,
                &mut sweep.probe_stamped,
            ] {
                fix(p);
            }
            if let Some(s) = &mut sweep.scores {
                fix(s);
            }
        }
    }

    pub fn stamp(&self) -> Result<&StampConfig, CliError> {
        let stamp = self
            .stamp
            .as_ref()
            .ok_or_else(|| CliError::config("config has no `stamp` section"))?;
        require_dir(&stamp.baseline_dir, None)?;
        if stamp.scenarios.is_empty() {
            return Err(CliError::config("`stamp.scenarios` is empty"));
        }
        for s in &stamp.scenarios {
            require_file(&s.font, Some(s.scenario), "font")?;
            if let Some(c) = &s.charset {
                require_file(c, Some(s.scenario), "charset")?;
            }
        }
        Ok(stamp)
    }

    pub fn score(&self) -> Result<&ScoreConfig, CliError> {
        let score = self
            .score
            .as_ref()
            .ok_or_else(|| CliError::config("config has no `score` section"))?;
        if score.dumps.is_empty() {
            return Err(CliError::config("`score.dumps` is empty"));
        }
        for d in &score.dumps {
            if d.model.is_empty() || d.model.contains(['/', '\\']) {
                return Err(CliError::config(format!("invalid model name `{}`", d.model)));
            }
            require_file(&d.clean, Some(d.scenario), "clean dump")?;
            require_file(&d.stamped, Some(d.scenario), "stamped dump")?;
        }
        if let Some(c) = &score.class_names {
            require_file(c, None, "class names")?;
        }
        Ok(score)
    }

    pub fn sweep(&self) -> Result<&SweepConfig, CliError> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| CliError::config("config has no `sweep` section"))?;
        require_file(&sweep.train, None, "train embeddings")?;
        require_file(&sweep.eval, None, "eval embeddings")?;
        require_file(&sweep.probe_clean, None, "clean probe embeddings")?;
        require_file(&sweep.probe_stamped, None, "stamped probe embeddings")?;
        if let Some(s) = &sweep.scores {
            require_file(s, None, "scores")?;
        }
        watermark_probe::head::check_alphas(&sweep.alphas)
            .map_err(|e| CliError::config(format!("sweep.alphas: {e}")))?;
        Ok(sweep)
    }

    pub fn training(&self) -> TrainConfig {
        self.sweep
            .as_ref()
            .and_then(|s| s.training.clone())
            .unwrap_or(TrainConfig {
                seed: self.seed,
                ..TrainConfig::default()
            })
    }
}

fn require_file(path: &Path, scenario: Option<Scenario>, what: &str) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::config(format!("{what} not found: {}", path.display())).in_scenario(scenario))
    }
}

fn require_dir(path: &Path, scenario: Option<Scenario>) -> Result<(), CliError> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(CliError::config(format!("directory not found: {}", path.display())).in_scenario(scenario))
    }
}

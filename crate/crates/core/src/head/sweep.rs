use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::activation::ActivationMatrix;
use crate::error::{Error, Result};
use crate::probe::{rank_by_diff, RepScore};

use super::data::LabeledEmbeddingSet;
use super::eval::{evaluate_accuracy, probe_outputs};
use super::mask::MaskPlan;
use super::train::{train_head, LinearHead, TrainConfig};

/// Fractions of most-differentiable coordinates excluded in the reference sweep.
pub const DEFAULT_ALPHAS: [f64; 10] = [0.0, 0.005, 0.01, 0.02, 0.03, 0.05, 0.1, 0.15, 0.25, 0.5];

/// Read-only inputs shared by every retraining in a sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepData<'a> {
    pub train: &'a LabeledEmbeddingSet,
    pub eval: &'a LabeledEmbeddingSet,
    pub probe_clean: &'a ActivationMatrix,
    pub probe_stamped: &'a ActivationMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    #[serde(default)]
    pub train: TrainConfig,
    /// Train the heads for different alphas concurrently. Results are identical
    /// either way.
    #[serde(default)]
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub alpha: f64,
    pub n_masked: usize,
    pub eval_accuracy: f64,
    pub max_output_diff: f64,
    pub output_scores: Vec<RepScore>,
    pub head: LinearHead,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
}

pub fn check_alphas(alphas: &[f64]) -> Result<()> {
    if let Some(&bad) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::OutOfRange {
            what: "alpha",
            value: bad,
            range: "[0, 1]",
        });
    }
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSpec("alphas must be strictly ascending".into()));
    }
    Ok(())
}

fn run_one(data: SweepData<'_>, ranking: &[usize], alpha: f64, config: &TrainConfig) -> Result<SweepRecord> {
    let plan = MaskPlan::from_ranking(ranking.to_vec(), alpha)?;
    let head = train_head(data.train, &plan, config)?;
    let eval_accuracy = evaluate_accuracy(&head, data.eval)?;
    let probe = probe_outputs(&head, data.probe_clean, data.probe_stamped)?;
    Ok(SweepRecord {
        alpha,
        n_masked: plan.masked.len(),
        eval_accuracy,
        max_output_diff: probe.max_diff,
        output_scores: probe.scores,
        head,
    })
}

/// Retrains the head once per alpha with identical hyperparameters, masking by
/// the single ranking derived from `scores`.
pub fn alpha_sweep(
    data: SweepData<'_>,
    scores: &[RepScore],
    alphas: &[f64],
    options: &SweepOptions,
) -> Result<SweepReport> {
    check_alphas(alphas)?;
    let dim = data.train.dim();
    for (what, actual) in [
        ("eval embedding width", data.eval.dim()),
        ("probe embedding width", data.probe_clean.n_cols()),
        ("representation scores", scores.len()),
    ] {
        if actual != dim {
            return Err(Error::LengthMismatch {
                what,
                expected: dim,
                actual,
            });
        }
    }
    if data.eval.n_classes() != data.train.n_classes() {
        return Err(Error::LengthMismatch {
            what: "eval class count",
            expected: data.train.n_classes(),
            actual: data.eval.n_classes(),
        });
    }
    let ranking = rank_by_diff(scores);
    let records = if options.parallel {
        alphas
            .par_iter()
            .map(|&a| run_one(data, &ranking, a, &options.train))
            .collect::<Result<Vec<_>>>()?
    } else {
        alphas
            .iter()
            .map(|&a| run_one(data, &ranking, a, &options.train))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(SweepReport { records })
}

/// One line of `sweep.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub n_masked: usize,
    pub eval_accuracy: f64,
    pub max_output_diff: f64,
}

/// One line of `output_auc_<alpha>.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRow {
    pub class: usize,
    pub auc: f64,
    pub diff: f64,
}

pub fn output_file_name(alpha: f64) -> String {
    format!("output_auc_{alpha}.csv")
}

fn csv_err(path: &Path, e: impl ToString) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

fn read_rows<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    r.deserialize()
        .map(|row| row.map_err(|e| csv_err(path, e)))
        .collect()
}

/// Reads `sweep.csv` from a sweep output directory.
pub fn read_sweep_table(dir: &Path) -> Result<Vec<SweepRow>> {
    read_rows(&dir.join("sweep.csv"))
}

pub fn read_output_scores(dir: &Path, alpha: f64) -> Result<Vec<OutputRow>> {
    read_rows(&dir.join(output_file_name(alpha)))
}

impl SweepReport {
    pub fn rows(&self) -> Vec<SweepRow> {
        self.records
            .iter()
            .map(|r| SweepRow {
                alpha: r.alpha,
                n_masked: r.n_masked,
                eval_accuracy: r.eval_accuracy,
                max_output_diff: r.max_output_diff,
            })
            .collect()
    }

    /// Writes `sweep.csv` and one `output_auc_<alpha>.csv` per record into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("sweep.csv");
        let mut w = csv::Writer::from_path(&path).map_err(|e| csv_err(&path, e))?;
        for row in self.rows() {
            w.serialize(row).map_err(|e| csv_err(&path, e))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        for r in &self.records {
            let path = dir.join(output_file_name(r.alpha));
            let mut w = csv::Writer::from_path(&path).map_err(|e| csv_err(&path, e))?;
            for s in &r.output_scores {
                w.serialize(OutputRow {
                    class: s.rep.index,
                    auc: s.auc,
                    diff: s.diff,
                })
                .map_err(|e| csv_err(&path, e))?;
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

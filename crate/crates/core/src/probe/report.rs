//! Stable CSV and JSON outputs of the analyzer.
//!
//! * `scores_<model>_<scenario>.csv`: `rep,layer,kind,auc,diff`, one row per
//!   representation in dump column order.
//! * `summary_<scenario>.csv`: `rank,kind,layer,index,name,mean_auc,mean_diff,n_models`,
//!   highest mean AUC first.
//! * `plotdata_<scenario>.json`: see [`PlotData`].
//!
//! Floats are written in shortest round-trip form, so reading a scores file
//! back reproduces the scores bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::activation::{RepKind, RepresentationId};
use crate::error::{Error, Result};
use crate::scenario::Scenario;

use super::score::RepScore;
use super::summary::{ClassEntry, ScenarioSummary, SensitivityReport};

#[derive(Debug, Serialize, Deserialize)]
struct ScoreRow {
    rep: usize,
    layer: String,
    kind: RepKind,
    auc: f64,
    diff: f64,
}

fn csv_err(path: &Path, e: impl ToString) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

pub fn scores_file_name(model: &str, scenario: Scenario) -> String {
    format!("scores_{model}_{scenario}.csv")
}

pub fn write_scores_csv(path: &Path, scores: &[RepScore]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    for s in scores {
        w.serialize(ScoreRow {
            rep: s.rep.index,
            layer: s.rep.layer_name.clone(),
            kind: s.rep.kind,
            auc: s.auc,
            diff: s.diff,
        })
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_scores_csv(path: &Path) -> Result<Vec<RepScore>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut out = Vec::new();
    for row in r.deserialize::<ScoreRow>() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let score = RepScore::from_auc(RepresentationId::new(row.layer, row.rep, row.kind), row.auc)?;
        if score.diff != row.diff {
            return Err(csv_err(
                path,
                format!("row for rep {} has diff {} but auc {} implies {}", row.rep, row.diff, row.auc, score.diff),
            ));
        }
        out.push(score);
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct SummaryRow<'a> {
    rank: usize,
    kind: RepKind,
    layer: &'a str,
    index: usize,
    name: &'a str,
    mean_auc: f64,
    mean_diff: f64,
    n_models: usize,
}

pub fn write_summary_csv(path: &Path, summary: &ScenarioSummary) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    for (rank, e) in summary.ranking.iter().enumerate() {
        w.serialize(SummaryRow {
            rank: rank + 1,
            kind: e.key.kind,
            layer: e.key.layer.as_deref().unwrap_or(""),
            index: e.key.index,
            name: e.name.as_deref().unwrap_or(""),
            mean_auc: e.mean_auc,
            mean_diff: e.mean_diff,
            n_models: e.per_model.len(),
        })
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Plot-ready data for one scenario: highest and lowest mean-AUC classes with
/// the per-model dots, per-model sensitivity counts and full diff distributions.
#[derive(Debug, Serialize)]
pub struct PlotData<'a> {
    pub scenario: Scenario,
    pub threshold: f64,
    pub highest: &'a [ClassEntry],
    pub lowest: Vec<&'a ClassEntry>,
    pub models: &'a [SensitivityReport],
    pub diff_distribution: &'a BTreeMap<String, Vec<f64>>,
}

impl<'a> PlotData<'a> {
    pub fn new(summary: &'a ScenarioSummary, k: usize) -> Self {
        Self {
            scenario: summary.scenario,
            threshold: summary.threshold,
            highest: summary.highest(k),
            lowest: summary.lowest(k),
            models: &summary.models,
            diff_distribution: &summary.diff_distribution,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("plot data serializes");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

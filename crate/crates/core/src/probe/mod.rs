//! Per-representation AUC probing of clean versus watermarked activations.

mod auc;
pub mod report;
mod score;
mod summary;

pub use auc::{auc_roc, differentiability, rank_statistic, RankStatistic};
pub use score::{count_sensitive, rank_by_diff, score_all, score_view, RepScore, DEFAULT_THRESHOLD};
pub use summary::{
    sensitivity_report, summarize, ClassEntry, ClassKey, ModelScores, ScenarioSummary,
    SensitivityReport,
};

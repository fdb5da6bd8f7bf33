//! Linear classification heads trained on embeddings with the most
//! watermark-sensitive coordinates masked out.

mod data;
mod eval;
mod mask;
mod sweep;
mod train;

pub use data::LabeledEmbeddingSet;
pub use eval::{evaluate_accuracy, probe_outputs, OutputProbe};
pub use mask::{make_mask, masked_count, MaskPlan};
pub use sweep::{
    alpha_sweep, check_alphas, output_file_name, read_output_scores, read_sweep_table, OutputRow,
    SweepData, SweepOptions, SweepRecord, SweepReport, SweepRow, DEFAULT_ALPHAS,
};
pub use train::{cross_entropy_gradient, train_head, LinearHead, TrainConfig};

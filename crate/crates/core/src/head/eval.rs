use rayon::prelude::*;
use serde::Serialize;

use crate::activation::{align_pairs, ActivationMatrix, RepKind, RepresentationId};
use crate::error::{Error, Result};
use crate::probe::{auc_roc, RepScore};

use super::data::LabeledEmbeddingSet;
use super::train::LinearHead;

/// Top-1 accuracy; prediction ties go to the lowest class index.
pub fn evaluate_accuracy(head: &LinearHead, data: &LabeledEmbeddingSet) -> Result<f64> {
    if data.dim() != head.dim {
        return Err(Error::LengthMismatch {
            what: "embedding width",
            expected: head.dim,
            actual: data.dim(),
        });
    }
    let hits = (0..data.len())
        .filter(|&i| head.predict(data.row(i)) == data.labels()[i] as usize)
        .count();
    Ok(hits as f64 / data.len() as f64)
}

/// Watermark sensitivity of the head's output logits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputProbe {
    pub scores: Vec<RepScore>,
    pub max_diff: f64,
}

/// Scores each output class logit on clean versus stamped probe embeddings.
///
/// Logits stay in f64; narrowing them to f32 could create spurious ties.
pub fn probe_outputs(
    head: &LinearHead,
    clean: &ActivationMatrix,
    stamped: &ActivationMatrix,
) -> Result<OutputProbe> {
    if clean.n_cols() != head.dim {
        return Err(Error::LengthMismatch {
            what: "probe embedding width",
            expected: head.dim,
            actual: clean.n_cols(),
        });
    }
    let view = align_pairs(clean, stamped)?;
    let clean_logits: Vec<Vec<f64>> = (0..view.n_pairs()).map(|i| head.logits(clean.row(i))).collect();
    let stamped_logits: Vec<Vec<f64>> = view
        .stamped_rows()
        .iter()
        .map(|&r| head.logits(stamped.row(r)))
        .collect();
    let scores = (0..head.n_classes)
        .into_par_iter()
        .map(|c| {
            let pos: Vec<f64> = stamped_logits.iter().map(|l| l[c]).collect();
            let neg: Vec<f64> = clean_logits.iter().map(|l| l[c]).collect();
            RepScore::from_auc(RepresentationId::new("head", c, RepKind::Logit), auc_roc(&pos, &neg)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let max_diff = scores.iter().map(|s| s.diff).fold(0.5, f64::max);
    Ok(OutputProbe { scores, max_diff })
}

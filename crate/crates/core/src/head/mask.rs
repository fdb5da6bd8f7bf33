use serde::Serialize;

use crate::error::{Error, Result};
use crate::probe::{rank_by_diff, RepScore};

/// Exclusion of the top `alpha` fraction of the most differentiable coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaskPlan {
    pub alpha: f64,
    pub dim: usize,
    pub ranking: Vec<usize>,
    /// Masked coordinates in ranking order.
    pub masked: Vec<usize>,
    /// Kept coordinates in ascending order.
    pub kept: Vec<usize>,
}

/// `floor(alpha * dim)`, snapping products that land within rounding noise of
/// an integer (e.g. `0.29 * 100 = 28.999999999999996`) onto it.
pub fn masked_count(alpha: f64, dim: usize) -> usize {
    let x = alpha * dim as f64;
    let nearest = x.round();
    let n = if (x - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        x.floor()
    };
    (n as usize).min(dim)
}

impl MaskPlan {
    /// Plan from an explicit ranking (a permutation of `0..ranking.len()`).
    pub fn from_ranking(ranking: Vec<usize>, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::OutOfRange {
                what: "alpha",
                value: alpha,
                range: "[0, 1]",
            });
        }
        let dim = ranking.len();
        let mut seen = vec![false; dim];
        for &j in &ranking {
            if j >= dim || std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidSpec(format!(
                    "ranking is not a permutation of 0..{dim}"
                )));
            }
        }
        let n_masked = masked_count(alpha, dim);
        let masked = ranking[..n_masked].to_vec();
        let mut is_masked = vec![false; dim];
        for &j in &masked {
            is_masked[j] = true;
        }
        let kept = (0..dim).filter(|&j| !is_masked[j]).collect();
        Ok(Self {
            alpha,
            dim,
            ranking,
            masked,
            kept,
        })
    }

    /// Nothing masked.
    pub fn identity(dim: usize) -> Self {
        Self::from_ranking((0..dim).collect(), 0.0).expect("identity ranking is valid")
    }

    pub fn is_masked(&self, j: usize) -> bool {
        self.masked.contains(&j)
    }
}

pub fn make_mask(scores: &[RepScore], alpha: f64, dim: usize) -> Result<MaskPlan> {
    if scores.len() != dim {
        return Err(Error::LengthMismatch {
            what: "scores",
            expected: dim,
            actual: scores.len(),
        });
    }
    MaskPlan::from_ranking(rank_by_diff(scores), alpha)
}

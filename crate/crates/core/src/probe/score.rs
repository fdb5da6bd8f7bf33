use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::activation::{align_pairs, ActivationMatrix, PairedView, RepresentationId};
use crate::error::{Error, Result};

use super::auc::{auc_roc, differentiability};

/// Default cutoff for calling a representation watermark-sensitive.
pub const DEFAULT_THRESHOLD: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepScore {
    pub rep: RepresentationId,
    pub auc: f64,
    pub diff: f64,
}

impl RepScore {
    pub fn from_auc(rep: RepresentationId, auc: f64) -> Result<Self> {
        Ok(Self {
            diff: differentiability(auc)?,
            rep,
            auc,
        })
    }
}

/// Scores every column of an aligned pair; stamped images are the positive class.
pub fn score_view(view: &PairedView<'_>) -> Result<Vec<RepScore>> {
    view.reps()
        .par_iter()
        .enumerate()
        .map(|(col, rep)| {
            let (pos, neg) = view.samples(col);
            RepScore::from_auc(rep.clone(), auc_roc(&pos, &neg)?)
        })
        .collect()
}

pub fn score_all(clean: &ActivationMatrix, stamped: &ActivationMatrix) -> Result<Vec<RepScore>> {
    score_view(&align_pairs(clean, stamped)?)
}

fn diff_order(scores: &[RepScore], a: usize, b: usize) -> Ordering {
    scores[b]
        .diff
        .total_cmp(&scores[a].diff)
        .then_with(|| scores[b].auc.total_cmp(&scores[a].auc))
        .then_with(|| a.cmp(&b))
}

/// Positions into `scores`, most differentiable first. Ties fall back to higher
/// AUC, then lower position.
pub fn rank_by_diff(scores: &[RepScore]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| diff_order(scores, a, b));
    order
}

/// Number of scores with `diff` strictly above `threshold`.
pub fn count_sensitive(scores: &[RepScore], threshold: f64) -> Result<usize> {
    check_threshold(threshold)?;
    Ok(scores.iter().filter(|s| s.diff > threshold).count())
}

pub(crate) fn check_threshold(threshold: f64) -> Result<()> {
    if !(0.5..1.0).contains(&threshold) {
        return Err(Error::OutOfRange {
            what: "threshold",
            value: threshold,
            range: "[0.5, 1)",
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::RepKind;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scores_from(pairs: &[(f64, f64)]) -> Vec<RepScore> {
        pairs
            .iter()
            .enumerate()
            .map(|(i, &(auc, diff))| RepScore {
                rep: RepresentationId::new("f", i, RepKind::Feature),
                auc,
                diff,
            })
            .collect()
    }

    fn from_diffs(diffs: &[f64]) -> Vec<RepScore> {
        scores_from(&diffs.iter().map(|&d| (d, d)).collect::<Vec<_>>())
    }

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("i{i}")).collect()
    }

    #[test]
    fn rank_example() {
        assert_eq!(rank_by_diff(&from_diffs(&[0.9, 0.99, 0.6, 0.95])), vec![1, 3, 0, 2]);
    }

    #[test]
    fn equal_diffs_rank_by_position() {
        assert_eq!(rank_by_diff(&from_diffs(&[0.7; 5])), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn equal_diff_prefers_higher_auc() {
        let s = scores_from(&[(0.2, 0.8), (0.8, 0.8), (0.5, 0.5)]);
        assert_eq!(rank_by_diff(&s), vec![1, 0, 2]);
    }

    #[test]
    fn strict_threshold() {
        let s = from_diffs(&[0.96, 0.95, 0.5]);
        assert_eq!(count_sensitive(&s, 0.95).unwrap(), 1);
        assert_eq!(count_sensitive(&s, 0.5).unwrap(), 2);
        assert!(count_sensitive(&s, 1.0).is_err());
        assert!(count_sensitive(&s, 0.49).is_err());
    }

    #[test]
    fn planted_count() {
        let mut diffs = vec![0.6; 1000];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut planted = 0;
        while planted < 285 {
            let j = rng.gen_range(0..1000);
            if diffs[j] != 0.99 {
                diffs[j] = 0.99;
                planted += 1;
            }
        }
        assert_eq!(count_sensitive(&from_diffs(&diffs), 0.95).unwrap(), 285);
    }

    #[test]
    fn planted_detector_and_constant_column() {
        let n = 6;
        let reps = RepresentationId::layer("fc", 2, RepKind::Logit);
        // column 0: indicator of stamping, column 1: constant
        let clean: Vec<f32> = (0..n).flat_map(|_| [0.0, 3.0]).collect();
        let stamped: Vec<f32> = (0..n).flat_map(|_| [1.0, 3.0]).collect();
        let c = ActivationMatrix::new(clean, ids(n), reps.clone()).unwrap();
        let s = ActivationMatrix::new(stamped, ids(n), reps).unwrap();
        let scores = score_all(&c, &s).unwrap();
        assert_eq!((scores[0].auc, scores[0].diff), (1.0, 1.0));
        assert_eq!((scores[1].auc, scores[1].diff), (0.5, 0.5));
    }

    #[test]
    fn random_matrix_matches_column_oracle() {
        let (n, d) = (998, 50);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let reps = RepresentationId::layer("fc", d, RepKind::Logit);
        let mut gen = || -> Vec<f32> { (0..n * d).map(|_| (rng.gen_range(-20i32..20) as f32) * 0.25).collect() };
        let c = ActivationMatrix::new(gen(), ids(n), reps.clone()).unwrap();
        // stamped rows in reverse id order to exercise alignment
        let s_values = gen();
        let mut rev_ids = ids(n);
        rev_ids.reverse();
        let s = ActivationMatrix::new(s_values, rev_ids, reps).unwrap();
        let scores = score_all(&c, &s).unwrap();
        for col in 0..d {
            let mut twice = 0u64;
            for i in 0..n {
                for j in 0..n {
                    let p = s.get(i, col);
                    let q = c.get(j, col);
                    twice += if p > q { 2 } else if p == q { 1 } else { 0 };
                }
            }
            let oracle = twice as f64 / (2 * n * n) as f64;
            assert!((scores[col].auc - oracle).abs() <= 1e-12);
            assert_eq!(scores[col].rep.index, col);
        }
    }

    proptest! {
        #[test]
        fn ranking_is_non_increasing(aucs in prop::collection::vec(0.0f64..=1.0, 0..60)) {
            let s: Vec<RepScore> = aucs.iter().enumerate()
                .map(|(i, &a)| RepScore::from_auc(RepresentationId::new("f", i, RepKind::Feature), a).unwrap())
                .collect();
            let order = rank_by_diff(&s);
            let mut sorted = order.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..s.len()).collect::<Vec<_>>());
            for w in order.windows(2) {
                prop_assert!(s[w[0]].diff >= s[w[1]].diff);
            }
        }

        #[test]
        fn count_monotone_in_threshold(aucs in prop::collection::vec(0.0f64..=1.0, 0..60), t1 in 0.5f64..1.0, t2 in 0.5f64..1.0) {
            let s: Vec<RepScore> = aucs.iter().enumerate()
                .map(|(i, &a)| RepScore::from_auc(RepresentationId::new("f", i, RepKind::Feature), a).unwrap())
                .collect();
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            prop_assert!(count_sensitive(&s, lo).unwrap() >= count_sensitive(&s, hi).unwrap());
        }
    }
}

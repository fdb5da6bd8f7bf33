use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Mann-Whitney statistic kept as an exact integer.
///
/// `twice_u` is `2·U` where `U = #{pos > neg} + ½·#{pos = neg}`; doubling makes
/// midrank ties integral so the statistic, and therefore the antisymmetry
/// `U(pos, neg) + U(neg, pos) = n_pos·n_neg`, is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankStatistic {
    pub twice_u: u128,
    pub n_pos: usize,
    pub n_neg: usize,
}

impl RankStatistic {
    pub fn auc(&self) -> f64 {
        self.twice_u as f64 / (2 * self.n_pos as u128 * self.n_neg as u128) as f64
    }
}

pub fn rank_statistic(pos: &[f64], neg: &[f64]) -> Result<RankStatistic> {
    if pos.is_empty() {
        return Err(Error::EmptyClass("positive"));
    }
    if neg.is_empty() {
        return Err(Error::EmptyClass("negative"));
    }
    let mut pooled: Vec<(f64, bool)> = Vec::with_capacity(pos.len() + neg.len());
    for (row, &v) in pos.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteInput { row, col: 0 });
        }
        pooled.push((v, true));
    }
    for (row, &v) in neg.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteInput { row, col: 1 });
        }
        pooled.push((v, false));
    }
    pooled.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));

    // Sum of doubled midranks of the positives. A tie block occupying sorted
    // positions start..end (0-based) has 1-based ranks start+1..=end, so its
    // doubled midrank is start + 1 + end.
    let mut twice_rank_sum: u128 = 0;
    let mut start = 0;
    while start < pooled.len() {
        let value = pooled[start].0;
        let mut end = start + 1;
        while end < pooled.len() && pooled[end].0 == value {
            end += 1;
        }
        let positives = pooled[start..end].iter().filter(|p| p.1).count() as u128;
        twice_rank_sum += positives * (start + 1 + end) as u128;
        start = end;
    }
    let n_pos = pos.len() as u128;
    Ok(RankStatistic {
        twice_u: twice_rank_sum - n_pos * (n_pos + 1),
        n_pos: pos.len(),
        n_neg: neg.len(),
    })
}

/// Area under the ROC curve for scoring `pos` above `neg`, ties counting ½.
pub fn auc_roc(pos: &[f64], neg: &[f64]) -> Result<f64> {
    rank_statistic(pos, neg).map(|s| s.auc())
}

/// `max(auc, 1 - auc)`: separability regardless of direction.
pub fn differentiability(auc: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&auc) {
        return Err(Error::OutOfRange {
            what: "auc",
            value: auc,
            range: "[0, 1]",
        });
    }
    Ok(auc.max(1.0 - auc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    /// O(n·m) pair counting, independent of the rank path.
    fn pair_count_auc(pos: &[f64], neg: &[f64]) -> f64 {
        let mut twice = 0u128;
        for &p in pos {
            for &n in neg {
                if p > n {
                    twice += 2;
                } else if p == n {
                    twice += 1;
                }
            }
        }
        twice as f64 / (2 * pos.len() as u128 * neg.len() as u128) as f64
    }

    #[test]
    fn perfect_separation() {
        assert_eq!(auc_roc(&[2.0, 3.0, 4.0], &[0.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn perfect_inverse_separation() {
        assert_eq!(auc_roc(&[0.0, 1.0], &[2.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn identical_tied_distributions() {
        assert_eq!(auc_roc(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.5);
    }

    #[test]
    fn all_equal_values() {
        assert_eq!(auc_roc(&[7.0; 5], &[7.0; 3]).unwrap(), 0.5);
    }

    #[test]
    fn signed_zero_is_a_tie() {
        assert_eq!(auc_roc(&[0.0], &[-0.0]).unwrap(), 0.5);
    }

    #[test]
    fn gaussian_samples_match_pair_counting() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let pos: Vec<f64> = (0..200).map(|_| StandardNormal.sample(&mut rng)).collect();
        let neg: Vec<f64> = (0..200).map(|_| StandardNormal.sample(&mut rng)).collect();
        let got = auc_roc(&pos, &neg).unwrap();
        assert!((got - pair_count_auc(&pos, &neg)).abs() <= 1e-12);
    }

    #[test]
    fn empty_class_rejected() {
        assert!(matches!(auc_roc(&[], &[1.0]), Err(Error::EmptyClass("positive"))));
        assert!(matches!(auc_roc(&[1.0], &[]), Err(Error::EmptyClass("negative"))));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(
            auc_roc(&[1.0, f64::NAN], &[0.0]),
            Err(Error::NonFiniteInput { row: 1, .. })
        ));
    }

    #[test]
    fn differentiability_values() {
        assert_eq!(differentiability(0.5).unwrap(), 0.5);
        assert_eq!(differentiability(0.0).unwrap(), 1.0);
        assert_eq!(differentiability(1.0).unwrap(), 1.0);
        assert!((differentiability(0.3).unwrap() - 0.7).abs() < 1e-15);
        assert!(differentiability(1.2).is_err());
        assert!(differentiability(-0.1).is_err());
        assert!(differentiability(f64::NAN).is_err());
    }

    fn small_ints() -> impl Strategy<Value = Vec<f64>> {
        // narrow integer range forces frequent ties
        prop::collection::vec((-4i32..5).prop_map(f64::from), 1..40)
    }

    proptest! {
        #[test]
        fn matches_pair_counting(pos in small_ints(), neg in small_ints()) {
            prop_assert_eq!(auc_roc(&pos, &neg).unwrap(), pair_count_auc(&pos, &neg));
        }

        #[test]
        fn antisymmetric(pos in small_ints(), neg in small_ints()) {
            let a = rank_statistic(&pos, &neg).unwrap();
            let b = rank_statistic(&neg, &pos).unwrap();
            prop_assert_eq!(a.twice_u + b.twice_u, 2 * (pos.len() * neg.len()) as u128);
            prop_assert!((a.auc() - (1.0 - b.auc())).abs() <= f64::EPSILON);
        }

        #[test]
        fn invariant_under_monotone_transform(pos in small_ints(), neg in small_ints()) {
            let f = |v: &f64| (v * 0.5).exp() * 3.0 - 1.0;
            let pos_t: Vec<f64> = pos.iter().map(f).collect();
            let neg_t: Vec<f64> = neg.iter().map(f).collect();
            prop_assert_eq!(
                rank_statistic(&pos, &neg).unwrap(),
                rank_statistic(&pos_t, &neg_t).unwrap()
            );
        }

        #[test]
        fn differentiability_symmetric(a in 0.0f64..=1.0) {
            let d = differentiability(a).unwrap();
            prop_assert!((d - differentiability(1.0 - a).unwrap()).abs() <= f64::EPSILON);
            prop_assert!((0.5..=1.0).contains(&d));
        }
    }
}

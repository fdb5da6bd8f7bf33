use std::collections::BTreeMap;

use serde::Serialize;

use crate::activation::RepKind;
use crate::error::Result;
use crate::scenario::Scenario;

use super::score::{check_threshold, count_sensitive, RepScore};

/// Scores of one model under one watermark scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelScores {
    pub model: String,
    pub scenario: Scenario,
    pub scores: Vec<RepScore>,
}

/// Per-model view: sensitive count plus the highest and lowest AUC listings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub model: String,
    pub scenario: Scenario,
    pub threshold: f64,
    pub n_logit: usize,
    pub sensitive_logit: usize,
    pub n_feature: usize,
    pub sensitive_feature: usize,
    /// Sensitive feature representations as a fraction of all feature representations.
    pub feature_ratio: Option<f64>,
    pub sensitive_count: usize,
    pub top_k: Vec<RepScore>,
    pub bottom_k: Vec<RepScore>,
}

/// Logit classes are matched across models by class index alone. Feature
/// channels only by layer and index, since they are architecture specific.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ClassKey {
    pub kind: RepKind,
    pub layer: Option<String>,
    pub index: usize,
}

impl ClassKey {
    fn of(score: &RepScore) -> Self {
        match score.rep.kind {
            RepKind::Logit => ClassKey {
                kind: RepKind::Logit,
                layer: None,
                index: score.rep.index,
            },
            RepKind::Feature => ClassKey {
                kind: RepKind::Feature,
                layer: Some(score.rep.layer_name.clone()),
                index: score.rep.index,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassEntry {
    pub key: ClassKey,
    pub name: Option<String>,
    pub mean_auc: f64,
    pub mean_diff: f64,
    /// `(model, auc)` sorted by model name.
    pub per_model: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub scenario: Scenario,
    pub threshold: f64,
    pub models: Vec<SensitivityReport>,
    /// All classes, highest mean AUC first.
    pub ranking: Vec<ClassEntry>,
    /// Every model's diff values, keyed by model name, in representation order.
    pub diff_distribution: BTreeMap<String, Vec<f64>>,
}

impl ScenarioSummary {
    pub fn highest(&self, k: usize) -> &[ClassEntry] {
        &self.ranking[..k.min(self.ranking.len())]
    }

    /// The `k` lowest mean AUC classes, lowest first.
    pub fn lowest(&self, k: usize) -> Vec<&ClassEntry> {
        self.ranking.iter().rev().take(k).collect()
    }
}

fn listing(scores: &[RepScore], k: usize, descending: bool) -> Vec<RepScore> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        let by_auc = scores[a].auc.total_cmp(&scores[b].auc);
        let by_auc = if descending { by_auc.reverse() } else { by_auc };
        by_auc.then_with(|| a.cmp(&b))
    });
    order.into_iter().take(k).map(|i| scores[i].clone()).collect()
}

pub fn sensitivity_report(entry: &ModelScores, threshold: f64, k: usize) -> Result<SensitivityReport> {
    let of_kind = |kind| -> Vec<RepScore> {
        entry
            .scores
            .iter()
            .filter(|s| s.rep.kind == kind)
            .cloned()
            .collect()
    };
    let logits = of_kind(RepKind::Logit);
    let features = of_kind(RepKind::Feature);
    let sensitive_logit = count_sensitive(&logits, threshold)?;
    let sensitive_feature = count_sensitive(&features, threshold)?;
    Ok(SensitivityReport {
        model: entry.model.clone(),
        scenario: entry.scenario,
        threshold,
        n_logit: logits.len(),
        sensitive_logit,
        n_feature: features.len(),
        sensitive_feature,
        feature_ratio: (!features.is_empty())
            .then(|| sensitive_feature as f64 / features.len() as f64),
        sensitive_count: sensitive_logit + sensitive_feature,
        top_k: listing(&entry.scores, k, true),
        bottom_k: listing(&entry.scores, k, false),
    })
}

/// Aggregates scores across models, one summary per scenario in scenario order.
///
/// Output depends only on the multiset of inputs: models are processed in name
/// order and class means are accumulated in that order.
pub fn summarize(
    inputs: &[ModelScores],
    threshold: f64,
    k: usize,
    class_names: Option<&[String]>,
) -> Result<Vec<ScenarioSummary>> {
    check_threshold(threshold)?;
    let mut by_scenario: BTreeMap<Scenario, Vec<&ModelScores>> = BTreeMap::new();
    for entry in inputs {
        by_scenario.entry(entry.scenario).or_default().push(entry);
    }

    let mut out = Vec::with_capacity(by_scenario.len());
    for (scenario, mut entries) in by_scenario {
        entries.sort_by(|a, b| a.model.cmp(&b.model));

        let mut classes: BTreeMap<ClassKey, Vec<(String, f64, f64)>> = BTreeMap::new();
        let mut models = Vec::with_capacity(entries.len());
        let mut diff_distribution = BTreeMap::new();
        for entry in &entries {
            models.push(sensitivity_report(entry, threshold, k)?);
            diff_distribution.insert(
                entry.model.clone(),
                entry.scores.iter().map(|s| s.diff).collect(),
            );
            for s in &entry.scores {
                classes
                    .entry(ClassKey::of(s))
                    .or_default()
                    .push((entry.model.clone(), s.auc, s.diff));
            }
        }

        let mut ranking: Vec<ClassEntry> = classes
            .into_iter()
            .map(|(key, per)| {
                let n = per.len() as f64;
                let mean_auc = per.iter().map(|p| p.1).sum::<f64>() / n;
                let mean_diff = per.iter().map(|p| p.2).sum::<f64>() / n;
                let name = match (key.kind, class_names) {
                    (RepKind::Logit, Some(names)) => names.get(key.index).cloned(),
                    _ => None,
                };
                ClassEntry {
                    key,
                    name,
                    mean_auc,
                    mean_diff,
                    per_model: per.into_iter().map(|(m, a, _)| (m, a)).collect(),
                }
            })
            .collect();
        ranking.sort_by(|a, b| b.mean_auc.total_cmp(&a.mean_auc).then_with(|| a.key.cmp(&b.key)));

        out.push(ScenarioSummary {
            scenario,
            threshold,
            models,
            ranking,
            diff_distribution,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::RepresentationId;

    fn logits(aucs: &[f64]) -> Vec<RepScore> {
        aucs.iter()
            .enumerate()
            .map(|(i, &a)| RepScore::from_auc(RepresentationId::new("fc", i, RepKind::Logit), a).unwrap())
            .collect()
    }

    #[test]
    fn single_model_is_verbatim() {
        let scores = logits(&[0.2, 0.97, 0.5, 0.6]);
        let input = ModelScores {
            model: "m".into(),
            scenario: Scenario::Chinese,
            scores: scores.clone(),
        };
        let out = summarize(&[input], 0.95, 2, None).unwrap();
        assert_eq!(out.len(), 1);
        let s = &out[0];
        for entry in &s.ranking {
            let orig = &scores[entry.key.index];
            assert_eq!(entry.mean_auc, orig.auc);
            assert_eq!(entry.mean_diff, orig.diff);
        }
        let order: Vec<usize> = s.ranking.iter().map(|e| e.key.index).collect();
        assert_eq!(order, vec![1, 3, 2, 0]);
        assert_eq!(s.models[0].sensitive_logit, 1);
        assert_eq!(s.models[0].top_k[0].rep.index, 1);
        assert_eq!(s.models[0].bottom_k[0].rep.index, 0);
        assert_eq!(s.lowest(1)[0].key.index, 0);
        assert_eq!(s.diff_distribution["m"], scores.iter().map(|x| x.diff).collect::<Vec<_>>());
    }

    #[test]
    fn two_models_are_averaged() {
        let a = ModelScores { model: "a".into(), scenario: Scenario::Latin, scores: logits(&[0.9, 0.3]) };
        let b = ModelScores { model: "b".into(), scenario: Scenario::Latin, scores: logits(&[0.7, 0.1]) };
        let out = summarize(&[a, b], 0.95, 5, None).unwrap();
        let first = &out[0].ranking[0];
        assert_eq!(first.key.index, 0);
        assert_eq!(first.mean_auc, (0.9 + 0.7) / 2.0);
        assert_eq!(first.per_model, vec![("a".to_string(), 0.9), ("b".to_string(), 0.7)]);
    }

    #[test]
    fn input_order_does_not_matter() {
        let mk = |m: &str, sc, a: &[f64]| ModelScores { model: m.into(), scenario: sc, scores: logits(a) };
        let inputs = vec![
            mk("x", Scenario::Chinese, &[0.1, 0.99, 0.4]),
            mk("y", Scenario::Chinese, &[0.3, 0.8, 0.45]),
            mk("x", Scenario::Numeric, &[0.5, 0.6, 0.7]),
            mk("z", Scenario::Chinese, &[0.33, 0.1, 0.9]),
        ];
        let forward = serde_json::to_string(&summarize(&inputs, 0.9, 3, None).unwrap()).unwrap();
        let mut shuffled = inputs.clone();
        shuffled.reverse();
        shuffled.swap(0, 2);
        let back = serde_json::to_string(&summarize(&shuffled, 0.9, 3, None).unwrap()).unwrap();
        assert_eq!(forward, back);
    }

    #[test]
    fn class_names_attach_to_logits() {
        let names = vec!["carton".to_string(), "safe".to_string()];
        let input = ModelScores { model: "m".into(), scenario: Scenario::Chinese, scores: logits(&[0.9, 0.1]) };
        let out = summarize(&[input], 0.95, 1, Some(&names)).unwrap();
        assert_eq!(out[0].ranking[0].name.as_deref(), Some("carton"));
    }

    #[test]
    fn feature_ratio() {
        let mut scores = logits(&[0.5]);
        for (i, a) in [0.99, 0.5, 0.01, 0.6].into_iter().enumerate() {
            scores.push(RepScore::from_auc(RepresentationId::new("pool", i, RepKind::Feature), a).unwrap());
        }
        let r = sensitivity_report(&ModelScores { model: "m".into(), scenario: Scenario::Hindi, scores }, 0.95, 2).unwrap();
        assert_eq!((r.n_feature, r.sensitive_feature, r.n_logit), (4, 2, 1));
        assert_eq!(r.feature_ratio, Some(0.5));
    }
}

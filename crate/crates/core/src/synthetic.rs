//! Synthetic probe and downstream data with planted watermark detectors.
//!
//! A planted coordinate reads `1 + N(0, noise²)` on stamped images and
//! `N(0, noise²)` on clean ones; every other coordinate is unrelated to the
//! watermark. These fixtures let the whole pipeline be checked against known
//! ground truth without any pretrained network.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::activation::{ActivationMatrix, GroupLabel, RepKind, RepresentationId, Split};
use crate::head::LabeledEmbeddingSet;
use crate::scenario::Scenario;

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("probe{i:05}")).collect()
}

fn pair(clean: Vec<f32>, stamped: Vec<f32>, n: usize, dim: usize, layer: &str) -> (ActivationMatrix, ActivationMatrix) {
    let reps = RepresentationId::layer(layer, dim, RepKind::Feature);
    let clean = ActivationMatrix::new(clean, ids(n), reps.clone())
        .expect("finite synthetic values")
        .with_group(GroupLabel::Clean)
        .with_scenario(Scenario::Chinese);
    let stamped = ActivationMatrix::new(stamped, ids(n), reps)
        .expect("finite synthetic values")
        .with_group(GroupLabel::Stamped)
        .with_scenario(Scenario::Chinese);
    (clean, stamped)
}

/// `n` clean and `n` stamped rows of `dim` columns. Unplanted columns are
/// independent standard normals in both groups.
pub fn planted_probe(n: usize, dim: usize, planted: &[usize], noise: f64, seed: u64) -> (ActivationMatrix, ActivationMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, noise).expect("noise is a valid standard deviation");
    let mut draw = |indicator: f64| -> Vec<f32> {
        let mut v = Vec::with_capacity(n * dim);
        for _ in 0..n {
            for j in 0..dim {
                let x = if planted.contains(&j) {
                    indicator + jitter.sample(&mut rng)
                } else {
                    StandardNormal.sample(&mut rng)
                };
                v.push(x as f32);
            }
        }
        v
    };
    let clean = draw(0.0);
    let stamped = draw(1.0);
    pair(clean, stamped, n, dim, "features")
}

/// Downstream classification task whose labels are partially explained by a
/// watermark: images of `target_class` carry the watermark far more often.
///
/// Probe images come from outside the downstream label space (unplanted
/// coordinates are plain standard normals), mirroring a generic probe set
/// reused across downstream tasks.
#[derive(Debug, Clone)]
pub struct PlantedTaskConfig {
    pub dim: usize,
    pub planted: Vec<usize>,
    pub n_classes: usize,
    pub n_train: usize,
    pub n_eval: usize,
    pub n_probe: usize,
    /// Standard deviation of class means on the unplanted coordinates.
    pub class_separation: f64,
    pub target_class: usize,
    pub watermark_rate_target: f64,
    pub watermark_rate_other: f64,
    pub noise: f64,
    /// Standard deviation of the watermark's small effect on unplanted
    /// coordinates of stamped probe images.
    pub leak: f64,
    pub seed: u64,
}

impl Default for PlantedTaskConfig {
    fn default() -> Self {
        Self {
            dim: 64,
            planted: vec![7, 29, 52],
            n_classes: 4,
            n_train: 2000,
            n_eval: 1000,
            n_probe: 500,
            class_separation: 0.5,
            target_class: 0,
            watermark_rate_target: 1.0,
            watermark_rate_other: 0.02,
            noise: 0.1,
            leak: 0.05,
            seed: 17,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedTask {
    pub train: LabeledEmbeddingSet,
    pub eval: LabeledEmbeddingSet,
    pub probe_clean: ActivationMatrix,
    pub probe_stamped: ActivationMatrix,
    pub planted: Vec<usize>,
}

impl PlantedTaskConfig {
    pub fn generate(&self) -> PlantedTask {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let dim = self.dim;
        let jitter = Normal::new(0.0, self.noise).expect("valid noise");
        let leak = Normal::new(0.0, self.leak).expect("valid leak");
        let means: Vec<f64> = (0..self.n_classes * dim)
            .map(|i| {
                let z: f64 = StandardNormal.sample(&mut rng);
                if self.planted.contains(&(i % dim)) {
                    0.0
                } else {
                    z * self.class_separation
                }
            })
            .collect();

        // `class: None` draws from outside the downstream label space
        let embed = |rng: &mut ChaCha8Rng, class: Option<usize>, watermark: bool| -> Vec<f64> {
            (0..dim)
                .map(|j| {
                    if self.planted.contains(&j) {
                        f64::from(u8::from(watermark)) + jitter.sample(rng)
                    } else {
                        let z: f64 = StandardNormal.sample(rng);
                        class.map_or(0.0, |c| means[c * dim + j]) + z
                    }
                })
                .collect()
        };

        let labelled = |rng: &mut ChaCha8Rng, n: usize, split: Split| {
            let mut values = Vec::with_capacity(n * dim);
            let mut labels = Vec::with_capacity(n);
            for i in 0..n {
                let class = i % self.n_classes;
                let rate = if class == self.target_class {
                    self.watermark_rate_target
                } else {
                    self.watermark_rate_other
                };
                let watermark = rng.gen_bool(rate);
                values.extend(embed(rng, Some(class), watermark).into_iter().map(|v| v as f32));
                labels.push(class as u32);
            }
            LabeledEmbeddingSet::new(values, dim, labels, self.n_classes, split).expect("valid synthetic set")
        };
        let train = labelled(&mut rng, self.n_train, Split::Train);
        let eval = labelled(&mut rng, self.n_eval, Split::Eval);

        let mut clean = Vec::with_capacity(self.n_probe * dim);
        let mut stamped = Vec::with_capacity(self.n_probe * dim);
        for _ in 0..self.n_probe {
            let base = embed(&mut rng, None, false);
            for (j, &v) in base.iter().enumerate() {
                clean.push(v as f32);
                let s = if self.planted.contains(&j) {
                    v + 1.0
                } else {
                    v + leak.sample(&mut rng)
                };
                stamped.push(s as f32);
            }
        }
        let (probe_clean, probe_stamped) = pair(clean, stamped, self.n_probe, dim, "embedding");
        PlantedTask {
            train,
            eval,
            probe_clean,
            probe_stamped,
            planted: self.planted.clone(),
        }
    }
}

use crate::error::{Error, Result};

use super::matrix::{ActivationMatrix, RepKind, RepresentationId};

/// Raw `n_images x channels x height x width` activation maps of one layer.
#[derive(Debug, Clone)]
pub struct SpatialActivationBlock {
    pub layer_name: String,
    pub image_ids: Vec<String>,
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub values: Vec<f32>,
}

impl SpatialActivationBlock {
    pub fn new(
        layer_name: impl Into<String>,
        image_ids: Vec<String>,
        channels: usize,
        height: usize,
        width: usize,
        values: Vec<f32>,
    ) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::OutOfRange {
                what: "spatial extent",
                value: (height.min(width)) as f64,
                range: "[1, inf)",
            });
        }
        let expected = image_ids.len() * channels * height * width;
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                what: "spatial block values",
                expected,
                actual: values.len(),
            });
        }
        Ok(Self {
            layer_name: layer_name.into(),
            image_ids,
            channels,
            height,
            width,
            values,
        })
    }

    pub fn n_images(&self) -> usize {
        self.image_ids.len()
    }
}

/// Global average pooling per channel: one feature representation per channel.
///
/// Sums are accumulated in f64 so the result is the correctly rounded mean for
/// any realistic map size.
pub fn pool_channels(block: &SpatialActivationBlock) -> Result<ActivationMatrix> {
    let plane = block.height * block.width;
    if let Some(pos) = block.values.iter().position(|v| !v.is_finite()) {
        let per_image = block.channels * plane;
        return Err(Error::NonFiniteInput {
            row: pos / per_image,
            col: (pos % per_image) / plane,
        });
    }
    let pooled: Vec<f32> = block
        .values
        .chunks_exact(plane)
        .map(|map| (map.iter().map(|&v| v as f64).sum::<f64>() / plane as f64) as f32)
        .collect();
    let reps = RepresentationId::layer(&block.layer_name, block.channels, RepKind::Feature);
    ActivationMatrix::new(pooled, block.image_ids.clone(), reps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("im{i}")).collect()
    }

    #[test]
    fn two_by_two_mean() {
        let block = SpatialActivationBlock::new("f", ids(1), 1, 2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let m = pool_channels(&block).unwrap();
        assert_eq!(m.values(), &[2.5]);
        assert_eq!(m.reps()[0].kind, RepKind::Feature);
    }

    #[test]
    fn unit_map_is_identity() {
        let values: Vec<f32> = (0..12).map(|v| v as f32 * 0.37 - 1.0).collect();
        let block = SpatialActivationBlock::new("f", ids(3), 4, 1, 1, values.clone()).unwrap();
        assert_eq!(pool_channels(&block).unwrap().values(), values.as_slice());
    }

    #[test]
    fn matches_naive_loop_oracle() {
        let (n, c, h, w) = (4, 8, 5, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f32> = (0..n * c * h * w).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let block = SpatialActivationBlock::new("f", ids(n), c, h, w, values.clone()).unwrap();
        let pooled = pool_channels(&block).unwrap();
        for i in 0..n {
            for ch in 0..c {
                let mut acc = 0.0f64;
                for y in 0..h {
                    for x in 0..w {
                        acc += values[((i * c + ch) * h + y) * w + x] as f64;
                    }
                }
                let oracle = acc / (h * w) as f64;
                let got = pooled.get(i, ch) as f64;
                assert!((got - oracle).abs() <= 1e-6 * oracle.abs().max(1e-6), "{got} vs {oracle}");
            }
        }
    }

    #[test]
    fn non_finite_reports_image_and_channel() {
        let mut values = vec![0.0f32; 2 * 3 * 2 * 2];
        values[(1 * 3 + 2) * 4 + 1] = f32::NAN;
        let block = SpatialActivationBlock::new("f", ids(2), 3, 2, 2, values).unwrap();
        assert!(matches!(
            pool_channels(&block),
            Err(Error::NonFiniteInput { row: 1, col: 2 })
        ));
    }

    #[test]
    fn zero_extent_rejected() {
        assert!(SpatialActivationBlock::new("f", ids(1), 1, 0, 3, vec![]).is_err());
    }

    proptest! {
        #[test]
        fn permutation_equivariant(seed in any::<u64>(), n in 1usize..5, c in 1usize..5) {
            let (h, w) = (3, 2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let values: Vec<f32> = (0..n * c * h * w).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let base = pool_channels(&SpatialActivationBlock::new("f", ids(n), c, h, w, values.clone()).unwrap()).unwrap();

            // reverse images and rotate channels
            let img_perm: Vec<usize> = (0..n).rev().collect();
            let ch_perm: Vec<usize> = (0..c).map(|k| (k + 1) % c).collect();
            let mut permuted = Vec::with_capacity(values.len());
            for &i in &img_perm {
                for &ch in &ch_perm {
                    let start = (i * c + ch) * h * w;
                    permuted.extend_from_slice(&values[start..start + h * w]);
                }
            }
            let out = pool_channels(&SpatialActivationBlock::new("f", ids(n), c, h, w, permuted).unwrap()).unwrap();
            for (a, &i) in img_perm.iter().enumerate() {
                for (b, &ch) in ch_perm.iter().enumerate() {
                    prop_assert_eq!(out.get(a, b).to_bits(), base.get(i, ch).to_bits());
                }
            }
        }
    }
}

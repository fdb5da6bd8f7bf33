use std::path::Path;

use crate::activation::dump::{read_dump_with_manifest, write_dump_with_manifest, DumpManifest};
use crate::activation::{ActivationMatrix, RepKind, RepresentationId, Split};
use crate::error::{Error, Result};

/// Downstream embeddings with integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledEmbeddingSet {
    embeddings: Vec<f32>,
    labels: Vec<u32>,
    dim: usize,
    n_classes: usize,
    pub split: Split,
}

impl LabeledEmbeddingSet {
    pub fn new(
        embeddings: Vec<f32>,
        dim: usize,
        labels: Vec<u32>,
        n_classes: usize,
        split: Split,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::DegenerateData("embedding set has no rows".into()));
        }
        if embeddings.len() != labels.len() * dim {
            return Err(Error::LengthMismatch {
                what: "embedding values",
                expected: labels.len() * dim,
                actual: embeddings.len(),
            });
        }
        if let Some(pos) = embeddings.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput {
                row: pos / dim.max(1),
                col: pos % dim.max(1),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= n_classes) {
            return Err(Error::OutOfRange {
                what: "label",
                value: bad as f64,
                range: "[0, n_classes)",
            });
        }
        Ok(Self {
            embeddings,
            labels,
            dim,
            n_classes,
            split,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn embeddings(&self) -> &[f32] {
        &self.embeddings
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.embeddings[i * self.dim..(i + 1) * self.dim]
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Reads an ACTD dump whose manifest carries `labels` (and optionally
    /// `n_classes` and `split`).
    pub fn read(path: &Path) -> Result<Self> {
        let (matrix, manifest) = read_dump_with_manifest(path)?;
        let labels = manifest.labels.ok_or_else(|| Error::Manifest {
            path: path.to_path_buf(),
            reason: "labelled embedding dump has no `labels`".into(),
        })?;
        let n_classes = match manifest.n_classes {
            Some(c) => c as usize,
            None => labels.iter().max().map_or(0, |&m| m as usize + 1),
        };
        let split = manifest.split.unwrap_or(Split::Train);
        Self::new(matrix.values().to_vec(), matrix.n_cols(), labels, n_classes, split)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let matrix = self.to_matrix();
        let mut manifest = DumpManifest::for_matrix(&matrix);
        manifest.labels = Some(self.labels.clone());
        manifest.n_classes = Some(self.n_classes as u32);
        manifest.split = Some(self.split);
        write_dump_with_manifest(&matrix, &manifest, path)
    }

    fn to_matrix(&self) -> ActivationMatrix {
        let prefix = match self.split {
            Split::Train => "train",
            Split::Eval => "eval",
        };
        let ids = (0..self.len()).map(|i| format!("{prefix}{i:06}")).collect();
        ActivationMatrix::new(
            self.embeddings.clone(),
            ids,
            RepresentationId::layer("embedding", self.dim, RepKind::Feature),
        )
        .expect("validated embedding set forms a valid matrix")
    }
}

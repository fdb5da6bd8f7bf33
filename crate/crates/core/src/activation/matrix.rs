use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepKind {
    Logit,
    Feature,
}

impl RepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RepKind::Logit => "logit",
            RepKind::Feature => "feature",
        }
    }
}

/// Identity of one scalar representation: an output logit or a pooled channel.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RepresentationId {
    #[serde(rename = "layer")]
    pub layer_name: String,
    pub index: usize,
    pub kind: RepKind,
}

impl RepresentationId {
    pub fn new(layer_name: impl Into<String>, index: usize, kind: RepKind) -> Self {
        Self {
            layer_name: layer_name.into(),
            index,
            kind,
        }
    }

    /// `count` consecutive representations `0..count` of one layer.
    pub fn layer(layer_name: &str, count: usize, kind: RepKind) -> Vec<Self> {
        (0..count)
            .map(|i| Self::new(layer_name, i, kind))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupLabel {
    Clean,
    Stamped,
}

/// Row-major `n_images x n_reps` activations with the identities of rows and columns.
///
/// Values are always finite, image ids are unique and `(layer, index)` pairs are unique.
/// Scenario and group are optional so that the same container carries downstream
/// embedding sets, which belong to neither.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationMatrix {
    values: Vec<f32>,
    image_ids: Vec<String>,
    reps: Vec<RepresentationId>,
    pub group: Option<GroupLabel>,
    pub scenario: Option<Scenario>,
}

impl ActivationMatrix {
    pub fn new(
        values: Vec<f32>,
        image_ids: Vec<String>,
        reps: Vec<RepresentationId>,
    ) -> Result<Self> {
        let expected = image_ids.len() * reps.len();
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                what: "activation values",
                expected,
                actual: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let cols = reps.len().max(1);
            return Err(Error::NonFiniteInput {
                row: pos / cols,
                col: pos % cols,
            });
        }
        let mut seen = HashSet::with_capacity(image_ids.len());
        for id in &image_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::MismatchedImages(format!("duplicate image id `{id}`")));
            }
        }
        let mut seen = HashSet::with_capacity(reps.len());
        for rep in &reps {
            if !seen.insert((rep.layer_name.as_str(), rep.index)) {
                return Err(Error::MismatchedReps(format!(
                    "duplicate representation {}[{}]",
                    rep.layer_name, rep.index
                )));
            }
        }
        Ok(Self {
            values,
            image_ids,
            reps,
            group: None,
            scenario: None,
        })
    }

    pub fn with_group(mut self, group: GroupLabel) -> Self {
        self.group = Some(group);
        self
    }

    pub fn with_scenario(mut self, scenario: Scenario) -> Self {
        self.scenario = Some(scenario);
        self
    }

    pub fn n_rows(&self) -> usize {
        self.image_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.reps.len()
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn image_ids(&self) -> &[String] {
        &self.image_ids
    }

    pub fn reps(&self) -> &[RepresentationId] {
        &self.reps
    }

    pub fn row(&self, i: usize) -> &[f32] {
        let n = self.n_cols();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.values[row * self.n_cols() + col]
    }

    pub fn column(&self, col: usize) -> Vec<f32> {
        (0..self.n_rows()).map(|r| self.get(r, col)).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.values.chunks_exact(self.n_cols().max(1)).take(self.n_rows())
    }
}

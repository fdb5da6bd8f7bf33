use std::collections::HashMap;

use crate::error::{Error, Result};

use super::matrix::{ActivationMatrix, RepresentationId};

/// Clean and stamped activations with rows matched by image id.
///
/// Row `i` of the view is clean row `i` and stamped row `stamped_rows[i]`.
#[derive(Debug, Clone)]
pub struct PairedView<'a> {
    pub clean: &'a ActivationMatrix,
    pub stamped: &'a ActivationMatrix,
    stamped_rows: Vec<usize>,
}

pub fn align_pairs<'a>(
    clean: &'a ActivationMatrix,
    stamped: &'a ActivationMatrix,
) -> Result<PairedView<'a>> {
    if clean.reps() != stamped.reps() {
        let first = clean
            .reps()
            .iter()
            .zip(stamped.reps())
            .position(|(a, b)| a != b);
        let detail = match first {
            Some(i) => format!("first difference at column {i}"),
            None => format!("{} vs {} columns", clean.n_cols(), stamped.n_cols()),
        };
        return Err(Error::MismatchedReps(detail));
    }
    if clean.n_rows() != stamped.n_rows() {
        return Err(Error::MismatchedImages(format!(
            "{} clean rows vs {} stamped rows",
            clean.n_rows(),
            stamped.n_rows()
        )));
    }
    let by_id: HashMap<&str, usize> = stamped
        .image_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let stamped_rows = clean
        .image_ids()
        .iter()
        .map(|id| {
            by_id.get(id.as_str()).copied().ok_or_else(|| {
                Error::MismatchedImages(format!("clean image `{id}` has no stamped counterpart"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PairedView {
        clean,
        stamped,
        stamped_rows,
    })
}

impl<'a> PairedView<'a> {
    pub fn n_pairs(&self) -> usize {
        self.stamped_rows.len()
    }

    pub fn reps(&self) -> &'a [RepresentationId] {
        self.clean.reps()
    }

    pub fn stamped_rows(&self) -> &[usize] {
        &self.stamped_rows
    }

    /// Positive (stamped) and negative (clean) samples of one representation,
    /// both in clean row order.
    pub fn samples(&self, col: usize) -> (Vec<f64>, Vec<f64>) {
        let pos = self
            .stamped_rows
            .iter()
            .map(|&r| self.stamped.get(r, col) as f64)
            .collect();
        let neg = (0..self.n_pairs())
            .map(|r| self.clean.get(r, col) as f64)
            .collect();
        (pos, neg)
    }
}

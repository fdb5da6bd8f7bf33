use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use image::{ImageFormat, RgbImage};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::Scenario;

use super::baseline::BaselineImage;
use super::render::{place_and_render, sample_text, BoundingBox};
use super::spec::{Rgba, WatermarkSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct ProbePair {
    pub id: String,
    pub index: u64,
    pub clean: RgbImage,
    pub stamped: RgbImage,
    pub bbox: BoundingBox,
    pub text: String,
}

/// Clean/stamped image pairs of one scenario, in baseline order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbePairSet {
    pub scenario: Scenario,
    pub seed: u64,
    pub string_length: usize,
    pub font_size: f32,
    pub color: Rgba,
    pub charset: Vec<char>,
    pub pairs: Vec<ProbePair>,
}

/// Stamps every baseline image. The `i`-th image uses random stream `i`.
pub fn build_probe_set(baseline: &[BaselineImage], spec: &WatermarkSpec) -> Result<ProbePairSet> {
    if baseline.is_empty() {
        return Err(Error::DegenerateData("baseline image set is empty".into()));
    }
    let pairs = baseline
        .par_iter()
        .enumerate()
        .map(|(i, img)| {
            let index = i as u64;
            let text = sample_text(spec, index);
            let (stamped, bbox) = place_and_render(&img.pixels, &text, spec, index).map_err(|e| match e {
                Error::TextTooLarge { width, height, frame, .. } => Error::TextTooLarge {
                    width,
                    height,
                    frame,
                    image_id: Some(img.id.clone()),
                },
                other => other,
            })?;
            Ok(ProbePair {
                id: img.id.clone(),
                index,
                clean: img.pixels.clone(),
                stamped,
                bbox,
                text,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbePairSet {
        scenario: spec.scenario(),
        seed: spec.seed(),
        string_length: spec.string_length(),
        font_size: spec.font_size(),
        color: spec.color(),
        charset: spec.charset().to_vec(),
        pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub index: u64,
    pub text: String,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub seed: u64,
}

/// `<scenario>/manifest.json` written next to the `clean/` and `stamped/` trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeManifest {
    pub scenario: Scenario,
    pub seed: u64,
    pub string_length: usize,
    pub font_size: f32,
    pub color: Rgba,
    pub charset: String,
    pub images: Vec<ManifestEntry>,
}

pub fn encode_png(img: &RgbImage) -> Vec<u8> {
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, ImageFormat::Png)
        .expect("PNG encoding into memory cannot fail");
    buf.into_inner()
}

impl ProbePairSet {
    pub fn manifest(&self) -> ProbeManifest {
        ProbeManifest {
            scenario: self.scenario,
            seed: self.seed,
            string_length: self.string_length,
            font_size: self.font_size,
            color: self.color,
            charset: self.charset.iter().collect(),
            images: self
                .pairs
                .iter()
                .map(|p| ManifestEntry {
                    id: p.id.clone(),
                    index: p.index,
                    text: p.text.clone(),
                    bbox: p.bbox,
                    seed: self.seed,
                })
                .collect(),
        }
    }

    /// Writes `<root>/<scenario>/{clean,stamped}/<id>.png` and the manifest;
    /// returns the scenario directory.
    pub fn write(&self, root: &Path) -> Result<PathBuf> {
        let dir = root.join(self.scenario.as_str());
        for sub in ["clean", "stamped"] {
            let d = dir.join(sub);
            fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
        }
        self.pairs.par_iter().try_for_each(|p| -> Result<()> {
            for (sub, img) in [("clean", &p.clean), ("stamped", &p.stamped)] {
                let path = dir.join(sub).join(format!("{}.png", p.id));
                fs::write(&path, encode_png(img)).map_err(|e| Error::io(&path, e))?;
            }
            Ok(())
        })?;
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&self.manifest()).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(dir)
    }
}

pub fn read_probe_manifest(scenario_dir: &Path) -> Result<ProbeManifest> {
    let path = scenario_dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Manifest {
        path,
        reason: e.to_string(),
    })
}

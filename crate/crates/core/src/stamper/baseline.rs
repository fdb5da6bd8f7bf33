use std::collections::HashSet;
use std::fs;
use std::path::Path;

use image::imageops::{self, FilterType};
use image::{DynamicImage, RgbImage};

use crate::error::{Error, Result};

use super::FRAME;

/// A clean `FRAME x FRAME` RGB image.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineImage {
    pub id: String,
    pub pixels: RgbImage,
}

impl BaselineImage {
    pub fn new(id: impl Into<String>, pixels: RgbImage) -> Result<Self> {
        let id = id.into();
        if pixels.dimensions() != (FRAME, FRAME) {
            return Err(Error::InvalidSpec(format!(
                "baseline `{id}` is {}x{}, expected {FRAME}x{FRAME}",
                pixels.width(),
                pixels.height()
            )));
        }
        Ok(Self { id, pixels })
    }

    /// Resizes the shorter side to the frame, then center-crops.
    pub fn from_dynamic(id: impl Into<String>, image: DynamicImage) -> Result<Self> {
        Self::new(id, fit_to_frame(image.to_rgb8()))
    }
}

pub fn fit_to_frame(img: RgbImage) -> RgbImage {
    let (w, h) = img.dimensions();
    if (w, h) == (FRAME, FRAME) {
        return img;
    }
    let short = w.min(h) as f64;
    let nw = ((w as f64 * FRAME as f64 / short).round() as u32).max(FRAME);
    let nh = ((h as f64 * FRAME as f64 / short).round() as u32).max(FRAME);
    let mut resized = imageops::resize(&img, nw, nh, FilterType::Triangle);
    let x = (nw - FRAME) / 2;
    let y = (nh - FRAME) / 2;
    imageops::crop(&mut resized, x, y, FRAME, FRAME).to_image()
}

const EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

/// Loads every PNG/JPEG in `dir` (non-recursive), ordered by file name. The
/// file stem is the image id.
pub fn load_baseline_dir(dir: &Path) -> Result<Vec<BaselineImage>> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        })
        .collect();
    paths.sort();

    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(paths.len());
    for path in paths {
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::InvalidSpec(format!("non UTF-8 file name {}", path.display())))?
            .to_string();
        if !seen.insert(id.clone()) {
            return Err(Error::InvalidSpec(format!("duplicate image id `{id}` in {}", dir.display())));
        }
        let img = image::open(&path).map_err(|e| Error::Image {
            path: path.clone(),
            reason: e.to_string(),
        })?;
        out.push(BaselineImage::from_dynamic(id, img)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wide_image_resized_and_cropped() {
        let img = RgbImage::from_fn(448, 300, |x, _| image::Rgb([(x / 2) as u8, 0, 0]));
        let out = fit_to_frame(img);
        assert_eq!(out.dimensions(), (FRAME, FRAME));
    }

    #[test]
    fn exact_size_untouched() {
        let img = RgbImage::from_fn(FRAME, FRAME, |x, y| image::Rgb([x as u8, y as u8, 7]));
        assert_eq!(fit_to_frame(img.clone()), img);
    }

    #[test]
    fn small_image_upscaled() {
        let out = fit_to_frame(RgbImage::new(30, 50));
        assert_eq!(out.dimensions(), (FRAME, FRAME));
    }

    #[test]
    fn wrong_size_rejected() {
        assert!(BaselineImage::new("a", RgbImage::new(10, 10)).is_err());
    }

    #[test]
    fn loads_sorted_by_name() {
        let dir = tempfile::tempdir().unwrap();
        RgbImage::new(300, 240).save(dir.path().join("b.png")).unwrap();
        RgbImage::new(224, 224).save(dir.path().join("a.jpg")).unwrap();
        fs::write(dir.path().join("notes.txt"), "x").unwrap();
        let imgs = load_baseline_dir(dir.path()).unwrap();
        let ids: Vec<_> = imgs.iter().map(|i| i.id.as_str()).collect();
        assert_eq!(ids, vec!["a", "b"]);
    }
}

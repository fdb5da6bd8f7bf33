use ab_glyph::{point, Font, OutlinedGlyph, PxScale, ScaleFont};
use image::RgbImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::spec::WatermarkSpec;
use super::FRAME;

const STREAM_TEXT: u64 = 1;
const STREAM_PLACEMENT: u64 = 2;

/// Independent generator per `(seed, image index, purpose)`, so stamping one
/// image never perturbs another.
pub(crate) fn image_rng(seed: u64, image_index: u64, purpose: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&image_index.to_le_bytes());
    key[16..24].copy_from_slice(&purpose.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Pixel rectangle `[x, x + w) x [y, y + h)`. Serialises as `[x, y, w, h]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[u32; 4]", into = "[u32; 4]")]
pub struct BoundingBox {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl From<[u32; 4]> for BoundingBox {
    fn from([x, y, w, h]: [u32; 4]) -> Self {
        Self { x, y, w, h }
    }
}

impl From<BoundingBox> for [u32; 4] {
    fn from(b: BoundingBox) -> Self {
        [b.x, b.y, b.w, b.h]
    }
}

impl BoundingBox {
    pub fn contains(&self, px: u32, py: u32) -> bool {
        px >= self.x && px < self.x + self.w && py >= self.y && py < self.y + self.h
    }

    pub fn within_frame(&self, frame: u32) -> bool {
        self.x + self.w <= frame && self.y + self.h <= frame
    }
}

/// `string_length` code points drawn uniformly with replacement from the charset.
pub fn sample_text(spec: &WatermarkSpec, image_index: u64) -> String {
    let mut rng = image_rng(spec.seed(), image_index, STREAM_TEXT);
    let charset = spec.charset();
    (0..spec.string_length())
        .map(|_| charset[rng.gen_range(0..charset.len())])
        .collect()
}

/// Text laid out on one baseline, with glyph outlines positioned relative to
/// the union of their pixel bounds.
pub struct RenderedText {
    glyphs: Vec<OutlinedGlyph>,
    min_x: f32,
    min_y: f32,
    pub width: u32,
    pub height: u32,
}

pub fn layout(spec: &WatermarkSpec, text: &str) -> RenderedText {
    let font = &spec.font().font;
    let scale = PxScale::from(spec.font_size());
    let scaled = font.as_scaled(scale);
    let mut caret = 0.0f32;
    let mut prev = None;
    let mut glyphs = Vec::new();
    for c in text.chars() {
        let id = scaled.glyph_id(c);
        if let Some(p) = prev {
            caret += scaled.kern(p, id);
        }
        let glyph = id.with_scale_and_position(scale, point(caret, scaled.ascent()));
        caret += scaled.h_advance(id);
        prev = Some(id);
        if let Some(outlined) = font.outline_glyph(glyph) {
            glyphs.push(outlined);
        }
    }
    let (mut min_x, mut min_y, mut max_x, mut max_y) = (f32::MAX, f32::MAX, f32::MIN, f32::MIN);
    for g in &glyphs {
        let b = g.px_bounds();
        min_x = min_x.min(b.min.x);
        min_y = min_y.min(b.min.y);
        max_x = max_x.max(b.max.x);
        max_y = max_y.max(b.max.y);
    }
    if glyphs.is_empty() {
        return RenderedText {
            glyphs,
            min_x: 0.0,
            min_y: 0.0,
            width: 0,
            height: 0,
        };
    }
    RenderedText {
        glyphs,
        min_x,
        min_y,
        width: (max_x - min_x) as u32,
        height: (max_y - min_y) as u32,
    }
}

impl RenderedText {
    /// Per-pixel coverage in `[0, 1]`, row-major `width x height`. Overlapping
    /// glyphs take the maximum coverage.
    pub fn coverage(&self) -> Vec<f32> {
        let (w, h) = (self.width as usize, self.height as usize);
        let mut cov = vec![0.0f32; w * h];
        for g in &self.glyphs {
            let b = g.px_bounds();
            let ox = (b.min.x - self.min_x) as usize;
            let oy = (b.min.y - self.min_y) as usize;
            g.draw(|x, y, c| {
                let (px, py) = (ox + x as usize, oy + y as usize);
                if px < w && py < h {
                    let slot = &mut cov[py * w + px];
                    *slot = slot.max(c.clamp(0.0, 1.0));
                }
            });
        }
        cov
    }
}

/// Uniform top-left corner such that a `width x height` box lies fully in the frame.
pub fn place_box(width: u32, height: u32, rng: &mut impl Rng) -> Result<BoundingBox> {
    if width > FRAME || height > FRAME {
        return Err(Error::TextTooLarge {
            width,
            height,
            frame: FRAME,
            image_id: None,
        });
    }
    Ok(BoundingBox {
        x: rng.gen_range(0..=FRAME - width),
        y: rng.gen_range(0..=FRAME - height),
        w: width,
        h: height,
    })
}

/// Draws `text` at a random fully visible position. Only pixels inside the
/// returned box can change; coverage is alpha-blended with the spec colour.
pub fn place_and_render(
    image: &RgbImage,
    text: &str,
    spec: &WatermarkSpec,
    image_index: u64,
) -> Result<(RgbImage, BoundingBox)> {
    let rendered = layout(spec, text);
    let mut rng = image_rng(spec.seed(), image_index, STREAM_PLACEMENT);
    let bbox = place_box(rendered.width, rendered.height, &mut rng)?;
    let coverage = rendered.coverage();
    let [r, g, b, a] = spec.color().0;
    let color = [r as f32, g as f32, b as f32];
    let opacity = a as f32 / 255.0;

    let mut out = image.clone();
    for dy in 0..bbox.h {
        for dx in 0..bbox.w {
            let cov = coverage[(dy * bbox.w + dx) as usize];
            if cov <= 0.0 {
                continue;
            }
            let alpha = cov * opacity;
            let px = out.get_pixel_mut(bbox.x + dx, bbox.y + dy);
            for (ch, &target) in px.0.iter_mut().zip(&color) {
                *ch = (*ch as f32 * (1.0 - alpha) + target * alpha).round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    Ok((out, bbox))
}

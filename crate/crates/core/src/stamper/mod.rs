//! Probe dataset generation: random character strings stamped onto baseline
//! images at fully visible random positions.

mod baseline;
pub mod charset;
mod font;
mod probe_set;
mod render;
mod spec;

/// Side length of every baseline and stamped image.
pub const FRAME: u32 = 224;

pub use baseline::{fit_to_frame, load_baseline_dir, BaselineImage};
pub use font::GlyphFont;
pub use probe_set::{
    build_probe_set, encode_png, read_probe_manifest, ManifestEntry, ProbeManifest, ProbePair,
    ProbePairSet,
};
pub use render::{layout, place_and_render, place_box, sample_text, BoundingBox, RenderedText};
pub use spec::{Rgba, WatermarkSpec, DEFAULT_COLOR, DEFAULT_FONT_SIZE, DEFAULT_STRING_LENGTH};

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::Scenario;

use super::charset::{default_charset, NUMERIC};
use super::font::GlyphFont;

pub const DEFAULT_STRING_LENGTH: usize = 7;
pub const DEFAULT_FONT_SIZE: f32 = 30.0;
pub const DEFAULT_COLOR: Rgba = Rgba([255, 255, 255, 255]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rgba(pub [u8; 4]);

/// A validated watermark description: what to draw and how.
#[derive(Debug, Clone)]
pub struct WatermarkSpec {
    scenario: Scenario,
    charset: Vec<char>,
    string_length: usize,
    font_size: f32,
    color: Rgba,
    seed: u64,
    font: GlyphFont,
}

impl WatermarkSpec {
    /// Spec with the scenario's default charset and the default length, size and colour.
    pub fn with_defaults(scenario: Scenario, font: GlyphFont, seed: u64) -> Result<Self> {
        Self::new(
            scenario,
            default_charset(scenario),
            DEFAULT_STRING_LENGTH,
            DEFAULT_FONT_SIZE,
            DEFAULT_COLOR,
            seed,
            font,
        )
    }

    pub fn new(
        scenario: Scenario,
        charset: Vec<char>,
        string_length: usize,
        font_size: f32,
        color: Rgba,
        seed: u64,
        font: GlyphFont,
    ) -> Result<Self> {
        if charset.is_empty() {
            return Err(Error::InvalidSpec(format!("{scenario}: charset is empty")));
        }
        if string_length == 0 {
            return Err(Error::InvalidSpec(format!("{scenario}: string_length must be at least 1")));
        }
        if !(font_size.is_finite() && font_size > 0.0) {
            return Err(Error::InvalidSpec(format!("{scenario}: font_size must be positive")));
        }
        let distinct: HashSet<char> = charset.iter().copied().collect();
        if distinct.len() != charset.len() {
            return Err(Error::InvalidSpec(format!("{scenario}: charset has duplicate characters")));
        }
        if scenario == Scenario::Numeric && distinct != NUMERIC.chars().collect() {
            return Err(Error::InvalidSpec(
                "numeric: charset must be exactly the digits 0-9".into(),
            ));
        }
        let missing = font.missing(&charset);
        if !missing.is_empty() {
            return Err(Error::Font(format!(
                "{scenario}: {} has no glyph for {:?}",
                font.path().display(),
                missing.iter().collect::<String>()
            )));
        }
        Ok(Self {
            scenario,
            charset,
            string_length,
            font_size,
            color,
            seed,
            font,
        })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn charset(&self) -> &[char] {
        &self.charset
    }

    pub fn string_length(&self) -> usize {
        self.string_length
    }

    pub fn font_size(&self) -> f32 {
        self.font_size
    }

    pub fn color(&self) -> Rgba {
        self.color
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn font(&self) -> &GlyphFont {
        &self.font
    }
}

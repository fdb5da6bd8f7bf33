use std::fs;
use std::path::{Path, PathBuf};

use ab_glyph::{Font, FontArc};

use crate::error::{Error, Result};

/// A loaded font file.
#[derive(Clone)]
pub struct GlyphFont {
    pub(crate) font: FontArc,
    path: PathBuf,
}

impl std::fmt::Debug for GlyphFont {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GlyphFont").field("path", &self.path).finish()
    }
}

impl GlyphFont {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let font = FontArc::try_from_vec(bytes)
            .map_err(|e| Error::Font(format!("{}: {e}", path.display())))?;
        Ok(Self {
            font,
            path: path.to_path_buf(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// True when the font maps `c` to a glyph with a visible outline.
    pub fn renders(&self, c: char) -> bool {
        let id = self.font.glyph_id(c);
        id.0 != 0 && self.font.outline(id).is_some()
    }

    pub fn missing<'a>(&self, chars: impl IntoIterator<Item = &'a char>) -> Vec<char> {
        chars.into_iter().copied().filter(|&c| !self.renders(c)).collect()
    }
}

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// The 20 most frequent letters of English text.
pub const LATIN: &str = "etaoinshrdlcumwfgypb";
/// The 20 most frequent characters of modern written Chinese.
pub const CHINESE: &str = "的一是不了在人有我他这个们中来上大为和国";
/// 20 frequent standalone Devanagari letters.
pub const HINDI: &str = "करसनतमहलयदपवगबजअआइउए";
pub const NUMERIC: &str = "0123456789";

pub fn default_charset(scenario: Scenario) -> Vec<char> {
    match scenario {
        Scenario::Chinese => CHINESE,
        Scenario::Latin => LATIN,
        Scenario::Hindi => HINDI,
        Scenario::Numeric => NUMERIC,
    }
    .chars()
    .collect()
}

/// Parses a charset file: UTF-8, one code point per line. Blank lines are
/// skipped and surrounding whitespace is ignored.
pub fn parse_charset(text: &str) -> std::result::Result<Vec<char>, String> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut chars = line.chars();
        let c = chars.next().expect("non-empty line");
        if chars.next().is_some() {
            return Err(format!("line {}: `{line}` is not a single code point", lineno + 1));
        }
        out.push(c);
    }
    Ok(out)
}

pub fn load_charset(path: &Path) -> Result<Vec<char>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_charset(&text).map_err(|reason| Error::InvalidSpec(format!("{}: {reason}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_have_expected_sizes() {
        for s in [Scenario::Chinese, Scenario::Latin, Scenario::Hindi] {
            let cs = default_charset(s);
            assert_eq!(cs.len(), 20, "{s}");
            let mut dedup = cs.clone();
            dedup.sort_unstable();
            dedup.dedup();
            assert_eq!(dedup.len(), 20, "{s}");
        }
        assert_eq!(default_charset(Scenario::Numeric).len(), 10);
    }

    #[test]
    fn parse_lines() {
        assert_eq!(parse_charset("a\n\n b \n的\n").unwrap(), vec!['a', 'b', '的']);
        assert!(parse_charset("ab\n").is_err());
    }
}

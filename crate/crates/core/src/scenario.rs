use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The four watermark families probed by the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Chinese,
    Latin,
    Hindi,
    Numeric,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::Chinese,
        Scenario::Latin,
        Scenario::Hindi,
        Scenario::Numeric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Chinese => "chinese",
            Scenario::Latin => "latin",
            Scenario::Hindi => "hindi",
            Scenario::Numeric => "numeric",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "chinese" => Ok(Scenario::Chinese),
            "latin" => Ok(Scenario::Latin),
            "hindi" => Ok(Scenario::Hindi),
            "numeric" => Ok(Scenario::Numeric),
            other => Err(format!("unknown scenario `{other}`")),
        }
    }
}

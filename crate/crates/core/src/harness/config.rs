use serde::{Deserialize, Serialize};

use crate::busemann::Schedule;
use crate::cross_ratio::{Arithmetic, ScanMode};
use crate::error::{Error, Result};
use crate::tolerance::Tolerance;

pub const MAX_DIMENSION: usize = 8;

/// Exhaustive scans, or `count` seeded samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Mode {
    Exhaustive,
    Sample { count: usize },
}

impl std::str::FromStr for Mode {
    type Err = Error;

    /// `exhaustive`, `sample:<count>` or `sample(<count>)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "exhaustive" {
            return Ok(Mode::Exhaustive);
        }
        let count = t
            .strip_prefix("sample:")
            .or_else(|| t.strip_prefix("sample(").and_then(|r| r.strip_suffix(')')))
            .ok_or_else(|| Error::Input(format!("unknown mode `{s}`")))?;
        let count = count.trim().parse().map_err(|_| Error::Input(format!("bad sample count in `{s}`")))?;
        Ok(Mode::Sample { count })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub tolerance_rel: f64,
    pub tolerance_abs: f64,
    pub seed: u64,
    pub dimension: usize,
    pub mode: Mode,
    pub schedule: Schedule,
    pub arithmetic: Arithmetic,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            tolerance_rel: 1e-9,
            tolerance_abs: 1e-15,
            seed: 0,
            dimension: 3,
            mode: Mode::Exhaustive,
            schedule: Schedule::default(),
            arithmetic: Arithmetic::Float,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance_rel > 0.0 && self.tolerance_abs > 0.0) {
            return Err(Error::Input("tolerances must be positive".into()));
        }
        if !(1..=MAX_DIMENSION).contains(&self.dimension) {
            return Err(Error::Input(format!("dimension must be in 1..={MAX_DIMENSION}, got {}", self.dimension)));
        }
        if let Mode::Sample { count: 0 } = self.mode {
            return Err(Error::Input("sample count must be at least 1".into()));
        }
        if !(self.schedule.t0 > 0.0) || self.schedule.steps == 0 {
            return Err(Error::Input("schedule needs t0 > 0 and at least one step".into()));
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.tolerance_rel, self.tolerance_abs)
    }

    pub fn scan_mode(&self) -> ScanMode {
        match self.mode {
            Mode::Exhaustive => ScanMode::Exhaustive,
            Mode::Sample { count } => ScanMode::Sample { count, seed: self.seed },
        }
    }
}

//! Run configuration read by the command-line front end.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::build1d::Build1d;
use crate::buildmd::MdParams;
use crate::error::{Error, Result};
use crate::gallery::CantorModified;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    #[default]
    Build1d,
    Buildmd,
    Cantor,
    Sine,
}

/// How numbers are written in CSV columns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumberFormat {
    /// Exact `p/q`.
    #[default]
    Rational,
    /// Fixed-point decimal with `digits` places.
    Decimal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportFormats {
    #[serde(default)]
    pub numbers: NumberFormat,
    #[serde(default = "default_digits")]
    pub digits: u32,
}

fn default_digits() -> u32 {
    12
}

impl Default for ExportFormats {
    fn default() -> Self {
        ExportFormats { numbers: NumberFormat::Rational, digits: default_digits() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SineBlock {
    /// Segments per block for arc-length estimates.
    #[serde(default = "default_segments")]
    pub segments: usize,
}

fn default_segments() -> usize {
    1 << 16
}

impl Default for SineBlock {
    fn default() -> Self {
        SineBlock { segments: default_segments() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub construction: Construction,
    #[serde(default)]
    pub build1d: Build1d,
    #[serde(default)]
    pub buildmd: MdParams,
    #[serde(default)]
    pub cantor: CantorModified,
    #[serde(default)]
    pub sine: SineBlock,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Offset into the Halton sequence used for sampling.
    #[serde(default)]
    pub seed: u64,
    /// Sample budget per oscillation estimate.
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default)]
    pub formats: ExportFormats,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_budget() -> usize {
    256
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            construction: Construction::default(),
            build1d: Build1d::default(),
            buildmd: MdParams::default(),
            cantor: CantorModified::default(),
            sine: SineBlock::default(),
            output_dir: default_output(),
            seed: 0,
            budget: default_budget(),
            formats: ExportFormats::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.build1d.params.validate()?;
        self.build1d.profile.validate()?;
        self.buildmd.validate()?;
        if self.cantor.depth_cap == 0 || self.cantor.depth_cap > 200 {
            return Err(Error::param("cantor.depth_cap", "1 <= depth_cap <= 200"));
        }
        if self.sine.segments == 0 {
            return Err(Error::param("sine.segments", "segments >= 1"));
        }
        if self.budget == 0 {
            return Err(Error::param("budget", "budget >= 1"));
        }
        if self.formats.digits == 0 || self.formats.digits > 60 {
            return Err(Error::param("formats.digits", "1 <= digits <= 60"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ARule;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
        assert_eq!(RunConfig::from_json("{}").unwrap(), c);
    }

    #[test]
    fn custom_round_trip() {
        let mut c = RunConfig { construction: Construction::Buildmd, seed: 7, ..Default::default() };
        c.buildmd.a_rule = ARule::Constant { value: "1/16".parse().unwrap() };
        c.build1d.params.depth_cap = 20;
        c.formats.numbers = NumberFormat::Decimal;
        let text = c.to_json();
        let back = RunConfig::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn bad_parameters_are_named() {
        let e = RunConfig::from_json(r#"{"buildmd": {"whitney_base": 1}}"#).unwrap_err();
        assert!(e.to_string().contains("whitney_base"));
        let e = RunConfig::from_json(r#"{"build1d": {"a_rule": {"kind": "constant", "value": "3/2"}}}"#).unwrap_err();
        assert!(e.to_string().contains("a_n"));
        assert!(matches!(RunConfig::from_json("{\"construction\": \"nope\"}"), Err(Error::Parse(_))));
    }
}

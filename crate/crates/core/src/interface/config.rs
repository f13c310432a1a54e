//! TOML audit configuration.
//!
//! ```toml
//! tolerance = 1e-9
//!
//! [weights]
//! w11 = 2.0
//! w10 = -1.0
//! w01 = 0.0
//! w00 = 1.0
//!
//! [claims]
//! kind = "outcome"
//! values = [1]
//!
//! [pattern]
//! kind = "prioritarian"
//! k = 2.0
//!
//! [rulespace]
//! kind = "group_rates"
//! points = 11
//! ```
//!
//! `[[pattern]]` may be repeated to evaluate several patterns. Per-group
//! weights go in `[weights.per_group.<label>]`, and a `[schema]` section maps
//! CSV columns.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use crate::data::{ClaimsDifferentiator, CsvSchema, Dataset, GroupLabel, UtilityWeights};
use crate::error::{Error, Result};
use crate::optimizer::{RuleKind, RuleSpace};
use crate::patterns::{PatternSpec, DEFAULT_TOLERANCE};

use super::report::AuditSpec;

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_claims() -> ClaimsDifferentiator {
    ClaimsDifferentiator::none()
}

pub(crate) fn default_patterns() -> Vec<PatternSpec> {
    vec![PatternSpec::Egalitarian, PatternSpec::Maximin]
}

fn one_or_many<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Vec<PatternSpec>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        One(PatternSpec),
        Many(Vec<PatternSpec>),
    }
    Ok(match Raw::deserialize(de)? {
        Raw::One(p) => vec![p],
        Raw::Many(ps) => ps,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub weights: UtilityWeights,
    #[serde(default = "default_claims")]
    pub claims: ClaimsDifferentiator,
    #[serde(default = "default_patterns", deserialize_with = "one_or_many")]
    pub pattern: Vec<PatternSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rulespace: Option<RuleSpaceSpec>,
    #[serde(default)]
    pub schema: CsvSchema,
}

impl AuditConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: AuditConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_owned()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read `{}`: {e}", path.display())))?;
        AuditConfig::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::Config(format!("tolerance: {} must be finite and >= 0", self.tolerance)));
        }
        if self.pattern.is_empty() {
            return Err(Error::Config("pattern: at least one pattern is required".into()));
        }
        for p in &self.pattern {
            p.validate().map_err(|e| Error::Config(format!("pattern: {e}")))?;
        }
        Ok(())
    }

    pub fn audit_spec(&self) -> AuditSpec {
        AuditSpec {
            weights: self.weights.clone(),
            claims: self.claims.clone(),
            patterns: self.pattern.clone(),
            tolerance: self.tolerance,
        }
    }

    pub fn rulespace(&self) -> Result<&RuleSpaceSpec> {
        self.rulespace
            .as_ref()
            .ok_or_else(|| Error::Config("rulespace: section is required for rule search".into()))
    }
}

/// Declarative rule space: an explicit per-group `grid`, shared `values`, or
/// `points` evenly spaced values on `[0, 1]` (11 when nothing is given).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleSpaceSpec {
    pub kind: RuleKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<BTreeMap<GroupLabel, Vec<f64>>>,
}

impl RuleSpaceSpec {
    pub fn uniform(kind: RuleKind, points: usize) -> Self {
        RuleSpaceSpec {
            kind,
            points: Some(points),
            values: None,
            grid: None,
        }
    }

    pub fn build(&self, ds: &Dataset) -> Result<RuleSpace> {
        match (&self.grid, &self.values, self.points) {
            (Some(grid), None, None) => Ok(RuleSpace {
                kind: self.kind,
                grid: grid.clone(),
            }),
            (None, Some(values), None) => Ok(RuleSpace::with_values(self.kind, ds.groups(), values)),
            (None, None, points) => Ok(RuleSpace::uniform(self.kind, ds.groups(), points.unwrap_or(11))),
            _ => Err(Error::Config("rulespace: give only one of `grid`, `values` or `points`".into())),
        }
    }
}

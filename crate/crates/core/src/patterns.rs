//! Patterns of justice evaluated on a utility profile.
//!
//! Each pattern yields a degree `F`. Egalitarianism is the only one where
//! lower is better. Maximin and prioritarian satisfaction quantify over a rule
//! space and live in [`crate::optimizer`].

use serde::{Deserialize, Serialize};

use crate::data::Stratum;
use crate::error::{Error, Result};
use crate::utility::{ProfileEntry, UtilityProfile};

/// Default absolute tolerance for exact-arithmetic inputs.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PatternSpec {
    Egalitarian,
    /// Egalitarianism measured as the max/min ratio of expected utilities.
    EgalitarianRatio,
    Maximin,
    Prioritarian { k: f64 },
    Sufficientarian { t: f64 },
}

impl PatternSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PatternSpec::Prioritarian { k } if !(k > 1.0 && k.is_finite()) => Err(Error::InvalidK(k)),
            PatternSpec::Sufficientarian { t } if !t.is_finite() => {
                Err(Error::InvalidPattern(format!("threshold t = {t} is not finite")))
            }
            _ => Ok(()),
        }
    }

    pub fn direction(&self) -> Direction {
        match self {
            PatternSpec::Egalitarian | PatternSpec::EgalitarianRatio => Direction::LowerBetter,
            _ => Direction::HigherBetter,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PatternSpec::Egalitarian => "egalitarian",
            PatternSpec::EgalitarianRatio => "egalitarian_ratio",
            PatternSpec::Maximin => "maximin",
            PatternSpec::Prioritarian { .. } => "prioritarian",
            PatternSpec::Sufficientarian { .. } => "sufficientarian",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LowerBetter,
    HigherBetter,
}

impl Direction {
    /// Whether `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::LowerBetter => a < b,
            Direction::HigherBetter => a > b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumValue {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum: Option<Stratum>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternResult {
    pub pattern: PatternSpec,
    pub value: f64,
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub satisfied: Option<bool>,
    pub per_stratum: Vec<StratumValue>,
}

fn check_tolerance(tol: f64) -> Result<()> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPattern(format!("tolerance {tol} must be finite and >= 0")))
    }
}

fn stratum_entries<'a>(profile: &'a UtilityProfile, stratum: &'a Option<Stratum>) -> Vec<&'a ProfileEntry> {
    profile.in_stratum(stratum).collect()
}

fn label(stratum: &Option<Stratum>) -> String {
    stratum.as_ref().map_or_else(|| "all".to_owned(), |s| format!("j={s}"))
}

/// Largest pairwise gap `|E(U|j,a) - E(U|j,b)|` within each stratum, then the
/// worst stratum. With two groups this is the plain absolute difference.
pub fn egalitarian_metric(profile: &UtilityProfile, tol: f64) -> Result<PatternResult> {
    check_tolerance(tol)?;
    let mut per_stratum = Vec::new();
    for stratum in profile.strata() {
        let entries = stratum_entries(profile, &stratum);
        if entries.len() < profile.groups.len() {
            return Err(Error::NotDefined(format!(
                "stratum {} lacks an expected utility for some group",
                label(&stratum)
            )));
        }
        let (lo, hi) = entries.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
            (lo.min(e.expected_utility), hi.max(e.expected_utility))
        });
        let gap = if entries.is_empty() { 0.0 } else { hi - lo };
        per_stratum.push(StratumValue { stratum, value: gap });
    }
    let value = per_stratum.iter().map(|s| s.value).fold(0.0, f64::max);
    Ok(PatternResult {
        pattern: PatternSpec::Egalitarian,
        value,
        direction: Direction::LowerBetter,
        satisfied: Some(value <= tol),
        per_stratum,
    })
}

/// Ratio variant: `max / min` expected utility per stratum (1 is equality).
/// Only defined when every expected utility is strictly positive.
pub fn egalitarian_ratio(profile: &UtilityProfile, tol: f64) -> Result<PatternResult> {
    check_tolerance(tol)?;
    let mut per_stratum = Vec::new();
    for stratum in profile.strata() {
        let entries = stratum_entries(profile, &stratum);
        if entries.len() < profile.groups.len() {
            return Err(Error::NotDefined(format!(
                "stratum {} lacks an expected utility for some group",
                label(&stratum)
            )));
        }
        if let Some(e) = entries.iter().find(|e| e.expected_utility <= 0.0) {
            return Err(Error::NotDefined(format!(
                "utility ratio needs positive utilities; `{}` has {}",
                e.key(),
                e.expected_utility
            )));
        }
        let (lo, hi) = entries.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
            (lo.min(e.expected_utility), hi.max(e.expected_utility))
        });
        let ratio = if entries.is_empty() { 1.0 } else { hi / lo };
        per_stratum.push(StratumValue { stratum, value: ratio });
    }
    let value = per_stratum.iter().map(|s| s.value).fold(1.0, f64::max);
    Ok(PatternResult {
        pattern: PatternSpec::EgalitarianRatio,
        value,
        direction: Direction::LowerBetter,
        satisfied: Some(value - 1.0 <= tol),
        per_stratum,
    })
}

fn min_of(entries: &[&ProfileEntry]) -> f64 {
    entries.iter().map(|e| e.expected_utility).fold(f64::INFINITY, f64::min)
}

/// Expected utility of the worst-off relevant group.
pub fn maximin_metric(profile: &UtilityProfile) -> Result<PatternResult> {
    if profile.entries.is_empty() {
        return Err(Error::NotDefined("maximin over an empty profile".into()));
    }
    let per_stratum = profile
        .strata()
        .into_iter()
        .filter_map(|stratum| {
            let entries = stratum_entries(profile, &stratum);
            let value = (!entries.is_empty()).then(|| min_of(&entries))?;
            Some(StratumValue { stratum, value })
        })
        .collect();
    let all: Vec<&ProfileEntry> = profile.entries.iter().collect();
    Ok(PatternResult {
        pattern: PatternSpec::Maximin,
        value: min_of(&all),
        direction: Direction::HigherBetter,
        satisfied: None,
        per_stratum,
    })
}

/// `k` times the worst-off expected utility plus the others, unweighted.
/// On ties `k` goes to exactly one minimal entry.
fn prioritarian_value(values: impl Iterator<Item = f64>, k: f64) -> f64 {
    let values: Vec<f64> = values.collect();
    let Some((argmin, &min)) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
    else {
        return 0.0;
    };
    let rest: f64 = values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != argmin)
        .map(|(_, v)| v)
        .sum();
    k * min + rest
}

pub fn prioritarian_metric(profile: &UtilityProfile, k: f64) -> Result<PatternResult> {
    let spec = PatternSpec::Prioritarian { k };
    spec.validate()?;
    if profile.entries.is_empty() {
        return Err(Error::NotDefined("prioritarian aggregate over an empty profile".into()));
    }
    let per_stratum = profile
        .strata()
        .into_iter()
        .map(|stratum| {
            let value = prioritarian_value(profile.in_stratum(&stratum).map(|e| e.expected_utility), k);
            StratumValue { stratum, value }
        })
        .collect();
    Ok(PatternResult {
        pattern: spec,
        value: prioritarian_value(profile.entries.iter().map(|e| e.expected_utility), k),
        direction: Direction::HigherBetter,
        satisfied: None,
        per_stratum,
    })
}

/// Number of relevant groups whose expected utility reaches `t` (inclusive).
pub fn sufficientarian_metric(profile: &UtilityProfile, t: f64) -> Result<PatternResult> {
    let spec = PatternSpec::Sufficientarian { t };
    spec.validate()?;
    let count = |it: &mut dyn Iterator<Item = &ProfileEntry>| it.filter(|e| e.expected_utility >= t).count();
    let per_stratum = profile
        .strata()
        .into_iter()
        .map(|stratum| {
            let value = count(&mut profile.in_stratum(&stratum)) as f64;
            StratumValue { stratum, value }
        })
        .collect();
    let reached = count(&mut profile.entries.iter());
    Ok(PatternResult {
        pattern: spec,
        value: reached as f64,
        direction: Direction::HigherBetter,
        satisfied: Some(reached == profile.entries.len()),
        per_stratum,
    })
}

/// Evaluates any pattern; `tol` is used by the criteria decidable from the
/// profile alone.
pub fn evaluate_pattern(profile: &UtilityProfile, spec: &PatternSpec, tol: f64) -> Result<PatternResult> {
    match *spec {
        PatternSpec::Egalitarian => egalitarian_metric(profile, tol),
        PatternSpec::EgalitarianRatio => egalitarian_ratio(profile, tol),
        PatternSpec::Maximin => maximin_metric(profile),
        PatternSpec::Prioritarian { k } => prioritarian_metric(profile, k),
        PatternSpec::Sufficientarian { t } => sufficientarian_metric(profile, t),
    }
}

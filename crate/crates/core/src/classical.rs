//! The eight classical group fairness criteria as absolute-difference gaps of
//! empirical conditional rates, computed straight from record counts.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::{ClaimsDifferentiator, Dataset, GroupLabel, Record, Stratum};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassicalCriterion {
    /// `P(D=1 | A=a)`
    StatisticalParity,
    /// `P(D=1 | L=l, A=a)` for each listed `l`
    ConditionalStatisticalParity { attr: String, values: Vec<String> },
    /// `P(D=1 | Y=1, A=a)`
    EqualityOfOpportunity,
    /// `P(D=1 | Y=0, A=a)`
    FprParity,
    /// `P(D=1 | Y=y, A=a)` for `y` in {0, 1}
    EqualizedOdds,
    /// `P(Y=1 | D=1, A=a)`
    PredictiveParity,
    /// `P(Y=1 | D=0, A=a)`
    ForParity,
    /// `P(Y=1 | D=d, A=a)` for `d` in {0, 1}
    Sufficiency,
}

impl fmt::Display for ClassicalCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

/// What a criterion conditions on, and which indicator it averages.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    Decision,
    Outcome,
}

impl ClassicalCriterion {
    pub fn display_name(&self) -> &'static str {
        match self {
            ClassicalCriterion::StatisticalParity => "Statistical parity",
            ClassicalCriterion::ConditionalStatisticalParity { .. } => "Conditional statistical parity",
            ClassicalCriterion::EqualityOfOpportunity => "Equality of opportunity",
            ClassicalCriterion::FprParity => "False positive rate parity",
            ClassicalCriterion::EqualizedOdds => "Equalized odds",
            ClassicalCriterion::PredictiveParity => "Predictive parity",
            ClassicalCriterion::ForParity => "False omission rate parity",
            ClassicalCriterion::Sufficiency => "Sufficiency",
        }
    }

    /// The seven criteria that need no legitimate attribute.
    pub fn unconditional() -> [ClassicalCriterion; 7] {
        [
            ClassicalCriterion::StatisticalParity,
            ClassicalCriterion::EqualityOfOpportunity,
            ClassicalCriterion::FprParity,
            ClassicalCriterion::EqualizedOdds,
            ClassicalCriterion::PredictiveParity,
            ClassicalCriterion::ForParity,
            ClassicalCriterion::Sufficiency,
        ]
    }

    /// The claims differentiator `(J, j)` whose strata this criterion compares.
    pub fn claims(&self) -> ClaimsDifferentiator {
        match self {
            ClassicalCriterion::StatisticalParity => ClaimsDifferentiator::none(),
            ClassicalCriterion::ConditionalStatisticalParity { attr, values } => {
                ClaimsDifferentiator::legitimate(attr.clone(), values)
            }
            ClassicalCriterion::EqualityOfOpportunity => ClaimsDifferentiator::outcome(&[1]),
            ClassicalCriterion::FprParity => ClaimsDifferentiator::outcome(&[0]),
            ClassicalCriterion::EqualizedOdds => ClaimsDifferentiator::outcome(&[0, 1]),
            ClassicalCriterion::PredictiveParity => ClaimsDifferentiator::decision(&[1]),
            ClassicalCriterion::ForParity => ClaimsDifferentiator::decision(&[0]),
            ClassicalCriterion::Sufficiency => ClaimsDifferentiator::decision(&[0, 1]),
        }
    }

    fn target(&self) -> Target {
        match self {
            ClassicalCriterion::PredictiveParity | ClassicalCriterion::ForParity | ClassicalCriterion::Sufficiency => {
                Target::Outcome
            }
            _ => Target::Decision,
        }
    }

    fn validate(&self, ds: &Dataset) -> Result<()> {
        if let ClassicalCriterion::ConditionalStatisticalParity { attr, values } = self {
            let declared = ds
                .legit_schema()
                .get(attr)
                .ok_or_else(|| Error::InvalidClaims(format!("`{attr}` is not a declared legitimate attribute")))?;
            if values.is_empty() {
                return Err(Error::InvalidClaims(format!("no values of `{attr}` to condition on")));
            }
            if let Some(v) = values.iter().find(|v| !declared.contains(*v)) {
                return Err(Error::InvalidClaims(format!("value `{v}` not declared for `{attr}`")));
            }
        }
        Ok(())
    }

    fn describe_cell(&self, stratum: &Option<Stratum>) -> String {
        match (self, stratum) {
            (ClassicalCriterion::ConditionalStatisticalParity { attr, .. }, Some(l)) => format!("{attr}={l}"),
            (_, None) => "any value".into(),
            (c, Some(s)) if c.target() == Target::Decision => format!("y={s}"),
            (_, Some(s)) => format!("d={s}"),
        }
    }

    /// Whether `r` falls into the conditioning cell `stratum`.
    fn conditions_on(&self, r: &Record, stratum: &Option<Stratum>) -> bool {
        match (self, stratum) {
            (_, None) => true,
            (ClassicalCriterion::ConditionalStatisticalParity { attr, .. }, Some(l)) => {
                r.legit.get(attr).is_some_and(|v| *v == l.0)
            }
            (c, Some(s)) if c.target() == Target::Decision => Stratum::bit(r.outcome) == *s,
            (_, Some(s)) => Stratum::bit(r.decision) == *s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupRate {
    pub group: GroupLabel,
    pub rate: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumGap {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum: Option<Stratum>,
    pub gap: f64,
    pub rates: Vec<GroupRate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub criterion: ClassicalCriterion,
    pub gaps: Vec<StratumGap>,
    pub overall: f64,
    pub satisfied: bool,
}

pub fn classical_gap(ds: &Dataset, criterion: &ClassicalCriterion, tol: f64) -> Result<GapReport> {
    criterion.validate(ds)?;
    let target = criterion.target();
    let mut gaps = Vec::new();
    for stratum in criterion.claims().strata() {
        let mut rates = Vec::with_capacity(ds.groups().len());
        for group in ds.groups() {
            let (mut hits, mut n) = (0usize, 0usize);
            for r in ds.records() {
                if &r.group == group && criterion.conditions_on(r, &stratum) {
                    n += 1;
                    let indicator = match target {
                        Target::Decision => r.decision,
                        Target::Outcome => r.outcome,
                    };
                    hits += indicator as usize;
                }
            }
            if n == 0 {
                return Err(Error::UndefinedRate {
                    group: group.0.clone(),
                    cell: criterion.describe_cell(&stratum),
                });
            }
            rates.push(GroupRate {
                group: group.clone(),
                rate: hits as f64 / n as f64,
                n,
            });
        }
        let lo = rates.iter().map(|r| r.rate).fold(f64::INFINITY, f64::min);
        let hi = rates.iter().map(|r| r.rate).fold(f64::NEG_INFINITY, f64::max);
        gaps.push(StratumGap {
            stratum,
            gap: hi - lo,
            rates,
        });
    }
    let overall = gaps.iter().map(|g| g.gap).fold(0.0, f64::max);
    Ok(GapReport {
        criterion: criterion.clone(),
        gaps,
        overall,
        satisfied: overall <= tol,
    })
}

//! When does the egalitarian pattern reduce to a classical parity criterion?
//!
//! Each classical criterion corresponds to one claims differentiator `(J, j)`
//! plus conditions on the utility weights: some entries must differ, some must
//! coincide, and the constrained entries must not depend on the group. When a
//! row's conditions hold, `F_egal = |w_x - w_y| * gap` in every stratum, with
//! the multiplier taken from the two weights the stratum's utility interpolates
//! between. [`verify_proposition`] checks that identity on concrete data and
//! [`randomized_equivalence_suite`] runs it in bulk.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{classical_gap, ClassicalCriterion};
use crate::data::{
    generate_synthetic, AcceptancePolicy, ClaimsDifferentiator, ClaimsKind, Dataset, GroupSpec, LegitAttrSpec,
    Stratum, SyntheticSpec, UtilityWeights, WeightTable,
};
use crate::error::{Error, Result};
use crate::patterns::egalitarian_metric;
use crate::utility::utility_profile;

/// Weights closer than this but not equal trigger an entry-noise warning.
pub const NEAR_EQUALITY: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cell {
    W11,
    W10,
    W01,
    W00,
}

impl Cell {
    fn name(self) -> &'static str {
        match self {
            Cell::W11 => "w11",
            Cell::W10 => "w10",
            Cell::W01 => "w01",
            Cell::W00 => "w00",
        }
    }

    fn of(self, t: &WeightTable) -> f64 {
        match self {
            Cell::W11 => t.w11,
            Cell::W10 => t.w10,
            Cell::W01 => t.w01,
            Cell::W00 => t.w00,
        }
    }
}

const ALL_CELLS: [Cell; 4] = [Cell::W11, Cell::W10, Cell::W01, Cell::W00];

/// One row of the mapping: conditions and the cell pair per stratum whose
/// difference is the multiplier.
struct Row {
    criterion: ClassicalCriterion,
    equal: &'static [(Cell, Cell)],
    unequal: &'static [(Cell, Cell)],
    independent: (&'static str, &'static [Cell]),
    /// `(stratum, (x, y))`, stratum `None` for the unstratified rows.
    multipliers: Vec<(Option<Stratum>, (Cell, Cell))>,
}

fn row_for(cd: &ClaimsDifferentiator) -> Option<Row> {
    use Cell::*;
    let values: Vec<&str> = cd.values.iter().map(|s| s.0.as_str()).collect();
    let parity = |criterion, multipliers| Row {
        criterion,
        equal: &[(W11, W10), (W01, W00)],
        unequal: &[(W11, W01)],
        independent: ("w_dy ⊥ a", &ALL_CELLS),
        multipliers,
    };
    let row = match (&cd.kind, values.as_slice()) {
        (ClaimsKind::None, _) => parity(ClassicalCriterion::StatisticalParity, vec![(None, (W11, W01))]),
        (ClaimsKind::Legitimate(attr), vs) if !vs.is_empty() => parity(
            ClassicalCriterion::ConditionalStatisticalParity {
                attr: attr.clone(),
                values: vs.iter().map(|v| v.to_string()).collect(),
            },
            cd.values.iter().map(|s| (Some(s.clone()), (W11, W01))).collect(),
        ),
        (ClaimsKind::Outcome, ["1"]) => Row {
            criterion: ClassicalCriterion::EqualityOfOpportunity,
            equal: &[],
            unequal: &[(W11, W01)],
            independent: ("w_d1 ⊥ a", &[W11, W01]),
            multipliers: vec![(Some(Stratum::bit(true)), (W11, W01))],
        },
        (ClaimsKind::Outcome, ["0"]) => Row {
            criterion: ClassicalCriterion::FprParity,
            equal: &[],
            unequal: &[(W10, W00)],
            independent: ("w_d0 ⊥ a", &[W10, W00]),
            multipliers: vec![(Some(Stratum::bit(false)), (W10, W00))],
        },
        (ClaimsKind::Outcome, ["0", "1"]) => Row {
            criterion: ClassicalCriterion::EqualizedOdds,
            equal: &[],
            unequal: &[(W11, W01), (W10, W00)],
            independent: ("w_dy ⊥ a", &ALL_CELLS),
            multipliers: vec![
                (Some(Stratum::bit(false)), (W10, W00)),
                (Some(Stratum::bit(true)), (W11, W01)),
            ],
        },
        (ClaimsKind::Decision, ["1"]) => Row {
            criterion: ClassicalCriterion::PredictiveParity,
            equal: &[],
            unequal: &[(W11, W10)],
            independent: ("w_1y ⊥ a", &[W11, W10]),
            multipliers: vec![(Some(Stratum::bit(true)), (W11, W10))],
        },
        (ClaimsKind::Decision, ["0"]) => Row {
            criterion: ClassicalCriterion::ForParity,
            equal: &[],
            unequal: &[(W01, W00)],
            independent: ("w_0y ⊥ a", &[W01, W00]),
            multipliers: vec![(Some(Stratum::bit(false)), (W01, W00))],
        },
        (ClaimsKind::Decision, ["0", "1"]) => Row {
            criterion: ClassicalCriterion::Sufficiency,
            equal: &[],
            unequal: &[(W11, W10), (W01, W00)],
            independent: ("w_dy ⊥ a", &ALL_CELLS),
            multipliers: vec![
                (Some(Stratum::bit(false)), (W01, W00)),
                (Some(Stratum::bit(true)), (W11, W10)),
            ],
        },
        _ => return None,
    };
    Some(row)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub condition: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumMultiplier {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum: Option<Stratum>,
    pub multiplier: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightConditionFinding {
    pub matched: Option<ClassicalCriterion>,
    /// The criterion whose `(J, j)` the supplied differentiator selects,
    /// whether or not its weight conditions hold.
    pub candidate: Option<ClassicalCriterion>,
    pub required_cd: Option<ClaimsDifferentiator>,
    pub conditions_checked: Vec<ConditionCheck>,
    /// The single multiplier, when every stratum shares it.
    pub multiplier: Option<f64>,
    pub stratum_multipliers: Vec<StratumMultiplier>,
    pub warnings: Vec<String>,
}

/// Classifies `(w, cd)` against the eight rows. Weight equalities are exact.
pub fn classify_weights(w: &UtilityWeights, cd: &ClaimsDifferentiator) -> WeightConditionFinding {
    let Some(row) = row_for(cd) else {
        return WeightConditionFinding {
            matched: None,
            candidate: None,
            required_cd: None,
            conditions_checked: vec![ConditionCheck {
                condition: "(J, j) selects a known criterion".into(),
                holds: false,
            }],
            multiplier: None,
            stratum_multipliers: vec![],
            warnings: vec![],
        };
    };

    let tables: Vec<&WeightTable> = match &w.per_group {
        Some(m) if !m.is_empty() => m.values().collect(),
        _ => vec![&w.shared],
    };
    let reference = tables[0];
    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    let mut near = |x: Cell, y: Cell| {
        let (a, b) = (x.of(reference), y.of(reference));
        if a != b && (a - b).abs() <= NEAR_EQUALITY {
            warnings.push(format!(
                "{} and {} differ by only {:e}; check for entry noise",
                x.name(),
                y.name(),
                (a - b).abs()
            ));
        }
    };
    for &(x, y) in row.equal {
        near(x, y);
        checks.push(ConditionCheck {
            condition: format!("{} = {}", x.name(), y.name()),
            holds: x.of(reference) == y.of(reference),
        });
    }
    for &(x, y) in row.unequal {
        near(x, y);
        checks.push(ConditionCheck {
            condition: format!("{} ≠ {}", x.name(), y.name()),
            holds: x.of(reference) != y.of(reference),
        });
    }
    let (label, cells) = row.independent;
    checks.push(ConditionCheck {
        condition: label.into(),
        holds: tables
            .iter()
            .all(|t| cells.iter().all(|c| c.of(t) == c.of(reference))),
    });

    let stratum_multipliers: Vec<StratumMultiplier> = row
        .multipliers
        .iter()
        .map(|(stratum, (x, y))| StratumMultiplier {
            stratum: stratum.clone(),
            multiplier: (x.of(reference) - y.of(reference)).abs(),
        })
        .collect();
    let all_hold = checks.iter().all(|c| c.holds);
    let first = stratum_multipliers[0].multiplier;
    let uniform = stratum_multipliers.iter().all(|m| m.multiplier == first);
    WeightConditionFinding {
        matched: all_hold.then(|| row.criterion.clone()),
        required_cd: Some(row.criterion.claims()),
        candidate: Some(row.criterion),
        conditions_checked: checks,
        multiplier: (all_hold && uniform).then_some(first),
        stratum_multipliers: if all_hold { stratum_multipliers } else { vec![] },
        warnings,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumCheck {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum: Option<Stratum>,
    pub f_egal: f64,
    pub classical_gap: f64,
    pub multiplier: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub criterion: ClassicalCriterion,
    pub f_egal: f64,
    pub classical_gap: f64,
    /// Shared multiplier; `None` when conjunctive strata use different ones.
    pub multiplier: Option<f64>,
    pub strata: Vec<StratumCheck>,
    /// Largest per-stratum `|F_egal - multiplier * gap|`.
    pub residual: f64,
    pub verdict: bool,
}

/// Computes both sides of the equivalence on `ds` and compares them stratum by
/// stratum.
pub fn verify_proposition(
    ds: &Dataset,
    w: &UtilityWeights,
    cd: &ClaimsDifferentiator,
    tol: f64,
) -> Result<EquivalenceReport> {
    let finding = classify_weights(w, cd);
    let Some(criterion) = finding.matched.clone() else {
        let failed: Vec<String> = finding
            .conditions_checked
            .iter()
            .filter(|c| !c.holds)
            .map(|c| c.condition.clone())
            .collect();
        return Err(Error::ConditionViolated(failed.join(", ")));
    };

    let profile = utility_profile(ds, cd, w)?;
    let egal = egalitarian_metric(&profile, tol)?;
    let gap = classical_gap(ds, &criterion, tol)?;

    let mut strata = Vec::new();
    for m in &finding.stratum_multipliers {
        let f = egal
            .per_stratum
            .iter()
            .find(|s| s.stratum == m.stratum)
            .map(|s| s.value)
            .ok_or_else(|| Error::NotDefined(format!("no egalitarian value for stratum {:?}", m.stratum)))?;
        let g = gap
            .gaps
            .iter()
            .find(|s| s.stratum == m.stratum)
            .map(|s| s.gap)
            .ok_or_else(|| Error::NotDefined(format!("no classical gap for stratum {:?}", m.stratum)))?;
        strata.push(StratumCheck {
            stratum: m.stratum.clone(),
            f_egal: f,
            classical_gap: g,
            multiplier: m.multiplier,
            residual: (f - m.multiplier * g).abs(),
        });
    }
    let residual = strata.iter().map(|s| s.residual).fold(0.0, f64::max);
    Ok(EquivalenceReport {
        criterion,
        f_egal: egal.value,
        classical_gap: gap.overall,
        multiplier: finding.multiplier,
        strata,
        residual,
        verdict: residual <= tol,
    })
}

/// One setting per row that the classifier maps to exactly that row.
/// Conditional statistical parity conditions on `attr`.
pub fn canonical_settings(attr: &str, values: &[&str]) -> Vec<(ClassicalCriterion, UtilityWeights, ClaimsDifferentiator)> {
    let w = |a, b, c, d| UtilityWeights::shared(WeightTable::new(a, b, c, d));
    let rows = [
        (w(1.0, 1.0, 0.0, 0.0), ClaimsDifferentiator::none()),
        (w(1.0, 1.0, 0.0, 0.0), ClaimsDifferentiator::legitimate(attr, values)),
        (w(5.0, 0.0, 2.0, 0.0), ClaimsDifferentiator::outcome(&[1])),
        (w(0.0, -1.0, 0.0, 1.0), ClaimsDifferentiator::outcome(&[0])),
        (w(2.0, -1.0, 0.0, 1.0), ClaimsDifferentiator::outcome(&[0, 1])),
        (w(1.0, -1.0, 0.0, 0.0), ClaimsDifferentiator::decision(&[1])),
        (w(0.0, 0.0, -1.0, 0.5), ClaimsDifferentiator::decision(&[0])),
        (w(2.0, -1.0, 0.0, 1.0), ClaimsDifferentiator::decision(&[0, 1])),
    ];
    rows.into_iter()
        .map(|(w, cd)| {
            let criterion = row_for(&cd).expect("canonical differentiator has a row").criterion;
            (criterion, w, cd)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// Weights satisfy the row's conditions.
    Conforming,
    /// Per-group tables that differ on the row's constrained entries.
    GroupDependent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub trials: usize,
    /// Records per group.
    pub n: usize,
    pub seed: u64,
    pub weights: WeightMode,
}

impl SuiteConfig {
    pub fn new(trials: usize, n: usize, seed: u64) -> Self {
        SuiteConfig {
            trials,
            n,
            seed,
            weights: WeightMode::Conforming,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowSummary {
    pub criterion: ClassicalCriterion,
    pub verified: usize,
    pub skipped_by_condition: usize,
    pub skipped_undefined: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub config: SuiteConfig,
    pub rows: Vec<RowSummary>,
    pub max_residual: f64,
}

const SUITE_ATTR: &str = "tier";
const SUITE_VALUES: [&str; 3] = ["low", "mid", "high"];

fn trial_dataset(rng: &mut ChaCha8Rng, n: usize) -> Result<Dataset> {
    let mut group = |label: &str| GroupSpec {
        label: label.into(),
        size: n,
        base_rate: rng.random_range(0.1..0.9),
        acceptance: AcceptancePolicy::Informed {
            tpr: rng.random_range(0.1..0.9),
            fpr: rng.random_range(0.1..0.9),
        },
    };
    let spec = SyntheticSpec {
        groups: vec![group("0"), group("1")],
        score_noise: 0.1,
        legit: vec![LegitAttrSpec {
            name: SUITE_ATTR.into(),
            values: SUITE_VALUES.iter().map(|s| s.to_string()).collect(),
        }],
    };
    generate_synthetic(&spec, rng.random())
}

fn weight(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-5.0..5.0)
}

fn distinct_from(rng: &mut ChaCha8Rng, other: f64) -> f64 {
    loop {
        let v = weight(rng);
        if v != other {
            return v;
        }
    }
}

/// Random weights satisfying `criterion`'s row. Entries the row leaves free
/// may also vary by group.
fn conforming_weights(rng: &mut ChaCha8Rng, criterion: &ClassicalCriterion) -> UtilityWeights {
    use ClassicalCriterion::*;
    let mut t = WeightTable::new(weight(rng), weight(rng), weight(rng), weight(rng));
    match criterion {
        StatisticalParity | ConditionalStatisticalParity { .. } => {
            t.w10 = t.w11;
            t.w01 = distinct_from(rng, t.w11);
            t.w00 = t.w01;
        }
        EqualityOfOpportunity => t.w01 = distinct_from(rng, t.w11),
        FprParity => t.w00 = distinct_from(rng, t.w10),
        EqualizedOdds => {
            t.w01 = distinct_from(rng, t.w11);
            t.w00 = distinct_from(rng, t.w10);
        }
        PredictiveParity => t.w10 = distinct_from(rng, t.w11),
        ForParity => t.w00 = distinct_from(rng, t.w01),
        Sufficiency => {
            t.w10 = distinct_from(rng, t.w11);
            t.w00 = distinct_from(rng, t.w01);
        }
    }
    let w = UtilityWeights::shared(t);
    let free: &[Cell] = match criterion {
        EqualityOfOpportunity => &[Cell::W10, Cell::W00],
        FprParity => &[Cell::W11, Cell::W01],
        PredictiveParity => &[Cell::W01, Cell::W00],
        ForParity => &[Cell::W11, Cell::W10],
        _ => &[],
    };
    if free.is_empty() || !rng.random_bool(0.5) {
        return w;
    }
    let mut other = t;
    for c in free {
        let v = weight(rng);
        match c {
            Cell::W11 => other.w11 = v,
            Cell::W10 => other.w10 = v,
            Cell::W01 => other.w01 = v,
            Cell::W00 => other.w00 = v,
        }
    }
    w.with_group("0", t).with_group("1", other)
}

/// Per-group tables that differ on every entry, so no row's independence
/// condition holds.
fn group_dependent_weights(rng: &mut ChaCha8Rng, criterion: &ClassicalCriterion) -> UtilityWeights {
    let base = conforming_weights(rng, criterion);
    let t = base.shared;
    let shifted = t.affine(1.0, 1.0 + rng.random_range(0.0..1.0));
    UtilityWeights::shared(t).with_group("0", t).with_group("1", shifted)
}

/// Runs [`verify_proposition`] on `trials` random datasets per row with
/// weights drawn per `config.weights`. Trials are independent and seeded from
/// `(seed, row, trial)`, so the summary does not depend on scheduling.
pub fn randomized_equivalence_suite(config: &SuiteConfig) -> Result<SuiteSummary> {
    if config.trials == 0 {
        return Err(Error::InvalidSpec("trials must be >= 1".into()));
    }
    if config.n == 0 {
        return Err(Error::InvalidSpec("records per group must be >= 1".into()));
    }
    let settings = canonical_settings(SUITE_ATTR, &SUITE_VALUES);
    let mut rows = Vec::with_capacity(settings.len());
    for (row_idx, (criterion, _, cd)) in settings.iter().enumerate() {
        let outcomes: Vec<Result<Option<f64>>> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(((row_idx as u64) << 32) | trial as u64);
                let ds = trial_dataset(&mut rng, config.n)?;
                let w = match config.weights {
                    WeightMode::Conforming => conforming_weights(&mut rng, criterion),
                    WeightMode::GroupDependent => group_dependent_weights(&mut rng, criterion),
                };
                match verify_proposition(&ds, &w, cd, f64::MAX) {
                    Ok(report) => Ok(Some(report.residual)),
                    Err(Error::ConditionViolated(_)) => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect();
        let mut summary = RowSummary {
            criterion: criterion.clone(),
            verified: 0,
            skipped_by_condition: 0,
            skipped_undefined: 0,
            max_residual: 0.0,
        };
        for outcome in outcomes {
            match outcome {
                Ok(Some(residual)) => {
                    summary.verified += 1;
                    summary.max_residual = summary.max_residual.max(residual);
                }
                Ok(None) => summary.skipped_by_condition += 1,
                Err(e) if e.is_undefined() => summary.skipped_undefined += 1,
                Err(e) => return Err(e),
            }
        }
        rows.push(summary);
    }
    let max_residual = rows.iter().map(|r| r.max_residual).fold(0.0, f64::max);
    Ok(SuiteSummary {
        config: config.clone(),
        rows,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::fixture_t1;

    fn w(a: f64, b: f64, c: f64, d: f64) -> UtilityWeights {
        UtilityWeights::shared(WeightTable::new(a, b, c, d))
    }

    #[test]
    fn statistical_parity_row() {
        let f = classify_weights(&w(1.0, 1.0, 0.0, 0.0), &ClaimsDifferentiator::none());
        assert_eq!(f.matched, Some(ClassicalCriterion::StatisticalParity));
        assert_eq!(f.multiplier, Some(1.0));
        assert!(f.conditions_checked.iter().all(|c| c.holds));
    }

    #[test]
    fn equality_of_opportunity_multiplier() {
        for (w10, w00) in [(0.0, 0.0), (-7.0, 3.25)] {
            let f = classify_weights(&w(5.0, w10, 2.0, w00), &ClaimsDifferentiator::outcome(&[1]));
            assert_eq!(f.matched, Some(ClassicalCriterion::EqualityOfOpportunity));
            assert_eq!(f.multiplier, Some(3.0));
        }
    }

    #[test]
    fn sufficiency_row_has_per_stratum_multipliers() {
        let f = classify_weights(&w(3.0, 1.0, -1.0, 0.0), &ClaimsDifferentiator::decision(&[0, 1]));
        assert_eq!(f.matched, Some(ClassicalCriterion::Sufficiency));
        assert_eq!(f.multiplier, None);
        let ms: Vec<f64> = f.stratum_multipliers.iter().map(|m| m.multiplier).collect();
        assert_eq!(ms, vec![1.0, 2.0]);
    }

    #[test]
    fn zero_multiplier_never_matches() {
        let f = classify_weights(&w(1.0, 1.0, 1.0, 1.0), &ClaimsDifferentiator::none());
        assert_eq!(f.matched, None);
        assert_eq!(f.candidate, Some(ClassicalCriterion::StatisticalParity));
    }

    #[test]
    fn group_dependence_only_matters_on_constrained_entries() {
        let cd = ClaimsDifferentiator::outcome(&[1]);
        let base = WeightTable::new(5.0, 0.0, 2.0, 0.0);
        let free = w(0.0, 0.0, 0.0, 0.0)
            .with_group("0", base)
            .with_group("1", WeightTable::new(5.0, 9.0, 2.0, -9.0));
        assert!(classify_weights(&free, &cd).matched.is_some());
        let bound = w(0.0, 0.0, 0.0, 0.0)
            .with_group("0", base)
            .with_group("1", WeightTable::new(6.0, 0.0, 2.0, 0.0));
        assert!(classify_weights(&bound, &cd).matched.is_none());
    }

    #[test]
    fn near_equal_weights_warn() {
        let f = classify_weights(&w(1.0, 1.0 + 1e-13, 0.0, 0.0), &ClaimsDifferentiator::none());
        assert!(f.matched.is_none());
        assert_eq!(f.warnings.len(), 1);
    }

    #[test]
    fn unknown_differentiator_has_no_row() {
        let mut cd = ClaimsDifferentiator::outcome(&[1]);
        cd.values.clear();
        let f = classify_weights(&w(1.0, 0.0, 0.0, 0.0), &cd);
        assert!(f.candidate.is_none() && f.matched.is_none());
    }

    #[test]
    fn t1_equality_of_opportunity() {
        let r = verify_proposition(
            &fixture_t1(),
            &w(1.0, 0.0, 0.0, 0.0),
            &ClaimsDifferentiator::outcome(&[1]),
            1e-9,
        )
        .unwrap();
        assert_eq!((r.f_egal, r.classical_gap, r.multiplier, r.residual), (0.5, 0.5, Some(1.0), 0.0));
        assert!(r.verdict);
    }

    #[test]
    fn t1_statistical_parity_doubled() {
        let r = verify_proposition(&fixture_t1(), &w(2.0, 2.0, 0.0, 0.0), &ClaimsDifferentiator::none(), 1e-9).unwrap();
        assert_eq!((r.f_egal, r.multiplier, r.residual), (0.0, Some(2.0), 0.0));
    }

    #[test]
    fn unmatched_weights_are_rejected() {
        let err = verify_proposition(&fixture_t1(), &w(1.0, 0.0, 1.0, 0.0), &ClaimsDifferentiator::outcome(&[1]), 1e-9)
            .unwrap_err();
        assert!(matches!(err, Error::ConditionViolated(ref c) if c.contains("w11 ≠ w01")));
    }

    #[test]
    fn suite_rejects_zero_trials() {
        assert!(randomized_equivalence_suite(&SuiteConfig::new(0, 10, 1)).is_err());
    }

    #[test]
    fn group_dependent_weights_are_skipped() {
        let mut cfg = SuiteConfig::new(1, 50, 3);
        cfg.weights = WeightMode::GroupDependent;
        let s = randomized_equivalence_suite(&cfg).unwrap();
        for row in &s.rows {
            assert_eq!((row.verified, row.skipped_by_condition), (0, 1), "{:?}", row.criterion);
        }
    }

    #[test]
    fn suite_is_deterministic() {
        let cfg = SuiteConfig::new(4, 200, 9);
        assert_eq!(
            randomized_equivalence_suite(&cfg).unwrap(),
            randomized_equivalence_suite(&cfg).unwrap()
        );
    }
}

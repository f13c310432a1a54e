//! Audit and optimization reports with reproducible provenance.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classical::{classical_gap, ClassicalCriterion, GapReport};
use crate::data::{dataset_to_csv, ClaimsDifferentiator, ClaimsKind, Dataset, GroupLabel, UtilityWeights};
use crate::equivalence::{classify_weights, verify_proposition, EquivalenceReport, WeightConditionFinding};
use crate::error::{Error, Result};
use crate::optimizer::{optimize, OptimizationResult};
use crate::patterns::{evaluate_pattern, Direction, PatternResult, PatternSpec, DEFAULT_TOLERANCE};
use crate::utility::{utility_profile, UtilityProfile};

use super::config::{default_patterns, RuleSpaceSpec};

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_true() -> bool {
    true
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Content hash of a dataset's canonical CSV form.
pub fn dataset_hash(ds: &Dataset) -> String {
    sha256_hex(dataset_to_csv(ds).as_bytes())
}

fn config_hash<T: Serialize>(config: &T) -> String {
    sha256_hex(&serde_json::to_vec(config).expect("config serializes"))
}

/// Everything an audit depends on besides the data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditSpec {
    pub weights: UtilityWeights,
    #[serde(default = "ClaimsDifferentiator::none")]
    pub claims: ClaimsDifferentiator,
    #[serde(default = "default_patterns")]
    pub patterns: Vec<PatternSpec>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl AuditSpec {
    fn validate(&self) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::InvalidPattern(format!(
                "tolerance {} must be finite and >= 0",
                self.tolerance
            )));
        }
        self.patterns.iter().try_for_each(PatternSpec::validate)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// SHA-256 of the compact JSON of the embedded config.
    pub config_hash: String,
    /// SHA-256 of the dataset's canonical CSV.
    pub dataset_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Provenance {
    fn new<T: Serialize>(config: &T, ds: &Dataset, seed: Option<u64>) -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: config_hash(config),
            dataset_hash: dataset_hash(ds),
            seed,
        }
    }
}

/// A quantity that is either computed or undefined on this data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Computed<T> {
    Ok(T),
    Undefined { code: String, message: String },
}

impl<T> Computed<T> {
    fn from_result(r: Result<T>) -> Result<Self> {
        match r {
            Ok(v) => Ok(Computed::Ok(v)),
            Err(e) if e.is_undefined() => Ok(Computed::Undefined {
                code: e.code().into(),
                message: e.to_string(),
            }),
            Err(e) => Err(e),
        }
    }

    pub fn ok(&self) -> Option<&T> {
        match self {
            Computed::Ok(v) => Some(v),
            Computed::Undefined { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub label: GroupLabel,
    pub n: usize,
    pub base_rate: f64,
    pub acceptance_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub records: usize,
    pub groups: Vec<GroupSummary>,
    pub legit_schema: BTreeMap<String, BTreeSet<String>>,
    pub has_scores: bool,
}

impl DatasetSummary {
    pub fn of(ds: &Dataset) -> Self {
        let groups = ds
            .groups()
            .iter()
            .map(|g| {
                let (mut n, mut pos, mut acc) = (0usize, 0usize, 0usize);
                for r in ds.records().iter().filter(|r| &r.group == g) {
                    n += 1;
                    pos += r.outcome as usize;
                    acc += r.decision as usize;
                }
                let rate = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
                GroupSummary {
                    label: g.clone(),
                    n,
                    base_rate: rate(pos),
                    acceptance_rate: rate(acc),
                }
            })
            .collect();
        DatasetSummary {
            records: ds.len(),
            groups,
            legit_schema: ds.legit_schema().clone(),
            has_scores: ds.has_scores(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternEntry {
    pub pattern: PatternSpec,
    pub outcome: Computed<PatternResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalEntry {
    pub criterion: ClassicalCriterion,
    pub outcome: Computed<GapReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceSection {
    pub finding: WeightConditionFinding,
    /// Both sides of the equivalence, when the weights match a criterion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<Computed<EquivalenceReport>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub provenance: Provenance,
    pub config: AuditSpec,
    pub dataset: DatasetSummary,
    pub profile: UtilityProfile,
    pub patterns: Vec<PatternEntry>,
    pub classical: Vec<ClassicalEntry>,
    pub equivalence: EquivalenceSection,
    /// Subjects left out because their J-value is not admitted.
    pub excluded: f64,
}

impl AuditReport {
    /// Whether every pattern with a satisfaction test passed it. Undefined
    /// patterns count as not satisfied.
    pub fn all_satisfied(&self) -> bool {
        self.patterns.iter().all(|p| match &p.outcome {
            Computed::Ok(r) => r.satisfied != Some(false),
            Computed::Undefined { .. } => false,
        })
    }
}

fn classical_criteria(claims: &ClaimsDifferentiator) -> Vec<ClassicalCriterion> {
    let mut out = ClassicalCriterion::unconditional().to_vec();
    if let ClaimsKind::Legitimate(attr) = &claims.kind {
        out.insert(
            1,
            ClassicalCriterion::ConditionalStatisticalParity {
                attr: attr.clone(),
                values: claims.values.iter().map(|v| v.0.clone()).collect(),
            },
        );
    }
    out
}

/// Audits the recorded decisions of `ds` under `spec`.
pub fn run_audit(ds: &Dataset, spec: &AuditSpec, seed: Option<u64>) -> Result<AuditReport> {
    spec.validate()?;
    let profile = utility_profile(ds, &spec.claims, &spec.weights)?;
    let patterns = spec
        .patterns
        .iter()
        .map(|p| {
            Ok(PatternEntry {
                pattern: *p,
                outcome: Computed::from_result(evaluate_pattern(&profile, p, spec.tolerance))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let classical = classical_criteria(&spec.claims)
        .into_iter()
        .map(|c| {
            let outcome = Computed::from_result(classical_gap(ds, &c, spec.tolerance))?;
            Ok(ClassicalEntry { criterion: c, outcome })
        })
        .collect::<Result<Vec<_>>>()?;
    let finding = classify_weights(&spec.weights, &spec.claims);
    let check = match finding.matched {
        Some(_) => Some(Computed::from_result(verify_proposition(
            ds,
            &spec.weights,
            &spec.claims,
            spec.tolerance,
        ))?),
        None => None,
    };
    Ok(AuditReport {
        provenance: Provenance::new(spec, ds, seed),
        config: spec.clone(),
        dataset: DatasetSummary::of(ds),
        excluded: profile.excluded,
        profile,
        patterns,
        classical,
        equivalence: EquivalenceSection { finding, check },
    })
}

/// Inputs of a rule search besides the data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeSpec {
    pub weights: UtilityWeights,
    #[serde(default = "ClaimsDifferentiator::none")]
    pub claims: ClaimsDifferentiator,
    pub objective: PatternSpec,
    pub rulespace: RuleSpaceSpec,
    #[serde(default = "default_true")]
    pub frontier: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub provenance: Provenance,
    pub config: OptimizeSpec,
    pub result: OptimizationResult,
}

pub fn optimize_request(ds: &Dataset, spec: &OptimizeSpec, seed: Option<u64>) -> Result<OptimizeReport> {
    let space = spec.rulespace.build(ds)?;
    let mut result = optimize(ds, &space, &spec.claims, &spec.weights, &spec.objective)?;
    if !spec.frontier {
        result.frontier = None;
    }
    Ok(OptimizeReport {
        provenance: Provenance::new(spec, ds, seed),
        config: spec.clone(),
        result,
    })
}

/// Pretty JSON with a trailing newline; the one serialization path shared by
/// the CLI and the service.
pub fn render_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn fmt_num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.6}")
    }
}

fn describe_claims(cd: &ClaimsDifferentiator) -> String {
    let values = || cd.values.iter().map(|v| v.0.as_str()).collect::<Vec<_>>().join(",");
    match &cd.kind {
        ClaimsKind::None => "none".into(),
        ClaimsKind::Outcome => format!("y in {{{}}}", values()),
        ClaimsKind::Decision => format!("d in {{{}}}", values()),
        ClaimsKind::Legitimate(attr) => format!("{attr} in {{{}}}", values()),
    }
}

/// Plain-text view of a report.
pub fn render_table(report: &AuditReport) -> String {
    let mut out = String::new();
    let w = &report.config.weights.shared;
    let _ = writeln!(out, "Audit  config {}  dataset {}", &report.provenance.config_hash[..12], &report.provenance.dataset_hash[..12]);
    let _ = writeln!(
        out,
        "weights  w11={} w10={} w01={} w00={}{}",
        fmt_num(w.w11),
        fmt_num(w.w10),
        fmt_num(w.w01),
        fmt_num(w.w00),
        if report.config.weights.per_group.is_some() { "  (per-group overrides)" } else { "" }
    );
    let _ = writeln!(
        out,
        "claims   {}  records {}  excluded {}",
        describe_claims(&report.config.claims),
        report.dataset.records,
        fmt_num(report.excluded)
    );

    let _ = writeln!(out, "\nExpected utility");
    let _ = writeln!(out, "  {:<12} {:<8} {:>10} {:>12}", "group", "stratum", "n", "E[U]");
    for e in &report.profile.entries {
        let stratum = e.stratum.as_ref().map_or("-".to_owned(), |s| s.0.clone());
        let _ = writeln!(out, "  {:<12} {:<8} {:>10} {:>12}", e.group.0, stratum, fmt_num(e.n), fmt_num(e.expected_utility));
    }
    for k in &report.profile.empty {
        let _ = writeln!(out, "  {k}: empty");
    }

    let _ = writeln!(out, "\nPatterns");
    for p in &report.patterns {
        let line = match &p.outcome {
            Computed::Ok(r) => {
                let dir = match r.direction {
                    Direction::LowerBetter => "lower is better",
                    Direction::HigherBetter => "higher is better",
                };
                let sat = match r.satisfied {
                    Some(true) => "satisfied",
                    Some(false) => "NOT satisfied",
                    None => "needs a rule space",
                };
                format!("{:>12}  {dir}, {sat}", fmt_num(r.value))
            }
            Computed::Undefined { message, .. } => format!("undefined ({message})"),
        };
        let _ = writeln!(out, "  {:<18} {line}", p.pattern.name());
    }

    let _ = writeln!(out, "\nClassical gaps");
    for c in &report.classical {
        let line = match &c.outcome {
            Computed::Ok(g) => format!("{:>12}  {}", fmt_num(g.overall), if g.satisfied { "ok" } else { "violated" }),
            Computed::Undefined { message, .. } => format!("undefined ({message})"),
        };
        let _ = writeln!(out, "  {:<32} {line}", c.criterion.display_name());
    }

    let _ = writeln!(out, "\nEquivalence");
    let f = &report.equivalence.finding;
    match (&f.matched, &report.equivalence.check) {
        (Some(c), Some(Computed::Ok(chk))) => {
            let mult = match f.multiplier {
                Some(m) => fmt_num(m),
                None => f
                    .stratum_multipliers
                    .iter()
                    .map(|m| format!("{}:{}", m.stratum.as_ref().map_or("-", |s| s.0.as_str()), fmt_num(m.multiplier)))
                    .collect::<Vec<_>>()
                    .join(" "),
            };
            let _ = writeln!(
                out,
                "  egalitarian gap = {mult} x {} gap  (residual {:e})",
                c.display_name(),
                chk.residual
            );
        }
        (Some(c), Some(Computed::Undefined { message, .. })) => {
            let _ = writeln!(out, "  weights match {}, but {message}", c.display_name());
        }
        _ => {
            let _ = writeln!(out, "  weights match no classical criterion under these claims");
        }
    }
    for warning in &f.warnings {
        let _ = writeln!(out, "  warning: {warning}");
    }
    out
}

//! Domain types for audited populations: records, datasets, utility weights,
//! claims differentiators and the relevant-group partition.

mod csv_io;
mod synthetic;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_io::{dataset_to_csv, load_dataset, read_dataset, write_dataset, CsvSchema};
pub use synthetic::{generate_synthetic, AcceptancePolicy, GroupSpec, LegitAttrSpec, SyntheticSpec};

/// Value of the sensitive attribute `A`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupLabel(pub String);

impl GroupLabel {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for GroupLabel {
    fn from(s: &str) -> Self {
        GroupLabel(s.to_owned())
    }
}

impl From<String> for GroupLabel {
    fn from(s: String) -> Self {
        GroupLabel(s)
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One decision subject.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub group: GroupLabel,
    /// The decision-relevant binary outcome `Y`.
    pub outcome: bool,
    /// The binary decision `D`.
    pub decision: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub legit: BTreeMap<String, String>,
}

impl Record {
    pub fn new(id: impl Into<String>, group: impl Into<GroupLabel>, outcome: bool, decision: bool) -> Self {
        Record {
            id: id.into(),
            group: group.into(),
            outcome,
            decision,
            score: None,
            legit: BTreeMap::new(),
        }
    }

    pub fn with_score(mut self, score: f64) -> Self {
        self.score = Some(score);
        self
    }

    pub fn with_legit(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.legit.insert(name.into(), value.into());
        self
    }
}

/// The audited population. Immutable once validated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Dataset {
    records: Vec<Record>,
    groups: BTreeSet<GroupLabel>,
    legit_schema: BTreeMap<String, BTreeSet<String>>,
}

impl Dataset {
    /// Builds a dataset against an explicit group set and legitimate-attribute
    /// schema, checking every record.
    pub fn new(
        records: Vec<Record>,
        groups: impl IntoIterator<Item = GroupLabel>,
        legit_schema: BTreeMap<String, BTreeSet<String>>,
    ) -> Result<Self> {
        let groups: BTreeSet<GroupLabel> = groups.into_iter().collect();
        if records.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if groups.is_empty() {
            return Err(Error::InvalidDataset("no groups declared".into()));
        }
        for (i, r) in records.iter().enumerate() {
            let row = i + 1;
            if !groups.contains(&r.group) {
                return Err(Error::UnknownGroup {
                    row,
                    column: "a".into(),
                    group: r.group.0.clone(),
                });
            }
            if let Some(s) = r.score {
                if !(0.0..=1.0).contains(&s) {
                    return Err(Error::ScoreOutOfRange {
                        row,
                        column: "score".into(),
                        value: s.to_string(),
                    });
                }
            }
            if r.legit.len() != legit_schema.len() || !r.legit.keys().all(|k| legit_schema.contains_key(k)) {
                return Err(Error::InvalidDataset(format!(
                    "row {row}: legitimate attributes {:?} do not match schema {:?}",
                    r.legit.keys().collect::<Vec<_>>(),
                    legit_schema.keys().collect::<Vec<_>>()
                )));
            }
            for (k, v) in &r.legit {
                if !legit_schema[k].contains(v) {
                    return Err(Error::InvalidDataset(format!(
                        "row {row}, column `{k}`: value `{v}` not in declared value set"
                    )));
                }
            }
        }
        Ok(Dataset {
            records,
            groups,
            legit_schema,
        })
    }

    /// Builds a dataset whose group set and legitimate schema are the values
    /// observed in `records`.
    pub fn from_records(records: Vec<Record>) -> Result<Self> {
        let groups: BTreeSet<GroupLabel> = records.iter().map(|r| r.group.clone()).collect();
        let mut legit_schema: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for r in &records {
            for (k, v) in &r.legit {
                legit_schema.entry(k.clone()).or_default().insert(v.clone());
            }
        }
        Dataset::new(records, groups, legit_schema)
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn groups(&self) -> &BTreeSet<GroupLabel> {
        &self.groups
    }

    pub fn legit_schema(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.legit_schema
    }

    pub fn has_scores(&self) -> bool {
        self.records.iter().all(|r| r.score.is_some())
    }
}

/// The four utility values `w_dy` of one (decision, outcome) table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightTable {
    pub w11: f64,
    pub w10: f64,
    pub w01: f64,
    pub w00: f64,
}

impl WeightTable {
    pub const fn new(w11: f64, w10: f64, w01: f64, w00: f64) -> Self {
        WeightTable { w11, w10, w01, w00 }
    }

    pub const fn constant(c: f64) -> Self {
        WeightTable::new(c, c, c, c)
    }

    /// `w_dy` for decision `d` and outcome `y`.
    #[inline]
    pub fn get(&self, d: bool, y: bool) -> f64 {
        match (d, y) {
            (true, true) => self.w11,
            (true, false) => self.w10,
            (false, true) => self.w01,
            (false, false) => self.w00,
        }
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.w11, self.w10, self.w01, self.w00]
    }

    pub fn min(&self) -> f64 {
        self.entries().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.entries().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|w| w.is_finite())
    }

    /// Applies `alpha * w + beta` to all four entries.
    pub fn affine(&self, alpha: f64, beta: f64) -> Self {
        WeightTable::new(
            alpha * self.w11 + beta,
            alpha * self.w10 + beta,
            alpha * self.w01 + beta,
            alpha * self.w00 + beta,
        )
    }
}

/// Utility weights, shared across groups with optional per-group overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityWeights {
    #[serde(flatten)]
    pub shared: WeightTable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_group: Option<BTreeMap<GroupLabel, WeightTable>>,
}

impl UtilityWeights {
    pub fn shared(table: WeightTable) -> Self {
        UtilityWeights {
            shared: table,
            per_group: None,
        }
    }

    pub fn with_group(mut self, group: impl Into<GroupLabel>, table: WeightTable) -> Self {
        self.per_group
            .get_or_insert_with(BTreeMap::new)
            .insert(group.into(), table);
        self
    }

    /// The table that applies to `group`.
    #[inline]
    pub fn for_group(&self, group: &GroupLabel) -> &WeightTable {
        self.per_group
            .as_ref()
            .and_then(|m| m.get(group))
            .unwrap_or(&self.shared)
    }

    pub fn validate(&self, groups: &BTreeSet<GroupLabel>) -> Result<()> {
        if !self.shared.is_finite() {
            return Err(Error::InvalidWeights("shared table has non-finite entries".into()));
        }
        if let Some(per_group) = &self.per_group {
            for g in groups {
                match per_group.get(g) {
                    None => {
                        return Err(Error::InvalidWeights(format!(
                            "per-group weights do not cover group `{g}`"
                        )))
                    }
                    Some(t) if !t.is_finite() => {
                        return Err(Error::InvalidWeights(format!(
                            "table for group `{g}` has non-finite entries"
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    pub fn affine(&self, alpha: f64, beta: f64) -> Self {
        UtilityWeights {
            shared: self.shared.affine(alpha, beta),
            per_group: self
                .per_group
                .as_ref()
                .map(|m| m.iter().map(|(g, t)| (g.clone(), t.affine(alpha, beta))).collect()),
        }
    }
}

/// One value of the claims differentiator `J`. Deserializes from a string or
/// an integer, so `j = [0, 1]` and `j = ["0", "1"]` are equivalent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Stratum(pub String);

impl<'de> Deserialize<'de> for Stratum {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        Ok(match Raw::deserialize(de)? {
            Raw::Int(i) => Stratum(i.to_string()),
            Raw::Str(s) => Stratum(s),
        })
    }
}

impl Stratum {
    pub fn bit(b: bool) -> Self {
        Stratum(if b { "1" } else { "0" }.to_owned())
    }
}

impl From<&str> for Stratum {
    fn from(s: &str) -> Self {
        Stratum(s.to_owned())
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "attr")]
pub enum ClaimsKind {
    None,
    Outcome,
    Decision,
    Legitimate(String),
}

/// Selects who has equal claims: the attribute `J` and the admitted values `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClaimsDifferentiator {
    #[serde(flatten)]
    pub kind: ClaimsKind,
    #[serde(default)]
    pub values: BTreeSet<Stratum>,
}

impl ClaimsDifferentiator {
    pub fn none() -> Self {
        ClaimsDifferentiator {
            kind: ClaimsKind::None,
            values: BTreeSet::new(),
        }
    }

    pub fn outcome(values: &[u8]) -> Self {
        ClaimsDifferentiator {
            kind: ClaimsKind::Outcome,
            values: values.iter().map(|&v| Stratum::bit(v != 0)).collect(),
        }
    }

    pub fn decision(values: &[u8]) -> Self {
        ClaimsDifferentiator {
            kind: ClaimsKind::Decision,
            values: values.iter().map(|&v| Stratum::bit(v != 0)).collect(),
        }
    }

    pub fn legitimate<S: AsRef<str>>(attr: impl Into<String>, values: &[S]) -> Self {
        ClaimsDifferentiator {
            kind: ClaimsKind::Legitimate(attr.into()),
            values: values.iter().map(|v| Stratum(v.as_ref().to_owned())).collect(),
        }
    }

    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        match &self.kind {
            ClaimsKind::None => Ok(()),
            ClaimsKind::Outcome | ClaimsKind::Decision => {
                if self.values.is_empty() {
                    return Err(Error::InvalidClaims("value set j is empty".into()));
                }
                if let Some(bad) = self.values.iter().find(|v| v.0 != "0" && v.0 != "1") {
                    return Err(Error::InvalidClaims(format!("value `{bad}` is not 0 or 1")));
                }
                Ok(())
            }
            ClaimsKind::Legitimate(attr) => {
                let declared = ds.legit_schema().get(attr).ok_or_else(|| {
                    Error::InvalidClaims(format!("`{attr}` is not a declared legitimate attribute"))
                })?;
                if self.values.is_empty() {
                    return Err(Error::InvalidClaims("value set j is empty".into()));
                }
                if let Some(bad) = self.values.iter().find(|v| !declared.contains(&v.0)) {
                    return Err(Error::InvalidClaims(format!(
                        "value `{bad}` not declared for attribute `{attr}`"
                    )));
                }
                Ok(())
            }
        }
    }

    /// The J-value of a subject with the given outcome, decision and
    /// legitimate attributes, or `None` when `kind` is `None`.
    pub fn stratum_of(&self, outcome: bool, decision: bool, legit: &BTreeMap<String, String>) -> Option<Stratum> {
        match &self.kind {
            ClaimsKind::None => None,
            ClaimsKind::Outcome => Some(Stratum::bit(outcome)),
            ClaimsKind::Decision => Some(Stratum::bit(decision)),
            ClaimsKind::Legitimate(attr) => legit.get(attr).map(|v| Stratum(v.clone())),
        }
    }

    /// Whether a subject with J-value `stratum` takes part in the audit.
    pub fn admits(&self, stratum: Option<&Stratum>) -> bool {
        match (&self.kind, stratum) {
            (ClaimsKind::None, _) => true,
            (_, Some(s)) => self.values.contains(s),
            (_, None) => false,
        }
    }

    /// The strata compared by an audit: the single `None` stratum, or each
    /// admitted value.
    pub fn strata(&self) -> Vec<Option<Stratum>> {
        match self.kind {
            ClaimsKind::None => vec![None],
            _ => self.values.iter().cloned().map(Some).collect(),
        }
    }
}

/// A relevant group: a socially salient group intersected with one stratum.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RelevantGroupKey {
    pub group: GroupLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum: Option<Stratum>,
}

impl RelevantGroupKey {
    pub fn new(group: impl Into<GroupLabel>, stratum: Option<Stratum>) -> Self {
        RelevantGroupKey {
            group: group.into(),
            stratum,
        }
    }
}

impl fmt::Display for RelevantGroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.stratum {
            Some(j) => write!(f, "a={}|j={}", self.group, j),
            None => write!(f, "a={}", self.group),
        }
    }
}

/// Record indices per relevant group.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    /// Every (group, stratum) combination, including empty ones.
    pub buckets: BTreeMap<RelevantGroupKey, Vec<usize>>,
    /// Keys whose bucket is empty; expectations over them are undefined.
    pub empty: Vec<RelevantGroupKey>,
    /// Records whose J-value lies outside the admitted values.
    pub excluded: usize,
}

pub fn partition_relevant_groups(ds: &Dataset, cd: &ClaimsDifferentiator) -> Result<Partition> {
    cd.validate(ds)?;
    let mut buckets: BTreeMap<RelevantGroupKey, Vec<usize>> = BTreeMap::new();
    for g in ds.groups() {
        for s in cd.strata() {
            buckets.insert(RelevantGroupKey::new(g.clone(), s), Vec::new());
        }
    }
    let mut excluded = 0;
    for (i, r) in ds.records().iter().enumerate() {
        let s = cd.stratum_of(r.outcome, r.decision, &r.legit);
        if !cd.admits(s.as_ref()) {
            excluded += 1;
            continue;
        }
        buckets
            .get_mut(&RelevantGroupKey::new(r.group.clone(), s))
            .expect("bucket exists for every declared group and admitted stratum")
            .push(i);
    }
    let empty = buckets
        .iter()
        .filter(|(_, v)| v.is_empty())
        .map(|(k, _)| k.clone())
        .collect();
    Ok(Partition {
        buckets,
        empty,
        excluded,
    })
}

/// The canonical 8-record fixture: group 0 holds (d, y) = (1,1), (1,0), (0,1),
/// (0,0); group 1 holds (1,1), (1,1), (0,0), (0,0).
pub fn fixture_t1() -> Dataset {
    let rows = [
        ("0", true, true),
        ("0", true, false),
        ("0", false, true),
        ("0", false, false),
        ("1", true, true),
        ("1", true, true),
        ("1", false, false),
        ("1", false, false),
    ];
    let records = rows
        .iter()
        .enumerate()
        .map(|(i, &(a, d, y))| Record::new(i.to_string(), a, y, d))
        .collect();
    Dataset::from_records(records).expect("fixture is valid")
}

//! Decision-subject utility and its expectation per relevant group.

use serde::{Deserialize, Serialize};

use crate::data::{
    partition_relevant_groups, ClaimsDifferentiator, Dataset, GroupLabel, Record, RelevantGroupKey, Stratum,
    UtilityWeights, WeightTable,
};
use crate::error::{Error, Result};

/// Utility realised by one subject: the weight `w_dy` of its (decision,
/// outcome) cell, taken from its group's table when one is given.
#[inline]
pub fn individual_utility(r: &Record, w: &UtilityWeights) -> f64 {
    w.for_group(&r.group).get(r.decision, r.outcome)
}

/// Empirical mean utility of the relevant group `key`.
pub fn expected_group_utility(
    ds: &Dataset,
    key: &RelevantGroupKey,
    cd: &ClaimsDifferentiator,
    w: &UtilityWeights,
) -> Result<f64> {
    w.validate(ds.groups())?;
    let partition = partition_relevant_groups(ds, cd)?;
    let bucket = partition
        .buckets
        .get(key)
        .ok_or_else(|| Error::NotDefined(format!("`{key}` is not a relevant group of this audit")))?;
    if bucket.is_empty() {
        return Err(Error::NotDefined(format!("relevant group `{key}` is empty")));
    }
    let sum: f64 = bucket.iter().map(|&i| individual_utility(&ds.records()[i], w)).sum();
    Ok(sum / bucket.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub group: GroupLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum: Option<Stratum>,
    pub expected_utility: f64,
    /// Number of subjects; fractional when decisions are randomized.
    pub n: f64,
}

impl ProfileEntry {
    pub fn key(&self) -> RelevantGroupKey {
        RelevantGroupKey::new(self.group.clone(), self.stratum.clone())
    }
}

/// Expected utility of every non-empty relevant group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityProfile {
    /// Sorted by (group, stratum).
    pub entries: Vec<ProfileEntry>,
    pub groups: Vec<GroupLabel>,
    pub empty: Vec<RelevantGroupKey>,
    /// Mass of subjects whose J-value lies outside the admitted values.
    pub excluded: f64,
    pub weights_used: UtilityWeights,
    pub cd: ClaimsDifferentiator,
}

impl UtilityProfile {
    pub fn get(&self, group: &GroupLabel, stratum: Option<&Stratum>) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| &e.group == group && e.stratum.as_ref() == stratum)
            .map(|e| e.expected_utility)
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.expected_utility).collect()
    }

    pub fn strata(&self) -> Vec<Option<Stratum>> {
        self.cd.strata()
    }

    pub fn in_stratum<'a>(&'a self, stratum: &'a Option<Stratum>) -> impl Iterator<Item = &'a ProfileEntry> + 'a {
        self.entries.iter().filter(move |e| &e.stratum == stratum)
    }

    /// Per-capita expected utility over all admitted subjects.
    pub fn total_utility(&self) -> f64 {
        let (sum, mass) = self
            .entries
            .iter()
            .fold((0.0, 0.0), |(s, m), e| (s + e.expected_utility * e.n, m + e.n));
        if mass > 0.0 {
            sum / mass
        } else {
            0.0
        }
    }
}

/// Accumulates (possibly fractional) subject mass into relevant groups,
/// addressed by group index and stratum slot.
#[derive(Clone)]
pub(crate) struct ProfileBuilder<'a> {
    cd: &'a ClaimsDifferentiator,
    w: &'a UtilityWeights,
    groups: Vec<GroupLabel>,
    tables: Vec<WeightTable>,
    strata: Vec<Option<Stratum>>,
    /// (utility sum, mass) per `group * strata.len() + slot`
    sums: Vec<(f64, f64)>,
    excluded: f64,
}

impl<'a> ProfileBuilder<'a> {
    pub(crate) fn new(ds: &Dataset, cd: &'a ClaimsDifferentiator, w: &'a UtilityWeights) -> Result<Self> {
        cd.validate(ds)?;
        w.validate(ds.groups())?;
        let groups: Vec<GroupLabel> = ds.groups().iter().cloned().collect();
        let tables = groups.iter().map(|g| *w.for_group(g)).collect();
        let strata = cd.strata();
        Ok(ProfileBuilder {
            cd,
            w,
            sums: vec![(0.0, 0.0); groups.len() * strata.len()],
            groups,
            tables,
            strata,
            excluded: 0.0,
        })
    }

    pub(crate) fn group_index(&self, group: &GroupLabel) -> usize {
        self.groups.binary_search(group).expect("record group is declared")
    }

    /// Slot of a J-value, or `None` when it is not admitted.
    pub(crate) fn slot(&self, stratum: Option<&Stratum>) -> Option<usize> {
        if !self.cd.admits(stratum) {
            return None;
        }
        match stratum {
            None => Some(0),
            Some(s) => self.strata.iter().position(|t| t.as_ref() == Some(s)),
        }
    }

    pub(crate) fn table(&self, group: usize) -> &WeightTable {
        &self.tables[group]
    }

    /// Adds `mass` with utility `u` each to relevant group `(group, slot)`,
    /// or to the excluded mass when `slot` is `None`.
    #[inline]
    pub(crate) fn add_cell(&mut self, group: usize, slot: Option<usize>, mass: f64, u: f64) {
        if mass == 0.0 {
            return;
        }
        match slot {
            None => self.excluded += mass,
            Some(s) => {
                let cell = &mut self.sums[group * self.strata.len() + s];
                cell.0 += mass * u;
                cell.1 += mass;
            }
        }
    }

    /// Adds `mass` of subject `r` under decision `decision`.
    pub(crate) fn add(&mut self, r: &Record, decision: bool, mass: f64) {
        let stratum = self.cd.stratum_of(r.outcome, decision, &r.legit);
        let slot = self.slot(stratum.as_ref());
        let g = self.group_index(&r.group);
        let u = self.tables[g].get(decision, r.outcome);
        self.add_cell(g, slot, mass, u);
    }

    pub(crate) fn finish(&self) -> Result<UtilityProfile> {
        let mut entries = Vec::new();
        let mut empty = Vec::new();
        let mut uncovered = false;
        for (gi, group) in self.groups.iter().enumerate() {
            let mut any = false;
            for (si, stratum) in self.strata.iter().enumerate() {
                let (sum, mass) = self.sums[gi * self.strata.len() + si];
                if mass > 0.0 {
                    any = true;
                    entries.push(ProfileEntry {
                        group: group.clone(),
                        stratum: stratum.clone(),
                        expected_utility: sum / mass,
                        n: mass,
                    });
                } else {
                    empty.push(RelevantGroupKey::new(group.clone(), stratum.clone()));
                }
            }
            uncovered |= !any;
        }
        if uncovered {
            return Err(Error::EmptyRelevantGroup {
                keys: empty.iter().map(|k| k.to_string()).collect(),
            });
        }
        Ok(UtilityProfile {
            entries,
            groups: self.groups.clone(),
            empty,
            excluded: self.excluded,
            weights_used: self.w.clone(),
            cd: self.cd.clone(),
        })
    }
}

/// Expected utility of every relevant group under the recorded decisions.
pub fn utility_profile(ds: &Dataset, cd: &ClaimsDifferentiator, w: &UtilityWeights) -> Result<UtilityProfile> {
    let mut builder = ProfileBuilder::new(ds, cd, w)?;
    for r in ds.records() {
        builder.add(r, r.decision, 1.0);
    }
    builder.finish()
}

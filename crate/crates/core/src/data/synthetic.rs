use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Dataset, GroupLabel, Record};
use crate::error::{Error, Result};

/// How the synthetic decision `d` is produced for a group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy")]
pub enum AcceptancePolicy {
    /// `d ~ Bernoulli(rate)`, independent of `y`.
    Rate { rate: f64 },
    /// `d = 1` iff `score >= threshold`.
    Threshold { threshold: f64 },
    /// `P(d=1 | y=1) = tpr`, `P(d=1 | y=0) = fpr`.
    Informed { tpr: f64, fpr: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub label: String,
    pub size: usize,
    /// `P(Y=1 | A=a)`.
    pub base_rate: f64,
    pub acceptance: AcceptancePolicy,
}

/// A categorical legitimate attribute drawn uniformly from `values`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegitAttrSpec {
    pub name: String,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub groups: Vec<GroupSpec>,
    /// Standard deviation of the Gaussian noise added to the score.
    #[serde(default)]
    pub score_noise: f64,
    #[serde(default)]
    pub legit: Vec<LegitAttrSpec>,
}

impl SyntheticSpec {
    /// Two groups labelled `0` and `1` with equal sizes and independent
    /// acceptance at the given rates.
    pub fn two_groups(n: usize, base_rates: [f64; 2], accept_rates: [f64; 2]) -> Self {
        SyntheticSpec {
            groups: (0..2)
                .map(|i| GroupSpec {
                    label: i.to_string(),
                    size: n,
                    base_rate: base_rates[i],
                    acceptance: AcceptancePolicy::Rate { rate: accept_rates[i] },
                })
                .collect(),
            score_noise: 0.1,
            legit: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        let prob = |p: f64, what: &str| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("{what} {p} is not a probability")))
            }
        };
        if self.groups.is_empty() {
            return Err(Error::InvalidSpec("no groups".into()));
        }
        if !(self.score_noise.is_finite() && self.score_noise >= 0.0) {
            return Err(Error::InvalidSpec(format!("score noise {} must be >= 0", self.score_noise)));
        }
        let mut seen = std::collections::BTreeSet::new();
        for g in &self.groups {
            if !seen.insert(g.label.as_str()) {
                return Err(Error::InvalidSpec(format!("duplicate group `{}`", g.label)));
            }
            if g.size == 0 {
                return Err(Error::InvalidSpec(format!("group `{}` has size 0", g.label)));
            }
            prob(g.base_rate, "base rate")?;
            match g.acceptance {
                AcceptancePolicy::Rate { rate } => prob(rate, "acceptance rate")?,
                AcceptancePolicy::Threshold { threshold } => prob(threshold, "threshold")?,
                AcceptancePolicy::Informed { tpr, fpr } => {
                    prob(tpr, "tpr")?;
                    prob(fpr, "fpr")?;
                }
            }
        }
        for l in &self.legit {
            if l.values.is_empty() {
                return Err(Error::InvalidSpec(format!("legitimate attribute `{}` has no values", l.name)));
            }
        }
        Ok(())
    }
}

/// Draws a population from `spec`. Identical `(spec, seed)` pairs produce
/// identical datasets.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, spec.score_noise).map_err(|e| Error::InvalidSpec(e.to_string()))?;

    let total: usize = spec.groups.iter().map(|g| g.size).sum();
    let mut records = Vec::with_capacity(total);
    for g in &spec.groups {
        for i in 0..g.size {
            let outcome = rng.random_bool(g.base_rate);
            let centre = if outcome { 0.65 } else { 0.35 };
            let score: f64 = (centre + noise.sample(&mut rng)).clamp(0.0, 1.0);
            let mut record = Record::new(format!("{}-{i}", g.label), g.label.as_str(), outcome, false)
                .with_score(score);
            for l in &spec.legit {
                let v = &l.values[rng.random_range(0..l.values.len())];
                record.legit.insert(l.name.clone(), v.clone());
            }
            record.decision = match g.acceptance {
                AcceptancePolicy::Rate { rate } => rng.random_bool(rate),
                AcceptancePolicy::Threshold { threshold } => score >= threshold,
                AcceptancePolicy::Informed { tpr, fpr } => rng.random_bool(if outcome { tpr } else { fpr }),
            };
            records.push(record);
        }
    }

    let groups = spec.groups.iter().map(|g| GroupLabel(g.label.clone()));
    let legit_schema = spec
        .legit
        .iter()
        .map(|l| (l.name.clone(), l.values.iter().cloned().collect()))
        .collect();
    Dataset::new(records, groups, legit_schema)
}

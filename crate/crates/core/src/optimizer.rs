//! Decision-rule spaces and exhaustive search for pattern-optimal rules.
//!
//! Two rule families are supported: group-specific acceptance rates (the
//! decision is a coin flip independent of the outcome) and group-specific
//! score thresholds. Randomized rules are evaluated in expectation, so every
//! objective value is a deterministic function of the rule.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{ClaimsDifferentiator, Dataset, GroupLabel, UtilityWeights};
use crate::error::{Error, Result};
use crate::patterns::{egalitarian_metric, evaluate_pattern, Direction, PatternSpec};
use crate::utility::{ProfileBuilder, UtilityProfile};

/// Relative tolerance under which two objective (or total-utility) values
/// count as tied: `|a - b| <= TIE_TOLERANCE * max(1, |a|)`.
pub const TIE_TOLERANCE: f64 = 1e-9;

fn tie_eps(v: f64) -> f64 {
    TIE_TOLERANCE * v.abs().max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    GroupRates,
    GroupThresholds,
}

impl RuleKind {
    fn param_prefix(self) -> &'static str {
        match self {
            RuleKind::GroupRates => "p",
            RuleKind::GroupThresholds => "theta",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "params")]
pub enum DecisionRule {
    /// Accept members of group `a` with probability `p_a`.
    GroupRates(BTreeMap<GroupLabel, f64>),
    /// Accept members of group `a` iff `score >= theta_a`.
    GroupThresholds(BTreeMap<GroupLabel, f64>),
}

impl DecisionRule {
    pub fn rates<G: Into<GroupLabel>>(params: impl IntoIterator<Item = (G, f64)>) -> Self {
        DecisionRule::GroupRates(params.into_iter().map(|(g, p)| (g.into(), p)).collect())
    }

    pub fn thresholds<G: Into<GroupLabel>>(params: impl IntoIterator<Item = (G, f64)>) -> Self {
        DecisionRule::GroupThresholds(params.into_iter().map(|(g, p)| (g.into(), p)).collect())
    }

    pub fn kind(&self) -> RuleKind {
        match self {
            DecisionRule::GroupRates(_) => RuleKind::GroupRates,
            DecisionRule::GroupThresholds(_) => RuleKind::GroupThresholds,
        }
    }

    pub fn params(&self) -> &BTreeMap<GroupLabel, f64> {
        match self {
            DecisionRule::GroupRates(m) | DecisionRule::GroupThresholds(m) => m,
        }
    }

    fn validate(&self, ds: &Dataset) -> Result<()> {
        let params = self.params();
        for g in ds.groups() {
            match params.get(g) {
                None => return Err(Error::InvalidRule(format!("no parameter for group `{g}`"))),
                Some(p) if !(0.0..=1.0).contains(p) => {
                    return Err(Error::InvalidRule(format!("parameter {p} for group `{g}` is outside [0, 1]")))
                }
                Some(_) => {}
            }
        }
        if let Some(extra) = params.keys().find(|g| !ds.groups().contains(*g)) {
            return Err(Error::InvalidRule(format!("group `{extra}` is not in the dataset")));
        }
        Ok(())
    }
}

/// A finite grid of candidate parameters per group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleSpace {
    pub kind: RuleKind,
    pub grid: BTreeMap<GroupLabel, Vec<f64>>,
}

impl RuleSpace {
    /// `points` evenly spaced values on `[0, 1]` for every group.
    pub fn uniform<'a>(kind: RuleKind, groups: impl IntoIterator<Item = &'a GroupLabel>, points: usize) -> Self {
        let values: Vec<f64> = match points {
            0 => vec![],
            1 => vec![0.0],
            _ => (0..points).map(|i| i as f64 / (points - 1) as f64).collect(),
        };
        RuleSpace::with_values(kind, groups, &values)
    }

    pub fn with_values<'a>(kind: RuleKind, groups: impl IntoIterator<Item = &'a GroupLabel>, values: &[f64]) -> Self {
        RuleSpace {
            kind,
            grid: groups.into_iter().map(|g| (g.clone(), values.to_vec())).collect(),
        }
    }

    /// Number of candidate rules.
    pub fn len(&self) -> usize {
        self.grid.values().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self, ds: &Dataset) -> Result<()> {
        if self.grid.is_empty() || self.is_empty() {
            return Err(Error::InfeasibleSpace("the grid has no candidate rules".into()));
        }
        for g in ds.groups() {
            let Some(values) = self.grid.get(g) else {
                return Err(Error::InfeasibleSpace(format!("no grid for group `{g}`")));
            };
            if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::InfeasibleSpace(format!("grid value {v} for group `{g}` is outside [0, 1]")));
            }
        }
        if let Some(extra) = self.grid.keys().find(|g| !ds.groups().contains(*g)) {
            return Err(Error::InfeasibleSpace(format!("group `{extra}` is not in the dataset")));
        }
        Ok(())
    }

    /// Sorted, de-duplicated grid values per group, in group order.
    fn axes(&self) -> Vec<(GroupLabel, Vec<f64>)> {
        self.grid
            .iter()
            .map(|(g, vs)| {
                let mut vs = vs.clone();
                vs.sort_by(f64::total_cmp);
                vs.dedup();
                (g.clone(), vs)
            })
            .collect()
    }

    /// Every candidate rule, in lexicographic order of the parameter vector
    /// (groups in label order).
    pub fn candidates(&self) -> Vec<DecisionRule> {
        let axes = self.axes();
        let total: usize = axes.iter().map(|(_, v)| v.len()).product();
        let mut out = Vec::with_capacity(total);
        for mut idx in 0..total {
            let mut params = vec![0.0; axes.len()];
            for (slot, (_, vs)) in params.iter_mut().zip(&axes).rev() {
                *slot = vs[idx % vs.len()];
                idx /= vs.len();
            }
            let map = axes.iter().map(|(g, _)| g.clone()).zip(params).collect();
            out.push(match self.kind {
                RuleKind::GroupRates => DecisionRule::GroupRates(map),
                RuleKind::GroupThresholds => DecisionRule::GroupThresholds(map),
            });
        }
        out
    }
}

/// Records pre-aggregated for repeated evaluation of rules of one kind.
struct Evaluator<'a> {
    builder: ProfileBuilder<'a>,
    kind: RuleKind,
    /// Rate rules: subject counts per (group, outcome, stratum slot by decision).
    cells: Vec<(usize, bool, [Option<usize>; 2], f64)>,
    /// Threshold rules: one entry per subject.
    scored: Vec<(usize, bool, [Option<usize>; 2], f64)>,
}

impl<'a> Evaluator<'a> {
    fn new(ds: &Dataset, cd: &'a ClaimsDifferentiator, w: &'a UtilityWeights, kind: RuleKind) -> Result<Self> {
        let builder = ProfileBuilder::new(ds, cd, w)?;
        let slots = |r: &crate::data::Record| {
            [false, true].map(|d| builder.slot(cd.stratum_of(r.outcome, d, &r.legit).as_ref()))
        };
        let mut cells = Vec::new();
        let mut scored = Vec::new();
        match kind {
            RuleKind::GroupRates => {
                let mut counts: BTreeMap<(usize, bool, [Option<usize>; 2]), f64> = BTreeMap::new();
                for r in ds.records() {
                    *counts.entry((builder.group_index(&r.group), r.outcome, slots(r))).or_default() += 1.0;
                }
                cells = counts.into_iter().map(|((g, y, s), n)| (g, y, s, n)).collect();
            }
            RuleKind::GroupThresholds => {
                for r in ds.records() {
                    let score = r.score.ok_or_else(|| Error::MissingScore { record: r.id.clone() })?;
                    scored.push((builder.group_index(&r.group), r.outcome, slots(r), score));
                }
            }
        }
        Ok(Evaluator {
            builder,
            kind,
            cells,
            scored,
        })
    }

    /// Profile under the rule with parameters `params`, in group order.
    fn profile(&self, params: &[f64]) -> Result<UtilityProfile> {
        let mut b = self.builder.clone();
        match self.kind {
            RuleKind::GroupRates => {
                for &(g, y, slots, n) in &self.cells {
                    let p = params[g];
                    let t = *b.table(g);
                    b.add_cell(g, slots[1], n * p, t.get(true, y));
                    b.add_cell(g, slots[0], n * (1.0 - p), t.get(false, y));
                }
            }
            RuleKind::GroupThresholds => {
                for &(g, y, slots, score) in &self.scored {
                    let d = score >= params[g];
                    let u = b.table(g).get(d, y);
                    b.add_cell(g, slots[d as usize], 1.0, u);
                }
            }
        }
        b.finish()
    }
}

/// Expected utility profile when `rule` replaces the recorded decisions.
///
/// Under a rate rule each subject contributes mass `p_a` with `d = 1` and
/// `1 - p_a` with `d = 0`; with a decision differentiator these fractions land
/// in different strata.
pub fn evaluate_rule(
    ds: &Dataset,
    rule: &DecisionRule,
    cd: &ClaimsDifferentiator,
    w: &UtilityWeights,
) -> Result<UtilityProfile> {
    rule.validate(ds)?;
    let params: Vec<f64> = rule.params().values().copied().collect();
    Evaluator::new(ds, cd, w, rule.kind())?.profile(&params)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub rule: DecisionRule,
    pub total_utility: f64,
    pub egal_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_rule: DecisionRule,
    pub best_value: f64,
    pub objective: PatternSpec,
    pub total_utility: f64,
    pub profile_at_best: UtilityProfile,
    pub evaluated: usize,
    /// Candidates whose objective is undefined (e.g. an empty stratum).
    pub infeasible: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frontier: Option<Vec<FrontierPoint>>,
}

#[derive(Clone, Debug)]
struct Scored {
    value: f64,
    total: f64,
    gap: Option<f64>,
}

fn score(eval: &Evaluator<'_>, rule: &DecisionRule, objective: &PatternSpec) -> Result<Scored> {
    let params: Vec<f64> = rule.params().values().copied().collect();
    let profile = eval.profile(&params)?;
    let value = evaluate_pattern(&profile, objective, 0.0)?.value;
    let gap = egalitarian_metric(&profile, 0.0).ok().map(|r| r.value);
    Ok(Scored {
        value,
        total: profile.total_utility(),
        gap,
    })
}

fn score_all(
    ds: &Dataset,
    space: &RuleSpace,
    candidates: &[DecisionRule],
    cd: &ClaimsDifferentiator,
    w: &UtilityWeights,
    objective: &PatternSpec,
) -> Result<Vec<Option<Scored>>> {
    let eval = Evaluator::new(ds, cd, w, space.kind)?;
    candidates
        .par_iter()
        .map(|rule| match score(&eval, rule, objective) {
            Ok(s) => Ok(Some(s)),
            Err(e) if e.is_undefined() => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// Index of the optimum: best objective value, then highest total utility
/// among ties, then the earliest (lexicographically smallest) candidate.
fn select_best(scores: &[Option<Scored>], direction: Direction) -> Option<usize> {
    let feasible = || scores.iter().enumerate().filter_map(|(i, s)| s.as_ref().map(|s| (i, s)));
    let best_value = feasible()
        .map(|(_, s)| s.value)
        .reduce(|a, b| if direction.better(b, a) { b } else { a })?;
    let eps = tie_eps(best_value);
    let tied = || feasible().filter(move |(_, s)| (s.value - best_value).abs() <= eps);
    let best_total = tied().map(|(_, s)| s.total).fold(f64::NEG_INFINITY, f64::max);
    let eps_total = tie_eps(best_total);
    tied().find(|(_, s)| s.total >= best_total - eps_total).map(|(i, _)| i)
}

/// Exhaustive search of `space` for the rule optimising `objective`
/// (minimising for egalitarian objectives, maximising otherwise). The result
/// carries the total-utility/gap frontier of the same grid.
pub fn optimize(
    ds: &Dataset,
    space: &RuleSpace,
    cd: &ClaimsDifferentiator,
    w: &UtilityWeights,
    objective: &PatternSpec,
) -> Result<OptimizationResult> {
    objective.validate()?;
    space.validate(ds)?;
    let candidates = space.candidates();
    let scores = score_all(ds, space, &candidates, cd, w, objective)?;
    let best = select_best(&scores, objective.direction())
        .ok_or_else(|| Error::InfeasibleSpace("objective is undefined for every candidate".into()))?;
    let infeasible = scores.iter().filter(|s| s.is_none()).count();
    let frontier = frontier_from_scores(&candidates, &scores);
    let best_rule = candidates[best].clone();
    let profile_at_best = evaluate_rule(ds, &best_rule, cd, w)?;
    let best_scored = scores[best].as_ref().expect("selected candidate is feasible");
    Ok(OptimizationResult {
        best_rule,
        best_value: best_scored.value,
        objective: *objective,
        total_utility: best_scored.total,
        profile_at_best,
        evaluated: candidates.len(),
        infeasible,
        frontier: Some(frontier),
    })
}

/// Whether `rule` meets the pattern's criterion relative to the best rule in
/// `space`: within `tol` of the grid optimum. `rule` need not lie on the grid.
pub fn check_pattern_criterion(
    ds: &Dataset,
    space: &RuleSpace,
    cd: &ClaimsDifferentiator,
    w: &UtilityWeights,
    rule: &DecisionRule,
    objective: &PatternSpec,
    tol: f64,
) -> Result<bool> {
    let optimum = optimize(ds, space, cd, w, objective)?.best_value;
    let profile = evaluate_rule(ds, rule, cd, w)?;
    let value = evaluate_pattern(&profile, objective, tol)?.value;
    Ok(match objective.direction() {
        Direction::HigherBetter => value >= optimum - tol,
        Direction::LowerBetter => value <= optimum + tol,
    })
}

fn frontier_from_scores(candidates: &[DecisionRule], scores: &[Option<Scored>]) -> Vec<FrontierPoint> {
    let mut pts: Vec<(usize, f64, f64)> = scores
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.as_ref().and_then(|s| s.gap.map(|g| (i, s.total, g))))
        .collect();
    pts.sort_by(|a, b| a.2.total_cmp(&b.2).then(b.1.total_cmp(&a.1)).then(a.0.cmp(&b.0)));

    // prefix_max[k] = best total among the k smallest gaps
    let mut prefix_max = Vec::with_capacity(pts.len() + 1);
    prefix_max.push(f64::NEG_INFINITY);
    for p in &pts {
        let last = *prefix_max.last().expect("non-empty");
        prefix_max.push(f64::max(last, p.1));
    }
    let mut survivors: Vec<(usize, f64, f64)> = pts
        .iter()
        .copied()
        .filter(|&(_, total, gap)| {
            let (eg, et) = (tie_eps(gap), tie_eps(total));
            let no_worse_gap = pts.partition_point(|p| p.2 <= gap + eg);
            let better_gap = pts.partition_point(|p| p.2 < gap - eg);
            let beaten_on_total = prefix_max[no_worse_gap] > total + et;
            let beaten_on_gap = prefix_max[better_gap] >= total - et;
            !(beaten_on_total || beaten_on_gap)
        })
        .collect();

    // Collapse ties to the earliest candidate.
    survivors.sort_by_key(|p| p.0);
    let mut kept: Vec<(usize, f64, f64)> = Vec::new();
    for p in survivors {
        let dup = kept
            .iter()
            .any(|k| (k.1 - p.1).abs() <= tie_eps(p.1) && (k.2 - p.2).abs() <= tie_eps(p.2));
        if !dup {
            kept.push(p);
        }
    }
    kept.sort_by(|a, b| a.2.total_cmp(&b.2).then(b.1.total_cmp(&a.1)).then(a.0.cmp(&b.0)));
    kept.into_iter()
        .map(|(i, total, gap)| FrontierPoint {
            rule: candidates[i].clone(),
            total_utility: total,
            egal_gap: gap,
        })
        .collect()
}

/// Rules of `space` not dominated in (higher total utility, lower egalitarian
/// gap), sorted by gap ascending. Ties collapse to one representative.
pub fn pareto_frontier(
    ds: &Dataset,
    space: &RuleSpace,
    cd: &ClaimsDifferentiator,
    w: &UtilityWeights,
) -> Result<Vec<FrontierPoint>> {
    space.validate(ds)?;
    let candidates = space.candidates();
    let scores = score_all(ds, space, &candidates, cd, w, &PatternSpec::Egalitarian)?;
    Ok(frontier_from_scores(&candidates, &scores))
}

/// CSV with one column per rule parameter (`p_<group>` or `theta_<group>`),
/// then `total_utility` and `egal_gap`.
pub fn write_frontier_csv<W: Write>(points: &[FrontierPoint], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let Some(first) = points.first() else {
        w.write_record(["total_utility", "egal_gap"])?;
        w.flush()?;
        return Ok(());
    };
    let prefix = first.rule.kind().param_prefix();
    let mut header: Vec<String> = first.rule.params().keys().map(|g| format!("{prefix}_{g}")).collect();
    header.push("total_utility".into());
    header.push("egal_gap".into());
    w.write_record(&header)?;
    for p in points {
        let mut row: Vec<String> = p.rule.params().values().map(|v| v.to_string()).collect();
        row.push(p.total_utility.to_string());
        row.push(p.egal_gap.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Two groups of 10 subjects with exact base rates 0.2 and 0.8, scored
/// 0.9 for positives and 0.1 for negatives. Recorded decisions accept all.
pub fn leveling_down_dataset() -> Dataset {
    use crate::data::Record;
    let mut records = Vec::new();
    for (group, positives) in [("0", 2), ("1", 8)] {
        for i in 0..10 {
            let y = i < positives;
            records.push(Record::new(format!("{group}-{i}"), group, y, true).with_score(if y { 0.9 } else { 0.1 }));
        }
    }
    Dataset::from_records(records).expect("scenario is valid")
}

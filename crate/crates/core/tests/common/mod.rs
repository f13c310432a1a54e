//! Shared scenario builders and independent oracles for the integration and
//! acceptance tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use justdist::data::{
    generate_synthetic, AcceptancePolicy, ClaimsDifferentiator, ClaimsKind, Dataset, GroupLabel, GroupSpec,
    LegitAttrSpec, Stratum, SyntheticSpec, UtilityWeights, WeightTable,
};
use justdist::optimizer::{DecisionRule, RuleKind, RuleSpace};
use justdist::patterns::PatternSpec;
use justdist::utility::{ProfileEntry, UtilityProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn profile_from(values: &[f64]) -> UtilityProfile {
    let groups: Vec<GroupLabel> = (0..values.len()).map(|i| GroupLabel(format!("g{i:02}"))).collect();
    UtilityProfile {
        entries: values
            .iter()
            .zip(&groups)
            .map(|(&v, g)| ProfileEntry {
                group: g.clone(),
                stratum: None,
                expected_utility: v,
                n: 1.0,
            })
            .collect(),
        groups,
        empty: vec![],
        excluded: 0.0,
        weights_used: UtilityWeights::shared(WeightTable::constant(0.0)),
        cd: ClaimsDifferentiator::none(),
    }
}

fn table(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> WeightTable {
    WeightTable::new(
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
    )
}

pub fn random_dataset(rng: &mut ChaCha8Rng, groups: usize, size: std::ops::Range<usize>) -> Dataset {
    let spec = SyntheticSpec {
        groups: (0..groups)
            .map(|g| GroupSpec {
                label: g.to_string(),
                size: rng.random_range(size.clone()),
                base_rate: rng.random_range(0.1..0.9),
                acceptance: AcceptancePolicy::Informed {
                    tpr: rng.random_range(0.3..0.95),
                    fpr: rng.random_range(0.05..0.6),
                },
            })
            .collect(),
        score_noise: rng.random_range(0.05..0.3),
        legit: vec![LegitAttrSpec {
            name: "tier".into(),
            values: vec!["lo".into(), "hi".into()],
        }],
    };
    generate_synthetic(&spec, rng.random()).expect("valid spec")
}

pub fn claims_cycle(i: usize) -> ClaimsDifferentiator {
    match i % 7 {
        0 => ClaimsDifferentiator::none(),
        1 => ClaimsDifferentiator::outcome(&[1]),
        2 => ClaimsDifferentiator::outcome(&[0, 1]),
        3 => ClaimsDifferentiator::decision(&[1]),
        4 => ClaimsDifferentiator::decision(&[0, 1]),
        5 => ClaimsDifferentiator::legitimate("tier", &["lo", "hi"]),
        _ => ClaimsDifferentiator::legitimate("tier", &["hi"]),
    }
}

pub struct Scenario {
    pub ds: Dataset,
    pub space: RuleSpace,
    pub cd: ClaimsDifferentiator,
    pub w: UtilityWeights,
    pub objectives: [PatternSpec; 4],
}

/// Seeded optimizer scenario with at most 10^4 candidate rules.
pub fn optimizer_scenario(i: usize) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + i as u64);
    let n_groups = if i % 4 == 3 { 3 } else { 2 };
    let ds = random_dataset(&mut rng, n_groups, 150..400);
    let kind = if i.is_multiple_of(2) { RuleKind::GroupRates } else { RuleKind::GroupThresholds };
    let points = if n_groups == 3 { rng.random_range(5..=21) } else { rng.random_range(11..=100) };
    let space = RuleSpace::uniform(kind, ds.groups(), points);
    let shared = table(&mut rng, -2.0, 2.0);
    let mut w = UtilityWeights::shared(shared);
    if rng.random_bool(0.3) {
        for g in ds.groups() {
            w = w.with_group(g.clone(), table(&mut rng, -2.0, 2.0));
        }
    }
    let t = rng.random_range(shared.min()..=shared.max());
    let k = rng.random_range(1.5..5.0);
    Scenario {
        ds,
        space,
        cd: claims_cycle(i),
        w,
        objectives: [
            PatternSpec::Egalitarian,
            PatternSpec::Maximin,
            PatternSpec::Prioritarian { k },
            PatternSpec::Sufficientarian { t },
        ],
    }
}

pub const TIE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleBest {
    pub params: Vec<f64>,
    pub value: f64,
    pub total: f64,
}

type Cells = BTreeMap<(bool, bool, Option<String>), f64>;

/// Mass per (d, y, legit value) for the members of `group` when its rule
/// parameter is `q`, computed from counts without the library's evaluation
/// code. `None` if a threshold rule meets a missing score.
fn group_cells(ds: &Dataset, cd: &ClaimsDifferentiator, kind: RuleKind, group: &GroupLabel, q: f64) -> Option<Cells> {
    let legit_attr = match &cd.kind {
        ClaimsKind::Legitimate(a) => Some(a.clone()),
        _ => None,
    };
    let mut counts: BTreeMap<(bool, bool, Option<String>), f64> = BTreeMap::new();
    for r in ds.records().iter().filter(|r| &r.group == group) {
        let l = legit_attr.as_ref().and_then(|a| r.legit.get(a).cloned());
        match kind {
            RuleKind::GroupRates => *counts.entry((true, r.outcome, l)).or_default() += 1.0,
            RuleKind::GroupThresholds => *counts.entry((r.score? >= q, r.outcome, l)).or_default() += 1.0,
        }
    }
    if kind == RuleKind::GroupThresholds {
        return Some(counts);
    }
    let mut cells = Cells::new();
    for ((_, y, l), n) in counts {
        *cells.entry((true, y, l.clone())).or_default() += n * q;
        *cells.entry((false, y, l)).or_default() += n * (1.0 - q);
    }
    Some(cells)
}

type Entries = BTreeMap<(GroupLabel, Option<String>), (f64, f64)>;

/// Expected utility sums and masses per relevant group, and the per-capita
/// total. `None` when some group has no admitted mass.
fn oracle_entries(
    ds: &Dataset,
    cd: &ClaimsDifferentiator,
    w: &UtilityWeights,
    cells: &[(&GroupLabel, &Cells)],
) -> Option<(Entries, f64)> {
    let admitted = |v: &str| cd.values.contains(&Stratum(v.to_owned()));
    let mut groups = Entries::new();
    let mut total_u = 0.0;
    let mut total_m = 0.0;
    for (g, cells) in cells {
        let t = w.per_group.as_ref().and_then(|pg| pg.get(*g)).unwrap_or(&w.shared);
        for ((d, y, l), &m) in cells.iter() {
            if m == 0.0 {
                continue;
            }
            let stratum = match &cd.kind {
                ClaimsKind::None => None,
                ClaimsKind::Outcome => Some(if *y { "1" } else { "0" }.to_owned()),
                ClaimsKind::Decision => Some(if *d { "1" } else { "0" }.to_owned()),
                ClaimsKind::Legitimate(_) => match l {
                    Some(l) => Some(l.clone()),
                    None => continue,
                },
            };
            if let Some(s) = &stratum {
                if !admitted(s) {
                    continue;
                }
            }
            let u = match (*d, *y) {
                (true, true) => t.w11,
                (true, false) => t.w10,
                (false, true) => t.w01,
                (false, false) => t.w00,
            };
            let e = groups.entry(((*g).clone(), stratum)).or_default();
            e.0 += m * u;
            e.1 += m;
            total_u += m * u;
            total_m += m;
        }
    }
    for g in ds.groups() {
        if !groups.keys().any(|(h, _)| h == g) {
            return None;
        }
    }
    let total = if total_m > 0.0 { total_u / total_m } else { 0.0 };
    Some((groups, total))
}

fn oracle_value(
    ds: &Dataset,
    cd: &ClaimsDifferentiator,
    entries: &Entries,
    objective: &PatternSpec,
) -> Option<f64> {
    let means: Vec<f64> = entries.values().map(|(s, m)| s / m).collect();
    let mut sorted = means.clone();
    sorted.sort_by(f64::total_cmp);
    match *objective {
        PatternSpec::Maximin => Some(sorted[0]),
        PatternSpec::Prioritarian { k } => Some(k * sorted[0] + sorted[1..].iter().sum::<f64>()),
        PatternSpec::Sufficientarian { t } => Some(means.iter().filter(|&&v| v >= t).count() as f64),
        PatternSpec::Egalitarian => {
            let strata: Vec<Option<String>> = match cd.kind {
                ClaimsKind::None => vec![None],
                _ => cd.values.iter().map(|v| Some(v.0.clone())).collect(),
            };
            let mut worst: f64 = 0.0;
            for s in strata {
                let vals: Vec<f64> = entries
                    .iter()
                    .filter(|((_, t), _)| *t == s)
                    .map(|(_, (u, m))| u / m)
                    .collect();
                if vals.len() < ds.groups().len() {
                    return None;
                }
                let hi = vals.iter().copied().fold(f64::MIN, f64::max);
                let lo = vals.iter().copied().fold(f64::MAX, f64::min);
                worst = worst.max(hi - lo);
            }
            Some(worst)
        }
        PatternSpec::EgalitarianRatio => unimplemented!("not covered by the oracle"),
    }
}

fn lex_candidates(axes: &[(GroupLabel, Vec<f64>)]) -> Vec<Vec<f64>> {
    match axes.split_first() {
        None => vec![vec![]],
        Some(((_, values), rest)) => {
            let tails = lex_candidates(rest);
            let mut out = Vec::new();
            for v in values {
                for t in &tails {
                    let mut c = vec![*v];
                    c.extend_from_slice(t);
                    out.push(c);
                }
            }
            out
        }
    }
}

/// Exhaustive scan for each objective: best value (ties within `TIE`
/// relative), then highest total utility, then the lexicographically smallest
/// parameters.
pub fn brute_force(
    ds: &Dataset,
    space: &RuleSpace,
    cd: &ClaimsDifferentiator,
    w: &UtilityWeights,
    objectives: &[PatternSpec],
) -> Vec<Option<OracleBest>> {
    let axes: Vec<(GroupLabel, Vec<f64>)> = space
        .grid
        .iter()
        .map(|(g, v)| {
            let mut v = v.clone();
            v.sort_by(f64::total_cmp);
            v.dedup();
            (g.clone(), v)
        })
        .collect();
    let cell_table: Vec<Vec<Option<Cells>>> = axes
        .iter()
        .map(|(g, values)| values.iter().map(|&q| group_cells(ds, cd, space.kind, g, q)).collect())
        .collect();
    let index_axes: Vec<(GroupLabel, Vec<f64>)> = axes
        .iter()
        .map(|(g, v)| (g.clone(), (0..v.len()).map(|i| i as f64).collect()))
        .collect();

    let mut feasible: Vec<Vec<OracleBest>> = vec![Vec::new(); objectives.len()];
    for idx in lex_candidates(&index_axes) {
        let chosen: Option<Vec<(&GroupLabel, &Cells)>> = idx
            .iter()
            .enumerate()
            .map(|(gi, &i)| cell_table[gi][i as usize].as_ref().map(|c| (&axes[gi].0, c)))
            .collect();
        let Some(chosen) = chosen else { continue };
        let Some((entries, total)) = oracle_entries(ds, cd, w, &chosen) else {
            continue;
        };
        let params: Vec<f64> = idx.iter().enumerate().map(|(gi, &i)| axes[gi].1[i as usize]).collect();
        for (o, objective) in objectives.iter().enumerate() {
            if let Some(value) = oracle_value(ds, cd, &entries, objective) {
                feasible[o].push(OracleBest {
                    params: params.clone(),
                    value,
                    total,
                });
            }
        }
    }
    objectives
        .iter()
        .zip(feasible)
        .map(|(objective, feasible)| {
            let minimize = matches!(objective, PatternSpec::Egalitarian);
            let best = feasible
                .iter()
                .map(|c| c.value)
                .reduce(|a, b| if (minimize && b < a) || (!minimize && b > a) { b } else { a })?;
            let eps = TIE * best.abs().max(1.0);
            let tied: Vec<&OracleBest> = feasible.iter().filter(|c| (c.value - best).abs() <= eps).collect();
            let top_total = tied.iter().map(|c| c.total).fold(f64::NEG_INFINITY, f64::max);
            let eps_total = TIE * top_total.abs().max(1.0);
            tied.into_iter().find(|c| c.total >= top_total - eps_total).cloned()
        })
        .collect()
}

pub fn rule_params(rule: &DecisionRule) -> Vec<f64> {
    rule.params().values().copied().collect()
}

pub struct McComparison {
    pub key: String,
    pub analytic: f64,
    pub sampled: f64,
    pub std_err: f64,
}

impl McComparison {
    pub fn agrees(&self) -> bool {
        (self.analytic - self.sampled).abs() <= (3.0 * self.std_err).max(1e-12)
    }
}

/// Seeded Monte-Carlo check of a group-rate rule: `samples` draws of a subject
/// uniformly from the dataset and a decision from its group's rate.
pub fn monte_carlo_scenario(i: usize, samples: usize) -> Vec<McComparison> {
    use justdist::optimizer::evaluate_rule;
    let mut rng = ChaCha8Rng::seed_from_u64(500 + i as u64);
    let ds = random_dataset(&mut rng, 2, 200..600);
    let rule = DecisionRule::GroupRates(ds.groups().iter().map(|g| (g.clone(), rng.random_range(0.05..0.95))).collect());
    let w = UtilityWeights::shared(table(&mut rng, -3.0, 3.0));
    let cd = match i % 3 {
        0 => ClaimsDifferentiator::none(),
        1 => ClaimsDifferentiator::outcome(&[0, 1]),
        _ => ClaimsDifferentiator::decision(&[0, 1]),
    };
    let profile = evaluate_rule(&ds, &rule, &cd, &w).expect("defined");

    // (sum, sum of squares, count) per relevant group
    let mut acc: BTreeMap<String, (f64, f64, f64)> = BTreeMap::new();
    let records = ds.records();
    for _ in 0..samples {
        let r = &records[rng.random_range(0..records.len())];
        let d = rng.random_bool(rule.params()[&r.group]);
        let u = w.shared.get(d, r.outcome);
        let stratum = match cd.kind {
            ClaimsKind::None => String::new(),
            ClaimsKind::Outcome => format!("|j={}", r.outcome as u8),
            _ => format!("|j={}", d as u8),
        };
        let e = acc.entry(format!("a={}{stratum}", r.group)).or_default();
        e.0 += u;
        e.1 += u * u;
        e.2 += 1.0;
    }
    profile
        .entries
        .iter()
        .map(|e| {
            let key = e.key().to_string();
            let (s, ss, n) = acc[&key];
            let mean = s / n;
            let var = (ss / n - mean * mean).max(0.0) * n / (n - 1.0);
            McComparison {
                key,
                analytic: e.expected_utility,
                sampled: mean,
                std_err: (var / n).sqrt(),
            }
        })
        .collect()
}

/// For `scenarios` seeded grids with weights spanning less than 1, checks that
/// the prioritarian optimum at k = 10^6 is a maximin-optimal rule whenever the
/// best worst-off value beats every lower worst-off value by more than 10^-6.
/// Returns (qualifying grids, grids whose maximin optimum is unique).
pub fn prioritarian_argmax_agreement(scenarios: usize) -> Result<(usize, usize), String> {
    use justdist::optimizer::{evaluate_rule, optimize};
    let mut checked = 0;
    let mut singleton = 0;
    for i in 0..scenarios {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + i as u64);
        let ds = random_dataset(&mut rng, 2, 50..150);
        let kind = if i.is_multiple_of(2) { RuleKind::GroupRates } else { RuleKind::GroupThresholds };
        let space = RuleSpace::uniform(kind, ds.groups(), 11);
        let w = UtilityWeights::shared(table(&mut rng, -0.45, 0.45));
        let cd = match i % 3 {
            0 => ClaimsDifferentiator::none(),
            1 => ClaimsDifferentiator::outcome(&[0, 1]),
            _ => ClaimsDifferentiator::legitimate("tier", &["lo", "hi"]),
        };
        let worst: Vec<(Vec<f64>, f64)> = space
            .candidates()
            .into_iter()
            .filter_map(|r| {
                let p = evaluate_rule(&ds, &r, &cd, &w).ok()?;
                let m = p.values().into_iter().fold(f64::INFINITY, f64::min);
                Some((rule_params(&r), m))
            })
            .collect();
        let top = worst.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        let next = worst
            .iter()
            .map(|c| c.1)
            .filter(|&m| m < top - 1e-12)
            .fold(f64::NEG_INFINITY, f64::max);
        if top - next <= 1e-6 {
            continue;
        }
        let argmax: Vec<&Vec<f64>> = worst.iter().filter(|c| c.1 >= top - 1e-12).map(|c| &c.0).collect();
        let maximin = optimize(&ds, &space, &cd, &w, &PatternSpec::Maximin).map_err(|e| e.to_string())?;
        let prio =
            optimize(&ds, &space, &cd, &w, &PatternSpec::Prioritarian { k: 1e6 }).map_err(|e| e.to_string())?;
        let prio_rule = rule_params(&prio.best_rule);
        if !argmax.contains(&&prio_rule) {
            return Err(format!("scenario {i}: prioritarian optimum {prio_rule:?} is not maximin-optimal"));
        }
        if argmax.len() == 1 && rule_params(&maximin.best_rule) != prio_rule {
            return Err(format!("scenario {i}: unique maximin rule differs from prioritarian"));
        }
        checked += 1;
        singleton += (argmax.len() == 1) as usize;
    }
    Ok((checked, singleton))
}

//! Total utility against the egalitarian gap for group-specific score
//! thresholds, written as CSV to stdout.

use justdist::data::{generate_synthetic, ClaimsDifferentiator, SyntheticSpec, UtilityWeights, WeightTable};
use justdist::optimizer::{pareto_frontier, write_frontier_csv, RuleKind, RuleSpace};

fn main() -> justdist::Result<()> {
    let mut spec = SyntheticSpec::two_groups(2_000, [0.35, 0.6], [0.5, 0.5]);
    spec.score_noise = 0.2;
    let ds = generate_synthetic(&spec, 3)?;
    let space = RuleSpace::uniform(RuleKind::GroupThresholds, ds.groups(), 41);
    let w = UtilityWeights::shared(WeightTable::new(1.0, -0.5, 0.0, 0.0));
    let points = pareto_frontier(&ds, &space, &ClaimsDifferentiator::none(), &w)?;
    eprintln!("{} of {} rules are on the frontier", points.len(), space.len());
    write_frontier_csv(&points, std::io::stdout())
}

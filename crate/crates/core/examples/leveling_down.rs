//! Equality bought by making the better-off group worse off: the egalitarian
//! optimum rejects everyone, while maximin keeps accepting the group that
//! gains from it.

use justdist::data::{ClaimsDifferentiator, UtilityWeights, WeightTable};
use justdist::optimizer::{leveling_down_dataset, optimize, RuleKind, RuleSpace};
use justdist::patterns::PatternSpec;

fn main() -> justdist::Result<()> {
    let ds = leveling_down_dataset();
    let space = RuleSpace::uniform(RuleKind::GroupRates, ds.groups(), 11);
    let w = UtilityWeights::shared(WeightTable::new(1.0, -1.0, 0.0, 0.0));
    let none = ClaimsDifferentiator::none();
    for objective in [
        PatternSpec::Egalitarian,
        PatternSpec::Maximin,
        PatternSpec::Prioritarian { k: 2.0 },
        PatternSpec::Sufficientarian { t: 0.0 },
    ] {
        let r = optimize(&ds, &space, &none, &w, &objective)?;
        let rule: Vec<String> = r.best_rule.params().iter().map(|(g, p)| format!("p{g}={p}")).collect();
        println!(
            "{:<16} best {:<14} value {:>5.2}  profile {:?}  total {:.2}",
            objective.name(),
            rule.join(" "),
            r.best_value,
            r.profile_at_best.values(),
            r.total_utility
        );
    }
    Ok(())
}

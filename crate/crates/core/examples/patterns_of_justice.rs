//! The four patterns of justice applied to the same utility profile, and how
//! the claims differentiator changes which groups are compared.

use justdist::data::{fixture_t1, ClaimsDifferentiator, UtilityWeights, WeightTable};
use justdist::patterns::{evaluate_pattern, PatternSpec};
use justdist::utility::utility_profile;

fn main() -> justdist::Result<()> {
    let ds = fixture_t1();
    let w = UtilityWeights::shared(WeightTable::new(2.0, -1.0, 0.0, 1.0));
    for cd in [
        ClaimsDifferentiator::none(),
        ClaimsDifferentiator::outcome(&[1]),
        ClaimsDifferentiator::outcome(&[0, 1]),
    ] {
        let profile = utility_profile(&ds, &cd, &w)?;
        println!("claims {:?} {:?}", cd.kind, cd.values.iter().map(|v| v.0.as_str()).collect::<Vec<_>>());
        for e in &profile.entries {
            println!("  {}  E[U] = {}", e.key(), e.expected_utility);
        }
        for p in [
            PatternSpec::Egalitarian,
            PatternSpec::Maximin,
            PatternSpec::Prioritarian { k: 3.0 },
            PatternSpec::Sufficientarian { t: 0.0 },
        ] {
            match evaluate_pattern(&profile, &p, 1e-9) {
                Ok(r) => println!("  {:<16} {:>8.4}  satisfied: {:?}", p.name(), r.value, r.satisfied),
                Err(e) => println!("  {:<16} {e}", p.name()),
            }
        }
    }
    Ok(())
}

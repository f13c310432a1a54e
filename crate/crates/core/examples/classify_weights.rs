//! Which classical criterion, if any, egalitarianism reduces to for a given
//! utility table and claims differentiator.

use justdist::data::{ClaimsDifferentiator, UtilityWeights, WeightTable};
use justdist::equivalence::{canonical_settings, classify_weights};

fn main() {
    for (criterion, w, cd) in canonical_settings("tier", &["low", "high"]) {
        let f = classify_weights(&w, &cd);
        let multipliers: Vec<String> = f
            .stratum_multipliers
            .iter()
            .map(|m| format!("{}", m.multiplier))
            .collect();
        println!(
            "{:<32} w = {:?} -> {:?} (multipliers {})",
            criterion.display_name(),
            w.shared.entries(),
            f.matched.map(|c| c.display_name()),
            multipliers.join(", ")
        );
    }

    // Equal utility for accepted and rejected positives: no longer equality
    // of opportunity.
    let f = classify_weights(
        &UtilityWeights::shared(WeightTable::new(1.0, 0.0, 1.0, 0.0)),
        &ClaimsDifferentiator::outcome(&[1]),
    );
    println!("\nw11 = w01 under y=1: matched {:?}", f.matched);
    for c in &f.conditions_checked {
        println!("  {:<40} {}", c.condition, c.holds);
    }
}

//! Seeded synthetic populations: the same seed gives the same records.

use justdist::data::{dataset_to_csv, generate_synthetic, AcceptancePolicy, LegitAttrSpec, SyntheticSpec};
use justdist::interface::DatasetSummary;

fn main() -> justdist::Result<()> {
    let mut spec = SyntheticSpec::two_groups(10_000, [0.2, 0.5], [0.3, 0.3]);
    spec.groups[0].acceptance = AcceptancePolicy::Threshold { threshold: 0.5 };
    spec.legit.push(LegitAttrSpec {
        name: "tier".into(),
        values: vec!["low".into(), "high".into()],
    });
    let a = generate_synthetic(&spec, 42)?;
    let b = generate_synthetic(&spec, 42)?;
    assert_eq!(dataset_to_csv(&a), dataset_to_csv(&b));
    for g in DatasetSummary::of(&a).groups {
        println!(
            "group {}: n = {}, base rate {:.3}, acceptance rate {:.3}",
            g.label, g.n, g.base_rate, g.acceptance_rate
        );
    }
    print!("{}", dataset_to_csv(&a).lines().take(4).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}

//! Classical parity gaps computed from counts on a synthetic population.

use justdist::classical::{classical_gap, ClassicalCriterion};
use justdist::data::{generate_synthetic, AcceptancePolicy, SyntheticSpec};

fn main() -> justdist::Result<()> {
    let mut spec = SyntheticSpec::two_groups(5_000, [0.3, 0.6], [0.4, 0.4]);
    spec.groups[1].acceptance = AcceptancePolicy::Informed { tpr: 0.8, fpr: 0.1 };
    let ds = generate_synthetic(&spec, 7)?;
    for c in ClassicalCriterion::unconditional() {
        let report = classical_gap(&ds, &c, 0.01)?;
        let rates: Vec<String> = report
            .gaps
            .iter()
            .map(|g| {
                let per_group: Vec<String> = g.rates.iter().map(|r| format!("{}:{:.3}", r.group, r.rate)).collect();
                per_group.join(" ")
            })
            .collect();
        println!("{:<30} gap {:.4}  [{}]", c.display_name(), report.overall, rates.join(" | "));
    }
    Ok(())
}

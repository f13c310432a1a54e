//! Audit the eight-record fixture under one utility table and print the report.

use justdist::data::{fixture_t1, ClaimsDifferentiator, UtilityWeights, WeightTable};
use justdist::interface::{render_table, run_audit, AuditSpec};
use justdist::patterns::PatternSpec;

fn main() -> justdist::Result<()> {
    let ds = fixture_t1();
    let spec = AuditSpec {
        weights: UtilityWeights::shared(WeightTable::new(2.0, -1.0, 0.0, 1.0)),
        claims: ClaimsDifferentiator::none(),
        patterns: vec![
            PatternSpec::Egalitarian,
            PatternSpec::Maximin,
            PatternSpec::Prioritarian { k: 2.0 },
            PatternSpec::Sufficientarian { t: 0.5 },
        ],
        tolerance: 1e-9,
    };
    let report = run_audit(&ds, &spec, None)?;
    print!("{}", render_table(&report));
    Ok(())
}

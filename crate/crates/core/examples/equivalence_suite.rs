//! Randomized check that the egalitarian gap equals the matched classical gap
//! times its multiplier. Usage: `equivalence_suite [trials] [n] [seed]`.

use justdist::equivalence::{randomized_equivalence_suite, SuiteConfig};

fn main() -> justdist::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let trials = args.first().copied().unwrap_or(50) as usize;
    let n = args.get(1).copied().unwrap_or(1000) as usize;
    let seed = args.get(2).copied().unwrap_or(1);
    let summary = randomized_equivalence_suite(&SuiteConfig::new(trials, n, seed))?;
    for row in &summary.rows {
        println!(
            "{:<32} {:>4} verified  max residual {:.2e}",
            row.criterion.display_name(),
            row.verified,
            row.max_residual
        );
    }
    println!("overall max residual {:.2e}", summary.max_residual);
    Ok(())
}

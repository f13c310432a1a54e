//! Audit a CSV against a TOML config, the same inputs the `audit` subcommand
//! takes.

use justdist::data::read_dataset;
use justdist::interface::{render_json, run_audit, AuditConfig};

const CONFIG: &str = r#"
tolerance = 1e-9

[weights]
w11 = 1
w10 = 1
w01 = 0
w00 = 0

[claims]
kind = "legitimate"
attr = "tier"
values = ["low", "high"]

[pattern]
kind = "egalitarian"

[schema]
legit = ["tier"]
"#;

const DATA: &str = "\
id,a,y,d,tier
1,x,1,1,low
2,x,0,1,low
3,x,1,0,high
4,y,1,1,low
5,y,0,0,low
6,y,1,1,high
";

fn main() -> justdist::Result<()> {
    let cfg = AuditConfig::parse(CONFIG)?;
    let ds = read_dataset(DATA.as_bytes(), &cfg.schema)?;
    let report = run_audit(&ds, &cfg.audit_spec(), None)?;
    print!("{}", render_json(&report.equivalence));
    Ok(())
}

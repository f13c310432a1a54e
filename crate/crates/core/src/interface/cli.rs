//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 when
//! `audit --assert` finds a pattern unsatisfied or the equivalence suite
//! exceeds its residual bound.

use std::ffi::OsString;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classical::{classical_gap, ClassicalCriterion};
use crate::data::{generate_synthetic, load_dataset, write_dataset, ClaimsKind, CsvSchema, Dataset, SyntheticSpec};
use crate::equivalence::{randomized_equivalence_suite, SuiteConfig, WeightMode};
use crate::error::{Error, Result};
use crate::optimizer::{pareto_frontier, write_frontier_csv};
use crate::patterns::{PatternSpec, DEFAULT_TOLERANCE};

use super::config::AuditConfig;
use super::report::{optimize_request, render_json, render_table, run_audit, Computed, OptimizeSpec};

/// Residual bound for the equivalence suite.
pub const EQUIVALENCE_BOUND: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "justdist", version, about = "Audit decision systems by the distribution of utility across groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Audit recorded decisions: profile, patterns, classical gaps, equivalence
    Audit(AuditArgs),
    /// Classical parity gaps of recorded decisions
    Classical(ClassicalArgs),
    /// Randomized check of the egalitarian/classical equivalences
    Equivalence(EquivalenceArgs),
    /// Search the rule space for the pattern-optimal rule
    Optimize(OptimizeArgs),
    /// Total-utility/gap frontier of the rule space as CSV
    Frontier(FrontierArgs),
    /// Write a synthetic population as CSV
    Generate(GenerateArgs),
    /// Run the HTTP service
    Serve(ServeArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args, Debug)]
struct DataArgs {
    /// CSV file with columns a, y, d (see [schema] in the config)
    #[arg(long)]
    data: PathBuf,
    /// TOML config with [weights], [claims], [pattern], [rulespace]
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[command(flatten)]
    input: DataArgs,
    /// Override the config tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Exit with 2 unless every pattern is satisfied
    #[arg(long)]
    assert: bool,
    /// Also write the JSON report here
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args, Debug)]
struct ClassicalArgs {
    #[arg(long)]
    data: PathBuf,
    /// Optional config: its [schema] maps columns and legitimate claims add
    /// conditional statistical parity
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EquivalenceArgs {
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Records per group
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Draw weights that violate the group-independence condition
    #[arg(long)]
    group_dependent: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Objective {
    Egalitarian,
    EgalitarianRatio,
    Maximin,
    Prioritarian,
    Sufficientarian,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[command(flatten)]
    input: DataArgs,
    /// Objective; defaults to the first pattern in the config
    #[arg(long, value_enum)]
    objective: Option<Objective>,
    /// Prioritarian weight on the worst-off group
    #[arg(long, default_value_t = 2.0)]
    k: f64,
    /// Sufficientarian threshold
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    /// Write the frontier as CSV here
    #[arg(long)]
    frontier_csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FrontierArgs {
    #[command(flatten)]
    input: DataArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// TOML synthetic spec; overrides the two-group flags
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Records per group
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.3, 0.6])]
    base_rates: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.5, 0.5])]
    accept_rates: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long, env = "JUSTDIST_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Audit(a) => audit(a),
        Command::Classical(a) => classical(a),
        Command::Equivalence(a) => equivalence(a),
        Command::Optimize(a) => optimize(a),
        Command::Frontier(a) => frontier(a),
        Command::Generate(a) => generate(a),
        Command::Serve(a) => serve(a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load(input: &DataArgs) -> Result<(Dataset, AuditConfig)> {
    let cfg = AuditConfig::load(&input.config)?;
    let ds = load_dataset(&input.data, &cfg.schema).map_err(|e| with_path(e, &input.data))?;
    Ok((ds, cfg))
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Io(io) => Error::Config(format!("cannot read `{}`: {io}", path.display())),
        other => other,
    }
}

fn audit(args: AuditArgs) -> Result<i32> {
    let (ds, cfg) = load(&args.input)?;
    let mut spec = cfg.audit_spec();
    if let Some(tol) = args.tol {
        spec.tolerance = tol;
    }
    let report = run_audit(&ds, &spec, None)?;
    let json = render_json(&report);
    if let Some(path) = &args.out {
        std::fs::write(path, &json)?;
    }
    match args.format {
        Format::Json => print!("{json}"),
        Format::Table => print!("{}", render_table(&report)),
    }
    if args.assert && !report.all_satisfied() {
        eprintln!("assertion failed: not every pattern is satisfied");
        return Ok(2);
    }
    Ok(0)
}

fn classical(args: ClassicalArgs) -> Result<i32> {
    let cfg = args.config.as_deref().map(AuditConfig::load).transpose()?;
    let schema = cfg.as_ref().map(|c| c.schema.clone()).unwrap_or_else(CsvSchema::default);
    let ds = load_dataset(&args.data, &schema).map_err(|e| with_path(e, &args.data))?;
    let mut criteria = ClassicalCriterion::unconditional().to_vec();
    if let Some(cfg) = &cfg {
        if let ClaimsKind::Legitimate(attr) = &cfg.claims.kind {
            criteria.insert(
                1,
                ClassicalCriterion::ConditionalStatisticalParity {
                    attr: attr.clone(),
                    values: cfg.claims.values.iter().map(|v| v.0.clone()).collect(),
                },
            );
        }
    }
    let gaps = criteria
        .iter()
        .map(|c| {
            match classical_gap(&ds, c, args.tol) {
                Ok(g) => Ok(Computed::Ok(g)),
                Err(e) if e.is_undefined() => Ok(Computed::Undefined {
                    code: e.code().into(),
                    message: e.to_string(),
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    emit(args.out.as_deref(), &render_json(&gaps))?;
    Ok(0)
}

fn equivalence(args: EquivalenceArgs) -> Result<i32> {
    let mut cfg = SuiteConfig::new(args.trials, args.n, args.seed);
    if args.group_dependent {
        cfg.weights = WeightMode::GroupDependent;
    }
    let summary = randomized_equivalence_suite(&cfg)?;
    emit(args.out.as_deref(), &render_json(&summary))?;
    for row in &summary.rows {
        eprintln!(
            "{:<32} verified {:>4}  skipped {:>4}  max residual {:e}",
            row.criterion.display_name(),
            row.verified,
            row.skipped_by_condition + row.skipped_undefined,
            row.max_residual
        );
    }
    Ok(if summary.max_residual <= EQUIVALENCE_BOUND { 0 } else { 2 })
}

fn optimize(args: OptimizeArgs) -> Result<i32> {
    let (ds, cfg) = load(&args.input)?;
    let objective = match args.objective {
        None => cfg.pattern[0],
        Some(Objective::Egalitarian) => PatternSpec::Egalitarian,
        Some(Objective::EgalitarianRatio) => PatternSpec::EgalitarianRatio,
        Some(Objective::Maximin) => PatternSpec::Maximin,
        Some(Objective::Prioritarian) => PatternSpec::Prioritarian { k: args.k },
        Some(Objective::Sufficientarian) => PatternSpec::Sufficientarian { t: args.t },
    };
    let spec = OptimizeSpec {
        weights: cfg.weights.clone(),
        claims: cfg.claims.clone(),
        objective,
        rulespace: cfg.rulespace()?.clone(),
        frontier: true,
    };
    let report = optimize_request(&ds, &spec, None)?;
    if let Some(path) = &args.frontier_csv {
        let file = std::fs::File::create(path)?;
        write_frontier_csv(report.result.frontier.as_deref().unwrap_or_default(), file)?;
    }
    emit(args.out.as_deref(), &render_json(&report))?;
    Ok(0)
}

fn frontier(args: FrontierArgs) -> Result<i32> {
    let (ds, cfg) = load(&args.input)?;
    let space = cfg.rulespace()?.build(&ds)?;
    let points = pareto_frontier(&ds, &space, &cfg.claims, &cfg.weights)?;
    let mut buf = Vec::new();
    write_frontier_csv(&points, &mut buf)?;
    emit(args.out.as_deref(), &String::from_utf8(buf).expect("csv is utf-8"))?;
    Ok(0)
}

fn generate(args: GenerateArgs) -> Result<i32> {
    let spec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read `{}`: {e}", path.display())))?;
            toml::from_str::<SyntheticSpec>(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => SyntheticSpec::two_groups(
            args.n,
            [args.base_rates[0], args.base_rates[1]],
            [args.accept_rates[0], args.accept_rates[1]],
        ),
    };
    let ds = generate_synthetic(&spec, args.seed)?;
    let mut buf = Vec::new();
    write_dataset(&ds, &mut buf)?;
    emit(args.out.as_deref(), &String::from_utf8(buf).expect("csv is utf-8"))?;
    Ok(0)
}

fn serve(args: ServeArgs) -> Result<i32> {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(super::service::serve(SocketAddr::new(args.host, args.port)))?;
    Ok(0)
}

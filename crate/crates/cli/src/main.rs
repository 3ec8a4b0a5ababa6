use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use wsee_core::optimizer::Algorithm;
use wsee_core::props::{self, PropsBudget};
use wsee_core::runner::{export_report, run_campaign, CampaignConfig, Preset};

#[derive(Parser)]
#[command(name = "wsee", version, about = "WSEE power control campaigns for cell-free massive MIMO")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo campaign and write CSV/JSON reports.
    Run(RunArgs),
    /// Validate a configuration without running it.
    Check(SourceArgs),
    /// Print a configuration as TOML.
    Config(SourceArgs),
    /// Run the numerical property suites.
    Props(PropsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Desk,
    Paper,
}

#[derive(Args)]
struct SourceArgs {
    /// TOML campaign file; overrides --preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "desk")]
    preset: PresetArg,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// High- over low-priority weight ratio.
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Comma-separated subset of nested_qt, dinkelbach_like, wgee, full_power.
    #[arg(long, value_delimiter = ',')]
    algos: Option<Vec<String>>,
    #[arg(long, env = "WSEE_OUT_DIR")]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Enforce the per-UE minimum-rate constraints.
    #[arg(long)]
    qos: bool,
}

#[derive(Args)]
struct PropsArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Smaller budget for a fast smoke run.
    #[arg(long)]
    quick: bool,
}

/// Failures that map to exit code 1.
#[derive(Debug)]
struct ConfigProblem(String);

impl std::fmt::Display for ConfigProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigProblem {}

fn config_err(e: impl std::fmt::Display) -> anyhow::Error {
    ConfigProblem(e.to_string()).into()
}

fn load(source: &SourceArgs) -> Result<CampaignConfig> {
    match &source.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
            CampaignConfig::from_toml(&text).map_err(config_err)
        }
        None => Ok(CampaignConfig::preset(match source.preset {
            PresetArg::Desk => Preset::Desk,
            PresetArg::Paper => Preset::Paper,
        })),
    }
}

fn validated(cfg: &CampaignConfig) -> Result<()> {
    for w in cfg.validate().map_err(config_err)? {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = load(&args.source)?;
    if let Some(seed) = args.seed {
        cfg.sim.rng_seed = seed;
    }
    if let Some(n) = args.trials {
        cfg.num_trials = n;
    }
    if let Some(omega) = args.omega {
        cfg.omega = omega;
    }
    if let Some(names) = &args.algos {
        cfg.algorithms = names
            .iter()
            .map(|n| Algorithm::parse(n.trim()).ok_or_else(|| config_err(format!("unknown algorithm `{n}`"))))
            .collect::<Result<_>>()?;
    }
    if let Some(out) = args.out {
        cfg.output_dir = out;
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    if args.qos {
        cfg.solve.enforce_qos = true;
    }
    validated(&cfg)?;

    let report = run_campaign(&cfg).context("campaign failed")?;
    let files = export_report(&report, &cfg.output_dir)
        .with_context(|| format!("writing reports to {}", cfg.output_dir.display()))?;

    println!("{:<16} {:>9} {:>14} {:>14} {:>10}", "algorithm", "feasible", "mean WSEE", "mean WGEE", "mean iter");
    for s in &report.summaries {
        println!(
            "{:<16} {:>9} {:>14.6e} {:>14.6e} {:>10.2}",
            s.algorithm.name(),
            format!("{}/{}", s.feasible_trials, s.feasible_trials + s.infeasible_trials),
            s.mean_wsee,
            s.mean_wgee,
            s.mean_iterations
        );
    }
    println!("wrote {} files to {}", files.len(), cfg.output_dir.display());
    if report.exhausted() {
        bail!("no feasible trial for at least one algorithm");
    }
    Ok(())
}

fn props_cmd(args: PropsArgs) -> Result<()> {
    let budget = if args.quick {
        PropsBudget {
            scalar_cases: 200,
            model_cases: 10,
            probes: 200,
        }
    } else {
        PropsBudget::default()
    };
    let results = props::run_all(args.seed, budget);
    for r in &results {
        println!(
            "{} {:<24} cases={:<6} {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.cases,
            r.detail
        );
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        bail!("{failed} property suite(s) failed");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are configuration errors; help and version are not errors
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Check(source) => load(&source).and_then(|cfg| {
            validated(&cfg)?;
            println!("ok: {} UEs, {} trials, {} algorithm(s)", cfg.sim.num_ues, cfg.num_trials, cfg.algorithms.len());
            Ok(())
        }),
        Command::Config(source) => load(&source).and_then(|cfg| {
            print!("{}", cfg.to_toml().map_err(config_err)?);
            Ok(())
        }),
        Command::Props(args) => props_cmd(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigProblem>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

//! Command-line front end: topology generation, single-scheme runs,
//! multi-scheme comparisons and the rate-table dump, all writing
//! plot-ready CSVs into a run directory.
//!
//! Exit codes: 0 success, 1 invalid configuration or I/O failure,
//! 2 non-convergence within max_slots (results are still written).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chanalloc::coding::RateTable;
use chanalloc::error::Error;
use chanalloc::experiment::{
    compare_schemes, run_scenario, write_compare_outputs, write_run_outputs, ScenarioConfig, Scheme,
};
use chanalloc::io::fmt_sig;
use chanalloc::topology::generate_network;

#[derive(Parser)]
#[command(
    name = "chanalloc",
    version,
    about = "Distributed channel-allocation game simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a topology and write topology.csv and gains.csv
    Generate(CommonArgs),
    /// Run one scheme to convergence and evaluate it
    Run(CommonArgs),
    /// Run several schemes from the same network and initial assignment
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated scheme list
        #[arg(long, default_value = "potential,learn_u2,learn_u1,random")]
        schemes: String,
    },
    /// Dump the adaptive-coding rate table as CSV
    Table1 {
        /// Also write table1.csv into this directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// JSON scenario config; flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// potential | learn_u1 | learn_u2 | random
    #[arg(long)]
    scheme: Option<String>,
    /// Number of transmitter-receiver pairs
    #[arg(long)]
    n: Option<usize>,
    /// Number of channels
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    beta: Option<f64>,
    /// Maximum adaptation slots
    #[arg(long)]
    slots: Option<u64>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl CommonArgs {
    fn scenario(&self) -> Result<ScenarioConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
            }
            None => ScenarioConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(scheme) = &self.scheme {
            cfg.scheme = Scheme::parse(scheme)?;
        }
        if let Some(n) = self.n {
            cfg.n_pairs = n;
        }
        if let Some(k) = self.k {
            cfg.n_channels = k;
        }
        if let Some(beta) = self.beta {
            cfg.beta = beta;
        }
        if let Some(slots) = self.slots {
            cfg.max_slots = slots;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn cmd_generate(args: &CommonArgs) -> Result<ExitCode, Error> {
    let cfg = args.scenario()?;
    let net = generate_network(cfg.seed, &cfg.topology_params())?;
    fs::create_dir_all(&args.out)?;
    let mut buf = Vec::new();
    net.write_topology_csv(&mut buf)?;
    fs::write(args.out.join("topology.csv"), &buf)?;
    buf.clear();
    net.write_gains_csv(&mut buf)?;
    fs::write(args.out.join("gains.csv"), &buf)?;
    println!(
        "generated topology: n={} area={} seed={} -> {}",
        cfg.n_pairs,
        cfg.area_side,
        cfg.seed,
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_run(args: &CommonArgs) -> Result<ExitCode, Error> {
    let cfg = args.scenario()?;
    let net = generate_network(cfg.seed, &cfg.topology_params())?;
    let result = run_scenario(&cfg)?;
    write_run_outputs(&args.out, &net, &result)?;
    let converged = result
        .converged_at
        .map(|s| s.to_string())
        .unwrap_or_else(|| "none".to_string());
    println!(
        "scheme={} seed={} total={} mean={} variance={} converged_at={} out={}",
        result.scheme.label(),
        cfg.seed,
        fmt_sig(result.stats.total_throughput),
        fmt_sig(result.stats.mean_throughput),
        fmt_sig(result.stats.variance_throughput),
        converged,
        args.out.display()
    );
    if result.converged_at.is_none() {
        eprintln!("warning: no convergence within {} slots", cfg.max_slots);
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare(args: &CommonArgs, schemes: &str) -> Result<ExitCode, Error> {
    let cfg = args.scenario()?;
    let schemes: Vec<Scheme> = schemes
        .split(',')
        .map(|s| Scheme::parse(s.trim()))
        .collect::<Result<_, _>>()?;
    let comparison = compare_schemes(&cfg, &schemes)?;
    write_compare_outputs(&args.out, &comparison)?;
    println!(
        "initial total={}",
        fmt_sig(comparison.initial_stats.total_throughput)
    );
    let mut unconverged = false;
    for result in &comparison.results {
        let converged = result
            .converged_at
            .map(|s| s.to_string())
            .unwrap_or_else(|| "none".to_string());
        println!(
            "scheme={} total={} mean={} variance={} converged_at={}",
            result.scheme.label(),
            fmt_sig(result.stats.total_throughput),
            fmt_sig(result.stats.mean_throughput),
            fmt_sig(result.stats.variance_throughput),
            converged
        );
        unconverged |= result.converged_at.is_none();
    }
    println!("outputs -> {}", args.out.display());
    if unconverged {
        eprintln!(
            "warning: at least one scheme did not converge within {} slots",
            cfg.max_slots
        );
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_table1(out: Option<&PathBuf>) -> Result<ExitCode, Error> {
    let mut buf = Vec::new();
    RateTable::standard().write_csv(&mut buf)?;
    print!("{}", String::from_utf8_lossy(&buf));
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("table1.csv"), &buf)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    let outcome = match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Run(args) => cmd_run(args),
        Command::Compare { common, schemes } => cmd_compare(common, schemes),
        Command::Table1 { out } => cmd_table1(out.as_ref()),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use fas_ambc::harness::{
    emit_dat, emit_results, oracle_check, parse_schemes, simulate, sweep, ExperimentConfig,
    SweepAxis, SweepTable, MATCH_TOLERANCE,
};
use fas_ambc::selftest::run_selftest;

#[derive(Parser, Debug)]
#[command(name = "fas-ambc", version, about = "Fluid-antenna ambient backscatter Monte Carlo simulator")]
struct Cli {
    /// JSON experiment configuration; unknown keys are rejected.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for all random streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of Monte Carlo realizations per point.
    #[arg(long, global = true)]
    realizations: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    /// Comma-separated schemes, e.g. fas:K=5,fas:K=10,tas.
    #[arg(long, global = true, default_value = "fas:K=5,fas:K=10,fas:K=20,tas")]
    schemes: String,
    /// Calibrate the average SNR to this many dB (overrides the geometry).
    #[arg(long, global = true, allow_negative_numbers = true)]
    snr_db: Option<f64>,
    /// Also write one gnuplot .dat file per scheme.
    #[arg(long, global = true)]
    dat: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every scheme once at the configured operating point.
    Simulate,
    /// Sweep one parameter axis.
    Sweep {
        /// avg_snr_db, eh_margin, sigma_delta2, spacing_over_lambda or port_count.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values; the axis default grid when omitted.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        values: Option<Vec<f64>>,
    },
    /// Compare the swarm against the exact oracle on seeded realizations.
    OracleCheck {
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(n) = cli.realizations {
        cfg.n_realizations = n;
    }
    if let Some(db) = cli.snr_db {
        cfg.target_avg_snr_db = Some(db);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_table(cli: &Cli, table: &SweepTable, stem: &str) -> Result<()> {
    let csv = cli.out.join(format!("{stem}.csv"));
    let meta = emit_results(table, &csv)?;
    println!("wrote {} and {}", csv.display(), meta.display());
    if cli.dat {
        for p in emit_dat(table, &cli.out.join(format!("{stem}_dat")))? {
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn print_table(table: &SweepTable) {
    println!("{:<10} {:>12} {:>12} {:>10} {:>8}", "scheme", "axis_value", "mean_rate", "std_err", "outage");
    for row in &table.rows {
        let r = &row.result;
        let v = row.axis_value.map(|v| format!("{v}")).unwrap_or_else(|| "-".into());
        println!(
            "{:<10} {:>12} {:>12.5} {:>10.2e} {:>8.4}",
            row.scheme, v, r.mean_rate, r.std_error, r.outage_fraction
        );
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Simulate => {
            let cfg = resolve_config(&cli)?;
            let table = simulate(&cfg, &parse_schemes(&cli.schemes)?)?;
            print_table(&table);
            write_table(&cli, &table, "simulate")?;
        }
        Command::Sweep { axis, values } => {
            let cfg = resolve_config(&cli)?;
            let axis: SweepAxis = axis.parse()?;
            let values = values.clone().unwrap_or_else(|| axis.default_values());
            let table = sweep(&cfg, axis, &values, &parse_schemes(&cli.schemes)?)
                .with_context(|| format!("sweep over {axis}"))?;
            print_table(&table);
            write_table(&cli, &table, &format!("sweep_{}", axis.name()))?;
        }
        Command::OracleCheck { trials } => {
            if *trials == 0 {
                bail!("--trials must be at least 1");
            }
            let cfg = resolve_config(&cli)?;
            let rep = oracle_check(&cfg, *trials)?;
            println!("trials                     {}", rep.trials);
            println!("within {MATCH_TOLERANCE:e} bits/s/Hz    {}", rep.matches);
            println!("max shortfall              {:.3e}", rep.max_shortfall);
            println!("max excess                 {:.3e}", rep.max_excess);
            println!("feasibility disagreements  {}", rep.feasibility_disagreements);
            println!("EH violations              {}", rep.eh_violations);
        }
        Command::Selftest => {
            let mut failed = 0;
            for c in run_selftest() {
                println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            if failed > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

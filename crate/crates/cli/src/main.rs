use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use torapot_cli::config::Config;
use torapot_cli::demo::{run_demo, NAMES};
use torapot_cli::exit;
use torapot_cli::output::write_reports;
use torapot_cli::pool::default_jobs;
use torapot_cli::suite::{all_pass, is_verdict, run_suite};
use torapot_cli::sweep::{rows_csv, run_sweep};

#[derive(Parser)]
#[command(
    name = "torapot",
    version,
    about = "Grid certificates for relative energy and entropy classes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Overrides the seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides the config's output_dir).
    #[arg(long, global = true, env = "TORAPOT_OUT")]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every certificate declared in a config.
    Verify { config: PathBuf },
    /// Evaluate the sweep axes of a config, one CSV row per cell.
    Sweep { config: PathBuf },
    /// Run one certificate on bundled inputs.
    Demo { name: String },
}

fn load(path: &Path) -> Result<Config, ExitCode> {
    Config::load(path).map_err(|e| {
        eprintln!("config error: {e}");
        ExitCode::from(exit::CONFIG as u8)
    })
}

fn out_dir(opts: &Opts, cfg: &Config) -> PathBuf {
    opts.out
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("torapot-out"))
}

fn verify(opts: &Opts, path: &Path) -> Result<i32, ExitCode> {
    let cfg = load(path)?;
    let seed = opts.seed.unwrap_or(cfg.seed);
    let jobs = opts.jobs.unwrap_or_else(default_jobs);
    let start = Instant::now();
    let reports = run_suite(&cfg, seed, jobs).map_err(|e| {
        eprintln!("config error: {e}");
        ExitCode::from(exit::CONFIG as u8)
    })?;
    let dir = out_dir(opts, &cfg);
    let paths = write_reports(&dir, &reports).map_err(|e| {
        eprintln!("cannot write reports to {}: {e}", dir.display());
        ExitCode::from(exit::FAIL as u8)
    })?;
    let verdict: Vec<_> = reports.iter().filter(|r| is_verdict(r)).collect();
    let failed: Vec<_> = verdict.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        let names: Vec<&str> = r.failures().map(|a| a.name.as_str()).collect();
        println!("FAIL {} {}: {}", r.theorem, r.label, names.join(", "));
    }
    println!(
        "{} certificates, {} failed, {} exploratory; reports in {} and {}",
        verdict.len(),
        failed.len(),
        reports.len() - verdict.len(),
        paths[0].display(),
        paths[1].display()
    );
    eprintln!("elapsed {:.2?}", start.elapsed());
    Ok(if all_pass(&reports) {
        exit::PASS
    } else {
        exit::FAIL
    })
}

fn sweep(opts: &Opts, path: &Path) -> Result<i32, ExitCode> {
    let cfg = load(path)?;
    if cfg.sweep.is_none() {
        eprintln!("config error: no sweep section");
        return Err(ExitCode::from(exit::CONFIG as u8));
    }
    let rows = run_sweep(&cfg, opts.jobs.unwrap_or_else(default_jobs)).map_err(|e| {
        eprintln!("sweep failed: {e}");
        ExitCode::from(exit::FAIL as u8)
    })?;
    let dir = out_dir(opts, &cfg);
    let bytes = rows_csv(&rows).expect("in-memory csv");
    let file = dir.join("sweep.csv");
    fs::create_dir_all(&dir)
        .and_then(|_| fs::write(&file, bytes))
        .map_err(|e| {
            eprintln!("cannot write {}: {e}", file.display());
            ExitCode::from(exit::FAIL as u8)
        })?;
    println!("{} rows written to {}", rows.len(), file.display());
    Ok(exit::PASS)
}

fn demo(opts: &Opts, name: &str) -> Result<i32, ExitCode> {
    match run_demo(name, opts.seed.unwrap_or(0)) {
        None => {
            eprintln!(
                "unknown demo {name:?}; expected one of {}",
                NAMES.join(", ")
            );
            Err(ExitCode::from(exit::CONFIG as u8))
        }
        Some(Err(e)) => {
            eprintln!("demo failed: {e}");
            Ok(exit::FAIL)
        }
        Some(Ok((rep, text))) => {
            print!("{text}");
            println!("{}", if rep.pass { "PASS" } else { "FAIL" });
            Ok(if rep.pass { exit::PASS } else { exit::FAIL })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Verify { config } => verify(&cli.opts, config),
        Command::Sweep { config } => sweep(&cli.opts, config),
        Command::Demo { name } => demo(&cli.opts, name),
    };
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(code) => code,
    }
}

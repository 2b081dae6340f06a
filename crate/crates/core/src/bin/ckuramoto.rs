use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ckuramoto::scenario::{self, Overrides, Scenario, SweepConfig};
use ckuramoto::{Error, Result};

#[derive(Parser)]
#[command(name = "ckuramoto", version, about = "Complex-valued Kuramoto experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output directory
    #[arg(long, env = "CKURAMOTO_OUTDIR", default_value = "ckuramoto-out")]
    outdir: PathBuf,
    /// Derive every seed from this master seed
    #[arg(long)]
    seed_override: Option<u64>,
    /// Integration step, seconds
    #[arg(long)]
    dt: Option<f64>,
    /// Boundary-layer width for the switching laws (0 = exact signum)
    #[arg(long)]
    delta: Option<f64>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed_override,
            dt: self.dt,
            delta: self.delta,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run every combination of a sweep file
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a shipped scenario: fig1, fig2, fig3 or fig3d
    Preset {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Parse a scenario and check its gain conditions without simulating
    Validate {
        config: PathBuf,
        #[arg(long)]
        seed_override: Option<u64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
    },
}

fn run(mut s: Scenario, common: &Common) -> Result<()> {
    s.apply(&common.overrides());
    let outcome = scenario::run_scenario(&s)?;
    scenario::write_outputs(&outcome, &s.outputs, &common.outdir)?;
    println!("{}", serde_json::to_string_pretty(&outcome.summary).expect("summary serializes"));
    Ok(())
}

fn sweep(path: &Path, common: &Common) -> Result<()> {
    let mut cfg = SweepConfig::load(path)?;
    let o = common.overrides();
    if let Some(seed) = o.seed {
        cfg.master_seed = seed;
    }
    cfg.base.apply(&Overrides { seed: None, ..o });
    let rows = scenario::sweep(&cfg, Some(&common.outdir))?;
    let csv = scenario::sweep_csv(&cfg, &rows);
    let out = common.outdir.join("sweep.csv");
    std::fs::create_dir_all(&common.outdir).map_err(|e| Error::io(&common.outdir, e))?;
    std::fs::write(&out, &csv).map_err(|e| Error::io(&out, e))?;
    print!("{csv}");
    let failed = rows.iter().filter(|r| r.result.is_err()).count();
    if failed > 0 {
        eprintln!("{failed} of {} runs failed", rows.len());
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, common } => run(Scenario::load(&config)?, &common),
        Command::Preset { name, common } => run(scenario::preset(&name)?, &common),
        Command::Sweep { config, common } => sweep(&config, &common),
        Command::Validate {
            config,
            seed_override,
            dt,
            delta,
        } => {
            let mut s = Scenario::load(&config)?;
            s.apply(&Overrides {
                seed: seed_override,
                dt,
                delta,
            });
            let report = scenario::validate_scenario(&s)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if report.ok {
                Ok(())
            } else {
                Err(Error::Config("gain condition not satisfied".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

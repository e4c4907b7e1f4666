use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use trapped_core::harness::{
    cmd_eigen, cmd_export, cmd_oracle, cmd_solve, cmd_theorem1, cmd_verify, exit_code, ExperimentConfig,
    OracleTable, Outcome,
};
use trapped_core::Result;

/// Experiments on marginally trapped spherical graphs over caps of S².
#[derive(Parser)]
#[command(name = "trapped", version)]
struct Cli {
    /// Configuration file: JSON object or `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set tolerances.el=1e-7`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Cap half-angle (accepts `pi/N`).
    #[arg(long, global = true)]
    theta0: Option<String>,
    #[arg(long, global = true)]
    nr: Option<usize>,
    #[arg(long, global = true)]
    ntheta: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Chart, quadrature and operator identities plus random-field checks.
    Verify,
    /// Area of the EL graph against clamped perturbations.
    Theorem1,
    /// First buckling eigenvalue along the configured ladder.
    Eigen,
    /// Immersion, shadow surface and field files.
    Export,
    /// Clamped EL solve with the generator's boundary data.
    Solve,
    /// Closed-form and shooting reference tables.
    Oracle {
        #[arg(long, value_enum, default_value = "exact")]
        table: Table,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Exact,
    Buckling,
}

fn overrides(cli: &Cli) -> Vec<String> {
    let mut all = cli.set.clone();
    if let Some(t) = &cli.theta0 {
        all.push(format!("theta0={t}"));
    }
    if let Some(n) = cli.nr {
        all.push(format!("nr={n}"));
    }
    if let Some(n) = cli.ntheta {
        all.push(format!("ntheta={n}"));
    }
    if let Some(s) = cli.seed {
        all.push(format!("seed={s}"));
    }
    if let Some(o) = &cli.out {
        all.push(format!("out_dir={}", serde_json::Value::from(o.to_string_lossy())));
    }
    all
}

fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = ExperimentConfig::resolve(cli.config.as_deref(), &overrides(cli))?;
    let mut outcome = match &cli.command {
        Command::Verify => cmd_verify(&cfg)?,
        Command::Theorem1 => cmd_theorem1(&cfg)?,
        Command::Eigen => cmd_eigen(&cfg)?,
        Command::Export => cmd_export(&cfg)?,
        Command::Solve => cmd_solve(&cfg)?,
        Command::Oracle { table } => cmd_oracle(
            &cfg,
            match table {
                Table::Exact => OracleTable::Exact,
                Table::Buckling => OracleTable::Buckling,
            },
        )?,
    };
    let report = outcome.write_report()?;
    outcome.files.push(report);
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            println!("{}", serde_json::to_string_pretty(&outcome.report()).expect("report serialises"));
            for c in outcome.checks.iter().filter(|c| !c.passed) {
                eprintln!("check failed: {} = {:e} (want {} {:e})", c.name, c.value, c.relation, c.bound);
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

//! Command-line front end for `radial-coulomb`.

mod commands;
mod config;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_grid, parse_n_list, ConfigError, NList, Format, Overrides, Preset, RunConfig, SweepParam};

#[derive(Parser, Debug)]
#[command(name = "radial-coulomb", version, about = "Circular root/jump statistics of radial 2D Coulomb gases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Expansion coefficients (C1, C2, C3) from each available formula.
    Coeffs,
    /// Exact log E_{n,u,a} for each n.
    Exact,
    /// Exact minus expansion, optionally swept over a or rho.
    Compare,
    /// Exact and predicted cumulants of the disk count.
    Cumulants,
    /// Exact log Z against the six-term expansion.
    Partition,
    /// Monte Carlo estimate of E_{n,u,a}.
    Sample,
    /// Identity and invariant suite.
    Selfcheck,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    preset: Option<Preset>,
    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated particle numbers.
    #[arg(long, global = true, value_parser = parse_n_list)]
    n: Option<NList>,
    #[arg(long, global = true, value_enum)]
    sweep: Option<SweepParam>,
    /// Sweep grid `lo:hi:count`; for rho the bounds are fractions of r1.
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<(f64, f64, usize)>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    u: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, global = true)]
    rho: Option<f64>,
    #[arg(long, global = true)]
    rho_frac: Option<f64>,
    /// Monte Carlo repetitions.
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Highest cumulant order (1..=4).
    #[arg(long, global = true)]
    jmax: Option<usize>,
}

impl Opts {
    fn overrides(&self) -> Overrides {
        Overrides {
            config: self.config.clone(),
            preset: self.preset,
            out: self.out.clone(),
            format: self.format,
            seed: self.seed,
            n: self.n.as_ref().map(|l| l.0.clone()),
            sweep: self.sweep,
            grid: self.grid,
            alpha: self.alpha,
            u: self.u,
            a: self.a,
            rho: self.rho,
            rho_frac: self.rho_frac,
            reps: self.reps,
            jmax: self.jmax,
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let cfg = RunConfig::build(&cli.opts.overrides())?;
    let (table, ok) = match cli.command {
        Command::Coeffs => (commands::coeffs(&cfg)?, true),
        Command::Exact => (commands::exact(&cfg)?, true),
        Command::Compare => (commands::compare(&cfg)?, true),
        Command::Cumulants => (commands::cumulants(&cfg)?, true),
        Command::Partition => (commands::partition(&cfg)?, true),
        Command::Sample => (commands::sample(&cfg)?, true),
        Command::Selfcheck => commands::selfcheck(&cfg)?,
    };
    match &cfg.out {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            table.write(cfg.format, &mut f)?;
            f.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(cfg.format, &mut lock)?;
        }
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) if e.downcast_ref::<ConfigError>().is_some() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use poroelastic::config::{RunConfig, StudyKind};
use poroelastic::output::{format_table, write_comparison, write_study};
use poroelastic::study::{run_scheme_comparison, run_single, run_spatial_study, run_temporal_study, StudyResult};
use poroelastic::{CliError, Result};

#[derive(Parser)]
#[command(name = "poroelastic", version, about = "Poroelastic consolidation with secondary compression: runs and convergence studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One simulation at a single (n, tau).
    Run(Common),
    /// Refinement in h at fixed tau.
    Spatial(Common),
    /// Refinement in tau at fixed n.
    Temporal(Common),
    /// Crank-Nicolson against backward Euler on ex42.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for independent refinement levels.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Exactness of the assembly quadrature, overriding `[quadrature] assembly`.
    #[arg(long)]
    quad: Option<usize>,
}

fn load(c: &Common) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&c.config)?;
    if let Some(out) = &c.out {
        cfg.output_dir = out.clone();
    }
    if let Some(q) = c.quad {
        cfg.quadrature.assembly = Some(q);
    }
    if c.threads == 0 {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn summarize(r: &StudyResult) {
    for t in &r.tables {
        print!("{}", format_table(t));
    }
    for l in &r.levels {
        println!("  [{}] n = {}, steps = {}: {:.2} s", l.level.scheme.label(), l.level.n, l.steps, l.wall.as_secs_f64());
    }
}

fn execute(cli: Cli) -> Result<()> {
    let (kind, common) = match &cli.command {
        Command::Run(c) => (StudyKind::Single, c),
        Command::Spatial(c) => (StudyKind::Spatial, c),
        Command::Temporal(c) => (StudyKind::Temporal, c),
        Command::Compare(c) => (StudyKind::Comparison, c),
    };
    let cfg = load(common)?;
    let threads = common.threads;
    let written = match kind {
        StudyKind::Comparison => {
            let cmp = run_scheme_comparison(&cfg, threads)?;
            println!("Crank-Nicolson");
            summarize(&cmp.cn);
            println!("backward Euler");
            summarize(&cmp.be);
            write_comparison(&cfg.output_dir, &cmp, cfg.emit_plots)?
        }
        _ => {
            let r = match kind {
                StudyKind::Single => run_single(&cfg, threads)?,
                StudyKind::Spatial => run_spatial_study(&cfg, threads)?,
                _ => run_temporal_study(&cfg, threads)?,
            };
            summarize(&r);
            write_study(&cfg.output_dir, &r, cfg.emit_plots)?
        }
    };
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

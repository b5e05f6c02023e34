use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{ArgAction, Args, Parser, Subcommand};
use radial_euler_cli::{build_initial_profile, execute, exit_code, parse_config, ExperimentConfig};
use radial_euler_core::{blowup_bound, RadialGrid};

#[derive(Parser)]
#[command(
    name = "radial-euler",
    version,
    about = "Radial Euler / Euler-Poisson blowup experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the base configuration, ignoring any [sweep] section.
    Run(RunArgs),
    /// Run every combination listed in [sweep].
    Sweep(RunArgs),
    /// Validate a configuration and print the initial diagnostics.
    Check(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    config_file: PathBuf,
    /// Reject unknown keys.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    strict: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Overrides `output_dir` from the configuration.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn load(args: &CommonArgs) -> anyhow::Result<ExperimentConfig> {
    let text = std::fs::read_to_string(&args.config_file)
        .with_context(|| format!("reading {}", args.config_file.display()))?;
    let (cfg, unknown) =
        parse_config(&text, args.strict).with_context(|| format!("in {}", args.config_file.display()))?;
    for key in unknown {
        eprintln!("warning: ignoring unknown key `{key}`");
    }
    Ok(cfg)
}

fn check(cfg: &ExperimentConfig) -> anyhow::Result<()> {
    for spec in cfg.expand() {
        let c = &spec.config;
        let grid = RadialGrid::new(c.model.support_radius, c.numerics.n_cells)?;
        let data = build_initial_profile(&c.initial, &grid, &c.model, c.numerics.support_margin_cells, c.seed)?;
        let bound =
            blowup_bound(data.h0, c.model.support_radius).map_or_else(|_| "none".to_string(), |t| format!("{t:.6e}"));
        println!("{}\tH0 = {:.6e}\tT_bound = {bound}", spec.id, data.h0);
        for w in data.warnings {
            println!("{}\twarning: {w}", spec.id);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(args) => load(&args).and_then(|cfg| check(&cfg)).map(|_| 0),
        Command::Run(args) => load(&args.common).and_then(|mut cfg| {
            if cfg.sweep.take().is_some() {
                eprintln!("note: [sweep] ignored by `run`; use `sweep`");
            }
            go(cfg, args)
        }),
        Command::Sweep(args) => load(&args.common).and_then(|cfg| go(cfg, args)),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn go(cfg: ExperimentConfig, args: RunArgs) -> anyhow::Result<i32> {
    let dir = args.output_dir.unwrap_or_else(|| cfg.output_dir.clone());
    let records = execute(&cfg, &dir, args.jobs)?;
    for r in &records {
        match &r.error {
            Some(e) => println!("{}\terror\t{e}", r.id),
            None => println!(
                "{}\t{}\t{}",
                r.id,
                r.termination.map_or("none", |t| t.as_str()),
                r.verdict.map_or("none", |v| v.as_str())
            ),
        }
    }
    Ok(exit_code(&records))
}

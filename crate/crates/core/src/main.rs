use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pressure_core::cli::{self, config::ModeSpec, RunConfig};

#[derive(Parser)]
#[command(name = "pressure", about = "Topological and measure pressure on compact and one-point compactifiable systems")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Greedy,
}

#[derive(clap::Args)]
struct RunFlags {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Output directory, overriding `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum ZooCommand {
    List,
    Describe { name: String },
}

#[derive(Subcommand)]
enum Command {
    /// Registered systems.
    #[command(subcommand)]
    Zoo(ZooCommand),
    /// Separated, generating and cover pressures over the ε grid.
    Estimate(RunFlags),
    /// Topological pressure against the best measure witness.
    VerifyVp(RunFlags),
    /// Finite-level property suite; exits nonzero on any failure.
    Properties(RunFlags),
}

fn load(flags: &RunFlags) -> pressure_core::Result<RunConfig> {
    let mut cfg = match &flags.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(m) = flags.mode {
        cfg.mode = match m {
            Mode::Exact => ModeSpec::Exact,
            Mode::Greedy => ModeSpec::Greedy,
        };
    }
    if let Some(o) = &flags.out {
        cfg.out = o.clone();
    }
    if let Some(s) = flags.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: Args) -> pressure_core::Result<bool> {
    match args.command {
        Command::Zoo(ZooCommand::List) => print!("{}", cli::zoo_list()),
        Command::Zoo(ZooCommand::Describe { name }) => print!("{}", cli::zoo_describe(&name)?),
        Command::Estimate(flags) => {
            let cfg = load(&flags)?;
            let est = cli::cmd_estimate(&cfg)?;
            est.artifacts.write_to(&cfg.out)?;
            println!("consolidated pressure {:.10} at epsilon {}", est.pressure.value(), est.pressure.selected_epsilon);
            if let Some(o) = est.oracle {
                println!("oracle {o:.10}");
            }
        }
        Command::VerifyVp(flags) => {
            let cfg = load(&flags)?;
            let vp = cli::cmd_verify_vp(&cfg)?;
            vp.artifacts.write_to(&cfg.out)?;
            let r = &vp.report;
            println!("topological {:.10}", r.topological_pressure);
            println!("best measure {:.10} ({})", r.best_measure_pressure, r.best_witness);
            println!("gap {:.3e}", r.gap);
        }
        Command::Properties(flags) => {
            let cfg = load(&flags)?;
            let (table, artifacts) = cli::cmd_properties(&cfg)?;
            artifacts.write_to(&cfg.out)?;
            print!("{}", cli::properties_table(&table));
            for f in table.failures() {
                eprintln!("FAILED {} on {}: {}", f.property, f.system, f.detail);
            }
            return Ok(table.all_pass());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

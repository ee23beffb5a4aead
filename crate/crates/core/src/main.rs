use clap::Parser;
use loopgrasp::cli::{load_config_for, run, write_rejection, Command, ForceUnit, Overrides, DEFAULT_OUT_DIR};
use std::path::PathBuf;
use std::process::ExitCode;

/// Load capacity, contact mechanics and topology of loop closure grasps.
///
/// Exit status: 0 on success, 1 on invalid input or a domain error, 2 when a
/// solve does not converge. `summary.json` is always written to the output
/// directory. Set LOOPGRASP_LOG (e.g. `info`, `debug`) for progress logs.
#[derive(Debug, Parser)]
#[command(name = "loopgrasp", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// TOML configuration with explicit units on every physical quantity.
    #[arg(long)]
    config: PathBuf,
    /// Output directory [default: the file's [output] directory, else loopgrasp-out].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Unit for reported forces.
    #[arg(long, value_enum)]
    units: Option<ForceUnit>,
    /// Solver residual tolerance, relative to the characteristic force.
    #[arg(long)]
    tol: Option<f64>,
    /// Rod node count.
    #[arg(long)]
    nodes: Option<usize>,
    /// Load increments.
    #[arg(long)]
    ramp_steps: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LOOPGRASP_LOG", "warn")).init();
    let args = Args::parse();
    let overrides =
        Overrides { out_dir: args.out.clone(), units: args.units, tol: args.tol, nodes: args.nodes, ramp_steps: args.ramp_steps };
    let loaded = load_config_for(&args.config, Some(args.command)).and_then(|mut c| c.apply(&overrides).map(|()| c));
    let outcome = match loaded {
        Ok(config) => {
            let outcome = run(&config);
            for e in outcome.summary["errors"].as_array().into_iter().flatten() {
                eprintln!("error: {}", e.as_str().unwrap_or_default());
            }
            println!("{}", config.out_dir.join(loopgrasp::cli::SUMMARY_FILE).display());
            outcome.exit_code()
        }
        Err(errors) => {
            let messages: Vec<String> = errors.iter().map(ToString::to_string).collect();
            for m in &messages {
                eprintln!("config error: {m}");
            }
            let out = args.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
            write_rejection(&out, Some(args.command), &messages);
            1
        }
    };
    ExitCode::from(outcome as u8)
}

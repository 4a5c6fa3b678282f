use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vclone::cli::{
    self, CliError, CliResult, DemoOptions, MapMethod, Priors, Report, SimulateOptions, StateSpec, EXIT_PARSE,
};

#[derive(Parser)]
#[command(name = "vclone", version, about = "Virtual cloning of quantum states")]
struct Args {
    /// Print the machine-readable JSON report instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether an HPTP cloner exists.
    Clonable {
        /// States file, or presets such as `zero,plus`.
        states: String,
    },
    /// Optimal k -> n cloning cost via SDP.
    Cost {
        states: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Solver tolerance (overrides VCLONE_TOL).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Discrimination lower and upper bounds for a pair.
    Bounds {
        states: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// `grid` or a single prior p1 in (0, 1).
        #[arg(long, default_value = "grid")]
        priors: Priors,
    },
    /// Build an explicit cloner and its decomposition.
    Map {
        states: String,
        /// thm1, pure-optimal or discrimination.
        #[arg(long, default_value = "pure-optimal")]
        method: MapMethod,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        tol: Option<f64>,
        /// Write the decomposition here.
        #[arg(long)]
        out: Option<String>,
    },
    /// Estimate Tr[Λ(ρ) X] by quasiprobability sampling.
    Simulate {
        /// Decomposition file written by `map --out`.
        qpd: String,
        /// Preset name or JSON state.
        #[arg(long)]
        state: String,
        /// Pauli string such as `XX`, or a JSON matrix.
        #[arg(long)]
        observable: String,
        #[arg(long, default_value_t = 100_000)]
        rounds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Full |0>, |+> pipeline with cross-checks.
    Demo {
        #[arg(long, default_value_t = DemoOptions::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = DemoOptions::default().rounds)]
        rounds: u64,
    },
}

fn run(args: &Args) -> CliResult<Report> {
    match &args.cmd {
        Cmd::Clonable { states } => cli::cmd_clonable(&cli::load_states(states)?),
        Cmd::Cost { states, k, n, tol } => cli::cmd_cost(&cli::load_states(states)?, *k, *n, *tol),
        Cmd::Bounds { states, n, priors } => cli::cmd_bounds(&cli::load_states(states)?, *n, *priors),
        Cmd::Map { states, method, n, tol, out } => {
            let (mut r, file) = cli::cmd_map(&cli::load_states(states)?, *method, *n, *tol)?;
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&file).map_err(|e| CliError::new(EXIT_PARSE, e.to_string()))?;
                std::fs::write(path, text).map_err(|e| CliError::new(EXIT_PARSE, format!("{path}: {e}")))?;
                r.set("written", path);
            }
            Ok(r)
        }
        Cmd::Simulate { qpd, state, observable, rounds, seed, trials, epsilon } => {
            let o = SimulateOptions {
                state: StateSpec::parse(state)?,
                observable: observable.clone(),
                rounds: *rounds,
                seed: *seed,
                trials: *trials,
                epsilon: *epsilon,
            };
            cli::cmd_simulate(&cli::load_qpd(qpd)?, &o)
        }
        Cmd::Demo { seed, rounds } => {
            cli::cmd_demo(&DemoOptions { seed: *seed, rounds: *rounds, ..Default::default() })
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(r) => {
            let text = if args.json { r.to_json() + "\n" } else { r.table() };
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::from(r.exit_code())
        }
        Err(e) => {
            if args.json {
                println!("{}", serde_json::json!({ "error": e.message, "exit_code": e.code }));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

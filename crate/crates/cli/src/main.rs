use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lpns_cli::commands::{self, BarrierOptions, SimulateOptions, VerifyOptions};

#[derive(Parser)]
#[command(name = "lpns", version, about = "Littlewood-Paley checks and pseudo-spectral Navier-Stokes runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run inequality checks and write checks.csv
    Verify(VerifyArgs),
    /// Run a simulation from a TOML config
    Simulate(SimulateArgs),
    /// Simulate with the series monitor always attached
    Monitor(SimulateArgs),
    /// Integrate the barrier ODE and report the verdict
    Barrier(BarrierArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated check names, or `all`
    #[arg(long, default_value = "all")]
    checks: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    /// Target exponent of the Bernstein check
    #[arg(long = "q-prime", default_value_t = f64::INFINITY)]
    q_prime: f64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides output.directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed of a random initial condition
    #[arg(long)]
    seed: Option<u64>,
    /// Continue from a checkpoint instead of the configured initial state
    #[arg(long)]
    resume: Option<PathBuf>,
}

#[derive(Args)]
struct BarrierArgs {
    #[arg(long)]
    epsilon: f64,
    /// Budget of the forcing integral
    #[arg(long = "script-b")]
    script_b: f64,
    #[arg(long)]
    m: f64,
    #[arg(long = "t", default_value_t = 1.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Use the sin^2 pulse instead of the uniform forcing
    #[arg(long)]
    pulse: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn simulate_options(a: SimulateArgs, force_series: bool) -> SimulateOptions {
    SimulateOptions {
        config: a.config,
        out: a.out,
        seed: a.seed,
        resume: a.resume,
        force_series,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => commands::parse_checks(&a.checks).and_then(|checks| {
            commands::verify(&VerifyOptions {
                checks,
                seed: a.seed,
                n: a.n,
                samples: a.samples,
                q: a.q,
                q_prime: a.q_prime,
                out: a.out,
            })
        }),
        Command::Simulate(a) => commands::simulate(&simulate_options(a, false)),
        Command::Monitor(a) => commands::simulate(&simulate_options(a, true)),
        Command::Barrier(a) => commands::barrier(&BarrierOptions {
            epsilon: a.epsilon,
            script_b: a.script_b,
            m: a.m,
            t_end: a.t_end,
            dt: a.dt,
            pulse: a.pulse,
            out: a.out,
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

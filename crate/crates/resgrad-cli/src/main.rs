use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use resgrad_cli::{parse_config, run, CommandKind, RawConfig};

/// Reservoir-variable integrators for dissipative oscillators: trajectory
/// runs, empirical-order measurements and scheme comparisons.
#[derive(Parser)]
#[command(name = "resgrad", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory and write a step,t,q,p,w,K,E,R table
    Simulate(CommonArgs),
    /// Measure empirical convergence orders on the base-grid protocol
    Order(CommonArgs),
    /// Run schemes side by side: local errors, K-drift and energy-ratio deviation
    Compare(CommonArgs),
    /// Sample the closed-form damped-oscillator solution
    Exact(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Config file (`key = value` lines, `#` comments); flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// System name: dho, duffing or vdp
    #[arg(long)]
    system: Option<String>,
    /// Damping constant (dho, duffing)
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    /// Stiffness (dho)
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Nonlinearity strength (vdp)
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Linear stiffness (duffing)
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Cubic stiffness (duffing)
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Integrator spec, repeatable: moddg[:none|q3|q4|p3|p4], pqplf, erk4
    #[arg(long = "integrator")]
    integrator: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    q0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    w0: Option<f64>,
    /// Time step
    #[arg(long, allow_negative_numbers = true)]
    h: Option<f64>,
    /// Base grid step for order measurements
    #[arg(long, allow_negative_numbers = true)]
    h0: Option<f64>,
    /// Comma-separated measurement steps for order runs
    #[arg(long = "h-set", value_delimiter = ',', allow_negative_numbers = true)]
    h_set: Option<Vec<f64>>,
    #[arg(long = "t-end", allow_negative_numbers = true)]
    t_end: Option<f64>,
    /// Fixed-point tolerance of the implicit solver
    #[arg(long = "fp-tol", allow_negative_numbers = true)]
    fp_tol: Option<f64>,
    #[arg(long = "fp-max-iter")]
    fp_max_iter: Option<u32>,
    /// Output file (simulate/compare/exact) or directory (order)
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn into_raw(self) -> (Option<PathBuf>, RawConfig) {
        let config = self.config;
        let raw = RawConfig {
            system: self.system,
            b: self.b,
            k: self.k,
            mu: self.mu,
            alpha: self.alpha,
            beta: self.beta,
            integrators: if self.integrator.is_empty() {
                None
            } else {
                Some(self.integrator)
            },
            q0: self.q0,
            p0: self.p0,
            w0: self.w0,
            h: self.h,
            h0: self.h0,
            h_set: self.h_set,
            t_end: self.t_end,
            fp_tol: self.fp_tol,
            fp_max_iter: self.fp_max_iter,
            out: self.out,
        };
        (config, raw)
    }
}

fn real_main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Simulate(a) => (CommandKind::Simulate, a),
        Command::Order(a) => (CommandKind::Order, a),
        Command::Compare(a) => (CommandKind::Compare, a),
        Command::Exact(a) => (CommandKind::Exact, a),
    };
    let (config_path, flags) = args.into_raw();
    let file_text = match &config_path {
        Some(path) => Some(fs::read_to_string(path).map_err(|e| {
            anyhow::anyhow!("cannot read config file {}: {e}", path.display())
        })?),
        None => None,
    };
    let config = parse_config(kind, flags, file_text.as_deref())?;
    run(&config)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

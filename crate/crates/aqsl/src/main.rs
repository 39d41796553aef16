use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use aqsl::config::{ExperimentConfig, ModeChoice, Overrides, SweepKind};
use aqsl::runner::{run_dynamics, run_qsl, run_verify, RunError};

#[derive(Parser)]
#[command(name = "aqsl", about = "Quantum correlation dynamics and speed-limit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correlation measures along the OU dephasing evolution (CSV)
    Dynamics(RunArgs),
    /// QSL sweep over driving time or coupling strength (CSV)
    Qsl(RunArgs),
    /// Run the verification suites and print a pass/fail report
    Verify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value config file; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    c3: Option<f64>,
    /// Coupling strength Γ
    #[arg(long = "big-gamma")]
    big_gamma: Option<f64>,
    /// Noise bandwidth γ
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_parser = ["time", "coupling"])]
    sweep: Option<String>,
    #[arg(long = "coupling-lo")]
    coupling_lo: Option<f64>,
    #[arg(long = "coupling-hi")]
    coupling_hi: Option<f64>,
    #[arg(long = "coupling-n")]
    coupling_n: Option<usize>,
    #[arg(long, value_parser = ["decay", "creation", "both"])]
    mode: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a minimal SVG chart next to the CSV
    #[arg(long)]
    svg: bool,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            c1: self.c1,
            c2: self.c2,
            c3: self.c3,
            big_gamma: self.big_gamma,
            gamma: self.gamma,
            t_max: self.t_max,
            steps: self.steps,
            sweep: self.sweep.as_deref().map(|s| match s {
                "coupling" => SweepKind::Coupling,
                _ => SweepKind::Time,
            }),
            coupling_lo: self.coupling_lo,
            coupling_hi: self.coupling_hi,
            coupling_n: self.coupling_n,
            mode: self.mode.as_deref().map(|m| match m {
                "creation" => ModeChoice::Creation,
                "both" => ModeChoice::Both,
                _ => ModeChoice::Decay,
            }),
            seed: self.seed,
            out: self.out.as_ref().map(|p| p.to_string_lossy().into_owned()),
            svg: self.svg,
        }
    }
}

const EXIT_OK: u8 = 0;
const EXIT_INVALID_CONFIG: u8 = 1;
const EXIT_VERIFY_FAILED: u8 = 2;
const EXIT_IO_FAILURE: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::Dynamics(a) | Command::Qsl(a) | Command::Verify(a) => a,
    };
    let cfg = match ExperimentConfig::resolve(args.config.as_deref(), &args.overrides()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("invalid config: {e}");
            return ExitCode::from(EXIT_INVALID_CONFIG);
        }
    };
    let result = match &cli.command {
        Command::Dynamics(_) => run_dynamics(&cfg),
        Command::Qsl(_) => run_qsl(&cfg),
        Command::Verify(_) => {
            let (report, ok) = run_verify(&cfg);
            print!("{report}");
            return ExitCode::from(if ok { EXIT_OK } else { EXIT_VERIFY_FAILED });
        }
    };
    match result {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(RunError::Io { path, source }) => {
            eprintln!("i/o failure on {path}: {source}");
            ExitCode::from(EXIT_IO_FAILURE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID_CONFIG)
        }
    }
}

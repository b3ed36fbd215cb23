use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod checks;
mod commands;

use commands::CliError;

#[derive(Debug, Parser)]
#[command(name = "coherence-kit", version, about = "Polynomial coherence measures and convex roofs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a measure on a pure state.
    Measure(MeasureArgs),
    /// Write the symmetric-state curves K, cbar_g(K), cg(K) as CSV.
    Symmetric(SymmetricArgs),
    /// Numerical convex roof of the G-coherence with its lower bound.
    Roof(RoofArgs),
    /// Zero-coherence states on the superposition line of two states.
    Witness(WitnessArgs),
    /// Apply the permutation twirl to a state.
    Twirl(TwirlArgs),
    /// Run a verification suite.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
#[group(id = "selector", required = true, multiple = false)]
struct MeasureSelector {
    /// Polynomial file.
    #[arg(long, group = "selector")]
    poly: Option<PathBuf>,
    /// G-coherence measure.
    #[arg(long, group = "selector")]
    g: bool,
    /// ℓ1 measure (qubits only).
    #[arg(long, group = "selector")]
    l1: bool,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[arg(long)]
    state: PathBuf,
    #[command(flatten)]
    selector: MeasureSelector,
    /// Prefactor of the measure (default: d for --g, 1 otherwise).
    #[arg(long)]
    scale: Option<f64>,
}

#[derive(Debug, Args)]
struct SymmetricArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RoofArgs {
    #[arg(long)]
    state: PathBuf,
    /// G-coherence measure (the only supported roof).
    #[arg(long, required = true)]
    g: bool,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    /// Decomposition size (default: rank + 2).
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the witnessing decomposition here.
    #[arg(long)]
    witness: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WitnessArgs {
    #[arg(long, conflicts_with_all = ["g", "dim"])]
    poly: Option<PathBuf>,
    #[arg(long, requires = "dim")]
    g: bool,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    state1: PathBuf,
    #[arg(long)]
    state2: PathBuf,
}

#[derive(Debug, Args)]
struct TwirlArgs {
    #[arg(long)]
    state: PathBuf,
    /// Average this many random permutations instead of all d!.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Nogo,
    Monotone,
    Theorem3,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn configure_threads() {
    if let Ok(raw) = std::env::var("COHERENCE_KIT_THREADS") {
        match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring COHERENCE_KIT_THREADS={raw:?}"),
        }
    }
}

fn run(cli: Cli) -> Result<commands::Outcome, CliError> {
    match cli.command {
        Command::Measure(a) => {
            let selector = match (a.selector.poly, a.selector.g, a.selector.l1) {
                (Some(path), _, _) => commands::Selector::Poly(path),
                (None, true, _) => commands::Selector::G,
                _ => commands::Selector::L1,
            };
            commands::measure(&a.state, selector, a.scale)
        }
        Command::Symmetric(a) => commands::symmetric(a.dim, a.points, &a.out),
        Command::Roof(a) => commands::roof(&a.state, a.restarts, a.size, a.seed, a.witness.as_deref()),
        Command::Witness(a) => {
            let selector = match (a.poly, a.g, a.dim) {
                (Some(path), _, _) => commands::WitnessPoly::File(path),
                (None, true, Some(d)) => commands::WitnessPoly::G(d),
                _ => return Err(CliError::Usage("one of --poly FILE or --g --dim D is required".into())),
            };
            commands::witness(selector, a.scale, &a.state1, &a.state2)
        }
        Command::Twirl(a) => commands::twirl(&a.state, a.sample, a.seed, &a.out),
        Command::Check(a) => match a.suite {
            Suite::Nogo => checks::nogo(a.dim, a.trials, a.seed),
            Suite::Monotone => checks::monotone(a.dim, a.trials, a.seed),
            Suite::Theorem3 => checks::theorem3(a.dim, a.seed),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    configure_threads();
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

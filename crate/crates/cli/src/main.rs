use clap::{Args, Parser, Subcommand, ValueEnum};
use feqn_cli::run::run;
use feqn_cli::spec::parse_spec;
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact-arithmetic verifier for restricted linear and Pexider functional
/// equations.
#[derive(Parser)]
#[command(name = "feqn", version)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Decide ∑αᵢK ⊆ K with an exact certificate or witness
    CheckInvariance(RunArgs),
    /// Classify the affine solution family of a coefficient spec
    Characterize(RunArgs),
    /// Verify an affine candidate on seeded exact trials
    Verify(RunArgs),
    /// Recover the affine solution from sampled data on a patch cover
    Extend(RunArgs),
    /// Enumerate all homomorphisms between finite abelian groups
    EnumerateFinite(RunArgs),
    /// Check the weighted Pexider equation and search for a decomposition
    WeightedCheck(RunArgs),
    /// Shrink an invariant interval to a symmetric subinterval
    Shrink(RunArgs),
}

impl CliCommand {
    fn args(&self) -> &RunArgs {
        match self {
            CliCommand::CheckInvariance(a)
            | CliCommand::Characterize(a)
            | CliCommand::Verify(a)
            | CliCommand::Extend(a)
            | CliCommand::EnumerateFinite(a)
            | CliCommand::WeightedCheck(a)
            | CliCommand::Shrink(a) => a,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            CliCommand::CheckInvariance(_) => "check-invariance",
            CliCommand::Characterize(_) => "characterize",
            CliCommand::Verify(_) => "verify",
            CliCommand::Extend(_) => "extend",
            CliCommand::EnumerateFinite(_) => "enumerate-finite",
            CliCommand::WeightedCheck(_) => "weighted-check",
            CliCommand::Shrink(_) => "shrink",
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Path to the problem-spec JSON document
    #[arg(long)]
    spec: PathBuf,

    /// Override the seed recorded in the spec
    #[arg(long)]
    seed: Option<u64>,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = cli.command.args();

    let text = match std::fs::read_to_string(&args.spec) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("feqn: cannot read {}: {e}", args.spec.display());
            return ExitCode::from(2);
        }
    };
    let spec = match parse_spec(&text) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("feqn: {e}");
            return ExitCode::from(2);
        }
    };
    if spec.command.name() != cli.command.name() {
        eprintln!(
            "feqn: the spec file says `{}` but the command line says `{}`",
            spec.command.name(),
            cli.command.name()
        );
        return ExitCode::from(2);
    }

    match run(&spec, args.seed) {
        Ok(report) => {
            match args.format {
                Format::Json => println!("{}", report.to_json_string()),
                Format::Text => print!("{}", report.to_text()),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("feqn: {e}");
            ExitCode::FAILURE
        }
    }
}

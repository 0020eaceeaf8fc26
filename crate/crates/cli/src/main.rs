use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gamcal_cli::{run, verify, CliError, CliResult, Scenario, ScenarioConfig};

#[derive(Parser)]
#[command(name = "gamcal", version, about = "Geometric-calculus Hamiltonian scenarios and verifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario configuration (JSON); defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: gamcal-out/<scenario>].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed; overrides the configuration [default: 42].
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Mechanical motion from a reduced Hamiltonian (RK4).
    Mechanics(RunArgs),
    /// Scalar field on a grid by relaxation, with its energy-momentum tensor.
    ScalarField(RunArgs),
    /// Straight worldline of the relativistic particle.
    Geodesic(RunArgs),
    /// Hamilton-Jacobi residual of a known solution at random points.
    HjCheck(RunArgs),
    /// Randomized check of the geometric-algebra identities.
    GaSelftest(RunArgs),
    /// Runs a scenario given by name.
    Run {
        #[arg(value_enum)]
        scenario: Scenario,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Re-evaluates the residuals of a data file.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    #[command(external_subcommand)]
    Unknown(Vec<String>),
}

fn run_scenario(scenario: Scenario, args: RunArgs) -> CliResult<()> {
    let mut config = match &args.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default_for(scenario),
    };
    if config.scenario != scenario {
        return Err(CliError::Validation(format!(
            "config is for scenario {}, not {scenario}",
            config.scenario
        )));
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let out = args
        .out
        .or_else(|| config.output_dir.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("gamcal-out").join(scenario.name()));
    let summary = run(&config, &out)?;
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    Ok(())
}

fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Mechanics(a) => run_scenario(Scenario::Mechanics, a),
        Command::ScalarField(a) => run_scenario(Scenario::ScalarField, a),
        Command::Geodesic(a) => run_scenario(Scenario::Geodesic, a),
        Command::HjCheck(a) => run_scenario(Scenario::HjCheck, a),
        Command::GaSelftest(a) => run_scenario(Scenario::GaSelftest, a),
        Command::Run { scenario, args } => run_scenario(scenario, args),
        Command::Verify { config, data } => {
            let config = ScenarioConfig::load(&config)?;
            let report = verify(&config, &data)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if report.passed {
                Ok(())
            } else {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                Err(CliError::VerifyFailed(failed.join(", ")))
            }
        }
        Command::Unknown(args) => Err(CliError::Validation(format!(
            "unknown scenario {:?}; valid scenarios: {}",
            args.first().map(String::as_str).unwrap_or(""),
            Scenario::valid_names()
        ))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

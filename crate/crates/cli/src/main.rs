use std::path::PathBuf;
use std::process::ExitCode;

use carmarkov_cli::{emit_report, run_scenario, Scenario, ScenarioConfig};
use clap::Parser;

#[derive(Parser, Debug)]
#[command(
    name = "carmarkov",
    version,
    about = "Run a carmarkov verification scenario"
)]
struct Args {
    #[arg(long, value_enum)]
    scenario: Scenario,
    /// Mode counts per region, e.g. `1,3,1`
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<usize>>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Override for the primary threshold
    #[arg(long)]
    tol: Option<f64>,
    /// Report path; `.csv` selects the CSV summary
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut config = ScenarioConfig::new(args.scenario);
    if let Some(modes) = args.modes {
        config.modes = modes;
    }
    if let Some(lambda) = args.lambda {
        config.lambda = lambda;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    config.tol = args.tol;
    config.out = args.out.as_ref().map(|p| p.display().to_string());

    let report = run_scenario(&config);
    match &args.out {
        Some(path) => {
            if let Err(err) = emit_report(&report, path) {
                eprintln!("carmarkov: cannot write {}: {err}", path.display());
                return ExitCode::from(2);
            }
        }
        None => println!("{}", report.to_json()),
    }
    if let Some(err) = &report.error {
        eprintln!("carmarkov: {err}");
    }
    for a in report.assertions.iter().filter(|a| !a.pass) {
        eprintln!(
            "carmarkov: {} = {:e} fails threshold {:e}",
            a.name, a.value, a.threshold
        );
    }
    ExitCode::from(report.exit_code())
}

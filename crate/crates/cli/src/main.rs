use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zenoline_cli::experiment::{self, value_label};
use zenoline_cli::figures::{self, FigureId, DEFAULT_FIGURE_POINTS};
use zenoline_cli::{init_thread_pool, CliError, ConfigDocument};
use zenoline_core::Worldline;

/// Qubit decoherence and Zeno/anti-Zeno decay rates on relativistic worldlines.
///
/// The worker thread count is read from ZENOLINE_THREADS; results do not depend on it.
#[derive(Parser)]
#[command(name = "zenoline", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration file.
    config: PathBuf,
    /// Overrides of config keys, as --section.key=value.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "OVERRIDES")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn document(&self) -> Result<ConfigDocument, CliError> {
        let mut doc = ConfigDocument::load(&self.config)?;
        doc.apply_overrides(&self.overrides)?;
        Ok(doc)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute one decay curve and write CSV, JSON and optional SVG.
    Run(ConfigArgs),
    /// Run once per value of the [sweep] parameter.
    Sweep(ConfigArgs),
    /// Recompute a figure's canonical curves and emit one SVG per panel.
    ReproduceFigure {
        id: FigureId,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FIGURE_POINTS)]
        n_points: usize,
    },
    /// Compare the last grid time against a run with doubled panel densities.
    ConvergenceCheck(ConfigArgs),
    /// Load a sampled worldline CSV and report its kinematic range.
    ValidateWorldline { path: PathBuf },
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) => {
            let outcome = experiment::run(&args.document()?)?;
            let (tau, gamma) = (outcome.summary.optimal_interval.tau, outcome.summary.optimal_interval.gamma);
            let pattern: Vec<String> = outcome.segmentation.pattern().iter().map(ToString::to_string).collect();
            println!(
                "{} / {}: regimes {}; minimum Γ = {gamma:.6e} at τ = {tau:.6}",
                outcome.family,
                outcome.channel,
                pattern.join(" -> ")
            );
            if outcome.summary.points_outside_validity > 0 {
                eprintln!(
                    "warning: {} points outside the perturbative validity threshold",
                    outcome.summary.points_outside_validity
                );
            }
        }
        Command::Sweep(args) => {
            for m in experiment::sweep(&args.document()?)? {
                println!("{} -> {}", value_label(&m.value), m.paths.csv.display());
            }
        }
        Command::ReproduceFigure { id, out_dir, n_points } => {
            if n_points < zenoline_core::zeno::MIN_SEGMENTATION_POINTS {
                return Err(CliError::Config(format!(
                    "--n-points must be at least {}",
                    zenoline_core::zeno::MIN_SEGMENTATION_POINTS
                )));
            }
            let (record, failure) = figures::reproduce(id, &out_dir, n_points)?;
            for p in &record.panels {
                println!("{}", p.display());
            }
            if let Some(e) = failure {
                return Err(e);
            }
        }
        Command::ConvergenceCheck(args) => {
            let (report, resolved) = experiment::convergence_check(&args.document()?)?;
            let json = serde_json::json!({ "resolved": resolved, "convergence": report });
            println!("{}", serde_json::to_string_pretty(&json).expect("plain data serializes"));
            if !report.passed {
                return Err(CliError::NotConverged(report.advice.unwrap_or_default()));
            }
        }
        Command::ValidateWorldline { path } => {
            let file = std::fs::File::open(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            let w = Worldline::from_csv(file)?;
            let Worldline::Sampled(s) = &w else { unreachable!("from_csv builds a sampled worldline") };
            println!(
                "{}: {} rows, t in [{}, {}], proper time up to {:.9}",
                path.display(),
                s.rows(),
                s.t_start(),
                s.t_end(),
                s.tau_max()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_thread_pool().and_then(|()| execute(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

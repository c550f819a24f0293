//! `rank1`: command-line runner for the rankone laboratory.
//!
//! Exit codes: 0 pass, 1 fail, 2 usage or runtime error, 3 inconclusive.

mod args;
mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rankone::Status;
use serde::Deserialize;

use experiments::*;
use output::Format;

#[derive(Debug, Parser)]
#[command(name = "rank1", version, about = "Exact experiments on rank-one cutting-and-stacking transformations")]
struct Cli {
    /// Deepest stage any bound may refine to.
    #[arg(long, global = true, env = "RANK1_MAX_STAGE")]
    max_stage: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment from a JSON config, from arguments, or both.
    Run(RunArgs),
    #[command(flatten)]
    Experiment(ExperimentCommand),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    experiment: Option<ExperimentCommand>,
}

#[derive(Debug, Subcommand)]
enum ExperimentCommand {
    /// Heights, widths, spacers and measure checks per stage.
    Geometry(GeometryArgs),
    /// Exact brackets on μ(Tⁿ A ∩ B).
    Measure(MeasureArgs),
    /// Interval-model values next to the calculus.
    Oracle(OracleArgs),
    /// Weak-limit checks (default: verify).
    Limits(LimitsCommand),
    /// Off-diagonal joinings.
    Joinings(JoiningsCommand),
    /// Product systems (default: scan).
    Products(ProductsCommand),
    /// Correlations and spectral estimates (default: corr).
    Spectral(SpectralCommand),
    /// The end-to-end acceptance criteria.
    Acceptance(AcceptanceArgs),
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
struct LimitsCommand {
    #[command(subcommand)]
    sub: Option<LimitsSub>,
    #[command(flatten)]
    verify: LimitsVerifyArgs,
}

#[derive(Debug, Subcommand)]
enum LimitsSub {
    /// μ(T^{n(k)} A ∩ B) against a predicted polynomial.
    Verify(LimitsVerifyArgs),
    /// Window and dead-zone scan around h_j.
    Scan(LimitsScanArgs),
    /// The T^{−n h_j} limits of thm2(N).
    Eq4(Eq4Args),
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
struct JoiningsCommand {
    #[command(subcommand)]
    sub: Option<JoiningsSub>,
    #[command(flatten)]
    witness: WitnessArgs,
}

#[derive(Debug, Subcommand)]
enum JoiningsSub {
    /// Shifts k(j) with Δ^{k(j)} ≥ ½Δᵐ on a rectangle grid.
    Witness(WitnessArgs),
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
struct ProductsCommand {
    #[command(subcommand)]
    sub: Option<ProductsSub>,
    #[command(flatten)]
    scan: ProductsScanArgs,
}

#[derive(Debug, Subcommand)]
enum ProductsSub {
    /// Rectangle returns of Tᵐ × T′ⁿ.
    Scan(ProductsScanArgs),
    /// Height ratios h_i / h′_i.
    Ratio(RatioArgs),
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
struct SpectralCommand {
    #[command(subcommand)]
    sub: Option<SpectralSub>,
    #[command(flatten)]
    corr: CorrArgs,
}

#[derive(Debug, Subcommand)]
enum SpectralSub {
    /// Exact correlations c(n) = μ(TⁿA ∩ A)/μ(A).
    Corr(CorrArgs),
    /// Fejér density estimate.
    Density(DensityArgs),
    /// Correlations of the Poisson suspension.
    Suspend(SuspendArgs),
}

impl From<ExperimentCommand> for Experiment {
    fn from(command: ExperimentCommand) -> Self {
        match command {
            ExperimentCommand::Geometry(a) => Experiment::Geometry(a),
            ExperimentCommand::Measure(a) => Experiment::Measure(a),
            ExperimentCommand::Oracle(a) => Experiment::Oracle(a),
            ExperimentCommand::Limits(c) => match c.sub {
                None => Experiment::LimitsVerify(c.verify),
                Some(LimitsSub::Verify(a)) => Experiment::LimitsVerify(a),
                Some(LimitsSub::Scan(a)) => Experiment::LimitsScan(a),
                Some(LimitsSub::Eq4(a)) => Experiment::Eq4(a),
            },
            ExperimentCommand::Joinings(c) => match c.sub {
                None => Experiment::JoiningsWitness(c.witness),
                Some(JoiningsSub::Witness(a)) => Experiment::JoiningsWitness(a),
            },
            ExperimentCommand::Products(c) => match c.sub {
                None => Experiment::ProductsScan(c.scan),
                Some(ProductsSub::Scan(a)) => Experiment::ProductsScan(a),
                Some(ProductsSub::Ratio(a)) => Experiment::ProductsRatio(a),
            },
            ExperimentCommand::Spectral(c) => match c.sub {
                None => Experiment::SpectralCorr(c.corr),
                Some(SpectralSub::Corr(a)) => Experiment::SpectralCorr(a),
                Some(SpectralSub::Density(a)) => Experiment::SpectralDensity(a),
                Some(SpectralSub::Suspend(a)) => Experiment::SpectralSuspend(a),
            },
            ExperimentCommand::Acceptance(a) => Experiment::Acceptance(a),
        }
    }
}

/// `{"experiment": {"limits_verify": {...}}, "out": "...", "format": "csv", "max_stage": 12}`
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentConfig {
    experiment: Experiment,
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(default)]
    format: Option<Format>,
    #[serde(default)]
    max_stage: Option<usize>,
}

struct Plan {
    experiment: Experiment,
    out: Option<PathBuf>,
    format: Option<Format>,
    max_stage: Option<usize>,
}

fn plan(cli: Cli) -> anyhow::Result<Plan> {
    let (experiment, file) = match cli.command {
        Command::Experiment(e) => (e.into(), None),
        Command::Run(run) => {
            let file = match &run.config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    let config: ExperimentConfig =
                        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
                    Some(config)
                }
                None => None,
            };
            match (run.experiment, file) {
                (Some(e), file) => (e.into(), file.map(|f| (f.out, f.format, f.max_stage))),
                (None, Some(f)) => (f.experiment, Some((f.out, f.format, f.max_stage))),
                (None, None) => anyhow::bail!("`run` needs --config or an experiment"),
            }
        }
    };
    let (file_out, file_format, file_stage) = file.unwrap_or((None, None, None));
    Ok(Plan {
        experiment,
        out: cli.out.or(file_out),
        format: cli.format.or(file_format),
        max_stage: cli.max_stage.or(file_stage),
    })
}

fn execute(cli: Cli) -> anyhow::Result<Status> {
    let plan = plan(cli)?;
    let outcome = plan.experiment.run(plan.max_stage)?;
    let format = Format::resolve(plan.format, plan.out.as_deref());
    let bytes = output::render(&plan.experiment, plan.max_stage, &outcome, format)?;
    match &plan.out {
        Some(path) => output::write_atomic(path, &bytes)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
        }
    }
    eprintln!("status: {}", outcome.status);
    Ok(outcome.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Ok(Status::Inconclusive) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    use super::*;

    #[test]
    fn command_line_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn run_limits_defaults_to_verify() {
        let cli = Cli::try_parse_from([
            "rank1", "run", "limits", "--family", "utv1", "--seq", "h_j", "--poly", "1/2*T^0", "--j", "3..8",
        ])
        .unwrap();
        let plan = plan(cli).unwrap();
        let Experiment::LimitsVerify(args) = &plan.experiment else { panic!("{:?}", plan.experiment) };
        assert_eq!(args.seq, "h_j");
    }

    #[test]
    fn global_options_override_the_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"experiment": {"geometry": {"j": "1..3"}}, "max_stage": 9, "format": "csv"}"#).unwrap();
        let cli = Cli::try_parse_from(["rank1", "--max-stage", "12", "run", "--config", path.to_str().unwrap()]).unwrap();
        let plan = plan(cli).unwrap();
        assert_eq!(plan.max_stage, Some(12));
        assert_eq!(plan.format, Some(Format::Csv));
    }
}

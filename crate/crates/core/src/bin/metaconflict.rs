use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use metaconflict::pipeline::{
    cmd_generate, cmd_partition, cmd_pipeline, cmd_posterior, cmd_specify, PipelineError, Report, RunConfig,
};
use metaconflict::scenario::ScenarioSpec;
use metaconflict::specifier::SingletonSupport;

#[derive(Parser)]
#[command(
    name = "metaconflict",
    version,
    about = "Cluster conflicting evidence by minimizing metaconflict"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the partition with minimal metaconflict.
    Partition(RunArgs),
    /// Partition, then assess every evidence's cluster membership.
    Specify(RunArgs),
    /// Specify, then derive the posterior over the number of clusters.
    Posterior(RunArgs),
    /// All stages, including the cluster-to-event assignment.
    Pipeline(RunArgs),
    /// Write a synthetic scenario and its ground truth.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SingletonMode {
    Printed,
    Complement,
}

#[derive(Args)]
struct RunArgs {
    /// Evidence document (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Report file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random restarts per candidate number of clusters.
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, value_enum, default_value_t = SingletonMode::Printed)]
    singleton_support: SingletonMode,
    /// Directory for CSV tables.
    #[arg(long)]
    tables: Option<PathBuf>,
    /// Also print an aligned summary to stderr.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    targets: usize,
    /// Reports per target.
    #[arg(long, default_value_t = 4)]
    reports: usize,
    #[arg(long, default_value_t = 0.3)]
    nonspecificity: f64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            input: self.input.clone(),
            restarts: self.restarts,
            seed: self.seed,
            singleton_support: match self.singleton_support {
                SingletonMode::Printed => SingletonSupport::Printed,
                SingletonMode::Complement => SingletonSupport::Complement,
            },
            out: self.out.clone(),
            tables: self.tables.clone(),
            summary: self.summary,
        }
    }
}

type StageFn = fn(&RunConfig) -> Result<Report, PipelineError>;

fn emit(config: &RunConfig, report: Report) -> Result<(), PipelineError> {
    let json = report.to_json();
    match &config.out {
        Some(path) => std::fs::write(path, json).map_err(|e| PipelineError::Output {
            path: path.display().to_string(),
            message: e.to_string(),
        })?,
        None => print!("{json}"),
    }
    if let Some(dir) = &config.tables {
        report.write_tables(dir)?;
    }
    if config.summary {
        eprint!("{}", report.summary());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let (args, stage): (&RunArgs, StageFn) = match &cli.command {
        Command::Partition(a) => (a, cmd_partition),
        Command::Specify(a) => (a, cmd_specify),
        Command::Posterior(a) => (a, cmd_posterior),
        Command::Pipeline(a) => (a, cmd_pipeline),
        Command::Generate(g) => {
            let spec = ScenarioSpec {
                targets: g.targets,
                reports_per_target: g.reports,
                nonspecificity: g.nonspecificity,
                noise: g.noise,
                ..ScenarioSpec::default()
            };
            let truth = cmd_generate(&spec, g.seed, &g.out)?;
            log::info!("wrote {} and {}", g.out.display(), truth.display());
            return Ok(());
        }
    };
    let config = args.config();
    let report = stage(&config)?;
    emit(&config, report)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

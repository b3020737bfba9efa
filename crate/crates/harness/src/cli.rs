use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::config::{ExperimentConfig, StrategyTag};
use crate::error::Result;
use crate::output::Output;
use crate::{pipeline, report, studies};

#[derive(Debug, Parser)]
#[command(
    name = "pbdw",
    version,
    about = "State reconstruction from a reduced background and sparse sensors",
    after_help = "Exit codes: 0 success, 2 configuration error or bad usage, 3 numerical failure."
)]
struct Cli {
    /// TOML configuration; every key has a default.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Overrides the run seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Node table of the mesh.
    Mesh,
    /// Best-knowledge solves over the parameter grid.
    Snapshots,
    /// POD background and its spectrum.
    Pod,
    /// Sensor placement and its stability trace.
    Sensors {
        #[command(subcommand)]
        strategy: SensorCmd,
    },
    /// Reconstruction sweep over N, noise levels and seeds.
    Assimilate,
    /// Forcing/update pairs for training.
    Dataset,
    /// Trains the update network.
    Train,
    /// Experiment drivers.
    Study {
        #[command(subcommand)]
        which: StudyCmd,
    },
    /// Gnuplot scripts and a hash record of the CSV outputs.
    Report,
}

#[derive(Debug, Subcommand)]
enum SensorCmd {
    /// Greedy stability maximization.
    Place,
    /// Uniform random centers.
    Random,
}

#[derive(Debug, Subcommand)]
enum StudyCmd {
    /// Error against the number of background modes.
    Modes,
    /// Classical and hybrid reconstruction under model bias.
    Bias,
    /// Error against measurement noise.
    Noise,
    /// Greedy against random sensors.
    Sensors,
    /// Factorizations and timings of the online paths.
    Cost,
}

impl Command {
    fn label(&self) -> &'static str {
        match self {
            Command::Mesh => "mesh",
            Command::Snapshots => "snapshots",
            Command::Pod => "pod",
            Command::Sensors { .. } => "sensors",
            Command::Assimilate => "assimilate",
            Command::Dataset => "dataset",
            Command::Train => "train",
            Command::Study { which } => match which {
                StudyCmd::Modes => "study_modes",
                StudyCmd::Bias => "study_bias",
                StudyCmd::Noise => "study_noise",
                StudyCmd::Sensors => "study_sensors",
                StudyCmd::Cost => "study_cost",
            },
            Command::Report => "report",
        }
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cmd: &Command, cfg: &ExperimentConfig) -> Result<()> {
    match cmd {
        Command::Mesh => pipeline::mesh(cfg),
        Command::Snapshots => pipeline::snapshots(cfg),
        Command::Pod => pipeline::pod(cfg),
        Command::Sensors { strategy } => pipeline::sensors(
            cfg,
            match strategy {
                SensorCmd::Place => StrategyTag::Sgreedy,
                SensorCmd::Random => StrategyTag::Random,
            },
        ),
        Command::Assimilate => pipeline::assimilate(cfg).map(|_| ()),
        Command::Dataset => pipeline::dataset(cfg),
        Command::Train => pipeline::train_model(cfg).map(|_| ()),
        Command::Study { which } => match which {
            StudyCmd::Modes => studies::modes::run(cfg).map(|_| ()),
            StudyCmd::Bias => studies::bias::run(cfg).map(|_| ()),
            StudyCmd::Noise => studies::noise::run(cfg).map(|_| ()),
            StudyCmd::Sensors => studies::sensors::run(cfg).map(|_| ()),
            StudyCmd::Cost => studies::cost::run(cfg).map(|_| ()),
        },
        Command::Report => report::run(cfg),
    }
}

/// Wall-clock of the command, kept outside the byte-stable CSVs.
fn record_timing(cfg: &ExperimentConfig, label: &str, seconds: f64) -> Result<()> {
    let out = Output::create(cfg)?;
    out.write(&format!("timing_{label}.txt"), |w| {
        writeln!(w, "{label} {seconds:.3}").map_err(|e| crate::error::HarnessError::Core(e.into()))
    })?;
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
    let result = load(&cli).and_then(|cfg| {
        let t0 = Instant::now();
        dispatch(&cli.command, &cfg)?;
        record_timing(&cfg, cli.command.label(), t0.elapsed().as_secs_f64())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or semantic error (including bad
//! usage), 2 I/O error.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::calibration;
use crate::domain::{validate_config, MeasurementMode, ScenarioConfig, StrategyKind};
use crate::engine::{equilibrium_experiment, run_scenario, CycleRecord, EngineError};
use crate::report::{compare, summarize, write_csv, ReportError, RunSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_IO: i32 = 2;

const PRECEDENCE: &str = "Settings are resolved in order of precedence: command-line overrides \
(--seed, --strategy, --num-cycles, --measurement-mode) beat values in the scenario file, which \
beat built-in defaults for fields the file leaves out.";

#[derive(Debug, Parser)]
#[command(name = "vnsim", version, about = "Heterogeneous vehicular network selection simulator", after_help = PRECEDENCE)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario, print its summary and optionally write the per-cycle CSV.
    #[command(after_help = PRECEDENCE)]
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// CSV destination.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Run a scenario under the game and the baseline strategy with the same seed.
    #[command(after_help = PRECEDENCE)]
    Compare {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Existing directory that receives game.csv and baseline.csv.
        #[arg(short = 'o', long = "output", default_value = ".")]
        output: PathBuf,
    },
    /// Compare the predicted equilibrium shift with the simulated one.
    #[command(after_help = PRECEDENCE)]
    Oracle {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Check the scenario's curves against the calibration conditions.
    Calibrate {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Load a scenario and list any violations.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Game,
    #[value(alias = "baseline_mcdm")]
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Sampled,
    Direct,
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// Scenario JSON file.
    pub scenario: PathBuf,
    #[arg(short = 's', long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    #[arg(long)]
    pub num_cycles: Option<u64>,
    #[arg(long, value_enum)]
    pub measurement_mode: Option<ModeArg>,
}

impl ScenarioArgs {
    pub fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(s) = self.strategy {
            cfg.strategy_kind = match s {
                StrategyArg::Game => StrategyKind::Game,
                StrategyArg::Baseline => StrategyKind::BaselineMcdm,
            };
        }
        if let Some(n) = self.num_cycles {
            cfg.num_cycles = n;
        }
        if let Some(m) = self.measurement_mode {
            cfg.measurement_mode = match m {
                ModeArg::Sampled => MeasurementMode::Sampled,
                ModeArg::Direct => MeasurementMode::Direct,
            };
        }
    }
}

/// A failure mapped to its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn config(message: impl Display) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.to_string(),
        }
    }

    fn io(path: &Path, message: impl Display) -> Self {
        Failure {
            code: EXIT_IO,
            message: format!("{}: {message}", path.display()),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::InvalidConfig(v) => Failure::config(
                v.iter()
                    .map(|v| format!("  {v}"))
                    .fold("invalid scenario:".to_string(), |acc, l| acc + "\n" + &l),
            ),
        }
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Empty => Failure::config(e),
            ReportError::Io { .. } => Failure {
                code: EXIT_IO,
                message: e.to_string(),
            },
        }
    }
}

/// Reads the scenario file and applies overrides; validation is left to the caller.
fn load(args: &ScenarioArgs) -> Result<ScenarioConfig, Failure> {
    let text = fs::read_to_string(&args.scenario).map_err(|e| Failure::io(&args.scenario, e))?;
    let mut cfg = ScenarioConfig::from_json(&text).map_err(|e| Failure::config(format!("{}: {e}", args.scenario.display())))?;
    args.apply(&mut cfg);
    Ok(cfg)
}

fn run_and_summarize(cfg: &ScenarioConfig) -> Result<(Vec<CycleRecord>, RunSummary), Failure> {
    let records = run_scenario(cfg)?;
    let summary = summarize(&records, cfg.convergence.threshold, cfg.convergence.window as usize)?;
    Ok((records, summary))
}

fn cmd_run(args: &ScenarioArgs, output: Option<&Path>) -> Result<(), Failure> {
    let cfg = load(args)?;
    let (records, summary) = run_and_summarize(&cfg)?;
    if let Some(path) = output {
        write_csv(&records, path)?;
    }
    println!("{summary}");
    Ok(())
}

fn cmd_compare(args: &ScenarioArgs, dir: &Path) -> Result<(), Failure> {
    let cfg = load(args)?;
    if !dir.is_dir() {
        return Err(Failure::io(dir, "output directory does not exist"));
    }
    let game_cfg = ScenarioConfig {
        strategy_kind: StrategyKind::Game,
        ..cfg.clone()
    };
    let base_cfg = ScenarioConfig {
        strategy_kind: StrategyKind::BaselineMcdm,
        ..cfg
    };
    let (game, base) = std::thread::scope(|s| {
        let g = s.spawn(|| run_and_summarize(&game_cfg));
        let b = run_and_summarize(&base_cfg);
        (g.join().expect("game run panicked"), b)
    });
    let (game_records, game) = game?;
    let (base_records, base) = base?;
    write_csv(&game_records, &dir.join("game.csv"))?;
    write_csv(&base_records, &dir.join("baseline.csv"))?;
    println!("game\n{game}\n\nbaseline\n{base}\n\n{}", compare(&game, &base));
    Ok(())
}

fn cmd_oracle(args: &ScenarioArgs) -> Result<(), Failure> {
    let cfg = load(args)?;
    let outcome = equilibrium_experiment(&cfg)?.ok_or_else(|| Failure::config("scenario has no disturbance"))?;
    let spec = cfg.disturbance.expect("experiment ran");
    println!("disturbance         {} by {}", outcome.disturbed, spec.delta_e);
    println!("undisturbed load    {} on {}, {} on {}", outcome.g, outcome.disturbed, outcome.h, outcome.receiver);
    println!("oracle s={}", outcome.predicted);
    println!("simulated shift     {:.2}", outcome.simulated);
    Ok(())
}

fn cmd_calibrate(args: &ScenarioArgs) -> Result<(), Failure> {
    let cfg = load(args)?;
    let results = calibration::check(&cfg.profiles, &cfg.strategy, cfg.total_terminals);
    for r in &results {
        println!("{r}");
    }
    match results.iter().filter(|r| !r.passed).count() {
        0 => Ok(()),
        n => Err(Failure::config(format!("{n} calibration condition(s) failed"))),
    }
}

fn cmd_validate(args: &ScenarioArgs) -> Result<(), Failure> {
    let cfg = load(args)?;
    let violations = validate_config(&cfg);
    if violations.is_empty() {
        println!("{}: ok", args.scenario.display());
        Ok(())
    } else {
        Err(EngineError::InvalidConfig(violations).into())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Run { scenario, output } => cmd_run(scenario, output.as_deref()),
        Command::Compare { scenario, output } => cmd_compare(scenario, output),
        Command::Oracle { scenario } => cmd_oracle(scenario),
        Command::Calibrate { scenario } => cmd_calibrate(scenario),
        Command::Validate { scenario } => cmd_validate(scenario),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()) as u8)
}

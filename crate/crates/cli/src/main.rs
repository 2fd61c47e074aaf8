//! `ditraffic`: learn which devices transmit after which, and when.
//!
//! Subcommands cover the whole pipeline: `generate` synthetic datasets,
//! `train` a model (with per-pair DI matrix exports), `predict` from a
//! trigger, and `evaluate` against held-out events. Every command is
//! deterministic given its flags; data outputs are byte-reproducible.

mod io;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ditraffic_core::{
    evaluate, four_device_scenario, generate, predict, save_model, train_with, DeviceId, Error,
    EvaluationReport, Prediction, TrainConfig, DEFAULT_MIN_EVENTS, DEFAULT_THRESHOLD_BITS,
};

/// Exit codes: 2 usage, 3 data, 4 internal invariant violation.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) | CliError::Internal(msg) => {
                f.write_str(msg)
            }
        }
    }
}

/// Classifies core errors raised while crunching already-loaded data.
fn data_error(err: Error) -> CliError {
    match err {
        Error::DiOutOfRange(_) => CliError::Internal(err.to_string()),
        _ => CliError::Data(err.to_string()),
    }
}

#[derive(Parser)]
#[command(
    name = "ditraffic",
    version,
    about = "Directed-information traffic prediction for event-driven device fleets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic event dataset (events.csv + metadata.json)
    Generate(GenerateArgs),
    /// Train a model and export per-pair DI matrices
    Train(TrainArgs),
    /// Rank the devices expected to transmit after a trigger
    Predict(PredictArgs),
    /// Score a model against held-out events
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Built-in scenario name (currently: `paper`, the bundled
    /// four-device reference scenario)
    #[arg(long, conflicts_with = "profiles")]
    scenario: Option<String>,
    /// Generator config file (JSON, same keys as the generator config)
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// Number of events to generate (overrides the profiles file)
    #[arg(long)]
    events: Option<usize>,
    /// RNG seed (overrides the profiles file)
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(short, long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Training dataset (events.csv)
    #[arg(long)]
    data: PathBuf,
    /// Causality threshold ε in bits
    #[arg(long, default_value_t = DEFAULT_THRESHOLD_BITS)]
    threshold: f64,
    /// Add-α smoothing for the window estimates
    #[arg(long, default_value_t = 0.0)]
    smoothing: f64,
    /// Minimum number of training events
    #[arg(long, default_value_t = DEFAULT_MIN_EVENTS)]
    min_events: usize,
    /// Also write one PGM heatmap per device pair
    #[arg(long)]
    heatmap: bool,
    /// Output directory
    #[arg(short, long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// Trained model file
    #[arg(long)]
    model: PathBuf,
    /// Device that triggered the event
    #[arg(long)]
    trigger: String,
    /// Slot (1-based) at which the trigger transmitted
    #[arg(long)]
    slot: usize,
    /// Also write the predictions as JSON
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Trained model file
    #[arg(long)]
    model: PathBuf,
    /// Holdout dataset (events.csv)
    #[arg(long)]
    data: PathBuf,
    /// Minimum claim confidence in bits
    #[arg(long, default_value_t = 0.05)]
    floor: f64,
    /// Also write the metrics as JSON
    #[arg(long)]
    json: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Evaluate(args) => cmd_evaluate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let mut config = match (&args.scenario, &args.profiles) {
        (Some(name), None) => match name.as_str() {
            "paper" => four_device_scenario(1000, 0),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown scenario `{other}` (available: paper)"
                )))
            }
        },
        (None, Some(path)) => io::read_profiles(path)?,
        (None, None) => {
            return Err(CliError::Usage(
                "one of --scenario or --profiles is required".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
    };
    if let Some(events) = args.events {
        if events == 0 {
            return Err(CliError::Usage("--events must be at least 1".into()));
        }
        config.num_events = events;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let from_file = args.profiles.is_some();
    let dataset = generate(&config).map_err(|e| {
        if from_file {
            CliError::Data(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    })?;

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let events_path = args.out_dir.join("events.csv");
    io::write_events_csv(&events_path, &dataset)?;
    io::write_metadata(&args.out_dir.join("metadata.json"), &config)?;
    println!(
        "wrote {} ({} devices x {} events x {} slots)",
        events_path.display(),
        dataset.devices().len(),
        dataset.num_events(),
        dataset.slots_per_event()
    );
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    if args.threshold < 0.0 {
        return Err(CliError::Usage("--threshold must be non-negative".into()));
    }
    if args.smoothing < 0.0 {
        return Err(CliError::Usage("--smoothing must be non-negative".into()));
    }
    let dataset = io::read_events_csv(&args.data)?;
    let config = TrainConfig {
        threshold_bits: args.threshold,
        min_events: args.min_events,
        smoothing_alpha: args.smoothing,
        generator: io::sibling_generator_stamp(&args.data),
    };
    let output = train_with(&dataset, &config).map_err(data_error)?;

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let model_path = args.out_dir.join("model.json");
    io::write_bytes(&model_path, &save_model(&output.model))?;
    for matrix in &output.matrices {
        io::write_matrix_csv(&io::matrix_csv_path(&args.out_dir, matrix), matrix)?;
        if args.heatmap {
            let mut path = io::matrix_csv_path(&args.out_dir, matrix);
            path.set_extension("pgm");
            io::write_heatmap_pgm(&path, matrix)?;
        }
    }

    let total_entries: usize = output
        .model
        .devices()
        .filter_map(|d| output.model.causality_set(d))
        .map(<[_]>::len)
        .sum();
    if total_entries == 0 {
        eprintln!(
            "warning: no causality entries above threshold {} bits; every set is empty",
            args.threshold
        );
    }
    println!(
        "wrote {} and {} DI matrices ({} causality entries at threshold {} bits)",
        model_path.display(),
        output.matrices.len(),
        total_entries,
        args.threshold
    );
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<(), CliError> {
    let model = io::read_model(&args.model)?;
    let trigger = DeviceId::new(args.trigger.clone());
    let predictions = match predict(&model, &trigger, args.slot) {
        Ok(p) => p,
        Err(err @ (Error::UnknownDevice(_) | Error::SlotOutOfRange { .. })) => {
            return Err(CliError::Usage(err.to_string()))
        }
        Err(err) => return Err(data_error(err)),
    };

    if predictions.is_empty() {
        println!("no predictions");
    } else {
        print_predictions(&predictions);
    }
    if let Some(path) = &args.json {
        io::write_json(path, &predictions)?;
    }
    Ok(())
}

fn print_predictions(predictions: &[Prediction]) {
    println!(
        "{:<16} {:>4}  {:>10}  {:>10}",
        "target", "slot", "di_bits", "confidence"
    );
    for p in predictions {
        println!(
            "{:<16} {:>4}  {:>10.6}  {:>10.6}",
            p.target_id.to_string(),
            p.predicted_slot,
            p.confidence,
            p.normalized_confidence
        );
    }
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let model = io::read_model(&args.model)?;
    let holdout = io::read_events_csv(&args.data)?;
    let report = evaluate(&model, &holdout, args.floor).map_err(data_error)?;
    print_report(&report);
    if let Some(path) = &args.json {
        io::write_json(path, &report)?;
    }
    Ok(())
}

fn print_report(report: &EvaluationReport) {
    println!(
        "{:<16} {:>9} {:>11} {:>6}  {:>9} {:>7} {:>7} {:>8}",
        "device", "predicted", "transmitted", "hits", "precision", "recall", "f1", "coverage"
    );
    for (device, m) in &report.per_device {
        let precision = if m.precision_defined {
            format!("{:.4}", m.precision)
        } else {
            format!("{:.4}*", m.precision)
        };
        println!(
            "{:<16} {:>9} {:>11} {:>6}  {:>9} {:>7.4} {:>7.4} {:>8.4}",
            device.to_string(),
            m.events_predicted,
            m.events_transmitted,
            m.events_hit,
            precision,
            m.recall,
            m.f1,
            m.coverage
        );
    }
    println!(
        "events evaluated: {} (skipped without a trigger: {})",
        report.events_evaluated, report.events_skipped
    );
    println!(
        "mean confidence of correct/incorrect slot claims: {:.4} / {:.4}",
        report.mean_confidence_true_positive, report.mean_confidence_false_positive
    );
    if report.per_device.values().any(|m| !m.precision_defined) {
        println!("* undefined (no claims issued), reported as 1.0 by convention");
    }
}

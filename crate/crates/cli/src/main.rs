use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qftcalc::config::{ExperimentConfig, GridArg, PipelineKind, PlotScale, ShotsSpec};
use qftcalc::error::{CliError, CliResult};
use qftcalc::experiment::{metrics_json, run_experiment};
use qftcalc::validate::{run_suite, Suite, ValidateOptions};
use qftcalc::{presets, sweep};

#[derive(Parser)]
#[command(name = "qftcalc", version, about = "Quantum Fourier transform derivatives and integrals on a statevector simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write result.csv and metrics.json.
    Run(RunArgs),
    /// Run several experiments in parallel and write summary.json.
    Sweep(SweepArgs),
    /// List the figure presets.
    Presets {
        #[arg(long)]
        json: bool,
    },
    /// Run the self-check suite.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Start from a named preset.
    #[arg(long)]
    preset: Option<String>,
    /// JSON config file, applied over the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct Overrides {
    #[arg(long, value_enum)]
    mode: Option<PipelineKind>,
    /// Catalog id (cos-2pi-x, inv-x, cubic, two-harmonic) or a CSV of x,f samples.
    #[arg(long)]
    function: Option<String>,
    #[arg(long = "qubits")]
    qubits: Option<usize>,
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_negative_numbers = true)]
    domain: Option<Vec<f64>>,
    /// Shot count or `exact`.
    #[arg(long)]
    shots: Option<ShotsSpec>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    output: Option<PathBuf>,
    /// SVG plot path.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long, value_enum)]
    scale: Option<PlotScale>,
    #[arg(long, value_enum)]
    grid: Option<GridArg>,
}

impl Overrides {
    fn apply(self, cfg: &mut ExperimentConfig) {
        if let Some(v) = self.mode {
            cfg.mode = v;
        }
        if let Some(v) = self.function {
            cfg.function = v;
        }
        if let Some(v) = self.qubits {
            cfg.n_qubits = v;
        }
        if let Some(v) = self.domain {
            cfg.domain = Some([v[0], v[1]]);
        }
        if let Some(v) = self.shots {
            cfg.shots = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.output {
            cfg.output = v;
        }
        if let Some(v) = self.plot {
            cfg.plot = Some(v);
        }
        if let Some(v) = self.scale {
            cfg.scale = v;
        }
        if let Some(v) = self.grid {
            cfg.grid = Some(v);
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Preset whose qubit range is swept.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// JSON array of experiment configs.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for summary.json and, for presets, the per-run outputs.
    #[arg(long, default_value = "sweep")]
    output: PathBuf,
    /// Shot count or `exact`, applied to every run.
    #[arg(long)]
    shots: Option<ShotsSpec>,
    /// Base seed; run i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value = "fast")]
    suite: Suite,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Double the first rotation angle (mutation check).
    #[arg(long, hide = true)]
    tamper_schedule: bool,
}

fn resolve_preset(name: &str) -> CliResult<presets::Preset> {
    presets::find(name).ok_or_else(|| CliError::config("preset", format!("unknown preset `{name}`")))
}

fn run(args: RunArgs) -> CliResult<()> {
    let mut cfg = match &args.preset {
        Some(name) => resolve_preset(name)?.config("out", 0),
        None => ExperimentConfig::default(),
    };
    if let Some(path) = &args.config {
        cfg = ExperimentConfig::from_json_file(path)?;
    }
    args.overrides.apply(&mut cfg);
    let outcome = run_experiment(&cfg)?;
    print!("{}", String::from_utf8_lossy(&metrics_json(&outcome.metrics)));
    Ok(())
}

fn run_sweep(args: SweepArgs) -> CliResult<()> {
    let shots = args.shots.map(|s| s.0);
    let configs = match (&args.preset, &args.config) {
        (Some(name), _) => {
            let preset = resolve_preset(name)?;
            sweep::expand_preset(&preset, &args.output, args.seed.unwrap_or(0), shots)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e.to_string()))?;
            let mut configs: Vec<ExperimentConfig> =
                serde_json::from_str(&text).map_err(|e| CliError::config("config", e.to_string()))?;
            for (i, cfg) in configs.iter_mut().enumerate() {
                if let Some(seed) = args.seed {
                    cfg.seed = seed + i as u64;
                }
                if let Some(s) = shots {
                    cfg.shots = ShotsSpec(s);
                }
            }
            configs
        }
        (None, None) => return Err(CliError::config("sweep", "give --preset or --config")),
    };
    for cfg in &configs {
        cfg.validate()?;
    }
    let results = sweep::run_sweep(&configs, true);
    let summary = sweep::summarize(&configs, &results);
    sweep::write_summary(&args.output, &summary)?;
    for entry in &summary.runs {
        match &entry.error {
            None => println!(
                "{} n={} r_squared={} mae={}",
                entry.output,
                entry.n_qubits,
                fmt_opt(entry.r_squared),
                fmt_opt(entry.mae)
            ),
            Some(e) => println!("{} n={} error: {e}", entry.output, entry.n_qubits),
        }
    }
    if let Some(slope) = summary.mae_slope {
        println!("MAE slope vs N: {slope:.3}");
    }
    match results.into_iter().find_map(Result::err) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "null".to_string(), |x| format!("{x:.6}"))
}

fn list_presets(json: bool) {
    let all = presets::all();
    if json {
        let configs: Vec<_> = all
            .iter()
            .map(|p| {
                serde_json::json!({
                    "name": p.name,
                    "description": p.description,
                    "config": p.config("out", 0),
                    "sweep_qubits": p.sweep.as_ref().map(|r| [r.start(), r.end()]),
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&configs).expect("presets serialise"));
        return;
    }
    for p in all {
        let sweep = p
            .sweep
            .as_ref()
            .map(|r| format!("  sweep n={}..{}", r.start(), r.end()))
            .unwrap_or_default();
        println!(
            "{:<7} {} {:<13} n={} [{}, {}] shots={:e}  {}{sweep}",
            p.name,
            p.mode,
            p.function,
            p.n_qubits,
            p.domain[0],
            p.domain[1],
            p.shots as f64,
            p.description
        );
    }
}

fn validate(args: ValidateArgs) -> CliResult<()> {
    let opts = ValidateOptions {
        tamper_schedule: args.tamper_schedule,
        seed: args.seed,
    };
    let checks = run_suite(args.suite, &opts);
    for c in &checks {
        println!("{c}");
    }
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failed.join(", ")))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Presets { json } => {
            list_presets(json);
            Ok(())
        }
        Command::Validate(args) => validate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Command-line front end: emits CSV/JSON sweep data, fringe curves, and
//! CHSH reports.

use clap::{Args, Parser, Subcommand, ValueEnum};
use sagnac::analyzers::AnalyzerSettings;
use sagnac::bellstats::{analytic_rate_fn, chsh_s, ChshAngles};
use sagnac::coincidence::{coincidence_rate_analytic, coincidence_rate_mc, decoherence_scan, CoincidenceMode, RatePoint};
use sagnac::ensemble::{run_ensemble, RunSpec, DEFAULT_SEED};
use sagnac::pairmodel::{build_output_fields, SourceConfig};
use serde_json::json;
use std::f64::consts::TAU;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "sagnac", version, about = "Coherence-model simulator for a Sagnac SPDC entangled-photon source")]
struct Cli {
    /// Master RNG seed; runs are reproducible for a fixed seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of Monte Carlo trials.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Source config as a JSON file; missing keys take defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Tabular output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Post,
    Classical,
}

#[derive(Subcommand)]
enum Command {
    /// Singles intensities at the two detectors.
    Singles(SinglesArgs),
    /// Coincidence rate at one (xi, theta) point.
    Coincidence(PointArgs),
    /// Non-post-selected intensity-product rate at one (xi, theta) point.
    Classical(ClassicalPointArgs),
    /// Coincidence-rate grid over (xi, theta).
    Sweep(SweepArgs),
    /// CHSH Bell parameter report.
    Chsh(ChshArgs),
    /// Post-selected rate vs detector time offset tau.
    Decohere(DecohereArgs),
}

#[derive(Args)]
struct SinglesArgs {
    /// Signal polarizer angle, degrees.
    #[arg(long, default_value_t = 0.0)]
    xi: f64,
    /// Idler polarizer angle, degrees.
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Override the config detuning bandwidth (rad/s); 0 pins delta_jk = 0.
    #[arg(long)]
    bandwidth: Option<f64>,
}

#[derive(Args)]
struct PointArgs {
    /// Signal polarizer angle, degrees.
    #[arg(long)]
    xi: f64,
    /// Idler polarizer angle, degrees.
    #[arg(long)]
    theta: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Post)]
    mode: ModeArg,
    /// Evaluate the closed form instead of Monte Carlo (post mode only).
    #[arg(long)]
    analytic: bool,
}

#[derive(Args)]
struct ClassicalPointArgs {
    /// Signal polarizer angle, degrees.
    #[arg(long)]
    xi: f64,
    /// Idler polarizer angle, degrees.
    #[arg(long)]
    theta: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0.0)]
    xi_start: f64,
    #[arg(long, default_value_t = 180.0)]
    xi_end: f64,
    #[arg(long, default_value_t = 37)]
    xi_steps: usize,
    #[arg(long, default_value_t = 0.0)]
    theta_start: f64,
    #[arg(long, default_value_t = 180.0)]
    theta_end: f64,
    #[arg(long, default_value_t = 37)]
    theta_steps: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Post)]
    mode: ModeArg,
    /// Evaluate the closed form instead of Monte Carlo (post mode only).
    #[arg(long)]
    analytic: bool,
}

#[derive(Args)]
struct ChshArgs {
    /// Four angles a,a',b,b' in degrees.
    #[arg(long, default_value = "0,45,22.5,67.5")]
    angles: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Post)]
    mode: ModeArg,
    /// Use analytic rates (post mode only).
    #[arg(long)]
    analytic: bool,
}

#[derive(Args)]
struct DecohereArgs {
    /// Detuning bandwidth sigma in Hz (converted to rad/s internally).
    #[arg(long)]
    bandwidth: f64,
    /// Largest detector offset, seconds.
    #[arg(long)]
    tau_max: f64,
    /// Number of tau grid points (including 0 and tau_max).
    #[arg(long, default_value_t = 21)]
    steps: usize,
    /// Signal polarizer angle, degrees.
    #[arg(long, default_value_t = 22.5)]
    xi: f64,
    /// Idler polarizer angle, degrees.
    #[arg(long, default_value_t = 67.5)]
    theta: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Io(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_IO)
        }
    }
}

enum CliError {
    Usage(String),
    Io(String),
}

fn load_config(cli: &Cli) -> Result<SourceConfig, CliError> {
    let Some(path) = &cli.config else {
        return Ok(SourceConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    SourceConfig::from_json(&text).map_err(|e| CliError::Usage(e.to_string()))
}

fn open_output(cli: &Cli) -> Result<Box<dyn Write>, CliError> {
    match &cli.output {
        None => Ok(Box::new(std::io::stdout().lock())),
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            Ok(Box::new(std::io::BufWriter::new(file)))
        }
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn rad(degrees: f64) -> f64 {
    degrees.to_radians()
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = load_config(cli)?;
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let trials = cli.trials.unwrap_or(100_000);
    if trials == 0 {
        return Err(CliError::Usage("--trials must be >= 1".into()));
    }
    match &cli.command {
        Command::Singles(args) => cmd_singles(cli, &config, args, trials, seed),
        Command::Coincidence(args) => {
            cmd_point(cli, &config, args.xi, args.theta, args.mode, args.analytic, trials, seed)
        }
        Command::Classical(args) => {
            cmd_point(cli, &config, args.xi, args.theta, ModeArg::Classical, false, trials, seed)
        }
        Command::Sweep(args) => cmd_sweep(cli, &config, args, trials, seed),
        Command::Chsh(args) => cmd_chsh(cli, &config, args, trials, seed),
        Command::Decohere(args) => cmd_decohere(cli, &config, args, trials, seed),
    }
}

fn mode_of(mode: ModeArg) -> CoincidenceMode {
    match mode {
        ModeArg::Post => CoincidenceMode::post_selected(),
        ModeArg::Classical => CoincidenceMode::classical(),
    }
}

fn mode_name(mode: ModeArg) -> &'static str {
    match mode {
        ModeArg::Post => "post_selected",
        ModeArg::Classical => "classical",
    }
}

struct Table {
    header: &'static [&'static str],
    rows: Vec<Vec<serde_json::Value>>,
}

fn write_table(cli: &Cli, table: &Table) -> Result<(), CliError> {
    let mut out = open_output(cli)?;
    match cli.format {
        OutputFormat::Csv => {
            writeln!(out, "{}", table.header.join(",")).map_err(io_err)?;
            for row in &table.rows {
                let cells: Vec<String> = row
                    .iter()
                    .map(|v| match v {
                        serde_json::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                writeln!(out, "{}", cells.join(",")).map_err(io_err)?;
            }
        }
        OutputFormat::Json => {
            let objects: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|row| {
                    let map: serde_json::Map<String, serde_json::Value> = table
                        .header
                        .iter()
                        .zip(row.iter())
                        .map(|(k, v)| (k.to_string(), v.clone()))
                        .collect();
                    serde_json::Value::Object(map)
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&objects).unwrap()).map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)
}

fn num(value: f64) -> serde_json::Value {
    json!(value)
}

fn fixed(value: f64) -> serde_json::Value {
    // Stable decimal rendering so golden files are byte-exact.
    serde_json::Value::String(format!("{value:.12e}"))
}

fn cmd_singles(cli: &Cli, config: &SourceConfig, args: &SinglesArgs, trials: u64, seed: u64) -> Result<(), CliError> {
    let mut config = *config;
    if let Some(bandwidth) = args.bandwidth {
        if bandwidth < 0.0 {
            return Err(CliError::Usage("--bandwidth must be >= 0".into()));
        }
        config.bandwidth_sigma = bandwidth;
    }
    let settings = AnalyzerSettings::new(rad(args.xi), rad(args.theta));
    let spec = RunSpec::new(trials, seed);
    let signal = run_ensemble(&spec, &config, |sample| {
        let (a, _) = build_output_fields(&config, sample);
        sagnac::analyzers::singles_intensity(&sagnac::analyzers::project_signal(&a, &settings).unwrap())
    })
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let idler = run_ensemble(&spec, &config, |sample| {
        let (_, b) = build_output_fields(&config, sample);
        sagnac::analyzers::singles_intensity(&sagnac::analyzers::project_idler(&b, &settings).unwrap())
    })
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let table = Table {
        header: &["detector", "angle_deg", "mean_intensity", "stderr", "trials", "seed"],
        rows: vec![
            vec![json!("Ds"), num(args.xi), fixed(signal.mean), fixed(signal.std_error()), json!(trials), json!(seed)],
            vec![json!("Di"), num(args.theta), fixed(idler.mean), fixed(idler.std_error()), json!(trials), json!(seed)],
        ],
    };
    write_table(cli, &table)
}

#[allow(clippy::too_many_arguments)]
fn cmd_point(
    cli: &Cli,
    config: &SourceConfig,
    xi_deg: f64,
    theta_deg: f64,
    mode: ModeArg,
    analytic: bool,
    trials: u64,
    seed: u64,
) -> Result<(), CliError> {
    if analytic && mode == ModeArg::Classical {
        return Err(CliError::Usage("--analytic is only available in post mode".into()));
    }
    let settings = AnalyzerSettings::new(rad(xi_deg), rad(theta_deg));
    let norm = 0.25 * config.i0() * config.i0();
    let point = if analytic {
        RatePoint {
            xi: settings.xi,
            theta: settings.theta,
            rate: coincidence_rate_analytic(&settings, config.i0()),
            stat_error: 0.0,
        }
    } else {
        coincidence_rate_mc(&settings, config, &mode_of(mode), trials, seed)
            .map_err(|e| CliError::Usage(e.to_string()))?
    };
    let table = Table {
        header: &["xi_deg", "theta_deg", "mode", "rate_norm", "stderr", "trials", "seed"],
        rows: vec![vec![
            num(xi_deg),
            num(theta_deg),
            json!(mode_name(mode)),
            fixed(point.rate / norm),
            fixed(point.stat_error / norm),
            json!(if analytic { 0 } else { trials }),
            json!(seed),
        ]],
    };
    write_table(cli, &table)
}

fn grid(start: f64, end: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps < 1 {
        return Err(CliError::Usage("steps must be >= 1".into()));
    }
    if start > end {
        return Err(CliError::Usage("start must be <= end".into()));
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    let step = (end - start) / (steps - 1) as f64;
    Ok((0..steps).map(|k| start + k as f64 * step).collect())
}

fn cmd_sweep(cli: &Cli, config: &SourceConfig, args: &SweepArgs, trials: u64, seed: u64) -> Result<(), CliError> {
    if args.analytic && args.mode == ModeArg::Classical {
        return Err(CliError::Usage("--analytic is only available in post mode".into()));
    }
    let xi_grid = grid(args.xi_start, args.xi_end, args.xi_steps)?;
    let theta_grid = grid(args.theta_start, args.theta_end, args.theta_steps)?;
    let norm = 0.25 * config.i0() * config.i0();
    let mut rows = Vec::with_capacity(xi_grid.len() * theta_grid.len());
    for &xi_deg in &xi_grid {
        for &theta_deg in &theta_grid {
            let settings = AnalyzerSettings::new(rad(xi_deg), rad(theta_deg));
            let (rate, stderr) = if args.analytic {
                (coincidence_rate_analytic(&settings, config.i0()), 0.0)
            } else {
                let point = coincidence_rate_mc(&settings, config, &mode_of(args.mode), trials, seed)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                (point.rate, point.stat_error)
            };
            rows.push(vec![num(xi_deg), num(theta_deg), fixed(rate / norm), fixed(stderr / norm)]);
        }
    }
    let table = Table {
        header: &["xi_deg", "theta_deg", "rate_norm", "stderr"],
        rows,
    };
    write_table(cli, &table)
}

fn parse_angles(text: &str) -> Result<ChshAngles, CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("malformed --angles list: {e}")))?;
    if parts.len() != 4 {
        return Err(CliError::Usage(format!(
            "--angles needs exactly 4 comma-separated values, got {}",
            parts.len()
        )));
    }
    Ok(ChshAngles {
        a: rad(parts[0]),
        a_prime: rad(parts[1]),
        b: rad(parts[2]),
        b_prime: rad(parts[3]),
    })
}

fn cmd_chsh(cli: &Cli, config: &SourceConfig, args: &ChshArgs, trials: u64, seed: u64) -> Result<(), CliError> {
    if args.analytic && args.mode == ModeArg::Classical {
        return Err(CliError::Usage("--analytic is only available in post mode".into()));
    }
    let angles = parse_angles(&args.angles)?;
    let result = if args.analytic {
        chsh_s(&angles, &analytic_rate_fn(config.i0()))
    } else {
        let mode = mode_of(args.mode);
        let rate_fn = |xi: f64, theta: f64| {
            let settings = AnalyzerSettings::new(xi, theta);
            // Each angle pair gets its own derived seed so rates are
            // independent estimates.
            let pair_seed = sagnac::ensemble::derive_seed(seed, (xi.to_bits()).wrapping_add(theta.to_bits().rotate_left(17)));
            coincidence_rate_mc(&settings, config, &mode, trials, pair_seed).expect("trials >= 1")
        };
        chsh_s(&angles, &rate_fn)
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let report = json!({
        "e_ab": result.e_values[0].e,
        "e_abp": result.e_values[1].e,
        "e_apb": result.e_values[2].e,
        "e_apbp": result.e_values[3].e,
        "s": result.s_value,
        "stderr": result.stat_error,
        "mode": if args.analytic { "analytic" } else { mode_name(args.mode) },
    });
    let mut out = open_output(cli)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&report).unwrap()).map_err(io_err)?;
    out.flush().map_err(io_err)
}

fn cmd_decohere(cli: &Cli, config: &SourceConfig, args: &DecohereArgs, trials: u64, seed: u64) -> Result<(), CliError> {
    if args.bandwidth <= 0.0 {
        return Err(CliError::Usage("decoherence needs --bandwidth > 0".into()));
    }
    if args.steps < 2 {
        return Err(CliError::Usage("--steps must be >= 2".into()));
    }
    let mut config = *config;
    config.bandwidth_sigma = args.bandwidth * TAU; // Hz -> rad/s
    config.sampling = sagnac::pairmodel::SamplingMode::Physical;
    let settings = AnalyzerSettings::new(rad(args.xi), rad(args.theta));
    let tau_grid: Vec<f64> = (0..args.steps)
        .map(|k| k as f64 * args.tau_max / (args.steps - 1) as f64)
        .collect();
    let points = decoherence_scan(&settings, &config, &tau_grid, trials, seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let norm = 0.25 * config.i0() * config.i0();
    let rows = tau_grid
        .iter()
        .zip(points.iter())
        .map(|(&tau, point)| vec![fixed(tau), fixed(point.rate / norm), fixed(point.stat_error / norm)])
        .collect();
    let table = Table {
        header: &["tau_s", "rate_norm", "stderr"],
        rows,
    };
    write_table(cli, &table)
}

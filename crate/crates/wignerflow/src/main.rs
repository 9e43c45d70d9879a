//! Command-line front end: configuration, orchestration, and export of
//! fields, currents, stagnation inventories, classical trajectories, flux
//! rates, sweeps, and the validation suite.
//!
//! Conventions:
//!
//! * One subcommand per run; flags override an optional JSON config file
//!   (`--config`); built-in defaults fill the rest. `--dump-config` prints
//!   the fully resolved configuration as JSON to stdout (without running);
//!   feeding that JSON back through `--config` reproduces the run exactly.
//! * Artifacts go to `--out` (default `<command>.<ext>`); identical resolved
//!   configurations yield byte-identical files.
//! * stdout carries only `--dump-config` JSON and the `validate` table;
//!   progress notes go to stderr.
//! * Exit status: 0 on success, 1 on numerical failure (diagnostics carry
//!   the offending coordinates), 2 on usage/configuration errors (including
//!   unwritable output paths). `validate` exits 0 iff every check passes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use wignerflow::{
    evaluate_field, find_stagnation_points, flux_report_at, flux_sweep, run_all, trajectory,
    write_currents, write_field, write_json_pretty, write_stagnation, write_sweep,
    write_trajectory, CheckOutcome, ClassicalError, ExportFormat, FieldLabel, IoError, PhaseGrid,
    QuantifierError, QuantumError, SupportMode, SweepEntry, SystemConfig,
};

// ---------------------------------------------------------------------------
// Command-line surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "wignerflow",
    version,
    about = "Exact phase-space distributions, currents, and flux-based \
             quantifiers for the half-line oscillator family",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export one scalar field (see --field) on a phase-space grid.
    Grid(CommonArgs),
    /// Export the current pair (J_x, J_k) on a phase-space grid.
    Currents(CommonArgs),
    /// Locate, classify, and export current stagnation points.
    Stagnation(CommonArgs),
    /// Export one classical orbit at energy --eps.
    Trajectory(CommonArgs),
    /// Compute the three flux rates at a single energy --eps.
    Flux(CommonArgs),
    /// Compute the three flux rates over an energy range --eps min:max:steps.
    Sweep(CommonArgs),
    /// Run the validation suite and print its pass/fail table.
    Validate(CommonArgs),
}

impl Command {
    fn name(&self) -> CommandName {
        match self {
            Command::Grid(_) => CommandName::Grid,
            Command::Currents(_) => CommandName::Currents,
            Command::Stagnation(_) => CommandName::Stagnation,
            Command::Trajectory(_) => CommandName::Trajectory,
            Command::Flux(_) => CommandName::Flux,
            Command::Sweep(_) => CommandName::Sweep,
            Command::Validate(_) => CommandName::Validate,
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Grid(a)
            | Command::Currents(a)
            | Command::Stagnation(a)
            | Command::Trajectory(a)
            | Command::Flux(a)
            | Command::Sweep(a)
            | Command::Validate(a) => a,
        }
    }
}

/// The flat flag set shared by all subcommands. Flags that do not apply to
/// a given command are ignored after validation (the resolved configuration
/// drops them, so `--dump-config` shows exactly what the run uses).
#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON run configuration; explicit flags override its fields.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Radial quantum number n (0, 1, 2, ...).
    #[arg(long, value_name = "N")]
    n: Option<usize>,
    /// Coupling alpha as a decimal; must be semi-integer >= 1/2
    /// (0.5, 1.5, 2.5, ...).
    #[arg(long, value_name = "ALPHA")]
    alpha: Option<f64>,
    /// Eigenstate support: half_line | bounce.
    #[arg(long, value_name = "MODE")]
    mode: Option<String>,
    /// Single energy (`1.5`) for trajectory/flux, or a range
    /// (`min:max:steps`) for sweep.
    #[arg(long, value_name = "EPS", allow_hyphen_values = true)]
    eps: Option<String>,
    /// Orbit phase offset (rates are invariant under it).
    #[arg(long, value_name = "THETA", allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Orbit sample count for trajectory/flux/sweep.
    #[arg(long, value_name = "COUNT")]
    samples: Option<usize>,
    /// Grid specification `xmin:xmax:nx,kmin:kmax:nk` for
    /// grid/currents/stagnation.
    #[arg(long, value_name = "SPEC", allow_hyphen_values = true)]
    grid: Option<String>,
    /// Field to export with `grid`: W|Y|Jx|Jk|JkCl|DeltaJk|Div.
    #[arg(long, value_name = "LABEL")]
    field: Option<String>,
    /// Output path (default `<command>.<ext>`). For `validate`, the optional
    /// JSON report path (no file without it).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Artifact format: csv | json | dat (`validate` reports are always
    /// JSON).
    #[arg(long, value_name = "FMT")]
    format: Option<String>,
    /// Worker-thread cap (falls back to env WIGNERFLOW_THREADS, then to one
    /// worker per CPU).
    #[arg(long, value_name = "COUNT")]
    threads: Option<usize>,
    /// Reduced-resolution validation suite (same checks, coarser scans).
    #[arg(long)]
    quick: bool,
    /// Print the resolved configuration as JSON to stdout and exit without
    /// running.
    #[arg(long)]
    dump_config: bool,
}

// ---------------------------------------------------------------------------
// Resolved run configuration (the `--dump-config` / `--config` document)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum CommandName {
    Grid,
    Currents,
    Stagnation,
    Trajectory,
    Flux,
    Sweep,
    Validate,
}

impl CommandName {
    fn token(&self) -> &'static str {
        match self {
            CommandName::Grid => "grid",
            CommandName::Currents => "currents",
            CommandName::Stagnation => "stagnation",
            CommandName::Trajectory => "trajectory",
            CommandName::Flux => "flux",
            CommandName::Sweep => "sweep",
            CommandName::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EpsilonRange {
    min: f64,
    max: f64,
    steps: usize,
}

/// Fully resolved run configuration. Only fields the command actually uses
/// are populated, so the dumped JSON is canonical for the run.
#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    command: CommandName,
    system: SystemConfig,
    theta: f64,
    samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon_range: Option<EpsilonRange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<PhaseGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<FieldLabel>,
    format: ExportFormat,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    threads: Option<usize>,
    quick: bool,
}

/// Partial configuration as read from `--config`. Every field is optional;
/// unknown keys are rejected loudly. The shape matches the `--dump-config`
/// output, so dumps round-trip.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileConfig {
    command: Option<CommandName>,
    system: Option<SystemConfig>,
    theta: Option<f64>,
    samples: Option<usize>,
    epsilon: Option<f64>,
    epsilon_range: Option<EpsilonRange>,
    grid: Option<PhaseGrid>,
    field: Option<FieldLabel>,
    format: Option<ExportFormat>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    quick: Option<bool>,
}

// ---------------------------------------------------------------------------
// Failure taxonomy
// ---------------------------------------------------------------------------

enum Failure {
    /// Invalid parameters or configuration → exit status 2.
    Usage(String),
    /// Numerical failure (diagnostics carry coordinates) → exit status 1.
    Numerical(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 1,
        }
    }
    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => m,
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

impl From<QuantumError> for Failure {
    fn from(e: QuantumError) -> Self {
        match e {
            QuantumError::InvalidConfig(_) | QuantumError::InvalidGrid(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Numerical(other.to_string()),
        }
    }
}

impl From<ClassicalError> for Failure {
    fn from(e: ClassicalError) -> Self {
        match e {
            ClassicalError::InvalidParameters(_) => Failure::Usage(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

impl From<QuantifierError> for Failure {
    fn from(e: QuantifierError) -> Self {
        match e {
            QuantifierError::InvalidInput(_) => Failure::Usage(e.to_string()),
            QuantifierError::Classical(inner) => inner.into(),
            QuantifierError::Quantum(inner) => inner.into(),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        // An unwritable output path is a configuration problem, not a
        // numerical one.
        Failure::Usage(e.to_string())
    }
}

// ---------------------------------------------------------------------------
// Flag parsing helpers
// ---------------------------------------------------------------------------

fn parse_mode(token: &str) -> Result<SupportMode, Failure> {
    match token {
        "half_line" => Ok(SupportMode::HalfLine),
        "bounce" => Ok(SupportMode::Bounce),
        other => Err(usage(format!(
            "unknown mode {other:?}; expected half_line|bounce"
        ))),
    }
}

enum EpsSpec {
    Single(f64),
    Range(EpsilonRange),
}

fn parse_eps(token: &str) -> Result<EpsSpec, Failure> {
    let parts: Vec<&str> = token.split(':').collect();
    let bad = |what: &str| {
        usage(format!(
            "invalid --eps {token:?}: {what}; expected a single energy like \
             `1.5` or a range like `0.25:6:47`"
        ))
    };
    match parts.as_slice() {
        [single] => {
            let e: f64 = single.parse().map_err(|_| bad("not a number"))?;
            if !e.is_finite() || e <= 0.0 {
                return Err(bad("energy must be finite and > 0"));
            }
            Ok(EpsSpec::Single(e))
        }
        [min, max, steps] => {
            let min: f64 = min.parse().map_err(|_| bad("min is not a number"))?;
            let max: f64 = max.parse().map_err(|_| bad("max is not a number"))?;
            let steps: usize = steps.parse().map_err(|_| bad("steps is not an integer"))?;
            validate_range(EpsilonRange { min, max, steps }).map(EpsSpec::Range)
        }
        _ => Err(bad("wrong number of `:`-separated parts")),
    }
}

fn validate_range(r: EpsilonRange) -> Result<EpsilonRange, Failure> {
    if !r.min.is_finite() || !r.max.is_finite() || r.min <= 0.0 {
        return Err(usage(format!(
            "invalid energy range [{}, {}]: bounds must be finite and > 0",
            r.min, r.max
        )));
    }
    if r.max < r.min {
        return Err(usage(format!(
            "invalid energy range [{}, {}]: max must be >= min",
            r.min, r.max
        )));
    }
    if r.steps == 0 || (r.steps == 1 && r.max != r.min) {
        return Err(usage(format!(
            "invalid energy range steps {}: need >= 1, and >= 2 unless max == min",
            r.steps
        )));
    }
    Ok(r)
}

fn parse_grid(token: &str) -> Result<PhaseGrid, Failure> {
    let bad = || {
        usage(format!(
            "invalid --grid {token:?}; expected xmin:xmax:nx,kmin:kmax:nk \
             like `0.03:7:201,-12:12:201`"
        ))
    };
    let (xs, ks) = token.split_once(',').ok_or_else(bad)?;
    let triple = |s: &str| -> Result<(f64, f64, usize), Failure> {
        let p: Vec<&str> = s.split(':').collect();
        if p.len() != 3 {
            return Err(bad());
        }
        Ok((
            p[0].parse().map_err(|_| bad())?,
            p[1].parse().map_err(|_| bad())?,
            p[2].parse().map_err(|_| bad())?,
        ))
    };
    let (x_min, x_max, nx) = triple(xs)?;
    let (k_min, k_max, nk) = triple(ks)?;
    Ok(PhaseGrid::new(x_min, x_max, nx, k_min, k_max, nk)?)
}

fn parse_format(token: &str) -> Result<ExportFormat, Failure> {
    token.parse().map_err(usage)
}

fn parse_field(token: &str) -> Result<FieldLabel, Failure> {
    token.parse().map_err(usage)
}

/// Calibrated default export grid: 201×201 over x ∈ [0.03, 7], k ∈ [−12, 12].
/// Its Riemann sum of W reproduces the normalization to ≲ 5e−5 for every
/// reference configuration, inside the 1e−4 budget.
fn default_export_grid() -> PhaseGrid {
    PhaseGrid::new(0.03, 7.0, 201, -12.0, 12.0, 201).expect("static grid is valid")
}

/// Default stagnation window: covers the region where the currents of the
/// low-lying states are non-negligible, at the resolution the winding
/// bookkeeping was calibrated on.
fn default_stagnation_grid() -> PhaseGrid {
    PhaseGrid::new(0.05, 5.5, 161, -4.5, 4.5, 161).expect("static grid is valid")
}

fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var("WIGNERFLOW_THREADS") {
        Ok(raw) => {
            let t = raw.trim();
            if t.is_empty() {
                return Ok(None);
            }
            t.parse::<usize>().map(Some).map_err(|_| {
                usage(format!(
                    "env WIGNERFLOW_THREADS must be a positive integer, got {raw:?}"
                ))
            })
        }
        Err(_) => Ok(None),
    }
}

// ---------------------------------------------------------------------------
// Resolution: defaults ← config file ← flags
// ---------------------------------------------------------------------------

fn resolve(command: CommandName, args: &CommonArgs) -> Result<RunConfig, Failure> {
    let file = match &args.config {
        Some(path) => {
            let raw = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read config file {}: {e}", path.display())))?;
            let parsed: FileConfig = serde_json::from_str(&raw)
                .map_err(|e| usage(format!("invalid config file {}: {e}", path.display())))?;
            if let Some(file_cmd) = parsed.command {
                if file_cmd != command {
                    return Err(usage(format!(
                        "config file {} is for command `{}`, but `{}` was invoked",
                        path.display(),
                        file_cmd.token(),
                        command.token()
                    )));
                }
            }
            parsed
        }
        None => FileConfig::default(),
    };

    let n = args.n.or(file.system.map(|s| s.n())).unwrap_or(0);
    let alpha = args.alpha.or(file.system.map(|s| s.alpha())).unwrap_or(1.5);
    let mode = match &args.mode {
        Some(token) => parse_mode(token)?,
        None => file
            .system
            .map(|s| s.mode())
            .unwrap_or(SupportMode::HalfLine),
    };
    let system = SystemConfig::from_alpha(n, alpha, mode)?;

    let (mut epsilon, mut epsilon_range) = (file.epsilon, file.epsilon_range);
    if let Some(token) = &args.eps {
        match parse_eps(token)? {
            EpsSpec::Single(e) => {
                epsilon = Some(e);
                epsilon_range = None;
            }
            EpsSpec::Range(r) => {
                epsilon_range = Some(r);
                epsilon = None;
            }
        }
    }
    if let Some(e) = epsilon {
        if !e.is_finite() || e <= 0.0 {
            return Err(usage(format!("epsilon must be finite and > 0, got {e}")));
        }
    }
    if let Some(r) = epsilon_range {
        epsilon_range = Some(validate_range(r)?);
    }

    let theta = args.theta.or(file.theta).unwrap_or(0.0);
    if !theta.is_finite() {
        return Err(usage(format!("theta must be finite, got {theta}")));
    }
    let samples = args.samples.or(file.samples).unwrap_or(2048);

    let mut grid = file.grid;
    if let Some(token) = &args.grid {
        grid = Some(parse_grid(token)?);
    }
    if let Some(g) = grid {
        g.validate()?;
    }

    let field = match &args.field {
        Some(token) => Some(parse_field(token)?),
        None => file.field,
    };

    let format = match &args.format {
        Some(token) => parse_format(token)?,
        None => file.format.unwrap_or(ExportFormat::Csv),
    };

    let threads = match args.threads.or(file.threads) {
        Some(t) => Some(t),
        None => threads_from_env()?,
    };
    if threads == Some(0) {
        return Err(usage("--threads must be >= 1"));
    }

    let quick = args.quick || file.quick.unwrap_or(false);

    // Per-command requirements and defaults; fields a command does not use
    // are dropped so the resolved configuration is canonical.
    let needs_grid = matches!(
        command,
        CommandName::Grid | CommandName::Currents | CommandName::Stagnation
    );
    let grid = if needs_grid {
        Some(grid.unwrap_or_else(|| {
            if command == CommandName::Stagnation {
                default_stagnation_grid()
            } else {
                default_export_grid()
            }
        }))
    } else {
        None
    };
    let epsilon = match command {
        CommandName::Trajectory | CommandName::Flux => Some(epsilon.ok_or_else(|| {
            usage(format!(
                "`{}` requires a single energy: --eps <value> (a range was {})",
                command.token(),
                if epsilon_range.is_some() {
                    "given instead"
                } else {
                    "not given either"
                }
            ))
        })?),
        _ => None,
    };
    let epsilon_range = match command {
        CommandName::Sweep => Some(
            epsilon_range
                .ok_or_else(|| usage("`sweep` requires an energy range: --eps min:max:steps"))?,
        ),
        _ => None,
    };
    let field = match command {
        CommandName::Grid => Some(field.unwrap_or(FieldLabel::W)),
        _ => None,
    };
    let out = match command {
        // No report file unless requested.
        CommandName::Validate => args.out.clone().or(file.out),
        _ => Some(args.out.clone().or(file.out).unwrap_or_else(|| {
            let ext = match format {
                ExportFormat::Csv => "csv",
                ExportFormat::Json => "json",
                ExportFormat::Dat => "dat",
            };
            PathBuf::from(format!("{}.{ext}", command.token()))
        })),
    };

    Ok(RunConfig {
        command,
        system,
        theta,
        samples,
        epsilon,
        epsilon_range,
        grid,
        field,
        format,
        out,
        threads,
        quick,
    })
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

fn note(msg: &str) {
    eprintln!("wignerflow: {msg}");
}

fn run(cfg: &RunConfig) -> Result<(), Failure> {
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| usage(format!("cannot configure {t} worker threads: {e}")))?;
    }

    match cfg.command {
        CommandName::Grid => {
            let grid = cfg.grid.expect("resolved");
            let label = cfg.field.expect("resolved");
            let out = cfg.out.as_ref().expect("resolved");
            let field = evaluate_field(&cfg.system, grid, label)?;
            write_field(out, cfg.format, &cfg.system, &field)?;
            note(&format!(
                "wrote {} ({}x{} {label})",
                out.display(),
                grid.nx,
                grid.nk
            ));
        }
        CommandName::Currents => {
            let grid = cfg.grid.expect("resolved");
            let out = cfg.out.as_ref().expect("resolved");
            let jx = evaluate_field(&cfg.system, grid, FieldLabel::Jx)?;
            let jk = evaluate_field(&cfg.system, grid, FieldLabel::Jk)?;
            write_currents(out, cfg.format, &cfg.system, &jx, &jk)?;
            note(&format!(
                "wrote {} ({}x{} Jx, Jk)",
                out.display(),
                grid.nx,
                grid.nk
            ));
        }
        CommandName::Stagnation => {
            let grid = cfg.grid.expect("resolved");
            let out = cfg.out.as_ref().expect("resolved");
            let inventory = find_stagnation_points(&cfg.system, grid)?;
            write_stagnation(out, cfg.format, &cfg.system, &inventory)?;
            note(&format!(
                "wrote {} ({} stagnation points, winding sum {})",
                out.display(),
                inventory.points.len(),
                inventory.winding_sum()
            ));
        }
        CommandName::Trajectory => {
            let epsilon = cfg.epsilon.expect("resolved");
            let out = cfg.out.as_ref().expect("resolved");
            let traj = trajectory(cfg.system.alpha(), epsilon, cfg.theta, cfg.samples)?;
            write_trajectory(out, cfg.format, &traj)?;
            note(&format!(
                "wrote {} ({} samples, eps = {epsilon})",
                out.display(),
                cfg.samples
            ));
        }
        CommandName::Flux => {
            let epsilon = cfg.epsilon.expect("resolved");
            let out = cfg.out.as_ref().expect("resolved");
            let report = flux_report_at(&cfg.system, epsilon, cfg.theta, cfg.samples)?;
            note(&format!(
                "eps = {epsilon}: sigma_rate = {:.6e}, entropy_rate = {:.6e}, \
                 purity_rate = {:.6e}",
                report.sigma_rate, report.entropy_rate, report.purity_rate
            ));
            let entries = [SweepEntry {
                epsilon,
                report: Some(report),
                error: None,
            }];
            write_sweep(out, cfg.format, &cfg.system, &entries)?;
            note(&format!("wrote {}", out.display()));
        }
        CommandName::Sweep => {
            let range = cfg.epsilon_range.expect("resolved");
            let out = cfg.out.as_ref().expect("resolved");
            let entries = flux_sweep(
                &cfg.system,
                range.min,
                range.max,
                range.steps,
                cfg.theta,
                cfg.samples,
            )?;
            write_sweep(out, cfg.format, &cfg.system, &entries)?;
            note(&format!(
                "wrote {} ({} rows, eps in [{}, {}])",
                out.display(),
                entries.len(),
                range.min,
                range.max
            ));
            let failures: Vec<&SweepEntry> =
                entries.iter().filter(|e| e.report.is_none()).collect();
            if let Some(first) = failures.first() {
                return Err(Failure::Numerical(format!(
                    "{} of {} sweep rows failed; first at eps = {}: {}",
                    failures.len(),
                    entries.len(),
                    first.epsilon,
                    first.error.as_deref().unwrap_or("unknown error")
                )));
            }
        }
        CommandName::Validate => {
            let outcomes = run_all(cfg.quick);
            for outcome in &outcomes {
                println!("{}", outcome.render());
            }
            let passed = outcomes.iter().filter(|o| o.passed).count();
            let total_ms: u128 = outcomes.iter().map(|o| o.elapsed_ms).sum();
            println!(
                "validate: {passed}/{} checks passed in {:.1} s{}",
                outcomes.len(),
                total_ms as f64 / 1e3,
                if cfg.quick { " (quick)" } else { "" }
            );
            if let Some(out) = &cfg.out {
                #[derive(Serialize)]
                struct ValidationReport<'a> {
                    quick: bool,
                    passed: usize,
                    total: usize,
                    checks: &'a [CheckOutcome],
                }
                write_json_pretty(
                    out,
                    &ValidationReport {
                        quick: cfg.quick,
                        passed,
                        total: outcomes.len(),
                        checks: &outcomes,
                    },
                )?;
                note(&format!("wrote {}", out.display()));
            }
            if passed < outcomes.len() {
                return Err(Failure::Numerical(format!(
                    "{} of {} validation checks failed",
                    outcomes.len() - passed,
                    outcomes.len()
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = cli.command.args().clone();
    let command = cli.command.name();

    let cfg = match resolve(command, &args) {
        Ok(cfg) => cfg,
        Err(f) => {
            eprintln!("error: {}", f.message());
            return ExitCode::from(f.exit_code());
        }
    };

    if args.dump_config {
        match serde_json::to_string_pretty(&cfg) {
            Ok(json) => {
                println!("{json}");
                return ExitCode::SUCCESS;
            }
            Err(e) => {
                eprintln!("error: cannot serialize configuration: {e}");
                return ExitCode::from(1);
            }
        }
    }

    match run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

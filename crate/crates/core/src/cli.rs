//! The `hetnet` command line.
//!
//! Exit codes: 0 success, 1 domain failure (violations, escapes, empty
//! statistics, failed fits), 2 usage or parse errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{ensemble_stats, label, seed_line, switching_stats, EnsembleConfig, SwitchingStats};
use crate::dynamics::{DynamicsError, Simulator, Trajectory};
use crate::fit::{fit, FitProblem};
use crate::netspec::{parse_spec_as, serialize, validate, Format, NetworkSpec, Point};
use crate::plot::{histogram_svg, matrix_svg, phase_svg, StatsView};
use crate::presets;

#[derive(Debug, Parser)]
#[command(name = "hetnet", version, about = "Simulate, analyze and fit heteroclinic networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SpecSource {
    /// Spec file (TOML or JSON).
    #[arg(long, conflicts_with = "preset")]
    pub spec: Option<PathBuf>,
    /// Name of a shipped preset.
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a spec and list every violation.
    Validate {
        /// Spec file; alternative to --spec.
        path: Option<PathBuf>,
        #[command(flatten)]
        source: SpecSource,
    },
    /// Iterate the map and write the trajectory as CSV, with kicks in a sidecar.
    Simulate {
        #[command(flatten)]
        source: SpecSource,
        #[arg(long)]
        steps: u64,
        /// Initial point `x,y`; defaults to the spec's `init`.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        init: Option<Point>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Switching statistics from a trajectory file or a fresh run.
    Stats {
        #[command(flatten)]
        source: SpecSource,
        /// Trajectory CSV written by `simulate`.
        #[arg(long, conflicts_with_all = ["steps", "init"])]
        traj: Option<PathBuf>,
        /// Steps per seed for a fresh run.
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        init: Option<Point>,
        /// Number of seeds on a line through `init`.
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        /// Seed spacing along x.
        #[arg(long, default_value_t = 1e-3)]
        spacing: f64,
        /// Leading visits of each seed left out.
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        /// Dwell bin edges in time units.
        #[arg(long, value_delimiter = ',', default_values_t = [3.0, 30.0])]
        bins: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Fit free parameters to target statistics.
    Fit {
        /// Fit problem JSON.
        problem: PathBuf,
        /// Result JSON; the fitted spec goes next to it as `<stem>.spec.toml`.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        spec_out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Render a trajectory CSV or a stats JSON as SVG.
    Plot {
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: PlotKind,
        /// Needed for phase portraits and for stats from a trajectory.
        #[command(flatten)]
        source: SpecSource,
        #[arg(long, value_delimiter = ',', default_values_t = [3.0, 30.0])]
        bins: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// List or export shipped presets.
    #[command(subcommand)]
    Preset(PresetCommand),
}

#[derive(Debug, Subcommand)]
pub enum PresetCommand {
    List,
    Export {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ExportFormat::Toml)]
        format: ExportFormat,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Phase,
    Histogram,
    Matrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Toml,
    Json,
}

/// Parse `x,y`.
pub fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y, got \"{s}\""))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("\"{t}\": {e}"));
    Ok(Point::new(num(x)?, num(y)?))
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
        }
    }
}

type CliResult = Result<(), CliError>;

// stdout may be a closed pipe (`hetnet preset list | head`); losing output is fine there
macro_rules! say {
    ($($t:tt)*) => {{
        let _ = writeln!(io::stdout(), $($t)*);
    }};
}

fn emit(text: &str) {
    let _ = io::stdout().write_all(text.as_bytes());
}

fn usage(m: impl ToString) -> CliError {
    CliError::Usage(m.to_string())
}

fn failure(m: impl ToString) -> CliError {
    CliError::Failure(m.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| failure(format!("{}: {e}", path.display())))
}

fn parse_file(path: &Path) -> Result<NetworkSpec, CliError> {
    let text = read(path)?;
    let format = Format::from_path(path).unwrap_or_else(|| Format::sniff(&text));
    parse_spec_as(&text, format).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(source: &SpecSource) -> Result<NetworkSpec, CliError> {
    match (&source.spec, &source.preset) {
        (Some(path), _) => parse_file(path),
        (None, Some(name)) => presets::load_preset(name).map_err(usage),
        (None, None) => Err(usage("one of --spec or --preset is required")),
    }
}

/// Load and refuse specs with violations.
fn load_valid(source: &SpecSource) -> Result<NetworkSpec, CliError> {
    let spec = load(source)?;
    let violations = validate(&spec);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(failure(format!("spec has violations:\n  {}", list.join("\n  "))));
    }
    Ok(spec)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(usage("--threads must be >= 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(failure)?;
            Ok(pool.install(f))
        }
    }
}

fn initial_point(spec: &NetworkSpec, init: Option<Point>) -> Result<Point, CliError> {
    init.or(spec.settings.init).ok_or_else(|| usage("no --init given and the spec has no init"))
}

fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}{suffix}"))
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes") + "\n"
}

fn cmd_validate(path: Option<PathBuf>, source: SpecSource) -> CliResult {
    let spec = match path {
        Some(p) => parse_file(&p)?,
        None => load(&source)?,
    };
    let violations = validate(&spec);
    if violations.is_empty() {
        say!(
            "ok: {} ({} fixed points, {} corridors, {} perturbations)",
            spec.name,
            spec.fixedpoints.len(),
            spec.corridors.len(),
            spec.perturbations.len()
        );
        return Ok(());
    }
    for v in &violations {
        say!("{v}");
    }
    Err(failure(format!("{} violation(s)", violations.len())))
}

fn cmd_simulate(source: SpecSource, steps: u64, init: Option<Point>, out: PathBuf) -> CliResult {
    if steps == 0 {
        return Err(usage(DynamicsError::NoSteps));
    }
    let spec = load_valid(&source)?;
    let start = initial_point(&spec, init)?;
    let sim = Simulator::new(&spec).map_err(failure)?;
    let traj = sim.run(start, steps).map_err(failure)?;
    let mut buf = Vec::new();
    traj.write_csv(&mut buf).expect("in-memory write");
    write(&out, std::str::from_utf8(&buf).expect("ascii"))?;
    let mut events = Vec::new();
    traj.write_events_csv(&mut events).expect("in-memory write");
    let events_path = sidecar(&out, ".events.csv");
    write(&events_path, std::str::from_utf8(&events).expect("utf-8"))?;
    say!(
        "wrote {} ({} rows) and {} ({} kicks)",
        out.display(),
        traj.points.len(),
        events_path.display(),
        traj.events.len()
    );
    Ok(())
}

fn stats_from_traj(spec: &NetworkSpec, path: &Path, bins: &[f64]) -> Result<SwitchingStats, CliError> {
    let traj =
        Trajectory::read_csv(&read(path)?, spec.settings.dt).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    switching_stats(&label(spec, &traj), bins, spec.settings.min_visit).map_err(usage)
}

#[allow(clippy::too_many_arguments)]
fn cmd_stats(
    source: SpecSource,
    traj: Option<PathBuf>,
    steps: Option<u64>,
    init: Option<Point>,
    seeds: usize,
    spacing: f64,
    burn_in: usize,
    bins: Vec<f64>,
    out: Option<PathBuf>,
    threads: Option<usize>,
) -> CliResult {
    let spec = load_valid(&source)?;
    let stats = match (traj, steps) {
        (Some(path), _) => stats_from_traj(&spec, &path, &bins)?,
        (None, Some(0)) => return Err(usage(DynamicsError::NoSteps)),
        (None, Some(steps)) => {
            if seeds == 0 {
                return Err(usage("--seeds must be >= 1"));
            }
            let cfg = EnsembleConfig {
                seeds: seed_line(initial_point(&spec, init)?, (1.0, 0.0), spacing, seeds),
                transitions_per_seed: None,
                max_steps_per_seed: steps,
                burn_in_visits: burn_in,
                bin_edges: bins,
            };
            with_threads(threads, || ensemble_stats(&spec, &cfg))?.map_err(failure)?
        }
        (None, None) => return Err(usage("one of --traj or --steps is required")),
    };
    let text = pretty(&stats.to_json());
    match &out {
        Some(path) => write(path, &text)?,
        None => emit(&text),
    }
    if stats.is_empty() {
        return Err(failure("empty stats: no transitions observed"));
    }
    if let Some(path) = out {
        say!("wrote {} ({} transitions)", path.display(), stats.total_transitions());
    }
    Ok(())
}

fn cmd_fit(problem_path: PathBuf, out: PathBuf, spec_out: Option<PathBuf>, threads: Option<usize>) -> CliResult {
    let base = problem_path.parent().map(Path::to_path_buf).unwrap_or_default();
    let problem = FitProblem::from_json(&read(&problem_path)?, &base).map_err(usage)?;
    let result = with_threads(threads, || fit(&problem))?.map_err(failure)?;
    let fitted = problem.spec_with(&result.values()).map_err(failure)?;
    write(&out, &pretty(&result.to_json()))?;
    let spec_path = spec_out.unwrap_or_else(|| sidecar(&out, ".spec.toml"));
    let format = Format::from_path(&spec_path).unwrap_or(Format::Toml);
    write(&spec_path, &serialize(&fitted, format))?;
    for (path, value) in &result.best_params {
        say!("{path} = {value}");
    }
    say!(
        "loss {} after {} evaluations; wrote {} and {}",
        result.loss,
        result.evaluations,
        out.display(),
        spec_path.display()
    );
    Ok(())
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "csv")
}

fn cmd_plot(input: PathBuf, kind: PlotKind, source: SpecSource, bins: Vec<f64>, out: PathBuf) -> CliResult {
    let svg = match kind {
        PlotKind::Phase => {
            if !is_csv(&input) {
                return Err(usage("phase plots need a trajectory CSV"));
            }
            let spec = load(&source)?;
            let traj = Trajectory::read_csv(&read(&input)?, spec.settings.dt)
                .map_err(|e| usage(format!("{}: {e}", input.display())))?;
            if traj.points.is_empty() {
                return Err(failure("trajectory has no points"));
            }
            phase_svg(&spec, &traj)
        }
        PlotKind::Histogram | PlotKind::Matrix => {
            let view = if is_csv(&input) {
                StatsView::from_stats(&stats_from_traj(&load(&source)?, &input, &bins)?)
            } else {
                let doc: serde_json::Value =
                    serde_json::from_str(&read(&input)?).map_err(|e| usage(format!("{}: {e}", input.display())))?;
                StatsView::from_json(&doc).map_err(|e| usage(format!("{}: {e}", input.display())))?
            };
            if kind == PlotKind::Histogram {
                histogram_svg(&view)
            } else {
                matrix_svg(&view)
            }
        }
    };
    write(&out, &svg)?;
    say!("wrote {}", out.display());
    Ok(())
}

fn cmd_preset(cmd: PresetCommand) -> CliResult {
    match cmd {
        PresetCommand::List => {
            for e in presets::CATALOG {
                say!("{:<30} {}", e.name, e.blurb);
            }
            Ok(())
        }
        PresetCommand::Export { name, out, format } => {
            let spec = presets::load_preset(&name).map_err(usage)?;
            let format = match format {
                ExportFormat::Toml => Format::Toml,
                ExportFormat::Json => Format::Json,
            };
            let text = serialize(&spec, format);
            match out {
                Some(path) => {
                    write(&path, &text)?;
                    say!("wrote {}", path.display());
                }
                None => emit(&text),
            }
            Ok(())
        }
    }
}

pub fn execute(cli: Cli) -> CliResult {
    match cli.command {
        Command::Validate { path, source } => cmd_validate(path, source),
        Command::Simulate { source, steps, init, out } => cmd_simulate(source, steps, init, out),
        Command::Stats { source, traj, steps, init, seeds, spacing, burn_in, bins, out, threads } => {
            cmd_stats(source, traj, steps, init, seeds, spacing, burn_in, bins, out, threads)
        }
        Command::Fit { problem, out, spec_out, threads } => cmd_fit(problem, out, spec_out, threads),
        Command::Plot { input, kind, source, bins, out } => cmd_plot(input, kind, source, bins, out),
        Command::Preset(cmd) => cmd_preset(cmd),
    }
}

/// Parse `args` (program name first), run, report errors on stderr and
/// return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            let _ = io::stdout().flush();
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

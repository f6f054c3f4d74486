//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage and configuration errors, 3 for
//! numerical or solver failures.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{config_to_toml, constellation_to_toml, load_config};
use crate::error::{Error, Result};
use crate::experiments::{
    constellation_preset, figure_preset, run_experiment, tammes_row, Aggregation, ExperimentConfig, ModelKind,
    Normalization, Solver, CONSTELLATION_PRESETS, FIGURE_PRESETS,
};
use crate::generators::{
    gen_bpp, gen_fibonacci, gen_nbpp, gen_orbit, gen_orbit_track_oracle, FibonacciMode, OrbitMode, OrbitShellConfig,
    DEFAULT_SATS_PER_ORBIT,
};
use crate::matching::{build_cost_matrix, exact_assignment_poly, greedy_match, MatchOutcome, BRUTEFORCE_MAX_N};
use crate::rng::RandomStream;
use crate::sphere::{shell_radius_km, PointConfiguration};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Default altitude for orbit shells when none is given.
const DEFAULT_ORBIT_ALTITUDE_KM: f64 = 550.0;
const DEFAULT_GAMMA_DEG: f64 = 53.0;

#[derive(Debug, Parser)]
#[command(name = "spherical-pp", version, about = "Spherical point models and matching distances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample one point configuration.
    Generate(GenerateArgs),
    /// Matching distance between two sampled configurations.
    Distance(DistanceArgs),
    /// Packing-distance approximation against the Fibonacci lattice.
    Tammes(TammesArgs),
    /// Run a Monte Carlo experiment from a preset or config file.
    Experiment(ExperimentArgs),
    /// Print figure and constellation presets as editable config files.
    Presets(PresetsArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Bpp,
    Nbpp,
    Fibonacci,
    Orbit,
    OrbitTrackOracle,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Bpp => ModelKind::Bpp,
            ModelArg::Nbpp => ModelKind::Nbpp,
            ModelArg::Fibonacci => ModelKind::Fibonacci,
            ModelArg::Orbit => ModelKind::Orbit,
            ModelArg::OrbitTrackOracle => ModelKind::OrbitTrackOracle,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Paper,
    Reconciled,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConstellationArg {
    Starlink,
    Iridium,
    Oneweb,
}

impl ConstellationArg {
    fn name(self) -> &'static str {
        match self {
            ConstellationArg::Starlink => "starlink",
            ConstellationArg::Iridium => "iridium",
            ConstellationArg::Oneweb => "oneweb",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    Greedy,
    Exact,
    Both,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Greedy => Solver::Greedy,
            SolverArg::Exact => Solver::Exact,
            SolverArg::Both => Solver::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AggregationArg {
    IterationMean,
    PrintedPseudocode,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NormalizationArg {
    None,
    PerPoint,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum FormatArg {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Shell altitude above the Earth's surface [default: 550 with an orbit model, else 0].
    #[arg(long, allow_negative_numbers = true)]
    altitude_km: Option<f64>,
    /// Orbit inclination in degrees [default: 53].
    #[arg(long)]
    gamma_deg: Option<f64>,
    /// Satellites per orbital plane.
    #[arg(long, default_value_t = DEFAULT_SATS_PER_ORBIT)]
    sats_per_orbit: usize,
    /// Number of orbital planes; the point count becomes planes x satellites.
    #[arg(long)]
    n_orbits: Option<usize>,
    /// Orbit shell from a reference constellation.
    #[arg(long, value_enum)]
    constellation: Option<ConstellationArg>,
    #[arg(long, value_enum, default_value_t = ModeArg::Reconciled)]
    orbit_mode: ModeArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Reconciled)]
    fibonacci_mode: ModeArg,
}

impl ModelArgs {
    fn orbit_mode(&self) -> OrbitMode {
        match self.orbit_mode {
            ModeArg::Paper => OrbitMode::PaperLiteral,
            ModeArg::Reconciled => OrbitMode::Reconciled,
        }
    }

    fn fibonacci_mode(&self) -> FibonacciMode {
        match self.fibonacci_mode {
            ModeArg::Paper => FibonacciMode::PaperLiteral,
            ModeArg::Reconciled => FibonacciMode::Reconciled,
        }
    }

    /// One altitude shared by both models so their radii agree.
    fn altitude(&self, orbit_involved: bool) -> Result<f64> {
        Ok(match (self.altitude_km, self.constellation) {
            (Some(h), _) => h,
            (None, Some(c)) => constellation_preset(c.name())?.altitude_km,
            (None, None) if orbit_involved => DEFAULT_ORBIT_ALTITUDE_KM,
            (None, None) => 0.0,
        })
    }

    fn shell(&self, n: Option<usize>, altitude_km: f64) -> Result<OrbitShellConfig> {
        let mode = self.orbit_mode();
        let shell = match (self.constellation, self.n_orbits) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("--constellation and --n-orbits are mutually exclusive".into()))
            }
            (Some(c), None) => {
                let mut s = constellation_preset(c.name())?;
                s.mode = mode;
                s.altitude_km = altitude_km;
                if let Some(g) = self.gamma_deg {
                    s.gamma_rad = g.to_radians();
                }
                s
            }
            (None, Some(planes)) => OrbitShellConfig::new(
                self.gamma_deg.unwrap_or(DEFAULT_GAMMA_DEG).to_radians(),
                planes,
                self.sats_per_orbit,
                altitude_km,
                mode,
            )?,
            (None, None) => {
                let n = n.ok_or_else(|| Error::Config("--n is required".into()))?;
                return OrbitShellConfig::for_total(
                    self.gamma_deg.unwrap_or(DEFAULT_GAMMA_DEG).to_radians(),
                    n,
                    self.sats_per_orbit,
                    altitude_km,
                    mode,
                );
            }
        };
        shell.validate()?;
        if let Some(n) = n {
            if n != shell.n_points() {
                return Err(Error::Config(format!(
                    "--n {n} disagrees with the {} points of the selected shell",
                    shell.n_points()
                )));
            }
        }
        Ok(shell)
    }

    fn generate(
        &self,
        model: ModelKind,
        n: Option<usize>,
        altitude_km: f64,
        rng: &mut RandomStream,
    ) -> Result<PointConfiguration> {
        let count = || n.ok_or_else(|| Error::Config("--n is required".into()));
        let radius = shell_radius_km(altitude_km);
        match model {
            ModelKind::Bpp => gen_bpp(count()?, radius, rng),
            ModelKind::Nbpp => gen_nbpp(count()?, radius, rng),
            ModelKind::Fibonacci => gen_fibonacci(count()?, radius, self.fibonacci_mode()),
            ModelKind::Orbit => gen_orbit(&self.shell(n, altitude_km)?, rng),
            ModelKind::OrbitTrackOracle => gen_orbit_track_oracle(&self.shell(n, altitude_km)?, rng),
        }
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Number of points (orbit models may take it from the shell instead).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    model_args: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct DistanceArgs {
    #[arg(long, value_enum)]
    source: ModelArg,
    #[arg(long, value_enum)]
    target: ModelArg,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value_t = SolverArg::Greedy)]
    solver: SolverArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    model_args: ModelArgs,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TammesArgs {
    /// Point counts, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    altitude_km: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Reconciled)]
    fibonacci_mode: ModeArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// TOML experiment file; flags given here override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    #[arg(long, value_enum)]
    aggregation: Option<AggregationArg>,
    #[arg(long, value_enum)]
    normalization: Option<NormalizationArg>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct PresetsArgs {
    /// Print only this preset.
    name: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct DistanceReport {
    n: usize,
    solver: &'static str,
    distance_km: f64,
    rounds: Option<usize>,
    assignment: Vec<usize>,
}

impl DistanceReport {
    fn new(solver: &'static str, outcome: MatchOutcome) -> Self {
        Self {
            n: outcome.assignment.target_of().len(),
            solver,
            distance_km: outcome.distance_km,
            rounds: outcome.rounds,
            assignment: outcome.assignment.target_of().to_vec(),
        }
    }
}

fn open_output<'a>(path: &Option<PathBuf>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

fn cmd_generate(args: GenerateArgs, stdout: &mut dyn Write) -> Result<()> {
    let model = ModelKind::from(args.model);
    let orbit = matches!(model, ModelKind::Orbit | ModelKind::OrbitTrackOracle);
    let altitude = args.model_args.altitude(orbit)?;
    let mut rng = RandomStream::new(args.seed);
    let cfg = args.model_args.generate(model, args.n, altitude, &mut rng)?;
    let mut out = open_output(&args.output.out, stdout)?;
    match args.output.format {
        FormatArg::Csv => cfg.write_csv(&mut out)?,
        FormatArg::Json => writeln!(out, "{}", cfg.to_json()?)?,
    }
    out.flush()?;
    Ok(())
}

fn cmd_distance(args: DistanceArgs, stdout: &mut dyn Write) -> Result<()> {
    let source = ModelKind::from(args.source);
    let target = ModelKind::from(args.target);
    let orbit = [source, target]
        .iter()
        .any(|m| matches!(m, ModelKind::Orbit | ModelKind::OrbitTrackOracle));
    let altitude = args.model_args.altitude(orbit)?;
    let n = match args.n {
        None if orbit => Some(args.model_args.shell(None, altitude)?.n_points()),
        n => n,
    };
    let solver = Solver::from(args.solver);
    // Same streams as iteration 0 of an experiment with this seed.
    let stream = RandomStream::new(args.seed).substream(0);
    let a = args.model_args.generate(source, n, altitude, &mut stream.substream(0))?;
    let b = args.model_args.generate(target, n, altitude, &mut stream.substream(1))?;
    if matches!(solver, Solver::Exact | Solver::Both) && a.len() > BRUTEFORCE_MAX_N {
        return Err(Error::SizeLimit {
            n: a.len(),
            max: BRUTEFORCE_MAX_N,
        });
    }
    let d = build_cost_matrix(&a, &b)?;
    let mut reports = Vec::new();
    if matches!(solver, Solver::Greedy | Solver::Both) {
        reports.push(DistanceReport::new("greedy", greedy_match(&d)?));
    }
    if matches!(solver, Solver::Exact | Solver::Both) {
        reports.push(DistanceReport::new("exact", exact_assignment_poly(&d)?));
    }
    let mut out = open_output(&args.out, stdout)?;
    let text = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])?
    } else {
        serde_json::to_string_pretty(&reports)?
    };
    writeln!(out, "{text}")?;
    out.flush()?;
    Ok(())
}

fn cmd_tammes(args: TammesArgs, stdout: &mut dyn Write) -> Result<()> {
    let mode = match args.fibonacci_mode {
        ModeArg::Paper => FibonacciMode::PaperLiteral,
        ModeArg::Reconciled => FibonacciMode::Reconciled,
    };
    let radius = shell_radius_km(args.altitude_km);
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Config(format!("--altitude-km {} gives no usable shell", args.altitude_km)));
    }
    let rows = args
        .n
        .iter()
        .map(|&n| tammes_row(n, radius, mode))
        .collect::<Result<Vec<_>>>()?;
    let mut out = open_output(&args.output.out, stdout)?;
    match args.output.format {
        FormatArg::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        FormatArg::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?,
    }
    out.flush()?;
    Ok(())
}

fn experiment_config(args: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(p), None) => figure_preset(p)?,
        (None, Some(path)) => load_config(path)?,
        _ => return Err(Error::Config("give exactly one of --preset or --config".into())),
    };
    if let Some(v) = args.iterations {
        cfg.n_iterations = v;
    }
    if let Some(v) = args.seed {
        cfg.base_seed = v;
    }
    if let Some(v) = args.solver {
        cfg.solver = v.into();
    }
    if let Some(v) = args.aggregation {
        cfg.aggregation = match v {
            AggregationArg::IterationMean => Aggregation::IterationMean,
            AggregationArg::PrintedPseudocode => Aggregation::PrintedPseudocode,
        };
    }
    if let Some(v) = args.normalization {
        cfg.normalization = match v {
            NormalizationArg::None => Normalization::None,
            NormalizationArg::PerPoint => Normalization::PerPoint,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_experiment(args: ExperimentArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = experiment_config(&args)?;
    let output = run_experiment(&cfg)?;
    let mut out = open_output(&args.output.out, stdout)?;
    match args.output.format {
        FormatArg::Csv => output.write_csv(&mut out)?,
        FormatArg::Json => writeln!(out, "{}", output.to_json()?)?,
    }
    out.flush()?;
    Ok(())
}

fn cmd_presets(args: PresetsArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut sections = Vec::new();
    for name in FIGURE_PRESETS {
        if args.name.as_deref().is_none_or(|n| n == name) {
            sections.push(format!("# --- {name} ---\n{}", config_to_toml(&figure_preset(name)?)?));
        }
    }
    for name in CONSTELLATION_PRESETS {
        if args.name.as_deref().is_none_or(|n| n == name) {
            sections.push(format!(
                "# --- {name} ---\n{}",
                constellation_to_toml(name, &constellation_preset(name)?)?
            ));
        }
    }
    if sections.is_empty() {
        return Err(Error::UnknownPreset(args.name.unwrap_or_default()));
    }
    let mut out = open_output(&args.out, stdout)?;
    write!(out, "{}", sections.join("\n"))?;
    out.flush()?;
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to `stderr` as a single line.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
        Err(e) => {
            let rendered = e.to_string();
            let line = rendered.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(stderr, "{line}");
            return EXIT_CONFIG;
        }
    };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a, stdout),
        Command::Distance(a) => cmd_distance(a, stdout),
        Command::Tammes(a) => cmd_tammes(a, stdout),
        Command::Experiment(a) => cmd_experiment(a, stdout),
        Command::Presets(a) => cmd_presets(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        // A closed pipe (`| head`) is the reader's choice, not a failure.
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(stderr, "error: {msg}");
            if e.is_configuration() {
                EXIT_CONFIG
            } else {
                EXIT_NUMERIC
            }
        }
    }
}

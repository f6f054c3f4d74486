//! Seeded Monte Carlo sweeps over point-model pairs.
//!
//! Iteration `i` of every sweep point draws from
//! `RandomStream::new(base_seed).substream(i)`: the source model uses child
//! stream 0 and the target model child stream 1. Sweep points therefore share
//! random numbers, and iterations can run in any order (or in parallel)
//! without changing the output.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{
    gen_bpp, gen_fibonacci, gen_nbpp, gen_orbit, FibonacciMode, OrbitMode, OrbitShellConfig,
    DEFAULT_SATS_PER_ORBIT,
};
use crate::matching::{build_cost_matrix, exact_assignment_poly, greedy_match, BRUTEFORCE_MAX_N};
use crate::rng::RandomStream;
use crate::sphere::{shell_radius_km, ModelLabel, PointConfiguration};
use crate::stats::{compensated_sum, summarize};
use crate::tammes::tammes_approx_dopt;

pub const DEFAULT_ITERATIONS: usize = 1000;
pub const DEFAULT_SEED: u64 = 1;

macro_rules! str_enum {
    ($ty:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(&self) -> &'static str {
                match self { $($ty::$variant => $text),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($ty::$variant),)+
                    other => Err(Error::Config(format!(
                        "unknown {} `{}` (expected one of: {})",
                        stringify!($ty),
                        other,
                        [$($text),+].join(", ")
                    ))),
                }
            }
        }
    };
}

/// Point model family; mode details live on the [`Series`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Bpp,
    Nbpp,
    Fibonacci,
    Orbit,
    OrbitTrackOracle,
}

str_enum!(ModelKind {
    Bpp => "bpp",
    Nbpp => "nbpp",
    Fibonacci => "fibonacci",
    Orbit => "orbit",
    OrbitTrackOracle => "orbit-track-oracle",
});

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Greedy,
    Exact,
    Both,
}

str_enum!(Solver {
    Greedy => "greedy",
    Exact => "exact",
    Both => "both",
});

impl Solver {
    fn runs_greedy(self) -> bool {
        matches!(self, Solver::Greedy | Solver::Both)
    }

    fn runs_exact(self) -> bool {
        matches!(self, Solver::Exact | Solver::Both)
    }
}

/// How per-iteration distances are folded into one number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    /// Arithmetic mean of the per-iteration distances.
    #[default]
    IterationMean,
    /// `sqrt(sum_i W_i^2) / N_iter`: squared increments accumulated across
    /// all iterations under one root, then divided by the iteration count.
    PrintedPseudocode,
}

str_enum!(Aggregation {
    IterationMean => "iteration-mean",
    PrintedPseudocode => "printed-pseudocode",
});

/// Scaling applied to each per-iteration distance before aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Raw `W_d` in km.
    #[default]
    None,
    /// `W_d / sqrt(N_P)`: root-mean-square displacement per point, i.e. the
    /// distance between the two configurations taken as measures of mass
    /// `1 / N_P` per point.
    PerPoint,
}

str_enum!(Normalization {
    None => "none",
    PerPoint => "per-point",
});

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Matching distance between two models.
    Distance,
    /// Packing-distance approximation against the measured Fibonacci minimum.
    Tammes,
}

str_enum!(ExperimentKind {
    Distance => "distance",
    Tammes => "tammes",
});

/// One curve of an experiment: a model pair and the Cartesian product of
/// its sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub source: ModelKind,
    pub target: ModelKind,
    pub n_points: Vec<usize>,
    pub altitude_km: Vec<f64>,
    /// Only used when an orbit model is involved.
    pub gamma_rad: Vec<f64>,
    pub sats_per_orbit: usize,
    pub orbit_mode: OrbitMode,
    pub fibonacci_mode: FibonacciMode,
}

impl Default for Series {
    fn default() -> Self {
        Self {
            name: String::new(),
            source: ModelKind::Bpp,
            target: ModelKind::Fibonacci,
            n_points: Vec::new(),
            altitude_km: vec![0.0],
            gamma_rad: vec![53f64.to_radians()],
            sats_per_orbit: DEFAULT_SATS_PER_ORBIT,
            orbit_mode: OrbitMode::default(),
            fibonacci_mode: FibonacciMode::default(),
        }
    }
}

impl Series {
    fn uses_orbit(&self) -> bool {
        self.source == ModelKind::Orbit || self.target == ModelKind::Orbit
    }

    fn gamma_points(&self) -> Vec<Option<f64>> {
        if self.uses_orbit() {
            self.gamma_rad.iter().copied().map(Some).collect()
        } else {
            vec![None]
        }
    }

    fn label(&self, kind: ModelKind) -> ModelLabel {
        match kind {
            ModelKind::Bpp => ModelLabel::Bpp,
            ModelKind::Nbpp => ModelLabel::Nbpp,
            ModelKind::Fibonacci => match self.fibonacci_mode {
                FibonacciMode::PaperLiteral => ModelLabel::FibonacciPaper,
                FibonacciMode::Reconciled => ModelLabel::FibonacciReconciled,
            },
            ModelKind::Orbit => match self.orbit_mode {
                OrbitMode::PaperLiteral => ModelLabel::OrbitPaper,
                OrbitMode::Reconciled => ModelLabel::OrbitReconciled,
            },
            ModelKind::OrbitTrackOracle => ModelLabel::OrbitTrackOracle,
        }
    }

    fn generate(
        &self,
        kind: ModelKind,
        n: usize,
        altitude_km: f64,
        gamma_rad: Option<f64>,
        rng: &mut RandomStream,
    ) -> Result<PointConfiguration> {
        let radius = shell_radius_km(altitude_km);
        match kind {
            ModelKind::Bpp => gen_bpp(n, radius, rng),
            ModelKind::Nbpp => gen_nbpp(n, radius, rng),
            ModelKind::Fibonacci => gen_fibonacci(n, radius, self.fibonacci_mode),
            ModelKind::Orbit => {
                let gamma = gamma_rad.ok_or_else(|| Error::Internal("orbit model without inclination".into()))?;
                let shell = OrbitShellConfig::for_total(gamma, n, self.sats_per_orbit, altitude_km, self.orbit_mode)?;
                gen_orbit(&shell, rng)
            }
            ModelKind::OrbitTrackOracle => Err(Error::Config(
                "orbit-track-oracle validates plane geometry only and cannot enter distance experiments".into(),
            )),
        }
    }

    fn validate(&self, kind: ExperimentKind, solver: Solver) -> Result<()> {
        let key = |k: &str| {
            if self.name.is_empty() {
                k.to_string()
            } else {
                format!("{}.{k}", self.name)
            }
        };
        if self.n_points.is_empty() {
            return Err(Error::ConfigKey {
                key: key("n_points"),
                reason: "at least one value is required".into(),
            });
        }
        if self.altitude_km.is_empty() {
            return Err(Error::ConfigKey {
                key: key("altitude_km"),
                reason: "at least one value is required".into(),
            });
        }
        if let Some(h) = self.altitude_km.iter().find(|h| !(h.is_finite() && **h > -crate::sphere::EARTH_RADIUS_KM)) {
            return Err(Error::ConfigKey {
                key: key("altitude_km"),
                reason: format!("{h} km is not a usable altitude"),
            });
        }
        let min_n = if kind == ExperimentKind::Tammes || self.source == ModelKind::Fibonacci || self.target == ModelKind::Fibonacci {
            2
        } else {
            1
        };
        if let Some(&n) = self.n_points.iter().find(|&&n| n < min_n) {
            return Err(Error::ConfigKey {
                key: key("n_points"),
                reason: format!("{n} is below the minimum of {min_n}"),
            });
        }
        if kind == ExperimentKind::Tammes {
            return Ok(());
        }
        for m in [self.source, self.target] {
            if m == ModelKind::OrbitTrackOracle {
                return Err(Error::ConfigKey {
                    key: key(if m == self.source { "source" } else { "target" }),
                    reason: "orbit-track-oracle cannot be used in distance experiments".into(),
                });
            }
        }
        if self.uses_orbit() {
            if self.gamma_rad.is_empty() {
                return Err(Error::ConfigKey {
                    key: key("gamma_deg"),
                    reason: "orbit models need at least one inclination".into(),
                });
            }
            if let Some(g) = self.gamma_rad.iter().find(|g| !(**g > 0.0 && **g < FRAC_PI_2)) {
                return Err(Error::InvalidInclination(*g));
            }
            if self.sats_per_orbit == 0 {
                return Err(Error::ConfigKey {
                    key: key("sats_per_orbit"),
                    reason: "must be at least 1".into(),
                });
            }
            if let Some(n) = self.n_points.iter().find(|&&n| n % self.sats_per_orbit != 0) {
                return Err(Error::Config(format!(
                    "{}: {n} points is not a multiple of {} satellites per orbit",
                    key("n_points"),
                    self.sats_per_orbit
                )));
            }
        }
        if solver.runs_exact() {
            if let Some(&n) = self.n_points.iter().find(|&&n| n > BRUTEFORCE_MAX_N) {
                return Err(Error::SizeLimit {
                    n,
                    max: BRUTEFORCE_MAX_N,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    pub series: Vec<Series>,
    pub n_iterations: usize,
    pub base_seed: u64,
    pub solver: Solver,
    pub aggregation: Aggregation,
    pub normalization: Normalization,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_iterations < 1 {
            return Err(Error::ConfigKey {
                key: "iterations".into(),
                reason: "must be at least 1".into(),
            });
        }
        if self.series.is_empty() {
            return Err(Error::Config("experiment has no series".into()));
        }
        for s in &self.series {
            s.validate(self.kind, self.solver)?;
        }
        Ok(())
    }

    /// Number of output rows [`run_experiment`] will produce.
    pub fn row_count(&self) -> usize {
        let per_solver = if self.kind == ExperimentKind::Distance && self.solver == Solver::Both {
            2
        } else {
            1
        };
        self.series
            .iter()
            .map(|s| {
                let g = if self.kind == ExperimentKind::Distance { s.gamma_points().len() } else { 1 };
                s.n_points.len() * s.altitude_km.len() * g * per_solver
            })
            .sum()
    }
}

/// One output row of a distance experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceStats {
    pub experiment: String,
    pub source_model: String,
    pub target_model: String,
    pub n_points: usize,
    pub altitude_km: f64,
    pub gamma_deg: Option<f64>,
    pub n_iterations: usize,
    pub solver: String,
    pub mean_km: f64,
    pub std_km: f64,
    pub stderr_km: f64,
    pub seed: u64,
}

/// One output row of a packing-distance sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TammesSweepRow {
    pub experiment: String,
    pub n: usize,
    pub altitude_km: f64,
    pub approx_dopt_km: f64,
    pub measured_fibonacci_dmin_km: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentOutput {
    Distance(Vec<DistanceStats>),
    Tammes(Vec<TammesSweepRow>),
}

impl ExperimentOutput {
    pub fn len(&self) -> usize {
        match self {
            ExperimentOutput::Distance(r) => r.len(),
            ExperimentOutput::Tammes(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        match self {
            ExperimentOutput::Distance(rows) => rows.iter().try_for_each(|r| w.serialize(r))?,
            ExperimentOutput::Tammes(rows) => rows.iter().try_for_each(|r| w.serialize(r))?,
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(match self {
            ExperimentOutput::Distance(rows) => serde_json::to_string_pretty(rows)?,
            ExperimentOutput::Tammes(rows) => serde_json::to_string_pretty(rows)?,
        })
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match cfg.kind {
        ExperimentKind::Distance => run_distance_experiment(cfg).map(ExperimentOutput::Distance),
        ExperimentKind::Tammes => run_tammes_experiment(cfg).map(ExperimentOutput::Tammes),
    }
}

fn experiment_label(cfg: &ExperimentConfig, series: &Series) -> String {
    if series.name.is_empty() {
        cfg.name.clone()
    } else {
        format!("{}:{}", cfg.name, series.name)
    }
}

struct IterationResult {
    greedy: Option<f64>,
    exact: Option<f64>,
}

type Pick = fn(&IterationResult) -> Option<f64>;

fn run_iteration(
    series: &Series,
    solver: Solver,
    root: &RandomStream,
    iteration: u64,
    n: usize,
    altitude_km: f64,
    gamma: Option<f64>,
) -> Result<IterationResult> {
    let stream = root.substream(iteration);
    let source = series.generate(series.source, n, altitude_km, gamma, &mut stream.substream(0))?;
    let target = series.generate(series.target, n, altitude_km, gamma, &mut stream.substream(1))?;
    let d = build_cost_matrix(&source, &target)?;
    let greedy = if solver.runs_greedy() {
        Some(greedy_match(&d)?.distance_km)
    } else {
        None
    };
    let exact = if solver.runs_exact() {
        Some(exact_assignment_poly(&d)?.distance_km)
    } else {
        None
    };
    Ok(IterationResult { greedy, exact })
}

fn aggregate(values: &[f64], aggregation: Aggregation) -> (f64, f64, f64) {
    let s = summarize(values);
    let mean = match aggregation {
        Aggregation::IterationMean => s.mean,
        Aggregation::PrintedPseudocode => {
            let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
            compensated_sum(&sq).sqrt() / values.len() as f64
        }
    };
    (mean, s.std, s.stderr)
}

/// Runs every sweep point of every series and reports mean, standard
/// deviation and standard error of the per-iteration distance.
pub fn run_distance_experiment(cfg: &ExperimentConfig) -> Result<Vec<DistanceStats>> {
    if cfg.kind != ExperimentKind::Distance {
        return Err(Error::Config(format!("`{}` is not a distance experiment", cfg.name)));
    }
    cfg.validate()?;
    let root = RandomStream::new(cfg.base_seed);
    let mut rows = Vec::with_capacity(cfg.row_count());
    for series in &cfg.series {
        for &n in &series.n_points {
            for &h in &series.altitude_km {
                for gamma in series.gamma_points() {
                    let results = (0..cfg.n_iterations as u64)
                        .into_par_iter()
                        .map(|i| run_iteration(series, cfg.solver, &root, i, n, h, gamma))
                        .collect::<Result<Vec<_>>>()?;
                    let scale = match cfg.normalization {
                        Normalization::None => 1.0,
                        Normalization::PerPoint => 1.0 / (n as f64).sqrt(),
                    };
                    let picks: [(Solver, Pick); 2] = [(Solver::Greedy, |r| r.greedy), (Solver::Exact, |r| r.exact)];
                    for (solver, pick) in picks {
                        let values: Vec<f64> = results.iter().filter_map(pick).map(|v| v * scale).collect();
                        if values.is_empty() {
                            continue;
                        }
                        let (mean_km, std_km, stderr_km) = aggregate(&values, cfg.aggregation);
                        rows.push(DistanceStats {
                            experiment: experiment_label(cfg, series),
                            source_model: series.label(series.source).to_string(),
                            target_model: series.label(series.target).to_string(),
                            n_points: n,
                            altitude_km: h,
                            gamma_deg: gamma.map(f64::to_degrees),
                            n_iterations: cfg.n_iterations,
                            solver: solver.to_string(),
                            mean_km,
                            std_km,
                            stderr_km,
                            seed: cfg.base_seed,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// One packing-distance comparison: the approximation against the measured
/// minimum distance of the Fibonacci lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TammesRow {
    pub n: usize,
    pub approx_dopt_km: f64,
    pub measured_fibonacci_dmin_km: f64,
    pub relative_error: f64,
}

pub fn tammes_row(n: usize, radius_km: f64, mode: FibonacciMode) -> Result<TammesRow> {
    let approx = tammes_approx_dopt(n, radius_km)?;
    let measured = gen_fibonacci(n, radius_km, mode)?.min_pairwise_distance()?;
    Ok(TammesRow {
        n,
        approx_dopt_km: approx,
        measured_fibonacci_dmin_km: measured,
        relative_error: (approx - measured).abs() / measured,
    })
}

pub fn run_tammes_experiment(cfg: &ExperimentConfig) -> Result<Vec<TammesSweepRow>> {
    if cfg.kind != ExperimentKind::Tammes {
        return Err(Error::Config(format!("`{}` is not a packing experiment", cfg.name)));
    }
    cfg.validate()?;
    let mut rows = Vec::new();
    for series in &cfg.series {
        for &n in &series.n_points {
            for &h in &series.altitude_km {
                let r = tammes_row(n, shell_radius_km(h), series.fibonacci_mode)?;
                rows.push(TammesSweepRow {
                    experiment: experiment_label(cfg, series),
                    n,
                    altitude_km: h,
                    approx_dopt_km: r.approx_dopt_km,
                    measured_fibonacci_dmin_km: r.measured_fibonacci_dmin_km,
                    relative_error: r.relative_error,
                });
            }
        }
    }
    Ok(rows)
}

pub const FIGURE_PRESETS: [&str; 4] = ["fig3", "fig4", "fig5", "fig6"];
pub const CONSTELLATION_PRESETS: [&str; 3] = ["starlink", "iridium", "oneweb"];

fn deg(values: &[f64]) -> Vec<f64> {
    values.iter().map(|d| d.to_radians()).collect()
}

/// Experiment configurations behind each figure, at desk scale
/// ([`DEFAULT_ITERATIONS`] iterations per point).
pub fn figure_preset(name: &str) -> Result<ExperimentConfig> {
    let base = |name: &str, kind, series, solver, normalization| ExperimentConfig {
        name: name.to_string(),
        kind,
        series,
        n_iterations: DEFAULT_ITERATIONS,
        base_seed: DEFAULT_SEED,
        solver,
        aggregation: Aggregation::IterationMean,
        normalization,
    };
    match name {
        "fig3" => Ok(base(
            "fig3",
            ExperimentKind::Distance,
            vec![Series {
                name: "bpp-vs-orbit".into(),
                source: ModelKind::Bpp,
                target: ModelKind::Orbit,
                n_points: (2..=8).collect(),
                altitude_km: vec![550.0],
                gamma_rad: deg(&[53.0]),
                sats_per_orbit: 1,
                ..Series::default()
            }],
            Solver::Both,
            Normalization::None,
        )),
        "fig4" => Ok(base(
            "fig4",
            ExperimentKind::Tammes,
            vec![Series {
                name: "fibonacci".into(),
                source: ModelKind::Fibonacci,
                target: ModelKind::Fibonacci,
                n_points: vec![50, 100, 200, 500, 1000],
                altitude_km: vec![0.0, 550.0],
                ..Series::default()
            }],
            Solver::Greedy,
            Normalization::None,
        )),
        "fig5" => {
            let ground = |name: &str, source| Series {
                name: name.into(),
                source,
                target: ModelKind::Fibonacci,
                n_points: vec![100, 200, 400, 1000],
                altitude_km: vec![0.0],
                ..Series::default()
            };
            let shell = |name: &str, source| Series {
                name: name.into(),
                source,
                target: ModelKind::Orbit,
                n_points: vec![220, 440, 880],
                altitude_km: vec![550.0],
                gamma_rad: deg(&[53.0]),
                ..Series::default()
            };
            Ok(base(
                "fig5",
                ExperimentKind::Distance,
                vec![
                    ground("bpp-vs-fibonacci", ModelKind::Bpp),
                    ground("nbpp-vs-fibonacci", ModelKind::Nbpp),
                    shell("bpp-vs-orbit", ModelKind::Bpp),
                    shell("orbit-vs-orbit", ModelKind::Orbit),
                ],
                Solver::Greedy,
                Normalization::None,
            ))
        }
        "fig6" => {
            let sweep = |name: &str, n: Vec<usize>, h: Vec<f64>, g: Vec<f64>| Series {
                name: name.into(),
                source: ModelKind::Bpp,
                target: ModelKind::Orbit,
                n_points: n,
                altitude_km: h,
                gamma_rad: deg(&g),
                orbit_mode: OrbitMode::PaperLiteral,
                ..Series::default()
            };
            Ok(base(
                "fig6",
                ExperimentKind::Distance,
                vec![
                    sweep("inclination", vec![1584], vec![550.0], vec![53.0, 70.0, 87.5]),
                    sweep("altitude", vec![1584], vec![550.0, 778.0, 1200.0], vec![53.0]),
                    sweep("constellation-size", vec![88, 704, 1584], vec![550.0], vec![53.0]),
                ],
                Solver::Greedy,
                Normalization::PerPoint,
            ))
        }
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// Orbit shells of the three reference constellations.
pub fn constellation_preset(name: &str) -> Result<OrbitShellConfig> {
    let mode = OrbitMode::default();
    match name {
        "starlink" => OrbitShellConfig::new(53f64.to_radians(), 72, 22, 550.0, mode),
        "iridium" => OrbitShellConfig::new(87.5f64.to_radians(), 9, 9, 778.0, mode),
        "oneweb" => OrbitShellConfig::new(87.5f64.to_radians(), 18, 40, 1200.0, mode),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

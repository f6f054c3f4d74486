//! TOML experiment files.
//!
//! ```toml
//! preset = "fig6"          # optional starting point
//! iterations = 200
//! seed = 7
//! gamma_deg = [53, 70]     # applies to every series unless overridden
//!
//! [[series]]               # replaces the preset's series when present
//! name = "custom"
//! source = "bpp"
//! target = "orbit"
//! n_points = 220
//! ```
//!
//! A key set inside a `[[series]]` table wins over the same key at top
//! level, which wins over the preset, which wins over built-in defaults.
//! Without `[[series]]` and without a preset, the top-level keys describe a
//! single series.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{
    figure_preset, Aggregation, ExperimentConfig, ExperimentKind, Normalization, Series, Solver,
    DEFAULT_ITERATIONS, DEFAULT_SEED,
};
use crate::generators::{FibonacciMode, OrbitMode, OrbitShellConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesKeys {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_points: Option<OneOrMany<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    altitude_km: Option<OneOrMany<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_deg: Option<OneOrMany<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_rad: Option<OneOrMany<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sats_per_orbit: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    orbit_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fibonacci_mode: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solver: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    aggregation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    normalization: Option<String>,
    // Series keys at top level. Spelled out rather than flattened because
    // serde cannot combine `flatten` with `deny_unknown_fields`.
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_points: Option<OneOrMany<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    altitude_km: Option<OneOrMany<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_deg: Option<OneOrMany<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_rad: Option<OneOrMany<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sats_per_orbit: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    orbit_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fibonacci_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    series: Option<Vec<SeriesKeys>>,
}

impl RawConfig {
    fn top_level_series(&self) -> SeriesKeys {
        SeriesKeys {
            name: None,
            source: self.source.clone(),
            target: self.target.clone(),
            n_points: self.n_points.clone(),
            altitude_km: self.altitude_km.clone(),
            gamma_deg: self.gamma_deg.clone(),
            gamma_rad: self.gamma_rad.clone(),
            sats_per_orbit: self.sats_per_orbit,
            orbit_mode: self.orbit_mode.clone(),
            fibonacci_mode: self.fibonacci_mode.clone(),
        }
    }
}

fn parse_key<T: FromStr<Err = Error>>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|e: Error| Error::ConfigKey {
        key: key.to_string(),
        reason: e.to_string(),
    })
}

fn parse_orbit_mode(key: &str, value: &str) -> Result<OrbitMode> {
    match value {
        "paper" => Ok(OrbitMode::PaperLiteral),
        "reconciled" => Ok(OrbitMode::Reconciled),
        other => Err(Error::ConfigKey {
            key: key.to_string(),
            reason: format!("unknown orbit mode `{other}` (expected paper or reconciled)"),
        }),
    }
}

fn parse_fibonacci_mode(key: &str, value: &str) -> Result<FibonacciMode> {
    match value {
        "paper" => Ok(FibonacciMode::PaperLiteral),
        "reconciled" => Ok(FibonacciMode::Reconciled),
        other => Err(Error::ConfigKey {
            key: key.to_string(),
            reason: format!("unknown Fibonacci mode `{other}` (expected paper or reconciled)"),
        }),
    }
}

pub fn orbit_mode_name(mode: OrbitMode) -> &'static str {
    match mode {
        OrbitMode::PaperLiteral => "paper",
        OrbitMode::Reconciled => "reconciled",
    }
}

pub fn fibonacci_mode_name(mode: FibonacciMode) -> &'static str {
    match mode {
        FibonacciMode::PaperLiteral => "paper",
        FibonacciMode::Reconciled => "reconciled",
    }
}

/// Applies every key present in `keys` onto `series`.
fn apply(series: &mut Series, keys: &SeriesKeys, prefix: &str) -> Result<()> {
    let key = |k: &str| format!("{prefix}{k}");
    if let Some(v) = &keys.name {
        series.name = v.clone();
    }
    if let Some(v) = &keys.source {
        series.source = parse_key(&key("source"), v)?;
    }
    if let Some(v) = &keys.target {
        series.target = parse_key(&key("target"), v)?;
    }
    if let Some(v) = &keys.n_points {
        series.n_points = v.clone().into_vec();
    }
    if let Some(v) = &keys.altitude_km {
        series.altitude_km = v.clone().into_vec();
    }
    match (&keys.gamma_deg, &keys.gamma_rad) {
        (Some(_), Some(_)) => {
            return Err(Error::ConfigKey {
                key: key("gamma_deg"),
                reason: "set either gamma_deg or gamma_rad, not both".into(),
            })
        }
        (Some(d), None) => series.gamma_rad = d.clone().into_vec().into_iter().map(f64::to_radians).collect(),
        (None, Some(r)) => series.gamma_rad = r.clone().into_vec(),
        (None, None) => {}
    }
    if let Some(v) = keys.sats_per_orbit {
        series.sats_per_orbit = v;
    }
    if let Some(v) = &keys.orbit_mode {
        series.orbit_mode = parse_orbit_mode(&key("orbit_mode"), v)?;
    }
    if let Some(v) = &keys.fibonacci_mode {
        series.fibonacci_mode = parse_fibonacci_mode(&key("fibonacci_mode"), v)?;
    }
    Ok(())
}

/// Parses and validates an experiment file.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
    let top = raw.top_level_series();

    let mut cfg = match &raw.preset {
        Some(p) => figure_preset(p)?,
        None => ExperimentConfig {
            name: "custom".into(),
            kind: ExperimentKind::Distance,
            series: Vec::new(),
            n_iterations: DEFAULT_ITERATIONS,
            base_seed: DEFAULT_SEED,
            solver: Solver::Greedy,
            aggregation: Aggregation::default(),
            normalization: Normalization::default(),
        },
    };
    if let Some(v) = &raw.name {
        cfg.name = v.clone();
    }
    if let Some(v) = &raw.kind {
        cfg.kind = parse_key("kind", v)?;
    }
    if let Some(v) = raw.iterations {
        cfg.n_iterations = v;
    }
    if let Some(v) = raw.seed {
        cfg.base_seed = v;
    }
    if let Some(v) = &raw.solver {
        cfg.solver = parse_key("solver", v)?;
    }
    if let Some(v) = &raw.aggregation {
        cfg.aggregation = parse_key("aggregation", v)?;
    }
    if let Some(v) = &raw.normalization {
        cfg.normalization = parse_key("normalization", v)?;
    }

    match &raw.series {
        Some(tables) => {
            if tables.is_empty() {
                return Err(Error::ConfigKey {
                    key: "series".into(),
                    reason: "at least one [[series]] table is required".into(),
                });
            }
            cfg.series = tables
                .iter()
                .enumerate()
                .map(|(i, keys)| {
                    let mut s = Series::default();
                    apply(&mut s, &top, "")?;
                    apply(&mut s, keys, &format!("series[{i}]."))?;
                    if s.name.is_empty() && tables.len() > 1 {
                        s.name = format!("series-{i}");
                    }
                    Ok(s)
                })
                .collect::<Result<_>>()?;
        }
        None if cfg.series.is_empty() => {
            let mut s = Series::default();
            apply(&mut s, &top, "")?;
            if top.n_points.is_none() {
                return Err(Error::ConfigKey {
                    key: "n_points".into(),
                    reason: "required when no preset or [[series]] is given".into(),
                });
            }
            cfg.series = vec![s];
        }
        None => {
            for s in &mut cfg.series {
                apply(s, &top, "")?;
            }
        }
    }

    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Renders a configuration as a self-contained TOML file that
/// [`parse_config`] reads back.
pub fn config_to_toml(cfg: &ExperimentConfig) -> Result<String> {
    let raw = RawConfig {
        name: Some(cfg.name.clone()),
        kind: Some(cfg.kind.to_string()),
        iterations: Some(cfg.n_iterations),
        seed: Some(cfg.base_seed),
        solver: Some(cfg.solver.to_string()),
        aggregation: Some(cfg.aggregation.to_string()),
        normalization: Some(cfg.normalization.to_string()),
        series: Some(
            cfg.series
                .iter()
                .map(|s| SeriesKeys {
                    name: Some(s.name.clone()),
                    source: Some(s.source.to_string()),
                    target: Some(s.target.to_string()),
                    n_points: Some(OneOrMany::Many(s.n_points.clone())),
                    altitude_km: Some(OneOrMany::Many(s.altitude_km.clone())),
                    gamma_deg: Some(OneOrMany::Many(s.gamma_rad.iter().map(|g| g.to_degrees()).collect())),
                    gamma_rad: None,
                    sats_per_orbit: Some(s.sats_per_orbit),
                    orbit_mode: Some(orbit_mode_name(s.orbit_mode).into()),
                    fibonacci_mode: Some(fibonacci_mode_name(s.fibonacci_mode).into()),
                })
                .collect(),
        ),
        ..RawConfig::default()
    };
    toml::to_string(&raw).map_err(|e| Error::Config(e.to_string()))
}

#[derive(Debug, Serialize)]
struct ConstellationToml {
    gamma_deg: f64,
    n_orbits: usize,
    sats_per_orbit: usize,
    n_points: usize,
    altitude_km: f64,
    orbit_mode: &'static str,
}

/// `[constellation.<name>]` table for an orbit shell.
pub fn constellation_to_toml(name: &str, shell: &OrbitShellConfig) -> Result<String> {
    let body = ConstellationToml {
        gamma_deg: shell.gamma_rad.to_degrees(),
        n_orbits: shell.n_orbits,
        sats_per_orbit: shell.sats_per_orbit,
        n_points: shell.n_points(),
        altitude_km: shell.altitude_km,
        orbit_mode: orbit_mode_name(shell.mode),
    };
    let mut inner = toml::Table::new();
    inner.insert(name.to_string(), toml::Value::try_from(body).map_err(|e| Error::Config(e.to_string()))?);
    let mut outer = toml::Table::new();
    outer.insert("constellation".into(), toml::Value::Table(inner));
    toml::to_string(&outer).map_err(|e| Error::Config(e.to_string()))
}

//! Point models on a sphere: homogeneous and non-homogeneous binomial point
//! processes, the Fibonacci lattice, and the orbit-shell process.
//!
//! Each sampler also exposes its inverse-CDF map from uniforms to angles so
//! the mapping can be checked at fixed inputs.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::sphere::{ModelLabel, PointConfiguration, SphericalPoint};

/// Azimuth increment of the Fibonacci spiral, `(sqrt 5 - 1) pi`.
pub const GOLDEN_AZIMUTH_STEP: f64 = 3.883_222_077_450_933;

pub const DEFAULT_SATS_PER_ORBIT: usize = 22;

fn check_count(n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(Error::InvalidCount { got: n, min })
    } else {
        Ok(())
    }
}

/// Polar angle of a homogeneous BPP point from a uniform `u` in `[0, 1]`.
pub fn bpp_polar_from_uniform(u: f64) -> f64 {
    (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos()
}

/// Uniform-on-sphere points.
pub fn gen_bpp(n: usize, radius_km: f64, rng: &mut RandomStream) -> Result<PointConfiguration> {
    check_count(n, 1)?;
    let points = (0..n)
        .map(|_| {
            let azimuth = TAU * rng.next_f64();
            let polar = bpp_polar_from_uniform(rng.next_f64());
            SphericalPoint::new(radius_km, polar, azimuth)
        })
        .collect::<Result<Vec<_>>>()?;
    PointConfiguration::new(radius_km, points, ModelLabel::Bpp)
}

/// Points with polar angle uniform on `[0, pi]`, which piles mass up at the poles.
pub fn gen_nbpp(n: usize, radius_km: f64, rng: &mut RandomStream) -> Result<PointConfiguration> {
    check_count(n, 1)?;
    let points = (0..n)
        .map(|_| {
            let azimuth = TAU * rng.next_f64();
            let polar = PI * rng.next_f64();
            SphericalPoint::new(radius_km, polar, azimuth)
        })
        .collect::<Result<Vec<_>>>()?;
    PointConfiguration::new(radius_km, points, ModelLabel::Nbpp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FibonacciMode {
    /// Two hemispheric branches; the southern branch mirrors the northern
    /// polar angles and reuses the same azimuths.
    PaperLiteral,
    /// Single spiral, `cos theta_i = 1 - (2i - 1)/N`, `phi_i = (sqrt 5 - 1) pi i`.
    #[default]
    Reconciled,
}

/// `(polar, azimuth)` of the 1-based point `i` of an `n`-point lattice.
///
/// `PaperLiteral` clamps the arccos argument into `[-1, 1]`; for odd `n` the
/// last northern point has argument `n / (n - 1)` and lands on the pole.
pub fn fibonacci_angles(i: usize, n: usize, mode: FibonacciMode) -> (f64, f64) {
    match mode {
        FibonacciMode::PaperLiteral => {
            let half = n.div_ceil(2);
            let denom = (n - 1) as f64;
            if i <= half {
                let polar = ((2 * i - 1) as f64 / denom).clamp(-1.0, 1.0).acos();
                (polar, GOLDEN_AZIMUTH_STEP * i as f64)
            } else {
                let k = i - half;
                let polar = PI - ((2 * k - 1) as f64 / denom).clamp(-1.0, 1.0).acos();
                (polar, GOLDEN_AZIMUTH_STEP * k as f64)
            }
        }
        FibonacciMode::Reconciled => {
            let z = 1.0 - (2 * i - 1) as f64 / n as f64;
            (z.clamp(-1.0, 1.0).acos(), GOLDEN_AZIMUTH_STEP * i as f64)
        }
    }
}

/// Deterministic Fibonacci lattice of `n >= 2` points.
pub fn gen_fibonacci(n: usize, radius_km: f64, mode: FibonacciMode) -> Result<PointConfiguration> {
    check_count(n, 2)?;
    let points = (1..=n)
        .map(|i| {
            let (polar, azimuth) = fibonacci_angles(i, n, mode);
            SphericalPoint::new(radius_km, polar, azimuth)
        })
        .collect::<Result<Vec<_>>>()?;
    let label = match mode {
        FibonacciMode::PaperLiteral => ModelLabel::FibonacciPaper,
        FibonacciMode::Reconciled => ModelLabel::FibonacciReconciled,
    };
    PointConfiguration::new(radius_km, points, label)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitMode {
    /// Polar angle on `[gamma, pi - gamma]` with CDF
    /// `(cos gamma - cos theta) / (2 cos gamma)`; azimuth
    /// `Omega_k +/- arcsin(clamp(tan theta / tan gamma))`.
    #[serde(rename = "paper")]
    PaperLiteral,
    /// Latitude with `sin(lat)` uniform on `[-sin gamma, sin gamma]`, placed on
    /// one of the `n_orbits` great circles of inclination `gamma`.
    #[default]
    Reconciled,
}

/// A shell of `n_orbits` equally spaced orbital planes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitShellConfig {
    pub gamma_rad: f64,
    pub n_orbits: usize,
    pub sats_per_orbit: usize,
    pub altitude_km: f64,
    pub mode: OrbitMode,
}

impl OrbitShellConfig {
    pub fn new(gamma_rad: f64, n_orbits: usize, sats_per_orbit: usize, altitude_km: f64, mode: OrbitMode) -> Result<Self> {
        let cfg = Self {
            gamma_rad,
            n_orbits,
            sats_per_orbit,
            altitude_km,
            mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Shell holding `n_points` satellites at `sats_per_orbit` per plane.
    pub fn for_total(
        gamma_rad: f64,
        n_points: usize,
        sats_per_orbit: usize,
        altitude_km: f64,
        mode: OrbitMode,
    ) -> Result<Self> {
        if sats_per_orbit == 0 || !n_points.is_multiple_of(sats_per_orbit) || n_points == 0 {
            return Err(Error::Config(format!(
                "orbit shell needs a positive number of points divisible by {sats_per_orbit} satellites per orbit, got {n_points}"
            )));
        }
        Self::new(gamma_rad, n_points / sats_per_orbit, sats_per_orbit, altitude_km, mode)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_rad > 0.0 && self.gamma_rad < FRAC_PI_2) {
            return Err(Error::InvalidInclination(self.gamma_rad));
        }
        check_count(self.n_orbits, 1)?;
        check_count(self.sats_per_orbit, 1)?;
        if !(self.altitude_km.is_finite() && self.altitude_km > -crate::sphere::EARTH_RADIUS_KM) {
            return Err(Error::Config(format!("altitude {} km is not usable", self.altitude_km)));
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        self.n_orbits * self.sats_per_orbit
    }

    pub fn radius_km(&self) -> f64 {
        crate::sphere::shell_radius_km(self.altitude_km)
    }

    /// Longitude of the ascending node of 1-based plane `k`.
    pub fn node_rad(&self, k: usize) -> f64 {
        TAU * k as f64 / self.n_orbits as f64
    }

    /// Unit normal of 1-based plane `k`.
    pub fn plane_normal(&self, k: usize) -> [f64; 3] {
        let (sin_node, cos_node) = self.node_rad(k).sin_cos();
        let (sin_g, cos_g) = self.gamma_rad.sin_cos();
        [sin_node * sin_g, -cos_node * sin_g, cos_g]
    }

    /// Smallest `|n_k . x|` over all planes for a unit vector `x`.
    pub fn plane_residual(&self, unit: [f64; 3]) -> f64 {
        (1..=self.n_orbits)
            .map(|k| {
                let n = self.plane_normal(k);
                (n[0] * unit[0] + n[1] * unit[1] + n[2] * unit[2]).abs()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Polar angle for `PaperLiteral` mode: inverse of `(cos g - cos t) / (2 cos g)`.
pub fn orbit_literal_polar_from_uniform(u: f64, gamma_rad: f64) -> f64 {
    (gamma_rad.cos() * (1.0 - 2.0 * u)).clamp(-1.0, 1.0).acos()
}

/// Offset from the node for `PaperLiteral` mode.
pub fn orbit_literal_offset(polar_rad: f64, gamma_rad: f64) -> f64 {
    (polar_rad.tan() / gamma_rad.tan()).clamp(-1.0, 1.0).asin()
}

/// Latitude for `Reconciled` mode.
pub fn orbit_reconciled_latitude_from_uniform(u: f64, gamma_rad: f64) -> f64 {
    (gamma_rad.sin() * (2.0 * u - 1.0)).clamp(-1.0, 1.0).asin()
}

/// Offset from the node of a point at `latitude` on a great circle of
/// inclination `gamma`: `sin(offset) = tan(lat) / tan(gamma)`.
pub fn orbit_reconciled_offset(latitude_rad: f64, gamma_rad: f64) -> f64 {
    (latitude_rad.tan() / gamma_rad.tan()).clamp(-1.0, 1.0).asin()
}

/// All `2 n_orbits` azimuth candidates `Omega_k +/- offset` of the
/// `PaperLiteral` law, each drawn with probability `1 / (2 n_orbits)`.
pub fn orbit_literal_azimuth_candidates(cfg: &OrbitShellConfig, polar_rad: f64) -> Vec<f64> {
    let offset = orbit_literal_offset(polar_rad, cfg.gamma_rad);
    (1..=cfg.n_orbits)
        .flat_map(|k| {
            let node = cfg.node_rad(k);
            [node + offset, node - offset]
        })
        .collect()
}

pub fn gen_orbit(cfg: &OrbitShellConfig, rng: &mut RandomStream) -> Result<PointConfiguration> {
    cfg.validate()?;
    let radius = cfg.radius_km();
    let n = cfg.n_points();
    let mut points = Vec::with_capacity(n);
    match cfg.mode {
        OrbitMode::PaperLiteral => {
            for _ in 0..n {
                let polar = orbit_literal_polar_from_uniform(rng.next_f64(), cfg.gamma_rad);
                let k = 1 + rng.next_index(cfg.n_orbits);
                let offset = orbit_literal_offset(polar, cfg.gamma_rad);
                let azimuth = if rng.next_bool() {
                    cfg.node_rad(k) + offset
                } else {
                    cfg.node_rad(k) - offset
                };
                points.push(SphericalPoint::new(radius, polar, azimuth)?);
            }
        }
        OrbitMode::Reconciled => {
            for _ in 0..n {
                let lat = orbit_reconciled_latitude_from_uniform(rng.next_f64(), cfg.gamma_rad);
                let k = 1 + rng.next_index(cfg.n_orbits);
                let offset = orbit_reconciled_offset(lat, cfg.gamma_rad);
                let azimuth = if rng.next_bool() {
                    cfg.node_rad(k) + offset
                } else {
                    cfg.node_rad(k) + PI - offset
                };
                let polar = (FRAC_PI_2 - lat).clamp(0.0, PI);
                points.push(SphericalPoint::new(radius, polar, azimuth)?);
            }
        }
    }
    let label = match cfg.mode {
        OrbitMode::PaperLiteral => ModelLabel::OrbitPaper,
        OrbitMode::Reconciled => ModelLabel::OrbitReconciled,
    };
    PointConfiguration::new(radius, points, label)
}

/// Position at argument of latitude `u` on plane `k`: the equatorial circle
/// tilted by `gamma` about the node line, then turned to `Omega_k`.
pub fn orbit_track_point(cfg: &OrbitShellConfig, k: usize, arg_latitude: f64) -> Result<SphericalPoint> {
    let (sin_u, cos_u) = arg_latitude.sin_cos();
    let (sin_g, cos_g) = cfg.gamma_rad.sin_cos();
    let (sin_n, cos_n) = cfg.node_rad(k).sin_cos();
    let (xp, yp, z) = (cos_u, sin_u * cos_g, sin_u * sin_g);
    let x = cos_n * xp - sin_n * yp;
    let y = sin_n * xp + cos_n * yp;
    let polar = z.clamp(-1.0, 1.0).acos();
    SphericalPoint::new(cfg.radius_km(), polar, y.atan2(x))
}

/// Samples planes uniformly and positions uniformly along each plane. Used
/// only to validate plane geometry; its latitude law is not the orbit model's.
pub fn gen_orbit_track_oracle(cfg: &OrbitShellConfig, rng: &mut RandomStream) -> Result<PointConfiguration> {
    cfg.validate()?;
    let points = (0..cfg.n_points())
        .map(|_| {
            let k = 1 + rng.next_index(cfg.n_orbits);
            orbit_track_point(cfg, k, TAU * rng.next_f64())
        })
        .collect::<Result<Vec<_>>>()?;
    PointConfiguration::new(cfg.radius_km(), points, ModelLabel::OrbitTrackOracle)
}

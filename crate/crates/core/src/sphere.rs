//! Spherical coordinates, the chord metric, and point configurations.
//!
//! Angles are radians throughout. Polar angle is measured from the +z axis,
//! azimuth from +x towards +y.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius used for ground-level configurations.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Radius of a shell at `altitude_km` above the surface.
pub fn shell_radius_km(altitude_km: f64) -> f64 {
    EARTH_RADIUS_KM + altitude_km
}

/// Reduce an angle into `[0, 2pi)`.
pub fn wrap_azimuth(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphericalPoint {
    radius_km: f64,
    polar_rad: f64,
    azimuth_rad: f64,
}

impl SphericalPoint {
    /// Builds a point, canonicalising the azimuth into `[0, 2pi)`.
    pub fn new(radius_km: f64, polar_rad: f64, azimuth_rad: f64) -> Result<Self> {
        if !(radius_km.is_finite() && radius_km > 0.0) {
            return Err(Error::InvalidPoint(format!("radius {radius_km} km must be positive")));
        }
        if !(0.0..=PI).contains(&polar_rad) {
            return Err(Error::InvalidPoint(format!("polar angle {polar_rad} outside [0, pi]")));
        }
        if !azimuth_rad.is_finite() {
            return Err(Error::InvalidPoint(format!("azimuth {azimuth_rad} is not finite")));
        }
        Ok(Self {
            radius_km,
            polar_rad,
            azimuth_rad: wrap_azimuth(azimuth_rad),
        })
    }

    pub fn radius_km(&self) -> f64 {
        self.radius_km
    }

    pub fn polar_rad(&self) -> f64 {
        self.polar_rad
    }

    pub fn azimuth_rad(&self) -> f64 {
        self.azimuth_rad
    }

    pub fn to_cartesian(&self) -> CartesianPoint {
        let (sin_t, cos_t) = self.polar_rad.sin_cos();
        let (sin_p, cos_p) = self.azimuth_rad.sin_cos();
        CartesianPoint {
            x_km: self.radius_km * sin_t * cos_p,
            y_km: self.radius_km * sin_t * sin_p,
            z_km: self.radius_km * cos_t,
        }
    }

    /// Unit direction of the point.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (sin_t, cos_t) = self.polar_rad.sin_cos();
        let (sin_p, cos_p) = self.azimuth_rad.sin_cos();
        [sin_t * cos_p, sin_t * sin_p, cos_t]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianPoint {
    pub x_km: f64,
    pub y_km: f64,
    pub z_km: f64,
}

impl CartesianPoint {
    pub fn norm(&self) -> f64 {
        (self.x_km * self.x_km + self.y_km * self.y_km + self.z_km * self.z_km).sqrt()
    }

    pub fn distance(&self, other: &CartesianPoint) -> f64 {
        let dx = self.x_km - other.x_km;
        let dy = self.y_km - other.y_km;
        let dz = self.z_km - other.z_km;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Inverse of [`SphericalPoint::to_cartesian`]. The origin has no direction
    /// and is rejected.
    pub fn to_spherical(&self) -> Result<SphericalPoint> {
        let r = self.norm();
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidPoint(format!("cannot convert {self:?} to spherical")));
        }
        let polar = (self.z_km / r).clamp(-1.0, 1.0).acos();
        let azimuth = self.y_km.atan2(self.x_km);
        SphericalPoint::new(r, polar, azimuth)
    }
}

/// Chord length between two points on the same shell:
/// `R * sqrt(2 (1 - cos t1 cos t2 - sin t1 sin t2 cos(p1 - p2)))`.
///
/// The bracket is evaluated as `2 sin^2(dt/2) + 2 sin t1 sin t2 sin^2(dp/2)`,
/// the same quantity without the cancellation near zero separation.
pub fn chord_distance(a: &SphericalPoint, b: &SphericalPoint) -> Result<f64> {
    if a.radius_km != b.radius_km {
        return Err(Error::RadiusMismatch {
            left: a.radius_km,
            right: b.radius_km,
        });
    }
    let half_dt = (0.5 * (a.polar_rad - b.polar_rad)).sin();
    let half_dp = (0.5 * (a.azimuth_rad - b.azimuth_rad)).sin();
    let bracket = 2.0 * (half_dt * half_dt + a.polar_rad.sin() * b.polar_rad.sin() * half_dp * half_dp);
    Ok(a.radius_km * (2.0 * bracket).max(0.0).sqrt())
}

/// Which model produced a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelLabel {
    Bpp,
    Nbpp,
    FibonacciPaper,
    FibonacciReconciled,
    OrbitPaper,
    OrbitReconciled,
    OrbitTrackOracle,
}

impl ModelLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelLabel::Bpp => "bpp",
            ModelLabel::Nbpp => "nbpp",
            ModelLabel::FibonacciPaper => "fibonacci-paper",
            ModelLabel::FibonacciReconciled => "fibonacci-reconciled",
            ModelLabel::OrbitPaper => "orbit-paper",
            ModelLabel::OrbitReconciled => "orbit-reconciled",
            ModelLabel::OrbitTrackOracle => "orbit-track-oracle",
        }
    }
}

impl fmt::Display for ModelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of the CSV / JSON point format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub radius_km: f64,
    pub polar_rad: f64,
    pub azimuth_rad: f64,
}

/// An ordered, non-empty set of points sharing one shell radius.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    radius_km: f64,
    points: Vec<SphericalPoint>,
    model: ModelLabel,
}

impl PointConfiguration {
    pub fn new(radius_km: f64, points: Vec<SphericalPoint>, model: ModelLabel) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InsufficientPoints { needed: 1, got: 0 });
        }
        if let Some(p) = points.iter().find(|p| p.radius_km != radius_km) {
            return Err(Error::RadiusMismatch {
                left: radius_km,
                right: p.radius_km,
            });
        }
        Ok(Self {
            radius_km,
            points,
            model,
        })
    }

    pub fn radius_km(&self) -> f64 {
        self.radius_km
    }

    pub fn points(&self) -> &[SphericalPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn model(&self) -> ModelLabel {
        self.model
    }

    /// Smallest chord distance over all pairs. Exact O(N^2) scan.
    pub fn min_pairwise_distance(&self) -> Result<f64> {
        let n = self.points.len();
        if n < 2 {
            return Err(Error::InsufficientPoints { needed: 2, got: n });
        }
        let units: Vec<[f64; 3]> = self.points.iter().map(|p| p.unit_vector()).collect();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let a = units[i];
            for b in &units[i + 1..] {
                let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2);
                if d2 < best {
                    best = d2;
                }
            }
        }
        Ok(self.radius_km * best.sqrt())
    }

    pub fn records(&self) -> Vec<PointRecord> {
        self.points
            .iter()
            .enumerate()
            .map(|(index, p)| PointRecord {
                index,
                radius_km: p.radius_km,
                polar_rad: p.polar_rad,
                azimuth_rad: p.azimuth_rad,
            })
            .collect()
    }

    /// Writes `index,radius_km,polar_rad,azimuth_rad` rows with a header.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for rec in self.records() {
            w.serialize(rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.records())?)
    }

    pub fn from_records(records: &[PointRecord], model: ModelLabel) -> Result<Self> {
        let first = records.first().ok_or(Error::InsufficientPoints { needed: 1, got: 0 })?;
        let points = records
            .iter()
            .map(|r| SphericalPoint::new(r.radius_km, r.polar_rad, r.azimuth_rad))
            .collect::<Result<Vec<_>>>()?;
        Self::new(first.radius_km, points, model)
    }

    pub fn read_csv<R: Read>(reader: R, model: ModelLabel) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let records = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<PointRecord>, _>>()?;
        Self::from_records(&records, model)
    }

    pub fn from_json(text: &str, model: ModelLabel) -> Result<Self> {
        let records: Vec<PointRecord> = serde_json::from_str(text)?;
        Self::from_records(&records, model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn pt(r: f64, t: f64, p: f64) -> SphericalPoint {
        SphericalPoint::new(r, t, p).unwrap()
    }

    #[test]
    fn antipodal_is_diameter() {
        let r = 6371.0;
        assert_abs_diff_eq!(chord_distance(&pt(r, 0.0, 0.0), &pt(r, PI, 0.0)).unwrap(), 2.0 * r, epsilon = 1e-9);
    }

    #[test]
    fn identical_points_are_zero_apart() {
        let a = pt(7000.0, 1.234, 5.678);
        assert_eq!(chord_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn quarter_turn_on_equator() {
        let a = pt(1.0, FRAC_PI_2, 0.0);
        let b = pt(1.0, FRAC_PI_2, FRAC_PI_2);
        let oracle = a.to_cartesian().distance(&b.to_cartesian());
        assert_abs_diff_eq!(oracle, 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(chord_distance(&a, &b).unwrap(), oracle, epsilon = 1e-12);
    }

    #[test]
    fn radius_mismatch_rejected() {
        let err = chord_distance(&pt(1.0, 0.0, 0.0), &pt(2.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::RadiusMismatch { .. }));
    }

    #[test]
    fn cartesian_axes() {
        let north = pt(42.0, 0.0, 1.0).to_cartesian();
        assert_abs_diff_eq!(north.x_km, 0.0);
        assert_abs_diff_eq!(north.y_km, 0.0);
        assert_abs_diff_eq!(north.z_km, 42.0);
        let x = pt(1.0, FRAC_PI_2, 0.0).to_cartesian();
        assert_abs_diff_eq!(x.x_km, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x.y_km, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x.z_km, 0.0, epsilon = 1e-15);
        let y = pt(1.0, FRAC_PI_2, FRAC_PI_2).to_cartesian();
        assert_abs_diff_eq!(y.x_km, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(y.y_km, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(y.z_km, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn azimuth_is_canonicalised() {
        assert_abs_diff_eq!(pt(1.0, 1.0, -FRAC_PI_2).azimuth_rad(), 1.5 * PI, epsilon = 1e-15);
        assert_abs_diff_eq!(pt(1.0, 1.0, 5.0 * PI).azimuth_rad(), PI, epsilon = 1e-12);
        assert_eq!(pt(1.0, 1.0, TAU).azimuth_rad(), 0.0);
        assert!(pt(1.0, 1.0, -1e-300).azimuth_rad() < TAU);
    }

    #[test]
    fn invalid_points_rejected() {
        assert!(SphericalPoint::new(0.0, 0.0, 0.0).is_err());
        assert!(SphericalPoint::new(-1.0, 0.0, 0.0).is_err());
        assert!(SphericalPoint::new(1.0, -0.1, 0.0).is_err());
        assert!(SphericalPoint::new(1.0, PI + 1e-9, 0.0).is_err());
        assert!(SphericalPoint::new(1.0, 0.5, f64::NAN).is_err());
    }

    #[test]
    fn min_distance_examples() {
        let r = 3.0;
        let pair = PointConfiguration::new(r, vec![pt(r, 0.0, 0.0), pt(r, PI, 0.0)], ModelLabel::Bpp).unwrap();
        assert_abs_diff_eq!(pair.min_pairwise_distance().unwrap(), 2.0 * r, epsilon = 1e-12);

        let tri = PointConfiguration::new(
            r,
            (0..3).map(|k| pt(r, FRAC_PI_2, k as f64 * TAU / 3.0)).collect(),
            ModelLabel::Bpp,
        )
        .unwrap();
        assert_abs_diff_eq!(tri.min_pairwise_distance().unwrap(), 3f64.sqrt() * r, epsilon = 1e-12);

        let single = PointConfiguration::new(r, vec![pt(r, 0.0, 0.0)], ModelLabel::Bpp).unwrap();
        assert!(matches!(
            single.min_pairwise_distance(),
            Err(Error::InsufficientPoints { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn configuration_invariants() {
        assert!(PointConfiguration::new(1.0, vec![], ModelLabel::Bpp).is_err());
        let mixed = vec![pt(1.0, 0.0, 0.0), pt(2.0, 0.0, 0.0)];
        assert!(matches!(
            PointConfiguration::new(1.0, mixed, ModelLabel::Bpp),
            Err(Error::RadiusMismatch { .. })
        ));
    }

    #[test]
    fn csv_header_and_rows() {
        let cfg = PointConfiguration::new(2.0, vec![pt(2.0, 0.5, 1.5), pt(2.0, 1.0, 0.25)], ModelLabel::Nbpp).unwrap();
        let mut buf = Vec::new();
        cfg.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("index,radius_km,polar_rad,azimuth_rad"));
        assert_eq!(lines.next(), Some("0,2.0,0.5,1.5"));
        assert_eq!(lines.count(), 1);

        let json = cfg.to_json().unwrap();
        let back = PointConfiguration::from_json(&json, ModelLabel::Nbpp).unwrap();
        assert_eq!(back, cfg);
    }
}

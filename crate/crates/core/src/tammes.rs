//! Contact-angle and nearest-neighbour-angle laws of an N-point uniform
//! process on the sphere, and the packing-distance approximation built on
//! the mean nearest-neighbour angle.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::stats::compensated_sum;

/// An angle in `[0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AngleRadians(f64);

impl AngleRadians {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=PI).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::InvalidAngle(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `P(contact angle <= theta) = 1 - ((1 + cos theta) / 2)^n`.
pub fn contact_angle_cdf(theta: AngleRadians, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidCount { got: n, min: 1 });
    }
    Ok(survival(theta, n))
}

/// `P(nearest-neighbour angle <= theta) = 1 - ((1 + cos theta) / 2)^(n - 1)`.
pub fn nearest_neighbor_cdf(theta: AngleRadians, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidCount { got: n, min: 2 });
    }
    Ok(survival(theta, n - 1))
}

fn survival(theta: AngleRadians, exponent: usize) -> f64 {
    let base = (1.0 + theta.0.cos()) / 2.0;
    let p = 1.0 - base.powf(exponent as f64);
    p.clamp(0.0, 1.0)
}

/// Mean nearest-neighbour angle, `pi * prod_{i=1}^{n-1} (2i - 1) / (2i)`.
///
/// The product is accumulated as a sum of `ln(1 - 1/(2i))`.
pub fn expected_nn_angle(n: usize) -> Result<AngleRadians> {
    if n < 2 {
        return Err(Error::InvalidCount { got: n, min: 2 });
    }
    let logs: Vec<f64> = (1..n).map(|i| (-0.5 / i as f64).ln_1p()).collect();
    Ok(AngleRadians(PI * compensated_sum(&logs).exp()))
}

/// Approximate optimal minimum distance for `n` points on a sphere of
/// radius `radius_km`: `2 R sin(E[theta_n])`.
pub fn tammes_approx_dopt(n: usize, radius_km: f64) -> Result<f64> {
    let angle = expected_nn_angle(n)?;
    Ok(2.0 * radius_km * angle.value().sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::FRAC_PI_2;

    fn a(x: f64) -> AngleRadians {
        AngleRadians::new(x).unwrap()
    }

    #[test]
    fn angle_domain() {
        assert!(AngleRadians::new(-1e-12).is_err());
        assert!(AngleRadians::new(PI + 1e-12).is_err());
        assert!(AngleRadians::new(f64::NAN).is_err());
        assert!(AngleRadians::new(PI).is_ok());
    }

    #[test]
    fn contact_cdf_examples() {
        assert_eq!(contact_angle_cdf(a(0.0), 7).unwrap(), 0.0);
        assert_eq!(contact_angle_cdf(a(PI), 7).unwrap(), 1.0);
        assert_abs_diff_eq!(contact_angle_cdf(a(FRAC_PI_2), 1).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(contact_angle_cdf(a(FRAC_PI_2), 10).unwrap(), 1.0 - 2f64.powi(-10), epsilon = 1e-15);
        assert!(matches!(contact_angle_cdf(a(1.0), 0), Err(Error::InvalidCount { .. })));
    }

    #[test]
    fn nn_cdf_examples() {
        for t in [0.0, 0.3, 1.0, 2.5, PI] {
            assert_eq!(nearest_neighbor_cdf(a(t), 2).unwrap(), contact_angle_cdf(a(t), 1).unwrap());
        }
        assert_eq!(nearest_neighbor_cdf(a(PI), 50).unwrap(), 1.0);
        assert_abs_diff_eq!(nearest_neighbor_cdf(a(PI / 3.0), 5).unwrap(), 0.683_593_75, epsilon = 1e-12);
        assert!(matches!(nearest_neighbor_cdf(a(1.0), 1), Err(Error::InvalidCount { .. })));
    }

    #[test]
    fn expected_angle_small_n() {
        assert_abs_diff_eq!(expected_nn_angle(2).unwrap().value(), FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(expected_nn_angle(3).unwrap().value(), 3.0 * PI / 8.0, epsilon = 1e-15);
        assert!(expected_nn_angle(1).is_err());
    }

    #[test]
    fn expected_angle_matches_naive_product() {
        for n in 2..=50usize {
            let naive: f64 = PI * (1..n).map(|i| (2 * i - 1) as f64 / (2 * i) as f64).product::<f64>();
            assert_relative_eq!(expected_nn_angle(n).unwrap().value(), naive, max_relative = 1e-12);
        }
    }

    #[test]
    fn expected_angle_large_n() {
        let n = 1_000_000usize;
        let got = expected_nn_angle(n).unwrap().value();
        let asym = PI / (PI * (n - 1) as f64).sqrt();
        assert!(got.is_finite() && got > 0.0);
        assert_relative_eq!(got, asym, max_relative = 1e-4);
    }

    #[test]
    fn expected_angle_strictly_decreasing() {
        let v: Vec<f64> = (2..400).map(|n| expected_nn_angle(n).unwrap().value()).collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn dopt_against_known_optima() {
        let r = 1.0;
        assert_abs_diff_eq!(tammes_approx_dopt(2, r).unwrap(), 2.0, epsilon = 1e-15);
        let d3 = tammes_approx_dopt(3, r).unwrap();
        assert_abs_diff_eq!(d3, 2.0 * (3.0 * PI / 8.0).sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(d3, 1.847_759, epsilon = 1e-6);
        // equilateral triangle on a great circle is optimal for 3 points
        assert_abs_diff_eq!(d3 / 3f64.sqrt() - 1.0, 0.0668, epsilon = 1e-3);
        let d4 = tammes_approx_dopt(4, r).unwrap();
        assert_abs_diff_eq!(d4, 2.0 * (5.0 * PI / 16.0).sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(d4, 1.662_939, epsilon = 1e-6);
        // regular tetrahedron inscribed in the unit sphere has edge sqrt(8/3)
        assert!(d4 > (8.0f64 / 3.0).sqrt());
        assert!(tammes_approx_dopt(1, r).is_err());
    }
}

//! Distributional checks of the samplers against their closed-form laws.

use std::f64::consts::{PI, TAU};

use spherical_pp::generators::{gen_bpp, gen_orbit, OrbitMode, OrbitShellConfig};
use spherical_pp::rng::RandomStream;
use spherical_pp::stats::{ks_critical_001, ks_statistic, summarize};
use spherical_pp::tammes::{contact_angle_cdf, expected_nn_angle, nearest_neighbor_cdf, AngleRadians};

fn angle_between(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    (cross[0].hypot(cross[1]).hypot(cross[2])).atan2(dot)
}

#[test]
fn bpp_azimuth_is_uniform() {
    let cfg = gen_bpp(10_000, 1.0, &mut RandomStream::new(8)).unwrap();
    let phi: Vec<f64> = cfg.points().iter().map(|p| p.azimuth_rad()).collect();
    assert!(ks_statistic(&phi, |x| x / TAU) < ks_critical_001(phi.len()));
}

#[test]
fn orbit_latitudes_follow_their_laws() {
    let gamma = 53f64.to_radians();
    for (mode, half_width) in [(OrbitMode::PaperLiteral, gamma.cos()), (OrbitMode::Reconciled, gamma.sin())] {
        let shell = OrbitShellConfig::new(gamma, 50, 200, 550.0, mode).unwrap();
        let cfg = gen_orbit(&shell, &mut RandomStream::new(21)).unwrap();
        let z: Vec<f64> = cfg.points().iter().map(|p| p.polar_rad().cos()).collect();
        let d = ks_statistic(&z, |x| ((x + half_width) / (2.0 * half_width)).clamp(0.0, 1.0));
        assert!(d < ks_critical_001(z.len()), "{mode:?}: D = {d}");
    }
}

#[test]
fn contact_angle_from_a_fixed_site() {
    let n = 20;
    let site = [0.0, 0.0, 1.0];
    let root = RandomStream::new(99);
    let samples: Vec<f64> = (0..4000)
        .map(|i| {
            let cfg = gen_bpp(n, 1.0, &mut root.substream(i)).unwrap();
            cfg.points()
                .iter()
                .map(|p| angle_between(site, p.unit_vector()))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let d = ks_statistic(&samples, |t| contact_angle_cdf(AngleRadians::new(t).unwrap(), n).unwrap());
    assert!(d < ks_critical_001(samples.len()), "D = {d}");
}

/// Nearest-neighbour angle of point 0 in each of `draws` BPP configurations.
fn nn_angles(n: usize, draws: u64, seed: u64) -> Vec<f64> {
    let root = RandomStream::new(seed);
    (0..draws)
        .map(|i| {
            let cfg = gen_bpp(n, 1.0, &mut root.substream(i)).unwrap();
            let u0 = cfg.points()[0].unit_vector();
            cfg.points()[1..]
                .iter()
                .map(|p| angle_between(u0, p.unit_vector()))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

#[test]
fn nearest_neighbour_angle_law() {
    let n = 100;
    let samples = nn_angles(n, 10_000, 5);
    let s = summarize(&samples);
    let expected = expected_nn_angle(n).unwrap().value();
    assert!((s.mean - expected).abs() < 3.0 * s.stderr, "mean {} vs {expected} (se {})", s.mean, s.stderr);

    let d = ks_statistic(&samples, |t| nearest_neighbor_cdf(AngleRadians::new(t.min(PI)).unwrap(), n).unwrap());
    assert!(d < ks_critical_001(samples.len()), "D = {d}");
}

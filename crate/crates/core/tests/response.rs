//! Frequency response of the base particle across sizes.

use ccthrust::materials::{MaterialModel, BASE_OMEGA0};
use ccthrust::polarizability::{polarizability_at, ParticleSpec, PolarizabilityModel};

/// Full width at half maximum of Im α_e around its peak, from a fine grid
/// with linear interpolation at the crossings.
fn fwhm(radius: f64, model: PolarizabilityModel) -> f64 {
    let spec = ParticleSpec::new(radius, MaterialModel::omega_particle()).unwrap();
    let n = 4001;
    let (lo, hi) = (0.5 * BASE_OMEGA0, 1.5 * BASE_OMEGA0);
    let w: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let y: Vec<f64> = w
        .iter()
        .map(|&w| polarizability_at(&spec, w, model).unwrap().alpha_e_volume().im)
        .collect();
    let (peak, &ymax) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    assert!(peak > 0 && peak < n - 1, "peak must be interior");
    let half = 0.5 * ymax;
    let cross = |i: usize, j: usize| w[i] + (half - y[i]) / (y[j] - y[i]) * (w[j] - w[i]);
    let left = (1..=peak).rev().find(|&i| y[i - 1] < half).map(|i| cross(i - 1, i)).unwrap();
    let right = (peak..n - 1).find(|&i| y[i + 1] < half).map(|i| cross(i, i + 1)).unwrap();
    right - left
}

#[test]
fn larger_sphere_has_broader_resonance() {
    let small = fwhm(10e-6, PolarizabilityModel::MieDipole);
    let large = fwhm(50e-6, PolarizabilityModel::MieDipole);
    assert!(large > small, "FWHM 50 um = {large:e}, 10 um = {small:e}");
}

#[test]
fn quasi_static_width_does_not_depend_on_size() {
    let a = fwhm(10e-6, PolarizabilityModel::QuasiStatic);
    let b = fwhm(50e-6, PolarizabilityModel::QuasiStatic);
    assert!(((a - b) / a).abs() < 1e-9);
}

//! Dipolar response of a chiral sphere: α_e, α_m and the cross term χ.
//!
//! Dipoles follow `p = α_e E + iχ H`, `m = −iχ E + α_m H` in SI units, so
//! `α_e/ε₀` and `α_m/μ₀` are volumes (m³) and `χ` carries m²·s. Internally
//! every model works with the dimensionless-field dipole matrix
//!
//! ```text
//! A = [[ α_e/ε₀,   i c χ ],
//!      [ −i c χ,   α_m/μ₀ ]]      (entries in m³)
//! ```
//!
//! which relates `(p/ε₀, m/μ₀)` to `(E, Z₀H)`.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::bessel::{riccati_psi1, riccati_xi1};
use crate::constants::{C, EPS0, MU0};
use crate::error::{Error, Result};
use crate::materials::MaterialModel;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarizabilityModel {
    QuasiStatic,
    QuasiStaticRc,
    MieDipole,
}

impl Default for PolarizabilityModel {
    fn default() -> Self {
        PolarizabilityModel::MieDipole
    }
}

impl PolarizabilityModel {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::QuasiStatic => "quasi_static",
            Self::QuasiStaticRc => "quasi_static_rc",
            Self::MieDipole => "mie_dipole",
        }
    }
}

impl FromStr for PolarizabilityModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quasistatic" | "quasi_static" => Ok(Self::QuasiStatic),
            "quasistatic-rc" | "quasi_static_rc" => Ok(Self::QuasiStaticRc),
            "mie" | "mie_dipole" => Ok(Self::MieDipole),
            other => Err(Error::Config(format!(
                "unknown polarizability model '{other}' (expected mie, quasistatic or quasistatic-rc)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParticleSpec {
    /// Sphere radius in metres.
    pub radius: f64,
    pub material: MaterialModel,
}

impl ParticleSpec {
    pub fn new(radius: f64, material: MaterialModel) -> Result<Self> {
        let spec = Self { radius, material };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::Domain(format!(
                "radius must be finite and > 0, got {}",
                self.radius
            )));
        }
        self.material.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizabilitySet {
    /// Units of ε₀·m³.
    pub alpha_e: Complex64,
    /// Units of μ₀·m³.
    pub alpha_m: Complex64,
    /// Units of m²·s.
    pub chi: Complex64,
    pub omega: f64,
    pub model: PolarizabilityModel,
}

type Mat2 = [[Complex64; 2]; 2];

impl PolarizabilitySet {
    pub fn zero(omega: f64, model: PolarizabilityModel) -> Self {
        Self {
            alpha_e: ZERO,
            alpha_m: ZERO,
            chi: ZERO,
            omega,
            model,
        }
    }

    /// Υ = α_e/ε₀ + α_m/μ₀, a complex volume in m³.
    pub fn upsilon(&self) -> Complex64 {
        self.alpha_e / EPS0 + self.alpha_m / MU0
    }

    pub fn alpha_e_volume(&self) -> Complex64 {
        self.alpha_e / EPS0
    }

    pub fn alpha_m_volume(&self) -> Complex64 {
        self.alpha_m / MU0
    }

    fn dipole_matrix(&self) -> Mat2 {
        let cross = I * self.chi * C;
        [
            [self.alpha_e / EPS0, cross],
            [-cross, self.alpha_m / MU0],
        ]
    }

    fn from_dipole_matrix(a: &Mat2, omega: f64, model: PolarizabilityModel) -> Self {
        // the cross entries are antisymmetric up to rounding; average them
        let cross = 0.5 * (a[0][1] - a[1][0]);
        Self {
            alpha_e: a[0][0] * EPS0,
            alpha_m: a[1][1] * MU0,
            chi: cross / (I * C),
            omega,
            model,
        }
    }

    /// Negative-frequency partner: α → α*, χ → −χ*.
    pub fn reflected(&self) -> Self {
        Self {
            alpha_e: self.alpha_e.conj(),
            alpha_m: self.alpha_m.conj(),
            chi: -self.chi.conj(),
            omega: -self.omega,
            model: self.model,
        }
    }
}

/// Υ of a polarizability set, m³.
pub fn upsilon(p: &PolarizabilitySet) -> Complex64 {
    p.upsilon()
}

/// Scattering coefficients of the n = 1 partial wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MieDipoleCoefficients {
    /// Electric dipole.
    pub a1: Complex64,
    /// Magnetic dipole.
    pub b1: Complex64,
    /// Electric–magnetic cross coupling.
    pub c1: Complex64,
    pub size_parameter: f64,
}

/// ω-derivatives of a polarizability set, same units per rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizabilityDerivative {
    pub d_alpha_e: Complex64,
    pub d_alpha_m: Complex64,
    pub d_chi: Complex64,
}

impl PolarizabilityDerivative {
    pub fn d_upsilon(&self) -> Complex64 {
        self.d_alpha_e / EPS0 + self.d_alpha_m / MU0
    }
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat_add(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

fn mat_scale(a: &Mat2, s: Complex64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

fn mat_inverse(a: &Mat2, omega: f64) -> Result<Mat2> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let scale = (a[0][0].norm() + a[0][1].norm()) * (a[1][0].norm() + a[1][1].norm());
    if det.norm() <= 1e-14 * scale || !det.is_finite() {
        return Err(Error::SingularMatrix { omega });
    }
    let inv = det.inv();
    Ok([
        [a[1][1] * inv, -a[0][1] * inv],
        [-a[1][0] * inv, a[0][0] * inv],
    ])
}

/// Quasi-static matrix `4πR³ (M − I)(M + 2I)⁻¹` with `M = [[ε, iκ], [−iκ, μ]]`
/// and its ω-derivative when dispersion derivatives are supplied.
fn quasi_static_matrix(
    radius: f64,
    eps: Complex64,
    mu: Complex64,
    kappa: Complex64,
    omega: f64,
) -> Result<(Mat2, Complex64)> {
    let k2 = kappa * kappa;
    let delta = (eps + 2.0) * (mu + 2.0) - k2;
    let scale = (eps.norm() + 2.0) * (mu.norm() + 2.0) + k2.norm();
    if delta.norm() <= 1e-14 * scale {
        return Err(Error::QuasiStaticPole { omega });
    }
    let v = 4.0 * PI * radius.powi(3);
    let inv = delta.inv();
    let ee = ((eps - 1.0) * (mu + 2.0) - k2) * inv * v;
    let hh = ((mu - 1.0) * (eps + 2.0) - k2) * inv * v;
    let eh = I * 3.0 * kappa * inv * v;
    Ok(([[ee, eh], [-eh, hh]], delta))
}

fn quasi_static_matrix_derivative(
    radius: f64,
    eps: Complex64,
    mu: Complex64,
    kappa: Complex64,
    d_eps: Complex64,
    d_mu: Complex64,
    d_kappa: Complex64,
    delta: Complex64,
) -> Mat2 {
    let v = 4.0 * PI * radius.powi(3);
    let k2 = kappa * kappa;
    let dk2 = 2.0 * kappa * d_kappa;
    let d_delta = d_eps * (mu + 2.0) + (eps + 2.0) * d_mu - dk2;
    let inv = delta.inv();
    let inv2 = inv * inv;
    let pe = (eps - 1.0) * (mu + 2.0) - k2;
    let dpe = d_eps * (mu + 2.0) + (eps - 1.0) * d_mu - dk2;
    let pm = (mu - 1.0) * (eps + 2.0) - k2;
    let dpm = d_mu * (eps + 2.0) + (mu - 1.0) * d_eps - dk2;
    let ee = (dpe * delta - pe * d_delta) * inv2 * v;
    let hh = (dpm * delta - pm * d_delta) * inv2 * v;
    let eh = I * 3.0 * (d_kappa * delta - kappa * d_delta) * inv2 * v;
    [[ee, eh], [-eh, hh]]
}

/// Small-sphere limit. Fails at a quasi-static pole, which only lossless
/// materials can reach.
pub fn quasi_static_polarizabilities(spec: &ParticleSpec, omega: f64) -> Result<PolarizabilitySet> {
    let s = spec.material.sample(omega)?;
    let (a, _) = quasi_static_matrix(spec.radius, s.eps, s.mu, s.kappa, omega)?;
    Ok(PolarizabilitySet::from_dipole_matrix(
        &a,
        omega,
        PolarizabilityModel::QuasiStatic,
    ))
}

/// Coupled radiation-reaction correction `A = (I − i k³/(6π) A₀)⁻¹ A₀`.
pub fn radiative_correction(p0: &PolarizabilitySet, omega: f64) -> Result<PolarizabilitySet> {
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::Domain(format!(
            "radiative correction needs omega >= 0, got {omega}"
        )));
    }
    let a0 = p0.dipole_matrix();
    let a = radiative_correction_matrix(&a0, omega)?.0;
    Ok(PolarizabilitySet::from_dipole_matrix(
        &a,
        omega,
        PolarizabilityModel::QuasiStaticRc,
    ))
}

/// Returns the corrected matrix and `M⁻¹ = (I − i s A₀)⁻¹`.
fn radiative_correction_matrix(a0: &Mat2, omega: f64) -> Result<(Mat2, Mat2)> {
    let k = omega / C;
    let s = k.powi(3) / (6.0 * PI);
    let m = [
        [Complex64::new(1.0, 0.0) - I * s * a0[0][0], -I * s * a0[0][1]],
        [-I * s * a0[1][0], Complex64::new(1.0, 0.0) - I * s * a0[1][1]],
    ];
    let m_inv = mat_inverse(&m, omega)?;
    Ok((mat_mul(&m_inv, a0), m_inv))
}

/// n = 1 coefficients of a sphere of chiral medium in vacuum.
///
/// Inside the sphere the field splits into two helicity eigenwaves with
/// indices `n± = √(εμ) ± κ` and impedance `Z = √(μ/ε)`. Matching tangential
/// `E` and `H` at `r = R` gives a 2×2 system for the outgoing TE/TM
/// amplitudes; the cross term simplifies through the Riccati–Bessel
/// Wronskian `ψξ' − ψ'ξ = i`.
pub fn mie_dipole_coefficients(spec: &ParticleSpec, omega: f64) -> Result<MieDipoleCoefficients> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::Domain(format!(
            "Mie coefficients need omega > 0, got {omega}"
        )));
    }
    let s = spec.material.sample(omega)?;
    let x = omega / C * spec.radius;

    let mut index = (s.eps * s.mu).sqrt();
    if index.re < 0.0 {
        index = -index;
    }
    let mut z = (s.mu / s.eps).sqrt();
    if z.re < 0.0 {
        z = -z;
    }
    let n_plus = index + s.kappa;
    let n_minus = index - s.kappa;

    let (a_p, b_p) = riccati_psi1(n_plus * x)?;
    let (a_m, b_m) = riccati_psi1(n_minus * x)?;
    let (psi, dpsi) = riccati_psi1(Complex64::new(x, 0.0))?;
    let (xi, dxi) = riccati_xi1(x)?;

    let w = |a: Complex64, b: Complex64, f: Complex64, df: Complex64| b * f - z * a * df;
    let v = |a: Complex64, b: Complex64, f: Complex64, df: Complex64| z * b * f - a * df;

    let w_xi_p = w(a_p, b_p, xi, dxi);
    let w_xi_m = w(a_m, b_m, xi, dxi);
    let v_xi_p = v(a_p, b_p, xi, dxi);
    let v_xi_m = v(a_m, b_m, xi, dxi);
    let w_psi_p = w(a_p, b_p, psi, dpsi);
    let w_psi_m = w(a_m, b_m, psi, dpsi);
    let v_psi_p = v(a_p, b_p, psi, dpsi);
    let v_psi_m = v(a_m, b_m, psi, dpsi);

    let det = -(w_xi_p * v_xi_m + v_xi_p * w_xi_m);
    if det.norm() == 0.0 || !det.is_finite() {
        return Err(Error::NumericFailure {
            what: "Mie boundary determinant",
            re: x,
            im: 0.0,
        });
    }
    let t_mm = (w_psi_p * v_xi_m + v_xi_p * w_psi_m) / det;
    let t_nn = (w_xi_p * v_psi_m + v_psi_p * w_xi_m) / det;
    let t_nm = -I * z * (b_p * a_m - a_p * b_m) / det;

    let coeffs = MieDipoleCoefficients {
        a1: -t_nn,
        b1: -t_mm,
        c1: -I * t_nm,
        size_parameter: x,
    };
    if !(coeffs.a1.is_finite() && coeffs.b1.is_finite() && coeffs.c1.is_finite()) {
        return Err(Error::NumericFailure {
            what: "Mie dipole coefficients",
            re: x,
            im: 0.0,
        });
    }
    Ok(coeffs)
}

fn mie_matrix(spec: &ParticleSpec, omega: f64) -> Result<Mat2> {
    let c = mie_dipole_coefficients(spec, omega)?;
    let k = omega / C;
    let f = 6.0 * PI / k.powi(3);
    let eh = I * c.c1 * f;
    Ok([[I * c.a1 * f, eh], [-eh, I * c.b1 * f]])
}

/// Dipolar polarizabilities from the n = 1 Mie coefficients:
/// `α_e/ε₀ = 6πi a₁/k³`, `α_m/μ₀ = 6πi b₁/k³`, `cχ = 6π c₁/k³`.
pub fn mie_dipole_polarizabilities(spec: &ParticleSpec, omega: f64) -> Result<PolarizabilitySet> {
    let a = mie_matrix(spec, omega)?;
    Ok(PolarizabilitySet::from_dipole_matrix(
        &a,
        omega,
        PolarizabilityModel::MieDipole,
    ))
}

fn positive_frequency(
    spec: &ParticleSpec,
    omega: f64,
    model: PolarizabilityModel,
) -> Result<PolarizabilitySet> {
    match model {
        PolarizabilityModel::QuasiStatic => quasi_static_polarizabilities(spec, omega),
        PolarizabilityModel::QuasiStaticRc => {
            let p0 = quasi_static_polarizabilities(spec, omega)?;
            radiative_correction(&p0, omega)
        }
        PolarizabilityModel::MieDipole => mie_dipole_polarizabilities(spec, omega),
    }
}

/// Single entry point for any signed frequency.
pub fn polarizability_at(
    spec: &ParticleSpec,
    omega: f64,
    model: PolarizabilityModel,
) -> Result<PolarizabilitySet> {
    if !omega.is_finite() {
        return Err(Error::Domain(format!("frequency must be finite, got {omega}")));
    }
    if omega == 0.0 {
        let mut p = quasi_static_polarizabilities(spec, 0.0)?;
        p.chi = ZERO;
        p.model = model;
        return Ok(p);
    }
    let p = positive_frequency(spec, omega.abs(), model)?;
    Ok(if omega < 0.0 { p.reflected() } else { p })
}

/// Step used for finite-difference derivatives of the Mie response: a small
/// fraction of the narrowest feature among ω itself, the resonance widths
/// and the size resonance spacing c/R.
fn mie_derivative_step(spec: &ParticleSpec, omega: f64) -> f64 {
    let mut scale = omega.min(C / spec.radius);
    for r in &spec.material.resonances {
        let width = if r.gamma > 0.0 { r.gamma } else { 1e-2 * r.omega0 };
        scale = scale.min(width);
    }
    1e-2 * scale
}

/// dα_e/dω, dα_m/dω, dχ/dω at ω > 0. Analytic for the quasi-static models,
/// Richardson-extrapolated central differences for the Mie model.
pub fn polarizability_derivative(
    spec: &ParticleSpec,
    omega: f64,
    model: PolarizabilityModel,
) -> Result<PolarizabilityDerivative> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::Domain(format!(
            "polarizability derivative needs omega > 0, got {omega}"
        )));
    }
    let d = match model {
        PolarizabilityModel::QuasiStatic | PolarizabilityModel::QuasiStaticRc => {
            let s = spec.material.sample(omega)?;
            let ds = spec.material.derivatives_unchecked(omega);
            let (a0, delta) = quasi_static_matrix(spec.radius, s.eps, s.mu, s.kappa, omega)?;
            let da0 = quasi_static_matrix_derivative(
                spec.radius,
                s.eps,
                s.mu,
                s.kappa,
                ds.d_eps,
                ds.d_mu,
                ds.d_kappa,
                delta,
            );
            if model == PolarizabilityModel::QuasiStatic {
                da0
            } else {
                // dA = M⁻¹ [dA₀ + i (ds A₀ + s dA₀) A]
                let (a, m_inv) = radiative_correction_matrix(&a0, omega)?;
                let k = omega / C;
                let s_rad = k.powi(3) / (6.0 * PI);
                let ds_rad = k * k / (2.0 * PI * C);
                let dm = mat_add(
                    &mat_scale(&a0, Complex64::new(ds_rad, 0.0)),
                    &mat_scale(&da0, Complex64::new(s_rad, 0.0)),
                );
                let inner = mat_add(&da0, &mat_scale(&mat_mul(&dm, &a), I));
                mat_mul(&m_inv, &inner)
            }
        }
        PolarizabilityModel::MieDipole => {
            let h = mie_derivative_step(spec, omega);
            let central = |h: f64| -> Result<Mat2> {
                let p = mie_matrix(spec, omega + h)?;
                let m = mie_matrix(spec, omega - h)?;
                let mut out = [[ZERO; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        out[i][j] = (p[i][j] - m[i][j]) / (2.0 * h);
                    }
                }
                Ok(out)
            };
            let coarse = central(h)?;
            let fine = central(0.5 * h)?;
            let mut out = [[ZERO; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
                }
            }
            out
        }
    };
    let as_set = PolarizabilitySet::from_dipole_matrix(&d, omega, model);
    Ok(PolarizabilityDerivative {
        d_alpha_e: as_set.alpha_e,
        d_alpha_m: as_set.alpha_m,
        d_chi: as_set.chi,
    })
}

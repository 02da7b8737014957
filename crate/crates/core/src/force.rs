//! Spectral densities and integrated thrust of a rotating chiral sphere.
//!
//! Rotation at angular velocity Ω shifts the particle-frame frequency of a
//! field mode at ω to `ω± = ω ± Ω`. Each force component is a bracket
//! `K(ω⁺) − K(ω⁻)` times a power of ω:
//!
//! * `dip_pmfl`: dipole fluctuations plus the part of the interference term
//!   driven by particle fluctuations, `(ħω⁴/3π²c³)·Im[χ(2N_{T₁} + N_{T₀})]`;
//! * `pfl_mfl`: the interference term driven by both dipole fluctuations,
//!   `−(ħω⁷/18π³c⁶)·ImΥ·Imχ·N_{T₁}`;
//! * `Efl_Hfl`: the interference term driven by field fluctuations,
//!   `(ħω⁷/18π³c⁶)·N_{T₀}(ω)·Re[Υχ*]`.
//!
//! At realistic rotation rates `Ω/ω ~ 10⁻⁸` the bracket cancels to about
//! eight digits. The direct (exact) difference is therefore taken in
//! double-double arithmetic; the kernel also offers the first-order form
//! `2Ω·dK/dω`.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::Serialize;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::double_double::Dd;
use crate::polarizability::{
    polarizability_at, polarizability_derivative, ParticleSpec, PolarizabilityModel,
};
use crate::precise::{response_at, PreciseResponse};
use crate::quadrature::{auto_breakpoints, integrate_panels, QuadratureSettings};

/// Exponent beyond which `coth` is ±1 to double precision.
const COTH_SATURATION: f64 = 350.0;

/// Auto mode switches to the exact difference once `|Ω|` exceeds this
/// fraction of the lowest resonance.
pub const AUTO_LINEARIZE_BELOW: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DiffMode {
    #[default]
    Auto,
    Exact,
    Linearized,
}

impl FromStr for DiffMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "exact" => Ok(Self::Exact),
            "linearized" => Ok(Self::Linearized),
            other => Err(Error::Config(format!(
                "unknown diff mode '{other}' (expected auto, exact or linearized)"
            ))),
        }
    }
}

/// Differencing scheme actually used for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationMode {
    Exact,
    Linearized,
}

impl EvaluationMode {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Linearized => "linearized",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunContext {
    pub particle: ParticleSpec,
    /// Rotation angular frequency, rad/s, signed.
    pub omega_rot: f64,
    /// Temperature of the surrounding field, K.
    pub t_env: f64,
    /// Temperature of the particle's dipole fluctuations, K.
    pub t_particle: f64,
    pub pol_model: PolarizabilityModel,
    pub diff_mode: DiffMode,
    pub quadrature: QuadratureSettings,
    pub constants: PhysicalConstants,
}

impl RunContext {
    /// Base particle of the given radius, Mie response, 300 K, no rotation.
    pub fn new(particle: ParticleSpec) -> Self {
        Self {
            particle,
            omega_rot: 0.0,
            t_env: 300.0,
            t_particle: 300.0,
            pol_model: PolarizabilityModel::default(),
            diff_mode: DiffMode::default(),
            quadrature: QuadratureSettings::default(),
            constants: PhysicalConstants::default(),
        }
    }

    pub fn with_rotation_hz(mut self, hz: f64) -> Self {
        self.omega_rot = 2.0 * PI * hz;
        self
    }

    pub fn with_temperature(mut self, t: f64) -> Self {
        self.t_env = t;
        self.t_particle = t;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.particle.validate()?;
        if !self.omega_rot.is_finite() {
            return Err(Error::Config(format!(
                "rotation frequency must be finite, got {}",
                self.omega_rot
            )));
        }
        for (name, t) in [("t_env", self.t_env), ("t_particle", self.t_particle)] {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::Config(format!("{name} must be finite and >= 0, got {t}")));
            }
        }
        self.quadrature.validate()
    }

    pub fn mode(&self) -> EvaluationMode {
        match self.diff_mode {
            DiffMode::Exact => EvaluationMode::Exact,
            DiffMode::Linearized => EvaluationMode::Linearized,
            DiffMode::Auto => {
                if self.omega_rot.abs() < AUTO_LINEARIZE_BELOW * self.particle.material.min_omega0()
                {
                    EvaluationMode::Linearized
                } else {
                    EvaluationMode::Exact
                }
            }
        }
    }
}

/// Force spectral densities at one field frequency, N·s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralSample {
    pub omega: f64,
    pub d_dip_pmfl: f64,
    pub d_pfl_mfl: f64,
    #[serde(rename = "d_Efl_Hfl")]
    pub d_efl_hfl: f64,
    pub d_tot: f64,
}

impl SpectralSample {
    fn new(omega: f64, d_dip_pmfl: f64, d_pfl_mfl: f64, d_efl_hfl: f64) -> Self {
        Self {
            omega,
            d_dip_pmfl,
            d_pfl_mfl,
            d_efl_hfl,
            d_tot: d_dip_pmfl + d_pfl_mfl + d_efl_hfl,
        }
    }

    fn zero(omega: f64) -> Self {
        Self::new(omega, 0.0, 0.0, 0.0)
    }
}

/// Integrated force components, N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceBreakdown {
    pub f_dip_pmfl: f64,
    pub f_int_pfl_mfl: f64,
    #[serde(rename = "f_int_Efl_Hfl")]
    pub f_int_efl_hfl: f64,
    pub f_tot: f64,
    pub est_abs_error: f64,
    pub mode_used: EvaluationMode,
    pub evaluations: usize,
    pub subdivisions: usize,
}

/// Mean photon number with zero-point term, `½·coth(ħω/2k_BT)`.
pub fn photon_number(omega: f64, temperature: f64) -> Result<f64> {
    photon_number_with(omega, temperature, &PhysicalConstants::CODATA_2018)
}

pub fn photon_number_with(omega: f64, temperature: f64, k: &PhysicalConstants) -> Result<f64> {
    if !(omega.is_finite() && temperature.is_finite() && temperature >= 0.0) {
        return Err(Error::Domain(format!(
            "photon number needs finite omega and T >= 0, got omega = {omega}, T = {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(if omega > 0.0 {
            0.5
        } else if omega < 0.0 {
            -0.5
        } else {
            0.0
        });
    }
    if omega == 0.0 {
        return Err(Error::PhotonPole { temperature });
    }
    let x = k.hbar * omega / (2.0 * k.k_b * temperature);
    if x.abs() > COTH_SATURATION {
        return Ok(0.5 * x.signum());
    }
    Ok(0.5 / x.tanh())
}

/// `dN/dω = −ħ / (4 k_B T sinh²(ħω/2k_BT))`; zero at T = 0 away from ω = 0.
pub fn photon_number_derivative(omega: f64, temperature: f64, k: &PhysicalConstants) -> Result<f64> {
    if !(omega.is_finite() && temperature.is_finite() && temperature >= 0.0) {
        return Err(Error::Domain(format!(
            "photon number needs finite omega and T >= 0, got omega = {omega}, T = {temperature}"
        )));
    }
    if omega == 0.0 {
        return Err(Error::PhotonPole { temperature });
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = k.hbar * omega / (2.0 * k.k_b * temperature);
    if x.abs() > COTH_SATURATION {
        return Ok(0.0);
    }
    let s = x.sinh();
    Ok(-k.hbar / (4.0 * k.k_b * temperature * s * s))
}

/// `(ω + Ω, ω − Ω)`.
pub fn split_frequencies(omega: f64, omega_rot: f64) -> (f64, f64) {
    (omega + omega_rot, omega - omega_rot)
}

fn prefactor_dip(omega: f64, k: &PhysicalConstants) -> f64 {
    k.hbar * omega.powi(4) / (3.0 * PI * PI * k.c.powi(3))
}

fn prefactor_int(omega: f64, k: &PhysicalConstants) -> f64 {
    k.hbar * omega.powi(7) / (18.0 * PI.powi(3) * k.c.powi(6))
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::Domain(format!("field frequency must be > 0, got {omega}")));
    }
    Ok(())
}

/// `½·coth(ħω/2k_BT)` in double-double for a non-zero signed frequency.
fn photon_number_dd(omega: Dd, temperature: f64, k: &PhysicalConstants) -> Result<Dd> {
    if temperature == 0.0 {
        return Ok(Dd::from_f64(0.5 * omega.hi.signum()));
    }
    if omega.hi == 0.0 {
        return Err(Error::PhotonPole { temperature });
    }
    let x = omega.abs() * (k.hbar / (2.0 * k.k_b * temperature));
    let n = if x.hi > COTH_SATURATION {
        Dd::from_f64(0.5)
    } else {
        // ½ + 1/(e^{2x} − 1)
        Dd::from_f64(0.5) + x.scale(2.0).exp_m1().recip()
    };
    Ok(if omega.hi < 0.0 { -n } else { n })
}

fn split_response_dd(ctx: &RunContext, shifted: Dd, temperature: f64) -> Result<(PreciseResponse, Dd)> {
    // an exact zero would put the pole of N on a node; the product χN is
    // regular there, so step just off it
    let w = if shifted.hi == 0.0 {
        Dd::from_f64(1e-9 * ctx.omega_rot.abs())
    } else {
        shifted
    };
    let p = response_at(&ctx.particle, w, ctx.pol_model)?;
    let n = photon_number_dd(w, temperature, &ctx.constants)?;
    Ok((p, n))
}

/// Direct difference of the kernels at ω⁺ and ω⁻. Both sides are evaluated
/// in double-double, so the bracket keeps about sixteen digits after the
/// cancellation and Ω → −Ω negates it bit for bit.
fn exact_sample(ctx: &RunContext, omega: f64) -> Result<SpectralSample> {
    let k = &ctx.constants;
    let wp = Dd::sum(omega, ctx.omega_rot);
    let wm = Dd::sum(omega, -ctx.omega_rot);
    let (pp, n1p) = split_response_dd(ctx, wp, ctx.t_particle)?;
    let (pm, n1m) = split_response_dd(ctx, wm, ctx.t_particle)?;
    let n0 = photon_number_with(omega, ctx.t_env, k)?;
    let n0d = Dd::from_f64(n0);

    let dip_kernel = |p: &PreciseResponse, n1: Dd| p.chi.im * (n1.scale(2.0) + n0d);
    let pfl_kernel = |p: &PreciseResponse, n1: Dd| p.upsilon.im * p.chi.im * n1;
    let efl_kernel = |p: &PreciseResponse| p.upsilon.re * p.chi.re + p.upsilon.im * p.chi.im;

    let dip = (dip_kernel(&pp, n1p) - dip_kernel(&pm, n1m)).to_f64();
    let pfl = (pfl_kernel(&pp, n1p) - pfl_kernel(&pm, n1m)).to_f64();
    let efl = (efl_kernel(&pp) - efl_kernel(&pm)).to_f64();

    let pre_int = prefactor_int(omega, k);
    Ok(SpectralSample::new(
        omega,
        prefactor_dip(omega, k) * dip,
        -pre_int * pfl,
        pre_int * n0 * efl,
    ))
}

/// First-order form: each bracket becomes `2Ω·dK/dω'` at `ω' = ω`, with
/// `N_{T₀}(ω)` held fixed.
fn linearized_sample(ctx: &RunContext, omega: f64) -> Result<SpectralSample> {
    let k = &ctx.constants;
    let p = polarizability_at(&ctx.particle, omega, ctx.pol_model)?;
    let d = polarizability_derivative(&ctx.particle, omega, ctx.pol_model)?;
    let n0 = photon_number_with(omega, ctx.t_env, k)?;
    let n1 = photon_number_with(omega, ctx.t_particle, k)?;
    let dn1 = photon_number_derivative(omega, ctx.t_particle, k)?;

    let (x, dx) = (p.chi, d.d_chi);
    let (y, dy) = (p.upsilon(), d.d_upsilon());

    let d_dip = dx.im * (2.0 * n1 + n0) + x.im * 2.0 * dn1;
    let d_pfl = (dy.im * x.im + y.im * dx.im) * n1 + y.im * x.im * dn1;
    let d_efl = (dy * x.conj() + y * dx.conj()).re;

    let twice = 2.0 * ctx.omega_rot;
    let pre_int = prefactor_int(omega, k);
    Ok(SpectralSample::new(
        omega,
        prefactor_dip(omega, k) * twice * d_dip,
        -pre_int * twice * d_pfl,
        pre_int * n0 * twice * d_efl,
    ))
}

/// All three spectral densities in the given mode.
pub fn spectral_sample(ctx: &RunContext, omega: f64, mode: EvaluationMode) -> Result<SpectralSample> {
    check_omega(omega)?;
    if ctx.omega_rot == 0.0 {
        return Ok(SpectralSample::zero(omega));
    }
    match mode {
        EvaluationMode::Exact => exact_sample(ctx, omega),
        EvaluationMode::Linearized => linearized_sample(ctx, omega),
    }
}

/// Spectral densities in the mode selected by `ctx.diff_mode`.
pub fn integrand_total(ctx: &RunContext, omega: f64) -> Result<SpectralSample> {
    spectral_sample(ctx, omega, ctx.mode())
}

pub fn integrand_dip_pmfl(ctx: &RunContext, omega: f64) -> Result<f64> {
    Ok(integrand_total(ctx, omega)?.d_dip_pmfl)
}

pub fn integrand_pfl_mfl(ctx: &RunContext, omega: f64) -> Result<f64> {
    Ok(integrand_total(ctx, omega)?.d_pfl_mfl)
}

pub fn integrand_efl_hfl(ctx: &RunContext, omega: f64) -> Result<f64> {
    Ok(integrand_total(ctx, omega)?.d_efl_hfl)
}

/// Linearized densities regardless of `ctx.diff_mode`.
pub fn linearized_integrands(ctx: &RunContext, omega: f64) -> Result<SpectralSample> {
    spectral_sample(ctx, omega, EvaluationMode::Linearized)
}

/// Spin-force coefficients
/// `γ_e = −2ω Imχ + (ω⁴/3c³ε₀) Re[α_e χ*]` and the magnetic analogue with μ₀.
pub fn spin_force_coefficients(
    spec: &ParticleSpec,
    omega: f64,
    model: PolarizabilityModel,
) -> Result<(f64, f64)> {
    check_omega(omega)?;
    let k = PhysicalConstants::CODATA_2018;
    let p = polarizability_at(spec, omega, model)?;
    let spin = -2.0 * omega * p.chi.im;
    let rad = omega.powi(4) / (3.0 * k.c.powi(3));
    let gamma_e = spin + rad / k.eps0 * (p.alpha_e * p.chi.conj()).re;
    let gamma_m = spin + rad / k.mu0 * (p.alpha_m * p.chi.conj()).re;
    Ok((gamma_e, gamma_m))
}

/// Spin-density estimate of the thrust spectrum at the unsplit frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinEstimate {
    /// `(ħω⁴/π²c³)·Imχ·N_{T₀}`.
    pub spin_term: f64,
    /// `−(ħω⁷/6π²c⁶)·Re[Υχ*]·N_{T₀}`.
    pub radiative_term: f64,
    pub total: f64,
}

pub fn estimate_integrand_eq1(ctx: &RunContext, omega: f64) -> Result<SpinEstimate> {
    check_omega(omega)?;
    let k = &ctx.constants;
    let p = polarizability_at(&ctx.particle, omega, ctx.pol_model)?;
    let n0 = photon_number_with(omega, ctx.t_env, k)?;
    let spin_term = k.hbar * omega.powi(4) / (PI * PI * k.c.powi(3)) * p.chi.im * n0;
    let radiative_term =
        -k.hbar * omega.powi(7) / (6.0 * PI * PI * k.c.powi(6)) * (p.upsilon() * p.chi.conj()).re * n0;
    Ok(SpinEstimate {
        spin_term,
        radiative_term,
        total: spin_term + radiative_term,
    })
}

/// Integration points from zero up to the spectral window (or the tail
/// start when the window is open).
pub fn integration_points(ctx: &RunContext) -> (Vec<f64>, bool) {
    let settings = &ctx.quadrature;
    let mut pts = vec![0.0];
    let bps = auto_breakpoints(ctx, settings);
    match settings.spectral_window {
        Some(window) => {
            let top = window * ctx.particle.material.max_omega0();
            pts.extend(bps.into_iter().filter(|&w| w < top));
            pts.push(top);
            (pts, false)
        }
        None => {
            pts.extend(bps);
            (pts, true)
        }
    }
}

/// Integrated force components.
pub fn compute_force(ctx: &RunContext) -> Result<ForceBreakdown> {
    ctx.validate()?;
    let mode = ctx.mode();
    if ctx.omega_rot == 0.0 {
        return Ok(ForceBreakdown {
            f_dip_pmfl: 0.0,
            f_int_pfl_mfl: 0.0,
            f_int_efl_hfl: 0.0,
            f_tot: 0.0,
            est_abs_error: 0.0,
            mode_used: mode,
            evaluations: 0,
            subdivisions: 0,
        });
    }
    let settings = ctx.quadrature;
    let (points, tail) = integration_points(ctx);
    let r = integrate_panels(
        |w| {
            let s = spectral_sample(ctx, w, mode)?;
            Ok([s.d_dip_pmfl, s.d_pfl_mfl, s.d_efl_hfl])
        },
        &points,
        tail,
        &settings,
    )?;
    let [dip, pfl, efl] = r.value;
    Ok(ForceBreakdown {
        f_dip_pmfl: dip,
        f_int_pfl_mfl: pfl,
        f_int_efl_hfl: efl,
        f_tot: dip + pfl + efl,
        est_abs_error: r.abs_error_estimate.iter().sum(),
        mode_used: mode,
        evaluations: r.evaluations,
        subdivisions: r.subdivisions,
    })
}

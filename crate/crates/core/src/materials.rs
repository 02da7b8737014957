//! Dispersive constitutive parameters of an Ω-particle chiral metamaterial.
//!
//! The medium obeys `D = ε₀ε E + i(κ/c) H` and `B = −i(κ/c) E + μ₀μ H` with
//! a sum of Lorentz terms for ε and μ and Condon terms for κ:
//!
//! ```text
//! ε(ω) = ε_b + Σ Ω_e ω₀² / L(ω)
//! μ(ω) = μ_b + Σ Ω_m ω₀² / L(ω)
//! κ(ω) =       Σ Ω_κ ω₀ ω / L(ω)
//! ```
//!
//! where the resonance denominator `L(ω)` is either `ω₀² − ω² − iγω₀`
//! (the default) or `ω₀² − ω² − iγω`. Negative frequencies are always
//! obtained from the reality conditions `ε(−ω) = ε(ω)*`, `μ(−ω) = μ(ω)*`
//! and `κ(−ω) = −κ(ω)*`, so both conventions give fields that are real in
//! the time domain.

use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Which damping term appears in the resonance denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DampingConvention {
    /// `ω₀² − ω² − iγω`, the textbook Lorentz oscillator.
    GammaOmega,
    /// `ω₀² − ω² − iγω₀`, a frequency-independent loss term.
    GammaOmega0,
}

impl Default for DampingConvention {
    fn default() -> Self {
        DampingConvention::GammaOmega0
    }
}

impl FromStr for DampingConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma_omega" => Ok(Self::GammaOmega),
            "gamma_omega0" => Ok(Self::GammaOmega0),
            other => Err(Error::Config(format!(
                "unknown damping convention '{other}' (expected gamma_omega or gamma_omega0)"
            ))),
        }
    }
}

/// One Ω-particle resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzResonance {
    /// Resonant angular frequency, rad/s.
    pub omega0: f64,
    /// Damping rate, rad/s.
    pub gamma: f64,
    pub strength_e: f64,
    pub strength_m: f64,
    /// May be negative (opposite handedness).
    pub strength_kappa: f64,
}

impl LorentzResonance {
    pub fn new(
        omega0: f64,
        gamma: f64,
        strength_e: f64,
        strength_m: f64,
        strength_kappa: f64,
    ) -> Result<Self> {
        let r = Self {
            omega0,
            gamma,
            strength_e,
            strength_m,
            strength_kappa,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::Domain(format!(
                "resonance omega0 must be finite and > 0, got {}",
                self.omega0
            )));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::Domain(format!(
                "resonance gamma must be finite and >= 0, got {}",
                self.gamma
            )));
        }
        for (name, v) in [
            ("strength_e", self.strength_e),
            ("strength_m", self.strength_m),
            ("strength_kappa", self.strength_kappa),
        ] {
            if !v.is_finite() {
                return Err(Error::Domain(format!("resonance {name} must be finite")));
            }
        }
        Ok(())
    }

    #[inline]
    fn denominator(&self, omega: f64, damping: DampingConvention) -> Complex64 {
        let loss = match damping {
            DampingConvention::GammaOmega => self.gamma * omega,
            DampingConvention::GammaOmega0 => self.gamma * self.omega0,
        };
        Complex64::new(self.omega0 * self.omega0 - omega * omega, -loss)
    }

    #[inline]
    fn denominator_derivative(&self, omega: f64, damping: DampingConvention) -> Complex64 {
        let dloss = match damping {
            DampingConvention::GammaOmega => self.gamma,
            DampingConvention::GammaOmega0 => 0.0,
        };
        Complex64::new(-2.0 * omega, -dloss)
    }
}

/// Background constants plus one or more resonances, summed term by term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaterialModel {
    pub eps_b: f64,
    pub mu_b: f64,
    pub resonances: Vec<LorentzResonance>,
    pub damping: DampingConvention,
}

/// ε, μ, κ at one signed frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSample {
    pub omega: f64,
    pub eps: Complex64,
    pub mu: Complex64,
    pub kappa: Complex64,
}

/// dε/dω, dμ/dω, dκ/dω in 1/(rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionDerivatives {
    pub d_eps: Complex64,
    pub d_mu: Complex64,
    pub d_kappa: Complex64,
}

pub const BASE_OMEGA0: f64 = 1.8713e12;
pub const BASE_GAMMA_REL: f64 = 0.05463;
pub const BASE_STRENGTH_E: f64 = 0.1560;
pub const BASE_STRENGTH_M: f64 = 0.0625;
pub const BASE_STRENGTH_KAPPA: f64 = 0.0993;
pub const BASE_EPS_B: f64 = 3.1736;
pub const BASE_MU_B: f64 = 0.9798;

impl MaterialModel {
    pub fn new(eps_b: f64, mu_b: f64, resonances: Vec<LorentzResonance>) -> Result<Self> {
        let m = Self {
            eps_b,
            mu_b,
            resonances,
            damping: DampingConvention::default(),
        };
        m.validate()?;
        Ok(m)
    }

    /// The single-resonance Ω-particle used throughout the reference results.
    pub fn omega_particle() -> Self {
        Self {
            eps_b: BASE_EPS_B,
            mu_b: BASE_MU_B,
            resonances: vec![LorentzResonance {
                omega0: BASE_OMEGA0,
                gamma: BASE_GAMMA_REL * BASE_OMEGA0,
                strength_e: BASE_STRENGTH_E,
                strength_m: BASE_STRENGTH_M,
                strength_kappa: BASE_STRENGTH_KAPPA,
            }],
            damping: DampingConvention::default(),
        }
    }

    /// Vacuum-matched sphere, useful as a null case.
    pub fn vacuum() -> Self {
        Self {
            eps_b: 1.0,
            mu_b: 1.0,
            resonances: vec![LorentzResonance {
                omega0: BASE_OMEGA0,
                gamma: 0.0,
                strength_e: 0.0,
                strength_m: 0.0,
                strength_kappa: 0.0,
            }],
            damping: DampingConvention::default(),
        }
    }

    pub fn with_damping(mut self, damping: DampingConvention) -> Self {
        self.damping = damping;
        self
    }

    /// Same material with every Ω_κ negated (mirror-image particle).
    pub fn mirrored(&self) -> Self {
        let mut m = self.clone();
        for r in &mut m.resonances {
            r.strength_kappa = -r.strength_kappa;
        }
        m
    }

    pub fn validate(&self) -> Result<()> {
        if !self.eps_b.is_finite() || !self.mu_b.is_finite() {
            return Err(Error::Domain("eps_b and mu_b must be finite".into()));
        }
        if self.resonances.is_empty() {
            return Err(Error::Domain("material needs at least one resonance".into()));
        }
        self.resonances.iter().try_for_each(LorentzResonance::validate)
    }

    pub fn min_omega0(&self) -> f64 {
        self.resonances
            .iter()
            .map(|r| r.omega0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_omega0(&self) -> f64 {
        self.resonances.iter().map(|r| r.omega0).fold(0.0, f64::max)
    }

    pub fn is_lossless(&self) -> bool {
        self.resonances.iter().all(|r| r.gamma == 0.0)
    }

    fn check_omega(omega: f64) -> Result<()> {
        if omega.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!("frequency must be finite, got {omega}")))
        }
    }

    pub fn epsilon(&self, omega: f64) -> Result<Complex64> {
        Self::check_omega(omega)?;
        Ok(self.sample_unchecked(omega).eps)
    }

    pub fn mu(&self, omega: f64) -> Result<Complex64> {
        Self::check_omega(omega)?;
        Ok(self.sample_unchecked(omega).mu)
    }

    pub fn kappa(&self, omega: f64) -> Result<Complex64> {
        Self::check_omega(omega)?;
        Ok(self.sample_unchecked(omega).kappa)
    }

    /// Fails on the resonance frequency of a lossless term.
    pub fn sample(&self, omega: f64) -> Result<DispersionSample> {
        Self::check_omega(omega)?;
        let s = self.sample_unchecked(omega);
        if !(s.eps.is_finite() && s.mu.is_finite() && s.kappa.is_finite()) {
            return Err(Error::NumericFailure {
                what: "dispersion on a lossless resonance",
                re: omega,
                im: 0.0,
            });
        }
        Ok(s)
    }

    pub(crate) fn sample_unchecked(&self, omega: f64) -> DispersionSample {
        let w = omega.abs();
        let mut eps = Complex64::new(self.eps_b, 0.0);
        let mut mu = Complex64::new(self.mu_b, 0.0);
        let mut kappa = Complex64::new(0.0, 0.0);
        for r in &self.resonances {
            let inv = r.denominator(w, self.damping).inv();
            let w0sq = r.omega0 * r.omega0;
            eps += inv * (r.strength_e * w0sq);
            mu += inv * (r.strength_m * w0sq);
            kappa += inv * (r.strength_kappa * r.omega0 * w);
        }
        if omega < 0.0 {
            DispersionSample {
                omega,
                eps: eps.conj(),
                mu: mu.conj(),
                kappa: -kappa.conj(),
            }
        } else {
            DispersionSample {
                omega,
                eps,
                mu,
                kappa,
            }
        }
    }

    /// Closed-form frequency derivatives of the rational terms, ω > 0.
    pub fn derivatives(&self, omega: f64) -> Result<DispersionDerivatives> {
        Self::check_omega(omega)?;
        if omega < 0.0 {
            return Err(Error::Domain(
                "dispersion derivatives are defined for omega >= 0".into(),
            ));
        }
        Ok(self.derivatives_unchecked(omega))
    }

    pub(crate) fn derivatives_unchecked(&self, omega: f64) -> DispersionDerivatives {
        let mut d_eps = Complex64::new(0.0, 0.0);
        let mut d_mu = Complex64::new(0.0, 0.0);
        let mut d_kappa = Complex64::new(0.0, 0.0);
        for r in &self.resonances {
            let den = r.denominator(omega, self.damping);
            let dden = r.denominator_derivative(omega, self.damping);
            let inv = den.inv();
            // d(1/L) = -L'/L^2
            let dinv = -dden * inv * inv;
            let w0sq = r.omega0 * r.omega0;
            d_eps += dinv * (r.strength_e * w0sq);
            d_mu += dinv * (r.strength_m * w0sq);
            d_kappa += (inv + dinv * omega) * (r.strength_kappa * r.omega0);
        }
        DispersionDerivatives {
            d_eps,
            d_mu,
            d_kappa,
        }
    }

    /// Parses the plain-text material grammar:
    ///
    /// ```text
    /// # comment
    /// eps_b = 3.1736
    /// mu_b = 0.9798
    /// damping = gamma_omega0          # optional
    /// resonance {
    ///     omega0_rad_s = 1.8713e12    # or omega0_hz
    ///     gamma_rel = 0.05463         # or gamma_rad_s
    ///     strength_e = 0.1560
    ///     strength_m = 0.0625
    ///     strength_kappa = 0.0993
    /// }
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        parse_material(text)
    }
}

#[derive(Default)]
struct ResonanceDraft {
    omega0: Option<f64>,
    gamma_rel: Option<f64>,
    gamma_abs: Option<f64>,
    strength_e: Option<f64>,
    strength_m: Option<f64>,
    strength_kappa: Option<f64>,
}

impl ResonanceDraft {
    fn finish(self, line: usize) -> Result<LorentzResonance> {
        let missing = |key: &str| Error::Config(format!("resonance ending on line {line}: missing {key}"));
        let omega0 = self.omega0.ok_or_else(|| missing("omega0_rad_s | omega0_hz"))?;
        let gamma = match (self.gamma_rel, self.gamma_abs) {
            (Some(rel), None) => rel * omega0,
            (None, Some(abs)) => abs,
            (Some(_), Some(_)) => {
                return Err(Error::Config(format!(
                    "resonance ending on line {line}: give gamma_rel or gamma_rad_s, not both"
                )))
            }
            (None, None) => return Err(missing("gamma_rel | gamma_rad_s")),
        };
        LorentzResonance::new(
            omega0,
            gamma,
            self.strength_e.ok_or_else(|| missing("strength_e"))?,
            self.strength_m.ok_or_else(|| missing("strength_m"))?,
            self.strength_kappa.ok_or_else(|| missing("strength_kappa"))?,
        )
        .map_err(|e| Error::Config(format!("resonance ending on line {line}: {e}")))
    }
}

fn parse_material(text: &str) -> Result<MaterialModel> {
    let mut eps_b = None;
    let mut mu_b = None;
    let mut damping = DampingConvention::default();
    let mut resonances = Vec::new();
    let mut open: Option<ResonanceDraft> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "}" {
            let draft = open
                .take()
                .ok_or_else(|| Error::Config(format!("line {lineno}: unmatched '}}'")))?;
            resonances.push(draft.finish(lineno)?);
            continue;
        }
        if let Some(rest) = line.strip_prefix("resonance") {
            if rest.trim() != "{" {
                return Err(Error::Config(format!(
                    "line {lineno}: expected 'resonance {{'"
                )));
            }
            if open.is_some() {
                return Err(Error::Config(format!(
                    "line {lineno}: nested resonance block"
                )));
            }
            open = Some(ResonanceDraft::default());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| Error::Config(format!("line {lineno}: expected key = value")))?;

        if key == "damping" {
            if open.is_some() {
                return Err(Error::Config(format!(
                    "line {lineno}: damping belongs outside resonance blocks"
                )));
            }
            damping = value.parse()?;
            continue;
        }
        let number: f64 = value.parse().map_err(|_| {
            Error::Config(format!("line {lineno}: '{value}' is not a number for {key}"))
        })?;
        match (&mut open, key) {
            (None, "eps_b") => eps_b = Some(number),
            (None, "mu_b") => mu_b = Some(number),
            (Some(d), "omega0_rad_s") => d.omega0 = Some(number),
            (Some(d), "omega0_hz") => d.omega0 = Some(2.0 * std::f64::consts::PI * number),
            (Some(d), "gamma_rel") => d.gamma_rel = Some(number),
            (Some(d), "gamma_rad_s") => d.gamma_abs = Some(number),
            (Some(d), "strength_e") => d.strength_e = Some(number),
            (Some(d), "strength_m") => d.strength_m = Some(number),
            (Some(d), "strength_kappa") => d.strength_kappa = Some(number),
            (_, other) => {
                return Err(Error::Config(format!("line {lineno}: unexpected key '{other}'")))
            }
        }
    }
    if open.is_some() {
        return Err(Error::Config("unterminated resonance block".into()));
    }
    let model = MaterialModel {
        eps_b: eps_b.ok_or_else(|| Error::Config("material file: missing eps_b".into()))?,
        mu_b: mu_b.ok_or_else(|| Error::Config("material file: missing mu_b".into()))?,
        resonances,
        damping,
    };
    model
        .validate()
        .map_err(|e| Error::Config(format!("material file: {e}")))?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn base() -> MaterialModel {
        MaterialModel::omega_particle()
    }

    #[test]
    fn static_limits() {
        let m = base().with_damping(DampingConvention::GammaOmega);
        let e = m.epsilon(0.0).unwrap();
        assert_relative_eq!(e.re, 3.3296, max_relative = 1e-15);
        assert_eq!(e.im, 0.0);
        let mu = m.mu(0.0).unwrap();
        assert_relative_eq!(mu.re, 1.0423, max_relative = 1e-15);
        assert_eq!(m.kappa(0.0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn static_limit_with_constant_damping() {
        // L(0) = ω₀²(1 − iγ/ω₀), so the Lorentz term keeps a small loss at ω = 0
        let e = base().epsilon(0.0).unwrap();
        let expected = Complex64::new(BASE_EPS_B, 0.0)
            + Complex64::new(BASE_STRENGTH_E, 0.0) / Complex64::new(1.0, -BASE_GAMMA_REL);
        assert_relative_eq!(e.re, expected.re, max_relative = 1e-15);
        assert_relative_eq!(e.im, expected.im, max_relative = 1e-14);
        assert_eq!(base().kappa(0.0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn on_resonance_values() {
        // At ω = ω₀ both conventions reduce to Ω/(−iγ/ω₀) = iΩ/0.05463.
        for damping in [DampingConvention::GammaOmega, DampingConvention::GammaOmega0] {
            let m = base().with_damping(damping);
            let e = m.epsilon(BASE_OMEGA0).unwrap();
            assert_relative_eq!(e.re, 3.1736, max_relative = 1e-12);
            assert_relative_eq!(e.im, 2.855_573_860_516_200, max_relative = 1e-12);
            let mu = m.mu(BASE_OMEGA0).unwrap();
            assert_relative_eq!(mu.re, 0.9798, max_relative = 1e-12);
            assert_relative_eq!(mu.im, 1.144_060_040_270_913, max_relative = 1e-12);
            let k = m.kappa(BASE_OMEGA0).unwrap();
            assert!(k.re.abs() < 1e-15);
            assert_relative_eq!(k.im, 1.817_682_591_982_427, max_relative = 1e-12);
            let km = m.kappa(-BASE_OMEGA0).unwrap();
            assert_relative_eq!(km.im, k.im, max_relative = 1e-15);
        }
    }

    #[test]
    fn high_frequency_tends_to_background() {
        let m = base();
        let e = m.epsilon(1e6 * BASE_OMEGA0).unwrap();
        assert!((e - Complex64::new(BASE_EPS_B, 0.0)).norm() < 1e-12);
        let mu = m.mu(1e6 * BASE_OMEGA0).unwrap();
        assert!((mu - Complex64::new(BASE_MU_B, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn non_finite_is_domain_error() {
        assert!(matches!(base().epsilon(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(base().kappa(f64::INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn lossless_resonance_is_reported() {
        let mut m = base();
        m.resonances[0].gamma = 0.0;
        let w0 = m.resonances[0].omega0;
        assert!(matches!(m.sample(w0), Err(Error::NumericFailure { .. })));
        assert!(m.sample(1.01 * w0).is_ok());
    }

    #[test]
    fn kappa_slope_at_origin() {
        let m = base();
        let d = m.derivatives(0.0).unwrap();
        let r = m.resonances[0];
        // L(0) = ω₀² − iγω₀ under the default convention
        let expected = Complex64::new(r.strength_kappa * r.omega0, 0.0)
            / Complex64::new(r.omega0 * r.omega0, -r.gamma * r.omega0);
        assert_relative_eq!(d.d_kappa.re, expected.re, max_relative = 1e-14);
        assert_relative_eq!(d.d_kappa.im, expected.im, max_relative = 1e-14);

        let lossless = MaterialModel {
            resonances: vec![LorentzResonance { gamma: 0.0, ..r }],
            ..m
        };
        let d = lossless.derivatives(0.0).unwrap();
        assert_relative_eq!(d.d_kappa.re, r.strength_kappa / r.omega0, max_relative = 1e-15);
        assert_eq!(d.d_kappa.im, 0.0);
    }

    #[test]
    fn derivatives_vanish_far_above_resonance() {
        let d = base().derivatives(1e8 * BASE_OMEGA0).unwrap();
        assert!(d.d_eps.norm() * BASE_OMEGA0 < 1e-20);
    }

    #[test]
    fn derivatives_match_central_differences() {
        for damping in [DampingConvention::GammaOmega, DampingConvention::GammaOmega0] {
            let m = base().with_damping(damping);
            for i in 0..=60 {
                let w = BASE_OMEGA0 * 10f64.powf(-3.0 + 6.0 * i as f64 / 60.0);
                let d = m.derivatives(w).unwrap();
                let central = |h: f64| {
                    let (p, q) = (m.sample(w + h).unwrap(), m.sample(w - h).unwrap());
                    [
                        (p.eps - q.eps) / (2.0 * h),
                        (p.mu - q.mu) / (2.0 * h),
                        (p.kappa - q.kappa) / (2.0 * h),
                    ]
                };
                let r = m.resonances[0];
                let h = 1e-2 * w.min(r.gamma.max((w - r.omega0).abs()));
                let (coarse, fine) = (central(h), central(0.5 * h));
                let fd: Vec<Complex64> =
                    (0..3).map(|k| (4.0 * fine[k] - coarse[k]) / 3.0).collect();
                for (an, num) in [d.d_eps, d.d_mu, d.d_kappa].iter().zip(fd) {
                    let rel = (an - num).norm() / an.norm();
                    assert!(rel < 1e-6, "w = {w:e}: rel = {rel:e}");
                }
            }
        }
    }

    #[test]
    fn parses_material_file() {
        let text = "\
# base particle, written two ways
eps_b = 3.1736
mu_b = 0.9798
resonance {
    omega0_rad_s = 1.8713e12
    gamma_rel = 0.05463
    strength_e = 0.1560
    strength_m = 0.0625
    strength_kappa = 0.0993
}
resonance {
    omega0_hz = 1e12
    gamma_rad_s = 1e10
    strength_e = 0.0
    strength_m = 0.0
    strength_kappa = -0.01
}
";
        let m = MaterialModel::parse(text).unwrap();
        assert_eq!(m.resonances.len(), 2);
        assert_eq!(m.resonances[0], base().resonances[0]);
        assert_relative_eq!(m.resonances[1].omega0, 2.0 * std::f64::consts::PI * 1e12);
        assert_eq!(m.resonances[1].gamma, 1e10);
        assert_eq!(m.damping, DampingConvention::GammaOmega0);
    }

    #[test]
    fn material_file_errors_name_the_problem() {
        let err = MaterialModel::parse("mu_b = 1\nresonance {\n}\n").unwrap_err();
        assert!(err.to_string().contains("missing omega0"), "{err}");
        let err = MaterialModel::parse("eps_b = 1\nmu_b = 1\n").unwrap_err();
        assert!(err.to_string().contains("at least one resonance"), "{err}");
        let err = MaterialModel::parse("eps_b = x\n").unwrap_err();
        assert!(err.to_string().contains("not a number"), "{err}");
        let err = MaterialModel::parse("eps_b = 1\nmu_b = 1\ndamping = sideways\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }
}

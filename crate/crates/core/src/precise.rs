//! Υ and χ in double-double precision, for the direct difference of the
//! force kernels at ω ± Ω.
//!
//! The formulas are the ones of [`crate::polarizability`]; only the
//! arithmetic changes. Physical constants and material parameters enter as
//! exact doubles, so the extended evaluation describes the same model and
//! only the rounding of intermediate steps shrinks.

use std::f64::consts::PI;

use crate::constants::C;
use crate::double_double::{Cdd, Dd};
use crate::error::{Error, Result};
use crate::materials::{DampingConvention, MaterialModel};
use crate::polarizability::{ParticleSpec, PolarizabilityModel};

/// Below this |z| the Riccati–Bessel function comes from its series.
const SERIES_BELOW: f64 = 1e-3;

/// Υ (m³) and χ (m²·s) at one signed frequency.
#[derive(Debug, Clone, Copy)]
pub struct PreciseResponse {
    pub upsilon: Cdd,
    pub chi: Cdd,
}

type Mat2 = [[Cdd; 2]; 2];

struct Dispersion {
    eps: Cdd,
    mu: Cdd,
    kappa: Cdd,
}

fn dispersion(m: &MaterialModel, w: Dd) -> Dispersion {
    let mut eps = Cdd::real(Dd::from_f64(m.eps_b));
    let mut mu = Cdd::real(Dd::from_f64(m.mu_b));
    let mut kappa = Cdd::ZERO;
    for r in &m.resonances {
        let loss = match m.damping {
            DampingConvention::GammaOmega => w * r.gamma,
            DampingConvention::GammaOmega0 => Dd::product(r.gamma, r.omega0),
        };
        let w0sq = Dd::product(r.omega0, r.omega0);
        let inv = Cdd::new(w0sq - w.sqr(), -loss).recip();
        eps = eps + inv * (w0sq * r.strength_e);
        mu = mu + inv * (w0sq * r.strength_m);
        kappa = kappa + inv * (w * Dd::product(r.strength_kappa, r.omega0));
    }
    Dispersion { eps, mu, kappa }
}

fn quasi_static_matrix(radius: f64, d: &Dispersion, omega: f64) -> Result<Mat2> {
    let two = Dd::from_f64(2.0);
    let one = Dd::ONE;
    let k2 = d.kappa * d.kappa;
    let delta = (d.eps + two) * (d.mu + two) - k2;
    let scale = (d.eps.norm_f64() + 2.0) * (d.mu.norm_f64() + 2.0) + k2.norm_f64();
    if delta.norm_f64() <= 1e-14 * scale {
        return Err(Error::QuasiStaticPole { omega });
    }
    let v = Dd::from_f64(4.0 * PI * radius.powi(3));
    let inv = delta.recip() * v;
    let ee = ((d.eps - one) * (d.mu + two) - k2) * inv;
    let hh = ((d.mu - one) * (d.eps + two) - k2) * inv;
    let eh = (d.kappa * inv).mul_i() * Dd::from_f64(3.0);
    Ok([[ee, eh], [-eh, hh]])
}

fn radiative_correction(a0: &Mat2, w: Dd, omega: f64) -> Result<Mat2> {
    let k = w / C;
    let s = k.powi(3) / (6.0 * PI);
    let is = Cdd::new(Dd::ZERO, s);
    let m = [
        [Cdd::ONE - is * a0[0][0], -(is * a0[0][1])],
        [-(is * a0[1][0]), Cdd::ONE - is * a0[1][1]],
    ];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = (m[0][0].norm_f64() + m[0][1].norm_f64()) * (m[1][0].norm_f64() + m[1][1].norm_f64());
    if det.norm_f64() <= 1e-14 * scale || !det.is_finite() {
        return Err(Error::SingularMatrix { omega });
    }
    let inv = det.recip();
    let mi = [
        [m[1][1] * inv, -(m[0][1] * inv)],
        [-(m[1][0] * inv), m[0][0] * inv],
    ];
    let mut out = [[Cdd::ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = mi[i][0] * a0[0][j] + mi[i][1] * a0[1][j];
        }
    }
    Ok(out)
}

/// `(sin z, cos z)·e^{−|Im z|}`, finite for any z.
fn sin_cos_scaled(z: Cdd) -> (Cdd, Cdd) {
    let (s, c) = z.re.sin_cos();
    let b = z.im;
    let two_b = b.abs().scale(2.0);
    // e^{−|b|}cosh b = (1 + e^{−2|b|})/2, e^{−|b|}sinh b = ±(1 − e^{−2|b|})/2
    let em = (-two_b).exp_m1();
    let ch = (em + Dd::from_f64(2.0)).scale(0.5);
    let mut sh = (-em).scale(0.5);
    if b.hi < 0.0 {
        sh = -sh;
    }
    (Cdd::new(s * ch, c * sh), Cdd::new(c * ch, -(s * sh)))
}

/// `ψ₁(z)` and `ψ₁'(z)` up to a common factor.
fn riccati_psi1_scaled(z: Cdd) -> (Cdd, Cdd) {
    if z.norm_f64() < SERIES_BELOW {
        // ψ = z²/3 − z⁴/30 + z⁶/840 − z⁸/45360
        let z2 = z * z;
        let denominators = [3.0, -30.0, 840.0, -45360.0];
        let mut psi = Cdd::ZERO;
        let mut dpsi = Cdd::ZERO;
        let mut p = z2;
        let mut dp = z;
        for (n, &den) in denominators.iter().enumerate() {
            let c = Dd::ONE / Dd::from_f64(den);
            psi = psi + p * c;
            dpsi = dpsi + dp * (c * (2 * n + 2) as f64);
            p = p * z2;
            dp = dp * z2;
        }
        return (psi, dpsi);
    }
    let (s, c) = sin_cos_scaled(z);
    let zi = z.recip();
    let psi = s * zi - c;
    (psi, s - psi * zi)
}

/// `ξ₁(x)` and `ξ₁'(x)` for real x > 0.
fn riccati_xi1(x: Dd) -> (Cdd, Cdd) {
    let (s, c) = x.sin_cos();
    let xi_ = x.recip();
    let psi = s * xi_ - c;
    let dpsi = s - psi * xi_;
    // x y₁(x) = −cos x/x − sin x, and its derivative
    let chi = -(c * xi_) - s;
    let dchi = -(chi * xi_) - c;
    (Cdd::new(psi, chi), Cdd::new(dpsi, dchi))
}

fn principal_root(z: Cdd) -> Cdd {
    let r = z.sqrt();
    if r.re.hi < 0.0 {
        -r
    } else {
        r
    }
}

fn mie_matrix(spec: &ParticleSpec, d: &Dispersion, w: Dd) -> Result<Mat2> {
    let x = w * spec.radius / C;
    let index = principal_root(d.eps * d.mu);
    let z = principal_root(d.mu / d.eps);
    let n_plus = index + d.kappa;
    let n_minus = index - d.kappa;

    let (a_p, b_p) = riccati_psi1_scaled(n_plus * x);
    let (a_m, b_m) = riccati_psi1_scaled(n_minus * x);
    let (psi, dpsi) = riccati_psi1_scaled(Cdd::real(x));
    let (xi, dxi) = riccati_xi1(x);

    let wf = |a: Cdd, b: Cdd, f: Cdd, df: Cdd| b * f - z * a * df;
    let vf = |a: Cdd, b: Cdd, f: Cdd, df: Cdd| z * b * f - a * df;

    let w_xi_p = wf(a_p, b_p, xi, dxi);
    let w_xi_m = wf(a_m, b_m, xi, dxi);
    let v_xi_p = vf(a_p, b_p, xi, dxi);
    let v_xi_m = vf(a_m, b_m, xi, dxi);
    let w_psi_p = wf(a_p, b_p, psi, dpsi);
    let w_psi_m = wf(a_m, b_m, psi, dpsi);
    let v_psi_p = vf(a_p, b_p, psi, dpsi);
    let v_psi_m = vf(a_m, b_m, psi, dpsi);

    let det = -(w_xi_p * v_xi_m + v_xi_p * w_xi_m);
    if det.norm_f64() == 0.0 || !det.is_finite() {
        return Err(Error::NumericFailure {
            what: "Mie boundary determinant",
            re: x.to_f64(),
            im: 0.0,
        });
    }
    let inv = det.recip();
    let t_mm = (w_psi_p * v_xi_m + v_xi_p * w_psi_m) * inv;
    let t_nn = (w_xi_p * v_psi_m + v_psi_p * w_xi_m) * inv;
    let t_nm = -(z * (b_p * a_m - a_p * b_m) * inv).mul_i();

    // α_e/ε₀ = 6πi a₁/k³ with a₁ = −t_nn, and likewise for the others
    let k = w / C;
    let f = Dd::from_f64(6.0 * PI) / k.powi(3);
    let a1 = -t_nn;
    let b1 = -t_mm;
    let c1 = -t_nm.mul_i();
    let eh = c1.mul_i() * f;
    let out = [[a1.mul_i() * f, eh], [-eh, b1.mul_i() * f]];
    if !out.iter().flatten().all(|c| c.is_finite()) {
        return Err(Error::NumericFailure {
            what: "Mie dipole coefficients",
            re: x.to_f64(),
            im: 0.0,
        });
    }
    Ok(out)
}

/// Response at a signed, non-zero frequency given in double-double.
pub fn response_at(spec: &ParticleSpec, omega: Dd, model: PolarizabilityModel) -> Result<PreciseResponse> {
    let approx = omega.to_f64();
    if !(omega.is_finite() && approx != 0.0) {
        return Err(Error::Domain(format!(
            "extended response needs a finite non-zero frequency, got {approx}"
        )));
    }
    let w = omega.abs();
    let d = dispersion(&spec.material, w);
    if !(d.eps.is_finite() && d.mu.is_finite() && d.kappa.is_finite()) {
        return Err(Error::NumericFailure {
            what: "dispersion on a lossless resonance",
            re: approx,
            im: 0.0,
        });
    }
    let a = match model {
        PolarizabilityModel::QuasiStatic => quasi_static_matrix(spec.radius, &d, approx)?,
        PolarizabilityModel::QuasiStaticRc => {
            let a0 = quasi_static_matrix(spec.radius, &d, approx)?;
            radiative_correction(&a0, w, approx)?
        }
        PolarizabilityModel::MieDipole => mie_matrix(spec, &d, w)?,
    };
    let upsilon = a[0][0] + a[1][1];
    // χ = (A_eh − A_he)/(2ic)
    let chi = Cdd::new(Dd::ZERO, -(Dd::ONE / (2.0 * C))) * (a[0][1] - a[1][0]);
    Ok(if approx < 0.0 {
        PreciseResponse {
            upsilon: upsilon.conj(),
            chi: -chi.conj(),
        }
    } else {
        PreciseResponse { upsilon, chi }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarizability::polarizability_at;

    fn spec(radius: f64) -> ParticleSpec {
        ParticleSpec::new(radius, MaterialModel::omega_particle()).unwrap()
    }

    #[test]
    fn agrees_with_double_precision() {
        let w0 = MaterialModel::omega_particle().min_omega0();
        for model in [
            PolarizabilityModel::QuasiStatic,
            PolarizabilityModel::QuasiStaticRc,
            PolarizabilityModel::MieDipole,
        ] {
            for r in [5e-8, 5e-6] {
                for f in [0.3, 0.97, 1.0, 2.5, -1.1] {
                    let w = f * w0;
                    let s = spec(r);
                    let p = polarizability_at(&s, w, model).unwrap();
                    let q = response_at(&s, Dd::from_f64(w), model).unwrap();
                    let (y, x) = (p.upsilon(), p.chi);
                    assert!((q.upsilon.to_c64() - y).norm() <= 1e-11 * y.norm(), "{model:?} {r} {f}");
                    assert!((q.chi.to_c64() - x).norm() <= 1e-11 * x.norm(), "{model:?} {r} {f}");
                }
            }
        }
    }

    #[test]
    fn large_sphere_does_not_overflow() {
        let w0 = MaterialModel::omega_particle().min_omega0();
        let q = response_at(&spec(1e-3), Dd::from_f64(w0), PolarizabilityModel::MieDipole).unwrap();
        assert!(q.upsilon.is_finite() && q.chi.is_finite());
    }

    #[test]
    fn series_branch_is_continuous() {
        let z = |x: f64| Cdd::new(Dd::from_f64(x), Dd::from_f64(0.3 * x));
        let (a, da) = riccati_psi1_scaled(z(0.999e-3));
        let (b, db) = riccati_psi1_scaled(z(1.001e-3));
        // ψ ∝ z², so the ratio over the step is about (1.001/0.999)²
        let ratio = (b / a).to_c64();
        let expected = (1.001f64 / 0.999).powi(2);
        assert!((ratio.re - expected).abs() < 1e-6 && ratio.im.abs() < 1e-6);
        let dratio = (db / da).to_c64();
        assert!((dratio.re - 1.001 / 0.999).abs() < 1e-6);
    }

    #[test]
    fn zero_frequency_is_rejected() {
        assert!(response_at(&spec(5e-8), Dd::ZERO, PolarizabilityModel::MieDipole).is_err());
    }
}

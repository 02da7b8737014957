//! Low-order spherical Bessel and Riccati–Bessel functions.
//!
//! For `|z|` up to a few tens, `j_n` at complex argument comes from Miller's
//! downward recurrence, normalised against the closed forms of `j_0` or `j_1`
//! (whichever is larger, so the normalisation never divides by a value close
//! to a zero). This keeps full relative accuracy for small `|z|`, where
//! `sin z / z² − cos z / z` cancels. Beyond that the closed forms are used. `y_n` at real argument uses the closed forms, which are stable
//! upward.

use num_complex::Complex64;

use crate::error::{Error, Result};

const RESCALE_ABOVE: f64 = 1e100;

/// Below this |z| both functions come from their Maclaurin series.
const SERIES_BELOW: f64 = 1e-4;

/// Above this |z| the closed forms are used directly; the recurrence is
/// only needed where they cancel.
const RECURRENCE_BELOW: f64 = 30.0;

/// Largest |Im z| accepted before `sin z` overflows.
const MAX_IMAG: f64 = 700.0;

fn j0_closed(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_BELOW {
        let z2 = z * z;
        // 1 − z²/6 + z⁴/120
        Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

fn j1_closed(z: Complex64) -> Complex64 {
    (z.sin() / z - z.cos()) / z
}

/// Returns `(j_0(z), j_1(z))`.
pub fn spherical_j01(z: Complex64) -> Result<(Complex64, Complex64)> {
    if !(z.re.is_finite() && z.im.is_finite()) || z.im.abs() > MAX_IMAG {
        return Err(Error::NumericFailure {
            what: "spherical j_n",
            re: z.re,
            im: z.im,
        });
    }
    let a = z.norm();
    if a < SERIES_BELOW {
        let z2 = z * z;
        // z/3 − z³/30 + z⁵/840
        let j1 = z * (Complex64::new(1.0 / 3.0, 0.0) - z2 / 30.0 + z2 * z2 / 840.0);
        return Ok((j0_closed(z), j1));
    }
    if a >= RECURRENCE_BELOW {
        let (j0, j1) = (j0_closed(z), j1_closed(z));
        return if j0.is_finite() && j1.is_finite() {
            Ok((j0, j1))
        } else {
            Err(Error::NumericFailure {
                what: "spherical j_n",
                re: z.re,
                im: z.im,
            })
        };
    }
    let start = (a + 4.0 * a.cbrt() + 20.0).ceil() as usize;

    // j_{n-1} = (2n+1)/z j_n − j_{n+1}, seeded with j_{start+1} = 0.
    let inv_z = z.inv();
    let mut upper = Complex64::new(0.0, 0.0);
    let mut current = Complex64::new(1e-30, 0.0);
    for n in (1..=start).rev() {
        let lower = inv_z * (2 * n + 1) as f64 * current - upper;
        upper = current;
        current = lower;
        if current.norm() > RESCALE_ABOVE {
            upper /= RESCALE_ABOVE;
            current /= RESCALE_ABOVE;
        }
    }
    // `current` now holds j_0 and `upper` holds j_1, both unnormalised
    let (j0_raw, j1_raw) = (current, upper);

    let j0c = j0_closed(z);
    let scale = if a < 1.0 {
        j0c / j0_raw
    } else {
        let j1c = j1_closed(z);
        if j0c.norm() >= j1c.norm() {
            j0c / j0_raw
        } else {
            j1c / j1_raw
        }
    };
    let (j0, j1) = (j0_raw * scale, j1_raw * scale);
    if !(j0.re.is_finite() && j0.im.is_finite() && j1.re.is_finite() && j1.im.is_finite()) {
        return Err(Error::NumericFailure {
            what: "spherical j_n",
            re: z.re,
            im: z.im,
        });
    }
    Ok((j0, j1))
}

/// Returns `(y_0(x), y_1(x))` for real `x > 0`.
pub fn spherical_y01(x: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    let y0 = -c / x;
    let y1 = (y0 - s) / x;
    (y0, y1)
}

/// Riccati–Bessel `ψ₁(z) = z j₁(z)` and its derivative `ψ₁'(z) = z j₀ − j₁`.
pub fn riccati_psi1(z: Complex64) -> Result<(Complex64, Complex64)> {
    let (j0, j1) = spherical_j01(z)?;
    Ok((z * j1, z * j0 - j1))
}

/// Riccati–Hankel `ξ₁(x) = x h₁⁽¹⁾(x)` and `ξ₁'(x)` for real `x > 0`.
pub fn riccati_xi1(x: f64) -> Result<(Complex64, Complex64)> {
    let (j0, j1) = spherical_j01(Complex64::new(x, 0.0))?;
    let (y0, y1) = spherical_y01(x);
    let h0 = Complex64::new(j0.re, y0);
    let h1 = Complex64::new(j1.re, y1);
    Ok((h1 * x, h0 * x - h1))
}

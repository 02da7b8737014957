//! One-dimensional parameter sweeps of the integrated force.

use std::f64::consts::PI;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::force::{compute_force, ForceBreakdown, RunContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Rotation frequency Ω/2π, Hz.
    Rotation,
    /// Both temperatures unless a single target is selected, K.
    Temperature,
    /// Resonance frequency ω₀/2π, Hz.
    Omega0,
    /// Chirality strength of every resonance, dimensionless.
    KappaStrength,
    /// Sphere radius, m.
    Radius,
}

impl SweepVariable {
    /// CSV column for the swept value.
    pub fn column(&self) -> &'static str {
        match self {
            Self::Rotation => "rot_freq_hz",
            Self::Temperature => "temperature_k",
            Self::Omega0 => "omega0_hz",
            Self::KappaStrength => "kappa_strength",
            Self::Radius => "radius_m",
        }
    }

    fn fits_linearly(&self) -> bool {
        matches!(self, Self::Rotation | Self::Temperature | Self::KappaStrength)
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rot" | "rotation" => Ok(Self::Rotation),
            "temp" | "temperature" => Ok(Self::Temperature),
            "omega0" => Ok(Self::Omega0),
            "kappa" | "kappa_strength" => Ok(Self::KappaStrength),
            "radius" => Ok(Self::Radius),
            other => Err(Error::Config(format!(
                "unknown sweep variable '{other}' (expected rot, temp, omega0, kappa or radius)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Which temperature a temperature sweep drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TemperatureTarget {
    #[default]
    Both,
    Env,
    Particle,
}

impl FromStr for TemperatureTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(Self::Both),
            "env" => Ok(Self::Env),
            "particle" => Ok(Self::Particle),
            other => Err(Error::Config(format!(
                "unknown temperature target '{other}' (expected both, env or particle)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub base: RunContext,
    /// Keep γ fixed in rad/s when sweeping ω₀ instead of holding γ/ω₀.
    pub freeze_gamma: bool,
    pub temperature_target: TemperatureTarget,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, from: f64, to: f64, points: usize, base: RunContext) -> Self {
        Self {
            variable,
            from,
            to,
            points,
            spacing: Spacing::Linear,
            base,
            freeze_gamma: false,
            temperature_target: TemperatureTarget::Both,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::Config(format!("sweep needs at least 2 points, got {}", self.points)));
        }
        if !(self.from.is_finite() && self.to.is_finite() && self.from < self.to) {
            return Err(Error::Config(format!(
                "sweep range must satisfy from < to, got {} .. {}",
                self.from, self.to
            )));
        }
        if self.spacing == Spacing::Log && !(self.from > 0.0) {
            return Err(Error::Config(format!(
                "log spacing needs from > 0, got {}",
                self.from
            )));
        }
        self.base.validate()
    }

    pub fn grid(&self) -> Vec<f64> {
        grid(self.from, self.to, self.points, self.spacing)
    }

    /// Run context with the swept variable set to `value`.
    pub fn context_at(&self, value: f64) -> Result<RunContext> {
        let mut ctx = self.base.clone();
        match self.variable {
            SweepVariable::Rotation => ctx.omega_rot = 2.0 * PI * value,
            SweepVariable::Temperature => match self.temperature_target {
                TemperatureTarget::Both => {
                    ctx.t_env = value;
                    ctx.t_particle = value;
                }
                TemperatureTarget::Env => ctx.t_env = value,
                TemperatureTarget::Particle => ctx.t_particle = value,
            },
            SweepVariable::Omega0 => {
                let target = 2.0 * PI * value;
                let reference = ctx.particle.material.min_omega0();
                let ratio = target / reference;
                for r in ctx.particle.material.resonances.iter_mut() {
                    r.omega0 *= ratio;
                    if !self.freeze_gamma {
                        r.gamma *= ratio;
                    }
                }
                // the lowest resonance lands exactly on the requested value
                for r in ctx.particle.material.resonances.iter_mut() {
                    if (r.omega0 - target).abs() <= 4.0 * f64::EPSILON * target {
                        r.omega0 = target;
                    }
                }
            }
            SweepVariable::KappaStrength => {
                for r in ctx.particle.material.resonances.iter_mut() {
                    r.strength_kappa = value;
                }
            }
            SweepVariable::Radius => ctx.particle.radius = value,
        }
        ctx.validate()?;
        Ok(ctx)
    }
}

pub fn grid(from: f64, to: f64, points: usize, spacing: Spacing) -> Vec<f64> {
    let last = (points - 1) as f64;
    (0..points)
        .map(|i| {
            if i == 0 {
                return from;
            }
            if i == points - 1 {
                return to;
            }
            let s = i as f64 / last;
            match spacing {
                Spacing::Linear => from + (to - from) * s,
                Spacing::Log => (from.ln() + (to.ln() - from.ln()) * s).exp(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub force: Option<ForceBreakdown>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(x, y)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        let (dx, dy) = (xi - mx, yi - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroCrossing {
    /// Refined crossing estimate (midpoint of the final bracket).
    pub value: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub value: f64,
    pub f_tot: f64,
    /// Whether the grid maximum was interior and refined.
    pub refined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct SweepMarkers {
    pub fit_f_tot: Option<LinearFit>,
    pub fit_f_dip_pmfl: Option<LinearFit>,
    pub zero_crossings: Vec<ZeroCrossing>,
    pub max_abs_f_tot: Option<Extremum>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub markers: SweepMarkers,
}

/// Relative width at which a zero-crossing bracket stops shrinking.
pub const CROSSING_REL_TOL: f64 = 1e-4;
const GOLDEN_REL_TOL: f64 = 1e-4;

fn f_tot_at(spec: &SweepSpec, value: f64) -> Result<f64> {
    Ok(compute_force(&spec.context_at(value)?)?.f_tot)
}

fn refine_crossing(spec: &SweepSpec, mut lo: f64, mut hi: f64, mut f_lo: f64, mut f_hi: f64) -> ZeroCrossing {
    while (hi - lo) > CROSSING_REL_TOL * 0.5 * (hi.abs() + lo.abs()) {
        let mid = 0.5 * (lo + hi);
        let f_mid = match f_tot_at(spec, mid) {
            Ok(v) => v,
            Err(_) => break,
        };
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            f_lo = 0.0;
            f_hi = 0.0;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    ZeroCrossing {
        value: 0.5 * (lo + hi),
        bracket_lo: lo,
        bracket_hi: hi,
        f_lo,
        f_hi,
    }
}

fn refine_maximum(spec: &SweepSpec, lo: f64, hi: f64, best: (f64, f64)) -> Extremum {
    let log = spec.spacing == Spacing::Log;
    let to_u = |x: f64| if log { x.ln() } else { x };
    let from_u = |u: f64| if log { u.exp() } else { u };
    let score = |u: f64| f_tot_at(spec, from_u(u)).map(|f| (f.abs(), f));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;

    let (mut a, mut b) = (to_u(lo), to_u(hi));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = match (score(c), score(d)) {
        (Ok(x), Ok(y)) => (x, y),
        _ => {
            return Extremum {
                value: best.0,
                f_tot: best.1,
                refined: false,
            }
        }
    };
    while (from_u(b) - from_u(a)).abs() > GOLDEN_REL_TOL * from_u(0.5 * (a + b)).abs() {
        if fc.0 >= fd.0 {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = match score(c) {
                Ok(v) => v,
                Err(_) => break,
            };
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = match score(d) {
                Ok(v) => v,
                Err(_) => break,
            };
        }
    }
    let (u, f) = if fc.0 >= fd.0 { (c, fc) } else { (d, fd) };
    if f.0 >= best.1.abs() {
        Extremum {
            value: from_u(u),
            f_tot: f.1,
            refined: true,
        }
    } else {
        Extremum {
            value: best.0,
            f_tot: best.1,
            refined: false,
        }
    }
}

/// Evaluates every grid point (in parallel, output in grid order) and
/// derives fit, crossing and extremum markers. Fails only if every row
/// fails.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let values = spec.grid();
    let results: Vec<Result<ForceBreakdown>> = values
        .par_iter()
        .map(|&v| spec.context_at(v).and_then(|ctx| compute_force(&ctx)))
        .collect();
    if let Some(Err(first)) = results.first().filter(|_| results.iter().all(|r| r.is_err())) {
        return Err(first.clone());
    }
    let rows: Vec<SweepRow> = values
        .iter()
        .zip(results)
        .map(|(&value, r)| match r {
            Ok(f) => SweepRow {
                value,
                force: Some(f),
                error: None,
            },
            Err(e) => SweepRow {
                value,
                force: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let markers = markers(spec, &rows);
    Ok(SweepOutcome { rows, markers })
}

fn markers(spec: &SweepSpec, rows: &[SweepRow]) -> SweepMarkers {
    let ok: Vec<(f64, ForceBreakdown)> = rows
        .iter()
        .filter_map(|r| r.force.map(|f| (r.value, f)))
        .collect();
    let x: Vec<f64> = ok.iter().map(|(v, _)| *v).collect();
    let mut m = SweepMarkers::default();
    if spec.variable.fits_linearly() {
        let tot: Vec<f64> = ok.iter().map(|(_, f)| f.f_tot).collect();
        let dip: Vec<f64> = ok.iter().map(|(_, f)| f.f_dip_pmfl).collect();
        m.fit_f_tot = linear_fit(&x, &tot);
        m.fit_f_dip_pmfl = linear_fit(&x, &dip);
    }
    if spec.variable == SweepVariable::Omega0 {
        for w in ok.windows(2) {
            let ((x0, f0), (x1, f1)) = ((w[0].0, w[0].1.f_tot), (w[1].0, w[1].1.f_tot));
            if f0 != 0.0 && f1 != 0.0 && f0.signum() != f1.signum() {
                m.zero_crossings.push(refine_crossing(spec, x0, x1, f0, f1));
            }
        }
    }
    if let Some((i, _)) = ok
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.f_tot.abs().total_cmp(&b.1 .1.f_tot.abs()))
    {
        let best = (ok[i].0, ok[i].1.f_tot);
        let interior = i > 0 && i + 1 < ok.len();
        m.max_abs_f_tot = Some(if interior && spec.variable == SweepVariable::Omega0 {
            refine_maximum(spec, ok[i - 1].0, ok[i + 1].0, best)
        } else {
            Extremum {
                value: best.0,
                f_tot: best.1,
                refined: false,
            }
        });
    }
    m
}

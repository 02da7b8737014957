//! Adaptive Gauss–Kronrod integration over finite intervals and the half-line.
//!
//! Each panel is integrated with the 15-point Kronrod rule and its embedded
//! 7-point Gauss rule; `|K15 − G7|` is the panel error. The panel with the
//! largest error relative to its component tolerance is bisected until every
//! component meets `max(rel_tol·|value|, abs_tol_floor)`. Panels are kept in
//! position order and totals are summed in that order, so a given input
//! always produces the same bits.

use serde::Serialize;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::force::RunContext;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    /// Absolute tolerance floor, in the integrand's integrated units.
    pub abs_tol_floor: f64,
    pub max_subdivisions: usize,
    /// Thermal cutoff in units of `k_B·max(T₀, T₁)/ħ`.
    pub tail_cut_multiplier: f64,
    /// Breakpoint span around each resonance, in linewidths.
    pub resonance_halfwidths: f64,
    /// Upper integration limit as a multiple of the largest resonance
    /// frequency. `None` integrates to infinity.
    pub spectral_window: Option<f64>,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol_floor: 1e-40,
            max_subdivisions: 2000,
            tail_cut_multiplier: 40.0,
            resonance_halfwidths: 8.0,
            spectral_window: Some(2.0),
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::Config(format!("rel_tol must be > 0, got {}", self.rel_tol)));
        }
        if !(self.abs_tol_floor.is_finite() && self.abs_tol_floor >= 0.0) {
            return Err(Error::Config(format!(
                "abs_tol_floor must be >= 0, got {}",
                self.abs_tol_floor
            )));
        }
        if self.max_subdivisions < 8 {
            return Err(Error::Config(format!(
                "max_subdivisions must be >= 8, got {}",
                self.max_subdivisions
            )));
        }
        if !(self.tail_cut_multiplier.is_finite() && self.tail_cut_multiplier > 0.0) {
            return Err(Error::Config(format!(
                "tail_cut_multiplier must be > 0, got {}",
                self.tail_cut_multiplier
            )));
        }
        if !(self.resonance_halfwidths.is_finite() && self.resonance_halfwidths > 0.0) {
            return Err(Error::Config(format!(
                "resonance_halfwidths must be > 0, got {}",
                self.resonance_halfwidths
            )));
        }
        if let Some(w) = self.spectral_window {
            if !(w > 0.0) || w.is_nan() {
                return Err(Error::Config(format!("spectral_window must be > 0, got {w}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

/// Result of integrating several components over a shared panel set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorQuadratureResult<const N: usize> {
    pub value: [f64; N],
    pub abs_error_estimate: [f64; N],
    pub evaluations: usize,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
enum Domain {
    /// Plain interval in the integration variable.
    Finite,
    /// `t ∈ [0, 1)` with `x = a/(1 − t)`.
    Tail { start: f64 },
}

impl Domain {
    fn map(&self, t: f64) -> (f64, f64) {
        match *self {
            Domain::Finite => (t, 1.0),
            Domain::Tail { start } => {
                let s = 1.0 - t;
                (start / s, start / (s * s))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    domain: Domain,
    value: [f64; N],
    error: [f64; N],
}

fn kronrod<const N: usize, F>(f: &mut F, a: f64, b: f64, domain: Domain) -> Result<Panel<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut k = [0.0; N];
    let mut g = [0.0; N];
    let mut eval = |t: f64| -> Result<[f64; N]> {
        let (x, jac) = domain.map(t);
        if !(x.is_finite() && jac.is_finite()) {
            // the tail has been split down to where t rounds to 1: the
            // integrand does not decay fast enough to be resolved
            return Err(Error::NumericFailure {
                what: "mapped tail at the largest finite frequency",
                re: t,
                im: 0.0,
            });
        }
        let mut y = f(x)?;
        for v in y.iter_mut() {
            *v *= jac;
        }
        Ok(y)
    };
    for (i, &node) in XGK.iter().enumerate() {
        let gauss_weight = if i % 2 == 1 { Some(WG[i / 2]) } else { None };
        let mut y = eval(center - half * node)?;
        if node != 0.0 {
            let right = eval(center + half * node)?;
            for c in 0..N {
                y[c] += right[c];
            }
        }
        for c in 0..N {
            k[c] += WGK[i] * y[c];
            if let Some(w) = gauss_weight {
                g[c] += w * y[c];
            }
        }
    }
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for c in 0..N {
        value[c] = k[c] * half;
        error[c] = ((k[c] - g[c]) * half).abs();
        if !value[c].is_finite() {
            return Err(Error::NumericFailure {
                what: "integrand",
                re: a,
                im: b,
            });
        }
    }
    Ok(Panel {
        a,
        b,
        domain,
        value,
        error,
    })
}

fn totals<const N: usize>(panels: &[Panel<N>]) -> ([f64; N], [f64; N]) {
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for p in panels {
        for c in 0..N {
            value[c] += p.value[c];
            error[c] += p.error[c];
        }
    }
    (value, error)
}

fn physical_bounds<const N: usize>(p: &Panel<N>) -> (f64, f64) {
    match p.domain {
        Domain::Finite => (p.a, p.b),
        Domain::Tail { .. } => (p.domain.map(p.a).0, p.domain.map(p.b).0),
    }
}

/// Integrates a vector-valued function over the panels between consecutive
/// `points`, plus `[last point, ∞)` when `tail` is set.
pub fn integrate_panels<const N: usize, F>(
    mut f: F,
    points: &[f64],
    tail: bool,
    settings: &QuadratureSettings,
) -> Result<VectorQuadratureResult<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    settings.validate()?;
    if points.is_empty() || (!tail && points.len() < 2) {
        return Err(Error::Domain("integration needs at least one interval".into()));
    }
    if points.windows(2).any(|w| !(w[0] < w[1])) || points.iter().any(|p| !p.is_finite()) {
        return Err(Error::Domain("integration points must be finite and increasing".into()));
    }
    let mut panels: Vec<Panel<N>> = Vec::new();
    for w in points.windows(2) {
        panels.push(kronrod(&mut f, w[0], w[1], Domain::Finite)?);
    }
    if tail {
        let start = *points.last().unwrap();
        if !(start > 0.0) {
            return Err(Error::Domain("mapped tail must start above zero".into()));
        }
        panels.push(kronrod(&mut f, 0.0, 1.0, Domain::Tail { start })?);
    }
    let mut evaluations = 15 * panels.len();
    let mut subdivisions = 0usize;

    loop {
        let (value, error) = totals(&panels);
        let tol: Vec<f64> = (0..N)
            .map(|c| (settings.rel_tol * value[c].abs()).max(settings.abs_tol_floor))
            .collect();
        if (0..N).all(|c| error[c] <= tol[c]) {
            return Ok(VectorQuadratureResult {
                value,
                abs_error_estimate: error,
                evaluations,
                subdivisions,
            });
        }
        // worst panel relative to each component's tolerance; first index wins ties
        let badness = |p: &Panel<N>| -> f64 {
            (0..N)
                .map(|c| {
                    if tol[c] > 0.0 {
                        p.error[c] / tol[c]
                    } else if p.error[c] > 0.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                })
                .fold(0.0, f64::max)
        };
        let mut worst = 0;
        let mut worst_badness = badness(&panels[0]);
        for (i, p) in panels.iter().enumerate().skip(1) {
            let b = badness(p);
            if b > worst_badness {
                worst = i;
                worst_badness = b;
            }
        }
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if subdivisions >= settings.max_subdivisions || !(p.a < mid && mid < p.b) {
            let (a, b) = physical_bounds(&p);
            return Err(Error::Convergence {
                subdivisions,
                a,
                b,
                error: p.error.iter().cloned().fold(0.0, f64::max),
            });
        }
        let left = kronrod(&mut f, p.a, mid, p.domain)?;
        let right = kronrod(&mut f, mid, p.b, p.domain)?;
        evaluations += 30;
        subdivisions += 1;
        panels.splice(worst..=worst, [left, right]);
    }
}

fn scalar<F>(mut f: F) -> impl FnMut(f64) -> Result<[f64; 1]>
where
    F: FnMut(f64) -> f64,
{
    move |x| Ok([f(x)])
}

fn scalar_result(r: VectorQuadratureResult<1>) -> QuadratureResult {
    QuadratureResult {
        value: r.value[0],
        abs_error_estimate: r.abs_error_estimate[0],
        evaluations: r.evaluations,
        subdivisions: r.subdivisions,
    }
}

fn clean_breakpoints(breakpoints: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = breakpoints
        .iter()
        .cloned()
        .filter(|&x| x.is_finite() && x > lo && x < hi)
        .collect();
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    pts
}

/// `∫₀^∞ f(ω) dω`, split at `breakpoints`; the last breakpoint (or 1 when
/// none are given) starts the mapped tail.
pub fn integrate_half_line<F>(
    f: F,
    breakpoints: &[f64],
    settings: &QuadratureSettings,
) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    let mut points = vec![0.0];
    let inner = clean_breakpoints(breakpoints, 0.0, f64::INFINITY);
    if inner.is_empty() {
        points.push(1.0);
    } else {
        points.extend(inner);
    }
    integrate_panels(scalar(f), &points, true, settings).map(scalar_result)
}

/// `∫_a^b f(x) dx`, split at the breakpoints that fall inside `(a, b)`.
pub fn integrate_interval<F>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    settings: &QuadratureSettings,
) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    let mut points = vec![a];
    points.extend(clean_breakpoints(breakpoints, a, b));
    points.push(b);
    integrate_panels(scalar(f), &points, false, settings).map(scalar_result)
}

/// Thermal cutoff `multiplier·k_B·max(T₀, T₁, 1 K)/ħ`.
pub fn thermal_cutoff(t_env: f64, t_particle: f64, multiplier: f64, k: &PhysicalConstants) -> f64 {
    multiplier * k.k_b * t_env.max(t_particle).max(1.0) / k.hbar
}

/// Sorted, deduplicated positive split points: the rotation frequency,
/// a geometric ladder out to `±resonance_halfwidths·γ` around each
/// resonance, the thermal cutoff and one further point that starts the
/// algebraic tail.
pub fn auto_breakpoints(ctx: &RunContext, settings: &QuadratureSettings) -> Vec<f64> {
    let mut pts = Vec::new();
    let spin = ctx.omega_rot.abs();
    if spin > 0.0 {
        pts.push(spin);
    }
    for r in &ctx.particle.material.resonances {
        pts.push(r.omega0);
        let width = if r.gamma > 0.0 { r.gamma } else { 1e-3 * r.omega0 };
        let mut span = settings.resonance_halfwidths * width;
        for _ in 0..6 {
            pts.push(r.omega0 + span);
            pts.push(r.omega0 - span);
            span *= 0.5;
        }
    }
    let cutoff = thermal_cutoff(
        ctx.t_env,
        ctx.t_particle,
        settings.tail_cut_multiplier,
        &ctx.constants,
    );
    pts.push(cutoff);
    let top = pts.iter().cloned().fold(0.0, f64::max);
    pts.push(2.0 * top);
    clean_breakpoints(&pts, 0.0, f64::INFINITY)
}

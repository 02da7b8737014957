//! Acceptance checks at the stated tolerances. Runs without the libtest
//! harness so every check prints a PASS/FAIL line; the process fails if any
//! check fails.

mod common;

use std::process::Command;
use std::time::Instant;

use ccthrust::force::{compute_force, spectral_sample, EvaluationMode};
use ccthrust::materials::{MaterialModel, BASE_OMEGA0};
use ccthrust::polarizability::{polarizability_at, ParticleSpec, PolarizabilityModel};
use ccthrust::sweep::{run_sweep, SweepSpec, SweepVariable};
use ccthrust::{DiffMode, RunContext};

use common::oracle;

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn base_ctx(radius: f64) -> RunContext {
    RunContext::new(ParticleSpec::new(radius, MaterialModel::omega_particle()).unwrap())
        .with_rotation_hz(1e4)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn t0_plateau() -> Check {
    let start = Instant::now();
    let f = compute_force(&base_ctx(50e-6).with_temperature(0.0)).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let paper = -1.29e-28;
    let ratio = f.f_tot / paper;
    let passed = f.f_tot < 0.0 && (0.5..=2.0).contains(&ratio) && elapsed <= 10.0;
    Check {
        name: "1 zero-temperature plateau",
        passed,
        detail: format!(
            "f_tot = {:.4e} N, ratio to -1.29e-28 = {ratio:.3} (factor-2 band; +-20% stretch {}), {elapsed:.3} s",
            f.f_tot,
            if (0.8..=1.2).contains(&ratio) { "met" } else { "not met" }
        ),
    }
}

fn rotation_linearity_and_parity() -> Check {
    let spec = SweepSpec::new(SweepVariable::Rotation, 1e3, 1e5, 12, base_ctx(50e-6));
    let out = run_sweep(&spec).unwrap();
    let r2 = out.markers.fit_f_tot.unwrap().r_squared;

    let mut worst_lin = 0.0f64;
    let mut worst_exact = 0.0f64;
    for mode in [DiffMode::Linearized, DiffMode::Exact] {
        let mut ctx = base_ctx(50e-6);
        ctx.diff_mode = mode;
        let fwd = compute_force(&ctx).unwrap();
        ctx.omega_rot = -ctx.omega_rot;
        let rev = compute_force(&ctx).unwrap();
        let worst = [
            (fwd.f_dip_pmfl, rev.f_dip_pmfl),
            (fwd.f_int_pfl_mfl, rev.f_int_pfl_mfl),
            (fwd.f_int_efl_hfl, rev.f_int_efl_hfl),
            (fwd.f_tot, rev.f_tot),
        ]
        .iter()
        .map(|(a, b)| ((a + b) / a).abs())
        .fold(0.0, f64::max);
        match mode {
            DiffMode::Linearized => worst_lin = worst,
            _ => worst_exact = worst,
        }
    }
    Check {
        name: "2 rotation linearity and parity",
        passed: r2 >= 0.9999 && worst_lin == 0.0 && worst_exact <= 1e-10,
        detail: format!(
            "R^2 = {r2:.10} over 1-100 kHz, parity residual linearized {worst_lin:e}, exact {worst_exact:e}"
        ),
    }
}

fn temperature_behaviour() -> Check {
    let spec = SweepSpec::new(SweepVariable::Temperature, 100.0, 400.0, 13, base_ctx(50e-6));
    let out = run_sweep(&spec).unwrap();
    let r2 = out.markers.fit_f_tot.unwrap().r_squared;
    let f0 = compute_force(&base_ctx(50e-6).with_temperature(0.0)).unwrap().f_tot;
    let f1 = compute_force(&base_ctx(50e-6).with_temperature(1.0)).unwrap().f_tot;
    let low = rel(f1, f0);
    Check {
        name: "3 temperature behaviour",
        passed: r2 >= 0.999 && low <= 0.05,
        detail: format!("R^2 = {r2:.8} over 100-400 K, |f(1 K) - f(0)|/|f(0)| = {low:.3e}"),
    }
}

fn component_structure() -> Check {
    let f = compute_force(&base_ctx(50e-6)).unwrap();
    let ratio = f.f_dip_pmfl.abs() / f.f_int_pfl_mfl.abs().max(f.f_int_efl_hfl.abs());
    let opposite = f.f_int_efl_hfl.signum() == -f.f_int_pfl_mfl.signum();
    let smaller = f.f_tot.abs() < f.f_dip_pmfl.abs();
    Check {
        name: "4 component structure at 300 K",
        passed: (30.0..=200.0).contains(&ratio) && opposite && smaller,
        detail: format!(
            "dip/max(int) = {ratio:.2}, f_pfl_mfl = {:.3e}, f_Efl_Hfl = {:.3e}, |f_tot| = {:.4e} < |f_dip| = {:.4e}",
            f.f_int_pfl_mfl,
            f.f_int_efl_hfl,
            f.f_tot.abs(),
            f.f_dip_pmfl.abs()
        ),
    }
}

fn omega0_landmarks() -> Check {
    let base = base_ctx(50e-9);
    // sign changes across [600, 900] THz
    let narrow = SweepSpec::new(SweepVariable::Omega0, 600e12, 900e12, 31, base.clone());
    let out = run_sweep(&narrow).unwrap();
    let crossings = &out.markers.zero_crossings;
    let crossing_ok = crossings.len() == 1 && (700e12..=900e12).contains(&crossings[0].value);

    // maximum of |f_tot| over the frequency range of the published sweep
    let wide = SweepSpec::new(SweepVariable::Omega0, 0.1e12, 856e12, 60, base);
    let wide_out = run_sweep(&wide).unwrap();
    let peak = wide_out.markers.max_abs_f_tot.unwrap();
    let peak_ok = (600e12..=800e12).contains(&peak.value);

    let crossing = crossings.first().map(|z| z.value).unwrap_or(f64::NAN);
    let stretch = (crossing - 809e12).abs() <= 0.15 * 809e12 && (peak.value - 715e12).abs() <= 0.15 * 715e12;
    Check {
        name: "5 omega0 sweep landmarks (R = 50 nm)",
        passed: crossing_ok && peak_ok,
        detail: format!(
            "{} sign change(s), crossing at {:.1} THz, max |f_tot| = {:.3e} N at {:.1} THz (+-15% stretch {})",
            crossings.len(),
            crossing / 1e12,
            peak.f_tot.abs(),
            peak.value / 1e12,
            if stretch { "met" } else { "not met" }
        ),
    }
}

fn chirality() -> Check {
    let ctx = base_ctx(50e-6);
    let mut mirror = ctx.clone();
    mirror.particle.material = ctx.particle.material.mirrored();
    let a = compute_force(&ctx).unwrap().f_tot;
    let b = compute_force(&mirror).unwrap().f_tot;
    let parity = ((a + b) / a).abs();

    let spec = SweepSpec::new(SweepVariable::KappaStrength, -0.1, 0.1, 11, ctx);
    let out = run_sweep(&spec).unwrap();
    let r2 = out.markers.fit_f_dip_pmfl.unwrap().r_squared;
    Check {
        name: "6 chirality parity and linearity",
        passed: parity <= 1e-9 && r2 >= 0.99,
        detail: format!("parity residual {parity:e}, R^2(f_dip_pmfl vs strength) = {r2:.6}"),
    }
}

fn oracle_equivalence() -> Check {
    let ctx = base_ctx(50e-6);
    let mut worst_oracle = 0.0f64;
    let mut worst_lin = 0.0f64;
    for &(f, dip, pfl, efl) in oracle::INTEGRANDS_300K.iter() {
        let w = f * BASE_OMEGA0;
        let e = spectral_sample(&ctx, w, EvaluationMode::Exact).unwrap();
        let l = spectral_sample(&ctx, w, EvaluationMode::Linearized).unwrap();
        for (got, want, lin) in [
            (e.d_dip_pmfl, dip, l.d_dip_pmfl),
            (e.d_pfl_mfl, pfl, l.d_pfl_mfl),
            (e.d_efl_hfl, efl, l.d_efl_hfl),
        ] {
            worst_oracle = worst_oracle.max(rel(got, want));
            worst_lin = worst_lin.max(rel(lin, got));
        }
    }
    Check {
        name: "7 oracle equivalence",
        passed: worst_oracle <= 1e-6 && worst_lin <= 1e-3,
        detail: format!(
            "12 frequencies in [0.3, 3] w0: exact vs reference {worst_oracle:.2e}, linearized vs exact {worst_lin:.2e}"
        ),
    }
}

fn model_cross_validation() -> Check {
    let mut worst = 0.0f64;
    for f in [0.3, 0.9, 1.0, 1.1, 3.0] {
        let w = f * BASE_OMEGA0;
        let radius = 1e-3 * ccthrust::constants::C / w;
        let spec = ParticleSpec::new(radius, MaterialModel::omega_particle()).unwrap();
        let mie = polarizability_at(&spec, w, PolarizabilityModel::MieDipole).unwrap();
        let qs = polarizability_at(&spec, w, PolarizabilityModel::QuasiStaticRc).unwrap();
        for (a, b) in [(mie.alpha_e, qs.alpha_e), (mie.alpha_m, qs.alpha_m), (mie.chi, qs.chi)] {
            worst = worst.max((a - b).norm() / b.norm());
        }
    }
    let mut passive = true;
    let mut min_im = f64::INFINITY;
    for radius in [50e-9, 10e-6, 50e-6] {
        let spec = ParticleSpec::new(radius, MaterialModel::omega_particle()).unwrap();
        for i in 0..=400 {
            let w = BASE_OMEGA0 * 10f64.powf(-2.0 + 4.0 * i as f64 / 400.0);
            for model in [
                PolarizabilityModel::MieDipole,
                PolarizabilityModel::QuasiStaticRc,
                PolarizabilityModel::QuasiStatic,
            ] {
                let p = polarizability_at(&spec, w, model).unwrap();
                let m = p.alpha_e.im.min(p.alpha_m.im);
                min_im = min_im.min(m);
                passive &= m >= 0.0;
            }
        }
    }
    Check {
        name: "8 model cross-validation and passivity",
        passed: worst <= 1e-3 && passive,
        detail: format!(
            "Mie vs radiative quasi-static at kR = 1e-3: {worst:.2e}; min Im alpha over [1e-2, 1e2] w0 = {min_im:.3e}"
        ),
    }
}

fn robustness() -> Check {
    let base = base_ctx(50e-6);
    let reference = compute_force(&base).unwrap().f_tot;
    let mut worst = 0.0f64;
    let mut variants = Vec::new();
    let mut c = base.clone();
    c.quadrature.rel_tol *= 0.5;
    variants.push(c);
    let mut c = base.clone();
    c.quadrature.resonance_halfwidths *= 2.0;
    variants.push(c);
    let mut c = base.clone();
    c.quadrature.tail_cut_multiplier *= 2.0;
    variants.push(c);
    for v in &variants {
        worst = worst.max(rel(compute_force(v).unwrap().f_tot, reference));
    }

    let run = || {
        Command::new(env!("CARGO_BIN_EXE_ccthrust"))
            .args(["sweep", "--var", "rot", "--from", "1000", "--to", "100000", "--points", "6"])
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    let identical = a.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    Check {
        name: "9 numerical robustness and determinism",
        passed: worst <= 1e-6 && identical,
        detail: format!(
            "largest change under tighter tolerance / wider spans / longer tail = {worst:.2e}; repeated CSV byte-identical: {identical}"
        ),
    }
}

fn main() {
    let start = Instant::now();
    let checks = [
        t0_plateau(),
        rotation_linearity_and_parity(),
        temperature_behaviour(),
        component_structure(),
        omega0_landmarks(),
        chirality(),
        oracle_equivalence(),
        model_cross_validation(),
        robustness(),
    ];
    let mut failed = 0;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        if !c.passed {
            failed += 1;
        }
    }
    println!(
        "{} of {} acceptance checks passed in {:.1} s",
        checks.len() - failed,
        checks.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

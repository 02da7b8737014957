use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use ccthrust::force::{compute_force, integrand_total, DiffMode, RunContext};
use ccthrust::materials::{DampingConvention, MaterialModel};
use ccthrust::output::{emit_table, Cell, OutputFormat, Table};
use ccthrust::polarizability::{polarizability_at, ParticleSpec, PolarizabilityModel};
use ccthrust::quadrature::QuadratureSettings;
use ccthrust::sweep::{self, run_sweep, Spacing, SweepSpec, SweepVariable, TemperatureTarget};
use ccthrust::{Error, Result};

#[derive(Parser)]
#[command(name = "ccthrust", version, about = "Vacuum thrust on a rotating chiral sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrated force components at one parameter point.
    Force(ForceArgs),
    /// Force spectral densities over a frequency grid.
    Spectrum(GridArgs),
    /// Polarizabilities and dispersion over a frequency grid.
    Polarizability(GridArgs),
    /// Integrated force over a one-dimensional parameter sweep.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML file with defaults for any of the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    radius_m: Option<f64>,
    /// Rotation frequency Ω/2π.
    #[arg(long, conflicts_with = "rot_omega_rad_s", allow_negative_numbers = true)]
    rot_freq_hz: Option<f64>,
    /// Rotation angular frequency Ω.
    #[arg(long, allow_negative_numbers = true)]
    rot_omega_rad_s: Option<f64>,
    /// Field temperature.
    #[arg(long)]
    t_env_k: Option<f64>,
    /// Particle temperature.
    #[arg(long)]
    t_particle_k: Option<f64>,
    /// Material file; the built-in base particle when omitted.
    #[arg(long)]
    material: Option<PathBuf>,
    /// mie, quasistatic or quasistatic-rc.
    #[arg(long)]
    pol_mode: Option<String>,
    /// auto, exact or linearized.
    #[arg(long)]
    diff_mode: Option<String>,
    /// Override the material's damping form: gamma_omega or gamma_omega0.
    #[arg(long)]
    damping: Option<String>,
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Upper integration limit in units of the largest ω₀, or `inf`.
    #[arg(long)]
    spectral_window: Option<String>,
    /// csv or json.
    #[arg(long)]
    out: Option<String>,
    /// Output path, or `stdout`.
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
struct ForceArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    omega_min_rad_s: Option<f64>,
    #[arg(long)]
    omega_max_rad_s: Option<f64>,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Logarithmic grid spacing.
    #[arg(long)]
    log: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// rot (Hz), temp (K), omega0 (Hz), kappa or radius (m).
    #[arg(long = "var")]
    variable: String,
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
    #[arg(long, default_value_t = 21)]
    points: usize,
    #[arg(long)]
    log: bool,
    /// Keep γ fixed in rad/s instead of γ/ω₀ when sweeping omega0.
    #[arg(long)]
    freeze_gamma: bool,
    /// Temperature driven by a temp sweep: both, env or particle.
    #[arg(long, default_value = "both")]
    temp_target: String,
}

#[derive(Deserialize, Default)]
#[serde(untagged)]
enum WindowSetting {
    #[default]
    Unset,
    Multiple(f64),
    Named(String),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    radius_m: Option<f64>,
    rot_freq_hz: Option<f64>,
    rot_omega_rad_s: Option<f64>,
    t_env_k: Option<f64>,
    t_particle_k: Option<f64>,
    material: Option<PathBuf>,
    pol_mode: Option<String>,
    diff_mode: Option<String>,
    damping: Option<String>,
    rel_tol: Option<f64>,
    abs_tol_floor: Option<f64>,
    max_subdivisions: Option<usize>,
    tail_cut_multiplier: Option<f64>,
    resonance_halfwidths: Option<f64>,
    #[serde(default)]
    spectral_window: WindowSetting,
    out: Option<String>,
    output: Option<String>,
}

struct Resolved {
    ctx: RunContext,
    format: OutputFormat,
    output: String,
}

fn read_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg: FileConfig = toml::from_str(&text)
        .map_err(|e| Error::Config(format!("config {}: {e}", path.display())))?;
    // material paths in a config file are relative to that file
    if let (Some(m), Some(dir)) = (cfg.material.as_mut(), path.parent()) {
        if m.is_relative() {
            *m = dir.join(&*m);
        }
    }
    Ok(cfg)
}

fn parse_window(s: &str) -> Result<Option<f64>> {
    match s {
        "inf" | "none" | "infinity" => Ok(None),
        other => other
            .parse::<f64>()
            .map(Some)
            .map_err(|_| Error::Config(format!("spectral window must be a number or 'inf', got '{other}'"))),
    }
}

fn resolve(common: &CommonArgs, default_radius: Option<f64>) -> Result<Resolved> {
    let cfg = match &common.config {
        Some(p) => read_config(p)?,
        None => FileConfig::default(),
    };

    let mut material = match common.material.as_ref().or(cfg.material.as_ref()) {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read material {}: {e}", path.display())))?;
            MaterialModel::parse(&text)?
        }
        None => MaterialModel::omega_particle(),
    };
    if let Some(d) = common.damping.as_ref().or(cfg.damping.as_ref()) {
        material.damping = d.parse::<DampingConvention>()?;
    }

    let radius = common.radius_m.or(cfg.radius_m).or(default_radius).ok_or_else(|| {
        Error::Config("missing required key 'radius_m' (pass --radius-m or set radius_m in the config file)".into())
    })?;
    let particle = ParticleSpec::new(radius, material)?;

    let omega_rot = match (common.rot_freq_hz, common.rot_omega_rad_s) {
        (Some(hz), _) => 2.0 * PI * hz,
        (None, Some(w)) => w,
        (None, None) => match (cfg.rot_freq_hz, cfg.rot_omega_rad_s) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "config sets both rot_freq_hz and rot_omega_rad_s".into(),
                ))
            }
            (Some(hz), None) => 2.0 * PI * hz,
            (None, Some(w)) => w,
            (None, None) => 2.0 * PI * 1e4,
        },
    };

    let mut quadrature = QuadratureSettings::default();
    if let Some(x) = common.rel_tol.or(cfg.rel_tol) {
        quadrature.rel_tol = x;
    }
    if let Some(x) = cfg.abs_tol_floor {
        quadrature.abs_tol_floor = x;
    }
    if let Some(x) = cfg.max_subdivisions {
        quadrature.max_subdivisions = x;
    }
    if let Some(x) = cfg.tail_cut_multiplier {
        quadrature.tail_cut_multiplier = x;
    }
    if let Some(x) = cfg.resonance_halfwidths {
        quadrature.resonance_halfwidths = x;
    }
    match (&common.spectral_window, &cfg.spectral_window) {
        (Some(s), _) => quadrature.spectral_window = parse_window(s)?,
        (None, WindowSetting::Multiple(x)) => quadrature.spectral_window = Some(*x),
        (None, WindowSetting::Named(s)) => quadrature.spectral_window = parse_window(s)?,
        (None, WindowSetting::Unset) => {}
    }

    let mut ctx = RunContext::new(particle);
    ctx.omega_rot = omega_rot;
    ctx.t_env = common.t_env_k.or(cfg.t_env_k).unwrap_or(300.0);
    ctx.t_particle = common.t_particle_k.or(cfg.t_particle_k).unwrap_or(300.0);
    if let Some(m) = common.pol_mode.as_ref().or(cfg.pol_mode.as_ref()) {
        ctx.pol_model = m.parse::<PolarizabilityModel>()?;
    }
    if let Some(m) = common.diff_mode.as_ref().or(cfg.diff_mode.as_ref()) {
        ctx.diff_mode = m.parse::<DiffMode>()?;
    }
    ctx.quadrature = quadrature;
    ctx.validate()?;

    let format = match common.out.as_ref().or(cfg.out.as_ref()) {
        Some(f) => f.parse()?,
        None => OutputFormat::Csv,
    };
    let output = common
        .output
        .clone()
        .or(cfg.output)
        .unwrap_or_else(|| "stdout".to_string());
    Ok(Resolved { ctx, format, output })
}

fn metadata(command: &str, ctx: &RunContext) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("context".into(), serde_json::to_value(ctx).unwrap_or(Value::Null));
    m
}

fn write_output(table: &Table, r: &Resolved) -> Result<()> {
    if r.output == "stdout" || r.output == "-" {
        let stdout = io::stdout();
        let lock = stdout.lock();
        emit_table(table, r.format, BufWriter::new(lock))
    } else {
        let file = File::create(&r.output)
            .map_err(|e| Error::Output(format!("cannot create {}: {e}", r.output)))?;
        let mut w = BufWriter::new(file);
        emit_table(table, r.format, &mut w)?;
        w.flush().map_err(|e| Error::Output(e.to_string()))
    }
}

const FORCE_COLUMNS: [&str; 5] = ["f_dip_pmfl_N", "f_pfl_mfl_N", "f_Efl_Hfl_N", "f_tot_N", "abs_err_N"];

fn run_force(args: &ForceArgs) -> Result<()> {
    let r = resolve(&args.common, None)?;
    let f = compute_force(&r.ctx)?;
    eprintln!(
        "f_dip_pmfl = {:.6e} N\nf_pfl_mfl  = {:.6e} N\nf_Efl_Hfl  = {:.6e} N\nf_tot      = {:.6e} N  (± {:.1e} N, {} mode)",
        f.f_dip_pmfl,
        f.f_int_pfl_mfl,
        f.f_int_efl_hfl,
        f.f_tot,
        f.est_abs_error,
        f.mode_used.tag()
    );
    let mut columns: Vec<&str> = FORCE_COLUMNS.to_vec();
    columns.push("mode");
    let mut table = Table::new(&columns);
    table.metadata = metadata("force", &r.ctx);
    table.push(vec![
        f.f_dip_pmfl.into(),
        f.f_int_pfl_mfl.into(),
        f.f_int_efl_hfl.into(),
        f.f_tot.into(),
        f.est_abs_error.into(),
        f.mode_used.tag().into(),
    ]);
    write_output(&table, &r)
}

fn frequency_grid(args: &GridArgs, ctx: &RunContext) -> Result<Vec<f64>> {
    let m = &ctx.particle.material;
    let lo = args.omega_min_rad_s.unwrap_or(0.3 * m.min_omega0());
    let hi = args.omega_max_rad_s.unwrap_or(3.0 * m.max_omega0());
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Config(format!(
            "frequency grid needs 0 < omega_min < omega_max, got {lo} .. {hi}"
        )));
    }
    if args.points < 2 {
        return Err(Error::Config(format!("grid needs at least 2 points, got {}", args.points)));
    }
    let spacing = if args.log { Spacing::Log } else { Spacing::Linear };
    Ok(sweep::grid(lo, hi, args.points, spacing))
}

fn run_spectrum(args: &GridArgs) -> Result<()> {
    let r = resolve(&args.common, None)?;
    let grid = frequency_grid(args, &r.ctx)?;
    let mut table = Table::new(&[
        "omega_rad_s",
        "dF_dip_pmfl_N_s",
        "dF_pfl_mfl_N_s",
        "dF_Efl_Hfl_N_s",
        "dF_tot_N_s",
    ]);
    table.metadata = metadata("spectrum", &r.ctx);
    table
        .metadata
        .insert("mode".into(), json!(r.ctx.mode().tag()));
    for w in grid {
        let s = integrand_total(&r.ctx, w)?;
        table.push(vec![
            w.into(),
            s.d_dip_pmfl.into(),
            s.d_pfl_mfl.into(),
            s.d_efl_hfl.into(),
            s.d_tot.into(),
        ]);
    }
    write_output(&table, &r)
}

fn run_polarizability(args: &GridArgs) -> Result<()> {
    let r = resolve(&args.common, None)?;
    let grid = frequency_grid(args, &r.ctx)?;
    let mut table = Table::new(&[
        "omega_rad_s",
        "alpha_e_re_m3",
        "alpha_e_im_m3",
        "alpha_m_re_m3",
        "alpha_m_im_m3",
        "chi_re_m2_s",
        "chi_im_m2_s",
        "upsilon_re_m3",
        "upsilon_im_m3",
        "eps_re",
        "eps_im",
        "mu_re",
        "mu_im",
        "kappa_re",
        "kappa_im",
    ]);
    table.metadata = metadata("polarizability", &r.ctx);
    table.metadata.insert(
        "units".into(),
        json!("alpha_e is alpha_e/eps0 and alpha_m is alpha_m/mu0, both in m^3"),
    );
    for w in grid {
        let p = polarizability_at(&r.ctx.particle, w, r.ctx.pol_model)?;
        let d = r.ctx.particle.material.sample(w)?;
        let (ae, am, y) = (p.alpha_e_volume(), p.alpha_m_volume(), p.upsilon());
        table.push(vec![
            w.into(),
            ae.re.into(),
            ae.im.into(),
            am.re.into(),
            am.im.into(),
            p.chi.re.into(),
            p.chi.im.into(),
            y.re.into(),
            y.im.into(),
            d.eps.re.into(),
            d.eps.im.into(),
            d.mu.re.into(),
            d.mu.im.into(),
            d.kappa.re.into(),
            d.kappa.im.into(),
        ]);
    }
    write_output(&table, &r)
}

fn run_sweep_command(args: &SweepArgs) -> Result<()> {
    let variable: SweepVariable = args.variable.parse()?;
    let default_radius = if variable == SweepVariable::Omega0 { 50e-9 } else { 50e-6 };
    let r = resolve(&args.common, Some(default_radius))?;
    let spec = SweepSpec {
        variable,
        from: args.from,
        to: args.to,
        points: args.points,
        spacing: if args.log { Spacing::Log } else { Spacing::Linear },
        base: r.ctx.clone(),
        freeze_gamma: args.freeze_gamma,
        temperature_target: args.temp_target.parse::<TemperatureTarget>()?,
    };
    let outcome = run_sweep(&spec)?;

    let mut columns = vec![variable.column()];
    columns.extend(FORCE_COLUMNS);
    columns.extend(["mode", "status"]);
    let mut table = Table::new(&columns);
    table.metadata = metadata("sweep", &r.ctx);
    table.metadata.insert("variable".into(), json!(variable));
    table
        .metadata
        .insert("markers".into(), serde_json::to_value(&outcome.markers).unwrap_or(Value::Null));
    for row in &outcome.rows {
        let mut cells: Vec<Cell> = vec![row.value.into()];
        match (&row.force, &row.error) {
            (Some(f), _) => {
                cells.extend([
                    f.f_dip_pmfl.into(),
                    f.f_int_pfl_mfl.into(),
                    f.f_int_efl_hfl.into(),
                    f.f_tot.into(),
                    f.est_abs_error.into(),
                    f.mode_used.tag().into(),
                    "ok".into(),
                ]);
            }
            (None, err) => {
                cells.extend(std::iter::repeat(Cell::Empty).take(6));
                cells.push(Cell::Text(err.clone().unwrap_or_default()));
            }
        }
        table.push(cells);
    }

    let m = &outcome.markers;
    if let Some(fit) = m.fit_f_tot {
        eprintln!(
            "linear fit of f_tot: slope {:.6e}, intercept {:.6e}, R^2 {:.8}",
            fit.slope, fit.intercept, fit.r_squared
        );
    }
    for z in &m.zero_crossings {
        eprintln!(
            "f_tot changes sign at {} = {:.6e} (bracket {:.6e} .. {:.6e})",
            variable.column(),
            z.value,
            z.bracket_lo,
            z.bracket_hi
        );
    }
    if let Some(x) = m.max_abs_f_tot {
        eprintln!(
            "max |f_tot| = {:.6e} N at {} = {:.6e}{}",
            x.f_tot.abs(),
            variable.column(),
            x.value,
            if x.refined { " (refined)" } else { "" }
        );
    }
    let failed = outcome.rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed", outcome.rows.len());
    }
    write_output(&table, &r)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Force(a) => run_force(a),
        Command::Spectrum(a) => run_spectrum(a),
        Command::Polarizability(a) => run_polarizability(a),
        Command::Sweep(a) => run_sweep_command(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ccthrust: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

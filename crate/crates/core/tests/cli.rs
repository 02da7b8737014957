//! End-to-end runs of the `ccthrust` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ccthrust(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccthrust"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

const BASE_MATERIAL: &str = "\
# single-resonance chiral particle
eps_b = 3.1736
mu_b = 0.9798
damping = gamma_omega0

resonance {
    omega0_rad_s = 1.8713e12
    gamma_rel = 0.05463
    strength_e = 0.1560
    strength_m = 0.0625
    strength_kappa = 0.0993
}
";

#[test]
fn force_csv() {
    let o = ccthrust(&["force", "--radius-m", "50e-6"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(
        header,
        ["f_dip_pmfl_N", "f_pfl_mfl_N", "f_Efl_Hfl_N", "f_tot_N", "abs_err_N", "mode"]
    );
    assert_eq!(rows.len(), 1);
    let f_tot: f64 = rows[0][3].parse().unwrap();
    assert!(f_tot < 0.0 && f_tot > -1e-25);
    assert_eq!(rows[0][5], "linearized");
}

#[test]
fn force_json_and_exact_mode() {
    let o = ccthrust(&[
        "force", "--radius-m", "50e-6", "--diff-mode", "exact", "--out", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["metadata"]["command"], "force");
    assert_eq!(v["columns"][3], "f_tot_N");
    assert_eq!(v["rows"][0][5], "exact");
    assert!(v["rows"][0][3].as_f64().unwrap() < 0.0);
}

#[test]
fn builtin_and_file_material_agree() {
    let dir = tempfile::tempdir().unwrap();
    let mat = dir.path().join("base.mat");
    fs::write(&mat, BASE_MATERIAL).unwrap();
    let a = ccthrust(&["force", "--radius-m", "50e-6"]);
    let b = ccthrust(&["force", "--radius-m", "50e-6", "--material", mat.to_str().unwrap()]);
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn spectrum_columns_and_grid() {
    let o = ccthrust(&["spectrum", "--radius-m", "50e-6", "--points", "7", "--log"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(
        header,
        ["omega_rad_s", "dF_dip_pmfl_N_s", "dF_pfl_mfl_N_s", "dF_Efl_Hfl_N_s", "dF_tot_N_s"]
    );
    assert_eq!(rows.len(), 7);
    let w: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(w.windows(2).all(|p| p[1] > p[0]));
}

#[test]
fn polarizability_columns() {
    let o = ccthrust(&[
        "polarizability", "--radius-m", "50e-9", "--points", "4", "--pol-mode", "quasistatic-rc",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header.len(), 15);
    assert_eq!(header[0], "omega_rad_s");
    assert_eq!(header[6], "chi_im_m2_s");
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let im_ae: f64 = r[2].parse().unwrap();
        assert!(im_ae > 0.0);
    }
}

#[test]
fn rotation_sweep() {
    let o = ccthrust(&[
        "sweep", "--var", "rot", "--from", "1e3", "--to", "1e5", "--points", "4", "--out", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["columns"][0], "rot_freq_hz");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.as_array().unwrap().last().unwrap() == "ok"));
    let r2 = v["metadata"]["markers"]["fit_f_tot"]["r_squared"].as_f64().unwrap();
    assert!(r2 > 0.9999);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("base.mat"), BASE_MATERIAL).unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "radius_m = 50e-6\nmaterial = \"base.mat\"\nt_env_k = 0.0\nt_particle_k = 0.0\nout = \"json\"\n",
    )
    .unwrap();
    let o = ccthrust(&["force", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let f = v["rows"][0][3].as_f64().unwrap();
    assert!(f < 0.0 && f.abs() < 1e-27);

    // flags win over the file
    let o = ccthrust(&["force", "--config", cfg.to_str().unwrap(), "--out", "csv"]);
    assert!(stdout(&o).starts_with("f_dip_pmfl_N,"));
}

#[test]
fn output_to_file_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = ccthrust(&[
            "spectrum", "--radius-m", "50e-6", "--points", "25", "--output", p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
        fs::read(p).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn configuration_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &["force"],
        &["force", "--radius-m", "-1"],
        &["force", "--radius-m", "1e-6", "--pol-mode", "dipole"],
        &["force", "--radius-m", "1e-6", "--t-env-k", "-3"],
        &["force", "--radius-m", "1e-6", "--out", "xml"],
        &["force", "--radius-m", "1e-6", "--material", "/does/not/exist.mat"],
        &["sweep", "--var", "pressure", "--from", "1", "--to", "2"],
    ];
    for args in cases {
        let o = ccthrust(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn missing_radius_names_the_key() {
    let o = ccthrust(&["force"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("radius_m"));
}

#[test]
fn malformed_material_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mat = dir.path().join("bad.mat");
    fs::write(&mat, BASE_MATERIAL.replace("strength_m", "strength_q")).unwrap();
    let o = ccthrust(&["force", "--radius-m", "1e-6", "--material", mat.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("strength_q"));
}

#[test]
fn lossless_resonance_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let mat = dir.path().join("lossless.mat");
    fs::write(&mat, BASE_MATERIAL.replace("gamma_rel = 0.05463", "gamma_rel = 0")).unwrap();
    let o = ccthrust(&[
        "polarizability", "--radius-m", "50e-9", "--material", mat.to_str().unwrap(),
        "--points", "3", "--omega-min-rad-s", "1.8713e12", "--omega-max-rad-s", "2e12",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_4() {
    let missing = Path::new("/nonexistent-dir/out.csv");
    let o = ccthrust(&["force", "--radius-m", "50e-6", "--output", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

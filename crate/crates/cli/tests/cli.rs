use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use rigid_pinn::commands::{self, Inputs, Method};
use rigid_pinn::formats;
use rigid_pinn::RunConfig;
use rigid_pinn_core::eval::nmse_values;
use rigid_pinn_core::field::Measurements;
use rigid_pinn_core::geom::{mic_array_layout, CartPoint};
use rigid_pinn_core::nn::{MlpArch, MlpParams};
use rigid_pinn_core::pw::steering_matrix;
use rigid_pinn_core::Complex;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rigid-pinn"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("spawn rigid-pinn")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn write_config(dir: &Path, json: &str) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, json).unwrap();
    p
}

fn data_rows(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count() - 1
}

#[test]
fn simulate_writes_32_rows_and_echoes_scale() {
    let dir = TempDir::new().unwrap();
    let out = ok(dir.path(), &["simulate"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("scale "));
    assert!(stdout.contains("k 1.83183245"));
    let path = dir.path().join("measurements.csv");
    assert_eq!(data_rows(&path), 32);
    let first = std::fs::read_to_string(&path).unwrap();
    assert!(first.starts_with("x,y,z,re,im\n"));
    let m = formats::read_measurements(&path).unwrap();
    let max = m
        .pressures
        .iter()
        .map(|p| p.re.abs().max(p.im.abs()))
        .fold(0.0, f64::max);
    assert!((max - 1.0).abs() < 1e-15);
}

#[test]
fn simulate_is_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let cfg = write_config(a.path(), r#"{"snr_db": null}"#);
    let cfg = cfg.to_str().unwrap();
    ok(a.path(), &["--config", cfg, "simulate"]);
    ok(b.path(), &["--config", cfg, "simulate"]);
    let read = |d: &TempDir| std::fs::read(d.path().join("measurements.csv")).unwrap();
    assert_eq!(read(&a), read(&b));

    ok(a.path(), &["--seed", "9", "simulate"]);
    ok(b.path(), &["--seed", "9", "simulate"]);
    assert_eq!(read(&a), read(&b));
    ok(b.path(), &["--seed", "10", "simulate"]);
    assert_ne!(read(&a), read(&b));
}

#[test]
fn train_smoke_run() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["simulate"]);
    ok(dir.path(), &["--epochs", "10", "train"]);
    let loss = dir.path().join("loss.csv");
    assert_eq!(data_rows(&loss), 10);
    let first = std::fs::read(&loss).unwrap();
    ok(dir.path(), &["--epochs", "10", "train"]);
    assert_eq!(first, std::fs::read(&loss).unwrap());
    let rows = formats::read_loss(&loss).unwrap();
    assert_eq!(rows[0].epoch, 0);
    assert_eq!(rows[9].epoch, 9);
    let ck = formats::read_checkpoint(&dir.path().join("checkpoint.txt")).unwrap();
    assert_eq!(ck.len(), 66);
}

#[test]
fn reference_training_reduces_weighted_loss_tenfold() {
    let dir = TempDir::new().unwrap();
    let cfg = RunConfig {
        output_dir: dir.path().to_path_buf(),
        ..RunConfig::default()
    };
    commands::cmd_simulate(&cfg).unwrap();
    let outcome = commands::cmd_train(&cfg, &Inputs::default(), |_| {}).unwrap();
    let initial = outcome.history[0].weighted_total;
    let last = outcome.final_terms.weighted(&outcome.weights);
    assert!(
        last * 10.0 <= initial,
        "weighted loss {initial:.4e} -> {last:.4e}"
    );
}

#[test]
fn sh_estimate_reproduces_measurements_on_the_sphere() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["simulate"]);
    let m = formats::read_measurements(&dir.path().join("measurements.csv")).unwrap();
    let pts = dir.path().join("mics.csv");
    formats::write_points(&pts, &m.positions).unwrap();
    ok(
        dir.path(),
        &["estimate", "--method", "sh", "--points", pts.to_str().unwrap()],
    );
    let est = formats::read_measurements(&dir.path().join("estimate_sh.csv")).unwrap();
    assert_eq!(est.len(), 32);
    let e = nmse_values(&m.pressures, &est.pressures).unwrap();
    assert!(e < -15.0, "{e}");
    assert_eq!(data_rows(&dir.path().join("sh_coeffs.csv")), 25);
}

#[test]
fn pl_estimate_localizes_a_plane_wave() {
    let dir = TempDir::new().unwrap();
    let cfg = RunConfig::default();
    let scene = cfg.scene();
    let mics = mic_array_layout(scene.a).unwrap();
    let target = 7;
    let dirs: Vec<CartPoint> = mics.iter().map(|p| p.normalized()).collect();
    let h = steering_matrix(&[dirs[target]], &mics, scene.k(), scene.a, 12).unwrap();
    let pressures: Vec<Complex> = (0..mics.len()).map(|q| h.get(q, 0)).collect();
    let m = Measurements::new(mics.clone(), pressures).unwrap();
    let mpath = dir.path().join("plane.csv");
    formats::write_measurements(&mpath, &m).unwrap();
    let cfg_path = write_config(dir.path(), r#"{"pl": {"reg": 1e-6}}"#);
    ok(
        dir.path(),
        &[
            "--config",
            cfg_path.to_str().unwrap(),
            "estimate",
            "--method",
            "pl",
            "--measurements",
            mpath.to_str().unwrap(),
        ],
    );
    let amps = std::fs::read_to_string(dir.path().join("pl_amplitudes.csv")).unwrap();
    let mags: Vec<(CartPoint, f64)> = amps
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            (CartPoint::new(v[0], v[1], v[2]), v[3].hypot(v[4]))
        })
        .collect();
    let (best, _) = mags
        .iter()
        .copied()
        .fold((CartPoint::ORIGIN, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    assert!((best - dirs[target]).norm() < 1e-12);
    // slice grid default is 90 x 180
    assert_eq!(data_rows(&dir.path().join("estimate_pl.csv")), 90 * 180);
}

#[test]
fn sweep_and_slice_outputs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"eval": {"radii": [0.042, 0.06, 0.1], "points_per_radius": 200, "n_theta": 6, "n_phi": 8}}"#,
    );
    let cfg = cfg.to_str().unwrap();
    ok(dir.path(), &["--config", cfg, "simulate"]);
    ok(dir.path(), &["--config", cfg, "--epochs", "5", "train"]);
    ok(dir.path(), &["--config", cfg, "sweep"]);
    let sweep = dir.path().join("sweep.csv");
    assert_eq!(data_rows(&sweep), 3);
    let text = std::fs::read_to_string(&sweep).unwrap();
    assert!(text.starts_with("radius,nmse_sh,nmse_pl,nmse_pinn\n"));
    let first = std::fs::read(&sweep).unwrap();
    ok(dir.path(), &["--config", cfg, "sweep"]);
    assert_eq!(first, std::fs::read(&sweep).unwrap());

    for method in ["sh", "pl", "pinn"] {
        ok(dir.path(), &["--config", cfg, "slice", "--method", method]);
        let rows = formats::read_slice(&dir.path().join(format!("slice_{method}.csv"))).unwrap();
        assert_eq!(rows.len(), 48);
    }
}

#[test]
fn invalid_config_exits_2_and_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(dir.path(), r#"{"pinn": {"lr": -1}}"#);
    let out = run(&out_dir, &["--config", cfg.to_str().unwrap(), "simulate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("pinn.lr"), "{err}");
    assert!(!out_dir.exists());

    let cfg = write_config(dir.path(), "{\"seed\": \"x\"}");
    let out = run(&out_dir, &["--config", cfg.to_str().unwrap(), "simulate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 1"));
    assert!(!out_dir.exists());

    let out = run(&out_dir, &["estimate", "--method", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_artifacts_are_reported() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["train"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("rigid-pinn simulate"));
    ok(dir.path(), &["simulate"]);
    let out = run(dir.path(), &["estimate", "--method", "pinn"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("rigid-pinn train"));
}

#[test]
fn malformed_measurements_name_line_and_column() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,y,z,re,im\n0.042,0,0,1,0\n0,0.042,zz,1,0\n").unwrap();
    let out = run(
        dir.path(),
        &["train", "--measurements", bad.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3, column 3"), "{err}");

    std::fs::write(&bad, "x,y,z\n1,2,3\n").unwrap();
    let err = formats::read_measurements(&bad).unwrap_err().to_string();
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn verify_passes() {
    let out = bin().arg("verify").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("ok")).count(), 6);
}

#[test]
fn estimate_methods_enumerate() {
    for m in [Method::Sh, Method::Pl, Method::Pinn] {
        assert_eq!(m.name().parse::<Method>().unwrap(), m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn checkpoint_round_trip(values in proptest::collection::vec(-1e6f64..1e6, 66)) {
        let dir = TempDir::new().unwrap();
        let p = dir.path().join("ck.txt");
        let params = MlpParams::from_values(MlpArch::default(), values).unwrap();
        formats::write_checkpoint(&p, &params).unwrap();
        prop_assert_eq!(formats::read_checkpoint(&p).unwrap(), params);
    }

    #[test]
    fn measurements_round_trip(raw in proptest::collection::vec(proptest::array::uniform5(-1e3f64..1e3), 1..40)) {
        let dir = TempDir::new().unwrap();
        let p = dir.path().join("m.csv");
        let m = Measurements::new(
            raw.iter().map(|r| CartPoint::new(r[0], r[1], r[2])).collect(),
            raw.iter().map(|r| Complex::new(r[3], r[4])).collect(),
        ).unwrap();
        formats::write_measurements(&p, &m).unwrap();
        let back = formats::read_measurements(&p).unwrap();
        prop_assert_eq!(back.positions, m.positions);
        prop_assert_eq!(back.pressures, m.pressures);
    }
}

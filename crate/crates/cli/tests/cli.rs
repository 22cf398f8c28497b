use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn vqpe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vqpe"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const DIMER: &str = r#"{
  "name": "dimer",
  "system": {"hubbard": {"sites": 2, "t": 1.0, "u": 0.5}},
  "reference": {"hartree_fock": 2},
  "diagonalization": "both",
  "grid": {"dt": [0.1], "nt": [0, 2, 4]},
  "threshold": 1e-5,
  "vff": {"restarts": 1, "max_iterations": 5, "seed": 1}
}"#;

fn dimer_config(dir: &TempDir) -> String {
    write(dir.path(), "dimer.json", DIMER).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn exact_run_reports_ground_energy() {
    let dir = TempDir::new().unwrap();
    let out = vqpe(&["run", &dimer_config(&dir)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = stdout(&out);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "system,dt,nt,n_independent,method,state_index,energy,lambda_re,lambda_im,repeat,mean_energy,std_energy,status"
    );
    let ground = (0.5 - 16.25f64.sqrt()) / 2.0;
    for path in ["vqpe-exact/hamiltonian", "vqpe-exact/unitary"] {
        let row: Vec<&str> = csv
            .lines()
            .map(|l| l.split(',').collect::<Vec<_>>())
            .find(|f| f[2] == "4" && f[4] == path && f[5] == "0")
            .unwrap();
        let e: f64 = row[6].parse().unwrap();
        assert!((e - ground).abs() < 1e-8, "{path}: {e}");
        assert_eq!(row[12], "ok");
    }
}

#[test]
fn shot_runs_are_reproducible_per_seed() {
    let dir = TempDir::new().unwrap();
    let cfg = dimer_config(&dir);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |seed: &'static str, out: &Path| {
        let out = out.to_string_lossy().into_owned();
        vqpe(&[
            "run",
            &cfg,
            "--shots",
            "2000",
            "--seed",
            seed,
            "--threshold",
            "0.1",
            "--repeats",
            "2",
            "-o",
            &out,
        ])
    };
    assert_eq!(args("42", &a).status.code(), Some(0));
    assert_eq!(args("42", &b).status.code(), Some(0));
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert_eq!(args("43", &b).status.code(), Some(0));
    assert_ne!(ta, std::fs::read(&b).unwrap());
}

#[test]
fn shot_mode_without_seed_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = vqpe(&["run", &dimer_config(&dir), "--shots", "100"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("backend.seed"), "{}", stderr(&out));
}

#[test]
fn invalid_configs_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let bad_field = write(dir.path(), "bad.json", &DIMER.replace("\"threshold\"", "\"treshold\""));
    let out = vqpe(&["run", bad_field.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("treshold"), "{}", stderr(&out));

    let bad_value = write(dir.path(), "neg.json", &DIMER.replace("1e-5", "-1.0"));
    let out = vqpe(&["run", bad_value.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("threshold"), "{}", stderr(&out));

    let out = vqpe(&["run", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn failed_cells_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let cfg = dimer_config(&dir);
    let model = dir.path().join("model.json");
    let fit = vqpe(&["fit-vff", &cfg, "-o", model.to_str().unwrap()]);
    assert_eq!(fit.status.code(), Some(0), "{}", stderr(&fit));
    let report: serde_json::Value = serde_json::from_str(stderr(&fit).trim()).unwrap();
    assert!(report["cost"].as_f64().unwrap() < 1.0);
    let saved: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&model).unwrap()).unwrap();
    assert_eq!(saved["dt"].as_f64(), Some(0.1));

    let out = vqpe(&[
        "run",
        &cfg,
        "--method",
        "vff-vqpe",
        "--model",
        model.to_str().unwrap(),
        "--dt",
        "0.1,0.2",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let csv = stdout(&out);
    assert!(csv
        .lines()
        .any(|l| l.starts_with("dimer,0.2,") && l.ends_with(",error")));
    assert!(csv.lines().any(|l| l.starts_with("dimer,0.1,") && l.ends_with(",ok")));
}

#[test]
fn gate_counts_are_constant_for_vff() {
    let dir = TempDir::new().unwrap();
    let out = vqpe(&[
        "gate-counts",
        &dimer_config(&dir),
        "--steps",
        "1,3",
        "--powers",
        "1,100",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = stdout(&out);
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(csv.lines().next().unwrap(), "circuit,power,gates,cnots");
    let find = |c: &str, p: &str| rows.iter().find(|r| r[0] == c && r[1] == p).unwrap().clone();
    assert_eq!(find("vff", "1")[2..], find("vff", "100")[2..]);
    let one: usize = find("trotter", "1")[2].parse().unwrap();
    let three: usize = find("trotter", "3")[2].parse().unwrap();
    assert_eq!(three, 3 * one);
}

#[test]
fn qpe_distribution_is_normalized() {
    let dir = TempDir::new().unwrap();
    let out = vqpe(&["qpe", &dimer_config(&dir), "--ancillas", "4", "--time", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = stdout(&out);
    assert_eq!(csv.lines().next().unwrap(), "k,omega_k,probability");
    let total: f64 = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .sum();
    assert_eq!(csv.lines().count(), 17);
    assert!((total - 1.0).abs() < 1e-10);
}

#[test]
fn dump_matrices_writes_one_cell() {
    let dir = TempDir::new().unwrap();
    let out = vqpe(&["dump-matrices", &dimer_config(&dir), "--nt", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["nt"], 3);
    assert_eq!(v["H"].as_array().unwrap().len(), 16);
    assert_eq!(v["U"].as_array().unwrap().len(), 16);
    let s0 = &v["s_row"][0];
    assert!((s0[0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(s0[1].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn shipped_configs_load() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let out = vqpe(&["run", root.join("hubbard_dimer_exact.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out = vqpe(&[
        "run",
        root.join("h2_shots.json").to_str().unwrap(),
        "--seed",
        "1",
        "--nt",
        "0,1",
        "--repeats",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).lines().skip(1).all(|l| l.starts_with("h2,")));
}

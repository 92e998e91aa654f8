use std::f64::consts::FRAC_PI_4;
use std::path::Path;
use std::process::{Command, Output};

use nevanlinna::herglotz::JUnitary;
use nevanlinna::livsic::LivsicInterval;
use nevanlinna::measures::Measure;
use nevanlinna::perturbation::Dilation;
use nevanlinna::testing;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nevanlinna")).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn csv_rows(o: &Output) -> Vec<Vec<f64>> {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(o.stdout.as_slice());
    rdr.records().map(|r| r.unwrap().iter().map(|f| f.parse::<f64>().unwrap()).collect()).collect()
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn weyl_at_i() {
    let v = stdout_json(&run(&["weyl", "--q", "zero", "--gamma", "0", "--z", "0,1"]));
    assert!((v["m"][0].as_f64().unwrap() + 0.70710678).abs() < 1e-8);
    assert!((v["m"][1].as_f64().unwrap() - 0.70710678).abs() < 1e-8);
}

#[test]
fn livsic_at_i() {
    let v = stdout_json(&run(&["livsic", "--a", "1", "--alpha", "0.785398", "--z", "0,1"]));
    assert!(v["m"][0].as_f64().unwrap().abs() < 1e-12);
    assert!((v["m"][1].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn header_on_stderr() {
    let o = run(&["livsic", "--a", "1", "--alpha", "0.5", "--z", "0,1", "--seed", "7"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with("# nevanlinna ") && err.contains("seed=7") && err.contains("tol="), "{err}");
}

#[test]
fn grid_sweep_is_row_major() {
    let params = r#"{"measure":{"atoms":[{"x":0,"m":1}]},"kernel":"plain"}"#;
    let rows = csv_rows(&run(&["eval", "--model", "measure", "--params", params, "--re", "-1:1:10", "--im", "0.1:1:10", "--format", "csv"]));
    assert_eq!(rows.len(), 100);
    assert_eq!(rows[0][..2], [-1.0, 0.1]);
    assert_eq!(rows[1][1], 0.1);
    assert_eq!(rows[10][0], -1.0);
    for r in &rows {
        let m = num_complex::Complex64::new(r[2], r[3]);
        let z = num_complex::Complex64::new(r[0], r[1]);
        assert!((m - 1.0 / -z).norm() < 1e-12);
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["weyl", "--re", "-2:2:4", "--im", "0.5:1:2", "--format", "csv"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["eval", "--model", "lebesgue", "--re", "0:1:2000", "--im", "1:2:1000"]).status.code(), Some(1));
    let o = run(&["eval", "--model", "lebesgue", "--re", "0:1:2000", "--im", "1:2:1000"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cli.GridTooLarge"));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["weyl", "--bogus", "1"]).status.code(), Some(1));
    assert_eq!(run(&["eval", "--model", "nope", "--z", "0,1"]).status.code(), Some(1));
    assert_eq!(run(&["eval", "--model", "point_interaction", "--params", r#"{"n":2,"which":"krein"}"#, "--z", "0,1"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn livsic_measure_round_trip() {
    let o = run(&["livsic-measure", "--a", "1", "--alpha", "0.785398", "--n", "20"]);
    assert!(o.status.success());
    let m: Measure = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(m.atoms().len(), 41);
    let model = LivsicInterval::new(1.0, 0.785398).unwrap();
    assert_eq!(m.atoms()[20].x, model.atom_location(0));
}

#[test]
fn invert_recovers_livsic_atoms() {
    let o = run(&["invert", "--model", "livsic", "--params", r#"{"a":1,"alpha":0.7853981633974483}"#, "--a", "-4", "--b", "4", "--n-grid", "5"]);
    let m: Measure = serde_json::from_value(stdout_json(&o)).unwrap();
    let model = LivsicInterval::new(1.0, FRAC_PI_4).unwrap();
    let expected: Vec<f64> = (-3..=2).map(|n| model.atom_location(n)).filter(|x| (-4.0..=4.0).contains(x)).collect();
    assert_eq!(m.atoms().len(), expected.len());
    for (a, x) in m.atoms().iter().zip(&expected) {
        assert!((a.x - x).abs() < 1e-6, "{} vs {x}", a.x);
        assert!((a.m - model.atom_mass()).abs() < 1e-3 * model.atom_mass());
    }
}

#[test]
fn dilate_and_realize() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = testing::rng(3);
    let omega = testing::random_matrix_measure(&mut rng, 2, 3);
    let path = write(dir.path(), "omega.json", &omega.to_json());
    let d = Dilation::from_json(&stdout_json(&run(&["dilate", "--measure", &path]))).unwrap();
    assert_eq!(d.k.ncols(), 2);
    let v = stdout_json(&run(&["realize", "--measure", &path]));
    assert_eq!(v["pass"], Value::Bool(true));
    Dilation::from_json(&v["dilation"]).unwrap();
}

#[test]
fn perturb_and_lft() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = testing::rng(9);
    let t = testing::random_perturbation(&mut rng, 5, 2);
    let triple = write(dir.path(), "triple.json", &t.to_json());
    let l2 = write(dir.path(), "l2.json", &serde_json::to_value(nevanlinna::io::matrix_to_json(&testing::random_hermitian(&mut rng, 2))).unwrap());
    let v = stdout_json(&run(&["perturb", "--triple", &triple, "--z", "0.3,0.8", "--l2", &l2]));
    assert_eq!(v["consistency"]["pass"], Value::Bool(true));

    let a = JUnitary::rotation(1, 0.4);
    let map = write(dir.path(), "a.json", &a.to_json());
    let v = stdout_json(&run(&["lft", "--map", &map, "--model", "lebesgue", "--z", "0.5,2"]));
    assert!((v["m"][1].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn weyl_csv_potential_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("q.csv");
    std::fs::write(&p, "x,q\n0,1\n2,1\n").unwrap();
    let rows = csv_rows(&run(&["weyl", "--q", p.to_str().unwrap(), "--z", "1,1", "--format", "csv"]));
    let expect = num_complex::Complex64::new(0.0, 1.0) * num_complex::Complex64::new(0.0, 1.0).sqrt();
    assert!((rows[0][2] - expect.re).abs() < 1e-8 && (rows[0][3] - expect.im).abs() < 1e-8);
}

#[test]
fn classify_point_interaction() {
    let v = stdout_json(&run(&["classify", "--model", "point_interaction", "--params", r#"{"n":3,"which":"krein"}"#]));
    assert_eq!(v["type"], "Krein");
}

#[test]
fn verify_all_passes() {
    let o = run(&["verify", "--suite", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(stdout_json(&o)["pass"], Value::Bool(true));
}

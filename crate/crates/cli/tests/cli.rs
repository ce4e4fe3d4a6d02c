use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ipdg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ipdg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ipdg-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SOLVE: &str = "
[study]
type = \"solve\"

[domain]
n = 2

[materials]
nu = 0.35
young = [1.0]

[solver]
modes = 3
";

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

/// CSV rows without the trailing `seconds` column.
fn without_timing(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
        .collect()
}

#[test]
fn generated_mesh_passes_check() {
    let dir = scratch("mesh");
    let file = dir.join("square.mesh");
    let out = ipdg(&[
        "mesh",
        "gen",
        "--n",
        "4",
        "--dirichlet",
        "left,right",
        "--split",
        "horizontal",
        "--split-at",
        "0.5",
        "-o",
        s(&file),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = ipdg(&["mesh", "check", s(&file)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("triangles       32"), "{text}");
    assert!(text.contains("dirichlet       8"), "{text}");
    assert!(text.contains("material ids    [0, 1]"), "{text}");
}

#[test]
fn solve_writes_a_deterministic_csv() {
    let dir = scratch("solve");
    let cfg = write_config(&dir, "solve.cfg", SOLVE);
    let mut runs = Vec::new();
    for name in ["a", "b"] {
        let out_dir = dir.join(name);
        let out = ipdg(&["solve", s(&cfg), "-o", s(&out_dir)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        runs.push(fs::read_to_string(out_dir.join("solve.csv")).unwrap());
        assert!(out_dir.join("config.toml").exists());
    }
    assert!(runs[0].starts_with("iter,dof,h_max,kappa_hat_1,kappa_hat_2,kappa_hat_3,freq_1"));
    assert_eq!(runs[0].lines().count(), 2);
    assert_eq!(without_timing(&runs[0]), without_timing(&runs[1]));
}

#[test]
fn mesh_file_input_matches_the_generated_square() {
    let dir = scratch("meshfile");
    let file = dir.join("sq.mesh");
    assert!(ipdg(&["mesh", "gen", "--n", "2", "-o", s(&file)]).status.success());
    let from_file = SOLVE.replace("n = 2", "mesh = \"sq.mesh\"");
    let cfg_file = write_config(&dir, "file.cfg", &from_file);
    let cfg_gen = write_config(&dir, "gen.cfg", SOLVE);
    assert!(ipdg(&["solve", s(&cfg_file), "-o", s(&dir.join("f"))]).status.success());
    assert!(ipdg(&["solve", s(&cfg_gen), "-o", s(&dir.join("g"))]).status.success());
    let f = fs::read_to_string(dir.join("f/solve.csv")).unwrap();
    let g = fs::read_to_string(dir.join("g/solve.csv")).unwrap();
    assert_eq!(without_timing(&f), without_timing(&g));
}

#[test]
fn adapt_reports_one_row_per_solve() {
    let dir = scratch("adapt");
    let text = SOLVE.replace(
        "\"solve\"",
        "\"adapt\"\niterations = 2\nreferences = [0.46355423498481496]",
    );
    let cfg = write_config(&dir, "adapt.cfg", &text);
    let out = ipdg(&["adapt", s(&cfg), "-o", s(&dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.join("adapt.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(dir.join("final.mesh").exists());
}

#[test]
fn input_errors_exit_with_2_and_name_the_line() {
    let dir = scratch("input");
    let cfg = write_config(&dir, "bad.cfg", &SOLVE.replace("0.35", "0.6"));
    let out = ipdg(&["solve", s(&cfg), "-o", s(&dir)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.cfg:9") && err.contains("(0, 0.5]"), "{err}");

    let out = ipdg(&["sweep", s(&write_config(&dir, "ok.cfg", SOLVE)), "-o", s(&dir)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_errors_exit_with_3() {
    let dir = scratch("numerical");
    let text = SOLVE.replace("modes = 3", "modes = 500\nmax_subspace = 600\nbackend = \"dense\"");
    let cfg = write_config(&dir, "many.cfg", &text);
    let out = ipdg(&["solve", s(&cfg), "-o", s(&dir)]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn io_errors_exit_with_4() {
    let dir = scratch("io");
    let cfg = write_config(&dir, "solve.cfg", SOLVE);
    let blocker = write_config(&dir, "not_a_dir", "");
    let out = ipdg(&["solve", s(&cfg), "-o", s(&blocker.join("sub"))]);
    assert_eq!(out.status.code(), Some(4));
    let out = ipdg(&["solve", s(&dir.join("missing.cfg"))]);
    assert_eq!(out.status.code(), Some(4));
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tsg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsg")).args(args).env_remove("TSG_CELL_BUDGET").output().expect("spawn tsg")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "tsg failed: {}\n{}", String::from_utf8_lossy(&out.stderr), String::from_utf8_lossy(&out.stdout));
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    ok(&tsg(&["gen", "--radius", "16", "--out", path(&a)]));
    ok(&tsg(&["gen", "--radius", "16", "--out", path(&b)]));
    let (a, b) = (fs::read(a).unwrap(), fs::read(b).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# system=chair"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 33 * 33);
}

#[test]
fn solid_semigroup_check_passes() {
    let text = ok(&tsg(&["--system", "solid", "semigroup-check", "--r", "1", "--n", "4"]));
    assert!(text.contains("seed"));
    assert!(text.contains("solid"));
    assert!(!text.contains("\tfail"));
}

#[test]
fn render_draws_one_rect_per_tile() {
    let dir = tempfile::tempdir().unwrap();
    let (patch, svg) = (dir.path().join("p.txt"), dir.path().join("p.svg"));
    ok(&tsg(&["gen", "--depth", "3", "--out", path(&patch)]));
    ok(&tsg(&["render", "--patch", path(&patch), "--out", path(&svg)]));
    let tiles = fs::read_to_string(&patch).unwrap().lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).count();
    let svg = fs::read_to_string(&svg).unwrap();
    assert_eq!(tiles, 64);
    assert_eq!(svg.matches("<rect").count(), tiles);
}

#[test]
fn metric_of_a_window_with_itself_is_the_resolution_limit() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    ok(&tsg(&["gen", "--radius", "4", "--out", path(&w)]));
    let text = ok(&tsg(&["metric", path(&w), path(&w), "--radius", "4"]));
    assert!(text.contains("distance 1/4"));
    assert!(text.contains("agreement-radius 4"));
}

#[test]
fn atlas_of_the_solid_tiling_has_one_pattern() {
    let text = ok(&tsg(&["--system", "solid", "atlas", "--r", "2"]));
    assert!(text.starts_with("# system=solid r=2 patterns=1\n"));
}

#[test]
fn unknown_system_is_an_error() {
    let out = tsg(&["--system", "/nonexistent/tiling.toml", "atlas"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}

#[test]
fn small_cell_budget_is_reported() {
    let out = tsg(&["--cell-budget", "16", "gen", "--depth", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn filters_check_dumps_characters() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("chars.txt");
    let text = ok(&tsg(&["--system", "solid", "filters-check", "--windows", "3", "--dump", path(&dump)]));
    assert!(text.contains("# summary: pass=6 fail=0"));
    let dump = fs::read_to_string(dump).unwrap();
    assert_eq!(dump.lines().filter(|l| l.starts_with("# window")).count(), 3);
    assert!(dump.lines().filter(|l| !l.starts_with('#')).all(|l| l.len() == 18 && (l.ends_with(" 0") || l.ends_with(" 1"))));
}

#[test]
fn failing_check_exits_with_one() {
    // three-tile universes are too small for reconstruction
    let out = tsg(&["--system", "solid", "filters-check", "--n", "3", "--windows", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("filters.reconstruction"));
}

#[test]
fn groupoid_check_passes_on_the_checkerboard() {
    let text = ok(&tsg(&["--system", "checkerboard", "--seed", "5", "groupoid-check", "--windows", "4"]));
    assert!(text.contains("# seed: 5"));
    assert!(text.contains("groupoid.alpha.multiplicative"));
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rodtaper"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .arg("--quiet")
        .output()
        .expect("binary runs")
}

fn with_config(sub: &str, config: &str, dir: &Path) -> Output {
    let path = dir.with_extension("json");
    std::fs::write(&path, config).unwrap();
    run(&[sub, "--config", path.to_str().unwrap()], dir)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn smoke_run_writes_stage_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("disc");
    let o = with_config(
        "solve1d",
        r#"{"section": {"shape": "disc", "radius": 1}, "forces": "stretch", "solver": {"refine_levels": 2}}"#,
        &out,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["section.json", "torsion.json", "torsion_mesh.txt", "solution.csv", "energy.json", "summary.json"] {
        assert!(out.join(name).exists(), "{name}");
    }
    let s = read_json(&out.join("summary.json"));
    assert_eq!(s["passed"], Value::Bool(true));
    assert!(f(&s["energy"]["relative_gap"]) <= 1e-8);
    for key in ["area", "inertia1", "inertia2"] {
        assert!(f(&s["section"][key]) > 0.0);
    }
    assert!(s["solution_extrema"]["U3"]["max"].is_number());
    let csv = std::fs::read_to_string(out.join("solution.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 201);
}

#[test]
fn identical_configs_give_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"{"section": {"shape": "rectangle"}, "forces": "torsion", "solver": {"refine_levels": 2},
                  "rod": {"epsilon_list": [0.2, 0.1]}}"#;
    let out = tmp.path().join("a");
    let names = ["solution.csv", "probe.csv", "summary.json", "torsion.json", "torsion_mesh.txt"];
    let mut runs = Vec::new();
    for _ in 0..2 {
        assert!(with_config("all", cfg, &out).status.success());
        runs.push(names.map(|n| std::fs::read(out.join(n)).unwrap()));
    }
    for (k, name) in names.iter().enumerate() {
        assert!(runs[0][k] == runs[1][k], "{name}");
    }
}

#[test]
fn convergence_table_has_a_row_per_epsilon_and_case() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("v");
    let o = with_config(
        "verify3d",
        r#"{"section": {"shape": "rectangle"}, "rod": {"epsilon_list": [0.2, 0.1, 0.05]}}"#,
        &out,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 4);
    let s = read_json(&out.join("summary.json"));
    assert_eq!(s["convergence"]["order"], "quadratic");
    assert_eq!(s["convergence"]["rows"].as_array().unwrap().len(), 12);
}

#[test]
fn ellipse_torsion_matches_closed_form() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("e");
    let o = run(&["torsion", "--section.shape", "ellipse", "--section.a", "2", "--section.b", "1"], &out);
    assert!(o.status.success());
    // πa³b³/(a² + b²)
    let want = std::f64::consts::PI * 8.0 / 5.0;
    let k = f(&read_json(&out.join("torsion.json"))["stiffness"]);
    assert!((k - want).abs() < 0.01 * want, "{k}");
}

#[test]
fn zero_forces_give_a_zero_solution() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("z");
    let o = run(&["solve1d", "--forces", "{}", "--solver.refine_levels", "1"], &out);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(out.join("solution.csv")).unwrap();
    for line in csv.lines().skip(1) {
        assert!(line.split(',').skip(1).all(|c| c.parse::<f64>().unwrap() == 0.0), "{line}");
    }
}

#[test]
fn rotated_rectangle_section_is_principal() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("r");
    let o = run(
        &[
            "section",
            "--section.shape=rectangle",
            "--section.width=2",
            "--section.rotation=0.7",
            "--section.shift=[1,-3]",
        ],
        &out,
    );
    assert!(o.status.success());
    let s = read_json(&out.join("section.json"));
    // hw³/12 and wh³/12 for w = 2, h = 1
    assert!((f(&s["inertia1"]) - 2.0 / 3.0).abs() < 1e-12);
    assert!((f(&s["inertia2"]) - 1.0 / 6.0).abs() < 1e-12);
    assert!((f(&s["centroid_shift"][0]) - 1.0).abs() < 1e-12 && (f(&s["centroid_shift"][1]) + 3.0).abs() < 1e-12);
}

#[test]
fn floats_carry_seventeen_digits() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("d");
    assert!(run(&["section"], &out).status.success());
    let text = std::fs::read_to_string(out.join("section.json")).unwrap();
    let line = text.lines().find(|l| l.contains("\"area\"")).unwrap();
    let mantissa = line.split(':').nth(1).unwrap().trim().trim_end_matches(',').split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{line}");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("x");
    assert_eq!(run(&["section", "--rod.epsilon_list", "[0.6]"], &out).status.code(), Some(2));
    assert_eq!(run(&["section", "--section.colour", "red"], &out).status.code(), Some(2));
    assert_eq!(run(&["unwind"], &out).status.code(), Some(2));
    let bad = with_config("section", "{not json", &out);
    assert_eq!(bad.status.code(), Some(2));
    let o = run(&["section", "--solver.tolerances.frame", "-1"], &out);
    assert_eq!(o.status.code(), Some(4));
    let s = read_json(&out.join("summary.json"));
    assert_eq!(s["passed"], Value::Bool(false));
}

#[test]
fn flags_override_the_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let path = tmp.path().join("o.json");
    std::fs::write(&path, r#"{"rod": {"L": 1.0}, "seed": 1, "solver": {"refine_levels": 1}}"#).unwrap();
    let o = run(&["solve1d", "--config", path.to_str().unwrap(), "--rod.L", "2", "--seed", "9"], &out);
    assert!(o.status.success());
    let s = read_json(&out.join("summary.json"));
    assert_eq!(f(&s["config"]["rod"]["L"]), 2.0);
    assert_eq!(s["config"]["seed"], 9);
    let csv = std::fs::read_to_string(out.join("solution.csv")).unwrap();
    assert!(csv.lines().last().unwrap().starts_with("2.0000000000000000e0"));
}

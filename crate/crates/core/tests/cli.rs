use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_adiabatic-elim");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("ADIABATIC_ELIM_DT").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn export(dir: &TempDir, preset: &str, extra: &[&str]) -> String {
    let path = dir.path().join(format!("{preset}.json"));
    let path = path.to_str().unwrap().to_string();
    let mut args = vec!["preset", "export", preset, "--out", &path];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    path
}

fn edit(path: &str, f: impl FnOnce(&mut Value)) {
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    f(&mut doc);
    std::fs::write(path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn read_csv(path: &Path) -> Csv {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    Csv { header, rows }
}

#[test]
fn exported_presets_validate() {
    let dir = TempDir::new().unwrap();
    for preset in ["two-level", "four-level", "raman"] {
        let path = export(&dir, preset, &[]);
        let o = run(&["validate", &path]);
        assert_eq!(o.status.code(), Some(0), "{preset}: {}", stdout(&o));
        assert!(stdout(&o).starts_with("valid"));
    }
}

#[test]
fn preset_list_names_all_scenarios() {
    let o = run(&["preset", "list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in ["two-level", "four-level", "raman"] {
        assert!(text.contains(name));
    }
}

#[test]
fn wrong_direction_jump_is_reported_by_label() {
    let dir = TempDir::new().unwrap();
    let path = export(&dir, "two-level", &[]);
    edit(&path, |doc| {
        let m = &mut doc["jumps"][0]["matrix"];
        let lowering = m[0][1].clone();
        m[0][1] = serde_json::json!([0.0, 0.0]);
        m[1][0] = lowering;
        doc["jumps"][0]["label"] = "backwards".into();
    });
    let o = run(&["validate", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("backwards"), "{}", stdout(&o));
}

#[test]
fn small_hermiticity_violation_is_reported_with_residual() {
    let dir = TempDir::new().unwrap();
    let path = export(&dir, "two-level", &[]);
    edit(&path, |doc| {
        doc["hamiltonian"][0][1][1] = 1e-6.into();
    });
    let o = run(&["validate", &path]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("violation"));
    assert!(text.contains("1e-6") || text.contains("1e-06") || text.contains("5e-7"), "{text}");
}

#[test]
fn malformed_documents_exit_with_parse_code() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"dimension\": 2,\n  \"ground_indices\": [0],\n  \"hamiltonian\": [[1, 2]\n").unwrap();
    let o = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));

    let o = run(&["validate", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn derive_prints_two_level_stark_shift() {
    let (omega, delta, gamma) = (0.1f64, 1.0f64, 0.2f64);
    let o = run(&["derive", "--preset", "two-level"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.contains("<g|h_eff|g>") || l.contains("<0|h_eff|0>")).unwrap();
    let value: f64 = line.split('=').nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    let expected = -omega * omega * delta / (4.0 * delta * delta + gamma * gamma);
    assert!((value - expected).abs() <= 1e-12 * expected.abs(), "{line}");
    assert!(text.contains("excited propagator elements"));
    assert!(text.contains("lindblad-sum identity residual"));
}

#[test]
fn derive_prints_basic_and_dressed_side_by_side() {
    let o = run(&["derive", "--preset", "raman", "--variant", "basic", "--variant", "dressed"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("== basic ==") && text.contains("== dressed =="));
    let line = text.lines().find(|l| l.starts_with("difference basic vs dressed")).unwrap();
    let norm: f64 = line.split("||h_eff||_F = ").nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!(norm > 0.0, "{line}");
}

#[test]
fn derive_reports_identity_residual_for_four_level() {
    let o = run(&["derive", "--preset", "four-level"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("lindblad-sum identity residual")).unwrap();
    let residual: f64 = line.rsplit(": ").next().unwrap().parse().unwrap();
    assert!(residual <= 1e-10, "{line}");
}

#[test]
fn derive_time_dependent_variant_needs_fields_or_time() {
    let o = run(&["derive", "--preset", "two-level", "--variant", "fields"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("time-averaged rates"));
    let o = run(&["derive", "--preset", "two-level", "--variant", "general", "--t", "1.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("at t = 1.5"));
}

#[test]
fn simulate_writes_well_formed_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("traj.csv");
    let o = run(&[
        "simulate", "--preset", "four-level", "--omega", "0.05", "--t-end", "200", "--dt", "0.05",
        "--sample-every", "40", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = read_csv(&out);
    assert_eq!(csv.header, ["t", "pop_0", "pop_1", "pop_2", "pop_3", "trace"]);
    assert!(csv.rows.iter().all(|r| r.len() == 4 + 2));
    assert!(csv.rows.windows(2).all(|w| w[0][0] < w[1][0]));
    assert!(csv.rows.iter().all(|r| (r[5] - 1.0).abs() <= 1e-6));
    assert_eq!(csv.rows.last().unwrap()[0], 200.0);

    // |g2> is filled up by the engineered decay
    let g2: Vec<f64> = csv.rows.iter().map(|r| r[2]).collect();
    let half = g2.len() / 2;
    assert!(g2[half..].windows(2).all(|w| w[1] >= w[0] - 1e-9));
    assert!(g2.last().unwrap() > &g2[half]);
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--preset", "raman", "--t-end", "20", "--dt", "0.05", "--sample-every", "10"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn simulate_without_dynamics_keeps_populations_constant() {
    let dir = TempDir::new().unwrap();
    let path = export(&dir, "two-level", &[]);
    edit(&path, |doc| {
        let zero = serde_json::json!([[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]);
        doc["hamiltonian"] = zero.clone();
        doc["jumps"][0]["matrix"] = zero;
    });
    let out = dir.path().join("frozen.csv");
    let o = run(&["simulate", &path, "--t-end", "3", "--initial", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = read_csv(&out);
    for r in &csv.rows {
        assert_eq!(&r[1..], &[0.0, 1.0, 1.0]);
    }
}

#[test]
fn simulate_effective_generator_runs() {
    let o = run(&["simulate", "--preset", "two-level", "--generator", "effective:dressed", "--t-end", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&["simulate", "--preset", "two-level", "--generator", "sideways", "--t-end", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oversized_step_is_an_integration_failure() {
    let o = run(&["simulate", "--preset", "two-level", "--gamma", "2", "--t-end", "10", "--dt", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("dt"), "{}", stderr(&o));
}

#[test]
fn step_size_can_come_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("env.csv");
    let o = Command::new(BIN)
        .args(["simulate", "--preset", "two-level", "--t-end", "1", "--out", out.to_str().unwrap()])
        .env("ADIABATIC_ELIM_DT", "0.25")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let times: Vec<f64> = read_csv(&out).rows.iter().map(|r| r[0]).collect();
    assert_eq!(times, [0.0, 0.25, 0.5, 0.75, 1.0]);
}

#[test]
fn compare_writes_metrics_and_verdict() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("metrics.json");
    let o = run(&[
        "compare", "--preset", "two-level", "--delta", "5", "--gamma", "1", "--t-end", "20", "--dt", "0.01",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("agree"), "{}", stdout(&o));
    let metrics: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let map = metrics.as_object().unwrap();
    assert!(map.values().all(|v| !v.is_object() && !v.is_array()));
    assert!(map["max_population_deviation"].as_f64().unwrap() <= 0.05);
    assert_eq!(map["variant"], "basic");
}

#[test]
fn compare_deviation_grows_with_drive() {
    let deviation = |omega: &str| {
        let o = run(&["compare", "--preset", "four-level", "--omega", omega, "--t-end", "300", "--dt", "0.05"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let text = stdout(&o);
        let json = &text[..text.rfind('}').unwrap() + 1];
        serde_json::from_str::<Value>(json).unwrap()["max_population_deviation"].as_f64().unwrap()
    };
    assert!(deviation("0.1") > deviation("0.02"));
}

#[test]
fn preset_round_trip_is_bit_identical() {
    let dir = TempDir::new().unwrap();
    for preset in ["two-level", "four-level", "raman"] {
        let path = export(&dir, preset, &[]);
        for variant in ["basic", "dressed", "general"] {
            let from_file = dir.path().join(format!("{preset}-{variant}-file.json"));
            let from_preset = dir.path().join(format!("{preset}-{variant}-preset.json"));
            let a = run(&["derive", &path, "--variant", variant, "--t", "0.7", "--out", from_file.to_str().unwrap()]);
            let b = run(&[
                "derive", "--preset", preset, "--variant", variant, "--t", "0.7", "--out",
                from_preset.to_str().unwrap(),
            ]);
            assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
            assert_eq!(b.status.code(), Some(0), "{}", stderr(&b));
            assert_eq!(std::fs::read(&from_file).unwrap(), std::fs::read(&from_preset).unwrap(), "{preset} {variant}");
        }

        let a = run(&["derive", &path, "--variant", "dressed"]);
        let b = run(&["derive", "--preset", preset, "--variant", "dressed"]);
        assert_eq!(a.stdout, b.stdout, "{preset}");
    }
}

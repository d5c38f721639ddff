use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use zenoline_cli::output::parse_csv;
use zenoline_core::zeno::{segment_regimes, DEFAULT_SLOPE_TOL};
use zenoline_core::DecayCurve;

fn zenoline(args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_zenoline"));
    cmd.args(args);
    if let Some(n) = threads {
        cmd.env("ZENOLINE_THREADS", n.to_string());
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const STATIONARY_EXACT: &str = r#"
[worldline]
family = "stationary"

[channel]
kind = "sigma_z_exact"

[qubit]
omega0 = 2.0

[ohmic]
g = 0.01
omega_c = 10.0

[grid]
tau_min = 0.02
tau_max = 3.0
n_points = 150

[output]
csv = "out/run.csv"
svg = "out/run.svg"
"#;

const OSCILLATING: &str = r#"
[worldline]
family = "oscillating"
omega = 1.98
speed = 0.99

[channel]
kind = "sigma_x"

[qubit]
omega0 = 2.0

[ohmic]
g = 0.01
omega_c = 10.0

[grid]
n_points = 120

[output]
csv = "osc.csv"
"#;

#[test]
fn stationary_exact_gamma_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.toml", STATIONARY_EXACT);
    let out = zenoline(&["run", config.to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let rows = parse_csv(&std::fs::read_to_string(dir.path().join("out/run.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 150);
    for r in &rows {
        let chi = -0.02 * (1.0 + 100.0 * r.tau * r.tau).ln();
        let gamma = -(0.5 * (1.0 + chi.exp())).ln() / r.tau;
        assert!((r.gamma - gamma).abs() <= 1e-6 * gamma, "tau = {}: {} vs {gamma}", r.tau, r.gamma);
        assert!(r.valid);
    }

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/run.json")).unwrap()).unwrap();
    assert_eq!(meta["tool"], "zenoline");
    assert_eq!(meta["config"]["channel"]["kind"], "sigma_z_exact");
    assert!((meta["resolved"]["epsilon"].as_f64().unwrap() - 0.05).abs() < 1e-15);
    assert!(meta["kernel_evals"].as_u64().unwrap() > 0);
    assert_eq!(meta["convergence"]["passed"], true);
    assert!(meta["segments"].as_array().is_some_and(|s| !s.is_empty()));

    let svg = std::fs::read_to_string(dir.path().join("out/run.svg")).unwrap();
    assert!(svg.starts_with("<svg") && !svg.contains("href"));
}

#[test]
fn missing_field_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "bad.toml", &STATIONARY_EXACT.replace("kind = \"sigma_z_exact\"", ""));
    let out = zenoline(&["run", config.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("channel.kind"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.toml", STATIONARY_EXACT);
    let path = config.to_str().unwrap();
    for overrides in [
        vec!["--worldline.acceleraton=3"],
        vec!["--grid.n_points=4"],
        vec!["--qubit.c=0.5", "--qubit.epsilon=0.05"],
        vec!["--grid.tau_min=-1"],
    ] {
        let mut args = vec!["run", path];
        args.extend(overrides.iter());
        let out = zenoline(&args, None);
        assert_eq!(out.status.code(), Some(2), "{overrides:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let syntax = write_config(dir.path(), "syntax.toml", "[grid]\ntau_max = = 3\n");
    let out = zenoline(&["run", syntax.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn broken_perturbation_theory_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = OSCILLATING
        .replace("[ohmic]\ng = 0.01\nomega_c = 10.0", "")
        .replace("omega0 = 2.0", "omega0 = 2.0\nc = 60.0\nepsilon = 0.05");
    let config = write_config(dir.path(), "strong.toml", &text);
    let out = zenoline(&["run", config.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not positive"));
}

#[test]
fn unconverged_quadrature_exits_3_with_advice() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "osc.toml", OSCILLATING);
    let out = zenoline(
        &[
            "convergence-check",
            config.to_str().unwrap(),
            "--grid.n_points=8",
            "--quadrature.base_panels_per_unit=8",
            "--quadrature.gauss_order=4",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stderr).contains("base_panels_per_unit"));

    let ok = zenoline(&["convergence-check", config.to_str().unwrap()], None);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let report: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert!(report["convergence"]["relative_difference"].as_f64().unwrap() < 1e-6);
}

#[test]
fn csv_regimes_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "osc.toml", OSCILLATING);
    let out = zenoline(&["run", config.to_str().unwrap(), "--channel.kind=sigma_z_exact", "--grid.tau_max=2.0"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = parse_csv(&std::fs::read_to_string(dir.path().join("osc.csv")).unwrap()).unwrap();
    let curve = DecayCurve::new(rows.iter().map(|r| r.tau).collect(), rows.iter().map(|r| r.gamma).collect()).unwrap();
    let seg = segment_regimes(&curve, DEFAULT_SLOPE_TOL).unwrap();
    let written: Vec<_> = rows.iter().map(|r| r.regime).collect();
    assert_eq!(seg.point_labels, written);
    assert!(seg.segments.len() > 1);
}

#[test]
fn csv_is_identical_across_thread_counts_and_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "osc.toml", OSCILLATING);
    let mut outputs = Vec::new();
    for (i, n) in [1, 4, 8, 4].into_iter().enumerate() {
        let csv = dir.path().join(format!("t{i}.csv"));
        let out = zenoline(&["run", config.to_str().unwrap(), &format!("--output.csv={}", csv.display())], Some(n));
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(&csv).unwrap());
    }
    assert!(outputs.windows(2).all(|p| p[0] == p[1]));
}

#[test]
fn invalid_thread_count_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.toml", STATIONARY_EXACT);
    let out = Command::new(env!("CARGO_BIN_EXE_zenoline"))
        .args(["run", config.to_str().unwrap()])
        .env("ZENOLINE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_one_curve_per_value_and_an_overlay() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[worldline]
family = "uniform_acceleration"
acceleration = 1.0
[channel]
kind = "sigma_z_exact"
[qubit]
omega0 = 2.0
[ohmic]
g = 0.01
omega_c = 10.0
[grid]
tau_min = 0.1
tau_max = 2.0
n_points = 40
[output]
csv = "ua.csv"
svg = "ua.svg"
[sweep]
parameter = "worldline.acceleration"
values = [1.0, 10.0, 100.0]
"#;
    let config = write_config(dir.path(), "sweep.toml", text);
    let out = zenoline(&["sweep", config.to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut curves = Vec::new();
    for a in ["1.0", "10.0", "100.0"] {
        let csv = dir.path().join(format!("ua_acceleration_{a}.csv"));
        curves.push(parse_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap());
        let meta: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(csv.with_extension("json")).unwrap()).unwrap();
        assert_eq!(meta["config"]["worldline"]["acceleration"].as_f64().unwrap().to_string(), a.trim_end_matches(".0"));
    }
    assert!(curves.iter().all(|c| c.len() == 40));
    assert_ne!(curves[0], curves[2]);
    let svg = std::fs::read_to_string(dir.path().join("ua.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
}

#[test]
fn benchmark_figure_overlays_both_solutions() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        zenoline(&["reproduce-figure", "bm", "--out-dir", dir.path().to_str().unwrap(), "--n-points", "120"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(dir.path().join("bm.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    let read = |name: &str| parse_csv(&std::fs::read_to_string(dir.path().join(name)).unwrap()).unwrap();
    let (pert, exact) = (read("bm_perturbative.csv"), read("bm_exact.csv"));
    // the two solutions differ at second order in the coupling
    let c2 = (2.0 * std::f64::consts::PI * 0.1f64).powi(2);
    for (p, e) in pert.iter().zip(&exact) {
        assert!((p.gamma - e.gamma).abs() <= c2 * e.gamma, "tau = {}", p.tau);
    }
    assert!(dir.path().join("bm.json").exists());
}

#[test]
fn validate_worldline_reports_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_config(dir.path(), "good.csv", "t,x,y,z\n# comment\n0,0,0,0\n1,0.5,0,0\n2,1,0,0\n3,1.5,0,0\n");
    let out = zenoline(&["validate-worldline", good.to_str().unwrap()], None);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("4 rows"));

    let fast = write_config(dir.path(), "fast.csv", "t,x,y,z\n0,0,0,0\n1,2,0,0\n2,1,0,0\n3,1.5,0,0\n");
    let out = zenoline(&["validate-worldline", fast.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("superluminal"));
}

#[test]
fn sampled_worldline_runs_from_config_relative_path() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("t,x,y,z\n");
    for i in 0..400 {
        let t = 4.0 * i as f64 / 399.0;
        text.push_str(&format!("{t},{},0,0\n", 0.25 * (2.0 * t).sin()));
    }
    write_config(dir.path(), "path.csv", &text);
    let config = OSCILLATING
        .replace("family = \"oscillating\"\nomega = 1.98\nspeed = 0.99", "family = \"sampled\"\npath = \"path.csv\"")
        .replace("n_points = 120", "n_points = 20\ntau_max = 2.0");
    let config = write_config(dir.path(), "sampled.toml", &config);
    let out = zenoline(&["run", config.to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(parse_csv(&std::fs::read_to_string(dir.path().join("osc.csv")).unwrap()).unwrap().len(), 20);
}

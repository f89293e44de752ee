use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use exp_cli::ResultTable;

fn mec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const AOI: &str = r#"
kind = "aoi"
[model]
topology = "primary"
lambda = 4.0
p = 0.5
mu1 = 2.0
mu2 = 0.5
mu3 = 15.0

[[sweep.axis]]
param = "model.mu1"
values = [1.0, 2.0, 3.0]
"#;

const SWEEP: &str = r#"
kind = "sweep"
seed = 3
[sweep]
experiment = "mfe"
[system]
n = 10
mu3 = 15.0
[[types]]
id = "a"
lambda = 1.0
v = 10.0
eta = 0.5
p_max = 1.0
f_max = 0.8
[solver]
multi_start = 2
[[sweep.axis]]
param = "types.lambda"
values = [1.0, 2.0]
[[sweep.axis]]
param = "mu3"
start = 10.0
stop = 20.0
step = 5.0
"#;

#[test]
fn aoi_writes_a_readable_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "aoi.toml", AOI);
    let out = dir.path().join("aoi.csv");
    let o = mec(&[
        "aoi",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = ResultTable::read(&out).unwrap();
    assert_eq!(t.rows.len(), 3);
    assert_eq!(t.nums("model.mu1").unwrap(), vec![1.0, 2.0, 3.0]);
    let d = t.nums("delta").unwrap();
    let cf = t.nums("delta_closed_form").unwrap();
    for (a, b) in d.iter().zip(&cf) {
        assert!((a - b).abs() <= 1e-9 * b, "{a} vs {b}");
    }
    assert_eq!(t.get_meta("experiment"), Some("aoi"));
    assert_eq!(t.get_meta("config_sha256").map(str::len), Some(64));
}

#[test]
fn stdout_is_used_without_out() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "aoi.toml", AOI);
    let o = mec(&["aoi", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let t = ResultTable::from_csv(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(t.rows.len(), 3);
}

#[test]
fn parallel_and_serial_sweeps_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.toml", SWEEP);
    let cfg = cfg.to_str().unwrap();
    let serial = mec(&["sweep", "--config", cfg, "--jobs", "1"]);
    let parallel = mec(&["sweep", "--config", cfg, "--jobs", "3"]);
    assert_eq!(
        code(&serial),
        0,
        "{}",
        String::from_utf8_lossy(&serial.stderr)
    );
    assert_eq!(code(&parallel), 0);
    assert_eq!(serial.stdout, parallel.stdout);
    let t = ResultTable::from_csv(&String::from_utf8(serial.stdout).unwrap()).unwrap();
    assert_eq!(t.rows.len(), 6);
    assert_eq!(
        t.nums("mu3").unwrap(),
        vec![10.0, 15.0, 20.0, 10.0, 15.0, 20.0]
    );
}

#[test]
fn seed_flag_changes_the_recorded_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "aoi.toml", AOI);
    let o = mec(&["aoi", "--config", cfg.to_str().unwrap(), "--seed", "42"]);
    let t = ResultTable::from_csv(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(t.get_meta("seed"), Some("42"));
}

#[test]
fn invalid_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("garbage.toml", "kind = \"aoi\"\n[model\n".to_owned()),
        ("unknown_key.toml", format!("{AOI}\ncolour = 1\n")),
        (
            "unknown_param.toml",
            SWEEP.replace("param = \"mu3\"", "param = \"mu4\""),
        ),
        (
            "empty_range.toml",
            SWEEP.replace("stop = 20.0", "stop = 5.0"),
        ),
        (
            "empty_values.toml",
            SWEEP.replace("values = [1.0, 2.0]", "values = []"),
        ),
        ("bad_rate.toml", AOI.replace("mu3 = 15.0", "mu3 = -1.0")),
    ];
    for (name, text) in &cases {
        let cfg = write(dir.path(), name, text);
        let sub = if name.contains("param") || name.contains("range") || name.contains("values") {
            "sweep"
        } else {
            "aoi"
        };
        let o = mec(&[sub, "--config", cfg.to_str().unwrap()]);
        assert_eq!(
            code(&o),
            2,
            "{name}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn subcommand_must_match_the_kind() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "aoi.toml", AOI);
    assert_eq!(code(&mec(&["mfe", "--config", cfg.to_str().unwrap()])), 2);
    let flat = write(
        dir.path(),
        "flat.toml",
        &AOI[..AOI.find("[[sweep.axis]]").unwrap()],
    );
    assert_eq!(
        code(&mec(&["sweep", "--config", flat.to_str().unwrap()])),
        2
    );
}

#[test]
fn missing_config_file_is_an_invalid_input() {
    assert_eq!(code(&mec(&["aoi", "--config", "/nonexistent/x.toml"])), 2);
    assert_eq!(code(&mec(&["aoi", "--preset", "nope"])), 2);
}

#[test]
fn non_convergence_exits_with_three_after_writing() {
    let dir = tempfile::tempdir().unwrap();
    let text = SWEEP.replace(
        "multi_start = 2",
        "multi_start = 1\nmax_outer = 1\neps1 = 1e-14",
    );
    let cfg = write(dir.path(), "slow.toml", &text);
    let out = dir.path().join("slow.csv");
    let o = mec(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let t = ResultTable::read(&out).unwrap();
    assert!(t.nums("converged").unwrap().contains(&0.0));
}

#[test]
fn degenerate_simulation_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
kind = "simulate"
[model]
topology = "equitable"
lambda = 1.0
p = 0.5
mu1 = 1.0
mu2 = 1.0
mu3 = 15.0
horizon = 1e-6
"#;
    let cfg = write(dir.path(), "short.toml", text);
    let o = mec(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn simulate_reports_the_analytic_value() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
kind = "simulate"
seed = 5
[model]
topology = "equitable"
lambda = 2.0
p = 0.5
mu1 = 1.0
mu2 = 1.0
mu3 = 15.0
lambda_e = 3.0
horizon = 2e4
"#;
    let cfg = write(dir.path(), "sim.toml", text);
    let o = mec(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = ResultTable::from_csv(&String::from_utf8(o.stdout).unwrap()).unwrap();
    let z = t.nums("z").unwrap()[0];
    assert!(z.is_finite() && z < 5.0, "{z}");
}

#[test]
fn list_presets_names_eight_plus_validate() {
    let o = mec(&["list-presets"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let names: Vec<&str> = text
        .lines()
        .filter_map(|l| l.split_whitespace().next())
        .collect();
    assert_eq!(names.len(), 9);
    assert_eq!(names.last(), Some(&"validate"));
}

#[test]
fn fig7_preset_runs_from_the_command_line() {
    let o = mec(&["mfe", "--preset", "fig7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = ResultTable::from_csv(&String::from_utf8(o.stdout).unwrap()).unwrap();
    let p = t.nums("p").unwrap();
    assert_eq!(p.len(), 11);
    assert!(p.windows(2).all(|w| w[1] >= w[0]), "{p:?}");
}

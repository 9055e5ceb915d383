//! End-to-end checks of the binary: golden values, exit codes, config
//! merging, determinism, and CSV round-trips.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_micromaser"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn temp_path(label: &str) -> PathBuf {
    std::env::temp_dir().join(format!(
        "micromaser-cli-{label}-{}",
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap_or_default()
            .as_nanos()
    ))
}

/// Every float the tool writes carries 17 significant digits, so parsing
/// and re-formatting must reproduce the exact bytes.
fn assert_numeric_round_trip(csv_text: &str) {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(csv_text.as_bytes());
    let mut floats = 0;
    for record in reader.records() {
        let record = record.expect("well-formed CSV");
        for field in record.iter() {
            if field.contains('e') {
                if let Ok(v) = field.parse::<f64>() {
                    assert_eq!(format!("{v:.16e}"), field, "field {field} drifted");
                    floats += 1;
                }
            }
        }
    }
    assert!(floats > 0, "no float fields found");
}

#[test]
fn help_lists_every_command_with_units() {
    let root = stdout_of(&["--help"]);
    for cmd in [
        "steady",
        "scan",
        "evolve",
        "trajectory",
        "thermal",
        "trapped",
    ] {
        assert!(root.contains(cmd), "root help lacks {cmd}");
    }
    for cmd in [
        "steady",
        "scan",
        "evolve",
        "trajectory",
        "thermal",
        "trapped",
    ] {
        let help = stdout_of(&[cmd, "--help"]);
        for unit in ["GHz", "1/s", "rad", "m/s"] {
            assert!(help.contains(unit), "{cmd} help lacks unit {unit}");
        }
    }
    let evolve = stdout_of(&["evolve", "--help"]);
    assert!(evolve.contains("Integration time, s"));
    let trajectory = stdout_of(&["trajectory", "--help"]);
    assert!(trajectory.contains("transit time, s"));
}

#[test]
fn steady_csv_passes_its_own_residual_bar() {
    let text = stdout_of(&[
        "steady",
        "--nu",
        "0.15",
        "--pump-ratio",
        "50",
        "--phi",
        "1.0",
    ]);
    let summary = text.lines().nth(1).expect("summary row");
    let fields: Vec<&str> = summary.split(',').collect();
    let mean: f64 = fields[0].parse().unwrap();
    let residual: f64 = fields[4].parse().unwrap();
    assert!((mean - 27.296042788330482).abs() < 1e-8, "mean {mean}");
    assert!(residual < 1e-10, "residual {residual}");
    assert_numeric_round_trip(&text);
}

#[test]
fn unpumped_steady_rows_are_thermal() {
    let text = stdout_of(&["steady", "--pump-ratio", "0", "--nu", "1", "--n-max", "64"]);
    let mut rows = text.lines().skip_while(|l| !l.starts_with("n,p"));
    rows.next();
    let p: Vec<f64> = rows
        .filter_map(|l| l.split(',').nth(1))
        .map(|v| v.parse().unwrap())
        .collect();
    // nu = 1 gives the geometric law p(n+1)/p(n) = 1/2.
    for pair in p.windows(2).take(20) {
        assert!((pair[1] / pair[0] - 0.5).abs() < 1e-12);
    }
}

#[test]
fn evolve_reaches_the_closed_form_mean() {
    let text = stdout_of(&[
        "evolve",
        "--pump-ratio",
        "0",
        "--initial",
        "fock:10",
        "--duration",
        "0.1",
        "--decay-A",
        "21.5",
        "--nu",
        "0.15",
        "--n-max",
        "64",
        "--format",
        "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mean = doc["final_mean"].as_f64().unwrap();
    let expected = 0.15 + (10.0 - 0.15) * (-21.5f64 * 0.1).exp();
    assert!((mean - expected).abs() < 1e-6, "mean {mean} vs {expected}");

    let csv_text = stdout_of(&[
        "evolve",
        "--pump-ratio",
        "0",
        "--initial",
        "fock:10",
        "--duration",
        "0.1",
        "--decay-A",
        "21.5",
        "--nu",
        "0.15",
        "--n-max",
        "64",
    ]);
    assert_numeric_round_trip(&csv_text);
    // Three blocks: summary, time series, final distribution.
    assert_eq!(csv_text.split("\n\n").count(), 3);
}

#[test]
fn trapped_lists_the_square_ladder() {
    let text = stdout_of(&["trapped", "--phi", "3.14159265358979", "--n-max", "20"]);
    let pairs: Vec<(usize, u32)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',');
            (
                it.next().unwrap().parse().unwrap(),
                it.next().unwrap().parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(pairs, vec![(0, 1), (3, 2), (8, 3), (15, 4)]);
    assert_numeric_round_trip(&text);
}

#[test]
fn scan_through_pi_shows_the_trapped_dip() {
    let text = stdout_of(&[
        "scan",
        "--axis",
        "phi",
        "--values",
        "3.0,3.14159265358979323846,3.3",
        "--pump-ratio",
        "20",
        "--nu",
        "0",
        "--n-max",
        "128",
    ]);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    let mean = |row: &str| row.split(',').nth(2).unwrap().parse::<f64>().unwrap();
    let side_a = mean(rows[0]);
    let at_pi = mean(rows[1]);
    let side_b = mean(rows[2]);
    // phi = pi traps the empty cavity at the vacuum rung.
    assert!(at_pi < 1e-12, "mean at pi {at_pi}");
    assert!(side_a > 1.0 && side_b > 1.0);
    assert!(rows[1].split(',').nth(8).unwrap() == "0", "trapped_below");
    assert_numeric_round_trip(&text);
}

#[test]
fn scan_keeps_failing_rows_in_place() {
    let text = stdout_of(&[
        "scan",
        "--axis",
        "pump-ratio",
        "--values",
        "5,1e12",
        "--phi",
        "1.0",
        "--nu",
        "0",
        "--n-max",
        "64",
    ]);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].ends_with(','), "first row should carry no error");
    assert!(
        rows[1].contains("truncation overflow"),
        "second row should fail in place: {}",
        rows[1]
    );
}

#[test]
fn trajectory_event_log_is_deterministic() {
    let args = [
        "trajectory",
        "--atoms",
        "2000",
        "--pump-ratio",
        "20",
        "--decay-A",
        "21.5",
        "--nu",
        "0.15",
        "--phi",
        "1.0",
        "--n-max",
        "128",
        "--seed",
        "42",
    ];
    let first = stdout_of(&args);
    let second = stdout_of(&args);
    assert_eq!(first, second);
    assert!(first.lines().count() > 4000, "arrivals plus exits");
    assert!(first.starts_with("time_s,kind,n_after\n"));
    assert_numeric_round_trip(&first);
}

#[test]
fn trajectory_json_reports_the_run_metadata() {
    let text = stdout_of(&[
        "trajectory",
        "--atoms",
        "5000",
        "--pump-ratio",
        "20",
        "--decay-A",
        "21.5",
        "--nu",
        "0.15",
        "--phi",
        "1.0",
        "--n-max",
        "128",
        "--seed",
        "9",
        "--burn-in-s",
        "0.2",
        "--compare-steady",
        "--format",
        "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["seed"], 9);
    assert_eq!(doc["rng"], "chacha12");
    assert_eq!(doc["atoms_simulated"], 5000);
    // Analytic steady value at this operating point is 0.2852.
    let down = doc["atom_down_fraction"].as_f64().unwrap();
    assert!(down > 0.2 && down < 0.4, "down fraction {down}");
    let tv = doc["tv_distance"].as_f64().unwrap();
    assert!(tv < 0.2, "tv {tv}");
}

#[test]
fn thermal_matches_the_reference_occupation() {
    let text = stdout_of(&["thermal", "--temperature-k", "0.5", "--n-max", "32"]);
    let nu: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((nu - 0.145).abs() < 0.05 * 0.145, "nu {nu}");
    assert_numeric_round_trip(&text);
}

#[test]
fn validation_failures_exit_2() {
    let cases: [&[&str]; 6] = [
        &["trajectory", "--atoms", "0", "--pump-ratio", "20"],
        &["steady", "--nu", "-1"],
        &["steady", "--pump-rate", "430", "--pump-ratio", "20"],
        &["scan", "--axis", "phi", "--pump-ratio", "20"],
        &["evolve", "--duration", "0.1", "--initial", "fock:banana"],
        &["trapped", "--n-max", "20"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
    let out = run(&["steady", "--nu", "-1"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nu"));
}

#[test]
fn truncation_failures_exit_3() {
    let out = run(&[
        "steady",
        "--nu",
        "2000",
        "--pump-ratio",
        "1",
        "--phi",
        "1.0",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_output_directory_exits_4() {
    let out = run(&[
        "steady",
        "--pump-ratio",
        "5",
        "--phi",
        "1.0",
        "--out",
        "/nonexistent-dir/result.csv",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn out_file_matches_stdout() {
    let path = temp_path("steady-out");
    let args = [
        "steady",
        "--pump-ratio",
        "20",
        "--nu",
        "0.15",
        "--phi",
        "1.0",
    ];
    let streamed = stdout_of(&args);
    let out = bin()
        .args(args)
        .arg("--out")
        .arg(&path)
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let written = std::fs::read_to_string(&path).expect("read output file");
    std::fs::remove_file(&path).ok();
    assert_eq!(streamed, written);
}

#[test]
fn config_file_fills_gaps_and_flags_override() {
    let path = temp_path("config.json");
    std::fs::write(
        &path,
        r#"{"pump-ratio": 20.0, "nu": 0.15, "phi": 1.0, "n-max": 128}"#,
    )
    .unwrap();
    let merged = stdout_of(&["steady", "--config", path.to_str().unwrap(), "--phi", "1.2"]);
    let explicit = stdout_of(&[
        "steady",
        "--pump-ratio",
        "20",
        "--nu",
        "0.15",
        "--phi",
        "1.2",
        "--n-max",
        "128",
    ]);
    std::fs::remove_file(&path).ok();
    assert_eq!(merged, explicit);
}

#[test]
fn config_rejects_unknown_keys() {
    let path = temp_path("config-typo.json");
    std::fs::write(&path, r#"{"pump-ratioo": 20.0}"#).unwrap();
    let out = run(&["steady", "--config", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn profile_integral_feeds_the_rabi_angle() {
    let path = temp_path("profile.csv");
    let g = std::f64::consts::PI / 5e-5;
    std::fs::write(
        &path,
        format!("time_s,g_rad_per_s\n0,{g:.16e}\n2.5e-5,{g:.16e}\n5e-5,{g:.16e}\n"),
    )
    .unwrap();
    let text = stdout_of(&[
        "trapped",
        "--profile",
        path.to_str().unwrap(),
        "--n-max",
        "20",
    ]);
    std::fs::remove_file(&path).ok();
    let first: Vec<usize> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(first, vec![0, 3, 8, 15]);
}

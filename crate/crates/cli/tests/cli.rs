use std::process::{Command, Output};

fn qdtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdtree")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qdtree(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Parses CSV output into a header and rows of raw fields.
fn csv(args: &[&str]) -> (Vec<String>, Vec<Vec<String>>) {
    let text = stdout(args);
    let mut lines = text.lines();
    let split = |l: &str| l.split(',').map(String::from).collect::<Vec<_>>();
    let header = split(lines.next().expect("header"));
    (header, lines.map(split).collect())
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("`{s}` is not a number"))
}

#[test]
fn iterate_writes_one_row_per_generation() {
    let (header, rows) = csv(&["iterate", "--p", "0.3", "--f", "0.2", "--t", "50"]);
    assert_eq!(rows.len(), 51);
    assert_eq!(header, ["t", "p", "f", "pi_n", "pi_z", "pi_x", "pi_y", "pi_a"]);
    let pi_z = num(&rows[50][col(&header, "pi_z")]);
    assert!((pi_z - 0.759517).abs() < 1e-6, "{pi_z}");
}

#[test]
fn z_only_switches_the_initial_condition() {
    let (_, plain) = csv(&["iterate", "--p", "0.3", "--f", "0.2", "--t", "0"]);
    let (_, z_only) = csv(&["iterate", "--p", "0.3", "--f", "0.2", "--t", "0", "--z-only"]);
    assert_eq!(plain[0][3..], ["0.8", "0.0", "0.0", "0.0", "0.2"]);
    assert_eq!(z_only[0][3..], ["0.8", "0.2", "0.0", "0.0", "0.0"]);
}

#[test]
fn phase_diagram_finds_both_transitions() {
    let (header, rows) = csv(&["phase-diagram", "--p-grid", "0:1:0.005", "--f-grid", "0.3,0.7"]);
    let (p, phase, order) = (col(&header, "p"), col(&header, "phase"), col(&header, "one_minus_pi_n"));
    let at_f = |f: &'static str| rows.iter().filter(move |r| r[1] == f);
    let first = |f: &'static str, label: &str| at_f(f).find(|r| r[phase] == label).map(|r| num(&r[p])).unwrap();
    assert_eq!(first("0.3", "Mixed"), 0.605);
    assert_eq!(first("0.3", "Encoding"), 0.755);
    let critical: Vec<f64> = at_f("0.3").filter(|r| r[phase] == "Critical").map(|r| num(&r[p])).collect();
    assert_eq!(critical, [0.6, 0.75]);

    for r in at_f("0.3").filter(|r| r[phase] == "Mixed") {
        let u = qdtree::recursion::mixed_weight(num(&r[p]));
        assert!((num(&r[order]) - u).abs() < 1e-6, "{r:?}");
    }
    // f = 0.7 mirrors f = 0.3 under n <-> a
    let (n, a) = (col(&header, "pi_n"), col(&header, "pi_a"));
    for (lo, hi) in at_f("0.3").zip(at_f("0.7")) {
        assert_eq!(lo[phase], hi[phase]);
        if lo[phase] != "Critical" {
            assert!((num(&lo[n]) - num(&hi[a])).abs() < 1e-6, "{lo:?} {hi:?}");
        }
    }
}

#[test]
fn replica_threshold_rises_to_p_l() {
    let (_, rows) = csv(&["replica", "--pc", "--f-grid", "0.05:0.5:0.05"]);
    let pc: Vec<f64> = rows.iter().map(|r| num(&r[1])).collect();
    assert_eq!(pc.len(), 10);
    assert!(pc.windows(2).all(|w| w[0] < w[1]), "{pc:?}");
    assert!(pc[0] > 0.75 && pc[0] < 0.76);
    assert!((pc[9] - 0.78361).abs() < 1e-5);
}

#[test]
fn eavesdrop_order_parameter_vanishes_at_critical_rate() {
    let (header, rows) = csv(&["eavesdrop", "--f", "1", "--r-grid", "0:0.3:0.001"]);
    let (r, n) = (col(&header, "r"), col(&header, "pi_n"));
    let k = rows.iter().position(|row| num(&row[n]) == 0.0).unwrap();
    assert!(num(&rows[k - 1][n]) > 0.0);
    let onset = num(&rows[k][r]);
    assert!((onset - 0.13397).abs() <= 0.001, "{onset}");
}

#[test]
fn joint_reports_twenty_five_entries_and_pattern() {
    let (header, rows) = csv(&["joint", "--p-grid", "0.68", "--f", "0.25", "--g", "0.75"]);
    assert_eq!(header.iter().filter(|h| h.starts_with("pi_")).count(), 25);
    assert_eq!(rows[0][col(&header, "pattern")], "pauli+n/a");
    assert_eq!(rows[0][col(&header, "consistent")], "true");
}

#[test]
fn mc_check_passes_and_fails_on_threshold() {
    let args = ["mc", "--check", "--p", "0.7", "--f", "0.3", "--t", "8", "--samples", "10000"];
    assert_eq!(qdtree(&args).status.code(), Some(0));
    let mut strict = args.to_vec();
    strict.extend(["--threshold", "0"]);
    assert_eq!(qdtree(&strict).status.code(), Some(3));
}

#[test]
fn invalid_configs_exit_with_two() {
    for args in [
        &["iterate", "--p", "1.5", "--f", "0.2"][..],
        &["mc", "--samples", "0"],
        &["replica", "--pc", "--f-grid", "0:1:0"],
        &["eavesdrop", "--r-grid", "0.3:0.1:0.1"],
        &["mc-shapes", "--probes", "0.6,0.7"],
        &["realize", "--t", "40"],
        &["iterate", "--p", "0.3"],
        &["--threads", "0", "verify"],
    ] {
        assert_eq!(qdtree(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn mc_output_is_reproducible_across_threads() {
    let base = ["mc-curve", "--t", "5", "--samples", "300", "--f-grid", "0.2,0.8"];
    let one = stdout(&[&base[..], &["--threads", "1"]].concat());
    let four = stdout(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!(one, four);
    let other = stdout(&[&base[..], &["--seed", "1"]].concat());
    assert_ne!(one, other);
}

#[test]
fn json_mirrors_csv_records() {
    let args = ["fixed-points", "--p-grid", "0.3,0.7"];
    let (header, rows) = csv(&args);
    let json: serde_json::Value = serde_json::from_str(&stdout(&[&args[..], &["--format", "json"]].concat())).unwrap();
    let records = json.as_array().unwrap();
    assert_eq!(records.len(), rows.len());
    for (rec, row) in records.iter().zip(&rows) {
        let keys: Vec<&String> = rec.as_object().unwrap().keys().collect();
        assert_eq!(keys, header.iter().collect::<Vec<_>>());
        assert_eq!(rec["kind"], row[col(&header, "kind")].as_str());
        assert_eq!(rec["pi_z"].as_f64().unwrap(), num(&row[col(&header, "pi_z")]));
    }
}

#[test]
fn output_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("qdtree-cli-{}.csv", std::process::id()));
    let args = ["iterate", "--p", "0.5", "--f", "0.4", "--t", "5"];
    let printed = stdout(&args);
    stdout(&[&args[..], &["--output", path.to_str().unwrap()]].concat());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn verify_passes() {
    let (_, rows) = csv(&["verify", "--samples", "1000"]);
    assert!(rows.len() > 15);
    assert!(rows.iter().all(|r| r.last().unwrap() == "true"), "{rows:?}");
}

#[test]
fn realize_is_deterministic() {
    let a = stdout(&["realize", "--t", "3", "--p", "0.8", "--index", "5", "--format", "json"]);
    let b = stdout(&["realize", "--t", "3", "--p", "0.8", "--index", "5", "--format", "json"]);
    assert_eq!(a, b);
    let doc: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(doc["num_qubits"], 9);
    assert_eq!(doc["generators"].as_array().unwrap().len(), 9);
}

use std::path::PathBuf;
use std::process::{Command, Output};

use etpa_core::units::{ev_to_hartree, fs_to_au_time};
use etpa_core::{
    etpa_cross_section, nearest_final_state, parse_molecule_file, te_sweep, Averaging,
    FinalStateSelector, LinewidthParams, PairTemplate,
};
use serde_json::Value;

fn demo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/demo_molecule.toml")
}

fn etpa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etpa"))
        .args(args)
        .env_remove("ETPA_CTPA_PREFACTOR_CM4S")
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = etpa(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn last_column(csv: &str) -> Vec<f64> {
    data_rows(csv)
        .iter()
        .map(|r| r.last().unwrap().parse().unwrap())
        .collect()
}

fn json_values(text: &str) -> Vec<f64> {
    let v: Value = serde_json::from_str(text).unwrap();
    let mut out = Vec::new();
    flatten(&v["values"], &mut out);
    out
}

fn flatten(v: &Value, out: &mut Vec<f64>) {
    match v {
        Value::Array(items) => items.iter().for_each(|i| flatten(i, out)),
        other => out.push(other.as_f64().unwrap()),
    }
}

#[test]
fn bundled_molecule_parses() {
    let model = parse_molecule_file(&std::fs::read_to_string(demo()).unwrap()).unwrap();
    assert_eq!(model.n_states(), 4);
}

#[test]
fn ctpa_row_count_and_header() {
    let m = demo();
    let csv = run_ok(&[
        "ctpa",
        "-m",
        m.to_str().unwrap(),
        "--omega-h",
        "1.0:3.0:0.01",
    ]);
    assert!(csv.lines().any(|l| l == "omega_h_ev,sigma_gm"));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 201);
    assert_eq!(rows[0][0], "1.00000000e0");
    assert_eq!(rows[200][0], "3.00000000e0");
    let sigma = last_column(&csv);
    assert!(sigma.iter().all(|v| *v >= 0.0));
    assert!(sigma.iter().filter(|v| **v > 0.0).count() > 100);
}

#[test]
fn missing_file_names_path() {
    let out = etpa(&["ctpa", "-m", "/no/such/mol.toml", "--omega-h", "1.0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/mol.toml"));
}

#[test]
fn malformed_molecule_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "n_states = 1\nenergies_ev = [1.0\n").unwrap();
    let out = etpa(&["etpa", "-m", path.to_str().unwrap(), "--omega-h", "1.0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn usage_and_domain_exit_codes() {
    let m = demo();
    let m = m.to_str().unwrap();
    assert_eq!(etpa(&["ctpa", "-m", m]).status.code(), Some(2));
    assert_eq!(
        etpa(&["ctpa", "-m", m, "--omega-h", "2:1:0.1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(etpa(&["nonsense"]).status.code(), Some(2));
    let theta = etpa(&["mcs", "-m", m, "--omega-h", "1.64", "--theta", "190"]);
    assert_eq!(theta.status.code(), Some(4));
    let phi = etpa(&["mcs-scan", "-m", m, "--omega-h", "1.64", "--phi", "10"]);
    assert_eq!(phi.status.code(), Some(2));
    let te = etpa(&["etpa", "-m", m, "--omega-h", "1.64", "--te", "0"]);
    assert_eq!(te.status.code(), Some(4));
    let f = etpa(&["te-sweep", "-m", m, "--omega-h", "1.64", "--final", "9"]);
    assert_eq!(f.status.code(), Some(3));
}

#[test]
fn json_and_csv_agree() {
    let m = demo();
    let m = m.to_str().unwrap();
    for args in [
        vec!["ctpa", "-m", m, "--omega-h", "1.5:1.8:0.01"],
        vec![
            "etpa",
            "-m",
            m,
            "--omega-h",
            "1.6:1.7:0.005",
            "--window",
            "1e7",
        ],
        vec!["te-sweep", "-m", m, "--omega-h", "1.64", "--on-resonance"],
        vec![
            "mcs-scan",
            "-m",
            m,
            "--omega-h",
            "1.64",
            "--grid",
            "5x7",
            "--on-resonance",
        ],
    ] {
        let csv = run_ok(&args);
        let mut json_args = args.clone();
        json_args.extend(["--format", "json"]);
        let json = run_ok(&json_args);
        let a = data_rows(&csv);
        let b = json_values(&json);
        assert_eq!(a.len(), b.len());
        for (row, v) in a.iter().zip(&b) {
            assert_eq!(row.last().unwrap(), &format!("{v:.8e}"));
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let m = demo();
    let m = m.to_str().unwrap();
    let args = [
        "mcs",
        "-m",
        m,
        "--omega-h",
        "1.6:1.7:0.01",
        "--format",
        "json",
    ];
    assert_eq!(run_ok(&args), run_ok(&args));
}

#[test]
fn output_flag_writes_file() {
    let m = demo();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let stdout = run_ok(&["etpa", "-m", m.to_str().unwrap(), "--omega-h", "1.64"]);
    run_ok(&[
        "etpa",
        "-m",
        m.to_str().unwrap(),
        "--omega-h",
        "1.64",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read_to_string(path).unwrap(), stdout);
}

#[test]
fn etpa_point_matches_library() {
    let m = demo();
    let json = run_ok(&[
        "etpa",
        "-m",
        m.to_str().unwrap(),
        "--omega-h",
        "1.64",
        "--format",
        "json",
    ]);
    let model = parse_molecule_file(&std::fs::read_to_string(&m).unwrap()).unwrap();
    let f = FinalStateSelector::new(&model, 3).unwrap();
    let pair = PairTemplate::default()
        .mc_pair(ev_to_hartree(1.64).unwrap())
        .unwrap();
    let lib = etpa_cross_section(
        &model,
        f,
        &pair,
        &LinewidthParams::default(),
        Averaging::default(),
    )
    .unwrap();
    assert_eq!(json_values(&json), vec![lib.value]);
}

#[test]
fn degenerate_split_reproduces_mc() {
    let m = demo();
    let m = m.to_str().unwrap();
    let base = [
        "etpa",
        "-m",
        m,
        "--omega-h",
        "1.60:1.70:0.01",
        "--window",
        "1e7",
    ];
    let mc = run_ok(&base);
    let mut bc_args = base.to_vec();
    bc_args.extend(["--mode", "bc", "--split", "0.5:0.5"]);
    let bc = run_ok(&bc_args);
    assert_eq!(last_column(&mc), last_column(&bc));
    assert!(last_column(&mc).iter().any(|v| *v > 0.0));
}

#[test]
fn entanglement_time_changes_result() {
    let m = demo();
    let m = m.to_str().unwrap();
    let at = |te: &str| last_column(&run_ok(&["etpa", "-m", m, "--omega-h", "1.64", "--te", te]));
    let (a, b) = (at("50"), at("100"));
    assert!(a[0] > 0.0 && b[0] > 0.0 && a != b);

    // roughly an order of magnitude across 20 to 100 fs
    let sweep = last_column(&run_ok(&[
        "te-sweep",
        "-m",
        m,
        "--omega-h",
        "1.64",
        "--on-resonance",
    ]));
    let max = sweep.iter().cloned().fold(0.0, f64::max);
    let min = sweep.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(max / min > 5.0, "{sweep:?}");
}

#[test]
fn te_sweep_matches_library() {
    let m = demo();
    let csv = run_ok(&[
        "te-sweep",
        "-m",
        m.to_str().unwrap(),
        "--omega-h",
        "1.64",
        "--te-range",
        "20:100:20",
    ]);
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 5);
    let json = run_ok(&[
        "te-sweep",
        "-m",
        m.to_str().unwrap(),
        "--omega-h",
        "1.64",
        "--format",
        "json",
    ]);
    let model = parse_molecule_file(&std::fs::read_to_string(&m).unwrap()).unwrap();
    let omega_h = ev_to_hartree(1.64).unwrap();
    let f = nearest_final_state(&model, 2.0 * omega_h);
    assert_eq!(f.index(), 3);
    let pair = PairTemplate::default().mc_pair(omega_h).unwrap();
    let grid = [20.0, 40.0, 60.0, 80.0, 100.0];
    let lib: Vec<f64> = te_sweep(
        &model,
        f,
        &pair,
        &LinewidthParams::default(),
        Averaging::default(),
        &grid,
    )
    .unwrap()
    .iter()
    .map(|r| r.value)
    .collect();
    let cli = json_values(&json);
    assert_eq!(cli, lib);
    let signs = |v: &[f64]| {
        v.windows(2)
            .map(|w| (w[1] - w[0]).signum())
            .collect::<Vec<_>>()
    };
    assert_eq!(signs(&cli), signs(&lib));
    assert!(fs_to_au_time(20.0).is_ok());
}

#[test]
fn scan_grid_shape_and_cancellation() {
    let m = demo();
    let m = m.to_str().unwrap();
    let csv = run_ok(&[
        "mcs-scan",
        "-m",
        m,
        "--omega-h",
        "1.64",
        "--grid",
        "2x2",
        "--on-resonance",
    ]);
    assert!(csv.lines().any(|l| l == "theta_deg,phi_deg,sigma_cm2"));
    let corners: Vec<(String, String)> = data_rows(&csv)
        .into_iter()
        .map(|r| (r[0].clone(), r[1].clone()))
        .collect();
    let (lo, t_hi, p_hi) = ("0.00000000e0", "1.80000000e2", "3.60000000e2");
    let want = [(lo, lo), (lo, p_hi), (t_hi, lo), (t_hi, p_hi)];
    assert_eq!(corners.len(), 4);
    for (got, want) in corners.iter().zip(want) {
        assert_eq!((got.0.as_str(), got.1.as_str()), want);
    }

    // BC identical to MC: split 1:1, equal entanglement times
    let json = run_ok(&[
        "mcs-scan",
        "-m",
        m,
        "--omega-h",
        "1.64",
        "--on-resonance",
        "--grid",
        "3x3",
        "--split",
        "1:1",
        "--te-prime",
        "100",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["axes"]["theta_deg"][1], 90.0);
    assert_eq!(v["axes"]["phi_deg"][1], 180.0);
    let values = json_values(&json);
    let max = values.iter().cloned().fold(0.0, f64::max);
    let cell = v["values"][1][1].as_f64().unwrap();
    assert!(cell <= 1e-12 * max, "{cell} vs {max}");
}

#[test]
fn prefactor_override_is_recorded() {
    let m = demo();
    let m = m.to_str().unwrap();
    let args = ["ctpa", "-m", m, "--omega-h", "1.64", "--format", "json"];
    let base = json_values(&run_ok(&args));
    let out = Command::new(env!("CARGO_BIN_EXE_etpa"))
        .args(args)
        .env("ETPA_CTPA_PREFACTOR_CM4S", "1e-50")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["manifest"]["parameters"]["prefactor_cm4s"], 1e-50);
    assert_eq!(
        v["manifest"]["parameters"]["prefactor_source"],
        "ETPA_CTPA_PREFACTOR_CM4S"
    );
    assert_ne!(json_values(&text), base);

    let bad = Command::new(env!("CARGO_BIN_EXE_etpa"))
        .args(args)
        .env("ETPA_CTPA_PREFACTOR_CM4S", "abc")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(3));
}

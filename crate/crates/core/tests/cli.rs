use std::fs;
use std::process::Command;

use fermgrid::cli::{read_metrics_csv, run_from_args};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fermgrid"))
}

fn body(path: &std::path::Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn fperm_rows_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = run_from_args([
        "fermgrid", "--out", out, "fperm", "--L", "12", "--perm", "random", "--count", "20",
    ]);
    assert_eq!(code, 0);
    let path = dir.path().join("fperm_ours_L12_random.csv");
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# manifest: {"));
    let rows = read_metrics_csv(&path).unwrap();
    assert_eq!(rows.len(), 20);
    let mean = rows.iter().map(|r| r.cnot_depth as f64).sum::<f64>() / 20.0;
    assert!(mean <= 284.0, "mean depth {mean}");
    assert!(dir.path().join("fperm_ours_L12_random7.json").is_file());
}

#[test]
fn empty_count_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        run_from_args([
            "fermgrid", "--out", out, "fperm", "--L", "4", "--perm", "random", "--count", "0"
        ]),
        0
    );
    let path = dir.path().join("fperm_ours_L4_random.csv");
    assert_eq!(body(&path), "method,L,N,instance,cnot_depth,gates,idle,qubits,spacetime,fidelity_p1e3,fidelity_p1e4,fidelity_p1e5");
}

#[test]
fn same_seed_same_bodies() {
    let run = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let status = bin()
            .args([
                "--out",
                dir.path().to_str().unwrap(),
                "fperm",
                "--L",
                "5",
                "--perm",
                "random",
                "--count",
                "4",
                "--method",
                "1d",
            ])
            .env("FERMGRID_SEED", seed)
            .status()
            .unwrap();
        assert!(status.success());
        body(&dir.path().join("fperm_oned_fswap_L5_random.csv"))
    };
    assert_eq!(run("7"), run("7"));
    assert_ne!(run("7"), run("8"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = |args: &[&str]| {
        bin()
            .args(["--out", out])
            .args(args)
            .status()
            .unwrap()
            .code()
            .unwrap()
    };
    assert_eq!(
        code(&["fperm", "--L", "2", "--perm", "reversal", "--verify"]),
        0
    );
    assert_eq!(code(&["fperm", "--L", "2", "--perm", "sideways"]), 2);
    assert_eq!(code(&["ffft", "--L", "3"]), 2);
    assert_eq!(
        code(&["report", "--table", "III", "--inputs", "/no/such/file.csv"]),
        2
    );
    assert_eq!(code(&["syk", "--N", "10", "--verify"]), 2);
    assert_eq!(code(&["gamma-check", "--L-max", "32"]), 0);
}

#[test]
fn syk_instance_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(fermgrid::cli::CliError::Usage("x".into()).exit_code(), 2);
    let inst = fermgrid::workloads::sample_syk_terms(4, 1.0, 3).unwrap();
    let path = dir.path().join("inst.json");
    fs::write(&path, inst.to_json()).unwrap();
    let code = |file: &str| {
        bin()
            .args([
                "--out",
                out,
                "syk",
                "--N",
                "4",
                "--instance",
                file,
                "--verify",
            ])
            .status()
            .unwrap()
            .code()
            .unwrap()
    };
    assert_eq!(code(path.to_str().unwrap()), 0);
    fs::write(
        &path,
        r#"{"N":4,"k":1,"seed":0,"terms":[{"q":[3,2,1,0],"J":0.1}],"dt":0.1}"#,
    )
    .unwrap();
    assert_eq!(code(path.to_str().unwrap()), 2);
}

#[test]
fn reports_from_generated_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        run_from_args(["fermgrid", "--out", out, "ffft", "--L", "2", "--verify"]),
        0
    );
    assert_eq!(
        run_from_args([
            "fermgrid", "--out", out, "encode", "--from", "parity", "--k", "3", "--verify"
        ]),
        0
    );
    let ffft = dir.path().join("ffft_L2.csv");
    assert_eq!(
        run_from_args([
            "fermgrid",
            "--out",
            out,
            "report",
            "--table",
            "IV",
            "--inputs",
            ffft.to_str().unwrap()
        ]),
        0
    );
    assert_eq!(body(&dir.path().join("table_IV.csv")).lines().count(), 4);
    assert_eq!(
        run_from_args([
            "fermgrid",
            "--out",
            out,
            "report",
            "--table",
            "fidelity",
            "--inputs",
            ffft.to_str().unwrap()
        ]),
        0
    );
    for tag in ["1em3", "1em4", "1em5"] {
        assert!(dir.path().join(format!("fidelity_p{tag}.csv")).is_file());
    }
    assert_eq!(
        run_from_args(["fermgrid", "--out", out, "report", "--table", "II", "--L", "4"]),
        0
    );
    let t2 = body(&dir.path().join("table_II.csv"));
    assert!(t2.contains("286") && t2.contains("5420"), "{t2}");
}

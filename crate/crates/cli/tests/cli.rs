use std::path::Path;
use std::process::{Command, Output};

fn fsl(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsl"))
        .args(args)
        .current_dir(cwd)
        .env_remove("FSL_BUDGET_NODES")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn sweep_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = fsl(
        &[
            "sweep", "--family", "A", "--d", "1", "--p", "1", "--q", "1", "--sweep", "8,16,32",
            "--out", "res",
        ],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("PASS"));

    let csv = std::fs::read_to_string(dir.path().join("res/family_A_d1_p1_q1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("family,d,p,q,N,norm_f_p,norm_Ff_q,ratio")
    );
    assert_eq!(lines.count(), 3);

    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("res/family_A_d1_p1_q1.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(json["verdict"], "PASS");
    assert_eq!(json["predicted_slope"], 1.0);
    assert!((json["fitted_slope"].as_f64().unwrap() - 1.0).abs() < 0.15);
    assert!(json["stderr"].is_number());
}

#[test]
fn default_output_directory_is_results() {
    let dir = tempfile::tempdir().unwrap();
    let o = fsl(
        &[
            "sweep", "--family", "B", "--p", "4", "--q", "4", "--sweep", "8,16,32",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("results/family_B_d1_p4_q4.csv").exists());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"family": "A", "d": 1, "p": 2, "q": 2, "sweep": [8, 16, 32], "out": "from_cfg"}"#,
    )
    .unwrap();
    let o = fsl(&["sweep", "--config", "cfg.json", "--q", "1"], dir.path());
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(dir.path().join("from_cfg/family_A_d1_p2_q1.csv").exists());
}

#[test]
fn failed_verdict_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = fsl(
        &[
            "sweep",
            "--family",
            "E",
            "--p",
            "4",
            "--q",
            "2",
            "--sweep",
            "8,16,32",
            "--tolerance",
            "1e-9",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL"));
    let json = std::fs::read_to_string(dir.path().join("results/family_E_d1_p4_q2.json")).unwrap();
    assert!(json.contains("\"FAIL\""));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["sweep", "--family", "A", "--p", "0.5", "--q", "2"][..],
        &["sweep", "--family", "Z", "--p", "2", "--q", "2"],
        &["sweep", "--family", "A", "--p", "2"],
        &[
            "sweep", "--family", "C", "--p", "2", "--q", "2", "--method", "closed",
        ],
        &["classify", "--grid", "0"],
        &["classify"],
        &["bogus"],
    ] {
        let o = fsl(args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fsl(&["--help"], dir.path()).status.code(), Some(0));
    assert_eq!(fsl(&["--version"], dir.path()).status.code(), Some(0));
}

#[test]
fn budget_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_fsl"))
        .args([
            "sweep",
            "--family",
            "C",
            "--p",
            "4",
            "--q",
            "2",
            "--grid-budget",
            "100000000",
        ])
        .current_dir(dir.path())
        .env("FSL_BUDGET_NODES", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget exceeded"));
}

#[test]
fn classify_point_and_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = fsl(&["classify", "--point", "1,1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "inv_p,inv_q,bounded_admissible,defeated_by\n1,1,true,A;D\n"
    );

    let o = fsl(&["classify", "--point", "0.5,0.5"], dir.path());
    assert_eq!(stdout(&o).lines().nth(1), Some("0.5,0.5,true,"));

    let o = fsl(
        &["classify", "--grid", "0.5", "--out", "grid.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    assert!(csv.contains("\n0,0,false,B;C;S\n"));
}

#[test]
fn verify_suite() {
    let dir = tempfile::tempdir().unwrap();
    let o = fsl(&["verify", "--quick"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(
        stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(),
        8
    );

    let o = fsl(&["verify", "--quick", "--tamper"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL 3"));
}

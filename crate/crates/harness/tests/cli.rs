use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_besov-lab"))
}

const SMALL: [&str; 4] = ["--grid-N", "256", "--J", "2"];

#[test]
fn help_lists_subcommands() {
    let out = bin().arg("--help").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["verify-lemma", "remainder-scaling", "inflation", "all"] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
}

#[test]
fn csv_to_stdout() {
    let out = bin().args(["verify-lemma", "--n", "1,2", "--format", "csv"]).args(SMALL).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,r_n,h4_norm,div_residual,"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn check_sets_exit_code_from_thresholds() {
    // at k = 1 the diagonal residual is far above the default 1e-8
    let out = bin().args(["verify-lemma", "--n", "2", "--check"]).args(SMALL).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("FAIL diagonal_residual"));

    let dir = tempfile::tempdir().unwrap();
    let thr = dir.path().join("thr.toml");
    std::fs::write(&thr, "diagonal_residual = 1.0\nlower_bound_fraction = 0.1\n").unwrap();
    let out = bin()
        .args(["verify-lemma", "--n", "2", "--check", "--thresholds"])
        .arg(&thr)
        .args(SMALL)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn invalid_parameters_exit_with_2() {
    let out = bin().args(["verify-lemma", "--sigma", "1.5"]).args(SMALL).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("sigma"));
    let out = bin().args(["verify-lemma", "--grid-N", "100"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn all_writes_three_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["all", "--n", "1,2", "--eps", "0.02", "--T", "4e-3", "--format", "svg", "--out"])
        .arg(dir.path())
        .args(SMALL)
        .env("BESOV_LAB_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["verify_lemma", "remainder_scaling", "inflation"] {
        let svg = std::fs::read_to_string(dir.path().join(format!("{name}.svg"))).unwrap();
        assert!(svg.starts_with("<svg"));
    }
}

#[test]
fn json_output_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = bin()
        .args(["remainder-scaling", "--times", "0.001,0.002", "--dt", "1e-3", "--out"])
        .arg(&path)
        .args(SMALL)
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: besov_lab::ExperimentReport<besov_lab::RemainderRow> =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert_eq!(report.metadata.solver.unwrap().dt, 1e-3);
}

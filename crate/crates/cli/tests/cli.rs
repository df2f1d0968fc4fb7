use std::path::Path;
use std::process::{Command, Output};

use nalgebra::DMatrix;
use qmst_cli::{cmd_solve, cmd_validate, SolveOptions, CSV_HEADER};
use qmst_core::instances::{read_instance, write_instance, CostMatrix, Instance};
use qmst_core::Graph;

fn qmst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmst"))
        .args(args)
        .env_clear()
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_k4_ones(path: &Path) {
    let inst = Instance::new(
        Graph::complete(4),
        CostMatrix::new(DMatrix::from_element(6, 6, 1.0)).unwrap(),
        None,
    )
    .unwrap();
    write_instance(&inst, path).unwrap();
}

#[test]
fn generated_file_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cp1_10.qmst");
    let o = qmst(&[
        "generate", "--family", "CP1", "--n", "10", "--d", "100", "--seed", "7", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let inst = read_instance(&out).unwrap();
    assert_eq!((inst.graph.n(), inst.graph.m()), (10, 45));
    assert_eq!(inst.ub, None);
}

#[test]
fn op_families_reject_sparse_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("op.qmst");
    let o = qmst(&["generate", "--family", "OPsym", "--n", "8", "--d", "67", "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(!out.exists());
}

#[test]
fn sv_accepts_cost_maxima_and_other_families_do_not() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sv.qmst");
    let o = qmst(&[
        "generate", "--family", "SV", "--n", "6", "--cmax-diag", "10", "--cmax-off", "50",
        "--ub-source", "exact", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let inst = read_instance(&out).unwrap();
    let q = inst.q.matrix();
    assert!((0..q.nrows()).all(|e| q[(e, e)] <= 2.0));
    assert!(q.iter().all(|&v| v <= 50.0));
    assert!(inst.ub.is_some());
    let o = qmst(&["generate", "--family", "CP1", "--n", "6", "--cmax-off", "50", "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
}

#[test]
fn environment_fills_in_missing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("env.qmst");
    let o = Command::new(env!("CARGO_BIN_EXE_qmst"))
        .args(["generate", "--n", "5", "--out", out.to_str().unwrap()])
        .env_clear()
        .env("QMST_FAMILY", "CP2")
        .env("QMST_N", "9")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // the flag wins over QMST_N
    assert_eq!(read_instance(&out).unwrap().graph.n(), 5);
}

#[test]
fn forced_objective_gap_is_small() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("k4.qmst");
    write_k4_ones(&inst);
    let o = qmst(&["solve", inst.to_str().unwrap(), "--ub", "9"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&fields[..4], ["4", "100", "6", "9.0000"]);
    let gap_cuts: f64 = fields[8].parse().unwrap();
    assert!((0.0..=0.6).contains(&gap_cuts), "gap {gap_cuts}");
}

#[test]
fn csv_header_is_written_once() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("k4.qmst");
    let csv = dir.path().join("out.csv");
    write_k4_ones(&inst);
    for _ in 0..2 {
        let o = qmst(&["solve", inst.to_str().unwrap(), "--no-cuts", "--csv", csv.to_str().unwrap()]);
        assert!(o.status.success());
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.iter().filter(|l| **l == CSV_HEADER).count(), 1);
    // no UB: gap and closed columns are blank
    let f: Vec<&str> = lines[1].split(',').collect();
    assert_eq!((f[3], f[5], f[8], f[12]), ("", "", "", ""));
    assert_eq!(f[11], "0");
}

#[test]
fn failed_solve_leaves_csv_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.qmst");
    std::fs::write(&bad, "QMST 1\n3 2\n1 2\n").unwrap();
    let csv = dir.path().join("out.csv");
    let o = qmst(&["solve", bad.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(!csv.exists());
    let opts = SolveOptions {
        csv: Some(csv.clone()),
        ..SolveOptions::default()
    };
    assert!(cmd_solve(&bad, &opts).is_err());
    assert!(!csv.exists());
}

#[test]
fn batch_mode_matches_sequential_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    for seed in 0..3 {
        let p = dir.path().join(format!("cp{seed}.qmst"));
        let o = qmst(&["generate", "--family", "CP1", "--n", "6", "--seed", &seed.to_string(), "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
        paths.push(p.to_str().unwrap().to_owned());
    }
    let run = |jobs: &str, csv: &Path| {
        let mut args = vec!["solve", "--jobs", jobs, "--max-iters", "200", "--csv", csv.to_str().unwrap()];
        args.extend(paths.iter().map(String::as_str));
        let o = qmst(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(csv).unwrap()
    };
    let untimed = |text: &str| -> Vec<Vec<String>> {
        text.lines()
            .skip(1)
            .map(|l| {
                l.split(',')
                    .enumerate()
                    .filter(|&(i, _)| i != 6 && i != 9)
                    .map(|(_, f)| f.to_owned())
                    .collect()
            })
            .collect()
    };
    let a = run("1", &dir.path().join("a.csv"));
    let b = run("3", &dir.path().join("b.csv"));
    assert_eq!(a.lines().count(), 4);
    assert_eq!(untimed(&a), untimed(&b));
}

#[test]
fn validate_passes_and_perturbation_fails() {
    let o = qmst(&["validate"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("3 group(s), 0 failed"));
    let o = qmst(&["validate", "--perturb"]);
    assert!(!o.status.success());
    assert!(stdout(&o).contains("[FAIL]"));

    let reports = cmd_validate(false).unwrap();
    assert_eq!(reports.len(), 3);
    assert!(reports.iter().all(|r| r.passed()));
    let reports = cmd_validate(true).unwrap();
    assert!(!reports[0].passed());
    assert!(reports[1].passed() && reports[2].passed());
}

#[test]
fn invalid_parameters_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("k4.qmst");
    write_k4_ones(&inst);
    let o = qmst(&["solve", inst.to_str().unwrap(), "--gamma1", "2"]);
    assert!(!o.status.success());
    let o = qmst(&["solve", inst.to_str().unwrap(), "--tau", "-1"]);
    assert!(!o.status.success());
}

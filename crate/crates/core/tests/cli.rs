use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::tempdir;

use xxchain::correlations::{pair_correlations, MeasuredSide, SpinPair};
use xxchain::lindblad::gibbs_state;
use xxchain::spectrum::{build_hamiltonian, ChainParams};
use xxchain::sweep::{parse_config, run_sweep, to_csv};

fn xxchain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xxchain"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("run xxchain")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

#[test]
fn spectrum_prints_eigenvalues() {
    let v = json(&xxchain(&["spectrum", "--h", "1", "--k", "2"]));
    assert!((v["epsilon_5"].as_f64().unwrap() + 6.464102).abs() < 1e-6);
    assert_eq!(v["epsilon_1"].as_f64().unwrap(), -3.0);
    assert!((v["B"].as_f64().unwrap() - 12f64.sqrt()).abs() < 1e-12);
    for key in [
        "sin_a1", "cos_a2", "omega_1", "omega_2", "omega_3", "gap_35",
    ] {
        assert!(v[key].is_f64(), "missing {key}");
    }
}

#[test]
fn purestate_concurrence_at_zero_k() {
    let v = json(&xxchain(&["purestate", "--k", "0", "--pair", "13"]));
    assert!((v["concurrence"].as_f64().unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn steady_prints_a_row() {
    let v = json(&xxchain(&[
        "steady",
        "--h",
        "1",
        "--k",
        "2",
        "--t-mean",
        "1.8",
        "--delta-t",
        "0.5",
    ]));
    assert_eq!(v["pair"], "13");
    assert!((v["T3"].as_f64().unwrap() - 1.55).abs() < 1e-12);
    let p: f64 = (1..=8).map(|l| v[format!("P{l}")].as_f64().unwrap()).sum();
    assert!((p - 1.0).abs() < 1e-8);
    assert!(v["residual_norm"].as_f64().unwrap() < 1e-8);
}

#[test]
fn exit_codes() {
    assert_eq!(xxchain(&["--help"]).status.code(), Some(0));
    assert_eq!(xxchain(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(xxchain(&["spectrum", "--h", "1"]).status.code(), Some(1));
    // Negative cold-bath temperature is a usage error.
    let out = xxchain(&[
        "steady",
        "--h",
        "1",
        "--k",
        "2",
        "--t-mean",
        "0.2",
        "--delta-t",
        "0.8",
    ]);
    assert_eq!(out.status.code(), Some(1));
    // h = 2, k = 1 is an exact ε1 = ε5 crossing: the secular build refuses it.
    let out = xxchain(&["steady", "--h", "2", "--k", "1", "--t1", "1", "--t3", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn discord_reads_a_state_file() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("bell.json");
    fs::write(
        &path,
        "[[0.5,0,0,0.5],[0,0,0,0],[0,0,0,0],[0.5,0,0,[0.5,0]]]",
    )
    .unwrap();
    let v = json(&xxchain(&[
        "discord",
        "--state-file",
        path.to_str().unwrap(),
    ]));
    assert!((v["discord"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["concurrence"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    fs::write(&path, "[[1,0],[0,0]]").unwrap();
    assert_eq!(
        xxchain(&["discord", "--state-file", path.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn evolve_writes_trajectory() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let status = xxchain(&[
        "evolve",
        "--h",
        "1",
        "--k",
        "2",
        "--t1",
        "2",
        "--t3",
        "1",
        "--gamma",
        "0.05",
        "--t-end",
        "10",
        "--init",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,P1,P2,P3,P4,P5,P6,P7,P8,trace,min_eigenvalue"
    );
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(first[0], 0.0);
    assert!((first[5] - 1.0).abs() < 1e-12);
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((cols[9] - 1.0).abs() < 1e-10);
        assert!(cols[10] > -1e-8);
    }
}

const THREE_POINTS: &str =
    "h_min = 0\nh_max = 2\nh_steps = 3\nk = 2\nt_mean = 1.8\ndelta_t = 0.5\n";

#[test]
fn sweep_writes_one_row_per_point_and_pair() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("three.cfg");
    fs::write(&cfg, THREE_POINTS).unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let r = xxchain(&[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    let text = fs::read_to_string(&a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(
        lines[0],
        "h,k,gamma,T1,T3,pair,discord,classical_correlation,mutual_information,concurrence,\
         P1,P2,P3,P4,P5,P6,P7,P8,gap_35,residual_norm"
    );
    let keys: Vec<(&str, &str)> = lines[1..]
        .iter()
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0], c[5])
        })
        .collect();
    assert_eq!(
        keys,
        [
            ("0", "13"),
            ("0", "23"),
            ("1", "13"),
            ("1", "23"),
            ("2", "13"),
            ("2", "23")
        ]
    );
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(!dir.path().join("a.csv.errors.csv").exists());
}

#[test]
fn sweep_diverts_failed_points() {
    // h = 4, k = 3.5 sits on the ε1 = ε5 crossing.
    let cfg = parse_config(
        "h = 4\nk_min = 3\nk_max = 4\nk_steps = 3\nt_mean = 1.2\ndelta_t = 0.8\npairs = 13",
    )
    .unwrap();
    let outcome = run_sweep(&cfg);
    assert_eq!(outcome.rows.len(), 2);
    assert_eq!(outcome.failures.len(), 1);
    assert_eq!(outcome.failures[0].k, 3.5);

    let dir = tempdir().unwrap();
    let out = dir.path().join("x.csv");
    xxchain::sweep::write_outputs(&outcome, &cfg, &out).unwrap();
    let errors = fs::read_to_string(dir.path().join("x.csv.errors.csv")).unwrap();
    assert!(errors.starts_with("h,k,T1,T3,pair,error\n4,3.5,1.6,0.8,13,"));
}

#[test]
fn equal_temperatures_give_gibbs_correlations() {
    let cfg = parse_config("h = 1\nk = 3\nt1 = 1.5\nt3 = 1.5\npairs = 13").unwrap();
    let outcome = run_sweep(&cfg);
    let row = &outcome.rows[0];
    let gibbs = gibbs_state(
        &build_hamiltonian(&ChainParams::new(1.0, 3.0).unwrap()).unwrap(),
        1.5,
    );
    let expected = pair_correlations(&gibbs, SpinPair::P13, MeasuredSide::B).unwrap();
    assert!((row.discord - expected.discord).abs() < 1e-8);
    assert!((row.concurrence - expected.concurrence).abs() < 1e-8);
}

#[test]
fn column_flags_and_precision() {
    let cfg = parse_config(
        "h = 1\nk = 2\nt1 = 2\nt3 = 1\npairs = 23\nemit_occupations = false\nemit_gap = false",
    )
    .unwrap();
    let csv = to_csv(&run_sweep(&cfg).rows, &cfg);
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "h,k,gamma,T1,T3,pair,discord,classical_correlation,mutual_information,concurrence,residual_norm");
    let discord = csv.lines().nth(1).unwrap().split(',').nth(6).unwrap();
    let digits = discord
        .trim_start_matches("0.")
        .trim_start_matches('0')
        .len();
    assert!(digits <= 12, "{discord}");
}

#[test]
fn config_errors_exit_with_usage_code() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "bogus = 1\n").unwrap();
    let out = xxchain(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        "/dev/null",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

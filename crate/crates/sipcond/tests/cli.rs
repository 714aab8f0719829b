//! End-to-end checks of the command-line tool.

use std::path::PathBuf;
use std::process::{Command, Output};

use sipcond::harness::table::ResultTable;

fn sipcond(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sipcond")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sipcond-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn body(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}

#[test]
fn kernel_info_nearest_neighbor() {
    let out = sipcond(&["kernel-info"]);
    assert!(out.status.success());
    let t = ResultTable::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(t.name, "kernel-info");
    let chi = t.rows.iter().find(|r| format!("{:?}", r[0]).contains("\"chi\"")).unwrap();
    assert_eq!(chi[1].as_f64(), Some(0.5));
    for key in ["config_hash", "code_version", "wall_time_s"] {
        assert!(t.get_meta(key).is_some(), "missing {key}");
    }
}

#[test]
fn flags_override_config_file() {
    let cfg = scratch("sim.cfg");
    std::fs::write(&cfg, "# small run\nl = 16\nreplicas = 8\ntimes = 0.5\nseed = 1\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let a = sipcond(&["simulate-sip", "--config", cfg]);
    let b = sipcond(&["simulate-sip", "--config", cfg, "--seed", "2"]);
    let c = sipcond(&["simulate-sip", "--config", cfg, "--seed", "1", "--threads", "1"]);
    let d = sipcond(&["simulate-sip", "--config", cfg, "rho=3"]);
    for o in [&a, &b, &c, &d] {
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = |o: &Output| String::from_utf8(o.stdout.clone()).unwrap();
    assert!(text(&a).contains("# seed: 1\n"));
    assert!(text(&b).contains("# seed: 2\n"));
    assert_ne!(body(&text(&a)), body(&text(&b)));
    assert_eq!(body(&text(&a)), body(&text(&c)), "thread count changed the result");
    let density = |o: &Output| ResultTable::parse(&text(o)).unwrap().rows[0][1].as_f64().unwrap();
    assert!(density(&d) > 2.0 * density(&a));
}

#[test]
fn identical_runs_give_identical_bodies() {
    let p1 = scratch("a.csv");
    let p2 = scratch("b.csv");
    for p in [&p1, &p2] {
        let o = sipcond(&["diff-sim", "replicas=2000", "--seed", "11", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
    }
    let (a, b) = (std::fs::read_to_string(&p1).unwrap(), std::fs::read_to_string(&p2).unwrap());
    assert_eq!(body(&a), body(&b));
    let t = ResultTable::read_file(&p1).unwrap();
    assert_eq!(t.render().unwrap(), a, "re-parsed table serializes differently");
}

#[test]
fn errors_give_nonzero_exit() {
    let missing = sipcond(&["kernel-info", "kernel=/no/such/weights"]);
    assert_eq!(missing.status.code(), Some(2));
    let unknown = sipcond(&["variance", "bogus=1"]);
    assert_eq!(unknown.status.code(), Some(2));
    let badtype = sipcond(&["sticky-kernel", "gamma=abc"]);
    assert_eq!(badtype.status.code(), Some(2));
    let nofile = sipcond(&["mosco", "--config", "/no/such/config"]);
    assert_eq!(nofile.status.code(), Some(2));
    let window = sipcond(&["diff-prob", "t=5", "window=3"]);
    assert_eq!(window.status.code(), Some(3));
    let failed = sipcond(&["acceptance", "criteria=11", "reference_gamma=2"]);
    assert_eq!(failed.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&failed.stderr).contains("criterion 11 [FAIL]"));
}

#[test]
fn threads_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_sipcond"))
        .args(["duality-check", "replicas=100"])
        .env("SIPCOND_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bad = Command::new(env!("CARGO_BIN_EXE_sipcond")).args(["kernel-info"]).env("SIPCOND_THREADS", "0").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn acceptance_summary_is_machine_readable() {
    let o = sipcond(&["acceptance", "criteria=1,13"]);
    assert!(o.status.success());
    let t = ResultTable::parse(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(t.rows.len(), 2);
    assert_eq!(t.get_meta("passed"), Some("2/2"));
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert_eq!(stderr.lines().filter(|l| l.starts_with("criterion")).count(), 2);
}

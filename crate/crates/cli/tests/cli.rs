use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use attnet_core::experiment::{
    run_replication_with_network, CONFIG_FILE, FINAL_FILE, SUMMARY_FILE,
};
use attnet_core::io::{export_network, import_network};
use attnet_core::metrics::correlation_report;
use attnet_core::{ScheduleMode, SimulationConfig};

fn attnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_attnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn expected_csv(report: &attnet_core::CorrelationReport) -> String {
    let mut out = String::from("relation_class,correlation,n_effective\n");
    for e in report.entries() {
        let v = match e.value {
            Some(v) => format!("{v}"),
            None => String::new(),
        };
        out.push_str(&format!("{},{},{}\n", e.class.name(), v, e.n_effective));
    }
    out
}

#[test]
fn generate_small_network() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("net");
    let res = attnet(&["generate", "--n", "10", "--m", "2", "--out", path(&out)]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let net = import_network(&out).unwrap();
    assert_eq!(net.node_count(), 10);
    assert_eq!(net.base_tie_count(), 17);
    let ties = fs::read_to_string(out.join("ties.csv")).unwrap();
    assert_eq!(ties.lines().filter(|l| l.ends_with(",base")).count(), 17);
}

fn write_small_config(dir: &Path) -> std::path::PathBuf {
    let cfg = dir.join("c.txt");
    fs::write(
        &cfg,
        "# small run\nn = 120\nmode = Mixed\nmix_contagion = 0.6\nmix_homophily = 0.2\nmix_confounding = 0.2\n\
         iterations = 1500\nsnapshot_every = 500\nreplications = 3\n",
    )
    .unwrap();
    cfg
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_small_config(dir.path());
    let out = dir.path().join("out");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let res = attnet(&[
            "simulate",
            "--config",
            path(&cfg),
            "--seed",
            "7",
            "--output-dir",
            path(&out),
        ]);
        assert!(
            res.status.success(),
            "{}",
            String::from_utf8_lossy(&res.stderr)
        );
        let files: Vec<Vec<u8>> = [
            CONFIG_FILE,
            FINAL_FILE,
            SUMMARY_FILE,
            "replications/rep_00002.csv",
        ]
        .iter()
        .map(|f| fs::read(out.join(f)).unwrap())
        .collect();
        runs.push((files, res.stdout));
        fs::remove_dir_all(&out).unwrap();
    }
    assert_eq!(runs[0], runs[1]);
    let config = String::from_utf8(runs[0].0[0].clone()).unwrap();
    assert!(config.contains("base_seed = 7"), "{config}");

    let res = attnet(&[
        "--sequential",
        "simulate",
        "--config",
        path(&cfg),
        "--seed",
        "7",
        "--output-dir",
        path(&out),
    ]);
    assert!(res.status.success());
    assert_eq!(fs::read(out.join(FINAL_FILE)).unwrap(), runs[0].0[1]);
}

#[test]
fn analyze_matches_in_process_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SimulationConfig::default();
    cfg.gen.n = 200;
    cfg.schedule.mode = ScheduleMode::PureContagion;
    cfg.schedule.iterations = 5_000;
    let (result, net) = run_replication_with_network(&cfg, 0).unwrap();
    let net_dir = dir.path().join("net");
    export_network(&net, &net_dir).unwrap();

    let res = attnet(&["analyze", path(&net_dir)]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert_eq!(stdout, expected_csv(result.final_report()));
    assert_eq!(stdout, expected_csv(&correlation_report(&net)));

    let report = dir.path().join("report.csv");
    let res = attnet(&["analyze", path(&net_dir), "--out", path(&report)]);
    assert!(res.status.success());
    assert_eq!(fs::read_to_string(&report).unwrap(), stdout);
}

#[test]
fn simulate_exports_networks_for_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_small_config(dir.path());
    let out = dir.path().join("out");
    let res = attnet(&[
        "simulate",
        "--config",
        path(&cfg),
        "--output-dir",
        path(&out),
        "--export-networks",
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let res = attnet(&["analyze", path(&out.join("networks").join("rep_00001"))]);
    assert!(res.status.success());
    let final_csv = fs::read_to_string(out.join(FINAL_FILE)).unwrap();
    for line in String::from_utf8(res.stdout).unwrap().lines().skip(1) {
        let (class, rest) = line.split_once(',').unwrap();
        let prefix = format!("1,2,{class},{rest}");
        assert!(
            final_csv.lines().any(|l| l == prefix),
            "{prefix} not in final.csv"
        );
    }
}

#[test]
fn sweep_writes_one_point_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_small_config(dir.path());
    let out = dir.path().join("sweep");
    let res = attnet(&[
        "sweep",
        "--config",
        path(&cfg),
        "--param",
        "contagion_weight",
        "--values",
        "0.02,0.2",
        "--output-dir",
        path(&out),
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    assert!(out
        .join("contagion_weight=0.02")
        .join(SUMMARY_FILE)
        .is_file());
    assert!(out
        .join("contagion_weight=0.2")
        .join(SUMMARY_FILE)
        .is_file());
    let table = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 2 * 7);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [&["frobnicate"][..], &["generate", "--bogus"], &[]] {
        let res = attnet(args);
        assert_eq!(res.status.code(), Some(2), "{args:?}");
        assert!(!res.stderr.is_empty());
    }
}

#[test]
fn runtime_errors_exit_nonzero_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let res = attnet(&["analyze", path(&dir.path().join("missing"))]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).starts_with("error:"));

    let cfg = dir.path().join("bad.txt");
    fs::write(&cfg, "n = 1000\nwarp = 9\n").unwrap();
    let res = attnet(&["simulate", "--config", path(&cfg)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("warp"));

    let res = attnet(&[
        "generate",
        "--n",
        "3",
        "--m",
        "3",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn help_lists_every_config_key() {
    let res = attnet(&["simulate", "--help"]);
    let text = String::from_utf8(res.stdout).unwrap();
    for (key, default, _) in attnet_core::config::KEYS {
        let line = text
            .lines()
            .find(|l| l.split_whitespace().next() == Some(key))
            .unwrap_or_else(|| panic!("{key} missing"));
        assert!(line.contains(default), "{line}");
    }
}

use std::process::{Command, Output};

use pncmap_cli::output::{read_csv, read_json, OptimizeRecord, SweepRecord, TableRecord};

fn pncmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pncmap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = pncmap(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn malformed_input_exits_with_config_code() {
    for args in [
        &["optimize", "--scenario", "uniform5"][..],
        &["optimize", "--scenario", "uniform4", "--criterion", "mse"],
        &["sweep", "--scenario", "uniform4", "--snr-range", "0:10:0.01"],
        &["sweep", "--scenario", "uniform4", "--mapping", "7"],
        &["sweep", "--scenario", "uniform4", "--mapping=-3,-1,1,1"],
        &["simulate", "--scenario", "uniform4", "--trials", "0"],
        &["optimize", "--criterion", "ser"],
    ] {
        let out = pncmap(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"), "{args:?}");
    }
}

#[test]
fn optimize_picks_expected_mappings() {
    let text = stdout(&[
        "optimize",
        "--scenario",
        "uniform4",
        "--criterion",
        "ber",
        "--snr",
        "10",
    ]);
    let env = read_json::<OptimizeRecord>(&text).unwrap();
    assert_eq!(env.schema_version, 1);
    assert_eq!(env.results.len(), 1);
    let best = &env.results[0];
    assert_eq!(best.reference_ids.0, vec![1]);
    assert_eq!(best.bitmap_names.as_ref().unwrap().0, vec!["gray".to_string()]);

    let text = stdout(&[
        "optimize",
        "--scenario",
        "nonuniform4",
        "--snr",
        "10",
        "--format",
        "csv",
    ]);
    let rows = read_csv::<OptimizeRecord>(&text).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].reference_ids.0, vec![1]);
    assert!(rows[0].labels.is_none());
}

#[test]
fn sweep_csv_columns() {
    let text = stdout(&[
        "sweep",
        "--scenario",
        "uniform4",
        "--snr-range=-10:15:5",
        "--format",
        "csv",
    ]);
    let header = text.lines().next().unwrap();
    for col in ["snr_db", "mapping_id", "ser_analytic"] {
        assert!(header.split(',').any(|c| c == col), "{header}");
    }
    assert!(!header.contains("ser_empirical"));
    let rows = read_csv::<SweepRecord>(&text).unwrap();
    assert_eq!(rows.len(), 6 * 2);

    let text = stdout(&[
        "sweep",
        "--scenario",
        "uniform4",
        "--snr",
        "5",
        "--simulate",
        "--trials",
        "20000",
        "--format",
        "csv",
    ]);
    let header = text.lines().next().unwrap();
    assert!(
        header.contains("ser_empirical") && header.contains("ser_stderr"),
        "{header}"
    );
    for r in read_csv::<SweepRecord>(&text).unwrap() {
        let (a, e, s) = (r.ser_analytic.unwrap(), r.ser_empirical.unwrap(), r.ser_stderr.unwrap());
        assert!((a - e).abs() < 5.0 * s, "{r:?}");
    }
}

#[test]
fn nonuniform8_ber_optima_follow_snr() {
    let text = stdout(&[
        "sweep",
        "--scenario",
        "nonuniform8",
        "--criterion",
        "ber",
        "--snr-range=-5:15:5",
    ]);
    let env = read_json::<SweepRecord>(&text).unwrap();
    for (snr, id) in [(15.0, "6"), (10.0, "7"), (5.0, "7"), (0.0, "8"), (-5.0, "9")] {
        let hit = env
            .results
            .iter()
            .find(|r| r.snr_db == snr && r.mapping_id == id && r.bitmap_id.as_deref() == Some("binary"))
            .unwrap();
        assert!(hit.co_optimal, "{snr} dB mapping {id}");
    }
}

#[test]
fn tables_report_counts_and_mappings() {
    let text = stdout(&["tables", "--format", "csv"]);
    let rows = read_csv::<TableRecord>(&text).unwrap();
    let get = |table: &str, sc: &str, id: &str| {
        rows.iter()
            .find(|r| r.table == table && r.scenario == sc && r.id == id)
            .map(|r| r.value.clone())
            .unwrap()
    };
    for (sc, n) in [
        ("uniform4", "2"),
        ("nonuniform4", "3"),
        ("uniform8", "46"),
        ("nonuniform8", "175"),
    ] {
        assert_eq!(get("distinct_bit_mappings", sc, ""), n);
    }
    assert_eq!(get("mapping", "uniform8", "2"), "-5 1 7 -3 3 -7 -1 5");
    assert_eq!(get("mapping", "nonuniform4", "4"), "-3 1 3 -1");
    assert_eq!(get("b_vector", "uniform4", "gray"), "0 1 2 1");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "scenario = \"uniform4\"\ncriterion = \"ber\"\nsnr = \"0:10:5\"\nformat = \"csv\"\n",
    )
    .unwrap();
    let out = dir.path().join("out.json");
    let cfg_s = cfg.to_str().unwrap();
    stdout(&[
        "sweep",
        "--config",
        cfg_s,
        "--format",
        "json",
        "--snr",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    let env = read_json::<SweepRecord>(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(env.results.iter().all(|r| r.snr_db == 3.0 && r.ber_analytic.is_some()));
    assert_eq!(env.spec.criterion.to_string(), "ber");

    std::fs::write(&cfg, "scenario = \"uniform4\"\nbogus = 1\n").unwrap();
    assert_eq!(pncmap(&["sweep", "--config", cfg_s]).status.code(), Some(2));
}

#[test]
fn simulate_is_reproducible() {
    let args = [
        "simulate",
        "--scenario",
        "nonuniform4",
        "--snr",
        "4",
        "--trials",
        "30000",
        "--seed",
        "9",
    ];
    assert_eq!(stdout(&args), stdout(&args));
}

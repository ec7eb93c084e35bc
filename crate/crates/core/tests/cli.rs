//! Runs the command-line tool against a small synthetic panel.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use sarima_impact::pipeline::{synthetic_dataset, SyntheticSpec};

const SMALL_GRID: [&str; 12] = [
    "--p-range",
    "0..1",
    "--q_range",
    "0..1",
    "--d-choices",
    "0",
    "--seasonal-p-range",
    "0..0",
    "--seasonal-q-range",
    "0..0",
    "--seasonal-d-choices",
    "1",
];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sarima-impact"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_panel(dir: &Path) -> String {
    let data = synthetic_dataset(&SyntheticSpec {
        classes: 2,
        ..SyntheticSpec::default()
    })
    .unwrap();
    let path = dir.join("data.csv");
    std::fs::write(&path, data.to_csv().unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn ingest_check_reports_shape() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_panel(dir.path());
    let text = stdout(&run(&["ingest-check", &data]));
    assert!(
        text.contains("2 classes, 33 quarters (2012Q2 to 2020Q2), 4 series"),
        "{text}"
    );

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "class,quarter,gcp,gwp\nA,2019Q1,1,2\nA,2019Q3,1,2\n").unwrap();
    let out = run(&["ingest-check", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("2019Q2"));
}

#[test]
fn fit_select_and_forecast_one_series() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_panel(dir.path());
    let series = ["--class", "Class 01", "--activity", "gcp"];

    let mut args = vec!["fit", data.as_str(), "--order", "(1,0,0)x(0,1,0,4)"];
    args.extend(series);
    let text = stdout(&run(&args));
    assert!(
        text.contains("order        (1,0,0)x(0,1,0,4)") && text.contains("ljung_box"),
        "{text}"
    );

    let mut args = vec!["select", data.as_str(), "--top", "2"];
    args.extend(series);
    args.extend(SMALL_GRID);
    let text = stdout(&run(&args));
    assert!(text.contains("4 fitted") && text.contains(" 2. "), "{text}");

    let mut args = vec![
        "forecast",
        data.as_str(),
        "--order",
        "(1,0,0)x(0,1,0,4)",
        "--alpha",
        "0.1",
    ];
    args.extend(series);
    let text = stdout(&run(&args));
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("2020Q")).collect();
    assert_eq!(rows.len(), 2, "{text}");
    assert!(rows
        .iter()
        .all(|r| r.split(',').count() == 6 && !r.ends_with(',')));
}

#[test]
fn impact_from_published_tables() {
    let dir = tempfile::tempdir().unwrap();
    let published = common::published_dir();
    let out_dir = dir.path().join("impact");
    stdout(&run(&[
        "impact",
        published.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]));
    let impact = std::fs::read_to_string(out_dir.join("table_impact.csv")).unwrap();
    assert!(
        impact
            .lines()
            .last()
            .unwrap()
            .starts_with("TOTAL,5.29,11.69,8.12,11.32"),
        "{impact}"
    );
    assert!(
        out_dir.join("table_nominal.csv").exists() && out_dir.join("table_shares.csv").exists()
    );
}

#[test]
fn report_honours_config_file_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_panel(dir.path());
    let config = dir.path().join("run.conf");
    let out_dir = dir.path().join("out");
    std::fs::write(
        &config,
        format!(
            "# demo\nalpha = 0.2\noutput_dir = {}\nmkd_per_eur = 50\n",
            out_dir.display()
        ),
    )
    .unwrap();
    let mut args = vec![
        "report",
        data.as_str(),
        "--config",
        config.to_str().unwrap(),
        "--mkd-per-eur",
        "61.5",
    ];
    args.extend(SMALL_GRID);
    let text = stdout(&run(&args));
    assert!(
        text.contains("80% (alpha = 0.2)") && text.contains("61.5 MKD per EUR"),
        "{text}"
    );
    let written = std::fs::read_to_string(out_dir.join("config.txt")).unwrap();
    assert!(
        written.contains("alpha = 0.2") && written.contains("mkd_per_eur = 61.5"),
        "{written}"
    );
    assert!(out_dir.join("table_models_gwp.csv").exists());

    let out = run(&["report", &data, "--alpha", "2"]);
    assert!(!out.status.success());
}

//! Drives the command-line interface end to end: writes a dataset and a
//! config to a scratch directory, runs the `run` subcommand in-process,
//! and inspects the artifacts it leaves behind.

use std::fmt::Write as _;
use std::fs;

use genefront::cli::main_with_args;
use genefront::report::RunReport;
use genefront::synthetic::informative_dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("genefront_cli_run");
    fs::create_dir_all(&dir)?;

    let (ds, informative) = informative_dataset(150, 15, 3, 0.3, 6);
    let mut csv = ds.feature_names.join(",") + ",label\n";
    for r in 0..ds.n_rows() {
        for c in 0..ds.n_features() {
            write!(csv, "{},", ds.value(r, c))?;
        }
        writeln!(csv, "{}", ds.label(r))?;
    }
    let data_path = dir.join("data.csv");
    fs::write(&data_path, csv)?;
    println!("informative columns: {informative:?}");

    let config = serde_json::json!({
        "data": { "path": data_path, "split_seed": 6 },
        "engine": { "pop_size": 30, "generations": 10, "master_seed": 6 },
        "evaluator": { "learning_rate": 0.1 },
        "output": { "directory": dir.join("out") },
    });
    let config_path = dir.join("config.json");
    fs::write(&config_path, serde_json::to_string_pretty(&config)?)?;

    let code = main_with_args([
        "genefront",
        "run",
        "--config",
        config_path.to_str().unwrap(),
    ]);
    println!("exit code: {code}");

    let report = RunReport::from_json(&fs::read_to_string(dir.join("out/report.json"))?)?;
    println!(
        "report: {} archive points, {} evaluations, knee k={} at {:.4} accuracy",
        report.archive.len(),
        report.total_evaluations,
        report.knee.k,
        report.knee.test_accuracy
    );
    for name in ["report.json", "archive.csv", "front_history.csv"] {
        let len = fs::metadata(dir.join("out").join(name))?.len();
        println!("  out/{name}: {len} bytes");
    }
    Ok(())
}

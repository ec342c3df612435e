//! Command-line surface. Four subcommands share one JSON configuration
//! file: `run` executes the full search and writes its artifacts,
//! `baseline` runs the weighted-sum method once per weight, `sweep` runs
//! the engine across a parameter grid, and `evaluate` classifies a stored
//! bit pattern.

use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::baselines::{sweep_weights, DEFAULT_WEIGHT_GRID};
use crate::classify::{accuracy, train_svm};
use crate::config::RunConfigFile;
use crate::core::{BitChromosome, Individual, ObjectiveVector};
use crate::dataset::{load_csv, preprocess, split, Dataset, SplitIndices};
use crate::engine::{knee_from_scores, run, score_archive, EvolutionConfig};
use crate::error::{Error, Result};
use crate::neurocost::{splitmix64, SubsetEvaluator, TrainSpec};
use crate::report::{
    assemble_report, baseline_csv, read_archive_csv, sweep_csv, write_run_artifacts,
    BaselineRow, SweepRow,
};

#[derive(Parser, Debug)]
#[command(
    name = "genefront",
    version,
    about = "Multi-objective feature selection with a neural cost evaluator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Overrides engine.master_seed from the configuration.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Worker threads for batch evaluation.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Overrides output.directory from the configuration.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full search: evolve, pick the knee, write report.json, archive.csv,
    /// and front_history.csv.
    Run,
    /// Weighted-sum baseline: one scalarized run per weight, written to
    /// baseline.csv.
    Baseline {
        /// Comma-separated weights in [0, 1]; defaults to
        /// 0.1,0.3,0.5,0.7,0.9.
        #[arg(long, value_delimiter = ',', value_name = "W,...")]
        weights: Vec<f64>,
        /// archive.csv from an engine run to annotate dominance against.
        #[arg(long, value_name = "PATH")]
        archive: Option<PathBuf>,
    },
    /// One engine run per grid cell, written to sweep.csv; failed cells
    /// are logged and skipped.
    Sweep,
    /// Train the downstream classifier on a stored bit pattern and print
    /// its accuracy.
    Evaluate {
        /// Mask as lowercase hex, most significant feature first.
        #[arg(long, value_name = "HEX")]
        bits: String,
    },
}

/// Entry point that returns the exit code instead of exiting, so tests
/// can drive the binary in-process.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfigFile> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let mut cfg = RunConfigFile::from_path(path)?;
    if let Some(seed) = cli.seed {
        cfg.engine.master_seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.directory = out.display().to_string();
    }
    Ok(cfg)
}

fn load_data(cfg: &RunConfigFile) -> Result<(Dataset, SplitIndices)> {
    let raw = load_csv(Path::new(&cfg.data.path), &cfg.csv_options()?)?;
    let sp = split(&raw, cfg.data.split_ratio, cfg.data.split_seed)?;
    let ds = preprocess(&raw, Some(&sp))?;
    Ok((ds, sp))
}

fn write_output(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::Output(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, text)
        .map_err(|e| Error::Output(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn dispatch(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("warning: thread pool already initialized ({e})");
        }
    }
    let cfg = load_config(&cli)?;
    let (ds, sp) = load_data(&cfg)?;
    match cli.command {
        Command::Run => cmd_run(&cfg, &ds, &sp),
        Command::Baseline { weights, archive } => {
            cmd_baseline(&cfg, &ds, &sp, &weights, archive.as_deref())
        }
        Command::Sweep => cmd_sweep(&cfg, &ds, &sp),
        Command::Evaluate { bits } => cmd_evaluate(&cfg, &ds, &sp, &bits),
    }
}

fn cmd_run(cfg: &RunConfigFile, ds: &Dataset, sp: &SplitIndices) -> Result<()> {
    let evo = cfg.evolution();
    let mut evaluator =
        SubsetEvaluator::new(ds, sp, cfg.train_spec(), evo.master_seed);
    let outcome = run(&evo, ds.n_features(), &mut evaluator)?;
    let svm = cfg.svm_spec();
    let scores = score_archive(&outcome.archive, ds, sp, &svm)?;
    let knee = knee_from_scores(&outcome.archive, &scores, ds, sp, &svm)?;
    let report = assemble_report(&outcome, cfg, &knee, &scores);
    let dir = Path::new(&cfg.output.directory);
    write_run_artifacts(dir, &report)?;
    println!(
        "knee {} k={} f1={:.6} test_accuracy={:.4}",
        report.knee.bits_hex, report.knee.k, report.knee.f1, report.knee.test_accuracy
    );
    println!(
        "archive {} points, {} evaluations, artifacts in {}",
        report.archive.len(),
        report.total_evaluations,
        dir.display()
    );
    Ok(())
}

fn load_reference_archive(path: &Path, d: usize) -> Result<Vec<Individual>> {
    read_archive_csv(path)?
        .into_iter()
        .map(|row| {
            let chrom = BitChromosome::from_hex(&row.bits_hex, d)?;
            let obj = ObjectiveVector::new(row.f1, row.k as f64)?;
            Ok(Individual::evaluated(chrom, obj))
        })
        .collect()
}

fn cmd_baseline(
    cfg: &RunConfigFile,
    ds: &Dataset,
    sp: &SplitIndices,
    weights: &[f64],
    archive: Option<&Path>,
) -> Result<()> {
    let weights: Vec<f64> = if weights.is_empty() {
        DEFAULT_WEIGHT_GRID.to_vec()
    } else {
        weights.to_vec()
    };
    let reference = archive
        .map(|p| load_reference_archive(p, ds.n_features()))
        .transpose()?;

    let base = cfg.decomposition(0.5, cfg.engine.master_seed);
    let mut evaluator =
        SubsetEvaluator::new(ds, sp, cfg.train_spec(), cfg.engine.master_seed);
    let runs = sweep_weights(
        &weights,
        &base,
        ds.n_features(),
        &mut evaluator,
        reference.as_deref(),
    )?;

    let rows: Vec<BaselineRow> = runs
        .iter()
        .map(|r| {
            let obj = r
                .outcome
                .best
                .objectives
                .expect("contract violation: unevaluated baseline best");
            BaselineRow {
                weight: r.weight,
                seed: r.seed,
                bits_hex: r.outcome.best.chrom.to_hex(),
                k: r.outcome.best.chrom.popcount(),
                f1: obj.f1(),
                scalar_cost: r.outcome.scalar,
                strictly_dominated: r.comparison.map(|c| c.strictly_dominated),
                covered_by_archive: r.comparison.map(|c| c.covered),
            }
        })
        .collect();

    let dir = Path::new(&cfg.output.directory);
    let path = write_output(dir, "baseline.csv", &baseline_csv(&rows)?)?;
    for row in &rows {
        println!(
            "w={} {} k={} f1={:.6} scalar={:.6}",
            row.weight, row.bits_hex, row.k, row.f1, row.scalar_cost
        );
    }
    println!("{} rows in {}", rows.len(), path.display());
    Ok(())
}

fn cmd_sweep(cfg: &RunConfigFile, ds: &Dataset, sp: &SplitIndices) -> Result<()> {
    let grid = &cfg.sweep;
    let master = cfg.engine.master_seed;
    let mut rows: Vec<SweepRow> = Vec::new();
    let mut failures = 0usize;
    let mut cell_index = 0u64;

    for &rate in &grid.offspring_rates {
        for &pop in &grid.pop_sizes {
            for &neurons in &grid.neuron_counts {
                for _ in 0..grid.seeds_per_cell {
                    let cell_seed = splitmix64(master ^ splitmix64(cell_index));
                    cell_index += 1;
                    match sweep_cell(cfg, ds, sp, rate, pop, neurons, cell_seed) {
                        Ok(row) => rows.push(row),
                        Err(e) => {
                            failures += 1;
                            eprintln!(
                                "cell offspring_rate={rate} population={pop} \
                                 neurons={neurons} failed: {e}"
                            );
                        }
                    }
                }
            }
        }
    }

    let dir = Path::new(&cfg.output.directory);
    let path = write_output(dir, "sweep.csv", &sweep_csv(&rows)?)?;
    if let Some(best) = rows.iter().min_by(|a, b| a.best_f1.total_cmp(&b.best_f1)) {
        println!(
            "best cell: offspring_rate={} population={} neurons={} best_f1={:.6} \
             best_k={} test_accuracy={:.4}",
            best.offspring_rate,
            best.population,
            best.neurons,
            best.best_f1,
            best.best_k,
            best.test_accuracy
        );
    }
    println!(
        "{} rows ({} failed cells) in {}",
        rows.len(),
        failures,
        path.display()
    );
    Ok(())
}

fn sweep_cell(
    cfg: &RunConfigFile,
    ds: &Dataset,
    sp: &SplitIndices,
    rate: f64,
    pop: usize,
    neurons: usize,
    cell_seed: u64,
) -> Result<SweepRow> {
    let evo = EvolutionConfig {
        pop_size: pop,
        offspring_rate: rate,
        hidden_neurons: neurons,
        master_seed: cell_seed,
        ..cfg.evolution()
    };
    let spec = TrainSpec { hidden: neurons, ..cfg.train_spec() };
    let mut evaluator = SubsetEvaluator::new(ds, sp, spec, cell_seed);
    let outcome = run(&evo, ds.n_features(), &mut evaluator)?;

    let best = outcome
        .archive
        .iter()
        .min_by(|a, b| {
            let (oa, ob) = (a.objectives.unwrap(), b.objectives.unwrap());
            oa.f1()
                .total_cmp(&ob.f1())
                .then(oa.f2().total_cmp(&ob.f2()))
                .then_with(|| a.chrom.to_hex().cmp(&b.chrom.to_hex()))
        })
        .expect("contract violation: empty archive from a finished run");

    let svm = crate::classify::SvmSpec { seed: cell_seed, ..cfg.svm_spec() };
    let model = train_svm(ds, sp, &best.chrom, &svm)?;
    let test_accuracy = accuracy(&model, ds, &sp.test_rows, &best.chrom)?;
    Ok(SweepRow {
        offspring_rate: rate,
        population: pop,
        neurons,
        best_f1: best.objectives.unwrap().f1(),
        best_k: best.chrom.popcount(),
        test_accuracy,
        seconds: outcome.wall_time_secs,
    })
}

fn cmd_evaluate(
    cfg: &RunConfigFile,
    ds: &Dataset,
    sp: &SplitIndices,
    bits: &str,
) -> Result<()> {
    let chrom = BitChromosome::from_hex(bits, ds.n_features())?;
    if chrom.popcount() == 0 {
        return Err(Error::Data(format!(
            "bit pattern {bits:?} selects no features"
        )));
    }
    let svm = cfg.svm_spec();
    let model = train_svm(ds, sp, &chrom, &svm)?;
    let train_accuracy = accuracy(&model, ds, &sp.train_rows, &chrom)?;
    let test_accuracy = accuracy(&model, ds, &sp.test_rows, &chrom)?;
    println!(
        "{}",
        serde_json::json!({
            "bits_hex": chrom.to_hex(),
            "k": chrom.popcount(),
            "train_accuracy": train_accuracy,
            "test_accuracy": test_accuracy,
        })
    );
    Ok(())
}

// Exercised end to end from tests/cli_interface.rs; unit tests here cover
// only argument plumbing that needs no dataset.
#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_flags_exit_with_the_config_code() {
        assert_eq!(main_with_args(["genefront", "run", "--bogus"]), 2);
    }

    #[test]
    fn missing_config_flag_exits_with_the_config_code() {
        assert_eq!(main_with_args(["genefront", "run"]), 2);
    }

    #[test]
    fn help_exits_cleanly() {
        assert_eq!(main_with_args(["genefront", "--help"]), 0);
        assert_eq!(main_with_args(["genefront", "run", "--help"]), 0);
    }

    #[test]
    fn weights_parse_as_a_comma_list() {
        let cli = Cli::try_parse_from([
            "genefront",
            "baseline",
            "--config",
            "c.json",
            "--weights",
            "0.1,0.5,0.9",
        ])
        .unwrap();
        match cli.command {
            Command::Baseline { weights, archive } => {
                assert_eq!(weights, vec![0.1, 0.5, 0.9]);
                assert!(archive.is_none());
            }
            other => panic!("parsed into {other:?}"),
        }
    }

    #[test]
    fn global_flags_are_accepted_after_the_subcommand() {
        let cli = Cli::try_parse_from([
            "genefront", "run", "--config", "c.json", "--seed", "9", "--jobs", "2",
            "--out", "dir",
        ])
        .unwrap();
        assert_eq!(cli.seed, Some(9));
        assert_eq!(cli.jobs, Some(2));
        assert_eq!(cli.out.as_deref(), Some(Path::new("dir")));
    }
}

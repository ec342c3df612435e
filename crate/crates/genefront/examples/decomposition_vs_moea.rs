//! One multi-objective run against the weighted-sum method at five
//! weights: the single archive should cover every scalarized answer.

use genefront::baselines::{sweep_weights, DecompositionConfig, DEFAULT_WEIGHT_GRID};
use genefront::dataset::{preprocess, split};
use genefront::engine::{run, EvolutionConfig};
use genefront::neurocost::{SubsetEvaluator, TrainSpec};
use genefront::synthetic::informative_dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (raw, _) = informative_dataset(200, 30, 5, 0.3, 12);
    let sp = split(&raw, 0.7, 12)?;
    let ds = preprocess(&raw, Some(&sp))?;
    let d = ds.n_features();

    let cfg = EvolutionConfig {
        pop_size: 40,
        generations: 20,
        ..EvolutionConfig::new(12)
    };
    let spec = TrainSpec { learning_rate: 0.1, ..TrainSpec::new(0) };
    let mut evaluator = SubsetEvaluator::new(&ds, &sp, spec, cfg.master_seed);
    let engine_out = run(&cfg, d, &mut evaluator)?;
    let mut sizes: Vec<usize> = engine_out
        .archive
        .iter()
        .map(|m| m.chrom.popcount())
        .collect();
    sizes.dedup();
    println!(
        "one engine run: archive of {} points across k = {:?}",
        engine_out.archive.len(),
        sizes
    );

    let base = DecompositionConfig {
        pop_size: 40,
        generations: 20,
        ..DecompositionConfig::new(12)
    };
    let runs = sweep_weights(
        &DEFAULT_WEIGHT_GRID,
        &base,
        d,
        &mut evaluator,
        Some(&engine_out.archive),
    )?;

    println!("weighted-sum method, one full run per weight:");
    for r in &runs {
        let obj = r.outcome.best.objectives.unwrap();
        let cmp = r.comparison.unwrap();
        println!(
            "  w={:.1}: k={:2} f1={:.4} scalar={:.4} covered_by_archive={} strictly_dominated={}",
            r.weight,
            r.outcome.best.chrom.popcount(),
            obj.f1(),
            r.outcome.scalar,
            cmp.covered,
            cmp.strictly_dominated
        );
    }

    let covered = runs.iter().filter(|r| r.comparison.unwrap().covered).count();
    println!(
        "the single archive covers {covered}/{} scalarized answers",
        runs.len()
    );
    Ok(())
}

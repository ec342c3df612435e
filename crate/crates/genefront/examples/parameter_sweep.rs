//! Small grid over population size and evaluator width, one engine run
//! per cell, reporting each cell's best archive point.

use genefront::classify::{accuracy, train_svm, SvmSpec};
use genefront::dataset::{preprocess, split};
use genefront::engine::{run, EvolutionConfig};
use genefront::neurocost::{SubsetEvaluator, TrainSpec};
use genefront::synthetic::informative_dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (raw, _) = informative_dataset(150, 20, 4, 0.3, 30);
    let sp = split(&raw, 0.7, 30)?;
    let ds = preprocess(&raw, Some(&sp))?;

    println!("population  neurons  best_f1  best_k  test_acc  seconds");
    for &pop in &[20usize, 40] {
        for &neurons in &[10usize, 15] {
            let cfg = EvolutionConfig {
                pop_size: pop,
                generations: 10,
                hidden_neurons: neurons,
                ..EvolutionConfig::new(30)
            };
            let spec = TrainSpec {
                hidden: neurons,
                learning_rate: 0.1,
                ..TrainSpec::new(0)
            };
            let mut evaluator = SubsetEvaluator::new(&ds, &sp, spec, cfg.master_seed);
            let out = run(&cfg, ds.n_features(), &mut evaluator)?;

            let best = out
                .archive
                .iter()
                .min_by(|a, b| {
                    a.objectives
                        .unwrap()
                        .f1()
                        .total_cmp(&b.objectives.unwrap().f1())
                })
                .unwrap();
            let model = train_svm(&ds, &sp, &best.chrom, &SvmSpec::new(30))?;
            let acc = accuracy(&model, &ds, &sp.test_rows, &best.chrom)?;
            println!(
                "{pop:10}  {neurons:7}  {:.4}  {:6}  {acc:.4}    {:.2}",
                best.objectives.unwrap().f1(),
                best.chrom.popcount(),
                out.wall_time_secs
            );
        }
    }
    Ok(())
}

//! Trains the neural evaluator on two different masks of the same dataset
//! and compares their costs: informative features score far below noise.

use genefront::core::BitChromosome;
use genefront::dataset::{preprocess, split};
use genefront::neurocost::{evaluate_subset, train_subset, TrainSpec};
use genefront::synthetic::informative_dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (raw, informative) = informative_dataset(200, 20, 3, 0.2, 8);
    let sp = split(&raw, 0.7, 8)?;
    let ds = preprocess(&raw, Some(&sp))?;
    println!("informative columns: {informative:?}");

    // A 140-row training split yields few batches per epoch, so the step
    // size is raised well above the large-data default.
    let spec = TrainSpec { learning_rate: 0.1, ..TrainSpec::new(0) };
    let good = BitChromosome::from_indices(20, &informative);
    let noise: Vec<usize> = (0..20).filter(|c| !informative.contains(c)).take(3).collect();
    let bad = BitChromosome::from_indices(20, &noise);

    let run = train_subset(&ds, &sp, &good, &spec)?;
    println!("informative mask {}:", good.to_hex());
    for (e, (tl, vm)) in run
        .epoch_train_loss
        .iter()
        .zip(&run.epoch_val_mse)
        .enumerate()
    {
        println!("  epoch {:2}: train loss {tl:.4}, val mse {vm:.4}", e + 1);
    }

    let f1_good = evaluate_subset(&ds, &sp, &good, &spec)?;
    let f1_bad = evaluate_subset(&ds, &sp, &bad, &spec)?;
    println!("cost of informative mask: {f1_good:.4}");
    println!("cost of noise mask {}: {f1_bad:.4}", bad.to_hex());

    let again = evaluate_subset(&ds, &sp, &good, &spec)?;
    println!("repeat evaluation bit-identical: {}", again == f1_good);
    Ok(())
}

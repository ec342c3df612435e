//! Trains the downstream linear classifier on a separable problem and
//! reports train and test accuracy.

use genefront::classify::{accuracy, error_rate, train_svm, SvmSpec};
use genefront::core::BitChromosome;
use genefront::dataset::{preprocess, split};
use genefront::synthetic::gaussian_blobs;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let raw = gaussian_blobs(150, 4, 2.5, 0.5, 17);
    let sp = split(&raw, 0.7, 17)?;
    let ds = preprocess(&raw, Some(&sp))?;

    let chrom = BitChromosome::from_indices(4, &[0, 1, 2, 3]);
    let model = train_svm(&ds, &sp, &chrom, &SvmSpec::new(17))?;

    println!("weights: {:?}", model.weights);
    println!("bias: {:.4}", model.bias);
    println!(
        "train accuracy: {:.4}",
        accuracy(&model, &ds, &sp.train_rows, &chrom)?
    );
    println!(
        "test accuracy:  {:.4}",
        accuracy(&model, &ds, &sp.test_rows, &chrom)?
    );
    println!(
        "test error:     {:.4}",
        error_rate(&model, &ds, &sp.test_rows, &chrom)?
    );

    let one = BitChromosome::from_indices(4, &[2]);
    let small = train_svm(&ds, &sp, &one, &SvmSpec::new(17))?;
    println!(
        "single-feature test accuracy: {:.4}",
        accuracy(&small, &ds, &sp.test_rows, &one)?
    );
    Ok(())
}

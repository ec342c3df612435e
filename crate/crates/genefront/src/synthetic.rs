//! Seeded synthetic datasets for exercising the selection pipeline without
//! external files.

use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;

/// Standard-normal features where only a known subset drives the label:
/// the class is the sign of a weighted sum of the informative columns plus
/// Gaussian noise of the given deviation. Returns the dataset along with
/// the informative column indices, ascending.
pub fn informative_dataset(
    n: usize,
    d: usize,
    n_informative: usize,
    noise_sigma: f64,
    seed: u64,
) -> (Dataset, Vec<usize>) {
    assert!(n_informative <= d, "more informative columns than columns");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut informative =
        rand::seq::index::sample(&mut rng, d, n_informative).into_vec();
    informative.sort_unstable();

    // Weights bounded away from zero so every informative column matters.
    let weights: Vec<f64> = (0..n_informative)
        .map(|_| {
            let magnitude = rng.gen_range(1.0..2.0);
            if rng.gen_bool(0.5) {
                magnitude
            } else {
                -magnitude
            }
        })
        .collect();

    let normal = StandardNormal;
    let mut features = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let start = features.len();
        for _ in 0..d {
            features.push(normal.sample(&mut rng));
        }
        let signal: f64 = informative
            .iter()
            .zip(&weights)
            .map(|(&c, &w)| w * features[start + c])
            .sum();
        let noise: f64 = normal.sample(&mut rng);
        labels.push(u8::from(signal + noise_sigma * noise > 0.0));
    }

    let names = (0..d).map(|c| format!("f{c}")).collect();
    let ds = Dataset::from_parts(n, d, features, labels, names, "synthetic:informative")
        .expect("generator produced a consistent dataset");
    (ds, informative)
}

/// Two Gaussian blobs: class 1 rows center on `+offset` in every
/// coordinate, class 0 rows on `-offset`, unit deviation throughout.
/// `pos_fraction` controls the class balance.
pub fn gaussian_blobs(n: usize, d: usize, offset: f64, pos_fraction: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_pos = (pos_fraction * n as f64).round() as usize;
    let normal = StandardNormal;

    let mut features = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = u8::from(i < n_pos);
        let center = if label == 1 { offset } else { -offset };
        for _ in 0..d {
            let e: f64 = normal.sample(&mut rng);
            features.push(center + e);
        }
        labels.push(label);
    }

    let names = (0..d).map(|c| format!("f{c}")).collect();
    Dataset::from_parts(n, d, features, labels, names, "synthetic:blobs")
        .expect("generator produced a consistent dataset")
}

/// Two-feature sanity problem: feature 0 reproduces the label exactly and
/// feature 1 is uniform noise, so the right subset is known by
/// construction.
pub fn label_copy_dataset(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(n * 2);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let y = rng.gen_bool(0.5);
        features.push(if y { 1.0 } else { 0.0 });
        features.push(rng.gen_range(-1.0..1.0));
        labels.push(u8::from(y));
    }
    Dataset::from_parts(
        n,
        2,
        features,
        labels,
        vec!["copy".into(), "noise".into()],
        "synthetic:label-copy",
    )
    .expect("generator produced a consistent dataset")
}

//! Downstream accuracy check: a primal linear SVM over the selected
//! columns, trained by seeded stochastic subgradient descent.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::core::BitChromosome;
use crate::dataset::{Dataset, SplitIndices};
use crate::error::{Error, Result};

/// Hinge-loss training settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvmSpec {
    /// L2 regularization strength.
    pub lambda: f64,
    /// Full passes over the training rows.
    pub epochs: usize,
    pub seed: u64,
}

impl SvmSpec {
    pub fn new(seed: u64) -> Self {
        SvmSpec { lambda: 1e-4, epochs: 100, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be positive".into()));
        }
        Ok(())
    }
}

/// Separating hyperplane over the selected columns.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearModel {
    /// Signed class for one projected row: +1 when the score is at least
    /// zero, -1 otherwise.
    pub fn predict(&self, x: &[f64]) -> i8 {
        let mut score = self.bias;
        for (w, v) in self.weights.iter().zip(x) {
            score += w * v;
        }
        if score >= 0.0 {
            1
        } else {
            -1
        }
    }
}

fn signed_label(y: u8) -> f64 {
    2.0 * f64::from(y) - 1.0
}

fn gather(ds: &Dataset, row: usize, cols: &[usize], buf: &mut [f64]) {
    let r = ds.row(row);
    for (slot, &c) in buf.iter_mut().zip(cols) {
        *slot = r[c];
    }
}

/// Trains on the split's training rows with step size `1 / (lambda * t)`,
/// shrinking the weights every step, adding margin violators, and
/// projecting onto the ball of radius `1 / sqrt(lambda)`. The bias is
/// unregularized. Raw labels map to -1 and +1.
pub fn train_svm(
    ds: &Dataset,
    split: &SplitIndices,
    chrom: &BitChromosome,
    spec: &SvmSpec,
) -> Result<LinearModel> {
    spec.validate()?;
    let cols = chrom.selected_indices();
    if cols.is_empty() {
        return Err(Error::Contract(
            "classification needs a mask with at least one feature".into(),
        ));
    }
    let classes: std::collections::HashSet<u8> =
        split.train_rows.iter().map(|&r| ds.label(r)).collect();
    if classes.len() < 2 {
        return Err(Error::Evaluation(
            "training rows hold a single class; a separating model is undefined".into(),
        ));
    }

    let k = cols.len();
    let mut w = vec![0.0f64; k];
    let mut b = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut order = split.train_rows.clone();
    let mut x = vec![0.0f64; k];
    let radius = 1.0 / spec.lambda.sqrt();

    let mut t = 0u64;
    for _ in 0..spec.epochs {
        order.shuffle(&mut rng);
        for &r in &order {
            t += 1;
            let eta = 1.0 / (spec.lambda * t as f64);
            gather(ds, r, &cols, &mut x);
            let y = signed_label(ds.label(r));
            let mut score = b;
            for (wv, xv) in w.iter().zip(&x) {
                score += wv * xv;
            }
            let violated = y * score < 1.0;

            let shrink = 1.0 - eta * spec.lambda;
            for wv in &mut w {
                *wv *= shrink;
            }
            if violated {
                for (wv, xv) in w.iter_mut().zip(&x) {
                    *wv += eta * y * xv;
                }
                b += eta * y;
            }

            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > radius {
                let s = radius / norm;
                for wv in &mut w {
                    *wv *= s;
                }
            }
        }
    }
    Ok(LinearModel { weights: w, bias: b })
}

/// Fraction of `rows` whose predicted sign matches the label.
pub fn accuracy(
    model: &LinearModel,
    ds: &Dataset,
    rows: &[usize],
    chrom: &BitChromosome,
) -> Result<f64> {
    let cols = chrom.selected_indices();
    if rows.is_empty() {
        return Err(Error::Contract("accuracy over an empty row set".into()));
    }
    if cols.len() != model.weights.len() {
        return Err(Error::Contract(format!(
            "model has {} weights but the mask selects {} features",
            model.weights.len(),
            cols.len()
        )));
    }
    let mut x = vec![0.0f64; cols.len()];
    let mut hits = 0usize;
    for &r in rows {
        gather(ds, r, &cols, &mut x);
        if f64::from(model.predict(&x)) == signed_label(ds.label(r)) {
            hits += 1;
        }
    }
    Ok(hits as f64 / rows.len() as f64)
}

/// Fraction of `rows` predicted wrongly; complements [`accuracy`] exactly.
pub fn error_rate(
    model: &LinearModel,
    ds: &Dataset,
    rows: &[usize],
    chrom: &BitChromosome,
) -> Result<f64> {
    let cols = chrom.selected_indices();
    if rows.is_empty() {
        return Err(Error::Contract("error rate over an empty row set".into()));
    }
    let mut x = vec![0.0f64; cols.len()];
    let mut misses = 0usize;
    for &r in rows {
        gather(ds, r, &cols, &mut x);
        if f64::from(model.predict(&x)) != signed_label(ds.label(r)) {
            misses += 1;
        }
    }
    Ok(misses as f64 / rows.len() as f64)
}

/// Regularized hinge objective of a model on the given rows:
/// `lambda / 2 * ||w||^2` plus the mean hinge loss. The zero model scores
/// exactly 1.
pub fn hinge_objective(
    model: &LinearModel,
    ds: &Dataset,
    rows: &[usize],
    chrom: &BitChromosome,
    lambda: f64,
) -> f64 {
    let cols = chrom.selected_indices();
    let mut x = vec![0.0f64; cols.len()];
    let mut hinge_sum = 0.0;
    for &r in rows {
        gather(ds, r, &cols, &mut x);
        let mut score = model.bias;
        for (wv, xv) in model.weights.iter().zip(&x) {
            score += wv * xv;
        }
        hinge_sum += (1.0 - signed_label(ds.label(r)) * score).max(0.0);
    }
    let norm2: f64 = model.weights.iter().map(|v| v * v).sum();
    lambda / 2.0 * norm2 + hinge_sum / rows.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{preprocess, split};
    use crate::synthetic::gaussian_blobs;

    fn blob_problem(seed: u64) -> (Dataset, SplitIndices, BitChromosome) {
        let ds = gaussian_blobs(100, 2, 3.0, 0.5, seed);
        let sp = split(&ds, 0.7, seed).unwrap();
        let ds = preprocess(&ds, Some(&sp)).unwrap();
        (ds, sp, BitChromosome::from_indices(2, &[0, 1]))
    }

    #[test]
    fn separable_blobs_are_fit_almost_perfectly() {
        let (ds, sp, chrom) = blob_problem(21);
        let model = train_svm(&ds, &sp, &chrom, &SvmSpec::new(5)).unwrap();
        let train_acc = accuracy(&model, &ds, &sp.train_rows, &chrom).unwrap();
        let test_acc = accuracy(&model, &ds, &sp.test_rows, &chrom).unwrap();
        assert!(train_acc >= 0.99, "train accuracy {train_acc}");
        assert!(test_acc >= 0.95, "test accuracy {test_acc}");
    }

    #[test]
    fn heavy_regularization_collapses_the_weights() {
        // Imbalanced classes so the unregularized bias dominates the tiny
        // weights and every prediction carries the majority sign.
        let ds = gaussian_blobs(100, 2, 3.0, 0.7, 3);
        let sp = split(&ds, 0.7, 3).unwrap();
        let ds = preprocess(&ds, Some(&sp)).unwrap();
        let chrom = BitChromosome::from_indices(2, &[0, 1]);
        let spec = SvmSpec { lambda: 1e6, ..SvmSpec::new(9) };
        let model = train_svm(&ds, &sp, &chrom, &spec).unwrap();
        let norm: f64 = model.weights.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm < 1e-2, "weight norm {norm}");
        let mut x = vec![0.0; 2];
        let first = {
            gather(&ds, sp.test_rows[0], &[0, 1], &mut x);
            model.predict(&x)
        };
        for &r in &sp.test_rows {
            gather(&ds, r, &[0, 1], &mut x);
            assert_eq!(model.predict(&x), first, "prediction flipped on row {r}");
        }
    }

    #[test]
    fn training_is_seed_deterministic() {
        let (ds, sp, chrom) = blob_problem(4);
        let a = train_svm(&ds, &sp, &chrom, &SvmSpec::new(7)).unwrap();
        let b = train_svm(&ds, &sp, &chrom, &SvmSpec::new(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn accuracy_and_error_rate_partition_the_rows() {
        let (ds, sp, chrom) = blob_problem(11);
        let spec = SvmSpec { epochs: 2, ..SvmSpec::new(0) };
        let model = train_svm(&ds, &sp, &chrom, &spec).unwrap();
        let acc = accuracy(&model, &ds, &sp.test_rows, &chrom).unwrap();
        let err = error_rate(&model, &ds, &sp.test_rows, &chrom).unwrap();
        assert_eq!(acc + err, 1.0);
    }

    #[test]
    fn joint_positive_rescaling_preserves_predictions() {
        let (ds, sp, chrom) = blob_problem(14);
        let model = train_svm(&ds, &sp, &chrom, &SvmSpec::new(2)).unwrap();
        let scaled = LinearModel {
            weights: model.weights.iter().map(|w| w * 3.7).collect(),
            bias: model.bias * 3.7,
        };
        let mut x = vec![0.0; 2];
        for r in 0..ds.n_rows() {
            gather(&ds, r, &[0, 1], &mut x);
            assert_eq!(model.predict(&x), scaled.predict(&x));
        }
    }

    #[test]
    fn final_objective_beats_the_zero_model() {
        for seed in 0..5 {
            let (ds, sp, chrom) = blob_problem(30 + seed);
            let spec = SvmSpec::new(seed);
            let model = train_svm(&ds, &sp, &chrom, &spec).unwrap();
            let trained =
                hinge_objective(&model, &ds, &sp.train_rows, &chrom, spec.lambda);
            let zero = LinearModel { weights: vec![0.0; 2], bias: 0.0 };
            let baseline =
                hinge_objective(&zero, &ds, &sp.train_rows, &chrom, spec.lambda);
            assert_eq!(baseline, 1.0);
            assert!(trained <= baseline, "seed {seed}: {trained} > {baseline}");
        }
    }

    #[test]
    fn single_class_training_data_is_rejected() {
        let ds = gaussian_blobs(40, 2, 3.0, 1.0, 8);
        let sp = SplitIndices { train_rows: (0..40).collect(), test_rows: vec![], seed: 0 };
        let err = train_svm(&ds, &sp, &BitChromosome::from_indices(2, &[0]), &SvmSpec::new(0))
            .unwrap_err();
        assert!(matches!(err, Error::Evaluation(_)), "got: {err}");
    }
}

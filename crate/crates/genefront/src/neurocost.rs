//! Feature-subset cost from a small trained network. The training rows are
//! projected onto the selected columns, a one-hidden-layer perceptron is
//! trained on cross-entropy, and the subset's cost is the mean of the
//! per-epoch validation mean squared errors. Every quantity is a pure
//! function of the inputs and the seed.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::core::{BitChromosome, ObjectiveVector};
use crate::dataset::{Dataset, SplitIndices};
use crate::error::{Error, Result};

/// Negative slope applied below zero by the hidden activation.
pub const LEAKY_SLOPE: f64 = 0.01;

/// Floor and ceiling applied to predictions inside the log loss.
pub const PREDICTION_CLAMP: f64 = 1e-7;

/// Mean squared error between targets and predictions. Panics when the
/// slices are empty or of different lengths; callers own that contract.
pub fn mse(y: &[f64], yhat: &[f64]) -> f64 {
    assert!(
        !y.is_empty() && y.len() == yhat.len(),
        "contract violation: mse needs equal-length non-empty slices"
    );
    let sum: f64 = y
        .iter()
        .zip(yhat)
        .map(|(&t, &p)| (t - p) * (t - p))
        .sum();
    sum / y.len() as f64
}

/// Binary cross-entropy of one prediction, with the prediction clamped
/// into `[PREDICTION_CLAMP, 1 - PREDICTION_CLAMP]` so the logs stay finite.
pub fn cross_entropy(y: f64, yhat: f64) -> f64 {
    let p = yhat.clamp(PREDICTION_CLAMP, 1.0 - PREDICTION_CLAMP);
    -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// One hidden layer of leaky rectified units feeding a single sigmoid
/// output.
#[derive(Clone, Debug)]
pub struct MlpModel {
    input: usize,
    hidden: usize,
    /// `hidden x input`, row-major: row `j` feeds hidden unit `j`.
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: f64,
}

impl MlpModel {
    /// Seeded initialization: weights uniform in `±sqrt(6 / fan_in)`,
    /// biases zero.
    pub fn init<R: Rng>(input: usize, hidden: usize, rng: &mut R) -> Self {
        assert!(input > 0 && hidden > 0, "contract violation: empty layer");
        let lim1 = (6.0 / input as f64).sqrt();
        let w1 = (0..hidden * input).map(|_| rng.gen_range(-lim1..lim1)).collect();
        let lim2 = (6.0 / hidden as f64).sqrt();
        let w2 = (0..hidden).map(|_| rng.gen_range(-lim2..lim2)).collect();
        MlpModel { input, hidden, w1, b1: vec![0.0; hidden], w2, b2: 0.0 }
    }

    /// Builds a model from explicit parameters, checking shapes.
    pub fn from_parts(
        input: usize,
        hidden: usize,
        w1: Vec<f64>,
        b1: Vec<f64>,
        w2: Vec<f64>,
        b2: f64,
    ) -> Result<Self> {
        if w1.len() != hidden * input || b1.len() != hidden || w2.len() != hidden {
            return Err(Error::Contract(format!(
                "parameter shapes do not match {hidden} hidden units over {input} inputs"
            )));
        }
        Ok(MlpModel { input, hidden, w1, b1, w2, b2 })
    }

    pub fn input_width(&self) -> usize {
        self.input
    }

    pub fn hidden_width(&self) -> usize {
        self.hidden
    }

    /// Predicted probability for one input row.
    pub fn forward(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.input);
        let mut z_out = self.b2;
        for j in 0..self.hidden {
            let row = &self.w1[j * self.input..(j + 1) * self.input];
            let mut pre = self.b1[j];
            for (w, v) in row.iter().zip(x) {
                pre += w * v;
            }
            let act = if pre > 0.0 { pre } else { LEAKY_SLOPE * pre };
            z_out += self.w2[j] * act;
        }
        sigmoid(z_out)
    }

    /// Mean cross-entropy of the model over `rows` stacked row-major.
    pub fn batch_loss(&self, rows: &[f64], targets: &[f64]) -> f64 {
        assert!(
            !targets.is_empty() && rows.len() == targets.len() * self.input,
            "contract violation: batch shape mismatch"
        );
        let mut total = 0.0;
        for (i, &t) in targets.iter().enumerate() {
            let x = &rows[i * self.input..(i + 1) * self.input];
            total += cross_entropy(t, self.forward(x));
        }
        total / targets.len() as f64
    }

    /// Mean cross-entropy over the batch and its gradient with respect to
    /// every parameter.
    pub fn batch_gradients(&self, rows: &[f64], targets: &[f64]) -> (f64, MlpGradients) {
        assert!(
            !targets.is_empty() && rows.len() == targets.len() * self.input,
            "contract violation: batch shape mismatch"
        );
        let mut g = MlpGradients::zeros(self.input, self.hidden);
        let scale = 1.0 / targets.len() as f64;
        let mut total = 0.0;
        let mut pre = vec![0.0; self.hidden];
        let mut act = vec![0.0; self.hidden];
        for (i, &t) in targets.iter().enumerate() {
            let x = &rows[i * self.input..(i + 1) * self.input];
            let mut z_out = self.b2;
            for j in 0..self.hidden {
                let row = &self.w1[j * self.input..(j + 1) * self.input];
                let mut p = self.b1[j];
                for (w, v) in row.iter().zip(x) {
                    p += w * v;
                }
                pre[j] = p;
                act[j] = if p > 0.0 { p } else { LEAKY_SLOPE * p };
                z_out += self.w2[j] * act[j];
            }
            let yhat = sigmoid(z_out);
            total += cross_entropy(t, yhat);

            // d(mean CE)/dz_out for this sample.
            let dz = (yhat - t) * scale;
            g.b2 += dz;
            for j in 0..self.hidden {
                g.w2[j] += dz * act[j];
                let dpre = dz * self.w2[j] * if pre[j] > 0.0 { 1.0 } else { LEAKY_SLOPE };
                g.b1[j] += dpre;
                let grow = &mut g.w1[j * self.input..(j + 1) * self.input];
                for (gw, v) in grow.iter_mut().zip(x) {
                    *gw += dpre * v;
                }
            }
        }
        (total * scale, g)
    }

    /// Number of trainable parameters.
    pub fn n_params(&self) -> usize {
        self.hidden * self.input + self.hidden + self.hidden + 1
    }

    /// Flat parameter access in the fixed order `w1, b1, w2, b2`; used by
    /// the finite-difference checks.
    pub fn param(&self, i: usize) -> f64 {
        let hw = self.hidden * self.input;
        if i < hw {
            self.w1[i]
        } else if i < hw + self.hidden {
            self.b1[i - hw]
        } else if i < hw + 2 * self.hidden {
            self.w2[i - hw - self.hidden]
        } else {
            self.b2
        }
    }

    pub fn set_param(&mut self, i: usize, v: f64) {
        let hw = self.hidden * self.input;
        if i < hw {
            self.w1[i] = v;
        } else if i < hw + self.hidden {
            self.b1[i - hw] = v;
        } else if i < hw + 2 * self.hidden {
            self.w2[i - hw - self.hidden] = v;
        } else {
            self.b2 = v;
        }
    }

    fn apply_momentum_step(&mut self, velocity: &mut MlpGradients, g: &MlpGradients, lr: f64, momentum: f64) {
        for (v, gv) in velocity.w1.iter_mut().zip(&g.w1) {
            *v = momentum * *v + gv;
        }
        for (v, gv) in velocity.b1.iter_mut().zip(&g.b1) {
            *v = momentum * *v + gv;
        }
        for (v, gv) in velocity.w2.iter_mut().zip(&g.w2) {
            *v = momentum * *v + gv;
        }
        velocity.b2 = momentum * velocity.b2 + g.b2;
        for (w, v) in self.w1.iter_mut().zip(&velocity.w1) {
            *w -= lr * v;
        }
        for (w, v) in self.b1.iter_mut().zip(&velocity.b1) {
            *w -= lr * v;
        }
        for (w, v) in self.w2.iter_mut().zip(&velocity.w2) {
            *w -= lr * v;
        }
        self.b2 -= lr * velocity.b2;
    }
}

/// Parameter-shaped buffer holding gradients (or momentum state).
#[derive(Clone, Debug)]
pub struct MlpGradients {
    input: usize,
    hidden: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl MlpGradients {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        MlpGradients {
            input,
            hidden,
            w1: vec![0.0; hidden * input],
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden],
            b2: 0.0,
        }
    }

    /// Flat access mirroring [`MlpModel::param`].
    pub fn param(&self, i: usize) -> f64 {
        let hw = self.hidden * self.input;
        if i < hw {
            self.w1[i]
        } else if i < hw + self.hidden {
            self.b1[i - hw]
        } else if i < hw + 2 * self.hidden {
            self.w2[i - hw - self.hidden]
        } else {
            self.b2
        }
    }
}

/// Training settings for one subset evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainSpec {
    pub hidden: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub val_fraction: f64,
    pub seed: u64,
}

impl TrainSpec {
    pub fn new(seed: u64) -> Self {
        TrainSpec {
            hidden: 15,
            learning_rate: 0.001,
            momentum: 0.9,
            epochs: 10,
            batch_size: 32,
            val_fraction: 0.2,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::Config(
                "hidden units, epochs, and batch size must be positive".into(),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config(format!(
                "momentum must be in [0, 1), got {}",
                self.momentum
            )));
        }
        if !(self.val_fraction > 0.0 && self.val_fraction < 1.0) {
            return Err(Error::Config(format!(
                "validation fraction must be inside (0, 1), got {}",
                self.val_fraction
            )));
        }
        Ok(())
    }
}

/// A trained model plus its per-epoch traces.
#[derive(Clone, Debug)]
pub struct TrainingRun {
    pub model: MlpModel,
    /// Mean training cross-entropy of each epoch, in epoch order.
    pub epoch_train_loss: Vec<f64>,
    /// Validation mean squared error measured after each epoch.
    pub epoch_val_mse: Vec<f64>,
}

fn project(ds: &Dataset, rows: &[usize], cols: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(rows.len() * cols.len());
    let mut y = Vec::with_capacity(rows.len());
    for &r in rows {
        let row = ds.row(r);
        for &c in cols {
            x.push(row[c]);
        }
        y.push(f64::from(ds.label(r)));
    }
    (x, y)
}

/// Trains a network on the mask's columns and returns it with its traces.
/// The seed drives, in order: the validation holdout shuffle, the weight
/// initialization, and each epoch's batch shuffle.
pub fn train_subset(
    ds: &Dataset,
    split: &SplitIndices,
    chrom: &BitChromosome,
    spec: &TrainSpec,
) -> Result<TrainingRun> {
    spec.validate()?;
    let cols = chrom.selected_indices();
    if cols.is_empty() {
        return Err(Error::Contract(
            "evaluation needs a repaired mask with at least one feature".into(),
        ));
    }

    // A class that appears with a single row cannot be meaningfully split
    // or fit; absent classes are allowed (constant-label data trains fine).
    let mut counts = [0usize; 2];
    for &r in &split.train_rows {
        counts[ds.label(r) as usize] += 1;
    }
    for (class, &count) in counts.iter().enumerate() {
        if count == 1 {
            return Err(Error::Evaluation(format!(
                "class {class} has a single training row"
            )));
        }
    }

    let n_train = split.train_rows.len();
    let n_val = ((spec.val_fraction * n_train as f64).round() as usize).max(1);
    if n_val >= n_train {
        return Err(Error::Evaluation(format!(
            "{n_train} training rows cannot spare {n_val} for validation"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut order = split.train_rows.clone();
    order.shuffle(&mut rng);
    let (val_rows, fit_rows) = order.split_at(n_val);

    let (fit_x, fit_y) = project(ds, fit_rows, &cols);
    let (val_x, val_y) = project(ds, val_rows, &cols);

    let k = cols.len();
    let mut model = MlpModel::init(k, spec.hidden, &mut rng);
    let mut velocity = MlpGradients::zeros(k, spec.hidden);

    let n_fit = fit_rows.len();
    let mut epoch_train_loss = Vec::with_capacity(spec.epochs);
    let mut epoch_val_mse = Vec::with_capacity(spec.epochs);
    let mut batch_x = vec![0.0; spec.batch_size * k];
    let mut batch_y = vec![0.0; spec.batch_size];
    let mut indices: Vec<usize> = (0..n_fit).collect();
    let mut val_pred = vec![0.0; val_rows.len()];

    for _ in 0..spec.epochs {
        indices.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for chunk in indices.chunks(spec.batch_size) {
            for (slot, &i) in chunk.iter().enumerate() {
                batch_x[slot * k..(slot + 1) * k]
                    .copy_from_slice(&fit_x[i * k..(i + 1) * k]);
                batch_y[slot] = fit_y[i];
            }
            let (loss, grads) = model
                .batch_gradients(&batch_x[..chunk.len() * k], &batch_y[..chunk.len()]);
            loss_sum += loss * chunk.len() as f64;
            model.apply_momentum_step(&mut velocity, &grads, spec.learning_rate, spec.momentum);
        }
        epoch_train_loss.push(loss_sum / n_fit as f64);

        for (i, p) in val_pred.iter_mut().enumerate() {
            *p = model.forward(&val_x[i * k..(i + 1) * k]);
        }
        epoch_val_mse.push(mse(&val_y, &val_pred));
    }

    Ok(TrainingRun { model, epoch_train_loss, epoch_val_mse })
}

/// Subset cost: the mean of the per-epoch validation errors.
pub fn evaluate_subset(
    ds: &Dataset,
    split: &SplitIndices,
    chrom: &BitChromosome,
    spec: &TrainSpec,
) -> Result<f64> {
    let run = train_subset(ds, split, chrom, spec)?;
    let f1 = run.epoch_val_mse.iter().sum::<f64>() / run.epoch_val_mse.len() as f64;
    if !f1.is_finite() {
        return Err(Error::Evaluation(format!(
            "training diverged on mask {}",
            chrom.to_hex()
        )));
    }
    Ok(f1)
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for one pattern's training, mixed from the run seed and the
/// pattern digest. Depends only on those two values, so evaluation order
/// and thread count cannot change any result.
pub fn derive_pattern_seed(master_seed: u64, chrom: &BitChromosome) -> u64 {
    splitmix64(master_seed ^ chrom.stable_hash())
}

/// Batch evaluation interface the search loops drive. Implementations own
/// whatever caching they need; the log records every distinct pattern in
/// first-evaluation order.
pub trait Evaluator {
    /// Objective vectors for `chroms`, position-aligned.
    fn evaluate_batch(&mut self, chroms: &[BitChromosome]) -> Result<Vec<ObjectiveVector>>;

    /// Every distinct pattern evaluated so far with its objectives, in
    /// first-evaluation order.
    fn evaluation_log(&self) -> &[(BitChromosome, ObjectiveVector)];
}

/// Memoizing neural evaluator. Each distinct bit pattern is trained at
/// most once per run under a seed derived from the run seed and the
/// pattern itself; repeats are served from the cache byte-identically.
/// Patterns new to one batch are trained in parallel.
pub struct SubsetEvaluator<'a> {
    ds: &'a Dataset,
    split: &'a SplitIndices,
    base: TrainSpec,
    master_seed: u64,
    cache: HashMap<BitChromosome, ObjectiveVector>,
    log: Vec<(BitChromosome, ObjectiveVector)>,
}

impl<'a> SubsetEvaluator<'a> {
    /// `base.seed` is ignored; per-pattern seeds are derived from
    /// `master_seed`.
    pub fn new(
        ds: &'a Dataset,
        split: &'a SplitIndices,
        base: TrainSpec,
        master_seed: u64,
    ) -> Self {
        SubsetEvaluator {
            ds,
            split,
            base,
            master_seed,
            cache: HashMap::new(),
            log: Vec::new(),
        }
    }

    /// Number of actual training runs performed.
    pub fn trainings(&self) -> usize {
        self.log.len()
    }
}

impl Evaluator for SubsetEvaluator<'_> {
    fn evaluate_batch(&mut self, chroms: &[BitChromosome]) -> Result<Vec<ObjectiveVector>> {
        let mut fresh: Vec<BitChromosome> = Vec::new();
        for c in chroms {
            if !self.cache.contains_key(c) && !fresh.contains(c) {
                fresh.push(c.clone());
            }
        }

        let results: Vec<Result<ObjectiveVector>> = fresh
            .par_iter()
            .map(|c| {
                let spec = TrainSpec {
                    seed: derive_pattern_seed(self.master_seed, c),
                    ..self.base
                };
                let f1 = evaluate_subset(self.ds, self.split, c, &spec)?;
                ObjectiveVector::new(f1, c.popcount() as f64)
            })
            .collect();

        for (c, r) in fresh.into_iter().zip(results) {
            let obj = r?;
            self.cache.insert(c.clone(), obj);
            self.log.push((c, obj));
        }

        Ok(chroms.iter().map(|c| self.cache[c]).collect())
    }

    fn evaluation_log(&self) -> &[(BitChromosome, ObjectiveVector)] {
        &self.log
    }
}

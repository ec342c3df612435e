//! Weighted-sum baseline: a single-objective GA per weight, the method the
//! archive-producing engine is compared against. Each run collapses both
//! objectives into one scalar and returns one point.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::core::{dominates, repair, BitChromosome, Individual, ObjectiveVector};
use crate::engine::initial_density;
use crate::error::{Error, Result};
use crate::neurocost::{splitmix64, Evaluator};

/// Weights used when a sweep does not name its own.
pub const DEFAULT_WEIGHT_GRID: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// Settings for one scalarized run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionConfig {
    /// Weight on the cost objective; the size objective gets `1 - weight`.
    pub weight: f64,
    pub crossover_rate: f64,
    /// Expected flips per chromosome; the per-bit probability is this
    /// divided by the chromosome length.
    pub mutation_rate: f64,
    pub pop_size: usize,
    pub generations: usize,
    pub seed: u64,
}

impl DecompositionConfig {
    pub fn new(seed: u64) -> Self {
        DecompositionConfig {
            weight: 0.5,
            crossover_rate: 0.8,
            mutation_rate: 0.3,
            pop_size: 700,
            generations: 100,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.weight) {
            return Err(Error::Config(format!(
                "weight must be inside [0, 1], got {}",
                self.weight
            )));
        }
        for (name, rate) in [
            ("crossover rate", self.crossover_rate),
            ("mutation rate", self.mutation_rate),
        ] {
            if !(rate > 0.0 && rate < 1.0) {
                return Err(Error::Config(format!(
                    "{name} must be inside (0, 1), got {rate}"
                )));
            }
        }
        if self.pop_size < 4 {
            return Err(Error::Config(format!(
                "population size must be at least 4, got {}",
                self.pop_size
            )));
        }
        if self.generations == 0 {
            return Err(Error::Config("generation count must be positive".into()));
        }
        Ok(())
    }
}

/// Scalarized cost `w * f1 + (1 - w) * f2 / d`. The size objective is
/// normalized by the dimension so both terms share one scale.
pub fn scalar_cost(obj: &ObjectiveVector, weight: f64, d: usize) -> f64 {
    weight * obj.f1() + (1.0 - weight) * obj.f2() / d as f64
}

/// The single point a scalarized run produced.
#[derive(Clone, Debug)]
pub struct DecompositionOutcome {
    /// Best individual over everything the run evaluated, raw objectives
    /// attached.
    pub best: Individual,
    pub scalar: f64,
    pub weight: f64,
}

fn better(challenger: &(f64, BitChromosome), held: &(f64, BitChromosome)) -> bool {
    match challenger.0.total_cmp(&held.0) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => challenger.1.to_hex() < held.1.to_hex(),
    }
}

fn single_point_crossover<R: Rng>(
    p1: &BitChromosome,
    p2: &BitChromosome,
    rng: &mut R,
) -> BitChromosome {
    let d = p1.len();
    if d < 2 {
        return p1.clone();
    }
    let cut = rng.gen_range(1..d);
    let bits = (0..d).map(|i| if i < cut { p1.get(i) } else { p2.get(i) }).collect();
    BitChromosome::from_bools(bits)
}

/// Tournament of two uniform draws; the lower scalar cost wins, the first
/// draw on ties.
fn tournament<R: Rng>(costs: &[f64], rng: &mut R) -> usize {
    let a = rng.gen_range(0..costs.len());
    let b = rng.gen_range(0..costs.len());
    if costs[b] < costs[a] {
        b
    } else {
        a
    }
}

/// Minimizes the scalarized cost with an elitist generational GA:
/// tournament selection, single-point crossover, per-bit mutation at
/// `mutation_rate / d`. The returned point is the best over every
/// chromosome the run evaluated, not merely the final population.
pub fn run_decomposition<E>(
    cfg: &DecompositionConfig,
    d: usize,
    evaluator: &mut E,
) -> Result<DecompositionOutcome>
where
    E: Evaluator + ?Sized,
{
    cfg.validate()?;
    if d == 0 {
        return Err(Error::Contract(
            "the search space needs at least one feature".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let density = initial_density(d);
    let p_bit = cfg.mutation_rate / d as f64;

    let mut chroms: Vec<BitChromosome> = (0..cfg.pop_size)
        .map(|_| repair(BitChromosome::random(d, density, &mut rng), &mut rng))
        .collect();
    let mut objs = evaluator.evaluate_batch(&chroms)?;

    let mut best: Option<(f64, BitChromosome, ObjectiveVector)> = None;
    let absorb = |best: &mut Option<(f64, BitChromosome, ObjectiveVector)>,
                      chroms: &[BitChromosome],
                      objs: &[ObjectiveVector]| {
        for (c, o) in chroms.iter().zip(objs) {
            let cost = scalar_cost(o, cfg.weight, d);
            let challenger = (cost, c.clone());
            let replace = match best {
                None => true,
                Some((held_cost, held_chrom, _)) => {
                    better(&challenger, &(*held_cost, held_chrom.clone()))
                }
            };
            if replace {
                *best = Some((challenger.0, challenger.1, *o));
            }
        }
    };
    absorb(&mut best, &chroms, &objs);

    for _ in 1..=cfg.generations {
        let costs: Vec<f64> = objs
            .iter()
            .map(|o| scalar_cost(o, cfg.weight, d))
            .collect();
        let elite = (0..chroms.len())
            .min_by(|&a, &b| {
                costs[a]
                    .total_cmp(&costs[b])
                    .then_with(|| chroms[a].to_hex().cmp(&chroms[b].to_hex()))
            })
            .expect("contract violation: empty population");

        let mut next = Vec::with_capacity(cfg.pop_size);
        next.push(chroms[elite].clone());
        while next.len() < cfg.pop_size {
            let a = tournament(&costs, &mut rng);
            let b = tournament(&costs, &mut rng);
            let mut child = if rng.gen_bool(cfg.crossover_rate) {
                single_point_crossover(&chroms[a], &chroms[b], &mut rng)
            } else {
                chroms[a].clone()
            };
            for i in 0..d {
                if rng.gen_bool(p_bit) {
                    child.flip(i);
                }
            }
            next.push(repair(child, &mut rng));
        }
        chroms = next;
        objs = evaluator.evaluate_batch(&chroms)?;
        absorb(&mut best, &chroms, &objs);
    }

    let (scalar, chrom, obj) = best.expect("contract violation: no evaluations recorded");
    Ok(DecompositionOutcome {
        best: Individual::evaluated(chrom, obj),
        scalar,
        weight: cfg.weight,
    })
}

/// How one decomposition point sits relative to a reference archive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchiveComparison {
    /// Some archive point is strictly better.
    pub strictly_dominated: bool,
    /// Some archive point is at least as good in both objectives.
    pub covered: bool,
}

/// One weight's result within a sweep.
#[derive(Clone, Debug)]
pub struct WeightRun {
    pub weight: f64,
    pub seed: u64,
    pub outcome: DecompositionOutcome,
    /// Present only when a reference archive was supplied.
    pub comparison: Option<ArchiveComparison>,
}

fn compare_against(archive: &[Individual], point: &ObjectiveVector) -> ArchiveComparison {
    let mut strictly_dominated = false;
    let mut covered = false;
    for member in archive {
        let held = member
            .objectives
            .expect("contract violation: unevaluated archive member");
        if dominates(&held, point) {
            strictly_dominated = true;
        }
        if held.f1() <= point.f1() && held.f2() <= point.f2() {
            covered = true;
        }
    }
    ArchiveComparison { strictly_dominated, covered }
}

/// One independent run per weight, each under a seed mixed from the base
/// seed and the weight's position, optionally annotated against an engine
/// archive. Runs share the evaluator, so repeated patterns across weights
/// are trained once.
pub fn sweep_weights<E>(
    weights: &[f64],
    cfg: &DecompositionConfig,
    d: usize,
    evaluator: &mut E,
    reference_archive: Option<&[Individual]>,
) -> Result<Vec<WeightRun>>
where
    E: Evaluator + ?Sized,
{
    if weights.is_empty() {
        return Err(Error::Config("the weight list must be nonempty".into()));
    }
    let mut out = Vec::with_capacity(weights.len());
    for (i, &weight) in weights.iter().enumerate() {
        let seed = splitmix64(cfg.seed ^ (i as u64 + 1));
        let run_cfg = DecompositionConfig { weight, seed, ..cfg.clone() };
        let outcome = run_decomposition(&run_cfg, d, evaluator)?;
        let comparison = reference_archive.map(|archive| {
            compare_against(
                archive,
                &outcome
                    .best
                    .objectives
                    .expect("contract violation: unevaluated best"),
            )
        });
        out.push(WeightRun { weight, seed, outcome, comparison });
    }
    Ok(out)
}

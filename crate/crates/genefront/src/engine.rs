//! The multi-objective search loop: seeded initialization, tournament
//! breeding, memoized batch evaluation, two-level survival, and an archive
//! of every non-dominated point the run has seen.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::{accuracy, train_svm, LinearModel, SvmSpec};
use crate::core::{dominates, repair, BitChromosome, Individual, ObjectiveVector};
use crate::dataset::{Dataset, SplitIndices};
use crate::error::{Error, Result};
use crate::hypervolume::hypervolume_2d;
use crate::neurocost::Evaluator;
use crate::ranking::{assign_ranking, crowded_compare};

/// Generations the first front may sit unchanged before the run stops.
pub const STAGNATION_WINDOW: usize = 25;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverKind {
    /// Each child bit taken from either parent with probability 0.5.
    #[default]
    Uniform,
}

/// Search-loop settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub pop_size: usize,
    /// Crossover children per generation, as a fraction of `pop_size`.
    pub offspring_rate: f64,
    pub generations: usize,
    pub crossover: CrossoverKind,
    /// Per-bit mutation probability at the first generation.
    pub mutation_start: f64,
    /// Per-bit mutation probability reached at the final generation.
    pub mutation_end: f64,
    pub master_seed: u64,
    /// Hidden width handed to the neural evaluator built from this config.
    pub hidden_neurons: usize,
}

impl EvolutionConfig {
    pub fn new(master_seed: u64) -> Self {
        EvolutionConfig {
            pop_size: 800,
            offspring_rate: 0.7,
            generations: 100,
            crossover: CrossoverKind::Uniform,
            mutation_start: 0.05,
            mutation_end: 0.005,
            master_seed,
            hidden_neurons: 15,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 4 {
            return Err(Error::Config(format!(
                "population size must be at least 4, got {}",
                self.pop_size
            )));
        }
        if !(self.offspring_rate > 0.0 && self.offspring_rate <= 1.0) {
            return Err(Error::Config(format!(
                "offspring rate must be inside (0, 1], got {}",
                self.offspring_rate
            )));
        }
        if self.generations == 0 {
            return Err(Error::Config("generation count must be positive".into()));
        }
        let (lo, hi) = (self.mutation_end, self.mutation_start);
        if !(lo > 0.0 && lo <= hi && hi < 1.0) {
            return Err(Error::Config(format!(
                "mutation schedule needs 0 < end <= start < 1, got start {hi}, end {lo}"
            )));
        }
        if self.hidden_neurons == 0 {
            return Err(Error::Config("hidden neuron count must be positive".into()));
        }
        Ok(())
    }
}

/// One generation of evaluated, ranked individuals.
#[derive(Clone, Debug)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: usize,
}

/// Probability that an initial chromosome sets any given bit. Capped so
/// high-dimensional runs start near subsets of ~64 features instead of
/// d/2-sized ones.
pub fn initial_density(d: usize) -> f64 {
    (64.0 / d as f64).min(0.5)
}

/// Seeds `pop_size` repaired random chromosomes, evaluates them as one
/// batch, and ranks the result as generation zero.
pub fn initialize<E, R>(
    cfg: &EvolutionConfig,
    d: usize,
    evaluator: &mut E,
    rng: &mut R,
) -> Result<Population>
where
    E: Evaluator + ?Sized,
    R: Rng,
{
    if d == 0 {
        return Err(Error::Contract(
            "the search space needs at least one feature".into(),
        ));
    }
    let density = initial_density(d);
    let chroms: Vec<BitChromosome> = (0..cfg.pop_size)
        .map(|_| repair(BitChromosome::random(d, density, rng), rng))
        .collect();
    let objs = evaluator.evaluate_batch(&chroms)?;
    let mut members: Vec<Individual> = chroms
        .into_iter()
        .zip(objs)
        .map(|(c, o)| Individual::evaluated(c, o))
        .collect();
    assign_ranking(&mut members);
    Ok(Population { members, generation: 0 })
}

fn tournament_winner<'a>(a: &'a Individual, b: &'a Individual) -> &'a Individual {
    if crowded_compare(b, a) == Ordering::Less {
        b
    } else {
        a
    }
}

/// Two independent binary tournaments under the crowded comparison; the
/// winners may be the same member.
pub fn select_parents<R: Rng>(pop: &Population, rng: &mut R) -> (Individual, Individual) {
    let pick = |rng: &mut R| {
        let a = rng.gen_range(0..pop.members.len());
        let b = rng.gen_range(0..pop.members.len());
        tournament_winner(&pop.members[a], &pop.members[b]).clone()
    };
    let first = pick(rng);
    let second = pick(rng);
    (first, second)
}

/// Child takes each bit from either parent with probability 0.5, then is
/// repaired.
pub fn uniform_crossover<R: Rng>(
    p1: &BitChromosome,
    p2: &BitChromosome,
    rng: &mut R,
) -> BitChromosome {
    assert_eq!(
        p1.len(),
        p2.len(),
        "contract violation: crossover needs equal-length parents"
    );
    let bits = (0..p1.len())
        .map(|i| if rng.gen_bool(0.5) { p1.get(i) } else { p2.get(i) })
        .collect();
    repair(BitChromosome::from_bools(bits), rng)
}

/// Per-bit flip probability at `generation`: decays linearly from
/// `mutation_start` at generation 0 to `mutation_end` at the final one.
pub fn mutation_rate(generation: usize, cfg: &EvolutionConfig) -> f64 {
    let progress = (generation as f64 / cfg.generations as f64).min(1.0);
    cfg.mutation_end + (cfg.mutation_start - cfg.mutation_end) * (1.0 - progress)
}

/// Flips each bit with the generation's decayed probability, then repairs.
pub fn mutate<R: Rng>(
    chrom: &BitChromosome,
    generation: usize,
    cfg: &EvolutionConfig,
    rng: &mut R,
) -> BitChromosome {
    let p = mutation_rate(generation, cfg);
    let mut out = chrom.clone();
    for i in 0..out.len() {
        if rng.gen_bool(p) {
            out.flip(i);
        }
    }
    repair(out, rng)
}

/// One generation: breed `round(offspring_rate * pop_size)` crossover
/// children, mutate each into a second candidate, evaluate the batch, pool
/// everything with the parents, rank, and keep the `pop_size` best under
/// the crowded comparison.
pub fn step<E, R>(
    pop: &Population,
    cfg: &EvolutionConfig,
    evaluator: &mut E,
    rng: &mut R,
) -> Result<Population>
where
    E: Evaluator + ?Sized,
    R: Rng,
{
    let n_offspring = (cfg.offspring_rate * cfg.pop_size as f64).round() as usize;
    let mut fresh: Vec<BitChromosome> = Vec::with_capacity(2 * n_offspring);
    for _ in 0..n_offspring {
        let (p1, p2) = select_parents(pop, rng);
        let child = uniform_crossover(&p1.chrom, &p2.chrom, rng);
        let mutant = mutate(&child, pop.generation, cfg, rng);
        fresh.push(child);
        fresh.push(mutant);
    }

    let objs = evaluator.evaluate_batch(&fresh)?;
    let mut pool = pop.members.clone();
    pool.extend(
        fresh
            .into_iter()
            .zip(objs)
            .map(|(c, o)| Individual::evaluated(c, o)),
    );

    assign_ranking(&mut pool);
    pool.sort_by(|a, b| crowded_compare(a, b));
    pool.truncate(cfg.pop_size);
    // Re-rank the survivors so their fronts and crowding describe the new
    // population rather than the discarded pool.
    assign_ranking(&mut pool);

    Ok(Population { members: pool, generation: pop.generation + 1 })
}

/// First-front members of a ranked population, deduplicated by pattern and
/// in canonical (f2, f1, hex) order.
pub fn first_front(pop: &Population) -> Vec<Individual> {
    let mut seen = BTreeSet::new();
    let mut front: Vec<Individual> = pop
        .members
        .iter()
        .filter(|m| m.rank == Some(1))
        .filter(|m| seen.insert(m.chrom.to_hex()))
        .cloned()
        .collect();
    front.sort_by(canonical_order);
    front
}

fn canonical_order(a: &Individual, b: &Individual) -> Ordering {
    let oa = a.objectives.expect("contract violation: unevaluated individual");
    let ob = b.objectives.expect("contract violation: unevaluated individual");
    oa.f2()
        .total_cmp(&ob.f2())
        .then(oa.f1().total_cmp(&ob.f1()))
        .then_with(|| a.chrom.to_hex().cmp(&b.chrom.to_hex()))
}

fn archive_insert(archive: &mut Vec<Individual>, chrom: &BitChromosome, obj: ObjectiveVector) {
    let beaten = archive.iter().any(|m| {
        let held = m.objectives.expect("contract violation: unevaluated archive member");
        dominates(&held, &obj)
    });
    if beaten {
        return;
    }
    archive.retain(|m| {
        let held = m.objectives.expect("contract violation: unevaluated archive member");
        !dominates(&obj, &held)
    });
    archive.push(Individual::evaluated(chrom.clone(), obj));
}

/// State of one logged generation. The hypervolume is the area the archive
/// dominates at that point, measured against the run's final reference
/// point, so the sequence is comparable within a run.
#[derive(Clone, Debug)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Deduplicated first front of the population after this generation.
    pub front1: Vec<Individual>,
    pub archive_hypervolume: f64,
    /// Distinct patterns evaluated since the start of the run.
    pub distinct_evaluations: usize,
}

/// Everything a finished search produced.
#[derive(Clone, Debug)]
pub struct EngineRun {
    pub config: EvolutionConfig,
    /// One record for generation 0 and one per completed step.
    pub generations: Vec<GenerationRecord>,
    /// Non-dominated subset of every pattern evaluated, in canonical
    /// (f2, f1, hex) order.
    pub archive: Vec<Individual>,
    /// Generation at which the stagnation window tripped, if it did.
    pub early_stopped_at: Option<usize>,
    /// Distinct patterns trained over the whole run.
    pub total_evaluations: usize,
    /// Componentwise maximum over all evaluated points, plus one in each
    /// objective; the hypervolume reference.
    pub reference_point: (f64, f64),
    pub wall_time_secs: f64,
}

fn front_signature(front: &[Individual]) -> BTreeSet<String> {
    front.iter().map(|m| m.chrom.to_hex()).collect()
}

/// Runs the full loop: up to `generations` steps with an early stop once
/// the first front has not changed for [`STAGNATION_WINDOW`] consecutive
/// generations. The archive collects the non-dominated set of everything
/// the evaluator was asked about.
pub fn run<E>(cfg: &EvolutionConfig, d: usize, evaluator: &mut E) -> Result<EngineRun>
where
    E: Evaluator + ?Sized,
{
    cfg.validate()?;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed);

    let mut pop = initialize(cfg, d, evaluator, &mut rng)?;
    let mut archive: Vec<Individual> = Vec::new();
    let mut cursor = 0usize;
    let absorb = |archive: &mut Vec<Individual>, cursor: &mut usize, ev: &E| {
        let log = ev.evaluation_log();
        for (chrom, obj) in &log[*cursor..] {
            archive_insert(archive, chrom, *obj);
        }
        *cursor = log.len();
    };

    absorb(&mut archive, &mut cursor, evaluator);
    let mut snapshots: Vec<Vec<ObjectiveVector>> = Vec::new();
    let mut history: Vec<(usize, Vec<Individual>, usize)> = Vec::new();
    let snapshot = |archive: &[Individual]| -> Vec<ObjectiveVector> {
        archive
            .iter()
            .map(|m| m.objectives.expect("contract violation: unevaluated archive member"))
            .collect()
    };

    snapshots.push(snapshot(&archive));
    history.push((0, first_front(&pop), cursor));

    let mut last_front = front_signature(&history[0].1);
    let mut stagnant = 0usize;
    let mut early_stopped_at = None;

    for g in 1..=cfg.generations {
        pop = step(&pop, cfg, evaluator, &mut rng)?;
        absorb(&mut archive, &mut cursor, evaluator);

        let front = first_front(&pop);
        let signature = front_signature(&front);
        snapshots.push(snapshot(&archive));
        history.push((g, front, cursor));

        if signature == last_front {
            stagnant += 1;
        } else {
            stagnant = 0;
            last_front = signature;
        }
        if stagnant >= STAGNATION_WINDOW {
            early_stopped_at = Some(g);
            break;
        }
    }

    let log = evaluator.evaluation_log();
    let reference_point = log.iter().fold((f64::MIN, f64::MIN), |acc, (_, o)| {
        (acc.0.max(o.f1()), acc.1.max(o.f2()))
    });
    let reference_point = (reference_point.0 + 1.0, reference_point.1 + 1.0);

    let generations = history
        .into_iter()
        .zip(snapshots)
        .map(|((generation, front1, evals), snap)| GenerationRecord {
            generation,
            front1,
            archive_hypervolume: hypervolume_2d(&snap, reference_point),
            distinct_evaluations: evals,
        })
        .collect();

    archive.sort_by(canonical_order);
    Ok(EngineRun {
        config: cfg.clone(),
        generations,
        archive,
        early_stopped_at,
        total_evaluations: log.len(),
        reference_point,
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}

/// The archive member picked for deployment, with its classifier.
#[derive(Clone, Debug)]
pub struct KneeSelection {
    pub individual: Individual,
    pub test_accuracy: f64,
    pub model: LinearModel,
}

/// Test accuracy of the downstream classifier for each archive member,
/// position-aligned.
pub fn score_archive(
    archive: &[Individual],
    ds: &Dataset,
    split: &SplitIndices,
    svm: &SvmSpec,
) -> Result<Vec<f64>> {
    archive
        .iter()
        .map(|member| {
            let model = train_svm(ds, split, &member.chrom, svm)?;
            accuracy(&model, ds, &split.test_rows, &member.chrom)
        })
        .collect()
}

/// Trains the downstream classifier on every archive member and returns
/// the one with the highest test accuracy; ties fall to fewer features,
/// then lower cost, then lexicographic pattern.
pub fn knee_select(
    archive: &[Individual],
    ds: &Dataset,
    split: &SplitIndices,
    svm: &SvmSpec,
) -> Result<KneeSelection> {
    let scores = score_archive(archive, ds, split, svm)?;
    knee_from_scores(archive, &scores, ds, split, svm)
}

/// Picks the knee out of precomputed archive accuracies and retrains its
/// classifier. Lets callers that already scored the archive avoid a second
/// pass.
pub fn knee_from_scores(
    archive: &[Individual],
    scores: &[f64],
    ds: &Dataset,
    split: &SplitIndices,
    svm: &SvmSpec,
) -> Result<KneeSelection> {
    if archive.is_empty() {
        return Err(Error::Contract(
            "knee selection over an empty archive".into(),
        ));
    }
    assert_eq!(
        archive.len(),
        scores.len(),
        "contract violation: one score per archive member"
    );
    let mut best = 0usize;
    for i in 1..archive.len() {
        let wins = match scores[i].total_cmp(&scores[best]) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => {
                canonical_knee_tiebreak(&archive[i], &archive[best]) == Ordering::Less
            }
        };
        if wins {
            best = i;
        }
    }
    let model = train_svm(ds, split, &archive[best].chrom, svm)?;
    Ok(KneeSelection {
        individual: archive[best].clone(),
        test_accuracy: scores[best],
        model,
    })
}

fn canonical_knee_tiebreak(a: &Individual, b: &Individual) -> Ordering {
    let oa = a.objectives.expect("contract violation: unevaluated individual");
    let ob = b.objectives.expect("contract violation: unevaluated individual");
    a.chrom
        .popcount()
        .cmp(&b.chrom.popcount())
        .then(oa.f1().total_cmp(&ob.f1()))
        .then_with(|| a.chrom.to_hex().cmp(&b.chrom.to_hex()))
}

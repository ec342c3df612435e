//! Two-level ordering of evaluated populations: partition into
//! non-dominated fronts, then spread members within a front by crowding
//! distance.

use std::cmp::Ordering;

use crate::core::{dominates, CrowdingDistance, Individual, ObjectiveVector};

/// Disjoint fronts over a set of solutions, identified by index into the
/// input slice. `fronts[0]` is the non-dominated set; each later front is
/// non-dominated once the earlier ones are removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontPartition {
    pub fronts: Vec<Vec<usize>>,
}

impl FrontPartition {
    /// 1-based front index per input position.
    pub fn ranks(&self, n: usize) -> Vec<usize> {
        let mut ranks = vec![0usize; n];
        for (f, front) in self.fronts.iter().enumerate() {
            for &i in front {
                ranks[i] = f + 1;
            }
        }
        ranks
    }
}

/// Exact non-dominated sorting. For every member it counts how many others
/// dominate it and records which ones it dominates; members with a zero
/// count form the first front, and removing a front decrements the counts
/// of everything it dominates to expose the next one.
pub fn non_dominated_sort(objs: &[ObjectiveVector]) -> FrontPartition {
    let n = objs.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dominators_left = vec![0usize; n];
    for p in 0..n {
        for q in (p + 1)..n {
            if dominates(&objs[p], &objs[q]) {
                dominated_by_me[p].push(q);
                dominators_left[q] += 1;
            } else if dominates(&objs[q], &objs[p]) {
                dominated_by_me[q].push(p);
                dominators_left[p] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&p| dominators_left[p] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated_by_me[p] {
                dominators_left[q] -= 1;
                if dominators_left[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    FrontPartition { fronts }
}

/// Crowding distance of each front member. Per objective the front is
/// sorted by cost; the extremes are flagged boundary and everyone between
/// them accumulates the gap between its two neighbors divided by the
/// objective's full span. An objective whose span is below 1e-12 is
/// ignored entirely, contributing neither gaps nor boundary flags; a front
/// that collapses to a single distinct vector is all boundary. Members
/// sharing an identical objective vector always receive the same distance,
/// so the result is insensitive to input order.
pub fn crowding_distance(front: &[ObjectiveVector]) -> Vec<CrowdingDistance> {
    let n = front.len();
    if n == 0 {
        return Vec::new();
    }

    // Collapse duplicate vectors; distances are computed over the distinct
    // points and shared by every copy.
    let mut distinct: Vec<(f64, f64)> = Vec::new();
    let mut group = vec![0usize; n];
    for (i, o) in front.iter().enumerate() {
        let key = (o.f1(), o.f2());
        group[i] = match distinct.iter().position(|&u| u == key) {
            Some(k) => k,
            None => {
                distinct.push(key);
                distinct.len() - 1
            }
        };
    }

    let m = distinct.len();
    let mut boundary = vec![false; m];
    let mut dist = vec![0.0f64; m];
    if m == 1 {
        boundary[0] = true;
    }
    for axis in 0..2 {
        let value = |k: usize| if axis == 0 { distinct[k].0 } else { distinct[k].1 };
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_unstable_by(|&a, &b| {
            value(a)
                .total_cmp(&value(b))
                .then_with(|| distinct[a].0.total_cmp(&distinct[b].0))
                .then_with(|| distinct[a].1.total_cmp(&distinct[b].1))
        });
        let span = (value(order[m - 1]) - value(order[0])).abs();
        if span < 1e-12 {
            continue;
        }
        boundary[order[0]] = true;
        boundary[order[m - 1]] = true;
        for w in 1..m - 1 {
            dist[order[w]] += (value(order[w + 1]) - value(order[w - 1])) / span;
        }
    }

    (0..n)
        .map(|i| {
            let k = group[i];
            if boundary[k] {
                CrowdingDistance::Infinite
            } else {
                CrowdingDistance::Finite(dist[k])
            }
        })
        .collect()
}

/// Survival and tournament order: lower rank first, then larger crowding
/// distance, then fewer selected features, then lower evaluator cost.
/// Returns `Equal` only on a full tie; callers breaking ties by input
/// position should use a stable sort. Panics if either member is missing
/// rank, crowding, or objectives.
pub fn crowded_compare(a: &Individual, b: &Individual) -> Ordering {
    let msg = "contract violation: crowded_compare needs rank, crowding, and objectives";
    let (ra, rb) = (a.rank.expect(msg), b.rank.expect(msg));
    let (ca, cb) = (a.crowding.expect(msg), b.crowding.expect(msg));
    let (oa, ob) = (a.objectives.expect(msg), b.objectives.expect(msg));
    ra.cmp(&rb)
        .then_with(|| cb.total_cmp(&ca))
        .then_with(|| oa.f2().total_cmp(&ob.f2()))
        .then_with(|| oa.f1().total_cmp(&ob.f1()))
}

/// Sorts the whole population into fronts and writes rank and crowding
/// onto every member. Panics if any member is unevaluated.
pub fn assign_ranking(pop: &mut [Individual]) -> FrontPartition {
    let objs: Vec<ObjectiveVector> = pop
        .iter()
        .map(|m| {
            m.objectives
                .expect("contract violation: assign_ranking needs evaluated members")
        })
        .collect();
    let partition = non_dominated_sort(&objs);
    for (f, front) in partition.fronts.iter().enumerate() {
        let front_objs: Vec<ObjectiveVector> = front.iter().map(|&i| objs[i]).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&front_objs)) {
            pop[i].rank = Some(f + 1);
            pop[i].crowding = Some(d);
        }
    }
    partition
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::BitChromosome;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn obj(f1: f64, f2: f64) -> ObjectiveVector {
        ObjectiveVector::new(f1, f2).unwrap()
    }

    /// Reference partition by repeated peeling: a member joins the current
    /// front when nothing still unassigned dominates it. Kept deliberately
    /// independent of the counter-based implementation.
    fn oracle_fronts(objs: &[ObjectiveVector]) -> Vec<Vec<usize>> {
        let mut remaining: Vec<usize> = (0..objs.len()).collect();
        let mut fronts = Vec::new();
        while !remaining.is_empty() {
            let front: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&p| {
                    !remaining
                        .iter()
                        .any(|&q| q != p && dominates(&objs[q], &objs[p]))
                })
                .collect();
            remaining.retain(|i| !front.contains(i));
            fronts.push(front);
        }
        fronts
    }

    #[test]
    fn five_point_example_partitions_into_three_fronts() {
        let objs = vec![
            obj(1.0, 5.0), // A
            obj(2.0, 3.0), // B
            obj(4.0, 1.0), // C
            obj(3.0, 4.0), // D
            obj(4.0, 4.0), // E
        ];
        let got = non_dominated_sort(&objs);
        assert_eq!(got.fronts, vec![vec![0, 1, 2], vec![3], vec![4]]);
        assert_eq!(got.fronts, oracle_fronts(&objs));
    }

    #[test]
    fn single_point_is_its_own_front() {
        let got = non_dominated_sort(&[obj(1.0, 1.0)]);
        assert_eq!(got.fronts, vec![vec![0]]);
    }

    #[test]
    fn dominance_chain_gives_singleton_fronts() {
        let objs = vec![obj(3.0, 3.0), obj(1.0, 1.0), obj(2.0, 2.0)];
        let got = non_dominated_sort(&objs);
        assert_eq!(got.fronts, vec![vec![1], vec![2], vec![0]]);
    }

    #[test]
    fn duplicate_vectors_share_a_front() {
        let objs = vec![obj(1.0, 1.0), obj(1.0, 1.0)];
        let got = non_dominated_sort(&objs);
        assert_eq!(got.fronts, vec![vec![0, 1]]);
    }

    #[test]
    fn sorting_matches_oracle_on_seeded_populations() {
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_101);
        for _ in 0..200 {
            let n = rng.gen_range(1..=32);
            let objs: Vec<ObjectiveVector> =
                (0..n).map(|_| obj(rng.gen(), rng.gen())).collect();
            let got = non_dominated_sort(&objs);
            assert_eq!(got.fronts, oracle_fronts(&objs));
            let mut seen: Vec<usize> = got.fronts.concat();
            seen.sort_unstable();
            assert_eq!(seen, (0..n).collect::<Vec<_>>(), "each member in exactly one front");
        }
    }

    #[test]
    fn single_objective_line_gets_infinite_ends_and_unit_middle() {
        // Costs 1, 2, 4 on one axis, the other held constant.
        let front = vec![obj(1.0, 7.0), obj(2.0, 7.0), obj(4.0, 7.0)];
        let d = crowding_distance(&front);
        assert!(d[0].is_infinite());
        assert_eq!(d[1], CrowdingDistance::Finite(1.0));
        assert!(d[2].is_infinite());
    }

    #[test]
    fn two_objective_middle_point_sums_both_axes() {
        let front = vec![obj(1.0, 4.0), obj(2.0, 3.0), obj(3.0, 1.0)];
        let d = crowding_distance(&front);
        assert!(d[0].is_infinite());
        assert_eq!(d[1], CrowdingDistance::Finite(2.0));
        assert!(d[2].is_infinite());
    }

    #[test]
    fn two_member_front_is_all_boundary() {
        let d = crowding_distance(&[obj(1.0, 2.0), obj(2.0, 1.0)]);
        assert!(d.iter().all(|x| x.is_infinite()));
    }

    #[test]
    fn degenerate_axis_contributes_nothing() {
        // f1 spans less than 1e-12, f2 spans 4: only f2's gap registers.
        let front = vec![
            obj(1.0, 5.0),
            obj(1.0 + 1e-13, 3.0),
            obj(1.0 - 1e-13, 1.0),
        ];
        let d = crowding_distance(&front);
        assert_eq!(d[1], CrowdingDistance::Finite(1.0));
    }

    #[test]
    fn identical_vectors_get_identical_distances() {
        let front = vec![obj(1.0, 5.0), obj(2.0, 3.0), obj(2.0, 3.0), obj(3.0, 1.0)];
        let d = crowding_distance(&front);
        assert_eq!(d[1], d[2]);
        assert_eq!(d[1], CrowdingDistance::Finite(2.0));
    }

    fn member(rank: usize, crowding: CrowdingDistance, f1: f64, f2: f64) -> Individual {
        let mut ind = Individual::evaluated(BitChromosome::zeros(4), obj(f1, f2));
        ind.rank = Some(rank);
        ind.crowding = Some(crowding);
        ind
    }

    #[test]
    fn lower_rank_wins_regardless_of_crowding() {
        let a = member(1, CrowdingDistance::Finite(0.1), 1.0, 1.0);
        let b = member(2, CrowdingDistance::Infinite, 1.0, 1.0);
        assert_eq!(crowded_compare(&a, &b), Ordering::Less);
    }

    #[test]
    fn equal_rank_prefers_larger_crowding() {
        let a = member(1, CrowdingDistance::Infinite, 1.0, 1.0);
        let b = member(1, CrowdingDistance::Finite(5.0), 1.0, 1.0);
        assert_eq!(crowded_compare(&a, &b), Ordering::Less);
    }

    #[test]
    fn full_tie_compares_equal_for_stable_sorting() {
        let a = member(1, CrowdingDistance::Finite(1.0), 2.0, 3.0);
        let b = member(1, CrowdingDistance::Finite(1.0), 2.0, 3.0);
        assert_eq!(crowded_compare(&a, &b), Ordering::Equal);
    }

    #[test]
    fn crowding_ties_fall_back_to_fewer_features_then_cost() {
        let a = member(1, CrowdingDistance::Infinite, 0.9, 2.0);
        let b = member(1, CrowdingDistance::Infinite, 0.5, 3.0);
        assert_eq!(crowded_compare(&a, &b), Ordering::Less);
        let c = member(1, CrowdingDistance::Infinite, 0.5, 2.0);
        assert_eq!(crowded_compare(&c, &a), Ordering::Less);
    }

    #[test]
    #[should_panic(expected = "contract violation")]
    fn comparing_unranked_members_panics() {
        let a = Individual::evaluated(BitChromosome::zeros(4), obj(1.0, 1.0));
        let b = a.clone();
        crowded_compare(&a, &b);
    }

    #[test]
    fn crowded_compare_is_transitive_on_a_ranked_population() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut pop: Vec<Individual> = (0..20)
            .map(|_| {
                Individual::evaluated(
                    BitChromosome::zeros(4),
                    obj(rng.gen_range(0.0..1.0), rng.gen_range(1.0..5.0f64).round()),
                )
            })
            .collect();
        assign_ranking(&mut pop);
        for a in &pop {
            for b in &pop {
                let ab = crowded_compare(a, b);
                assert_eq!(ab, crowded_compare(b, a).reverse(), "antisymmetry");
                for c in &pop {
                    if ab == crowded_compare(b, c) {
                        assert_eq!(crowded_compare(a, c), ab, "transitivity");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn permuting_the_front_permutes_distances(
            pts in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..24),
            seed in any::<u64>(),
        ) {
            // Include exact duplicates so the equal-vector policy is covered.
            let mut pts = pts;
            if pts.len() >= 2 {
                pts[0] = pts[pts.len() - 1];
            }
            let front: Vec<ObjectiveVector> =
                pts.iter().map(|&(a, b)| obj(a, b)).collect();
            let base = crowding_distance(&front);

            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut perm: Vec<usize> = (0..front.len()).collect();
            for i in (1..perm.len()).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let shuffled: Vec<ObjectiveVector> = perm.iter().map(|&i| front[i]).collect();
            let got = crowding_distance(&shuffled);
            for (slot, &src) in perm.iter().enumerate() {
                prop_assert_eq!(got[slot], base[src]);
            }
        }

        #[test]
        fn finite_distances_are_non_negative(
            pts in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..24),
        ) {
            let front: Vec<ObjectiveVector> =
                pts.iter().map(|&(a, b)| obj(a, b)).collect();
            for d in crowding_distance(&front) {
                if let CrowdingDistance::Finite(v) = d {
                    prop_assert!(v >= 0.0);
                }
            }
        }
    }
}

//! Sorts a small hand-built population into non-dominated fronts, then
//! shows crowding distances and the resulting survival order.

use genefront::core::{BitChromosome, CrowdingDistance, Individual, ObjectiveVector};
use genefront::ranking::{assign_ranking, crowded_compare, crowding_distance};

fn main() {
    let points = [
        (0.10, 6.0),
        (0.25, 3.0),
        (0.55, 1.0),
        (0.30, 5.0),
        (0.60, 4.0),
        (0.25, 3.0), // duplicate of the second point
    ];

    let mut pop: Vec<Individual> = points
        .iter()
        .enumerate()
        .map(|(i, &(f1, f2))| {
            Individual::evaluated(
                BitChromosome::from_indices(8, &[i]),
                ObjectiveVector::new(f1, f2).unwrap(),
            )
        })
        .collect();

    let partition = assign_ranking(&mut pop);
    println!("fronts (by input index): {:?}", partition.fronts);

    for (i, m) in pop.iter().enumerate() {
        let obj = m.objectives.unwrap();
        println!(
            "point {i}: f1={:.2} f2={} rank={} crowding={:?}",
            obj.f1(),
            obj.f2(),
            m.rank.unwrap(),
            m.crowding.unwrap()
        );
    }

    let first: Vec<ObjectiveVector> = partition.fronts[0]
        .iter()
        .map(|&i| pop[i].objectives.unwrap())
        .collect();
    let spread = crowding_distance(&first);
    let finite = spread
        .iter()
        .filter(|d| matches!(d, CrowdingDistance::Finite(_)))
        .count();
    println!("front 1 has {} members, {finite} interior", first.len());

    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by(|&a, &b| crowded_compare(&pop[a], &pop[b]));
    println!("survival order: {order:?}");
}

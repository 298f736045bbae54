//! Dominance-dissimilarity scores and the management strategies on one population.
//!
//! cargo run --example population_management

use meoh::dsl::parse;
use meoh::evolution::{dd_scores, manage, Heuristic, Management};
use meoh::operators::Operator;
use meoh::pareto::ObjectiveVector;

fn main() {
    let members = [
        ("return item - bins;", [0.030, 40.0]),
        ("return item - bins * 2;", [0.032, 45.0]),
        ("return 0;", [0.090, 10.0]),
        ("return 0 - bins;", [0.060, 20.0]),
        ("return item / bins;", [0.031, 30.0]),
        ("return bins * bins - item;", [0.100, 60.0]),
    ];
    let population: Vec<Heuristic> = members
        .iter()
        .enumerate()
        .map(|(k, (body, objectives))| {
            let tree = parse(&format!("fn score(item, bins) {{ {body} }}")).unwrap();
            let objectives = ObjectiveVector::new(objectives.to_vec()).unwrap();
            Heuristic::new(k as u64, format!("h{k}"), tree, objectives, 0, Operator::Init, vec![])
        })
        .collect();

    let scores = dd_scores(&population);
    for (h, v) in population.iter().zip(&scores.scores) {
        println!("{} {:?} v = {v:.3}", h.id, h.objectives.values());
    }
    for management in [Management::Meoh, Management::Nsga2, Management::Moead, Management::SingleObjective] {
        let kept = manage(population.clone(), 4, management);
        println!("{management:?} keeps {:?}", kept.iter().map(|h| h.id).collect::<Vec<_>>());
    }
}

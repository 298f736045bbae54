//! Render the prompt of every operator for the bin packing task.
//!
//! cargo run --example prompts

use meoh::dsl::parse;
use meoh::evolution::Heuristic;
use meoh::operators::{render_prompt, Operator, PromptTemplate};
use meoh::pareto::ObjectiveVector;
use meoh::problem::bpp::bpp_task;

fn main() {
    let task = bpp_task();
    let parent = |id: u64, description: &str, source: &str| {
        let objectives = ObjectiveVector::new(vec![0.04, 1.0e5]).unwrap();
        Heuristic::new(id, description, parse(source).unwrap(), objectives, 0, Operator::Init, vec![])
    };
    let a = parent(1, "Prefer the tightest bin.", include_str!("../heuristics/bpp_best_fit.dsl"));
    let b = parent(2, "Take the first bin.", include_str!("../heuristics/bpp_first_fit.dsl"));
    for kind in [Operator::Init, Operator::E1, Operator::E2, Operator::M1, Operator::M2, Operator::M3] {
        let parents: Vec<&Heuristic> = match kind {
            Operator::Init => vec![],
            k if k.is_crossover() => vec![&a, &b],
            _ => vec![&a],
        };
        let template = PromptTemplate::new(kind, &task).with_parent_slots(parents.len());
        println!("==== {kind} ====\n{}", render_prompt(&template, &parents).expect("arity matches"));
    }
}

//! A short evolutionary run on bin packing with the offline mock generator.
//!
//! cargo run --release --example mock_run

use meoh::evolution::{run_meoh, RunConfig};
use meoh::operators::{MockGenerator, MockTask};
use meoh::pareto::{nondominated_filter, ObjectiveVector};
use meoh::problem::bpp::BppEnvironment;
use meoh::dsl::ExecLimits;

fn main() {
    let config = RunConfig::new(8, 5, 2, 42);
    let env = BppEnvironment::weibull(2, 1000, 100, 0, ExecLimits::default());
    let mut generator = MockGenerator::new(MockTask::Bpp);
    let out = run_meoh(&config, &mut generator, &env, &mut ()).expect("mock run succeeds");

    let admitted = out.archive.records.iter().filter(|r| r.admitted).count();
    println!("{} attempts, {admitted} admitted", out.archive.records.len());
    let members = &out.population.members;
    let objectives: Vec<ObjectiveVector> = members.iter().map(|h| h.objectives.clone()).collect();
    for i in nondominated_filter(&objectives) {
        let h = &members[i];
        println!("{} {:?} {}", h.id, h.objectives.values(), h.description);
    }
}

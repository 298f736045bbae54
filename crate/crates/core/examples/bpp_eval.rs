//! Best fit against first fit on Weibull bin packing instances.
//!
//! cargo run --release --example bpp_eval

use meoh::dsl::{parse, ExecLimits};
use meoh::problem::bpp::{evaluate_bpp, generate_weibull_instance, UnusedBinRule};
use meoh::problem::ObjectiveMode;

fn main() {
    let instances: Vec<_> = (0..5).map(|seed| generate_weibull_instance(5000, 100, seed)).collect();
    for (name, source) in [
        ("best fit", include_str!("../heuristics/bpp_best_fit.dsl")),
        ("first fit", include_str!("../heuristics/bpp_first_fit.dsl")),
    ] {
        let tree = parse(source).expect("fixture parses");
        let (eval, reports) =
            evaluate_bpp(&tree, &instances, ObjectiveMode::StepCost, &ExecLimits::default(), UnusedBinRule::NotCounted)
                .expect("fixture runs");
        println!("{name}: mean gap {:.4}, {} steps", eval.objectives[0], eval.objectives[1]);
        for r in reports {
            println!("  bins {} lower bound {} gap {:.4}", r.bins_used, r.lower_bound, r.gap);
        }
    }
}

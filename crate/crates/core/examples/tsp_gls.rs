//! Guided local search on berlin52 with the edge-penalty heuristic, and an
//! exact check on a small instance.
//!
//! cargo run --release --example tsp_gls

use std::time::Duration;

use meoh::dsl::{parse, ExecLimits};
use meoh::problem::tsp::{exact_solve_small, generate_uniform_instance, gls_solve, parse_tsplib, GlsConfig};

fn main() {
    let tree = parse(include_str!("../heuristics/tsp_gls_penalty.dsl")).expect("fixture parses");
    let config = GlsConfig {
        max_iters: 1000,
        time_budget: Duration::from_secs(60),
        restart_from_nearest_neighbor: false,
    };
    let berlin = parse_tsplib(include_str!("../data/berlin52.tsp")).expect("bundled file parses");
    let out = gls_solve(&berlin, &tree, &config, &ExecLimits::default()).expect("fixture runs");
    println!(
        "berlin52: {} after {} iterations, gap {:.3}%",
        out.best_length,
        out.iterations,
        100.0 * (out.best_length - 7542.0) / 7542.0
    );

    let small = generate_uniform_instance(10, 0);
    let (_, optimum) = exact_solve_small(&small).expect("small enough");
    let out = gls_solve(&small, &tree, &config, &ExecLimits::default()).expect("fixture runs");
    println!("{}: gls {:.6}, optimum {optimum:.6}", small.name(), out.best_length);
}

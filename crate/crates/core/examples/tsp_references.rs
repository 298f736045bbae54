//! Writes reference tour lengths for generated uniform TSP instances by
//! running guided local search with the edge-penalty heuristic.
//!
//! cargo run --release --example tsp_references -- --count 64 --nodes 100 --out presets/tsp_uniform100_references.txt

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Duration;

use clap::Parser;
use meoh::dsl::{parse, ExecLimits};
use meoh::problem::tsp::{generate_uniform_instance, gls_solve, GlsConfig};

#[derive(Parser)]
struct Args {
    #[arg(long, default_value_t = 64)]
    count: usize,
    #[arg(long, default_value_t = 100)]
    nodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let args = Args::parse();
    let tree = parse(include_str!("../heuristics/tsp_gls_penalty.dsl")).expect("fixture parses");
    let config = GlsConfig {
        max_iters: args.iters,
        time_budget: Duration::from_secs(3600),
        restart_from_nearest_neighbor: false,
    };
    let mut text = format!(
        "# best length found by {} iterations of edge-penalty guided local search\n",
        args.iters
    );
    for k in 0..args.count as u64 {
        let inst = generate_uniform_instance(args.nodes, args.seed + k);
        let out = gls_solve(&inst, &tree, &config, &ExecLimits::default()).expect("fixture runs");
        eprintln!("{} {:.6}", inst.name(), out.best_length);
        writeln!(text, "{} {}", inst.name(), out.best_length).unwrap();
    }
    std::fs::write(&args.out, text).expect("reference file is writable");
}

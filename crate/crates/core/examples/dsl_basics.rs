//! Parse a scoring program, print its canonical form and run it on a few bins.
//!
//! cargo run --example dsl_basics

use meoh::dsl::{execute, parse, print, validate_signature, ExecLimits, TaskSignature, Value};

fn main() {
    let source = "fn score(item, bins) { let room = bins - item; return 0 - room; }";
    let tree = parse(source).expect("program parses");
    validate_signature(&tree, &TaskSignature::bpp()).expect("matches the bin packing signature");
    print!("{}", print(&tree));
    println!("{} nodes, depth {}", tree.node_count(), tree.depth());

    let args = vec![Value::Scalar(30.0), Value::Vector(vec![100.0, 45.0, 31.0])];
    let (scores, steps) = execute(&tree, args, &ExecLimits::default()).expect("program runs");
    println!("scores {} after {steps} steps", scores.describe());

    match parse("fn score(item, bins) { return item +; }") {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
}

//! Pairwise subtree similarity of the bundled heuristics.
//!
//! cargo run --example similarity

use meoh::dsl::parse;
use meoh::similarity::{ast_similarity, dissimilarity_matrix};

fn main() {
    let names = ["bpp_best_fit", "bpp_first_fit", "tsp_gls_penalty", "tsp_identity"];
    let trees: Vec<_> = [
        include_str!("../heuristics/bpp_best_fit.dsl"),
        include_str!("../heuristics/bpp_first_fit.dsl"),
        include_str!("../heuristics/tsp_gls_penalty.dsl"),
        include_str!("../heuristics/tsp_identity.dsl"),
    ]
    .iter()
    .map(|s| parse(s).expect("fixture parses"))
    .collect();

    // Sim is asymmetric: the denominator is the second tree's size
    for (i, a) in trees.iter().enumerate() {
        for (j, b) in trees.iter().enumerate() {
            println!("Sim({}, {}) = {:.3}", names[i], names[j], ast_similarity(a, b));
        }
    }
    let s = dissimilarity_matrix(&trees);
    println!("S[0][1] = {:.3}, S[1][0] = {:.3}", s.get(0, 1), s.get(1, 0));
}

//! Subtree-matching code similarity.
//!
//! `Sim(a, b)` counts the subtrees of `a` that also occur in `b`, clipped to
//! their multiplicity in `b`, and divides by the node count of `b`. It is
//! not symmetric and is always used as `Sim(P[i], P[j])`.

use crate::dsl::{count_subtrees, SubtreeProfile, SyntaxTree};

pub fn ast_similarity(a: &SyntaxTree, b: &SyntaxTree) -> f64 {
    profile_similarity(&count_subtrees(a), &count_subtrees(b))
}

/// Similarity on precomputed profiles.
pub fn profile_similarity(a: &SubtreeProfile, b: &SubtreeProfile) -> f64 {
    if b.node_count() == 0 {
        return 0.0;
    }
    // iterate the smaller map, clipping is symmetric in the numerator
    let (small, large) = if a.distinct() <= b.distinct() { (a, b) } else { (b, a) };
    let matched: usize = small
        .counts()
        .iter()
        .map(|(key, &n)| n.min(large.count(key)))
        .sum();
    matched as f64 / b.node_count() as f64
}

/// `values[i][j] = -Sim(i, j)` off the diagonal, zero on it.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    pub values: Vec<Vec<f64>>,
}

impl DissimilarityMatrix {
    pub fn from_profiles(profiles: &[&SubtreeProfile]) -> Self {
        let n = profiles.len();
        let mut values = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    values[i][j] = -profile_similarity(profiles[i], profiles[j]);
                }
            }
        }
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }
}

pub fn dissimilarity_matrix(trees: &[SyntaxTree]) -> DissimilarityMatrix {
    let profiles: Vec<SubtreeProfile> = trees.iter().map(count_subtrees).collect();
    DissimilarityMatrix::from_profiles(&profiles.iter().collect::<Vec<_>>())
}

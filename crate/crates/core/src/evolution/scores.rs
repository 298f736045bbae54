//! Dominance-dissimilarity scores and score-proportional parent sampling.

use rand::Rng;

use super::Heuristic;
use crate::pareto::{dominates, ObjectiveVector};
use crate::similarity::DissimilarityMatrix;

/// `mask[i][j]` is true when member `i` dominates member `j`.
pub fn dominance_mask_of(objectives: &[&ObjectiveVector]) -> Vec<Vec<bool>> {
    let n = objectives.len();
    let mut mask = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                mask[i][j] = dominates(objectives[i], objectives[j]).unwrap_or(false);
            }
        }
    }
    mask
}

pub fn dominance_mask(members: &[Heuristic]) -> Vec<Vec<bool>> {
    let objs: Vec<&ObjectiveVector> = members.iter().map(|h| &h.objectives).collect();
    dominance_mask_of(&objs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DdScores {
    /// `v[j]`: minus the summed similarity of `j`'s dominators to `j`.
    pub scores: Vec<f64>,
    /// Softmax of `scores`.
    pub probabilities: Vec<f64>,
}

pub fn softmax(v: &[f64]) -> Vec<f64> {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = v.iter().map(|x| (x - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Column sums of the dissimilarity matrix masked by dominance.
pub fn dd_scores_from(s: &DissimilarityMatrix, mask: &[Vec<bool>]) -> DdScores {
    let n = s.len();
    let scores: Vec<f64> = (0..n)
        .map(|j| (0..n).filter(|&i| mask[i][j]).map(|i| s.get(i, j)).fold(0.0, |a, b| a + b))
        .collect();
    let probabilities = softmax(&scores);
    DdScores { scores, probabilities }
}

pub fn dd_scores(members: &[Heuristic]) -> DdScores {
    let profiles: Vec<_> = members.iter().map(|h| &h.profile).collect();
    let s = DissimilarityMatrix::from_profiles(&profiles);
    dd_scores_from(&s, &dominance_mask(members))
}

/// Draws `d` distinct indices, each draw proportional to the remaining weights.
pub fn select_parents<R: Rng + ?Sized>(weights: &[f64], d: usize, rng: &mut R) -> Vec<usize> {
    assert!(d <= weights.len(), "cannot draw {d} parents from {}", weights.len());
    let mut remaining: Vec<usize> = (0..weights.len()).collect();
    let mut picked = Vec::with_capacity(d);
    for _ in 0..d {
        let total: f64 = remaining.iter().map(|&i| weights[i]).sum();
        let mut r = rng.random::<f64>() * total;
        let mut pos = remaining.len() - 1;
        for (k, &i) in remaining.iter().enumerate() {
            r -= weights[i];
            if r < 0.0 {
                pos = k;
                break;
            }
        }
        picked.push(remaining.remove(pos));
    }
    picked
}

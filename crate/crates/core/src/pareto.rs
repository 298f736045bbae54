//! Dominance, normalization and the 2-D quality indicators (HV, IGD).

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Axis spans below this are treated as degenerate by [`normalize`].
pub const DEGENERATE_SPAN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParetoError {
    #[error("objective vectors have different lengths ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("indicator needs a non-empty set")]
    EmptySet,
    #[error("objective values must be finite")]
    NonFinite,
}

/// Objective values, all minimized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self, ParetoError> {
        if values.iter().all(|v| v.is_finite()) {
            Ok(Self(values))
        } else {
            Err(ParetoError::NonFinite)
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Lexicographic comparison, used for deterministic tie-breaking.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl std::ops::Index<usize> for ObjectiveVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> Result<bool, ParetoError> {
    if a.len() != b.len() {
        return Err(ParetoError::DimensionMismatch(a.len(), b.len()));
    }
    Ok(weakly_better(a.values(), b.values()))
}

fn weakly_better(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        strict |= x < y;
    }
    strict
}

/// Indices of the members not dominated by any other member, ascending.
pub fn nondominated_filter(set: &[ObjectiveVector]) -> Vec<usize> {
    (0..set.len())
        .filter(|&i| {
            !set.iter()
                .any(|other| weakly_better(other.values(), set[i].values()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationBounds {
    pub ideal: Vec<f64>,
    pub nadir: Vec<f64>,
}

impl NormalizationBounds {
    /// Componentwise min and max over `points`.
    pub fn from_points<'a>(
        points: impl IntoIterator<Item = &'a ObjectiveVector>,
    ) -> Result<Self, ParetoError> {
        let mut iter = points.into_iter();
        let first = iter.next().ok_or(ParetoError::EmptySet)?;
        let mut ideal = first.values().to_vec();
        let mut nadir = ideal.clone();
        for p in iter {
            if p.len() != ideal.len() {
                return Err(ParetoError::DimensionMismatch(ideal.len(), p.len()));
            }
            for (k, &v) in p.values().iter().enumerate() {
                ideal[k] = ideal[k].min(v);
                nadir[k] = nadir[k].max(v);
            }
        }
        Ok(Self { ideal, nadir })
    }
}

pub fn normalize(f: &ObjectiveVector, bounds: &NormalizationBounds) -> ObjectiveVector {
    let values = f
        .values()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let span = bounds.nadir[k] - bounds.ideal[k];
            if span < DEGENERATE_SPAN {
                0.0
            } else {
                (v - bounds.ideal[k]) / span
            }
        })
        .collect();
    ObjectiveVector(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferencePoint(pub Vec<f64>);

impl ReferencePoint {
    pub fn uniform(m: usize, value: f64) -> Self {
        Self(vec![value; m])
    }
}

impl Default for ReferencePoint {
    fn default() -> Self {
        Self::uniform(2, 1.1)
    }
}

/// Exact bi-objective hypervolume of normalized points against `reference`.
pub fn hypervolume(points: &[ObjectiveVector], reference: &ReferencePoint) -> Result<f64, ParetoError> {
    let r = &reference.0;
    if r.len() != 2 {
        return Err(ParetoError::DimensionMismatch(2, r.len()));
    }
    let mut clipped: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for p in points {
        if p.len() != 2 {
            return Err(ParetoError::DimensionMismatch(2, p.len()));
        }
        let x = p[0].clamp(0.0, r[0]);
        let y = p[1].clamp(0.0, r[1]);
        clipped.push((x, y));
    }
    clipped.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut volume = 0.0;
    let mut best_y = r[1];
    for (k, &(x, y)) in clipped.iter().enumerate() {
        if y >= best_y {
            continue;
        }
        best_y = y;
        let next_x = clipped[k + 1..]
            .iter()
            .find(|q| q.1 < y)
            .map_or(r[0], |q| q.0);
        volume += (next_x - x) * (r[1] - y);
    }
    Ok(volume)
}

/// Mean distance from each reference point to its nearest approximation point.
pub fn igd(approx: &[ObjectiveVector], reference_set: &[ObjectiveVector]) -> Result<f64, ParetoError> {
    if approx.is_empty() || reference_set.is_empty() {
        return Err(ParetoError::EmptySet);
    }
    let m = reference_set[0].len();
    if let Some(bad) = approx.iter().chain(reference_set).find(|v| v.len() != m) {
        return Err(ParetoError::DimensionMismatch(m, bad.len()));
    }
    let total: f64 = reference_set
        .iter()
        .map(|p| {
            approx
                .iter()
                .map(|q| {
                    p.values()
                        .iter()
                        .zip(q.values())
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / reference_set.len() as f64)
}

//! Population management: reduce an enlarged population back to `N`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::scores::{dd_scores, dominance_mask_of};
use super::Heuristic;
use crate::pareto::{normalize, NormalizationBounds, ObjectiveVector};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Management {
    /// Dominance-dissimilarity ranking.
    #[default]
    Meoh,
    Nsga2,
    Moead,
    /// Sort on the first objective only.
    SingleObjective,
}

impl std::str::FromStr for Management {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "meoh" => Ok(Management::Meoh),
            "nsga2" => Ok(Management::Nsga2),
            "moead" => Ok(Management::Moead),
            "single_objective" => Ok(Management::SingleObjective),
            other => Err(format!("unknown management `{other}`")),
        }
    }
}

/// Deterministic tie-break: smaller objective vector, then smaller id.
pub fn tie_break(a: &Heuristic, b: &Heuristic) -> Ordering {
    a.objectives.lex_cmp(&b.objectives).then(a.id.cmp(&b.id))
}

pub fn manage(members: Vec<Heuristic>, n: usize, management: Management) -> Vec<Heuristic> {
    match management {
        Management::Meoh => manage_population(members, n),
        Management::Nsga2 => manage_nsga2(members, n),
        Management::Moead => {
            let m = members.first().map_or(2, |h| h.objectives.len());
            manage_moead_like(members, n, &default_weights(n, m))
        }
        Management::SingleObjective => manage_single_objective(members, n),
    }
}

/// Sorts by dominance-dissimilarity score, descending, and keeps `n`.
pub fn manage_population(members: Vec<Heuristic>, n: usize) -> Vec<Heuristic> {
    let v = dd_scores(&members).scores;
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then_with(|| tie_break(&members[a], &members[b])));
    order.truncate(n);
    take(members, &order)
}

pub fn manage_single_objective(members: Vec<Heuristic>, n: usize) -> Vec<Heuristic> {
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| {
        members[a].objectives[0]
            .total_cmp(&members[b].objectives[0])
            .then_with(|| tie_break(&members[a], &members[b]))
    });
    order.truncate(n);
    take(members, &order)
}

fn take(members: Vec<Heuristic>, order: &[usize]) -> Vec<Heuristic> {
    let mut slots: Vec<Option<Heuristic>> = members.into_iter().map(Some).collect();
    order.iter().map(|&i| slots[i].take().expect("indices are distinct")).collect()
}

/// Fronts of the fast non-dominated sort, each in ascending index order.
pub fn nondominated_sort(objectives: &[&ObjectiveVector]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    let mask = dominance_mask_of(objectives);
    let mut dominated_by = vec![0usize; n];
    for j in 0..n {
        dominated_by[j] = (0..n).filter(|&i| mask[i][j]).count();
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&j| dominated_by[j] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for j in 0..n {
                if mask[i][j] {
                    dominated_by[j] -= 1;
                    if dominated_by[j] == 0 {
                        next.push(j);
                    }
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance of each member of `front`; boundary points are infinite.
pub fn crowding_distance(objectives: &[&ObjectiveVector], front: &[usize]) -> Vec<f64> {
    let k = front.len();
    let mut distance = vec![0.0; k];
    if k == 0 {
        return distance;
    }
    let m = objectives[front[0]].len();
    for obj in 0..m {
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            objectives[front[a]][obj]
                .total_cmp(&objectives[front[b]][obj])
                .then(front[a].cmp(&front[b]))
        });
        let lo = objectives[front[order[0]]][obj];
        let hi = objectives[front[order[k - 1]]][obj];
        distance[order[0]] = f64::INFINITY;
        distance[order[k - 1]] = f64::INFINITY;
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        for w in 1..k.saturating_sub(1) {
            let prev = objectives[front[order[w - 1]]][obj];
            let next = objectives[front[order[w + 1]]][obj];
            distance[order[w]] += (next - prev) / span;
        }
    }
    distance
}

/// Whole fronts first, then the last front by descending crowding distance.
pub fn manage_nsga2(members: Vec<Heuristic>, n: usize) -> Vec<Heuristic> {
    let objs: Vec<&ObjectiveVector> = members.iter().map(|h| &h.objectives).collect();
    let mut order = Vec::with_capacity(n);
    for front in nondominated_sort(&objs) {
        if order.len() + front.len() <= n {
            order.extend(front);
            continue;
        }
        let crowd = crowding_distance(&objs, &front);
        let mut ranked: Vec<usize> = (0..front.len()).collect();
        ranked.sort_by(|&a, &b| {
            crowd[b]
                .total_cmp(&crowd[a])
                .then_with(|| tie_break(&members[front[a]], &members[front[b]]))
        });
        let room = n - order.len();
        order.extend(ranked.into_iter().take(room).map(|r| front[r]));
        break;
    }
    take(members, &order)
}

/// Evenly spread bi-objective weights; `(1, 0)` for a single weight.
pub fn default_weights(n: usize, m: usize) -> Vec<Vec<f64>> {
    assert!(m == 2, "default weights are defined for two objectives");
    if n <= 1 {
        return vec![vec![1.0, 0.0]];
    }
    (0..n)
        .map(|k| {
            let t = k as f64 / (n - 1) as f64;
            vec![1.0 - t, t]
        })
        .collect()
}

/// Each weight in turn claims the unassigned member with the lowest
/// Tchebycheff value on normalized objectives.
pub fn manage_moead_like(members: Vec<Heuristic>, n: usize, weights: &[Vec<f64>]) -> Vec<Heuristic> {
    if members.is_empty() {
        return members;
    }
    let bounds = NormalizationBounds::from_points(members.iter().map(|h| &h.objectives))
        .expect("members share one objective dimension");
    let normalized: Vec<ObjectiveVector> = members.iter().map(|h| normalize(&h.objectives, &bounds)).collect();
    let mut taken = vec![false; members.len()];
    let mut order = Vec::with_capacity(n);
    for w in weights.iter().take(n) {
        let g = |i: usize| {
            normalized[i]
                .values()
                .iter()
                .zip(w)
                .map(|(f, wi)| wi * f)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let best = (0..members.len())
            .filter(|&i| !taken[i])
            .min_by(|&a, &b| g(a).total_cmp(&g(b)).then_with(|| tie_break(&members[a], &members[b])));
        match best {
            Some(i) => {
                taken[i] = true;
                order.push(i);
            }
            None => break,
        }
    }
    take(members, &order)
}

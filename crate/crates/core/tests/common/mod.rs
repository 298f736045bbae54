//! Brute-force oracles and random inputs shared by the integration tests.
#![allow(dead_code)]

pub mod stub;

use std::collections::BTreeMap;

use meoh::dsl::generate::random_program;
use meoh::dsl::{parse, Matrix, SyntaxTree, TaskSignature};
use meoh::evolution::Heuristic;
use meoh::operators::Operator;
use meoh::pareto::ObjectiveVector;
use num_bigint::BigUint;
use rand::Rng;

pub const BEST_FIT: &str = include_str!("../../heuristics/bpp_best_fit.dsl");
pub const FIRST_FIT: &str = include_str!("../../heuristics/bpp_first_fit.dsl");
pub const GLS_PENALTY: &str = include_str!("../../heuristics/tsp_gls_penalty.dsl");
pub const TSP_IDENTITY: &str = include_str!("../../heuristics/tsp_identity.dsl");
pub const BERLIN52: &str = include_str!("../../data/berlin52.tsp");

pub fn fixture_programs() -> Vec<SyntaxTree> {
    [BEST_FIT, FIRST_FIT, GLS_PENALTY, TSP_IDENTITY]
        .iter()
        .map(|s| parse(s).expect("fixture parses"))
        .collect()
}

// ---- dominance ----

pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for k in 0..a.len() {
        if a[k] > b[k] {
            return false;
        }
        if a[k] < b[k] {
            strictly = true;
        }
    }
    strictly
}

pub fn nondominated(points: &[Vec<f64>]) -> Vec<usize> {
    (0..points.len())
        .filter(|&j| !(0..points.len()).any(|i| dominates(&points[i], &points[j])))
        .collect()
}

// ---- similarity ----

fn all_subtrees<'a>(t: &'a SyntaxTree, out: &mut Vec<&'a SyntaxTree>) {
    out.push(t);
    for c in &t.children {
        all_subtrees(c, out);
    }
}

/// Matches each subtree of `a` against an unused equal subtree of `b`.
pub fn similarity(a: &SyntaxTree, b: &SyntaxTree) -> f64 {
    let mut sa = Vec::new();
    let mut sb = Vec::new();
    all_subtrees(a, &mut sa);
    all_subtrees(b, &mut sb);
    let mut used = vec![false; sb.len()];
    let mut matched = 0usize;
    for x in &sa {
        if let Some(k) = (0..sb.len()).find(|&k| !used[k] && sb[k] == *x) {
            used[k] = true;
            matched += 1;
        }
    }
    matched as f64 / sb.len() as f64
}

/// `v[j]`: minus the summed similarity of each dominator `i` to `j`.
pub fn dd_scores(trees: &[&SyntaxTree], objectives: &[Vec<f64>]) -> Vec<f64> {
    let n = trees.len();
    (0..n)
        .map(|j| {
            let mut v = 0.0;
            for i in 0..n {
                if i != j && dominates(&objectives[i], &objectives[j]) {
                    v += -similarity(trees[i], trees[j]);
                }
            }
            v
        })
        .collect()
}

// ---- indicators ----

pub fn igd(approx: &[Vec<f64>], reference: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for r in reference {
        let mut best = f64::INFINITY;
        for a in approx {
            let d: f64 = r.iter().zip(a).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            best = best.min(d);
        }
        total += best;
    }
    total / reference.len() as f64
}

/// Dominated area inside `[0, r]^2`, estimated from `samples` uniform points.
pub fn hv_monte_carlo<R: Rng>(points: &[(f64, f64)], r: f64, samples: usize, rng: &mut R) -> f64 {
    let mut hits = 0usize;
    for _ in 0..samples {
        let x = rng.random::<f64>() * r;
        let y = rng.random::<f64>() * r;
        if points.iter().any(|&(px, py)| px <= x && py <= y) {
            hits += 1;
        }
    }
    hits as f64 / samples as f64 * r * r
}

// ---- populations ----

pub fn random_population<R: Rng>(rng: &mut R, size: usize, m: usize, grid: u32) -> Vec<Heuristic> {
    let sig = TaskSignature::bpp();
    (0..size)
        .map(|k| {
            let depth = rng.random_range(1..4);
            let tree = random_program(rng, &sig, depth);
            let values = (0..m).map(|_| f64::from(rng.random_range(0..grid)) * 0.5).collect();
            Heuristic::new(
                k as u64,
                format!("h{k}"),
                tree,
                ObjectiveVector::new(values).unwrap(),
                0,
                Operator::Init,
                vec![],
            )
        })
        .collect()
}

pub fn objective_rows(members: &[Heuristic]) -> Vec<Vec<f64>> {
    members.iter().map(|h| h.objectives.values().to_vec()).collect()
}

fn tie_order(members: &[Heuristic], a: usize, b: usize) -> std::cmp::Ordering {
    let (x, y) = (members[a].objectives.values(), members[b].objectives.values());
    for k in 0..x.len() {
        match x[k].partial_cmp(&y[k]).unwrap() {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    members[a].id.cmp(&members[b].id)
}

/// Ids of the top `n` by recomputed score, ties by objectives then id.
pub fn manage_top_n(members: &[Heuristic], n: usize) -> Vec<u64> {
    let trees: Vec<&SyntaxTree> = members.iter().map(|h| &h.tree).collect();
    let v = dd_scores(&trees, &objective_rows(members));
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).unwrap().then_with(|| tie_order(members, a, b)));
    order.into_iter().take(n).map(|i| members[i].id).collect()
}

/// Fronts by repeatedly peeling off the non-dominated remainder, then crowding
/// distance on the split front.
pub fn nsga2_select(members: &[Heuristic], n: usize) -> Vec<u64> {
    let objs = objective_rows(members);
    let mut remaining: Vec<usize> = (0..members.len()).collect();
    let mut chosen = Vec::new();
    while chosen.len() < n && !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&j| !remaining.iter().any(|&i| dominates(&objs[i], &objs[j])))
            .collect();
        remaining.retain(|i| !front.contains(i));
        if chosen.len() + front.len() <= n {
            chosen.extend(front.iter().map(|&i| members[i].id));
            continue;
        }
        let m = objs[front[0]].len();
        let mut dist: BTreeMap<usize, f64> = front.iter().map(|&i| (i, 0.0)).collect();
        for k in 0..m {
            let mut sorted = front.clone();
            sorted.sort_by(|&a, &b| objs[a][k].partial_cmp(&objs[b][k]).unwrap());
            let lo = objs[sorted[0]][k];
            let hi = objs[*sorted.last().unwrap()][k];
            *dist.get_mut(&sorted[0]).unwrap() = f64::INFINITY;
            *dist.get_mut(sorted.last().unwrap()).unwrap() = f64::INFINITY;
            if hi - lo <= 0.0 {
                continue;
            }
            for w in 1..sorted.len().saturating_sub(1) {
                *dist.get_mut(&sorted[w]).unwrap() += (objs[sorted[w + 1]][k] - objs[sorted[w - 1]][k]) / (hi - lo);
            }
        }
        let mut ranked = front.clone();
        ranked.sort_by(|&a, &b| dist[&b].partial_cmp(&dist[&a]).unwrap().then_with(|| tie_order(members, a, b)));
        let room = n - chosen.len();
        chosen.extend(ranked.into_iter().take(room).map(|i| members[i].id));
    }
    chosen
}

// ---- bin packing ----

/// Classical best fit over a multiset of remaining capacities.
pub fn best_fit_bins(capacity: u32, items: &[u32]) -> u64 {
    let mut open: BTreeMap<u32, usize> = BTreeMap::new();
    let mut bins = 0;
    for &item in items {
        let fit = open.range(item..).next().map(|(&r, _)| r);
        let rest = match fit {
            Some(r) => {
                let e = open.get_mut(&r).unwrap();
                *e -= 1;
                if *e == 0 {
                    open.remove(&r);
                }
                r - item
            }
            None => {
                bins += 1;
                capacity - item
            }
        };
        *open.entry(rest).or_insert(0) += 1;
    }
    bins
}

pub fn lower_bound(capacity: u32, items: &[u32]) -> u64 {
    let total: BigUint = items.iter().map(|&i| BigUint::from(i)).sum();
    let cap = BigUint::from(capacity);
    let q: BigUint = (total + &cap - 1u32) / cap;
    q.try_into().expect("fits in u64")
}

// ---- tsp ----

pub fn tour_length(order: &[usize], d: &Matrix) -> f64 {
    (0..order.len()).map(|k| d.get(order[k], order[(k + 1) % order.len()])).sum()
}

/// Shortest tour by trying every permutation with node 0 fixed first.
pub fn brute_force_tsp(d: &Matrix) -> f64 {
    fn go(order: &mut Vec<usize>, rest: &mut Vec<usize>, d: &Matrix, best: &mut f64) {
        if rest.is_empty() {
            *best = best.min(tour_length(order, d));
            return;
        }
        for k in 0..rest.len() {
            let x = rest.remove(k);
            order.push(x);
            go(order, rest, d, best);
            order.pop();
            rest.insert(k, x);
        }
    }
    let mut best = f64::INFINITY;
    go(&mut vec![0], &mut (1..d.rows()).collect(), d, &mut best);
    best
}

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{nearest_neighbor_tour, tour_length, Tour, TspInstance};
use crate::dsl::{CompiledProgram, ExecLimits, Matrix, SyntaxTree, Value};
use crate::problem::EvalError;

// Moves must gain more than this to count as improving.
const IMPROVEMENT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlsConfig {
    pub max_iters: usize,
    #[serde(with = "secs")]
    pub time_budget: Duration,
    /// Start each perturbation phase from a nearest-neighbour tour of the
    /// updated matrix instead of the current local optimum.
    #[serde(default)]
    pub restart_from_nearest_neighbor: bool,
}

mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        Duration::try_from_secs_f64(v).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlsOutcome {
    pub best: Tour,
    pub best_length: f64,
    pub total_steps: u64,
    pub iterations: usize,
    /// Best true length after each iteration.
    pub trajectory: Vec<f64>,
    pub edge_n_used: Matrix,
}

#[derive(Clone, Copy)]
enum Move {
    Swap(usize, usize),
    Relocate(usize, usize),
}

/// Length change of swapping the nodes at positions `i < j`.
fn swap_delta(order: &[usize], m: &Matrix, i: usize, j: usize) -> f64 {
    let n = order.len();
    let at = |k: usize| {
        let k = k % n;
        if k == i {
            order[j]
        } else if k == j {
            order[i]
        } else {
            order[k]
        }
    };
    // outgoing edges of positions i-1, i, j-1, j; dedupe when adjacent
    let mut starts = [(i + n - 1) % n, i, (j + n - 1) % n, j];
    starts.sort_unstable();
    let mut delta = 0.0;
    for (k, &s) in starts.iter().enumerate() {
        if k > 0 && starts[k - 1] == s {
            continue;
        }
        delta += m.get(at(s), at(s + 1)) - m.get(order[s], order[(s + 1) % n]);
    }
    delta
}

/// Length change of removing the node at position `i` and inserting it so
/// that it ends at position `j`.
fn relocate_delta(order: &[usize], m: &Matrix, i: usize, j: usize) -> f64 {
    let n = order.len();
    let a = order[i];
    let prev = order[(i + n - 1) % n];
    let next = order[(i + 1) % n];
    let removal = m.get(prev, next) - m.get(prev, a) - m.get(a, next);
    // neighbours of the insertion slot in the list without `a`
    let reduced = |k: usize| {
        let k = k % (n - 1);
        if k < i {
            order[k]
        } else {
            order[k + 1]
        }
    };
    let x = reduced(j + n - 2);
    let y = reduced(j);
    removal + m.get(x, a) + m.get(a, y) - m.get(x, y)
}

fn apply(order: &mut Vec<usize>, mv: Move) {
    match mv {
        Move::Swap(i, j) => order.swap(i, j),
        Move::Relocate(i, j) => {
            let a = order.remove(i);
            order.insert(j, a);
        }
    }
}

/// Best-improvement descent over swap and relocate moves until neither
/// neighbourhood holds a strictly improving move.
pub fn local_search(tour: &Tour, matrix: &Matrix) -> Tour {
    let mut order = tour.0.clone();
    let n = order.len();
    if n < 4 {
        return Tour(order);
    }
    loop {
        let mut best: Option<(f64, Move)> = None;
        let mut consider = |delta: f64, mv: Move| {
            if delta < -IMPROVEMENT_EPS && best.is_none_or(|(d, _)| delta < d) {
                best = Some((delta, mv));
            }
        };
        for i in 0..n {
            for j in i + 1..n {
                consider(swap_delta(&order, matrix, i, j), Move::Swap(i, j));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if j != i {
                    consider(relocate_delta(&order, matrix, i, j), Move::Relocate(i, j));
                }
            }
        }
        match best {
            Some((_, mv)) => apply(&mut order, mv),
            None => return Tour(order),
        }
    }
}

fn run_heuristic(
    program: &CompiledProgram,
    distance: &Matrix,
    tour: &Tour,
    edge_n_used: &Matrix,
    limits: &ExecLimits,
) -> Result<(Matrix, u64), EvalError> {
    let n = distance.rows();
    let args = vec![
        Value::Matrix(distance.clone()),
        Value::Vector(tour.0.iter().map(|&v| v as f64).collect()),
        Value::Matrix(edge_n_used.clone()),
    ];
    let run = program.run(args, limits)?;
    match run.value {
        Value::Matrix(m) if m.rows() == n && m.cols() == n => {
            if m.data().iter().all(|x| x.is_finite()) {
                Ok((m, run.steps))
            } else {
                Err(EvalError::OutputShape("updated matrix has non-finite entries".into()))
            }
        }
        other => Err(EvalError::OutputShape(format!(
            "expected a {n}x{n} matrix, got {}",
            other.describe()
        ))),
    }
}

pub fn gls_solve(
    inst: &TspInstance,
    heuristic: &SyntaxTree,
    config: &GlsConfig,
    limits: &ExecLimits,
) -> Result<GlsOutcome, EvalError> {
    let program = CompiledProgram::compile(heuristic)?;
    let distance = inst.distance();
    let n = inst.len();
    let started = Instant::now();

    let mut current = nearest_neighbor_tour(distance, 0);
    let mut best = current.clone();
    let mut best_length = tour_length(&best.0, distance);
    let mut edge_n_used = Matrix::zeros(n, n);
    let mut total_steps = 0;
    let mut trajectory = Vec::new();
    let mut iterations = 0;

    while iterations < config.max_iters && started.elapsed() < config.time_budget {
        current = local_search(&current, distance);
        let length = tour_length(&current.0, distance);
        if length < best_length {
            best_length = length;
            best = current.clone();
        }
        for k in 0..n {
            let (a, b) = (current.0[k], current.0[(k + 1) % n]);
            edge_n_used.set(a, b, edge_n_used.get(a, b) + 1.0);
            edge_n_used.set(b, a, edge_n_used.get(b, a) + 1.0);
        }
        let (working, steps) = run_heuristic(&program, distance, &current, &edge_n_used, limits)?;
        total_steps += steps;
        if config.restart_from_nearest_neighbor {
            current = nearest_neighbor_tour(&working, 0);
        }
        current = local_search(&current, &working);
        iterations += 1;
        trajectory.push(best_length);
    }
    Ok(GlsOutcome {
        best,
        best_length,
        total_steps,
        iterations,
        trajectory,
        edge_n_used,
    })
}

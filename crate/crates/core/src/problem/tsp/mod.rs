//! Symmetric TSP solved by guided local search, where the evolved heuristic
//! rewrites the distance matrix between local-search phases.

mod exact;
mod gls;
mod tsplib;

use std::collections::HashMap;
use std::path::Path;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use exact::{exact_solve_small, HELD_KARP_MAX_NODES};
pub use gls::{gls_solve, local_search, GlsConfig, GlsOutcome};
pub use tsplib::{load_tsplib, nint, parse_tsplib, TsplibError};

use super::{measure, objectives, EvalError, Evaluation, ObjectiveMode, ProblemEnvironment, TaskSpec, GRAMMAR_EXCERPT};
use crate::dsl::{ExecLimits, Matrix, SyntaxTree, TaskSignature};

#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    name: String,
    coords: Option<Vec<(f64, f64)>>,
    distance: Matrix,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("instance too large for the exact solver: {0} nodes")]
pub struct TooLarge(pub usize);

impl TspInstance {
    pub fn from_coords(
        name: impl Into<String>,
        coords: Vec<(f64, f64)>,
        metric: impl Fn((f64, f64), (f64, f64)) -> f64,
    ) -> Self {
        let n = coords.len();
        let distance = Matrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { metric(coords[i], coords[j]) });
        Self {
            name: name.into(),
            coords: Some(coords),
            distance,
        }
    }

    /// Euclidean instance without rounding.
    pub fn euclidean(name: impl Into<String>, coords: Vec<(f64, f64)>) -> Self {
        Self::from_coords(name, coords, |a, b| (a.0 - b.0).hypot(a.1 - b.1))
    }

    /// Explicit symmetric matrix with zero diagonal.
    pub fn from_matrix(name: impl Into<String>, distance: Matrix) -> Result<Self, EvalError> {
        let n = distance.rows();
        if n < 3 || distance.cols() != n {
            return Err(EvalError::Input("distance matrix must be square with n >= 3".into()));
        }
        for i in 0..n {
            if distance.get(i, i) != 0.0 {
                return Err(EvalError::Input("distance diagonal must be zero".into()));
            }
            for j in 0..i {
                if distance.get(i, j) != distance.get(j, i) || distance.get(i, j) < 0.0 {
                    return Err(EvalError::Input("distance must be symmetric and non-negative".into()));
                }
            }
        }
        Ok(Self {
            name: name.into(),
            coords: None,
            distance,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    pub fn distance(&self) -> &Matrix {
        &self.distance
    }

    pub fn len(&self) -> usize {
        self.distance.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Coordinates uniform on the unit square, Euclidean distances.
pub fn generate_uniform_instance(n: usize, seed: u64) -> TspInstance {
    assert!(n >= 3, "a tour needs at least 3 nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
    TspInstance::euclidean(format!("uniform{n}_s{seed}"), coords)
}

/// A visiting order over `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tour(pub Vec<usize>);

impl Tour {
    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn is_permutation(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        self.0.len() == n && self.0.iter().all(|&v| v < n && !std::mem::replace(&mut seen[v], true))
    }
}

/// Closed tour length under `matrix`.
pub fn tour_length(order: &[usize], matrix: &Matrix) -> f64 {
    let n = order.len();
    (0..n).map(|k| matrix.get(order[k], order[(k + 1) % n])).sum()
}

/// Greedy nearest-neighbour tour; ties go to the lowest index.
pub fn nearest_neighbor_tour(matrix: &Matrix, start: usize) -> Tour {
    let n = matrix.rows();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut current = start;
    visited[current] = true;
    order.push(current);
    for _ in 1..n {
        let mut next = usize::MAX;
        for j in 0..n {
            if !visited[j] && (next == usize::MAX || matrix.get(current, j) < matrix.get(current, next)) {
                next = j;
            }
        }
        visited[next] = true;
        order.push(next);
        current = next;
    }
    Tour(order)
}

/// Reads `name length` lines.
pub fn load_reference_lengths(path: &Path) -> Result<HashMap<String, f64>, EvalError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| EvalError::Input(format!("{}: {e}", path.display())))?;
    parse_reference_lengths(&text)
}

pub fn parse_reference_lengths(text: &str) -> Result<HashMap<String, f64>, EvalError> {
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next().map(str::parse::<f64>), parts.next()) {
            (Some(name), Some(Ok(len)), None) if len > 0.0 => {
                out.insert(name.to_string(), len);
            }
            _ => return Err(EvalError::Input(format!("line {}: expected `name length`", i + 1))),
        }
    }
    Ok(out)
}

/// Per-instance result of [`evaluate_tsp`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspReport {
    pub name: String,
    pub best_length: f64,
    pub reference: f64,
    pub gap: f64,
}

pub fn evaluate_tsp(
    heuristic: &SyntaxTree,
    instances: &[TspInstance],
    reference_lengths: &[f64],
    config: &GlsConfig,
    limits: &ExecLimits,
    mode: ObjectiveMode,
) -> Result<(Evaluation, Vec<TspReport>), EvalError> {
    if instances.is_empty() || instances.len() != reference_lengths.len() {
        return Err(EvalError::Input("need one reference length per instance".into()));
    }
    if reference_lengths.iter().any(|&r| !(r > 0.0)) {
        return Err(EvalError::Input("reference lengths must be positive".into()));
    }
    let (reports, cost) = measure(mode, || {
        let mut steps = 0;
        let mut reports = Vec::with_capacity(instances.len());
        for (inst, &reference) in instances.iter().zip(reference_lengths) {
            let out = gls_solve(inst, heuristic, config, limits)?;
            steps += out.total_steps;
            reports.push(TspReport {
                name: inst.name().to_string(),
                best_length: out.best_length,
                reference,
                gap: (out.best_length - reference) / reference,
            });
        }
        Ok((reports, steps))
    })?;
    let gaps: Vec<f64> = reports.iter().map(|r| r.gap).collect();
    let objectives = objectives(&gaps, cost)?;
    Ok((Evaluation { objectives, gaps }, reports))
}

pub fn tsp_task() -> TaskSpec {
    let io = "\"local_opt_tour\" includes the local optimal tour of IDs, \"edge_distance\" and \"edge_n_used\" \
are matrixes, \"edge_n_used\" includes the number of each edge used during permutation. \"local_opt_tour\" is a \
vector and the two others are matrices; the result must be a matrix of the same size as \"edge_distance\".";
    TaskSpec {
        name: "tsp_gls".into(),
        signature: TaskSignature::tsp(),
        task_description: "Given an edge distance matrix and a local optimal route, please help me design a strategy \
to update the distance matrix to avoid being trapped in the local optimum with the final goal of finding a tour \
with minimized distance. You should create a heuristic for me to update the edge distance matrix."
            .into(),
        code_requirements: format!(
            "Implement it as a function named \"update_edge_distance\". This function should accept 3 inputs: \
[\"edge_distance\", \"local_opt_tour\", \"edge_n_used\"]. The function should return 1 output: \
[\"updated_edge_distance\"]. {io}\n{GRAMMAR_EXCERPT}"
        ),
        io_description: io.into(),
    }
}

/// TSP environment over a fixed instance set with known reference lengths.
#[derive(Debug, Clone)]
pub struct TspEnvironment {
    task: TaskSpec,
    pub instances: Vec<TspInstance>,
    pub reference_lengths: Vec<f64>,
    pub gls: GlsConfig,
    pub limits: ExecLimits,
}

impl TspEnvironment {
    pub fn new(
        instances: Vec<TspInstance>,
        reference_lengths: Vec<f64>,
        gls: GlsConfig,
        limits: ExecLimits,
    ) -> Result<Self, EvalError> {
        if instances.is_empty() || instances.len() != reference_lengths.len() {
            return Err(EvalError::Input("need one reference length per instance".into()));
        }
        Ok(Self {
            task: tsp_task(),
            instances,
            reference_lengths,
            gls,
            limits,
        })
    }

    /// `count` uniform instances of `n` nodes with seeds `seed, seed + 1, ...`,
    /// referenced against the lengths found in `references` by instance name.
    pub fn uniform(
        count: usize,
        n: usize,
        seed: u64,
        references: &HashMap<String, f64>,
        gls: GlsConfig,
        limits: ExecLimits,
    ) -> Result<Self, EvalError> {
        let instances: Vec<TspInstance> = (0..count as u64).map(|k| generate_uniform_instance(n, seed + k)).collect();
        let refs = instances
            .iter()
            .map(|i| {
                references
                    .get(i.name())
                    .copied()
                    .ok_or_else(|| EvalError::Input(format!("no reference length for `{}`", i.name())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(instances, refs, gls, limits)
    }
}

impl ProblemEnvironment for TspEnvironment {
    fn task(&self) -> &TaskSpec {
        &self.task
    }

    fn evaluate(&self, tree: &SyntaxTree, mode: ObjectiveMode) -> Result<Evaluation, EvalError> {
        evaluate_tsp(tree, &self.instances, &self.reference_lengths, &self.gls, &self.limits, mode).map(|(e, _)| e)
    }
}

impl Default for GlsConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            time_budget: Duration::from_secs(60),
            restart_from_nearest_neighbor: false,
        }
    }
}

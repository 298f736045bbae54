//! Problem environments that score a candidate heuristic on two objectives:
//! mean optimality gap and running cost.

pub mod bpp;
pub mod tsp;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{ExecError, SyntaxTree, TaskSignature};
use crate::pareto::ObjectiveVector;

/// How the cost objective is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveMode {
    /// Median of three wall-clock repeats, in seconds.
    WallTime,
    /// Total interpreter steps; fully deterministic.
    StepCost,
}

impl std::str::FromStr for ObjectiveMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "walltime" => Ok(ObjectiveMode::WallTime),
            "stepcost" => Ok(ObjectiveMode::StepCost),
            other => Err(format!("unknown objective mode `{other}` (walltime or stepcost)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("heuristic failed: {0}")]
    Heuristic(#[from] ExecError),
    #[error("invalid heuristic output: {0}")]
    OutputShape(String),
    #[error("invalid problem input: {0}")]
    Input(String),
}

impl EvalError {
    pub fn is_budget(&self) -> bool {
        matches!(self, EvalError::Heuristic(e) if e.is_budget())
    }
}

/// Language summary handed to the generator with every code requirement.
pub const GRAMMAR_EXCERPT: &str = "\
The code must be written in the following small language (not Python):
  program   := \"fn\" NAME \"(\" NAME (\",\" NAME)* \")\" \"{\" statement+ \"}\"
  statement := \"let\" NAME \"=\" expr \";\" | NAME \"=\" expr \";\" | NAME \"[\" expr (\",\" expr)? \"]\" \"=\" expr \";\"
             | \"for\" NAME \"in\" expr \"..\" expr \"{\" statement* \"}\"
             | \"if\" expr \"{\" statement* \"}\" (\"else\" \"{\" statement* \"}\")?
             | \"return\" expr \";\"
  expr uses numbers, names, + - * / % ^, comparisons < <= > >= == !=, && || !, indexing v[i] and m[i, j],
  and the builtins abs sqrt log exp tanh floor ceil min max pow sum mean maxv minv len rows cols zeros copy.
Arithmetic is elementwise on vectors and matrices, and scalars broadcast.";

/// Everything the prompt operators need to know about a task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub name: String,
    pub signature: TaskSignature,
    pub task_description: String,
    pub code_requirements: String,
    /// The input/output paragraph alone, used where the full requirements are omitted.
    pub io_description: String,
}

/// Result of scoring one heuristic.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objectives: ObjectiveVector,
    pub gaps: Vec<f64>,
}

pub trait ProblemEnvironment {
    fn task(&self) -> &TaskSpec;
    fn evaluate(&self, tree: &SyntaxTree, mode: ObjectiveMode) -> Result<Evaluation, EvalError>;
}

/// Runs `f` once in step mode, or three times in wall-time mode, and returns
/// the first result with the cost objective.
pub(crate) fn measure<T>(
    mode: ObjectiveMode,
    mut f: impl FnMut() -> Result<(T, u64), EvalError>,
) -> Result<(T, f64), EvalError> {
    match mode {
        ObjectiveMode::StepCost => {
            let (value, steps) = f()?;
            Ok((value, steps as f64))
        }
        ObjectiveMode::WallTime => {
            let mut times = Vec::with_capacity(3);
            let mut first = None;
            for _ in 0..3 {
                let start = Instant::now();
                let (value, _) = f()?;
                times.push(start.elapsed().as_secs_f64());
                first.get_or_insert(value);
            }
            times.sort_by(f64::total_cmp);
            Ok((first.expect("three repeats ran"), times[1]))
        }
    }
}

pub(crate) fn objectives(gaps: &[f64], cost: f64) -> Result<ObjectiveVector, EvalError> {
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    ObjectiveVector::new(vec![mean_gap, cost])
        .map_err(|_| EvalError::OutputShape("objective is not finite".into()))
}

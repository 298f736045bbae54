//! Online bin packing.
//!
//! Items arrive one at a time. The heuristic scores the remaining capacities
//! of the feasible bins and the item goes to the highest score, lowest index
//! on ties. There is one candidate bin per item, so a fresh bin is always
//! available.

use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Weibull};
use serde::{Deserialize, Serialize};

use super::{measure, objectives, EvalError, Evaluation, ObjectiveMode, ProblemEnvironment, TaskSpec, GRAMMAR_EXCERPT};
use crate::dsl::{is_elementwise, CompiledProgram, ExecLimits, SyntaxTree, TaskSignature, Value};

pub const WEIBULL_SHAPE: f64 = 3.0;
pub const WEIBULL_SCALE: f64 = 45.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BppInstance {
    capacity: u32,
    items: Vec<u32>,
}

impl BppInstance {
    pub fn new(capacity: u32, items: Vec<u32>) -> Result<Self, EvalError> {
        if capacity == 0 {
            return Err(EvalError::Input("capacity must be positive".into()));
        }
        if items.is_empty() {
            return Err(EvalError::Input("instance has no items".into()));
        }
        if let Some(bad) = items.iter().find(|&&w| w == 0 || w > capacity) {
            return Err(EvalError::Input(format!("item {bad} outside [1, {capacity}]")));
        }
        Ok(Self { capacity, items })
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn items(&self) -> &[u32] {
        &self.items
    }

    /// Parses `capacity n` followed by one item per line.
    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| EvalError::Input("empty instance file".into()))?;
        let mut fields = header.split_whitespace().map(str::parse::<u64>);
        let (capacity, n) = match (fields.next(), fields.next(), fields.next()) {
            (Some(Ok(c)), Some(Ok(n)), None) => (c, n as usize),
            _ => return Err(EvalError::Input(format!("bad header line `{header}`"))),
        };
        let capacity = u32::try_from(capacity).map_err(|_| EvalError::Input("capacity too large".into()))?;
        let items = lines
            .map(|l| l.parse::<u32>().map_err(|_| EvalError::Input(format!("bad item line `{l}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        if items.len() != n {
            return Err(EvalError::Input(format!("header says {n} items, found {}", items.len())));
        }
        Self::new(capacity, items)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.capacity, self.items.len());
        for w in &self.items {
            let _ = writeln!(out, "{w}");
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| EvalError::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_text())
    }
}

/// Items are `ceil(Weibull(3, 45))` clamped to `[1, capacity]`.
pub fn generate_weibull_instance(n: usize, capacity: u32, seed: u64) -> BppInstance {
    assert!(n >= 1 && capacity >= 1, "need at least one item and a positive capacity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Weibull::new(WEIBULL_SCALE, WEIBULL_SHAPE).expect("valid Weibull parameters");
    let items = (0..n)
        .map(|_| {
            let x: f64 = dist.sample(&mut rng);
            (x.ceil() as u32).clamp(1, capacity)
        })
        .collect();
    BppInstance { capacity, items }
}

pub fn lower_bound(inst: &BppInstance) -> u64 {
    let total: u64 = inst.items.iter().map(|&w| u64::from(w)).sum();
    total.div_ceil(u64::from(inst.capacity))
}

/// What happens to bins that have never received an item.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnusedBinRule {
    /// Untouched bins stay in the feasible set and are simply not counted.
    #[default]
    NotCounted,
    /// Untouched bins are hidden from the heuristic; a new one is opened only
    /// when no used bin fits.
    Excluded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationOutcome {
    pub bins_used: u64,
    pub total_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BppReport {
    pub bins_used: u64,
    pub lower_bound: u64,
    pub gap: f64,
}

fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

pub fn simulate_online(
    inst: &BppInstance,
    heuristic: &SyntaxTree,
    limits: &ExecLimits,
    rule: UnusedBinRule,
) -> Result<SimulationOutcome, EvalError> {
    let program = CompiledProgram::compile(heuristic)?;
    simulate_compiled(inst, &program, is_elementwise(heuristic), limits, rule)
}

/// Simulation on an already compiled program.
///
/// With `elementwise` set, the block of untouched bins (all at full capacity,
/// all scored alike) is passed as a single entry. Bins are opened in index
/// order, so that entry stands for the lowest untouched index and the argmax
/// and step count are unchanged.
pub fn simulate_compiled(
    inst: &BppInstance,
    program: &CompiledProgram,
    elementwise: bool,
    limits: &ExecLimits,
    rule: UnusedBinRule,
) -> Result<SimulationOutcome, EvalError> {
    let cap = f64::from(inst.capacity);
    let n = inst.items.len();
    // open bins occupy indices 0..remaining.len(); untouched bins follow
    let mut remaining: Vec<f64> = Vec::new();
    let mut feasible: Vec<usize> = Vec::new();
    let mut scores_in: Vec<f64> = Vec::new();
    let mut total_steps = 0u64;

    for &w in &inst.items {
        let item = f64::from(w);
        feasible.clear();
        scores_in.clear();
        for (i, &r) in remaining.iter().enumerate() {
            if r >= item {
                feasible.push(i);
                scores_in.push(r);
            }
        }
        let untouched = n - remaining.len();
        let offered_untouched = match rule {
            UnusedBinRule::NotCounted if elementwise => untouched.min(1),
            UnusedBinRule::NotCounted => untouched,
            UnusedBinRule::Excluded => 0,
        };
        scores_in.extend(std::iter::repeat_n(cap, offered_untouched));

        let choice = if rule == UnusedBinRule::Excluded && feasible.is_empty() {
            None
        } else {
            let run = program.run(vec![Value::Scalar(item), Value::Vector(scores_in.clone())], limits)?;
            total_steps += run.steps;
            let pick = match run.value {
                Value::Scalar(s) if s.is_finite() => 0,
                Value::Vector(v) if v.len() == scores_in.len() => {
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(EvalError::OutputShape("scores contain non-finite values".into()));
                    }
                    argmax(&v)
                }
                other => {
                    return Err(EvalError::OutputShape(format!(
                        "expected {} scores, got {}",
                        scores_in.len(),
                        other.describe()
                    )))
                }
            };
            feasible.get(pick).copied()
        };
        match choice {
            Some(bin) => remaining[bin] -= item,
            None => remaining.push(cap - item),
        }
        debug_assert!(remaining.iter().all(|&r| r >= 0.0));
    }
    Ok(SimulationOutcome {
        bins_used: remaining.iter().filter(|&&r| r < cap).count() as u64,
        total_steps,
    })
}

/// Mean gap and cost over `instances`.
pub fn evaluate_bpp(
    heuristic: &SyntaxTree,
    instances: &[BppInstance],
    mode: ObjectiveMode,
    limits: &ExecLimits,
    rule: UnusedBinRule,
) -> Result<(Evaluation, Vec<BppReport>), EvalError> {
    if instances.is_empty() {
        return Err(EvalError::Input("no instances to evaluate on".into()));
    }
    let program = CompiledProgram::compile(heuristic)?;
    let elementwise = is_elementwise(heuristic);
    let (reports, cost) = measure(mode, || {
        let mut steps = 0;
        let mut reports = Vec::with_capacity(instances.len());
        for inst in instances {
            let out = simulate_compiled(inst, &program, elementwise, limits, rule)?;
            steps += out.total_steps;
            let lb = lower_bound(inst);
            reports.push(BppReport {
                bins_used: out.bins_used,
                lower_bound: lb,
                gap: (out.bins_used - lb) as f64 / lb as f64,
            });
        }
        Ok((reports, steps))
    })?;
    let gaps: Vec<f64> = reports.iter().map(|r| r.gap).collect();
    let objectives = objectives(&gaps, cost)?;
    Ok((Evaluation { objectives, gaps }, reports))
}

pub fn bpp_task() -> TaskSpec {
    let io = "\"item\" and \"bins\" are the size of current item and the rest capacities of feasible bins, \
which are larger than the item size. The output named \"scores\" is the scores for the bins for assignment. \
Note that \"item\" is a scalar, \"bins\" is a vector of integer values, and \"scores\" should be a vector \
of the same length as \"bins\".";
    TaskSpec {
        name: "bpp_online".into(),
        signature: TaskSignature::bpp(),
        task_description: "I need help designing a novel score function that scoring a set of bins to assign an item. \
In each step, the item will be assigned to the bin with the maximum score. If the rest capacity of a bin equals \
the maximum capacity, it will not be used. The final goal is to minimize the number of used bins."
            .into(),
        code_requirements: format!(
            "Implement it as a function named \"score\". This function should accept 2 inputs: [\"item\", \"bins\"]. \
The function should return 1 output: [\"scores\"]. {io} Avoid utilizing the random component, and it is crucial \
to maintain self-consistency.\n{GRAMMAR_EXCERPT}"
        ),
        io_description: io.into(),
    }
}

/// Bin packing environment over a fixed instance set.
#[derive(Debug, Clone)]
pub struct BppEnvironment {
    task: TaskSpec,
    pub instances: Vec<BppInstance>,
    pub limits: ExecLimits,
    pub rule: UnusedBinRule,
}

impl BppEnvironment {
    pub fn new(instances: Vec<BppInstance>, limits: ExecLimits, rule: UnusedBinRule) -> Self {
        Self {
            task: bpp_task(),
            instances,
            limits,
            rule,
        }
    }

    /// `count` Weibull instances with seeds `seed, seed + 1, ...`.
    pub fn weibull(count: usize, n: usize, capacity: u32, seed: u64, limits: ExecLimits) -> Self {
        let instances = (0..count as u64)
            .map(|k| generate_weibull_instance(n, capacity, seed + k))
            .collect();
        Self::new(instances, limits, UnusedBinRule::default())
    }
}

impl ProblemEnvironment for BppEnvironment {
    fn task(&self) -> &TaskSpec {
        &self.task
    }

    fn evaluate(&self, tree: &SyntaxTree, mode: ObjectiveMode) -> Result<Evaluation, EvalError> {
        evaluate_bpp(tree, &self.instances, mode, &self.limits, self.rule).map(|(e, _)| e)
    }
}

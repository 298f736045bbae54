//! The generational loop.

use std::collections::{HashMap, HashSet};
use std::time::{SystemTime, UNIX_EPOCH};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::manage::{manage, Management};
use super::scores::{dd_scores, select_parents};
use super::{Heuristic, Population};
use crate::dsl::{parse, print, validate_signature};
use crate::operators::{
    parse_response, render_prompt, OffspringRequest, OffspringSource, Operator, PromptTemplate, ResponseError,
};
use crate::problem::{EvalError, Evaluation, ObjectiveMode, ProblemEnvironment};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Population size N.
    pub population_size: usize,
    /// Number of generations T.
    pub generations: usize,
    /// Parents per crossover prompt, d.
    pub parent_count: usize,
    pub seed: u64,
    #[serde(default)]
    pub management: Management,
    #[serde(default = "default_mode")]
    pub objective_mode: ObjectiveMode,
    /// Generator calls allowed to fill the initial population; 3N if unset.
    #[serde(default)]
    pub init_attempts: Option<usize>,
    /// Select parents only from the population at the start of the generation.
    #[serde(default)]
    pub freeze_selection_pool: bool,
    /// Reuse step-mode evaluations of identical programs.
    #[serde(default = "yes")]
    pub cache_evaluations: bool,
}

fn default_mode() -> ObjectiveMode {
    ObjectiveMode::StepCost
}

fn yes() -> bool {
    true
}

impl RunConfig {
    pub fn new(population_size: usize, generations: usize, parent_count: usize, seed: u64) -> Self {
        Self {
            population_size,
            generations,
            parent_count,
            seed,
            management: Management::Meoh,
            objective_mode: ObjectiveMode::StepCost,
            init_attempts: None,
            freeze_selection_pool: false,
            cache_evaluations: true,
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.parent_count < 1 || self.population_size < self.parent_count {
            return Err(RunError::Config(format!(
                "need N >= d >= 1, got N = {} and d = {}",
                self.population_size, self.parent_count
            )));
        }
        if self.generations < 1 {
            return Err(RunError::Config("need at least one generation".into()));
        }
        Ok(())
    }

    pub fn init_budget(&self) -> usize {
        self.init_attempts.unwrap_or(3 * self.population_size)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error("only {valid} valid heuristic(s) after {attempts} initialization attempts")]
    InitializationExhausted { valid: usize, attempts: usize },
    #[error("archive write failed: {0}")]
    Observer(String),
}

/// Why an attempt did not enter the population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureCategory {
    GeneratorError,
    MissingDescription,
    MissingCodeBlock,
    EmptyCode,
    ParseError,
    SignatureError,
    Duplicate,
    RuntimeError,
    BudgetExceeded,
    OutputShape,
}

impl From<&ResponseError> for FailureCategory {
    fn from(e: &ResponseError) -> Self {
        match e {
            ResponseError::MissingDescription => FailureCategory::MissingDescription,
            ResponseError::MissingCodeBlock => FailureCategory::MissingCodeBlock,
            ResponseError::EmptyCode => FailureCategory::EmptyCode,
        }
    }
}

impl From<&EvalError> for FailureCategory {
    fn from(e: &EvalError) -> Self {
        match e {
            e if e.is_budget() => FailureCategory::BudgetExceeded,
            EvalError::OutputShape(_) => FailureCategory::OutputShape,
            _ => FailureCategory::RuntimeError,
        }
    }
}

/// One generator call and its outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub id: u64,
    pub generation: usize,
    pub slot: usize,
    pub operator: Operator,
    pub parent_ids: Vec<u64>,
    pub admitted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_category: Option<FailureCategory>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_message: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objectives: Option<Vec<f64>>,
    /// Wall-clock stamp; omitted in step mode so archives are reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp_ms: Option<u64>,
}

/// Population ids and their dominance-dissimilarity scores after a generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationSnapshot {
    pub generation: usize,
    pub member_ids: Vec<u64>,
    pub dd_scores: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunArchive {
    pub records: Vec<AttemptRecord>,
    pub snapshots: Vec<GenerationSnapshot>,
}

/// Receives records and snapshots as the run produces them.
pub trait RunObserver {
    fn on_record(&mut self, _record: &AttemptRecord) -> Result<(), String> {
        Ok(())
    }

    fn on_generation(&mut self, _snapshot: &GenerationSnapshot, _population: &Population) -> Result<(), String> {
        Ok(())
    }
}

impl RunObserver for () {}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub population: Population,
    pub archive: RunArchive,
}

/// Seed for one generator slot, independent of all other slots.
pub fn derive_seed(seed: u64, generation: usize, slot: usize) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(mix(mix(seed) ^ generation as u64) ^ slot as u64)
}

struct Loop<'a> {
    config: &'a RunConfig,
    generator: &'a mut dyn OffspringSource,
    env: &'a dyn ProblemEnvironment,
    observer: &'a mut dyn RunObserver,
    archive: RunArchive,
    next_id: u64,
    cache: HashMap<String, Result<Evaluation, EvalError>>,
}

struct Slot<'p> {
    generation: usize,
    slot: usize,
    operator: Operator,
    parents: Vec<&'p Heuristic>,
}

impl Loop<'_> {
    fn evaluate(&mut self, source: &str, tree: &crate::dsl::SyntaxTree) -> Result<Evaluation, EvalError> {
        let cacheable = self.config.cache_evaluations && self.config.objective_mode == ObjectiveMode::StepCost;
        if cacheable {
            if let Some(hit) = self.cache.get(source) {
                return hit.clone();
            }
        }
        let result = self.env.evaluate(tree, self.config.objective_mode);
        if cacheable {
            self.cache.insert(source.to_string(), result.clone());
        }
        result
    }

    /// Generates, checks and evaluates one candidate, logging the attempt.
    fn attempt(&mut self, slot: Slot<'_>, taken: &HashSet<String>) -> Result<Option<Heuristic>, RunError> {
        let template = PromptTemplate::new(slot.operator, self.env.task()).with_parent_slots(slot.parents.len());
        let prompt = render_prompt(&template, &slot.parents).expect("parent count matches the template");
        let request = OffspringRequest {
            operator: slot.operator,
            prompt: &prompt,
            parents: &slot.parents,
            seed: derive_seed(self.config.seed, slot.generation, slot.slot),
        };
        let id = self.next_id;
        self.next_id += 1;
        let mut record = AttemptRecord {
            id,
            generation: slot.generation,
            slot: slot.slot,
            operator: slot.operator,
            parent_ids: slot.parents.iter().map(|p| p.id).collect(),
            admitted: false,
            failure_category: None,
            failure_message: None,
            description: None,
            source: None,
            objectives: None,
            timestamp_ms: None,
        };
        let text = self.generator.generate(&request).map_err(|e| e.0);
        let admitted = self.check(&mut record, text, taken);
        if self.config.objective_mode == ObjectiveMode::WallTime {
            record.timestamp_ms = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .ok()
                .map(|d| d.as_millis() as u64);
        }
        self.observer.on_record(&record).map_err(RunError::Observer)?;
        self.archive.records.push(record);
        Ok(admitted)
    }

    fn check(
        &mut self,
        record: &mut AttemptRecord,
        text: Result<String, String>,
        taken: &HashSet<String>,
    ) -> Option<Heuristic> {
        let fail = |record: &mut AttemptRecord, category: FailureCategory, message: String| {
            record.failure_category = Some(category);
            record.failure_message = Some(message);
            None
        };
        let text = match text {
            Ok(t) => t,
            Err(e) => return fail(record, FailureCategory::GeneratorError, e),
        };
        let response = match parse_response(&text) {
            Ok(r) => r,
            Err(e) => return fail(record, (&e).into(), e.to_string()),
        };
        record.description = Some(response.description.clone());
        let tree = match parse(&response.code) {
            Ok(t) => t,
            Err(e) => {
                record.source = Some(response.code);
                return fail(record, FailureCategory::ParseError, e.to_string());
            }
        };
        let source = print(&tree);
        record.source = Some(source.clone());
        if let Err(e) = validate_signature(&tree, &self.env.task().signature) {
            return fail(record, FailureCategory::SignatureError, e.to_string());
        }
        if taken.contains(&source) {
            return fail(record, FailureCategory::Duplicate, "identical to a current member".into());
        }
        match self.evaluate(&source, &tree) {
            Err(e) => fail(record, (&e).into(), e.to_string()),
            Ok(eval) => {
                record.admitted = true;
                record.objectives = Some(eval.objectives.values().to_vec());
                Some(Heuristic::new(
                    record.id,
                    response.description,
                    tree,
                    eval.objectives,
                    record.generation,
                    record.operator,
                    record.parent_ids.clone(),
                ))
            }
        }
    }

    fn snapshot(&mut self, generation: usize, population: &Population) -> Result<(), RunError> {
        let snapshot = GenerationSnapshot {
            generation,
            member_ids: population.ids(),
            dd_scores: dd_scores(&population.members).scores,
        };
        self.observer
            .on_generation(&snapshot, population)
            .map_err(RunError::Observer)?;
        self.archive.snapshots.push(snapshot);
        Ok(())
    }
}

/// Runs initialization and `T` generations of select, generate, evaluate, manage.
pub fn run_meoh(
    config: &RunConfig,
    generator: &mut dyn OffspringSource,
    env: &dyn ProblemEnvironment,
    observer: &mut dyn RunObserver,
) -> Result<RunOutcome, RunError> {
    config.validate()?;
    let n = config.population_size;
    let mut state = Loop {
        config,
        generator,
        env,
        observer,
        archive: RunArchive::default(),
        next_id: 0,
        cache: HashMap::new(),
    };
    let mut population = Population::new(n);
    let mut taken = HashSet::new();
    let budget = config.init_budget();
    for attempt in 0..budget {
        if population.len() >= n {
            break;
        }
        let slot = Slot {
            generation: 0,
            slot: attempt,
            operator: Operator::Init,
            parents: Vec::new(),
        };
        if let Some(h) = state.attempt(slot, &taken)? {
            taken.insert(h.source.clone());
            population.members.push(h);
        }
    }
    if population.len() < 2 {
        return Err(RunError::InitializationExhausted {
            valid: population.len(),
            attempts: state.archive.records.len(),
        });
    }
    state.snapshot(0, &population)?;

    let mut selection_rng = ChaCha8Rng::seed_from_u64(config.seed);
    for generation in 1..=config.generations {
        let base = population.members.clone();
        let mut pool = base.clone();
        let mut offspring = Vec::new();
        let mut taken: HashSet<String> = base.iter().map(|h| h.source.clone()).collect();
        for k in 0..n {
            let operator = Operator::SCHEDULE[k % Operator::SCHEDULE.len()];
            let candidates = if config.freeze_selection_pool { &base } else { &pool };
            let weights = match config.management {
                Management::Meoh => dd_scores(candidates).probabilities,
                _ => vec![1.0; candidates.len()],
            };
            let drawn = select_parents(&weights, config.parent_count.min(candidates.len()), &mut selection_rng);
            let parents: Vec<&Heuristic> = if operator.is_crossover() {
                drawn.iter().map(|&i| &candidates[i]).collect()
            } else {
                // the most probable member of the draw, first drawn on ties
                let mut best = drawn[0];
                for &i in &drawn[1..] {
                    if weights[i] > weights[best] {
                        best = i;
                    }
                }
                vec![&candidates[best]]
            };
            let slot = Slot {
                generation,
                slot: k,
                operator,
                parents,
            };
            if let Some(h) = state.attempt(slot, &taken)? {
                taken.insert(h.source.clone());
                pool.push(h.clone());
                offspring.push(h);
            }
        }
        let mut enlarged = base;
        enlarged.extend(offspring);
        population.members = manage(enlarged, n, config.management);
        state.snapshot(generation, &population)?;
    }
    Ok(RunOutcome {
        population,
        archive: state.archive,
    })
}

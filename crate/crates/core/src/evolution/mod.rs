//! Individuals, dominance-dissimilarity selection, population management
//! and the generational loop.

mod heuristic;
mod manage;
mod run;
mod scores;

pub use heuristic::{Heuristic, Population};
pub use manage::{
    crowding_distance, default_weights, manage, manage_moead_like, manage_nsga2, manage_population,
    manage_single_objective, nondominated_sort, tie_break, Management,
};
pub use run::{
    derive_seed, run_meoh, AttemptRecord, FailureCategory, GenerationSnapshot, RunArchive, RunConfig, RunError,
    RunObserver, RunOutcome,
};
pub use scores::{dd_scores, dd_scores_from, dominance_mask, dominance_mask_of, select_parents, softmax, DdScores};

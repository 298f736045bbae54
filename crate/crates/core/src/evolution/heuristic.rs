use crate::dsl::{count_subtrees, print, SubtreeProfile, SyntaxTree};
use crate::operators::Operator;
use crate::pareto::ObjectiveVector;

/// An evaluated candidate: description, program and objective values.
#[derive(Debug, Clone, PartialEq)]
pub struct Heuristic {
    pub id: u64,
    pub description: String,
    /// Canonical printed form of `tree`.
    pub source: String,
    pub tree: SyntaxTree,
    pub profile: SubtreeProfile,
    pub objectives: ObjectiveVector,
    pub generation: usize,
    pub operator: Operator,
    pub parent_ids: Vec<u64>,
}

impl Heuristic {
    pub fn new(
        id: u64,
        description: impl Into<String>,
        tree: SyntaxTree,
        objectives: ObjectiveVector,
        generation: usize,
        operator: Operator,
        parent_ids: Vec<u64>,
    ) -> Self {
        Self {
            id,
            description: description.into(),
            source: print(&tree),
            profile: count_subtrees(&tree),
            tree,
            objectives,
            generation,
            operator,
            parent_ids,
        }
    }
}

/// Current members of a run, at most `capacity` after management.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Heuristic>,
    pub capacity: usize,
}

impl Population {
    pub fn new(capacity: usize) -> Self {
        Self {
            members: Vec::with_capacity(capacity),
            capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn ids(&self) -> Vec<u64> {
        self.members.iter().map(|h| h.id).collect()
    }

    pub fn contains_source(&self, source: &str) -> bool {
        self.members.iter().any(|h| h.source == source)
    }
}

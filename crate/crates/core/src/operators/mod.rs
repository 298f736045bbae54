//! Prompt operators, response parsing, and the sources that turn a prompt
//! into a candidate heuristic.

mod client;
mod mock;
mod prompt;
mod response;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use client::{ChatClient, ChatReply, ClientError, EndpointConfig};
pub use mock::{MockGenerator, MockTask};
pub use prompt::{render_prompt, ArityError, PromptTemplate, FENCE_INSTRUCTION, SENTINEL_INSTRUCTION};
pub use response::{parse_response, GeneratorResponse, ResponseError};

use crate::evolution::Heuristic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Operator {
    Init,
    E1,
    E2,
    M1,
    M2,
    M3,
}

impl Operator {
    /// Round-robin order of offspring slots within a generation.
    pub const SCHEDULE: [Operator; 5] = [Operator::E1, Operator::E2, Operator::M1, Operator::M2, Operator::M3];

    pub fn is_crossover(self) -> bool {
        matches!(self, Operator::E1 | Operator::E2)
    }

    pub fn default_parent_slots(self) -> usize {
        match self {
            Operator::Init => 0,
            Operator::E1 | Operator::E2 => 5,
            Operator::M1 | Operator::M2 | Operator::M3 => 1,
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::Init => "Init",
            Operator::E1 => "E1",
            Operator::E2 => "E2",
            Operator::M1 => "M1",
            Operator::M2 => "M2",
            Operator::M3 => "M3",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("generator failed: {0}")]
pub struct GeneratorError(pub String);

impl From<ClientError> for GeneratorError {
    fn from(e: ClientError) -> Self {
        GeneratorError(e.to_string())
    }
}

/// One call to an offspring source.
pub struct OffspringRequest<'a> {
    pub operator: Operator,
    pub prompt: &'a str,
    pub parents: &'a [&'a Heuristic],
    /// Per-slot seed, derived from the run seed, generation and slot.
    pub seed: u64,
}

/// Anything that answers a prompt with response text.
pub trait OffspringSource {
    fn generate(&mut self, request: &OffspringRequest<'_>) -> Result<String, GeneratorError>;
}

impl OffspringSource for ChatClient {
    fn generate(&mut self, request: &OffspringRequest<'_>) -> Result<String, GeneratorError> {
        Ok(self.complete(request.prompt)?.text)
    }
}

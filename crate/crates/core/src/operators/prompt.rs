use std::fmt::Write as _;

use thiserror::Error;

use super::Operator;
use crate::evolution::Heuristic;
use crate::problem::TaskSpec;

pub const SENTINEL_INSTRUCTION: &str = "First, describe your new algorithm and main steps in one sentence. \
The description must start with \"<start>\" and end with \"<end>\".";

pub const FENCE_INSTRUCTION: &str =
    "Your code should be formatted as a single fenced code block: ```\n<code>\n```";

const CLOSING: &str = "Be creative and do not give additional explanation.";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} prompt takes {expected} parent(s), got {got}")]
pub struct ArityError {
    pub kind: Operator,
    pub expected: usize,
    pub got: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PromptTemplate {
    pub kind: Operator,
    pub task_description: String,
    pub code_requirements: String,
    pub io_description: String,
    pub parent_slots: usize,
}

impl PromptTemplate {
    pub fn new(kind: Operator, task: &TaskSpec) -> Self {
        Self {
            kind,
            task_description: task.task_description.clone(),
            code_requirements: task.code_requirements.clone(),
            io_description: task.io_description.clone(),
            parent_slots: kind.default_parent_slots(),
        }
    }

    /// Crossover prompts accept fewer parents while the population is small.
    pub fn with_parent_slots(mut self, slots: usize) -> Self {
        if self.kind.is_crossover() {
            self.parent_slots = slots;
        }
        self
    }
}

fn write_parent(out: &mut String, number: Option<usize>, parent: &Heuristic) {
    if let Some(k) = number {
        let _ = writeln!(out, "No. {k} algorithm and the corresponding code are:");
    }
    let _ = writeln!(out, "<Algorithm description>: {}", parent.description);
    let _ = writeln!(out, "<Code>:\n```\n{}```", parent.source);
}

pub fn render_prompt(template: &PromptTemplate, parents: &[&Heuristic]) -> Result<String, ArityError> {
    if parents.len() != template.parent_slots {
        return Err(ArityError {
            kind: template.kind,
            expected: template.parent_slots,
            got: parents.len(),
        });
    }
    let mut out = String::new();
    if template.kind == Operator::M3 {
        out.push_str("First, you need to identify the main components in the function below.\n");
        out.push_str("Next, analyze whether any of these components can be overfit to the in-distribution instances.\n");
        out.push_str(
            "Then, based on your analysis, simplify the components to enhance the generalization to potential \
out-of-distribution instances.\n",
        );
        out.push_str("Finally, provide the revised code, keeping the function, inputs, and outputs unchanged.\n\n");
        let _ = writeln!(out, "<Code>:\n```\n{}```\n", parents[0].source);
        let _ = writeln!(out, "{}\n", template.io_description);
        let _ = writeln!(out, "{SENTINEL_INSTRUCTION}\n");
        let _ = writeln!(out, "{FENCE_INSTRUCTION}\n");
        out.push_str(CLOSING);
        out.push('\n');
        return Ok(out);
    }

    let _ = writeln!(out, "{}\n", template.task_description);
    match template.kind {
        Operator::Init => {}
        Operator::E1 | Operator::E2 => {
            let _ = writeln!(
                out,
                "I have {} existing algorithms with their codes as follows:",
                parents.len()
            );
            for (k, p) in parents.iter().enumerate() {
                write_parent(&mut out, Some(k + 1), p);
            }
            out.push('\n');
            if template.kind == Operator::E1 {
                out.push_str("Please help me create a new algorithm that has a totally different form from the given ones.\n\n");
            } else {
                out.push_str(
                    "Please help me create a new algorithm that has a totally different form from the given ones \
but can be motivated from them. Firstly, identify the common backbone idea in the provided algorithms. \
Secondly, based on the backbone idea, design the new algorithm.\n\n",
                );
            }
        }
        Operator::M1 | Operator::M2 => {
            out.push_str("I have one algorithm with its code as follows:\n");
            write_parent(&mut out, None, parents[0]);
            out.push('\n');
            if template.kind == Operator::M1 {
                out.push_str(
                    "Please assist me in creating a new algorithm that has a different form but can be a modified \
version of the algorithm provided.\n\n",
                );
            } else {
                out.push_str(
                    "Please identify the main algorithm parameters and assist me in creating a new algorithm that \
has a different parameter settings of the score function provided.\n\n",
                );
            }
        }
        Operator::M3 => unreachable!("handled above"),
    }
    let _ = writeln!(out, "{SENTINEL_INSTRUCTION}\n");
    let _ = writeln!(out, "Next, {}\n", template.code_requirements);
    let _ = writeln!(out, "{FENCE_INSTRUCTION}\n");
    out.push_str(CLOSING);
    out.push('\n');
    Ok(out)
}

//! Deterministic offline offspring source.
//!
//! Emits responses in the same `<start>..<end>` plus fenced-code format a
//! chat model is asked for. Codes come from a small family of task templates
//! and from tree edits of the parents; a fixed share of emissions is broken
//! on purpose so the failure paths stay exercised.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GeneratorError, OffspringRequest, OffspringSource, Operator};
use crate::dsl::generate::{format_literal, random_expr};
use crate::dsl::{parse, print, NodeKind, Shape, SyntaxTree, TaskSignature};
use crate::evolution::Heuristic;
use crate::similarity::ast_similarity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MockTask {
    Bpp,
    Tsp,
}

#[derive(Debug, Clone)]
pub struct MockGenerator {
    task: MockTask,
    signature: TaskSignature,
    malformed_rate: f64,
}

type Template = fn(&mut ChaCha8Rng) -> (String, String);

fn lit(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> String {
    format_literal(rng.random_range(lo..hi))
}

const BPP_TEMPLATES: &[Template] = &[
    |_| ("Pick the feasible bin left with the least space after packing.".into(), "return item - bins;".into()),
    |rng| {
        let c = rng.random_range(1..10);
        ("Score every feasible bin equally so the lowest-index bin wins.".into(), format!("return {c};"))
    },
    |rng| {
        let c = lit(rng, 0.5, 20.0);
        (
            format!("Prefer bins whose leftover space is closest to a slack of {c}."),
            format!("return -abs(bins - item - {c});"),
        )
    },
    |rng| {
        let c = lit(rng, 0.1, 5.0);
        (
            format!("Penalize leftover space logarithmically with offset {c}."),
            format!("return -log(bins - item + {c});"),
        )
    },
    |_| ("Favor bins where the item fills the largest share of what is left.".into(), "return item / bins;".into()),
    |_| ("Send the item to the emptiest feasible bin.".into(), "return bins;".into()),
    |rng| {
        let c = lit(rng, 0.01, 1.0);
        (
            format!("Decay the score exponentially in leftover space at rate {c}."),
            format!("return exp(-{c} * (bins - item));"),
        )
    },
    |rng| {
        let c = lit(rng, 0.5, 3.0);
        (
            format!("Penalize leftover space raised to the power {c}."),
            format!("return 0 - (bins - item) ^ {c};"),
        )
    },
    |rng| {
        let c = lit(rng, 0.001, 0.1);
        (
            format!("Combine the fill ratio with a penalty of {c} per unit of leftover space."),
            format!("let r = bins - item;\nreturn item / bins - {c} * r;"),
        )
    },
    |rng| {
        let c = lit(rng, 1.0, 15.0);
        (
            format!("Strongly prefer bins left with at most {c} units, then the tightest one."),
            format!("let r = bins - item;\nreturn (r <= {c}) * 100 - r;"),
        )
    },
];

const TSP_TEMPLATES: &[Template] = &[
    |_| ("Leave the distance matrix unchanged.".into(), "return edge_distance;".into()),
    |rng| {
        let c = lit(rng, 0.01, 0.5);
        (
            format!("Inflate every edge by {c} times the number of times it was used."),
            format!("return edge_distance * (1 + {c} * edge_n_used);"),
        )
    },
    |rng| {
        let c = lit(rng, 0.01, 0.5);
        (
            format!("Add {c} mean edge lengths per past use of an edge."),
            format!("return edge_distance + {c} * mean(edge_distance) * edge_n_used;"),
        )
    },
    |rng| {
        let c = lit(rng, 0.05, 0.5);
        (
            format!("Penalize the edges of the current local optimum by {c} per past use."),
            format!(
                "let n = len(local_opt_tour);\nlet d = copy(edge_distance);\nfor k in 0..n {{\n\
                 let a = local_opt_tour[k];\nlet b = local_opt_tour[(k + 1) % n];\n\
                 d[a, b] = edge_distance[a, b] * (1 + {c} * edge_n_used[a, b]);\nd[b, a] = d[a, b];\n}}\nreturn d;"
            ),
        )
    },
    |rng| {
        let c = lit(rng, 0.1, 1.0);
        (
            format!("Lengthen local-optimum edges by {c} times their utility, long rarely used edges first."),
            format!(
                "let n = len(local_opt_tour);\nlet d = copy(edge_distance);\nfor k in 0..n {{\n\
                 let a = local_opt_tour[k];\nlet b = local_opt_tour[(k + 1) % n];\n\
                 let u = edge_distance[a, b] / (1 + edge_n_used[a, b]);\n\
                 d[a, b] = edge_distance[a, b] + {c} * u;\nd[b, a] = d[a, b];\n}}\nreturn d;"
            ),
        )
    },
    |rng| {
        let c = lit(rng, 0.05, 0.5);
        (
            format!("Lengthen every edge that has ever been used by a factor {c}."),
            format!("return edge_distance * (1 + {c} * (edge_n_used > 0));"),
        )
    },
];

/// Path of child indices from the root.
type NodePath = Vec<usize>;

fn node_at<'t>(tree: &'t SyntaxTree, path: &[usize]) -> &'t SyntaxTree {
    path.iter().fold(tree, |node, &i| &node.children[i])
}

fn node_at_mut<'t>(tree: &'t mut SyntaxTree, path: &[usize]) -> &'t mut SyntaxTree {
    path.iter().fold(tree, |node, &i| &mut node.children[i])
}

/// Expression nodes that can be replaced by another expression.
fn expression_paths(tree: &SyntaxTree) -> Vec<NodePath> {
    fn visit(node: &SyntaxTree, path: &mut NodePath, out: &mut Vec<NodePath>) {
        for (i, child) in node.children.iter().enumerate() {
            // the base of an index expression must stay an identifier
            if node.kind == NodeKind::Index && i == 0 {
                continue;
            }
            path.push(i);
            if child.kind.is_expression() {
                out.push(path.clone());
            }
            visit(child, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    visit(tree, &mut Vec::new(), &mut out);
    out
}

/// True when every identifier in `node` is one of `params`.
fn is_closed(node: &SyntaxTree, params: &[&str]) -> bool {
    let mut closed = true;
    node.walk(&mut |n| {
        if n.kind == NodeKind::Ident && !params.contains(&n.lexeme()) {
            closed = false;
        }
    });
    closed
}

impl MockGenerator {
    pub fn new(task: MockTask) -> Self {
        let signature = match task {
            MockTask::Bpp => TaskSignature::bpp(),
            MockTask::Tsp => TaskSignature::tsp(),
        };
        Self {
            task,
            signature,
            malformed_rate: 0.1,
        }
    }

    pub fn with_malformed_rate(mut self, rate: f64) -> Self {
        self.malformed_rate = rate.clamp(0.0, 1.0);
        self
    }

    pub fn task(&self) -> MockTask {
        self.task
    }

    fn templates(&self) -> &'static [Template] {
        match self.task {
            MockTask::Bpp => BPP_TEMPLATES,
            MockTask::Tsp => TSP_TEMPLATES,
        }
    }

    fn wrap(&self, body: &str) -> SyntaxTree {
        let params = self.signature.param_names().join(", ");
        let src = format!("fn {}({params}) {{\n{body}\n}}", self.signature.function_name);
        parse(&src).expect("mock templates are valid programs")
    }

    fn pick_template(&self, rng: &mut ChaCha8Rng) -> (String, SyntaxTree) {
        let templates = self.templates();
        let (desc, body) = templates[rng.random_range(0..templates.len())](rng);
        (desc, self.wrap(&body))
    }

    /// Parameters usable in replacement expressions. TSP tour vectors do not
    /// combine with the matrices, so they are left out.
    fn replacement_vars(&self) -> Vec<&str> {
        self.signature
            .params
            .iter()
            .filter(|(_, shape)| self.task == MockTask::Bpp || *shape != Shape::Vector)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    /// One response text for `kind`, fully determined by `rng`.
    pub fn emit(&self, rng: &mut ChaCha8Rng, kind: Operator, parents: &[&Heuristic]) -> String {
        let malformed = rng.random_bool(self.malformed_rate);
        let (desc, tree) = match (kind, parents.first()) {
            (Operator::Init, _) | (_, None) => self.pick_template(rng),
            (Operator::E1, Some(_)) => self.explore(rng, parents),
            (Operator::E2, Some(first)) => self.crossover(rng, first, parents.get(1).unwrap_or(first)),
            (Operator::M1, Some(p)) => self.replace_subtree(rng, p),
            (Operator::M2, Some(p)) => self.jitter_literals(rng, p),
            (Operator::M3, Some(p)) => self.delete_subtree(rng, p),
        };
        if malformed {
            self.break_response(rng, &desc, &tree)
        } else {
            format!("<start>{desc}<end>\n```\n{}```\n", print(&tree))
        }
    }

    /// The least similar of three fresh template draws.
    fn explore(&self, rng: &mut ChaCha8Rng, parents: &[&Heuristic]) -> (String, SyntaxTree) {
        let mut best: Option<(f64, String, SyntaxTree)> = None;
        for _ in 0..3 {
            let (desc, tree) = self.pick_template(rng);
            let closeness = parents
                .iter()
                .map(|p| ast_similarity(&tree, &p.tree))
                .fold(0.0, f64::max);
            if best.as_ref().is_none_or(|(c, _, _)| closeness < *c) {
                best = Some((closeness, desc, tree));
            }
        }
        let (_, desc, tree) = best.expect("three candidates drawn");
        (desc, tree)
    }

    /// Grafts a parameter-only subtree of `b` into a random expression slot of `a`.
    fn crossover(&self, rng: &mut ChaCha8Rng, a: &Heuristic, b: &Heuristic) -> (String, SyntaxTree) {
        let params = self.signature.param_names();
        let donors: Vec<NodePath> = expression_paths(&b.tree)
            .into_iter()
            .filter(|p| is_closed(node_at(&b.tree, p), &params))
            .collect();
        let slots = expression_paths(&a.tree);
        if donors.is_empty() || slots.is_empty() {
            return self.pick_template(rng);
        }
        let donor = node_at(&b.tree, &donors[rng.random_range(0..donors.len())]).clone();
        let mut tree = a.tree.clone();
        *node_at_mut(&mut tree, &slots[rng.random_range(0..slots.len())]) = donor;
        ("Keeps the backbone of one parent and borrows a component from another.".into(), tree)
    }

    fn replace_subtree(&self, rng: &mut ChaCha8Rng, parent: &Heuristic) -> (String, SyntaxTree) {
        let slots = expression_paths(&parent.tree);
        if slots.is_empty() {
            return self.pick_template(rng);
        }
        let vars = self.replacement_vars();
        let mut tree = parent.tree.clone();
        let depth = rng.random_range(1..4);
        *node_at_mut(&mut tree, &slots[rng.random_range(0..slots.len())]) = random_expr(rng, &vars, depth);
        ("A modified version of the parent with one component rewritten.".into(), tree)
    }

    fn jitter_literals(&self, rng: &mut ChaCha8Rng, parent: &Heuristic) -> (String, SyntaxTree) {
        fn visit(node: &mut SyntaxTree, rng: &mut ChaCha8Rng) {
            if node.kind == NodeKind::NumLit {
                let x: f64 = node.lexeme().parse().unwrap_or(1.0);
                let scaled = format_literal(x * rng.random_range(0.5..1.5));
                // keep literals positive; an all-zero rounding keeps the original
                if scaled != "0" {
                    node.lexeme = Some(scaled);
                }
            }
            for child in &mut node.children {
                visit(child, rng);
            }
        }
        let mut tree = parent.tree.clone();
        visit(&mut tree, rng);
        ("The parent's structure with re-tuned parameters.".into(), tree)
    }

    fn delete_subtree(&self, rng: &mut ChaCha8Rng, parent: &Heuristic) -> (String, SyntaxTree) {
        let binaries: Vec<NodePath> = expression_paths(&parent.tree)
            .into_iter()
            .filter(|p| node_at(&parent.tree, p).kind == NodeKind::Binary)
            .collect();
        let mut tree = parent.tree.clone();
        if let Some(path) = binaries.get(rng.random_range(0..binaries.len().max(1))) {
            let node = node_at_mut(&mut tree, path);
            let keep = node.children.swap_remove(rng.random_range(0..2));
            *node = keep;
        }
        ("A simplified version of the parent with one component removed.".into(), tree)
    }

    fn break_response(&self, rng: &mut ChaCha8Rng, desc: &str, tree: &SyntaxTree) -> String {
        let code = print(tree);
        match rng.random_range(0..5) {
            0 => format!("{desc}\n```\n{code}```\n"),
            1 => format!("<start>{desc}<end>\n{code}"),
            2 => format!("<start>{desc}<end>\n```\n```\n"),
            3 => {
                let cut = code.trim_end().trim_end_matches('}');
                format!("<start>{desc}<end>\n```\n{cut}\n```\n")
            }
            _ => {
                let mut renamed = tree.clone();
                if let Some(p) = renamed.children.iter_mut().find(|c| c.kind == NodeKind::Param) {
                    p.lexeme = Some("arg0".into());
                }
                format!("<start>{desc}<end>\n```\n{}```\n", print(&renamed))
            }
        }
    }
}

impl OffspringSource for MockGenerator {
    fn generate(&mut self, request: &OffspringRequest<'_>) -> Result<String, GeneratorError> {
        let mut rng = ChaCha8Rng::seed_from_u64(request.seed);
        Ok(self.emit(&mut rng, request.operator, request.parents))
    }
}

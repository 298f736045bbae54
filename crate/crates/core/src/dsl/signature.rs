use serde::{Deserialize, Serialize};

use super::error::SignatureError;
use super::tree::{NodeKind, SyntaxTree};
use super::value::Shape;

/// The function shape a heuristic must implement for a task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSignature {
    pub function_name: String,
    pub params: Vec<(String, Shape)>,
    pub result_shape: Shape,
}

impl TaskSignature {
    pub fn new(
        function_name: impl Into<String>,
        params: Vec<(String, Shape)>,
        result_shape: Shape,
    ) -> Result<Self, SignatureError> {
        for (i, (name, _)) in params.iter().enumerate() {
            if params[..i].iter().any(|(other, _)| other == name) {
                return Err(SignatureError(format!("duplicate parameter `{name}`")));
            }
        }
        Ok(Self {
            function_name: function_name.into(),
            params,
            result_shape,
        })
    }

    /// `score(item, bins) -> vector` for online bin packing.
    pub fn bpp() -> Self {
        Self {
            function_name: "score".into(),
            params: vec![("item".into(), Shape::Scalar), ("bins".into(), Shape::Vector)],
            result_shape: Shape::Vector,
        }
    }

    /// `update_edge_distance(edge_distance, local_opt_tour, edge_n_used) -> matrix`.
    pub fn tsp() -> Self {
        Self {
            function_name: "update_edge_distance".into(),
            params: vec![
                ("edge_distance".into(), Shape::Matrix),
                ("local_opt_tour".into(), Shape::Vector),
                ("edge_n_used".into(), Shape::Matrix),
            ],
            result_shape: Shape::Matrix,
        }
    }

    pub fn param_names(&self) -> Vec<&str> {
        self.params.iter().map(|(n, _)| n.as_str()).collect()
    }
}

/// Checks parameter count and names, and that every control path returns.
pub fn validate_signature(tree: &SyntaxTree, sig: &TaskSignature) -> Result<(), SignatureError> {
    if tree.kind != NodeKind::Program {
        return Err(SignatureError(format!("expected a Program root, found {}", tree.kind)));
    }
    let params = tree.params();
    if params.len() != sig.params.len() {
        return Err(SignatureError(format!(
            "expected {} parameters, found {}",
            sig.params.len(),
            params.len()
        )));
    }
    for (i, (found, (expected, _))) in params.iter().zip(&sig.params).enumerate() {
        if found != expected {
            return Err(SignatureError(format!(
                "parameter {} should be `{expected}`, found `{found}`",
                i + 1
            )));
        }
    }
    let body: Vec<&SyntaxTree> = tree.body().collect();
    if !always_returns(&body) {
        return Err(SignatureError(
            "not every control path ends in a return statement".into(),
        ));
    }
    Ok(())
}

fn always_returns(stmts: &[&SyntaxTree]) -> bool {
    stmts.iter().any(|s| match s.kind {
        NodeKind::Return => true,
        NodeKind::If if s.children.len() == 3 => {
            let then: Vec<&SyntaxTree> = s.children[1].children.iter().collect();
            let other: Vec<&SyntaxTree> = s.children[2].children.iter().collect();
            always_returns(&then) && always_returns(&other)
        }
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    #[test]
    fn bpp_program_matches_bpp_signature() {
        let t = parse("fn score(item, bins) { return item - bins; }").unwrap();
        validate_signature(&t, &TaskSignature::bpp()).unwrap();
        let err = validate_signature(&t, &TaskSignature::tsp()).unwrap_err();
        assert!(err.0.contains("expected 3 parameters"), "{err}");
    }

    #[test]
    fn wrong_name_is_reported() {
        let t = parse("fn score(item, caps) { return item - caps; }").unwrap();
        let err = validate_signature(&t, &TaskSignature::bpp()).unwrap_err();
        assert!(err.0.contains("`bins`"), "{err}");
    }

    #[test]
    fn return_only_inside_loop_is_rejected() {
        let t = parse("fn score(item, bins) { for i in 0..2 { return bins; } }").unwrap();
        assert!(validate_signature(&t, &TaskSignature::bpp()).is_err());
        let t = parse("fn score(item, bins) { if item > 1 { return bins; } }").unwrap();
        assert!(validate_signature(&t, &TaskSignature::bpp()).is_err());
        let t = parse(
            "fn score(item, bins) { if item > 1 { return bins; } else { return -bins; } }",
        )
        .unwrap();
        validate_signature(&t, &TaskSignature::bpp()).unwrap();
    }

    #[test]
    fn duplicate_params_rejected() {
        assert!(TaskSignature::new(
            "f",
            vec![("x".into(), Shape::Scalar), ("x".into(), Shape::Vector)],
            Shape::Scalar
        )
        .is_err());
    }
}

//! Random well-formed programs, used by property tests and the offline generator.

use rand::Rng;

use super::signature::TaskSignature;
use super::tree::{NodeKind, SyntaxTree};

const BINARY_OPS: &[&str] = &["+", "-", "*", "/", "^", "<", ">", "&&", "||"];
const UNARY_CALLS: &[&str] = &["abs", "sqrt", "log", "exp", "tanh", "floor", "ceil"];
const BINARY_CALLS: &[&str] = &["min", "max", "pow"];

/// Renders a non-negative literal so that it lexes back to the same text.
pub fn format_literal(x: f64) -> String {
    let rounded = (x.abs() * 1000.0).round() / 1000.0;
    format!("{rounded}")
}

pub fn random_literal<R: Rng + ?Sized>(rng: &mut R) -> SyntaxTree {
    let x = match rng.random_range(0..4) {
        0 => rng.random_range(1..10) as f64,
        1 => rng.random_range(0.01..1.0),
        _ => rng.random_range(0.1..10.0),
    };
    SyntaxTree::num(format_literal(x))
}

/// A random expression over `vars` no deeper than `depth`.
pub fn random_expr<R: Rng + ?Sized>(rng: &mut R, vars: &[&str], depth: usize) -> SyntaxTree {
    if depth <= 1 || rng.random_bool(0.3) {
        return if !vars.is_empty() && rng.random_bool(0.6) {
            SyntaxTree::ident(vars[rng.random_range(0..vars.len())])
        } else {
            random_literal(rng)
        };
    }
    match rng.random_range(0..10) {
        0..=5 => {
            let op = BINARY_OPS[rng.random_range(0..BINARY_OPS.len())];
            SyntaxTree::binary(
                op,
                random_expr(rng, vars, depth - 1),
                random_expr(rng, vars, depth - 1),
            )
        }
        6 => {
            let op = if rng.random_bool(0.8) { "-" } else { "!" };
            SyntaxTree::unary(op, random_expr(rng, vars, depth - 1))
        }
        7 | 8 => {
            let f = UNARY_CALLS[rng.random_range(0..UNARY_CALLS.len())];
            SyntaxTree::call(f, vec![random_expr(rng, vars, depth - 1)])
        }
        _ => {
            let f = BINARY_CALLS[rng.random_range(0..BINARY_CALLS.len())];
            SyntaxTree::call(
                f,
                vec![
                    random_expr(rng, vars, depth - 1),
                    random_expr(rng, vars, depth - 1),
                ],
            )
        }
    }
}

/// A straight-line program for `sig`: a few `let` bindings and a return.
pub fn random_program<R: Rng + ?Sized>(rng: &mut R, sig: &TaskSignature, depth: usize) -> SyntaxTree {
    let mut names: Vec<String> = sig.param_names().iter().map(|s| s.to_string()).collect();
    let mut children: Vec<SyntaxTree> = names
        .iter()
        .map(|n| SyntaxTree::leaf(NodeKind::Param, n.clone()))
        .collect();
    for k in 0..rng.random_range(0..3) {
        let vars: Vec<&str> = names.iter().map(String::as_str).collect();
        let value = random_expr(rng, &vars, depth);
        let name = format!("t{k}");
        children.push(SyntaxTree::new(NodeKind::Let, Some(name.clone()), vec![value]));
        names.push(name);
    }
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    let ret = random_expr(rng, &vars, depth);
    children.push(SyntaxTree::new(NodeKind::Return, None, vec![ret]));
    SyntaxTree::new(NodeKind::Program, Some(sig.function_name.clone()), children)
}

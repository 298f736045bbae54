//! Canonical source rendering.
//!
//! `parse(&print(t)) == t` for every tree the parser can produce; the printed
//! text doubles as the duplicate-detection key for heuristics.

use std::fmt::Write;

use super::tree::{NodeKind, SyntaxTree};

const INDENT: &str = "    ";

pub fn print(tree: &SyntaxTree) -> String {
    let mut out = String::new();
    if tree.kind == NodeKind::Program {
        let params = tree.params().join(", ");
        let _ = writeln!(out, "fn {}({params}) {{", tree.lexeme());
        for stmt in tree.body() {
            write_stmt(&mut out, stmt, 1);
        }
        out.push_str("}\n");
    } else if tree.kind.is_statement() {
        write_stmt(&mut out, tree, 0);
    } else {
        write_expr(&mut out, tree);
    }
    out
}

/// Renders a single expression without trailing newline.
pub fn print_expr(expr: &SyntaxTree) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr);
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str(INDENT);
    }
}

fn write_block(out: &mut String, block: &SyntaxTree, level: usize) {
    out.push_str("{\n");
    for stmt in &block.children {
        write_stmt(out, stmt, level + 1);
    }
    indent(out, level);
    out.push('}');
}

fn write_stmt(out: &mut String, stmt: &SyntaxTree, level: usize) {
    indent(out, level);
    let kids = &stmt.children;
    match stmt.kind {
        NodeKind::Let => {
            let _ = write!(out, "let {} = ", stmt.lexeme());
            write_expr(out, &kids[0]);
            out.push(';');
        }
        NodeKind::Assign => {
            let _ = write!(out, "{} = ", stmt.lexeme());
            write_expr(out, &kids[0]);
            out.push(';');
        }
        NodeKind::IndexAssign => {
            let (value, indices) = kids.split_last().expect("index assignment has a value");
            out.push_str(stmt.lexeme());
            write_subscripts(out, indices);
            out.push_str(" = ");
            write_expr(out, value);
            out.push(';');
        }
        NodeKind::Return => {
            out.push_str("return ");
            write_expr(out, &kids[0]);
            out.push(';');
        }
        NodeKind::For => {
            let _ = write!(out, "for {} in ", stmt.lexeme());
            write_operand(out, &kids[0], 5);
            out.push_str("..");
            write_operand(out, &kids[1], 5);
            out.push(' ');
            write_block(out, &kids[2], level);
        }
        NodeKind::If => {
            out.push_str("if ");
            write_expr(out, &kids[0]);
            out.push(' ');
            write_block(out, &kids[1], level);
            if let Some(other) = kids.get(2) {
                out.push_str(" else ");
                write_block(out, other, level);
            }
        }
        _ => write_expr(out, stmt),
    }
    out.push('\n');
}

fn write_subscripts(out: &mut String, indices: &[SyntaxTree]) {
    out.push('[');
    for (i, idx) in indices.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, idx);
    }
    out.push(']');
}

fn precedence(node: &SyntaxTree) -> u8 {
    match node.kind {
        NodeKind::Binary => match node.lexeme() {
            "||" => 1,
            "&&" => 2,
            "<" | "<=" | ">" | ">=" | "==" | "!=" => 3,
            "+" | "-" => 4,
            "*" | "/" | "%" => 5,
            _ => 6,
        },
        NodeKind::Unary => 7,
        _ => 8,
    }
}

// Range bounds are parsed as full expressions, but a bare `..` after a
// comparison would read oddly, so anything looser than `*` gets parentheses.
fn write_operand(out: &mut String, node: &SyntaxTree, min_prec: u8) {
    if precedence(node) < min_prec {
        out.push('(');
        write_expr(out, node);
        out.push(')');
    } else {
        write_expr(out, node);
    }
}

fn write_expr(out: &mut String, node: &SyntaxTree) {
    let kids = &node.children;
    match node.kind {
        NodeKind::NumLit | NodeKind::Ident => out.push_str(node.lexeme()),
        NodeKind::Call => {
            out.push_str(node.lexeme());
            out.push('(');
            for (i, arg) in kids.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, arg);
            }
            out.push(')');
        }
        NodeKind::Index => {
            write_expr(out, &kids[0]);
            write_subscripts(out, &kids[1..]);
        }
        NodeKind::Unary => {
            out.push_str(node.lexeme());
            // `- -x` must not lex as something else, and `-x^2` parses as `(-x)^2`
            write_operand(out, &kids[0], 7);
        }
        NodeKind::Binary => {
            let prec = precedence(node);
            let op = node.lexeme();
            if op == "^" {
                // right-associative, and the base must be unary or tighter
                write_operand(out, &kids[0], 7);
                let _ = write!(out, " {op} ");
                write_operand(out, &kids[1], 6);
            } else {
                write_operand(out, &kids[0], prec);
                let _ = write!(out, " {op} ");
                write_operand(out, &kids[1], prec + 1);
            }
        }
        _ => {
            // statements are not valid inside expressions; render them anyway
            let _ = write!(out, "{}", node.kind);
        }
    }
}

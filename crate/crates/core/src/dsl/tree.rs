//! Labeled ordered syntax trees.
//!
//! Every heuristic is held as a [`SyntaxTree`]: a node label, an optional
//! lexeme (identifier, literal text, operator symbol or builtin name) and an
//! ordered list of children. The same tree drives execution, pretty-printing
//! and subtree-based similarity.

use std::collections::BTreeMap;
use std::fmt;

/// Node labels of the heuristic language.
///
/// `Block` wraps the body of `for` and the branches of `if` so that the
/// branch boundary is recoverable from the child list alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Program,
    Param,
    Let,
    Assign,
    IndexAssign,
    For,
    If,
    Block,
    Return,
    Binary,
    Unary,
    Call,
    Index,
    Ident,
    NumLit,
}

impl NodeKind {
    pub fn label(self) -> &'static str {
        match self {
            NodeKind::Program => "Program",
            NodeKind::Param => "Param",
            NodeKind::Let => "Let",
            NodeKind::Assign => "Assign",
            NodeKind::IndexAssign => "IndexAssign",
            NodeKind::For => "For",
            NodeKind::If => "If",
            NodeKind::Block => "Block",
            NodeKind::Return => "Return",
            NodeKind::Binary => "Binary",
            NodeKind::Unary => "Unary",
            NodeKind::Call => "Call",
            NodeKind::Index => "Index",
            NodeKind::Ident => "Ident",
            NodeKind::NumLit => "NumLit",
        }
    }

    pub fn is_statement(self) -> bool {
        matches!(
            self,
            NodeKind::Let
                | NodeKind::Assign
                | NodeKind::IndexAssign
                | NodeKind::For
                | NodeKind::If
                | NodeKind::Return
        )
    }

    pub fn is_expression(self) -> bool {
        matches!(
            self,
            NodeKind::Binary
                | NodeKind::Unary
                | NodeKind::Call
                | NodeKind::Index
                | NodeKind::Ident
                | NodeKind::NumLit
        )
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A node of a heuristic's syntax tree. Trees are immutable once built by
/// the parser; mutation operators build new trees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SyntaxTree {
    pub kind: NodeKind,
    pub lexeme: Option<String>,
    pub children: Vec<SyntaxTree>,
}

impl SyntaxTree {
    pub fn new(kind: NodeKind, lexeme: Option<String>, children: Vec<SyntaxTree>) -> Self {
        Self {
            kind,
            lexeme,
            children,
        }
    }

    pub fn leaf(kind: NodeKind, lexeme: impl Into<String>) -> Self {
        Self::new(kind, Some(lexeme.into()), Vec::new())
    }

    pub fn ident(name: impl Into<String>) -> Self {
        Self::leaf(NodeKind::Ident, name)
    }

    pub fn num(text: impl Into<String>) -> Self {
        Self::leaf(NodeKind::NumLit, text)
    }

    pub fn binary(op: &str, lhs: SyntaxTree, rhs: SyntaxTree) -> Self {
        Self::new(NodeKind::Binary, Some(op.to_string()), vec![lhs, rhs])
    }

    pub fn unary(op: &str, operand: SyntaxTree) -> Self {
        Self::new(NodeKind::Unary, Some(op.to_string()), vec![operand])
    }

    pub fn call(name: &str, args: Vec<SyntaxTree>) -> Self {
        Self::new(NodeKind::Call, Some(name.to_string()), args)
    }

    pub fn lexeme(&self) -> &str {
        self.lexeme.as_deref().unwrap_or("")
    }

    /// Number of nodes in the tree.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(SyntaxTree::node_count).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(SyntaxTree::depth).max().unwrap_or(0)
    }

    /// Pre-order traversal.
    pub fn walk(&self, visit: &mut impl FnMut(&SyntaxTree)) {
        visit(self);
        for child in &self.children {
            child.walk(visit);
        }
    }

    /// Parameter names of a `Program` root, in declaration order.
    pub fn params(&self) -> Vec<&str> {
        self.children
            .iter()
            .filter(|c| c.kind == NodeKind::Param)
            .map(SyntaxTree::lexeme)
            .collect()
    }

    /// Top-level statements of a `Program` root.
    pub fn body(&self) -> impl Iterator<Item = &SyntaxTree> {
        self.children.iter().filter(|c| c.kind != NodeKind::Param)
    }

    /// Canonical serialization of the complete subtree rooted here:
    /// `Kind(lexeme)[child,child,...]`, with the lexeme part omitted when
    /// absent and the bracket part omitted for leaves.
    pub fn canonical_key(&self) -> String {
        let mut out = String::new();
        self.write_key(&mut out);
        out
    }

    fn write_key(&self, out: &mut String) {
        out.push_str(self.kind.label());
        if let Some(lexeme) = &self.lexeme {
            out.push('(');
            out.push_str(lexeme);
            out.push(')');
        }
        if !self.children.is_empty() {
            out.push('[');
            for (i, child) in self.children.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                child.write_key(out);
            }
            out.push(']');
        }
    }
}

/// Multiset of canonical subtree keys of one tree, one entry per node.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubtreeProfile {
    counts: BTreeMap<String, usize>,
    nodes: usize,
}

impl SubtreeProfile {
    pub fn counts(&self) -> &BTreeMap<String, usize> {
        &self.counts
    }

    /// Total multiplicity, equal to the node count of the source tree.
    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn count(&self, key: &str) -> usize {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }
}

/// Collects the canonical key of every subtree of `tree`.
pub fn count_subtrees(tree: &SyntaxTree) -> SubtreeProfile {
    let mut profile = SubtreeProfile::default();
    collect_keys(tree, &mut profile);
    profile
}

// Post-order so each parent key is assembled from already-built child keys.
fn collect_keys(node: &SyntaxTree, profile: &mut SubtreeProfile) -> String {
    let child_keys: Vec<String> = node
        .children
        .iter()
        .map(|c| collect_keys(c, profile))
        .collect();
    let mut key = String::from(node.kind.label());
    if let Some(lexeme) = &node.lexeme {
        key.push('(');
        key.push_str(lexeme);
        key.push(')');
    }
    if !child_keys.is_empty() {
        key.push('[');
        key.push_str(&child_keys.join(","));
        key.push(']');
    }
    *profile.counts.entry(key.clone()).or_insert(0) += 1;
    profile.nodes += 1;
    key
}

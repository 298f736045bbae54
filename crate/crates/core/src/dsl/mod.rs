//! The heuristic language: parsing, printing, execution and subtree profiles.

mod error;
pub mod generate;
mod interp;
mod lexer;
mod parser;
mod printer;
mod signature;
mod tree;
mod value;

pub use error::{ExecError, ParseError, SignatureError};
pub use interp::{execute, is_elementwise, CompiledProgram, ExecLimits, Execution, BUILTINS};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;
pub use printer::{print, print_expr};
pub use signature::{validate_signature, TaskSignature};
pub use tree::{count_subtrees, NodeKind, SubtreeProfile, SyntaxTree};
pub use value::{Matrix, Shape, Value, MAX_ELEMENTS};

//! Lexing, parsing and printing of W source files.
//!
//! A source file holds one `func main() { ... }` followed by an
//! `assert` clause written as an s-expression over the program variables
//! at `main_end`.

mod assertion;
mod lexer;
mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

use crate::ast::Program;

pub use printer::pretty_print;

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrontendError {
    #[error("{pos}: syntax error: expected {expected}, found {found}")]
    Syntax {
        pos: Pos,
        expected: String,
        found: String,
    },
    #[error("{pos}: sort error: {message}")]
    Sort { pos: Pos, message: String },
    #[error("{pos}: scope error: `{name}`: {message}")]
    Scope {
        pos: Pos,
        name: String,
        message: String,
    },
    #[error("{pos}: cannot assign to const variable `{name}`")]
    Mutability { pos: Pos, name: String },
}

impl FrontendError {
    pub fn pos(&self) -> Pos {
        match self {
            FrontendError::Syntax { pos, .. }
            | FrontendError::Sort { pos, .. }
            | FrontendError::Scope { pos, .. }
            | FrontendError::Mutability { pos, .. } => *pos,
        }
    }
}

const KEYWORDS: &[&str] = &[
    "func", "main", "const", "Int", "skip", "if", "else", "while", "assert", "true", "false",
    "length",
];

/// Names that would collide with generated symbols, the assertion
/// language, or symbols predefined by SMT-LIB logics.
const RESERVED: &[&str] = &[
    "l_end", "main_end", "Reach", "zero", "suc", "pred", "leqNat", "Nat", "Time", "Bool", "and",
    "or", "not", "forall", "exists", "distinct", "ite", "let", "xor", "par", "as", "match",
    "Real", "Array", "select", "store", "div", "mod", "abs", "to_real", "to_int", "is_int",
];

/// True if `name` cannot be used as a program variable or bound variable.
pub fn is_reserved(name: &str) -> bool {
    if KEYWORDS.contains(&name) || RESERVED.contains(&name) || name.ends_with("_length") {
        return true;
    }
    for prefix in ["l", "n", "it"] {
        if let Some(rest) = name.strip_prefix(prefix) {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                return true;
            }
        }
    }
    false
}

/// Parses a W source file with its trailing assertion.
pub fn parse_program(source: &str) -> Result<Program, FrontendError> {
    parser::Parser::new(source)?.program()
}

//! Lexing, parsing and structural fingerprinting of single Java methods.

pub mod ast;
mod fingerprint;
mod parser;
pub mod token;

pub use ast::SyntaxTree;
pub use fingerprint::{shape_fingerprint, shape_fingerprint_with, Fingerprint};
pub use parser::{parse_method, ParseFailure, ParseOutcome};
pub use token::{tokenize, Span, Token, TokenKind};

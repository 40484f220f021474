//! Lexing, parsing and elaboration of benchmark files.

pub mod ast;
pub mod diagnostic;
pub mod elaborate;
pub mod lexer;
pub mod parser;

pub use ast::{Interface, ParsedProgram};
pub use diagnostic::{Code, Diagnostic, Diagnostics};
pub use elaborate::{elaborate, load, parse_predicate, ElabOptions};
pub use parser::{parse_expr, parse_interface, parse_program};

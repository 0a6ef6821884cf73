//! Per-file source model: a tolerant parser for the Java subset the
//! analysis needs, and scoped symbol lookup over it.

mod ast;
mod lexer;
mod parser;
mod scope;

pub use ast::*;
pub use lexer::decode_escapes;
pub use parser::{parse_bytes, parse_unit};
pub use scope::{build_scope, build_type_scope, Assignment, DeclKind, Declaration, Invocation, Scope};

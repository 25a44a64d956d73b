//! SL frontend: lexer, parser, resolver, and pretty-printer.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod resolver;
pub mod token;

pub use ast::{
    Binding, BinOpKind, CaptureSource, Expr, ExprKind, FnDef, FnDefId, Ident, Literal, Program,
    SiteId, Stmt, StmtKind, UnOpKind,
};
pub use lexer::{tokenize, LexError};
pub use parser::{parse, parse_source, ParseError};
pub use printer::print_program;
pub use resolver::{resolve, ResolveError};
pub use token::{SourceSpan, Token, TokenKind};

/// Parse and resolve in one step.
pub fn load_program(source: &str) -> Result<Program, FrontendError> {
    let program = parse_source(source)?;
    Ok(resolve(program)?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum FrontendError {
    Parse(ParseError),
    Resolve(ResolveError),
}

impl std::fmt::Display for FrontendError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FrontendError::Parse(e) => e.fmt(f),
            FrontendError::Resolve(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for FrontendError {}

impl From<ParseError> for FrontendError {
    fn from(e: ParseError) -> Self {
        FrontendError::Parse(e)
    }
}

impl From<ResolveError> for FrontendError {
    fn from(e: ResolveError) -> Self {
        FrontendError::Resolve(e)
    }
}

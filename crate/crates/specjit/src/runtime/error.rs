//! Typed runtime errors carrying the offending source span when known.

use crate::frontend::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RtErrorKind {
    TypeMismatch,
    ShapeMismatch,
    UnknownAttr,
    IndexOutOfRange,
    DivByZero,
    AssertStmtFailed,
    UnknownBuiltin,
    NegativeRange,
    Arity,
    UnboundLocal,
    RecursionLimit,
    FrameDepth,
}

impl RtErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            RtErrorKind::TypeMismatch => "type mismatch",
            RtErrorKind::ShapeMismatch => "shape mismatch",
            RtErrorKind::UnknownAttr => "unknown attribute",
            RtErrorKind::IndexOutOfRange => "index out of range",
            RtErrorKind::DivByZero => "division by zero",
            RtErrorKind::AssertStmtFailed => "assertion failed",
            RtErrorKind::UnknownBuiltin => "unknown builtin",
            RtErrorKind::NegativeRange => "negative range",
            RtErrorKind::Arity => "arity mismatch",
            RtErrorKind::UnboundLocal => "unbound local",
            RtErrorKind::RecursionLimit => "recursion limit exceeded",
            RtErrorKind::FrameDepth => "loop nesting limit exceeded",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RtError {
    pub kind: RtErrorKind,
    pub message: String,
    pub span: Option<SourceSpan>,
}

impl RtError {
    pub fn new(kind: RtErrorKind, message: impl Into<String>) -> RtError {
        RtError { kind, message: message.into(), span: None }
    }

    pub fn with_span(mut self, span: SourceSpan) -> RtError {
        if self.span.is_none() {
            self.span = Some(span);
        }
        self
    }
}

impl std::fmt::Display for RtError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.span {
            Some(span) => write!(f, "runtime error at {}: {}: {}", span, self.kind.name(), self.message),
            None => write!(f, "runtime error: {}: {}", self.kind.name(), self.message),
        }
    }
}

impl std::error::Error for RtError {}

//! The `.game` text format: parser with positioned diagnostics and a
//! canonical serializer.
//!
//! ```text
//! param v = 2
//! game dollar {
//!   prefer min
//!   node A: Alice { l -> B, r -> LA }
//!   node B: Bob { l -> A @ k + 1, r -> LB }
//!   leaf LA: { Alice = k + v, Bob = k }
//!   leaf LB: { Alice = k + 1, Bob = k + v }
//!   root A
//! }
//! profile dolAsBc on dollar { A: r B: l }
//! ```

mod lexer;
mod parser;
mod write;

use std::fmt;

use serde::Serialize;

pub use parser::parse_with_warnings;
pub use write::serialize;

use crate::graph::Severity;
use crate::model::Model;

/// Position of a piece of input: byte offset, 1-based line and column
/// (columns count bytes), and length in bytes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Span {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: &'static str,
    pub severity: Severity,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(code: &'static str, message: impl Into<String>, span: Span) -> Self {
        Diagnostic { code, severity: Severity::Error, message: message.into(), span }
    }

    pub fn warning(code: &'static str, message: impl Into<String>, span: Span) -> Self {
        Diagnostic { code, severity: Severity::Warning, message: message.into(), span }
    }

    /// The diagnostic with the offending source line and a caret marker.
    pub fn render(&self, src: &str, path: &str) -> String {
        let line = src.lines().nth(self.span.line.saturating_sub(1)).unwrap_or("");
        let pad = " ".repeat(self.span.column.saturating_sub(1));
        let marks = "^".repeat(self.span.length.max(1));
        format!("{self}\n  --> {path}:{}:{}\n   | {line}\n   | {pad}{marks}", self.span.line, self.span.column)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}[{}]: {}", self.code, self.message)
    }
}

/// Parses a model, dropping warnings.
pub fn parse(src: &str) -> Result<Model, Vec<Diagnostic>> {
    parse_with_warnings(src).map(|(m, _)| m)
}

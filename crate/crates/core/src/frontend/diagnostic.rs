use std::fmt;

use crate::lang::{Span, TypeErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// What went wrong, for callers that need to branch on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Code {
    Syntax,
    MissingModule,
    MissingSpec,
    UnboundOperation,
    Duplicate,
    Type(TypeErrorKind),
    InterfaceMismatch,
    Eval,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub span: Span,
    pub message: String,
    pub hint: Option<String>,
}

impl Diagnostic {
    pub fn error(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, code, span, message: message.into(), hint: None }
    }

    pub fn with_hint(mut self, hint: impl Into<String>) -> Self {
        self.hint = Some(hint.into());
        self
    }

    /// Formats the diagnostic with the offending source line underneath.
    pub fn render(&self, path: &str, src: &str) -> String {
        let mut out = format!("{path}:{}:{}: {self}\n", self.span.start.0, self.span.start.1);
        let line_no = self.span.start.0 as usize;
        if let Some(line) = src.lines().nth(line_no.saturating_sub(1)) {
            out.push_str(&format!("  | {line}\n"));
            let start = self.span.start.1.max(1) as usize;
            let width = if self.span.end.0 == self.span.start.0 {
                (self.span.end.1 as usize).saturating_sub(start).max(1)
            } else {
                1
            };
            out.push_str(&format!("  | {}{}\n", " ".repeat(start - 1), "^".repeat(width)));
        }
        out
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}: {}", self.message)?;
        if let Some(h) = &self.hint {
            write!(f, " (hint: {h})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl Diagnostics {
    pub fn first(&self) -> &Diagnostic {
        &self.0[0]
    }

    pub fn render(&self, path: &str, src: &str) -> String {
        self.0.iter().map(|d| d.render(path, src)).collect()
    }
}

impl From<Diagnostic> for Diagnostics {
    fn from(d: Diagnostic) -> Self {
        Diagnostics(vec![d])
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {d}", d.span)?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostics {}

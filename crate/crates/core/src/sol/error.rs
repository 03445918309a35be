use thiserror::Error;

use super::ast::Span;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolError {
    #[error("{message}")]
    Lex { span: Span, message: String },

    #[error("expected {}, found {found}", expected.join(" or "))]
    Parse { span: Span, expected: Vec<String>, found: String },

    #[error("{message}")]
    Unsupported { span: Span, message: String },

    #[error("multiple contracts in one file (second is `{name}`)")]
    MultipleContracts { span: Span, name: String },

    #[error("no contract declaration found")]
    NoContract { span: Span },
}

impl SolError {
    pub fn span(&self) -> Span {
        match self {
            SolError::Lex { span, .. }
            | SolError::Parse { span, .. }
            | SolError::Unsupported { span, .. }
            | SolError::MultipleContracts { span, .. }
            | SolError::NoContract { span } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("unresolved name `{name}`")]
    UnresolvedName { span: Span, name: String },

    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { span: Span, expected: String, found: String },

    #[error("unsupported construct: {construct}")]
    UnsupportedConstruct { span: Span, construct: String },

    #[error("duplicate declaration of `{name}`")]
    DuplicateName { span: Span, name: String },
}

impl ValidationError {
    pub fn span(&self) -> Span {
        match self {
            ValidationError::UnresolvedName { span, .. }
            | ValidationError::TypeMismatch { span, .. }
            | ValidationError::UnsupportedConstruct { span, .. }
            | ValidationError::DuplicateName { span, .. } => *span,
        }
    }
}

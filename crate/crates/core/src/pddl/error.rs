use thiserror::Error;

use super::ast::{Ident, ObjectName, PredicateName, TypeName, VarName};

/// A parse or validation diagnostic with its source position.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn at(line: u32, col: u32, kind: ParseErrorKind) -> ParseError {
        ParseError { line, col, kind }
    }

    /// For diagnostics raised outside a source file (programmatic
    /// construction); position 0:0 marks them.
    pub fn internal(kind: ParseErrorKind) -> ParseError {
        ParseError { line: 0, col: 0, kind }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("lexical error: {0}")]
    Lexical(String),
    #[error("expected {expected}, found {found}")]
    UnexpectedToken { expected: String, found: String },
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEof(String),
    #[error("unsupported requirement {0}")]
    UnsupportedRequirement(String),
    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),
    #[error("negative preconditions are not supported; use a complementary predicate")]
    NegativePrecondition,
    #[error("invalid identifier: {0}")]
    InvalidIdentifier(String),
    #[error("unknown type `{0}`")]
    UnknownType(TypeName),
    #[error("undeclared predicate `{0}`")]
    UnknownPredicate(PredicateName),
    #[error("unknown object `{0}`")]
    UnknownObject(ObjectName),
    #[error("arity mismatch for predicate `{predicate}`: expected {expected} arguments, found {found}")]
    ArityMismatch {
        predicate: PredicateName,
        expected: usize,
        found: usize,
    },
    #[error("unbound variable `?{0}`")]
    UnboundVariable(VarName),
    #[error("ill-typed atom {atom}: argument `{argument}` has type `{found}`, expected `{expected}`")]
    IllTypedAtom {
        atom: String,
        argument: Ident,
        expected: TypeName,
        found: TypeName,
    },
    #[error("duplicate declaration of {0}")]
    DuplicateName(String),
    #[error("goal must contain at least one atom")]
    EmptyGoal,
    #[error("problem references domain `{expected}`, but domain `{found}` was supplied")]
    DomainMismatch { expected: Ident, found: Ident },
    #[error("mutex pair ({first}, {second}) requires identical predicate signatures")]
    MutexSignatureMismatch {
        first: PredicateName,
        second: PredicateName,
    },
    #[error("type tree error: {0}")]
    TypeTree(String),
}

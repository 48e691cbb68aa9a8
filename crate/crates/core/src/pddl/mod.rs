//! PDDL frontend for the STRIPS + typing + action-costs subset.
//!
//! The grammar accepted here is documented in `docs/pddl-subset.md`. Parsed
//! structures are immutable after construction; the parser is a pure function
//! of its input and every diagnostic carries a source position.

mod ast;
mod emit;
mod error;
mod lexer;
mod parser;

pub use ast::{
    ActionSchema, Atom, Ident, LiftedAtom, ObjectName, PlanningDomain, PlanningProblem,
    PredicateDecl, PredicateName, Requirement, Term, TypeName, TypeTree, VarName,
};
pub use emit::{emit_domain, emit_problem};
pub use error::{ParseError, ParseErrorKind};
pub use parser::{parse_atom, parse_domain, parse_problem};

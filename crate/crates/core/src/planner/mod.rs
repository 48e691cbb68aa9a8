//! Grounding, STRIPS transition semantics, plan validation, search and
//! unsolvability proofs.
//!
//! A [`GroundTask`] is immutable after grounding and shareable across
//! threads; each search owns its private open/closed structures, so multiple
//! searches over the same task may run in parallel with no coordination.

pub mod ground;
pub mod plan;
pub mod relaxation;
pub mod search;
pub mod state;
pub mod unsolvable;

pub use ground::{ground, AtomId, GroundAction, GroundConfig, GroundError, GroundTask};
pub use plan::{format_plan, parse_plan, validate_plan, validate_plan_from, Plan, PlanIoError, PlanVerdict};
pub use search::{solve, solve_from, SearchBudget, SolveMode, SolveOutcome};
pub use state::{apply, apply_seq, satisfies, State};
pub use unsolvable::{prove_unsolvable, prove_unsolvable_from, UnsolvabilityCertificate, UnsolvabilityVerdict};

//! Guided-demonstration engine for learning-from-demonstration task planning.
//!
//! Given a robot's action model and an unsolvable task, this crate finds the
//! minimal initial-state edit (the "excuse") that restores solvability, guides
//! a demonstrator to negate only that excuse, learns new operators from the
//! demonstration, merges them into the robot's domain, and scores the result.
//!
//! The pipeline is split into five modules:
//!
//! - [`pddl`] — parser/emitter for the STRIPS+typing PDDL subset
//! - [`planner`] — grounding, transition semantics, search, unsolvability proofs
//! - [`excuse`] — model-space search over initial-state edits
//! - [`demo`] — demonstration traces, operator learning, domain merging
//! - [`metrics`] — effectiveness measures over demonstration artifacts

pub mod demo;
pub mod excuse;
pub mod metrics;
pub mod pddl;
pub mod planner;

pub use pddl::{Atom, PlanningDomain, PlanningProblem};
pub use planner::{GroundTask, Plan};

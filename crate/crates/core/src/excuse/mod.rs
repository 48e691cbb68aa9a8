//! Model-space search over initial-state edits.
//!
//! An excuse is a symmetric-difference edit to the initial state that leaves
//! the goal unmodeled yet makes the task solvable. The search walks edit sets
//! in breadth-first layers of increasing move count, so the first acceptance
//! is minimal by construction. Candidate solvability checks within one layer
//! are independent; with the `parallel` feature they run on a rayon pool, and
//! acceptance is committed in canonical candidate order either way, so the
//! result is identical under both strategies.

mod generate;
mod moves;
mod rank;
mod render;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::pddl::Atom;
use crate::planner::{Plan, SearchBudget};

pub use generate::{
    enumerate_minimal_excuses, generate_excuse, validate_excuse, verify_minimality,
    EnumerateOutcome, ExcuseOutcome, ExcuseValidity, MinimalityVerdict, SearchDiagnostics,
};
pub use moves::{move_universe, EditMove};
pub use rank::{rank_excuses, RankedExcuse};
pub use render::{render_excuse, RenderStyle};

/// How candidate solvability checks within a layer are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalStrategy {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for EvalStrategy {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        EvalStrategy::Parallel
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        EvalStrategy::Sequential
    }
}

/// Configuration of the edit-set search.
#[derive(Clone, Debug)]
pub struct ExcuseSearchConfig {
    /// Largest edit set explored, in moves.
    pub max_edit_size: usize,
    /// Collect every excuse of the minimal size instead of stopping at the
    /// first solution.
    pub enumerate_all: bool,
    /// Restrict edit candidates to these fluents; `None` means every ground
    /// atom of a predicate that occurs in some effect.
    pub candidate_fluents: Option<BTreeSet<Atom>>,
    /// Search budget for each candidate solvability check.
    pub solvability_budget: SearchBudget,
    pub strategy: EvalStrategy,
}

impl Default for ExcuseSearchConfig {
    fn default() -> Self {
        ExcuseSearchConfig {
            max_edit_size: 4,
            enumerate_all: false,
            candidate_fluents: None,
            solvability_budget: SearchBudget::default(),
            strategy: EvalStrategy::default(),
        }
    }
}

/// A validated initial-state edit with its solvability witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Excuse {
    /// Atoms in I' but not I.
    pub adds: BTreeSet<Atom>,
    /// Atoms in I but not I'.
    pub removes: BTreeSet<Atom>,
    /// Edit size counted in moves: a declared complementary pair flips as one.
    pub size_moves: usize,
    /// Edit size counted in raw symmetric-difference elements.
    pub size_raw: usize,
    /// Plan solving the task from the edited initial state.
    pub witness: Plan,
    /// True when the edit adds some goal atom (allowed, but surfaced because
    /// only full goal modeling is excluded).
    pub adds_goal_atoms: bool,
}

impl Excuse {
    /// Canonical ordering key used for deterministic tie-breaking.
    pub fn canonical_key(&self) -> (Vec<Atom>, Vec<Atom>) {
        (
            self.removes.iter().cloned().collect(),
            self.adds.iter().cloned().collect(),
        )
    }

    pub fn report(&self, task: &crate::planner::GroundTask) -> ExcuseReport {
        ExcuseReport {
            adds: self.adds.iter().map(|a| a.to_string()).collect(),
            removes: self.removes.iter().map(|a| a.to_string()).collect(),
            size_moves: self.size_moves,
            size_raw: self.size_raw,
            rendered: render_excuse(self, RenderStyle::PositiveOnly),
            witness_plan: self.witness.action_lines(task),
            adds_goal_atoms: self.adds_goal_atoms,
        }
    }
}

impl PartialOrd for Excuse {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Excuse {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical_key().cmp(&other.canonical_key())
    }
}

/// Structured excuse report consumed by the CLI and the metrics module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcuseReport {
    pub adds: Vec<String>,
    pub removes: Vec<String>,
    pub size_moves: usize,
    pub size_raw: usize,
    pub rendered: String,
    pub witness_plan: Vec<String>,
    pub adds_goal_atoms: bool,
}

use crate::pddl::Atom;

use super::ground::GroundTask;
use super::plan::Plan;
use super::relaxation::{Relaxation, INFINITY};
use super::search::{solve_from, SearchBudget, SolveMode, SolveOutcome};
use super::state::State;

/// Evidence that a task was proved unsolvable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnsolvabilityCertificate {
    /// These goal atoms are unreachable even ignoring delete effects.
    UnreachableGoalAtoms(Vec<Atom>),
    /// The whole reachable state space was enumerated without reaching the
    /// goal.
    ExhaustedStateSpace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnsolvabilityVerdict {
    ProvenUnsolvable(UnsolvabilityCertificate),
    Solvable(Plan),
    /// Only returned on budget exhaustion.
    Unknown,
}

pub fn prove_unsolvable(task: &GroundTask, budget: &SearchBudget) -> UnsolvabilityVerdict {
    prove_unsolvable_from(task, &task.init, budget)
}

/// Two-stage proof: a delete-relaxation reachability fixpoint first (sound
/// but incomplete, with the unreached goal atoms as certificate), then an
/// exhaustive optimal search, which is complete at desk scale.
pub fn prove_unsolvable_from(
    task: &GroundTask,
    start: &State,
    budget: &SearchBudget,
) -> UnsolvabilityVerdict {
    let relax = Relaxation::compute(task, start);
    let unreached: Vec<Atom> = task
        .goal_atoms
        .iter()
        .filter(|&&g| relax.hmax[g] == INFINITY)
        .map(|&g| task.atom(g).clone())
        .collect();
    if !unreached.is_empty() {
        return UnsolvabilityVerdict::ProvenUnsolvable(
            UnsolvabilityCertificate::UnreachableGoalAtoms(unreached),
        );
    }
    match solve_from(task, start, &task.goal_atoms, SolveMode::Optimal, budget) {
        SolveOutcome::Plan(plan) => UnsolvabilityVerdict::Solvable(plan),
        SolveOutcome::Unsolvable => UnsolvabilityVerdict::ProvenUnsolvable(
            UnsolvabilityCertificate::ExhaustedStateSpace,
        ),
        SolveOutcome::BudgetExceeded => UnsolvabilityVerdict::Unknown,
    }
}

use crate::planner::{solve_from, GroundTask, SearchBudget, SolveMode, SolveOutcome};

use super::Excuse;

/// An excuse scored by the demonstration it would ask of the human.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedExcuse {
    pub excuse: Excuse,
    /// Optimal human plan length to reach the excuse's added atoms from the
    /// original initial state; `None` when the human cannot reach them.
    pub predicted_demo_len: Option<usize>,
    pub human_unreachable: bool,
}

/// Ranks excuses of equal size by the length of the demonstration each would
/// require in the human model (shorter first). Excuses whose guidance goal is
/// unreachable for the human rank last and are flagged. Ties break on the
/// canonical excuse order.
pub fn rank_excuses(human_task: &GroundTask, excuses: &[Excuse]) -> Vec<RankedExcuse> {
    let mut ranked: Vec<RankedExcuse> = excuses
        .iter()
        .map(|excuse| {
            let goal: Option<Vec<usize>> = excuse
                .adds
                .iter()
                .map(|a| human_task.atom_id(a))
                .collect();
            let predicted = goal.and_then(|goal| {
                match solve_from(
                    human_task,
                    &human_task.init,
                    &goal,
                    SolveMode::Optimal,
                    &SearchBudget::default(),
                ) {
                    SolveOutcome::Plan(plan) => Some(plan.len()),
                    _ => None,
                }
            });
            RankedExcuse {
                excuse: excuse.clone(),
                human_unreachable: predicted.is_none(),
                predicted_demo_len: predicted,
            }
        })
        .collect();
    ranked.sort_by(|a, b| {
        let ka = (a.predicted_demo_len.is_none(), a.predicted_demo_len, a.excuse.canonical_key());
        let kb = (b.predicted_demo_len.is_none(), b.predicted_demo_len, b.excuse.canonical_key());
        ka.cmp(&kb)
    });
    ranked
}

use itertools::Itertools;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::planner::{
    prove_unsolvable_from, satisfies, solve, solve_from, validate_plan_from, GroundTask, Plan,
    PlanVerdict, SearchBudget, SolveMode, SolveOutcome, State, UnsolvabilityVerdict,
};

use super::moves::{move_universe, EditMove};
use super::{EvalStrategy, Excuse, ExcuseSearchConfig};

/// Candidates are evaluated in fixed-size slices so that parallel and
/// sequential strategies visit exactly the same prefix of the layer.
const SLICE: usize = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchDiagnostics {
    pub candidates_tried: usize,
    pub goal_modeling_rejections: usize,
    pub budget_failures: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExcuseOutcome {
    Excuse(Excuse, SearchDiagnostics),
    NoExcuseWithinBound(SearchDiagnostics),
    TaskAlreadySolvable(Plan),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnumerateOutcome {
    Excuses(Vec<Excuse>, SearchDiagnostics),
    NoExcuseWithinBound(SearchDiagnostics),
    TaskAlreadySolvable(Plan),
}

impl EnumerateOutcome {
    /// The enumerated excuses; empty when the task was already solvable or
    /// nothing fit within the bound.
    pub fn excuses(self) -> Vec<Excuse> {
        match self {
            EnumerateOutcome::Excuses(v, _) => v,
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExcuseValidity {
    Valid,
    /// The edited state models the goal, which Definition-level excuses
    /// exclude.
    ModelsGoal,
    StillUnsolvable,
    MalformedEdit(String),
    /// Solvability could not be settled within the budget.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinimalityVerdict {
    Minimal,
    SmallerExcuseExists(Excuse),
    /// Some smaller-layer candidate exhausted its budget and no smaller
    /// excuse was found, so minimality is unsettled.
    Unknown,
}

enum CandidateVerdict {
    Valid(Plan),
    ModelsGoal,
    Unsolvable,
    Budget,
}

fn eval_candidate(
    task: &GroundTask,
    universe: &[EditMove],
    combo: &[usize],
    cfg: &ExcuseSearchConfig,
) -> CandidateVerdict {
    let mut state: State = task.init.clone();
    for &m in combo {
        universe[m].apply_to(&mut state);
    }
    if satisfies(&state, &task.goal_atoms) {
        return CandidateVerdict::ModelsGoal;
    }
    match solve_from(task, &state, &task.goal_atoms, SolveMode::Satisficing, &cfg.solvability_budget)
    {
        SolveOutcome::Plan(plan) => CandidateVerdict::Valid(plan),
        SolveOutcome::Unsolvable => CandidateVerdict::Unsolvable,
        SolveOutcome::BudgetExceeded => CandidateVerdict::Budget,
    }
}

fn build_excuse(task: &GroundTask, universe: &[EditMove], combo: &[usize], witness: Plan) -> Excuse {
    let mut adds = std::collections::BTreeSet::new();
    let mut removes = std::collections::BTreeSet::new();
    let mut raw = 0usize;
    for &m in combo {
        raw += universe[m].raw_size();
        match universe[m] {
            EditMove::Add(a) => {
                adds.insert(task.atom(a).clone());
            }
            EditMove::Remove(r) => {
                removes.insert(task.atom(r).clone());
            }
            EditMove::Flip { remove, add } => {
                removes.insert(task.atom(remove).clone());
                adds.insert(task.atom(add).clone());
            }
        }
    }
    let goal_atoms: std::collections::BTreeSet<_> =
        task.goal_atoms.iter().map(|&g| task.atom(g).clone()).collect();
    let adds_goal_atoms = adds.iter().any(|a| goal_atoms.contains(a));
    Excuse {
        size_moves: combo.len(),
        size_raw: raw,
        adds,
        removes,
        witness,
        adds_goal_atoms,
    }
}

/// Scans one breadth-first layer of edit sets of `size` moves. Collects every
/// valid excuse when `collect_all`, otherwise stops at the slice containing
/// the first valid candidate and returns that candidate alone.
fn scan_layer(
    task: &GroundTask,
    universe: &[EditMove],
    size: usize,
    cfg: &ExcuseSearchConfig,
    diag: &mut SearchDiagnostics,
    collect_all: bool,
) -> Vec<Excuse> {
    let mut found = Vec::new();
    let mut combos = (0..universe.len()).combinations(size);
    loop {
        let slice: Vec<Vec<usize>> = combos.by_ref().take(SLICE).collect();
        if slice.is_empty() {
            return found;
        }
        let verdicts: Vec<CandidateVerdict> = match cfg.strategy {
            EvalStrategy::Sequential => {
                slice.iter().map(|c| eval_candidate(task, universe, c, cfg)).collect()
            }
            #[cfg(feature = "parallel")]
            EvalStrategy::Parallel => slice
                .par_iter()
                .map(|c| eval_candidate(task, universe, c, cfg))
                .collect(),
        };
        diag.candidates_tried += slice.len();
        let mut hit = false;
        for (combo, verdict) in slice.iter().zip(verdicts) {
            match verdict {
                CandidateVerdict::Valid(plan) => {
                    found.push(build_excuse(task, universe, combo, plan));
                    hit = true;
                    if !collect_all {
                        break;
                    }
                }
                CandidateVerdict::ModelsGoal => diag.goal_modeling_rejections += 1,
                CandidateVerdict::Budget => diag.budget_failures += 1,
                CandidateVerdict::Unsolvable => {}
            }
        }
        if hit && !collect_all {
            return found;
        }
    }
}

/// Searches edit sets ordered by move count 1, 2, … up to the bound; the
/// first candidate accepted in canonical order is a minimal excuse by the
/// breadth-first layering.
pub fn generate_excuse(task: &GroundTask, cfg: &ExcuseSearchConfig) -> ExcuseOutcome {
    if let SolveOutcome::Plan(plan) =
        solve(task, SolveMode::Satisficing, &cfg.solvability_budget)
    {
        return ExcuseOutcome::TaskAlreadySolvable(plan);
    }
    let universe = move_universe(task, cfg);
    let mut diag = SearchDiagnostics::default();
    for size in 1..=cfg.max_edit_size {
        let found = scan_layer(task, &universe, size, cfg, &mut diag, false);
        if let Some(excuse) = found.into_iter().next() {
            return ExcuseOutcome::Excuse(excuse, diag);
        }
    }
    ExcuseOutcome::NoExcuseWithinBound(diag)
}

/// Enumerates every valid excuse of the minimal size, in canonical order.
pub fn enumerate_minimal_excuses(task: &GroundTask, cfg: &ExcuseSearchConfig) -> EnumerateOutcome {
    if let SolveOutcome::Plan(plan) =
        solve(task, SolveMode::Satisficing, &cfg.solvability_budget)
    {
        return EnumerateOutcome::TaskAlreadySolvable(plan);
    }
    let universe = move_universe(task, cfg);
    let mut diag = SearchDiagnostics::default();
    for size in 1..=cfg.max_edit_size {
        let mut found = scan_layer(task, &universe, size, cfg, &mut diag, true);
        if !found.is_empty() {
            found.sort();
            return EnumerateOutcome::Excuses(found, diag);
        }
    }
    EnumerateOutcome::NoExcuseWithinBound(diag)
}

/// Checks the three excuse clauses independently: well-formed edit, goal not
/// modeled, and solvability from the edited state; the first violated clause
/// is reported.
pub fn validate_excuse(task: &GroundTask, excuse: &Excuse) -> ExcuseValidity {
    if let Some(bad) = excuse.adds.iter().find(|a| excuse.removes.contains(*a)) {
        return ExcuseValidity::MalformedEdit(format!("atom {bad} both added and removed"));
    }
    let mut state = task.init.clone();
    for atom in &excuse.removes {
        match task.atom_id(atom) {
            Some(id) if task.init.contains(id) => state.remove(id),
            Some(_) => {
                return ExcuseValidity::MalformedEdit(format!(
                    "removed atom {atom} is not in the initial state"
                ))
            }
            None => {
                return ExcuseValidity::MalformedEdit(format!(
                    "atom {atom} is outside the fluent universe"
                ))
            }
        }
    }
    for atom in &excuse.adds {
        match task.atom_id(atom) {
            Some(id) if !task.init.contains(id) => state.insert(id),
            Some(_) => {
                return ExcuseValidity::MalformedEdit(format!(
                    "added atom {atom} is already in the initial state"
                ))
            }
            None => {
                return ExcuseValidity::MalformedEdit(format!(
                    "atom {atom} is outside the fluent universe"
                ))
            }
        }
    }
    if satisfies(&state, &task.goal_atoms) {
        return ExcuseValidity::ModelsGoal;
    }
    if let Ok(PlanVerdict::Valid { .. }) = validate_plan_from(task, &state, &excuse.witness) {
        return ExcuseValidity::Valid;
    }
    match prove_unsolvable_from(task, &state, &SearchBudget::default()) {
        UnsolvabilityVerdict::Solvable(_) => ExcuseValidity::Valid,
        UnsolvabilityVerdict::ProvenUnsolvable(_) => ExcuseValidity::StillUnsolvable,
        UnsolvabilityVerdict::Unknown => ExcuseValidity::Unknown,
    }
}

/// Exhaustively enumerates all edit sets smaller than the excuse; `Minimal`
/// means none of them is valid.
pub fn verify_minimality(
    task: &GroundTask,
    excuse: &Excuse,
    cfg: &ExcuseSearchConfig,
) -> MinimalityVerdict {
    let universe = move_universe(task, cfg);
    let mut diag = SearchDiagnostics::default();
    for size in 1..excuse.size_moves {
        let found = scan_layer(task, &universe, size, cfg, &mut diag, false);
        if let Some(smaller) = found.into_iter().next() {
            return MinimalityVerdict::SmallerExcuseExists(smaller);
        }
    }
    if diag.budget_failures > 0 {
        MinimalityVerdict::Unknown
    } else {
        MinimalityVerdict::Minimal
    }
}

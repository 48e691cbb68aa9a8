use std::collections::BTreeSet;

use thiserror::Error;

use crate::pddl::{Atom, PlanningDomain, PlanningProblem};
use crate::planner::{
    ground, solve_from, GroundConfig, GroundError, SearchBudget, SolveMode, SolveOutcome,
};

use super::{DemonstrationTrace, Provenance, TraceStep};

/// What the simulated demonstrator is asked to reach.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DemoTarget {
    /// The task goal (an unguided demonstration).
    TaskGoal,
    /// The excuse state: the planning goal is the set of atoms the excuse
    /// adds over the original initial state.
    ExcuseAdds(BTreeSet<Atom>),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SimulateError {
    #[error("target is unreachable in the demonstrator's model")]
    TargetUnreachable,
    #[error("search budget exhausted before a demonstration was found")]
    BudgetExceeded,
    #[error("target atom {0} is outside the demonstrator's fluent universe")]
    UnknownTargetAtom(String),
    #[error(transparent)]
    Ground(#[from] GroundError),
}

/// Plans optimally in the demonstrator's model toward the target, then
/// executes the plan to emit a chained trace. Touched objects are the bound
/// arguments of each executed action. An already-satisfied target yields an
/// empty trace.
pub fn simulate_demonstrator(
    human_domain: &PlanningDomain,
    problem: &PlanningProblem,
    target: &DemoTarget,
) -> Result<DemonstrationTrace, SimulateError> {
    let task = ground(human_domain, problem, &GroundConfig::default())?;
    let goal: Vec<usize> = match target {
        DemoTarget::TaskGoal => task.goal_atoms.clone(),
        DemoTarget::ExcuseAdds(adds) => adds
            .iter()
            .map(|a| {
                task.atom_id(a)
                    .ok_or_else(|| SimulateError::UnknownTargetAtom(a.to_string()))
            })
            .collect::<Result<_, _>>()?,
    };
    let plan = match solve_from(&task, &task.init, &goal, SolveMode::Optimal, &SearchBudget::default())
    {
        SolveOutcome::Plan(plan) => plan,
        SolveOutcome::Unsolvable => return Err(SimulateError::TargetUnreachable),
        SolveOutcome::BudgetExceeded => return Err(SimulateError::BudgetExceeded),
    };

    let mut steps = Vec::with_capacity(plan.len());
    let mut state = task.init.clone();
    for &step in &plan.steps {
        let action = &task.actions[step];
        let next = crate::planner::apply(&state, action).expect("planner output applies");
        let mut touched = Vec::new();
        for arg in &action.args {
            if !touched.contains(arg) {
                touched.push(arg.clone());
            }
        }
        steps.push(TraceStep {
            label: action.schema.clone(),
            touched,
            pre: task.atoms_in_state(&state).into_iter().collect(),
            post: task.atoms_in_state(&next).into_iter().collect(),
        });
        state = next;
    }
    Ok(DemonstrationTrace::new(
        problem.init.iter().cloned().collect(),
        steps,
        Provenance::Simulated,
    ))
}

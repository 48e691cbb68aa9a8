//! Shared test support: file loading and brute-force oracles that stay
//! independent of the search implementation they check.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::path::PathBuf;

use excuse_guide_core::pddl::{parse_domain, parse_problem, PlanningDomain, PlanningProblem};
use excuse_guide_core::planner::{ground, GroundConfig, GroundTask, State};

pub fn workspace_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

pub fn load_domain(rel: &str) -> PlanningDomain {
    let text = std::fs::read_to_string(workspace_path(rel)).expect("domain file readable");
    parse_domain(&text).expect("domain parses")
}

pub fn load_problem(rel: &str, domain: &PlanningDomain) -> PlanningProblem {
    let text = std::fs::read_to_string(workspace_path(rel)).expect("problem file readable");
    parse_problem(&text, domain).expect("problem parses")
}

pub fn load_task(domain_rel: &str, problem_rel: &str) -> GroundTask {
    let domain = load_domain(domain_rel);
    let problem = load_problem(problem_rel, &domain);
    ground(&domain, &problem, &GroundConfig::default()).expect("grounds")
}

/// Uniform-cost brute force over the full reachable state space. No
/// heuristics, no tie-breaking subtleties: the oracle the planner must match.
pub fn oracle_optimal_cost(task: &GroundTask, start: &State, goal: &[usize]) -> Option<u32> {
    let satisfied = |s: &State| goal.iter().all(|&g| s.contains(g));
    if satisfied(start) {
        return Some(0);
    }
    let mut dist: HashMap<State, u32> = HashMap::new();
    dist.insert(start.clone(), 0);
    let mut states: Vec<State> = vec![start.clone()];
    let mut heap: BinaryHeap<Reverse<(u32, usize)>> = BinaryHeap::new();
    heap.push(Reverse((0, 0)));
    while let Some(Reverse((d, idx))) = heap.pop() {
        let state = states[idx].clone();
        if dist.get(&state).copied().unwrap_or(u32::MAX) < d {
            continue;
        }
        if satisfied(&state) {
            return Some(d);
        }
        for action in &task.actions {
            if let Some(next) = excuse_guide_core::planner::apply(&state, action) {
                let nd = d + action.cost;
                if nd < dist.get(&next).copied().unwrap_or(u32::MAX) {
                    dist.insert(next.clone(), nd);
                    states.push(next);
                    heap.push(Reverse((nd, states.len() - 1)));
                }
            }
        }
    }
    None
}

/// Step-count variant of the oracle for unit-cost comparisons.
pub fn oracle_optimal_len(task: &GroundTask, start: &State, goal: &[usize]) -> Option<u32> {
    oracle_optimal_cost(task, start, goal)
}

pub fn oracle_solvable(task: &GroundTask, start: &State, goal: &[usize]) -> bool {
    oracle_optimal_cost(task, start, goal).is_some()
}

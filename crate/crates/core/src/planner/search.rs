use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::ground::GroundTask;
use super::plan::Plan;
use super::relaxation::{Relaxation, INFINITY};
use super::state::{apply, satisfies, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    /// A* with the admissible h_max heuristic; returns a minimum-cost plan.
    Optimal,
    /// Greedy best-first with h_add; returns any valid plan.
    Satisficing,
}

/// Expansion limit for one search.
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    pub max_expansions: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_expansions: 1_000_000 }
    }
}

/// Outcome of a search. Budget exhaustion is a distinct verdict and is never
/// conflated with unsolvability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Plan(Plan),
    Unsolvable,
    BudgetExceeded,
}

impl SolveOutcome {
    pub fn plan(self) -> Option<Plan> {
        match self {
            SolveOutcome::Plan(p) => Some(p),
            _ => None,
        }
    }
}

pub fn solve(task: &GroundTask, mode: SolveMode, budget: &SearchBudget) -> SolveOutcome {
    solve_from(task, &task.init, &task.goal_atoms, mode, budget)
}

struct Node {
    state: State,
    parent: usize,
    action: usize,
    g: u32,
}

/// Search from an explicit start state toward an explicit goal conjunction.
/// Ties in the open list break on (f, h, insertion order) and successors are
/// generated in ascending action index, so plans are bit-reproducible.
pub fn solve_from(
    task: &GroundTask,
    start: &State,
    goal: &[usize],
    mode: SolveMode,
    budget: &SearchBudget,
) -> SolveOutcome {
    if satisfies(start, goal) {
        return SolveOutcome::Plan(Plan::default());
    }

    let heuristic = |state: &State| -> u32 {
        let relax = Relaxation::compute(task, state);
        match mode {
            SolveMode::Optimal => relax.goal_hmax(goal),
            SolveMode::Satisficing => relax.goal_hadd(goal),
        }
    };

    let h0 = heuristic(start);
    if h0 == INFINITY {
        return SolveOutcome::Unsolvable;
    }

    let mut nodes = vec![Node { state: start.clone(), parent: 0, action: usize::MAX, g: 0 }];
    // best g per state; h_max is consistent so optimal search never reopens,
    // and the greedy mode keeps its first route to a state
    let mut best_g: HashMap<State, u32> = HashMap::new();
    best_g.insert(start.clone(), 0);

    // min-heap on (f, h, insertion sequence)
    let mut open: BinaryHeap<Reverse<(u32, u32, usize)>> = BinaryHeap::new();
    open.push(Reverse((h0, h0, 0)));

    let mut expansions = 0usize;
    while let Some(Reverse((_, _, idx))) = open.pop() {
        let g = nodes[idx].g;
        let state = nodes[idx].state.clone();
        if best_g.get(&state).copied().unwrap_or(INFINITY) < g {
            continue; // superseded entry
        }
        if satisfies(&state, goal) {
            return SolveOutcome::Plan(extract(&nodes, idx));
        }
        expansions += 1;
        if expansions > budget.max_expansions {
            return SolveOutcome::BudgetExceeded;
        }
        for (action_idx, action) in task.actions.iter().enumerate() {
            let Some(next) = apply(&state, action) else { continue };
            let next_g = g + action.cost;
            let seen = best_g.get(&next).copied().unwrap_or(INFINITY);
            let improves = match mode {
                SolveMode::Optimal => next_g < seen,
                SolveMode::Satisficing => seen == INFINITY,
            };
            if !improves {
                continue;
            }
            let h = heuristic(&next);
            if h == INFINITY {
                continue; // dead end under the relaxation
            }
            best_g.insert(next.clone(), next_g);
            let seq = nodes.len();
            nodes.push(Node { state: next, parent: idx, action: action_idx, g: next_g });
            let f = match mode {
                SolveMode::Optimal => next_g + h,
                SolveMode::Satisficing => h,
            };
            open.push(Reverse((f, h, seq)));
        }
    }
    SolveOutcome::Unsolvable
}

fn extract(nodes: &[Node], mut idx: usize) -> Plan {
    let mut steps = Vec::new();
    while nodes[idx].action != usize::MAX {
        steps.push(nodes[idx].action);
        idx = nodes[idx].parent;
    }
    steps.reverse();
    Plan::new(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::parse_atom;
    use crate::planner::plan::{validate_plan, PlanVerdict};

    fn atoms(names: &[&str]) -> Vec<crate::pddl::Atom> {
        names.iter().map(|n| parse_atom(&format!("({n})")).unwrap()).collect()
    }

    #[test]
    fn goal_in_init_yields_empty_plan() {
        let task = GroundTask::from_parts("t", atoms(&["g"]), vec![], &[0], &[0]).unwrap();
        let outcome = solve(&task, SolveMode::Optimal, &SearchBudget::default());
        assert_eq!(outcome, SolveOutcome::Plan(Plan::default()));
    }

    #[test]
    fn optimal_picks_the_cheaper_route() {
        // direct costly action vs two unit steps
        let task = GroundTask::from_parts(
            "t",
            atoms(&["s", "m", "g"]),
            vec![
                ("direct".into(), 3, vec![0], vec![2], vec![]),
                ("half".into(), 1, vec![0], vec![1], vec![]),
                ("rest".into(), 1, vec![1], vec![2], vec![]),
            ],
            &[0],
            &[2],
        )
        .unwrap();
        let plan = solve(&task, SolveMode::Optimal, &SearchBudget::default())
            .plan()
            .unwrap();
        assert_eq!(plan.cost(&task), 2);
        assert_eq!(validate_plan(&task, &plan).unwrap(), PlanVerdict::Valid { cost: 2 });
    }

    #[test]
    fn unsolvable_is_reported_by_exhaustion() {
        let task = GroundTask::from_parts(
            "t",
            atoms(&["s", "g"]),
            vec![("loop".into(), 1, vec![0], vec![0], vec![])],
            &[0],
            &[1],
        )
        .unwrap();
        assert_eq!(
            solve(&task, SolveMode::Optimal, &SearchBudget::default()),
            SolveOutcome::Unsolvable
        );
    }

    #[test]
    fn budget_exhaustion_is_distinct_from_unsolvable() {
        // a counter over 12 bits: huge reachable space, unreachable goal atom
        let n = 12;
        let mut atom_list = atoms(&["g"]);
        for i in 0..n {
            atom_list.push(parse_atom(&format!("(b{i})")).unwrap());
        }
        let mut actions = Vec::new();
        // toggling bit i requires bits below set (a binary counter increment)
        for i in 0..n {
            let pre: Vec<usize> = (0..i).map(|j| j + 1).collect();
            let del: Vec<usize> = (0..i).map(|j| j + 1).collect();
            actions.push((format!("inc{i}"), 1u32, pre, vec![i + 1], del));
        }
        let task = GroundTask::from_parts("t", atom_list, actions, &[], &[0]).unwrap();
        let outcome = solve(&task, SolveMode::Optimal, &SearchBudget { max_expansions: 50 });
        // the relaxation already proves `g` unreachable here, so widen the
        // goal to something relaxed-reachable but actually unreachable: not
        // possible in this toy, so instead check the budget on a reachable
        // goal placed far away
        let far_goal: Vec<usize> = (1..=n).collect();
        let outcome_far = solve_from(
            &task,
            &task.init,
            &far_goal,
            SolveMode::Optimal,
            &SearchBudget { max_expansions: 5 },
        );
        assert_eq!(outcome_far, SolveOutcome::BudgetExceeded);
        assert_eq!(outcome, SolveOutcome::Unsolvable);
    }

    #[test]
    fn satisficing_finds_some_valid_plan() {
        let task = GroundTask::from_parts(
            "t",
            atoms(&["s", "a", "b", "g"]),
            vec![
                ("sa".into(), 1, vec![0], vec![1], vec![]),
                ("ab".into(), 1, vec![1], vec![2], vec![]),
                ("bg".into(), 1, vec![2], vec![3], vec![]),
            ],
            &[0],
            &[3],
        )
        .unwrap();
        let plan = solve(&task, SolveMode::Satisficing, &SearchBudget::default())
            .plan()
            .unwrap();
        assert!(matches!(
            validate_plan(&task, &plan).unwrap(),
            PlanVerdict::Valid { .. }
        ));
    }

    #[test]
    fn identical_searches_produce_identical_plans() {
        let task = GroundTask::from_parts(
            "t",
            atoms(&["s", "x", "y", "g"]),
            vec![
                ("sx".into(), 1, vec![0], vec![1], vec![]),
                ("sy".into(), 1, vec![0], vec![2], vec![]),
                ("xg".into(), 1, vec![1], vec![3], vec![]),
                ("yg".into(), 1, vec![2], vec![3], vec![]),
            ],
            &[0],
            &[3],
        )
        .unwrap();
        let a = solve(&task, SolveMode::Optimal, &SearchBudget::default());
        let b = solve(&task, SolveMode::Optimal, &SearchBudget::default());
        assert_eq!(a, b);
        // symmetric routes tie-break on lowest action index
        assert_eq!(a.plan().unwrap().steps, vec![0, 2]);
    }
}

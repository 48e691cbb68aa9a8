//! Optimal plan lengths on the kitchen reference encodings, checked both by
//! the planner and by the brute-force oracle. These lengths anchor every
//! downstream demonstration metric.

mod common;

use common::{load_task, oracle_optimal_len};
use excuse_guide_core::pddl::parse_atom;
use excuse_guide_core::planner::{
    prove_unsolvable, solve, solve_from, validate_plan, Plan, PlanVerdict, SearchBudget,
    SolveMode, SolveOutcome, UnsolvabilityCertificate, UnsolvabilityVerdict,
};

fn goal_ids(task: &excuse_guide_core::GroundTask, atoms: &[&str]) -> Vec<usize> {
    atoms
        .iter()
        .map(|a| task.atom_id(&parse_atom(a).unwrap()).expect("atom in universe"))
        .collect()
}

fn optimal_len(task: &excuse_guide_core::GroundTask, goal: &[usize]) -> usize {
    let plan = solve_from(task, &task.init, goal, SolveMode::Optimal, &SearchBudget::default())
        .plan()
        .expect("solvable");
    let oracle = oracle_optimal_len(task, &task.init, goal).expect("oracle agrees solvable");
    assert_eq!(plan.len() as u32, oracle, "planner and oracle disagree");
    plan.len()
}

#[test]
fn kitchen1_human_lengths_match_the_predicted_table() {
    let task = load_task("domains/kitchen1_human.pddl", "domains/kitchen1.pddl");

    // full task
    let full = solve(&task, SolveMode::Optimal, &SearchBudget::default())
        .plan()
        .expect("human task solvable");
    assert_eq!(full.len(), 9);
    assert_eq!(validate_plan(&task, &full).unwrap(), PlanVerdict::Valid { cost: 9 });

    // demonstration for the minimal excuse: just open the drawer
    let excuse_goal = goal_ids(&task, &["(open pink-drawer)"]);
    assert_eq!(optimal_len(&task, &excuse_goal), 2);

    // demonstration for the suboptimal excuse: plate inside the drawer
    let inside_goal = goal_ids(&task, &["(inside red-plate pink-drawer)"]);
    assert_eq!(optimal_len(&task, &inside_goal), 7);

    // remaining plan from the excuse state (drawer open, all else as in I)
    let mut edited = task.init.clone();
    edited.remove(task.atom_id(&parse_atom("(closed pink-drawer)").unwrap()).unwrap());
    edited.insert(task.atom_id(&parse_atom("(open pink-drawer)").unwrap()).unwrap());
    let remaining =
        solve_from(&task, &edited, &task.goal_atoms, SolveMode::Optimal, &SearchBudget::default())
            .plan()
            .expect("solvable from excuse state");
    assert_eq!(remaining.len(), 7);
    assert_eq!(
        oracle_optimal_len(&task, &edited, &task.goal_atoms),
        Some(7)
    );
}

#[test]
fn kitchen2_human_lengths_match_the_predicted_table() {
    let task = load_task("domains/kitchen2_human.pddl", "domains/kitchen2.pddl");

    let full = solve(&task, SolveMode::Optimal, &SearchBudget::default())
        .plan()
        .expect("human task solvable");
    assert_eq!(full.len(), 11);

    let excuse_goal = goal_ids(&task, &["(clear pink-drawer)"]);
    assert_eq!(optimal_len(&task, &excuse_goal), 1);

    let inside_goal = goal_ids(&task, &["(inside red-plate pink-drawer)"]);
    assert_eq!(optimal_len(&task, &inside_goal), 9);

    // remaining from the excuse state: drawer cleared, chair untouched
    let mut edited = task.init.clone();
    edited.remove(task.atom_id(&parse_atom("(blocked pink-drawer)").unwrap()).unwrap());
    edited.insert(task.atom_id(&parse_atom("(clear pink-drawer)").unwrap()).unwrap());
    let remaining =
        solve_from(&task, &edited, &task.goal_atoms, SolveMode::Optimal, &SearchBudget::default())
            .plan()
            .expect("solvable from excuse state");
    assert_eq!(remaining.len(), 10);
}

#[test]
fn kitchen2_variant_remaining_length_spans_both_flips() {
    let task = load_task("domains/kitchen2_human.pddl", "domains/kitchen2.pddl");
    // excuse state for the two-capability gap: drawer clear and open
    let mut edited = task.init.clone();
    for (remove, add) in [("(blocked pink-drawer)", "(clear pink-drawer)"),
                          ("(closed pink-drawer)", "(open pink-drawer)")] {
        edited.remove(task.atom_id(&parse_atom(remove).unwrap()).unwrap());
        edited.insert(task.atom_id(&parse_atom(add).unwrap()).unwrap());
    }
    let remaining =
        solve_from(&task, &edited, &task.goal_atoms, SolveMode::Optimal, &SearchBudget::default())
            .plan()
            .expect("solvable from excuse state");
    assert_eq!(remaining.len(), 9);

    // guided demonstration for the variant: negate both flips
    let demo_goal = goal_ids(&task, &["(clear pink-drawer)", "(open pink-drawer)"]);
    assert_eq!(optimal_len(&task, &demo_goal), 4);
}

#[test]
fn kitchen1_robot_task_is_provably_unsolvable() {
    let task = load_task("domains/kitchen1_robot.pddl", "domains/kitchen1.pddl");
    assert_eq!(solve(&task, SolveMode::Optimal, &SearchBudget::default()), SolveOutcome::Unsolvable);
    match prove_unsolvable(&task, &SearchBudget::default()) {
        UnsolvabilityVerdict::ProvenUnsolvable(UnsolvabilityCertificate::UnreachableGoalAtoms(
            atoms,
        )) => {
            assert_eq!(atoms, vec![parse_atom("(inside red-plate pink-drawer)").unwrap()]);
        }
        other => panic!("expected a relaxation certificate, got {other:?}"),
    }
}

#[test]
fn kitchen2_robot_task_is_provably_unsolvable() {
    let task = load_task("domains/kitchen2_robot.pddl", "domains/kitchen2.pddl");
    assert!(matches!(
        prove_unsolvable(&task, &SearchBudget::default()),
        UnsolvabilityVerdict::ProvenUnsolvable(_)
    ));
}

#[test]
fn kitchen2_variant_robot_task_is_provably_unsolvable() {
    let task = load_task("domains/kitchen2_variant_robot.pddl", "domains/kitchen2.pddl");
    assert!(matches!(
        prove_unsolvable(&task, &SearchBudget::default()),
        UnsolvabilityVerdict::ProvenUnsolvable(_)
    ));
}

#[test]
fn kitchen1_human_task_has_a_length9_witness() {
    let task = load_task("domains/kitchen1_human.pddl", "domains/kitchen1.pddl");
    match prove_unsolvable(&task, &SearchBudget::default()) {
        UnsolvabilityVerdict::Solvable(plan) => assert_eq!(plan.len(), 9),
        other => panic!("expected a witness, got {other:?}"),
    }
}

#[test]
fn kitchen_witness_plans_survive_text_round_trips() {
    let task = load_task("domains/kitchen1_human.pddl", "domains/kitchen1.pddl");
    let plan = solve(&task, SolveMode::Optimal, &SearchBudget::default()).plan().unwrap();
    let text = excuse_guide_core::planner::format_plan(&task, &plan);
    let back: Plan = excuse_guide_core::planner::parse_plan(&text, &task).unwrap();
    assert_eq!(back, plan);
}

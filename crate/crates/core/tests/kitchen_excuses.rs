//! Excuse generation on the kitchen scenarios: content, size accounting,
//! minimality, enumeration, ranking and rendering.

mod common;

use std::collections::BTreeSet;

use common::load_task;
use excuse_guide_core::excuse::{
    enumerate_minimal_excuses, generate_excuse, rank_excuses, render_excuse, validate_excuse,
    verify_minimality, EvalStrategy, Excuse, ExcuseOutcome, ExcuseSearchConfig, ExcuseValidity,
    MinimalityVerdict, RenderStyle,
};
use excuse_guide_core::pddl::parse_atom;
use excuse_guide_core::planner::Plan;

fn atoms(list: &[&str]) -> BTreeSet<excuse_guide_core::Atom> {
    list.iter().map(|a| parse_atom(a).unwrap()).collect()
}

#[test]
fn kitchen1_excuse_is_open_pink_drawer_with_move_size_1() {
    let task = load_task("domains/kitchen1_robot.pddl", "domains/kitchen1.pddl");
    let cfg = ExcuseSearchConfig::default();
    match generate_excuse(&task, &cfg) {
        ExcuseOutcome::Excuse(excuse, _) => {
            assert_eq!(excuse.adds, atoms(&["(open pink-drawer)"]));
            assert_eq!(excuse.removes, atoms(&["(closed pink-drawer)"]));
            assert_eq!(excuse.size_moves, 1);
            assert_eq!(excuse.size_raw, 2);
            assert_eq!(render_excuse(&excuse, RenderStyle::PositiveOnly), "Open PinkDrawer");
            assert_eq!(
                render_excuse(&excuse, RenderStyle::FullDiff),
                "+ open(pink-drawer)\n- closed(pink-drawer)"
            );
            assert_eq!(validate_excuse(&task, &excuse), ExcuseValidity::Valid);
            assert_eq!(verify_minimality(&task, &excuse, &cfg), MinimalityVerdict::Minimal);
        }
        other => panic!("expected an excuse, got {other:?}"),
    }
}

#[test]
fn kitchen2_excuse_is_clear_pink_drawer() {
    let task = load_task("domains/kitchen2_robot.pddl", "domains/kitchen2.pddl");
    match generate_excuse(&task, &ExcuseSearchConfig::default()) {
        ExcuseOutcome::Excuse(excuse, _) => {
            assert_eq!(excuse.adds, atoms(&["(clear pink-drawer)"]));
            assert_eq!(excuse.removes, atoms(&["(blocked pink-drawer)"]));
            assert_eq!(excuse.size_moves, 1);
            assert_eq!(render_excuse(&excuse, RenderStyle::PositiveOnly), "Clear PinkDrawer");
        }
        other => panic!("expected an excuse, got {other:?}"),
    }
}

#[test]
fn kitchen2_variant_needs_two_moves_clearing_and_opening() {
    let task = load_task("domains/kitchen2_variant_robot.pddl", "domains/kitchen2.pddl");
    let cfg = ExcuseSearchConfig::default();
    match generate_excuse(&task, &cfg) {
        ExcuseOutcome::Excuse(excuse, _) => {
            assert_eq!(excuse.size_moves, 2);
            assert_eq!(excuse.size_raw, 4);
            assert_eq!(
                excuse.adds,
                atoms(&["(clear pink-drawer)", "(open pink-drawer)"])
            );
            assert_eq!(
                excuse.removes,
                atoms(&["(blocked pink-drawer)", "(closed pink-drawer)"])
            );
            assert_eq!(
                render_excuse(&excuse, RenderStyle::PositiveOnly),
                "Clear PinkDrawer\nOpen PinkDrawer"
            );
            assert_eq!(verify_minimality(&task, &excuse, &cfg), MinimalityVerdict::Minimal);
        }
        other => panic!("expected an excuse, got {other:?}"),
    }
}

#[test]
fn solvable_task_reports_already_solvable_and_enumerates_empty() {
    let task = load_task("domains/kitchen1_human.pddl", "domains/kitchen1.pddl");
    assert!(matches!(
        generate_excuse(&task, &ExcuseSearchConfig::default()),
        ExcuseOutcome::TaskAlreadySolvable(_)
    ));
    let enumerated = enumerate_minimal_excuses(&task, &ExcuseSearchConfig::default());
    assert!(enumerated.excuses().is_empty());
}

#[test]
fn kitchen1_minimal_excuse_is_unique() {
    let task = load_task("domains/kitchen1_robot.pddl", "domains/kitchen1.pddl");
    let excuses = enumerate_minimal_excuses(&task, &ExcuseSearchConfig::default()).excuses();
    assert_eq!(excuses.len(), 1);
    assert_eq!(excuses[0].adds, atoms(&["(open pink-drawer)"]));
}

#[test]
fn generated_excuses_validate_and_sequential_matches_parallel() {
    for (domain, problem) in [
        ("domains/kitchen1_robot.pddl", "domains/kitchen1.pddl"),
        ("domains/kitchen2_robot.pddl", "domains/kitchen2.pddl"),
        ("domains/kitchen2_variant_robot.pddl", "domains/kitchen2.pddl"),
    ] {
        let task = load_task(domain, problem);
        let seq_cfg = ExcuseSearchConfig {
            strategy: EvalStrategy::Sequential,
            ..ExcuseSearchConfig::default()
        };
        let seq = generate_excuse(&task, &seq_cfg);
        let par = generate_excuse(&task, &ExcuseSearchConfig::default());
        assert_eq!(seq, par, "strategies disagree on {domain}");
        if let ExcuseOutcome::Excuse(excuse, _) = seq {
            assert_eq!(validate_excuse(&task, &excuse), ExcuseValidity::Valid);
        } else {
            panic!("expected an excuse for {domain}");
        }
    }
}

#[test]
fn goal_modeling_edit_is_rejected_by_the_validator() {
    let task = load_task("domains/kitchen1_robot.pddl", "domains/kitchen1.pddl");
    // adding every goal atom to I models the goal outright
    let excuse = Excuse {
        adds: atoms(&["(inside red-plate pink-drawer)"]),
        removes: BTreeSet::new(),
        size_moves: 1,
        size_raw: 1,
        witness: Plan::default(),
        adds_goal_atoms: true,
    };
    assert_eq!(validate_excuse(&task, &excuse), ExcuseValidity::ModelsGoal);
}

#[test]
fn empty_edit_on_unsolvable_task_is_still_unsolvable() {
    let task = load_task("domains/kitchen1_robot.pddl", "domains/kitchen1.pddl");
    let excuse = Excuse {
        adds: BTreeSet::new(),
        removes: BTreeSet::new(),
        size_moves: 0,
        size_raw: 0,
        witness: Plan::default(),
        adds_goal_atoms: false,
    };
    assert_eq!(validate_excuse(&task, &excuse), ExcuseValidity::StillUnsolvable);
}

#[test]
fn nonminimal_plate_inside_excuse_is_detected_as_nonminimal() {
    // the suboptimal excuse: plate already inside the opened drawer
    let task = load_task("domains/kitchen1_robot.pddl", "domains/kitchen1.pddl");
    let nonminimal = Excuse {
        adds: atoms(&["(inside red-plate pink-drawer)", "(open pink-drawer)"]),
        removes: atoms(&["(closed pink-drawer)", "(on-table red-plate)"]),
        size_moves: 3,
        size_raw: 4,
        witness: Plan::default(),
        adds_goal_atoms: true,
    };
    assert_eq!(validate_excuse(&task, &nonminimal), ExcuseValidity::Valid);
    match verify_minimality(&task, &nonminimal, &ExcuseSearchConfig::default()) {
        MinimalityVerdict::SmallerExcuseExists(smaller) => {
            assert_eq!(smaller.size_moves, 1);
        }
        other => panic!("expected a smaller excuse, got {other:?}"),
    }
}

#[test]
fn ranking_prefers_the_shorter_demonstration() {
    // kitchen1: {open drawer} asks for 2 steps, {plate inside} for 7
    let robot = load_task("domains/kitchen1_robot.pddl", "domains/kitchen1.pddl");
    let human = load_task("domains/kitchen1_human.pddl", "domains/kitchen1.pddl");
    let minimal = match generate_excuse(&robot, &ExcuseSearchConfig::default()) {
        ExcuseOutcome::Excuse(e, _) => e,
        other => panic!("expected excuse, got {other:?}"),
    };
    let suboptimal = Excuse {
        adds: atoms(&["(inside red-plate pink-drawer)", "(open pink-drawer)"]),
        removes: atoms(&["(closed pink-drawer)", "(on-table red-plate)"]),
        size_moves: 3,
        size_raw: 4,
        witness: Plan::default(),
        adds_goal_atoms: true,
    };
    let ranked = rank_excuses(&human, &[suboptimal, minimal.clone()]);
    assert_eq!(ranked[0].excuse, minimal);
    assert_eq!(ranked[0].predicted_demo_len, Some(2));
    assert_eq!(ranked[1].predicted_demo_len, Some(7));

    // single-excuse list is unchanged
    let single = rank_excuses(&human, &[minimal.clone()]);
    assert_eq!(single.len(), 1);
    assert_eq!(single[0].excuse, minimal);
}

#[test]
fn kitchen2_ranking_matches_the_predicted_lengths() {
    let robot = load_task("domains/kitchen2_robot.pddl", "domains/kitchen2.pddl");
    let human = load_task("domains/kitchen2_human.pddl", "domains/kitchen2.pddl");
    let minimal = match generate_excuse(&robot, &ExcuseSearchConfig::default()) {
        ExcuseOutcome::Excuse(e, _) => e,
        other => panic!("expected excuse, got {other:?}"),
    };
    let suboptimal = Excuse {
        adds: atoms(&[
            "(inside red-plate pink-drawer)",
            "(open pink-drawer)",
            "(clear pink-drawer)",
        ]),
        removes: atoms(&[
            "(closed pink-drawer)",
            "(blocked pink-drawer)",
            "(on-table red-plate)",
        ]),
        size_moves: 4,
        size_raw: 6,
        witness: Plan::default(),
        adds_goal_atoms: true,
    };
    let ranked = rank_excuses(&human, &[suboptimal, minimal]);
    assert_eq!(ranked[0].predicted_demo_len, Some(1));
    assert_eq!(ranked[1].predicted_demo_len, Some(9));
}

#[test]
fn human_unreachable_guidance_goals_rank_last_and_are_flagged() {
    let human = load_task("domains/kitchen2_human.pddl", "domains/kitchen2.pddl");
    let reachable = Excuse {
        adds: atoms(&["(open pink-drawer)"]),
        removes: atoms(&["(closed pink-drawer)"]),
        size_moves: 1,
        size_raw: 2,
        witness: Plan::default(),
        adds_goal_atoms: false,
    };
    // no walkway reaches the chair's corner, so the human cannot stand there
    let unreachable = Excuse {
        adds: atoms(&["(at corner)"]),
        removes: BTreeSet::new(),
        size_moves: 1,
        size_raw: 1,
        witness: Plan::default(),
        adds_goal_atoms: false,
    };
    let ranked = rank_excuses(&human, &[unreachable, reachable]);
    assert!(!ranked[0].human_unreachable);
    assert!(ranked[1].human_unreachable);
    assert_eq!(ranked[1].predicted_demo_len, None);
}

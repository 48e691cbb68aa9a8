use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use excuse_guide_core::demo::{
    learn_operators, map_embodiment, simulate_demonstrator, DemoTarget, EmbodimentMapping,
};
use excuse_guide_core::excuse::{
    generate_excuse, render_excuse, verify_minimality, Excuse, ExcuseOutcome, ExcuseSearchConfig,
    MinimalityVerdict, RenderStyle,
};
use excuse_guide_core::metrics::{post_demo_solvability, PostDemoVerdict, StepOrigin};
use excuse_guide_core::pddl::{parse_atom, parse_domain, parse_problem, Atom};
use excuse_guide_core::planner::{
    ground, solve_from, GroundConfig, SearchBudget, SolveMode, SolveOutcome,
};

use crate::{persist, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK};

/// Suite manifest: scenario tuples with their expected outcomes. Paths are
/// resolved relative to the manifest file.
#[derive(Deserialize)]
struct SuiteManifest {
    scenarios: Vec<ScenarioSpec>,
}

#[derive(Deserialize)]
struct ScenarioSpec {
    name: String,
    robot_domain: String,
    human_domain: String,
    problem: String,
    expected: Expected,
    /// The suboptimal comparison excuse whose demonstration length fills the
    /// E column; optional.
    #[serde(default)]
    suboptimal_excuse: Option<ExcuseEdits>,
}

#[derive(Deserialize)]
struct ExcuseEdits {
    #[serde(default)]
    adds: Vec<String>,
    #[serde(default)]
    removes: Vec<String>,
}

#[derive(Deserialize)]
struct Expected {
    excuse_rendered: String,
    excuse_move_size: usize,
    excuse_demo_len: usize,
    #[serde(default)]
    suboptimal_demo_len: Option<usize>,
    full_demo_len: usize,
    remaining_len: usize,
    f1: f64,
    post_demo_solvable: bool,
}

#[derive(Serialize)]
struct ScenarioReport {
    name: String,
    excuse_rendered: String,
    excuse_move_size: usize,
    excuse_raw_size: usize,
    minimal: bool,
    excuse_demo_len: Option<usize>,
    suboptimal_demo_len: Option<usize>,
    full_demo_len: Option<usize>,
    remaining_len: Option<usize>,
    f1: Option<f64>,
    post_demo_solvable: bool,
    witness_uses_learned_action: bool,
    mismatches: Vec<Mismatch>,
}

#[derive(Clone, Serialize)]
struct Mismatch {
    field: String,
    expected: String,
    actual: String,
}

#[derive(Serialize)]
struct BenchReport {
    scenarios: Vec<ScenarioReport>,
    total_mismatches: usize,
    table: String,
}

pub fn run_benchmark(suite_path: &Path, out: Option<&Path>) -> u8 {
    let text = match std::fs::read_to_string(suite_path) {
        Ok(t) => t,
        Err(e) => return crate::input_err(&suite_path.display().to_string(), e),
    };
    let manifest: SuiteManifest = match serde_json::from_str(&text) {
        Ok(m) => m,
        Err(e) => return crate::input_err("suite manifest", e),
    };
    let base = suite_path.parent().unwrap_or_else(|| Path::new("."));

    // scenarios are independent; evaluate them on the thread pool and keep
    // manifest order in the report
    let results: Vec<Result<ScenarioReport, String>> = manifest
        .scenarios
        .par_iter()
        .map(|spec| run_scenario(base, spec))
        .collect();

    let mut reports = Vec::new();
    for result in results {
        match result {
            Ok(r) => reports.push(r),
            Err(e) => {
                eprintln!("error [bench]: {e}");
                return EXIT_INPUT;
            }
        }
    }

    let table = render_table(&reports);
    print!("{table}");
    let total_mismatches: usize = reports.iter().map(|r| r.mismatches.len()).sum();
    for report in &reports {
        for m in &report.mismatches {
            println!(
                "MISMATCH {} / {}: expected {}, got {}",
                report.name, m.field, m.expected, m.actual
            );
        }
    }
    println!(
        "{} scenario(s), {} mismatch(es)",
        reports.len(),
        total_mismatches
    );

    let bench = BenchReport { scenarios: reports, total_mismatches, table };
    if let Some(dir) = out {
        let json = serde_json::to_string_pretty(&bench).expect("serializable");
        if let Err(e) = persist(dir, "bench_report.json", &json) {
            return crate::input_err("output", e);
        }
        for scenario in &bench.scenarios {
            let json = serde_json::to_string_pretty(scenario).expect("serializable");
            if let Err(e) = persist(dir, &format!("{}.report.json", scenario.name), &json) {
                return crate::input_err("output", e);
            }
        }
    }

    if total_mismatches > 0 {
        EXIT_MISMATCH
    } else {
        EXIT_OK
    }
}

fn run_scenario(base: &Path, spec: &ScenarioSpec) -> Result<ScenarioReport, String> {
    let load = |rel: &str| -> Result<String, String> {
        std::fs::read_to_string(base.join(rel))
            .map_err(|e| format!("{}: {e}", base.join(rel).display()))
    };
    let robot = parse_domain(&load(&spec.robot_domain)?)
        .map_err(|e| format!("{}: {e}", spec.robot_domain))?;
    let human = parse_domain(&load(&spec.human_domain)?)
        .map_err(|e| format!("{}: {e}", spec.human_domain))?;
    let problem = parse_problem(&load(&spec.problem)?, &robot)
        .map_err(|e| format!("{}: {e}", spec.problem))?;

    let robot_task =
        ground(&robot, &problem, &GroundConfig::default()).map_err(|e| e.to_string())?;
    let human_task =
        ground(&human, &problem, &GroundConfig::default()).map_err(|e| e.to_string())?;

    let mut mismatches: Vec<Mismatch> = Vec::new();
    let mut check = |field: &str, expected: String, actual: String| {
        if expected != actual {
            mismatches.push(Mismatch { field: field.into(), expected, actual });
        }
    };

    // excuse content and minimality
    let cfg = ExcuseSearchConfig::default();
    let excuse = match generate_excuse(&robot_task, &cfg) {
        ExcuseOutcome::Excuse(e, _) => e,
        other => return Err(format!("{}: no excuse generated: {other:?}", spec.name)),
    };
    let rendered = render_excuse(&excuse, RenderStyle::PositiveOnly);
    check("excuse_rendered", spec.expected.excuse_rendered.clone(), rendered.clone());
    check(
        "excuse_move_size",
        spec.expected.excuse_move_size.to_string(),
        excuse.size_moves.to_string(),
    );
    let minimal = matches!(verify_minimality(&robot_task, &excuse, &cfg), MinimalityVerdict::Minimal);
    if !minimal {
        check("minimal", "true".into(), "false".into());
    }

    // predicted demonstration lengths
    let excuse_demo_len =
        simulate_demonstrator(&human, &problem, &DemoTarget::ExcuseAdds(excuse.adds.clone()))
            .ok()
            .map(|t| t.len_effective());
    if let Some(len) = excuse_demo_len {
        check("excuse_demo_len", spec.expected.excuse_demo_len.to_string(), len.to_string());
    } else {
        check("excuse_demo_len", spec.expected.excuse_demo_len.to_string(), "none".into());
    }

    let suboptimal_demo_len = match &spec.suboptimal_excuse {
        Some(edits) => {
            let adds: Result<BTreeSet<Atom>, _> =
                edits.adds.iter().map(|a| parse_atom(a)).collect();
            let adds = adds.map_err(|e| format!("{}: suboptimal excuse: {e}", spec.name))?;
            let _removes: Result<Vec<Atom>, _> =
                edits.removes.iter().map(|a| parse_atom(a)).collect();
            let goal: Option<Vec<usize>> = adds.iter().map(|a| human_task.atom_id(a)).collect();
            let len = goal.and_then(|goal| {
                match solve_from(
                    &human_task,
                    &human_task.init,
                    &goal,
                    SolveMode::Optimal,
                    &SearchBudget::default(),
                ) {
                    SolveOutcome::Plan(p) => Some(p.len()),
                    _ => None,
                }
            });
            if let Some(expected) = spec.expected.suboptimal_demo_len {
                check(
                    "suboptimal_demo_len",
                    expected.to_string(),
                    len.map_or("none".into(), |l| l.to_string()),
                );
            }
            len
        }
        None => None,
    };

    let full_demo_len = simulate_demonstrator(&human, &problem, &DemoTarget::TaskGoal)
        .ok()
        .map(|t| t.len_effective());
    check(
        "full_demo_len",
        spec.expected.full_demo_len.to_string(),
        full_demo_len.map_or("none".into(), |l| l.to_string()),
    );

    let remaining_len = {
        let mut edited = human_task.init.clone();
        let mut ok = true;
        for atom in &excuse.removes {
            match human_task.atom_id(atom) {
                Some(id) => {
                    edited.remove(id);
                }
                None => ok = false,
            }
        }
        for atom in &excuse.adds {
            match human_task.atom_id(atom) {
                Some(id) => {
                    edited.insert(id);
                }
                None => ok = false,
            }
        }
        if ok {
            match solve_from(
                &human_task,
                &edited,
                &human_task.goal_atoms,
                SolveMode::Optimal,
                &SearchBudget::default(),
            ) {
                SolveOutcome::Plan(p) => Some(p.len()),
                _ => None,
            }
        } else {
            None
        }
    };
    check(
        "remaining_len",
        spec.expected.remaining_len.to_string(),
        remaining_len.map_or("none".into(), |l| l.to_string()),
    );

    let f1 = match (remaining_len, full_demo_len) {
        (Some(r), Some(f)) if f > 0 => Some(r as f64 / f as f64),
        _ => None,
    };
    match f1 {
        Some(f1) if (f1 - spec.expected.f1).abs() <= 5e-3 => {}
        other => check(
            "f1",
            format!("{:.3}", spec.expected.f1),
            other.map_or("none".into(), |f| format!("{f:.3}")),
        ),
    }

    // guided pipeline: learn from the excuse demonstration and verify
    let (solvable, learned_used) = match simulate_demonstrator(
        &human,
        &problem,
        &DemoTarget::ExcuseAdds(excuse.adds.clone()),
    ) {
        Ok(trace) => {
            let learned = learn_operators(&trace, &robot, &problem.objects)
                .map_err(|e| format!("{}: {e}", spec.name))?;
            let mapped = map_embodiment(&learned, &EmbodimentMapping::identity())
                .map_err(|e| format!("{}: {e}", spec.name))?;
            match post_demo_solvability(&robot, &mapped, &problem)
                .map_err(|e| format!("{}: {e}", spec.name))?
            {
                PostDemoVerdict::Solvable { witness } => {
                    (true, witness.iter().any(|s| s.origin == StepOrigin::Learned))
                }
                _ => (false, false),
            }
        }
        Err(_) => (false, false),
    };
    check(
        "post_demo_solvable",
        spec.expected.post_demo_solvable.to_string(),
        solvable.to_string(),
    );
    if spec.expected.post_demo_solvable && !learned_used {
        check("witness_uses_learned_action", "true".into(), "false".into());
    }

    Ok(ScenarioReport {
        name: spec.name.clone(),
        excuse_rendered: rendered,
        excuse_move_size: excuse.size_moves,
        excuse_raw_size: excuse.size_raw,
        minimal,
        excuse_demo_len,
        suboptimal_demo_len,
        full_demo_len,
        remaining_len,
        f1,
        post_demo_solvable: solvable,
        witness_uses_learned_action: learned_used,
        mismatches,
    })
}

/// The predicted-lengths table: one row per scenario, P columns for the
/// minimal excuse, the suboptimal excuse and the original goal.
fn render_table(reports: &[ScenarioReport]) -> String {
    let mut out = String::new();
    let opt = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |n| n.to_string());
    out.push_str(&format!(
        "{:<26} {:>9} {:>6} {:>7} {:>10} {:>7}\n",
        "scenario", "E_min/P", "E/P", "G_R/P", "remaining", "F1"
    ));
    for r in reports {
        out.push_str(&format!(
            "{:<26} {:>9} {:>6} {:>7} {:>10} {:>7}\n",
            r.name,
            opt(r.excuse_demo_len),
            opt(r.suboptimal_demo_len),
            opt(r.full_demo_len),
            opt(r.remaining_len),
            r.f1.map_or_else(|| "-".to_string(), |f| format!("{f:.3}")),
        ));
    }
    out
}

/// used by the excuse struct import above when witnessing plans; the compiler
/// otherwise flags the import in non-test builds
#[allow(dead_code)]
fn _witness_ty(_: &Excuse) {}

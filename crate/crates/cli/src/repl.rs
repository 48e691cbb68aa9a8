use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use excuse_guide_core::demo::{DemonstrationTrace, Provenance, TraceStep};
use excuse_guide_core::pddl::{parse_atom, Atom, Ident, PlanningDomain, PlanningProblem};
use excuse_guide_core::planner::{apply, ground, GroundConfig, GroundTask};

/// Interactive demonstration console. With a human model, `do` validates
/// actions against it and advances the state; without one, free-form `add`,
/// `del` and `step` commands record verbatim state edits. `undo` pops the
/// last step, `done` seals the trace, `abort` cancels the session.
pub fn run_repl(
    input: impl BufRead,
    mut output: impl Write,
    human: Option<&PlanningDomain>,
    problem: &PlanningProblem,
    excuse_banner: &str,
) -> Result<DemonstrationTrace, String> {
    let task: Option<GroundTask> = match human {
        Some(domain) => {
            Some(ground(domain, problem, &GroundConfig::default()).map_err(|e| e.to_string())?)
        }
        None => None,
    };

    let initial: BTreeSet<Atom> = problem.init.iter().cloned().collect();
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut current = initial.clone();
    let mut staged_adds: BTreeSet<Atom> = BTreeSet::new();
    let mut staged_dels: BTreeSet<Atom> = BTreeSet::new();
    let mut confirm_done = false;

    let w = &mut output;
    writeln!(w, "guidance: {}", excuse_banner.replace('\n', "; ")).ok();
    writeln!(
        w,
        "commands: {} state, excuse, undo, done, abort",
        if task.is_some() { "do (action args...)," } else { "add (atom), del (atom), step <label> [obj...]," }
    )
    .ok();

    for line in input.lines() {
        let line = line.map_err(|e| e.to_string())?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (cmd, rest) = match line.split_once(char::is_whitespace) {
            Some((c, r)) => (c, r.trim()),
            None => (line, ""),
        };
        if cmd != "done" {
            confirm_done = false;
        }
        match cmd {
            "state" => {
                for atom in &current {
                    writeln!(w, "  {atom}").ok();
                }
            }
            "excuse" => {
                writeln!(w, "guidance: {}", excuse_banner.replace('\n', "; ")).ok();
            }
            "do" => {
                let Some(task) = &task else {
                    writeln!(w, "no human model loaded; use add/del/step").ok();
                    continue;
                };
                match do_action(task, &current, rest) {
                    Ok((step, next)) => {
                        writeln!(w, "ok: {}", rest.trim()).ok();
                        steps.push(step);
                        current = next;
                    }
                    Err(msg) => {
                        writeln!(w, "{msg}").ok();
                    }
                }
            }
            "add" | "del" => {
                if task.is_some() {
                    writeln!(w, "validated session: use `do` instead of free-form edits").ok();
                    continue;
                }
                match parse_atom(rest) {
                    Ok(atom) => {
                        if cmd == "add" {
                            staged_dels.remove(&atom);
                            staged_adds.insert(atom);
                        } else {
                            staged_adds.remove(&atom);
                            staged_dels.insert(atom);
                        }
                        writeln!(w, "staged").ok();
                    }
                    Err(e) => {
                        writeln!(w, "bad atom: {e}").ok();
                    }
                }
            }
            "step" => {
                if task.is_some() {
                    writeln!(w, "validated session: use `do` instead of free-form edits").ok();
                    continue;
                }
                let mut words = rest.split_whitespace();
                let Some(label) = words.next() else {
                    writeln!(w, "usage: step <label> [touched objects...]").ok();
                    continue;
                };
                let label = match Ident::new(label) {
                    Ok(l) => l,
                    Err(e) => {
                        writeln!(w, "{e}").ok();
                        continue;
                    }
                };
                let touched: Result<Vec<Ident>, String> = words.map(Ident::new).collect();
                let touched = match touched {
                    Ok(t) => t,
                    Err(e) => {
                        writeln!(w, "{e}").ok();
                        continue;
                    }
                };
                let pre = current.clone();
                for atom in &staged_dels {
                    current.remove(atom);
                }
                for atom in &staged_adds {
                    current.insert(atom.clone());
                }
                steps.push(TraceStep { label, touched, pre, post: current.clone() });
                staged_adds.clear();
                staged_dels.clear();
                writeln!(w, "step recorded").ok();
            }
            "undo" => match steps.pop() {
                Some(step) => {
                    current = step.pre;
                    writeln!(w, "undone: {}", step.label).ok();
                }
                None => {
                    writeln!(w, "nothing to undo").ok();
                }
            },
            "done" => {
                let achieved = excuse_banner.is_empty()
                    || excuse_achieved(&current, excuse_banner);
                if !achieved && !confirm_done {
                    writeln!(
                        w,
                        "the guidance state is not reached yet; type `done` again to finish anyway"
                    )
                    .ok();
                    confirm_done = true;
                    continue;
                }
                return Ok(DemonstrationTrace::new(initial, steps, Provenance::Interactive));
            }
            "abort" => return Err("session aborted by the demonstrator".into()),
            other => {
                writeln!(w, "unknown command `{other}`").ok();
            }
        }
    }
    Err("input ended before `done`".into())
}

/// The banner lists added atoms in display form; the loose check here only
/// gates the are-you-sure prompt, the real misdirection check runs later.
fn excuse_achieved(current: &BTreeSet<Atom>, banner: &str) -> bool {
    let rendered: Vec<String> = current
        .iter()
        .map(|a| {
            let mut parts = vec![camel(a.pred.as_str())];
            parts.extend(a.args.iter().map(|x| camel(x.as_str())));
            parts.join(" ")
        })
        .collect();
    banner.lines().all(|line| rendered.iter().any(|r| r == line))
}

fn camel(name: &str) -> String {
    name.split(['-', '_'])
        .filter(|s| !s.is_empty())
        .map(|seg| {
            let mut chars = seg.chars();
            match chars.next() {
                Some(c) => c.to_ascii_uppercase().to_string() + chars.as_str(),
                None => String::new(),
            }
        })
        .collect()
}

fn do_action(
    task: &GroundTask,
    current: &BTreeSet<Atom>,
    rest: &str,
) -> Result<(TraceStep, BTreeSet<Atom>), String> {
    let body = rest
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| "usage: do (action arg1 arg2 ...)".to_string())?;
    let mut words = body.split_whitespace();
    let name = words.next().ok_or_else(|| "empty action".to_string())?.to_ascii_lowercase();
    let args: Vec<String> = words.map(|x| x.to_ascii_lowercase()).collect();

    let idx = task
        .actions
        .iter()
        .position(|a| {
            a.schema.as_str() == name
                && a.args.len() == args.len()
                && a.args.iter().zip(&args).all(|(x, y)| x.as_str() == y)
        })
        .ok_or_else(|| {
            let mut names: Vec<&str> =
                task.actions.iter().map(|a| a.schema.as_str()).collect();
            names.sort_unstable();
            names.dedup();
            format!("unknown action; available: {}", names.join(", "))
        })?;
    let action = &task.actions[idx];

    let state = task
        .state_from_atoms(current.iter())
        .map_err(|e| e.to_string())?;
    match apply(&state, action) {
        Some(next) => {
            let mut touched = Vec::new();
            for arg in &action.args {
                if !touched.contains(arg) {
                    touched.push(arg.clone());
                }
            }
            let post: BTreeSet<Atom> = task.atoms_in_state(&next).into_iter().collect();
            Ok((
                TraceStep {
                    label: action.schema.clone(),
                    touched,
                    pre: current.clone(),
                    post: post.clone(),
                },
                post,
            ))
        }
        None => {
            let unmet: Vec<String> = action
                .pre
                .iter()
                .filter(|&&p| !state.contains(p))
                .map(|&p| task.atom(p).to_string())
                .collect();
            Err(format!("illegal action; unmet preconditions: {}", unmet.join(" ")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn kitchen() -> (PlanningDomain, PlanningProblem) {
        let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
        let dtext = std::fs::read_to_string(root.join("domains/kitchen1_human.pddl")).unwrap();
        let domain = excuse_guide_core::pddl::parse_domain(&dtext).unwrap();
        let ptext = std::fs::read_to_string(root.join("domains/kitchen1.pddl")).unwrap();
        let problem = excuse_guide_core::pddl::parse_problem(&ptext, &domain).unwrap();
        (domain, problem)
    }

    fn run(script: &str) -> Result<DemonstrationTrace, String> {
        let (domain, problem) = kitchen();
        let mut out = Vec::new();
        run_repl(
            Cursor::new(script),
            &mut out,
            Some(&domain),
            &problem,
            "Open PinkDrawer",
        )
    }

    #[test]
    fn validated_walk_to_the_excuse_state() {
        let trace = run("do (move start front)\ndo (open-drawer pink-drawer front)\ndone\n")
            .unwrap();
        assert_eq!(trace.len_effective(), 2);
        assert!(trace.validate_chain().is_ok());
        assert!(trace
            .final_state()
            .contains(&parse_atom("(open pink-drawer)").unwrap()));
    }

    #[test]
    fn undo_restores_the_previous_state() {
        let trace =
            run("do (move start front)\nundo\ndo (move start side)\ndone\ndone\n").unwrap();
        assert_eq!(trace.len_effective(), 1);
        assert!(trace.final_state().contains(&parse_atom("(at side)").unwrap()));
    }

    #[test]
    fn unknown_action_lists_available_ones() {
        let (domain, problem) = kitchen();
        let mut out = Vec::new();
        let script = "do (fly away)\ndo (move start front)\ndo (open-drawer pink-drawer front)\ndone\n";
        run_repl(Cursor::new(script), &mut out, Some(&domain), &problem, "Open PinkDrawer")
            .unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("unknown action; available:"));
        assert!(text.contains("open-drawer"));
    }

    #[test]
    fn illegal_action_reports_unmet_preconditions() {
        let (domain, problem) = kitchen();
        let mut out = Vec::new();
        let script = "do (open-drawer pink-drawer front)\ndo (move start front)\ndo (open-drawer pink-drawer front)\ndone\n";
        run_repl(Cursor::new(script), &mut out, Some(&domain), &problem, "Open PinkDrawer")
            .unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("unmet preconditions"));
        assert!(text.contains("(at front)"));
    }

    #[test]
    fn premature_done_asks_for_confirmation() {
        let trace = run("do (move start front)\ndone\ndone\n").unwrap();
        assert_eq!(trace.len_effective(), 1);
    }

    #[test]
    fn abort_cancels_the_session() {
        assert!(run("do (move start front)\nabort\n").is_err());
    }

    #[test]
    fn freeform_edits_record_verbatim_steps() {
        let (_, problem) = kitchen();
        let mut out = Vec::new();
        let script = "add (open pink-drawer)\ndel (closed pink-drawer)\nstep open-drawer pink-drawer\ndone\n";
        let trace =
            run_repl(Cursor::new(script), &mut out, None, &problem, "Open PinkDrawer").unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].touched.len(), 1);
        assert!(trace.final_state().contains(&parse_atom("(open pink-drawer)").unwrap()));
        assert!(trace.validate_chain().is_ok());
    }
}

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::Serialize;

use excuse_guide_core::demo::{
    learn_operators, map_embodiment, merge_domains, read_trace, simulate_demonstrator,
    write_trace, DemoTarget, DemonstrationTrace, EmbodimentMapping, MappingEntry,
};
use excuse_guide_core::excuse::{
    generate_excuse, render_excuse, Excuse, ExcuseOutcome, ExcuseReport, ExcuseSearchConfig,
    RenderStyle,
};
use excuse_guide_core::metrics::{
    check_misdirected, f1_savings, post_demo_solvability, useful_fraction, DemoLengths,
    MetricsReport, MisdirectionVerdict, PostDemoVerdict, WitnessStep,
};
use excuse_guide_core::pddl::{emit_domain, parse_domain, PlanningDomain, PlanningProblem};
use excuse_guide_core::planner::{
    format_plan, ground, prove_unsolvable, solve_from, GroundConfig, GroundTask, SearchBudget,
    SolveMode, SolveOutcome, UnsolvabilityVerdict,
};

use crate::{
    input_err, persist, Mode, EXIT_INPUT, EXIT_MISDIRECTED, EXIT_MISMATCH, EXIT_OK,
    EXIT_UNSOLVABLE_AFTER_DEMO,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SessionKind {
    Guided,
    Unguided,
}

pub struct SessionConfig {
    pub kind: SessionKind,
    pub robot_domain: PathBuf,
    pub human_domain: Option<PathBuf>,
    pub problem: PathBuf,
    pub mode: Mode,
    pub trace: Option<PathBuf>,
    pub mapping: Option<PathBuf>,
    pub max_edit_size: usize,
    pub enumerate_all: bool,
    pub out: Option<PathBuf>,
}

/// One entry in the ordered session event log.
#[derive(Serialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
enum Event {
    Unsolvability {
        verdict: String,
        detail: String,
    },
    Excuse {
        banner: String,
        full_diff: String,
        report: ExcuseReport,
    },
    Demonstration {
        provenance: String,
        length: usize,
        steps: Vec<StepRecord>,
    },
    Learned {
        operators: Vec<String>,
    },
    Merge {
        added: Vec<String>,
        dropped_duplicates: Vec<String>,
        renamed: Vec<(String, String)>,
    },
    Misdirection {
        verdict: String,
        detail: Vec<String>,
    },
    Verification {
        solvable: bool,
        witness: Vec<WitnessStep>,
        certificate: Option<String>,
    },
    Metrics {
        report: MetricsReport,
    },
    Failure {
        stage: String,
        message: String,
    },
}

#[derive(Serialize)]
struct StepRecord {
    label: String,
    touched: Vec<String>,
    adds: Vec<String>,
    dels: Vec<String>,
}

/// The persisted transcript. Wall-clock times live in exactly one field so
/// transcripts compare byte-identically across runs once it is excluded.
#[derive(Serialize)]
struct SessionTranscript {
    session: String,
    config: TranscriptConfig,
    events: Vec<Event>,
    exit_code: u8,
    timestamps: Timestamps,
}

#[derive(Serialize)]
struct TranscriptConfig {
    robot_domain: String,
    human_domain: Option<String>,
    problem: String,
    mode: String,
    max_edit_size: usize,
}

#[derive(Serialize)]
struct Timestamps {
    started: String,
    finished: String,
}

fn now() -> String {
    humantime_like(SystemTime::now())
}

fn humantime_like(t: SystemTime) -> String {
    match t.duration_since(SystemTime::UNIX_EPOCH) {
        Ok(d) => format!("{}.{:09}", d.as_secs(), d.subsec_nanos()),
        Err(_) => "0".into(),
    }
}

fn step_records(trace: &DemonstrationTrace) -> Vec<StepRecord> {
    trace
        .steps
        .iter()
        .map(|s| StepRecord {
            label: s.label.to_string(),
            touched: s.touched.iter().map(|o| o.to_string()).collect(),
            adds: s.adds().iter().map(|a| a.to_string()).collect(),
            dels: s.dels().iter().map(|a| a.to_string()).collect(),
        })
        .collect()
}

struct SessionState {
    events: Vec<Event>,
    started: String,
}

impl SessionState {
    fn fail(&mut self, stage: &str, message: String, code: u8, cfg: &SessionConfig) -> u8 {
        eprintln!("error [{stage}]: {message}");
        self.events.push(Event::Failure { stage: stage.into(), message });
        finish(self, cfg, code);
        code
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Interactive => "interactive",
        Mode::Replay => "replay",
        Mode::Simulate => "simulate",
    }
}

fn finish(state: &mut SessionState, cfg: &SessionConfig, code: u8) {
    let transcript = SessionTranscript {
        session: match cfg.kind {
            SessionKind::Guided => "guided".into(),
            SessionKind::Unguided => "unguided".into(),
        },
        config: TranscriptConfig {
            robot_domain: cfg.robot_domain.display().to_string(),
            human_domain: cfg.human_domain.as_ref().map(|p| p.display().to_string()),
            problem: cfg.problem.display().to_string(),
            mode: mode_name(cfg.mode).into(),
            max_edit_size: cfg.max_edit_size,
        },
        events: std::mem::take(&mut state.events),
        exit_code: code,
        timestamps: Timestamps { started: state.started.clone(), finished: now() },
    };
    if let Some(dir) = &cfg.out {
        let json = serde_json::to_string_pretty(&transcript).expect("serializable transcript");
        if let Err(e) = persist(dir, "transcript.json", &json) {
            eprintln!("error [output]: could not persist transcript: {e}");
        }
    }
}

pub fn run_session(cfg: SessionConfig) -> u8 {
    let mut state = SessionState { events: Vec::new(), started: now() };

    // -- inputs -------------------------------------------------------
    let (robot, problem) = match crate::load_inputs(&cfg.robot_domain, &cfg.problem) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let human: Option<PlanningDomain> = match &cfg.human_domain {
        Some(path) => match std::fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|t| parse_domain(&t).map_err(|e| e.to_string()))
        {
            Ok(d) => Some(d),
            Err(e) => return input_err(&path.display().to_string(), e),
        },
        None => None,
    };
    let mapping = match &cfg.mapping {
        Some(path) => match load_mapping(path) {
            Ok(m) => m,
            Err(e) => return input_err(&path.display().to_string(), e),
        },
        None => EmbodimentMapping::identity(),
    };
    if cfg.mode == Mode::Simulate && human.is_none() {
        return input_err("config", "simulate mode requires --human-domain");
    }

    let robot_task = match ground(&robot, &problem, &GroundConfig::default()) {
        Ok(t) => t,
        Err(e) => return state.fail("grounding", e.to_string(), EXIT_INPUT, &cfg),
    };

    // -- unsolvability ------------------------------------------------
    match prove_unsolvable(&robot_task, &SearchBudget::default()) {
        UnsolvabilityVerdict::Solvable(plan) => {
            println!("task is already solvable; no demonstration needed");
            print!("{}", format_plan(&robot_task, &plan));
            state.events.push(Event::Unsolvability {
                verdict: "solvable".into(),
                detail: format!("plan of length {}", plan.len()),
            });
            finish(&mut state, &cfg, EXIT_OK);
            return EXIT_OK;
        }
        UnsolvabilityVerdict::ProvenUnsolvable(cert) => {
            println!("task is unsolvable for the robot ({cert:?})");
            state.events.push(Event::Unsolvability {
                verdict: "proven-unsolvable".into(),
                detail: format!("{cert:?}"),
            });
        }
        UnsolvabilityVerdict::Unknown => {
            return state.fail(
                "unsolvability",
                "search budget exhausted before a verdict".into(),
                EXIT_MISMATCH,
                &cfg,
            );
        }
    }

    // -- excuse -------------------------------------------------------
    let excuse_cfg = ExcuseSearchConfig {
        max_edit_size: cfg.max_edit_size,
        enumerate_all: cfg.enumerate_all,
        ..ExcuseSearchConfig::default()
    };
    let excuse: Excuse = match generate_excuse(&robot_task, &excuse_cfg) {
        ExcuseOutcome::Excuse(e, _) => e,
        ExcuseOutcome::TaskAlreadySolvable(_) => {
            unreachable!("unsolvability was just proven")
        }
        ExcuseOutcome::NoExcuseWithinBound(diag) => {
            return state.fail(
                "excuse",
                format!("no excuse within {} moves ({diag:?})", cfg.max_edit_size),
                EXIT_MISMATCH,
                &cfg,
            );
        }
    };
    let banner = render_excuse(&excuse, RenderStyle::PositiveOnly);
    let full_diff = render_excuse(&excuse, RenderStyle::FullDiff);
    println!("\n=== guidance ===");
    println!("{banner}");
    println!("--");
    println!("{full_diff}");
    println!("================\n");
    state.events.push(Event::Excuse {
        banner: banner.clone(),
        full_diff,
        report: excuse.report(&robot_task),
    });

    // -- demonstration --------------------------------------------------
    let target = match cfg.kind {
        SessionKind::Guided => DemoTarget::ExcuseAdds(excuse.adds.clone()),
        SessionKind::Unguided => DemoTarget::TaskGoal,
    };
    let trace: DemonstrationTrace = match cfg.mode {
        Mode::Simulate => {
            match simulate_demonstrator(human.as_ref().expect("checked"), &problem, &target) {
                Ok(t) => t,
                Err(e) => return state.fail("demonstration", e.to_string(), EXIT_MISMATCH, &cfg),
            }
        }
        Mode::Replay => {
            let Some(path) = &cfg.trace else {
                return state.fail(
                    "demonstration",
                    "replay mode requires --trace".into(),
                    EXIT_INPUT,
                    &cfg,
                );
            };
            match std::fs::read_to_string(path)
                .map_err(|e| e.to_string())
                .and_then(|t| read_trace(&t).map_err(|e| e.to_string()))
            {
                Ok(t) => t,
                Err(e) => return state.fail("demonstration", e, EXIT_INPUT, &cfg),
            }
        }
        Mode::Interactive => {
            let stdin = std::io::stdin();
            let stdout = std::io::stdout();
            match crate::repl::run_repl(
                stdin.lock(),
                stdout.lock(),
                human.as_ref(),
                &problem,
                &banner,
            ) {
                Ok(t) => t,
                Err(e) => return state.fail("demonstration", e, EXIT_INPUT, &cfg),
            }
        }
    };
    if let Err(e) = trace.validate_chain() {
        return state.fail("demonstration", e.to_string(), EXIT_INPUT, &cfg);
    }
    println!("demonstration recorded: {} effective steps", trace.len_effective());
    state.events.push(Event::Demonstration {
        provenance: format!("{:?}", trace.provenance).to_lowercase(),
        length: trace.len_effective(),
        steps: step_records(&trace),
    });

    // -- learning -------------------------------------------------------
    let learned = match learn_operators(&trace, &robot, &problem.objects) {
        Ok(ops) => ops,
        Err(e) => return state.fail("learning", e.to_string(), EXIT_INPUT, &cfg),
    };
    state.events.push(Event::Learned {
        operators: learned.iter().map(|op| op.schema.name.to_string()).collect(),
    });
    let mapped = match map_embodiment(&learned, &mapping) {
        Ok(schemas) => schemas,
        Err(e) => return state.fail("embodiment", e.to_string(), EXIT_INPUT, &cfg),
    };

    // -- merge ----------------------------------------------------------
    let merged = merge_domains(&robot, &mapped, &problem.objects);
    state.events.push(Event::Merge {
        added: merged.added.iter().map(|n| n.to_string()).collect(),
        dropped_duplicates: merged
            .dropped_duplicates
            .iter()
            .map(|n| n.to_string())
            .collect(),
        renamed: merged
            .renamed
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
    });
    if let Some(dir) = &cfg.out {
        if let Err(e) = persist(dir, "merged_domain.pddl", &emit_domain(&merged.domain)) {
            return state.fail("output", e.to_string(), EXIT_INPUT, &cfg);
        }
        if let Err(e) = persist(dir, "demonstration.trace.jsonl", &write_trace(&trace)) {
            return state.fail("output", e.to_string(), EXIT_INPUT, &cfg);
        }
    }

    // -- misdirection ----------------------------------------------------
    let final_state: BTreeSet<_> = trace.final_state();
    let misdirection = match cfg.kind {
        SessionKind::Guided => match check_misdirected(&robot_task, &excuse, &final_state) {
            Ok(v) => v,
            Err(e) => return state.fail("misdirection", e.to_string(), EXIT_INPUT, &cfg),
        },
        SessionKind::Unguided => MisdirectionVerdict::Ok,
    };
    let (mis_name, mis_detail, misdirected) = match &misdirection {
        MisdirectionVerdict::Ok => ("ok".to_string(), Vec::new(), false),
        MisdirectionVerdict::Misdirected { extra_changes } => {
            ("misdirected".to_string(), extra_changes.clone(), true)
        }
        MisdirectionVerdict::ExcuseNotAchieved { missing } => {
            ("excuse-not-achieved".to_string(), missing.clone(), false)
        }
        MisdirectionVerdict::Unknown => ("unknown".to_string(), Vec::new(), false),
    };
    state.events.push(Event::Misdirection { verdict: mis_name.clone(), detail: mis_detail.clone() });

    // -- post-demonstration solvability -----------------------------------
    let verdict = match post_demo_solvability(&robot, &mapped, &problem) {
        Ok(v) => v,
        Err(e) => return state.fail("verification", e.to_string(), EXIT_INPUT, &cfg),
    };
    let (solvable, witness, certificate) = match &verdict {
        PostDemoVerdict::Solvable { witness } => (true, witness.clone(), None),
        PostDemoVerdict::Unsolvable { certificate } => (false, Vec::new(), Some(certificate.clone())),
        PostDemoVerdict::Unknown => (false, Vec::new(), Some("budget exhausted".into())),
    };
    state.events.push(Event::Verification {
        solvable,
        witness: witness.clone(),
        certificate: certificate.clone(),
    });
    if solvable {
        println!("post-demonstration task is solvable; witness:");
        for step in &witness {
            println!("  {} [{:?}]", step.action, step.origin);
        }
    } else {
        println!("post-demonstration task is NOT solvable: {}", certificate.as_deref().unwrap_or(""));
    }

    // -- metrics ----------------------------------------------------------
    let (full_demo, remaining) = predicted_lengths(&human, &problem, &robot_task, &excuse);
    let f1 = match (remaining, full_demo) {
        (Some(rem), Some(_full)) => {
            // the savings ratio uses the predicted full demonstration
            match cfg.kind {
                SessionKind::Guided => synth_f1(rem, full_demo.unwrap()),
                SessionKind::Unguided => match f1_savings(&trace, rem) {
                    Ok(f1) => Some(f1),
                    Err(_) => None,
                },
            }
        }
        _ => None,
    };
    let uf = match useful_fraction(&trace, &robot, &problem.objects, &mapping) {
        Ok(v) => v,
        Err(e) => return state.fail("metrics", e.to_string(), EXIT_INPUT, &cfg),
    };
    let report = MetricsReport {
        f1_savings: f1.as_ref().map(|f| f.ratio),
        f1_clamped: f1.as_ref().map(|f| f.clamped).unwrap_or(false),
        useful_fraction: uf,
        misdirected,
        misdirection_diagnosis: mis_detail,
        post_demo_solvable: solvable,
        post_demo_witness: witness,
        post_demo_certificate: certificate,
        demo_lengths: DemoLengths {
            demo: trace.len_effective(),
            full_demo,
            remaining,
        },
    };
    println!("\n{}", report.render_text());
    if let Some(dir) = &cfg.out {
        let json = serde_json::to_string_pretty(&report).expect("serializable report");
        if let Err(e) = persist(dir, "report.json", &json) {
            return state.fail("output", e.to_string(), EXIT_INPUT, &cfg);
        }
    }
    state.events.push(Event::Metrics { report });

    let code = if misdirected {
        EXIT_MISDIRECTED
    } else if !solvable {
        EXIT_UNSOLVABLE_AFTER_DEMO
    } else {
        EXIT_OK
    };
    finish(&mut state, &cfg, code);
    code
}

fn synth_f1(remaining: usize, full: usize) -> Option<excuse_guide_core::metrics::F1Savings> {
    if full == 0 || remaining == 0 {
        return None;
    }
    let raw = remaining as f64 / full as f64;
    Some(excuse_guide_core::metrics::F1Savings {
        ratio: raw.clamp(0.0, 1.0),
        clamped: raw > 1.0,
    })
}

/// Optimal human-model lengths for the full demonstration and the remaining
/// plan from the excuse state.
fn predicted_lengths(
    human: &Option<PlanningDomain>,
    problem: &PlanningProblem,
    robot_task: &GroundTask,
    excuse: &Excuse,
) -> (Option<usize>, Option<usize>) {
    let Some(human) = human else { return (None, None) };
    let Ok(human_task) = ground(human, problem, &GroundConfig::default()) else {
        return (None, None);
    };
    let full = match solve_from(
        &human_task,
        &human_task.init,
        &human_task.goal_atoms,
        SolveMode::Optimal,
        &SearchBudget::default(),
    ) {
        SolveOutcome::Plan(p) => Some(p.len()),
        _ => None,
    };
    // the excuse state in the human task's fluent universe
    let mut edited = human_task.init.clone();
    for atom in &excuse.removes {
        match human_task.atom_id(atom) {
            Some(id) => edited.remove(id),
            None => return (full, None),
        };
    }
    for atom in &excuse.adds {
        match human_task.atom_id(atom) {
            Some(id) => edited.insert(id),
            None => return (full, None),
        };
    }
    let remaining = match solve_from(
        &human_task,
        &edited,
        &human_task.goal_atoms,
        SolveMode::Optimal,
        &SearchBudget::default(),
    ) {
        SolveOutcome::Plan(p) => Some(p.len()),
        _ => None,
    };
    let _ = robot_task;
    (full, remaining)
}

fn load_mapping(path: &Path) -> Result<EmbodimentMapping, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let entry: MappingEntry = serde_json::from_str(line)
            .map_err(|e| format!("line {}: invalid mapping record: {e}", i + 1))?;
        entries.push(entry);
    }
    EmbodimentMapping::from_entries(entries).map_err(|e| e.to_string())
}

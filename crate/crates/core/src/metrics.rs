//! Effectiveness measures over demonstration and learning artifacts: size
//! savings, fraction of useful demonstration steps, misdirected-guidance
//! detection and post-demonstration solvability. All measures are pure
//! functions of their inputs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demo::{learn_step, DemonstrationTrace, EmbodimentMapping, LearnError};
use crate::excuse::Excuse;
use crate::pddl::{Atom, ObjectName, PlanningDomain, PlanningProblem, TypeName};
use crate::planner::{
    ground, prove_unsolvable, solve_from, GroundConfig, GroundError, GroundTask, SearchBudget,
    SolveMode, SolveOutcome, UnsolvabilityCertificate, UnsolvabilityVerdict,
};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("full demonstration trace has no effective steps")]
    EmptyFullTrace,
    #[error("remaining plan length is zero: the excuse state would model the goal")]
    RemainingZero,
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Ground(#[from] GroundError),
}

/// Demonstration-size savings: the fraction of the full demonstration the
/// guided demonstrator no longer performs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct F1Savings {
    pub ratio: f64,
    /// Set when the raw ratio fell outside [0,1] and was clamped.
    pub clamped: bool,
}

/// `remaining / full`: the fractional length of the remaining plan, from the
/// excuse state to the goal, that no longer has to be demonstrated.
pub fn f1_savings(
    full_trace: &DemonstrationTrace,
    remaining_plan_len: usize,
) -> Result<F1Savings, MetricsError> {
    let full = full_trace.len_effective();
    if full == 0 {
        return Err(MetricsError::EmptyFullTrace);
    }
    if remaining_plan_len == 0 {
        return Err(MetricsError::RemainingZero);
    }
    let raw = remaining_plan_len as f64 / full as f64;
    let ratio = raw.clamp(0.0, 1.0);
    Ok(F1Savings { ratio, clamped: raw != ratio })
}

/// Fraction of demonstrated steps the robot could not already perform. A step
/// counts as already-known when some existing robot schema subsumes its
/// mapped learned operator (same effects, no stronger precondition) — label
/// identity is demonstrator-chosen and unreliable.
pub fn useful_fraction(
    trace: &DemonstrationTrace,
    robot: &PlanningDomain,
    objects: &BTreeMap<ObjectName, TypeName>,
    mapping: &EmbodimentMapping,
) -> Result<f64, MetricsError> {
    let mut total = 0usize;
    let mut new_steps = 0usize;
    for (index, step) in trace.steps.iter().enumerate() {
        if !step.is_effective() {
            continue;
        }
        total += 1;
        let learned = learn_step(step, index, robot, objects, step.label.clone())?;
        let mapped = crate::demo::map_embodiment(&[learned], mapping)
            .map_err(|e| MetricsError::Learn(LearnError::BadAtom { index, message: e.to_string() }))?;
        let known = robot.actions.iter().any(|r| r.subsumes(&mapped[0]));
        if !known {
            new_steps += 1;
        }
    }
    if total == 0 {
        return Err(MetricsError::EmptyFullTrace);
    }
    Ok(new_steps as f64 / total as f64)
}

/// Verdict of the misdirected-guidance check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MisdirectionVerdict {
    Ok,
    /// The excuse literals hold but the task from the reached state is
    /// unsolvable; the diagnosis lists the extra changed facts relative to
    /// the excuse state.
    Misdirected { extra_changes: Vec<String> },
    /// The demonstration never achieved the excuse literals.
    ExcuseNotAchieved { missing: Vec<String> },
    /// Solvability from the reached state exceeded the search budget.
    Unknown,
}

/// Checks whether a demonstration that satisfied the excuse literals left the
/// robot's task solvable, or misdirected it by changing more facts than the
/// excuse demanded.
pub fn check_misdirected(
    task: &GroundTask,
    excuse: &Excuse,
    result_state: &BTreeSet<Atom>,
) -> Result<MisdirectionVerdict, MetricsError> {
    let mut missing: Vec<String> = Vec::new();
    for atom in &excuse.adds {
        if !result_state.contains(atom) {
            missing.push(format!("missing {atom}"));
        }
    }
    for atom in &excuse.removes {
        if result_state.contains(atom) {
            missing.push(format!("still holds {atom}"));
        }
    }
    if !missing.is_empty() {
        return Ok(MisdirectionVerdict::ExcuseNotAchieved { missing });
    }

    let state = task.state_from_atoms(result_state.iter())?;
    match solve_from(task, &state, &task.goal_atoms, SolveMode::Satisficing, &SearchBudget::default())
    {
        SolveOutcome::Plan(_) => Ok(MisdirectionVerdict::Ok),
        SolveOutcome::BudgetExceeded => Ok(MisdirectionVerdict::Unknown),
        SolveOutcome::Unsolvable => {
            // diff against the excuse state I' = (I \ removes) ∪ adds
            let mut excuse_state: BTreeSet<Atom> =
                task.atoms_in_state(&task.init).into_iter().collect();
            for atom in &excuse.removes {
                excuse_state.remove(atom);
            }
            for atom in &excuse.adds {
                excuse_state.insert(atom.clone());
            }
            let mut extra: Vec<String> = result_state
                .difference(&excuse_state)
                .map(|a| format!("+ {a}"))
                .collect();
            extra.extend(excuse_state.difference(result_state).map(|a| format!("- {a}")));
            Ok(MisdirectionVerdict::Misdirected { extra_changes: extra })
        }
    }
}

/// Origin of a witness step after merging.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepOrigin {
    Prior,
    Learned,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessStep {
    pub action: String,
    pub origin: StepOrigin,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PostDemoVerdict {
    Solvable { witness: Vec<WitnessStep> },
    Unsolvable { certificate: String },
    Unknown,
}

impl PostDemoVerdict {
    pub fn is_solvable(&self) -> bool {
        matches!(self, PostDemoVerdict::Solvable { .. })
    }
}

/// Solves the task over the merged domain (prior knowledge plus
/// embodiment-mapped learned operators) and annotates each witness step with
/// its origin.
pub fn post_demo_solvability(
    robot: &PlanningDomain,
    learned: &[crate::pddl::ActionSchema],
    problem: &PlanningProblem,
) -> Result<PostDemoVerdict, MetricsError> {
    let merged = crate::demo::merge_domains(robot, learned, &problem.objects);
    let task = ground(&merged.domain, problem, &GroundConfig::default())?;
    let learned_names = merged.learned_names();
    match prove_unsolvable(&task, &SearchBudget::default()) {
        UnsolvabilityVerdict::Solvable(plan) => {
            let witness = plan
                .steps
                .iter()
                .map(|&i| {
                    let action = &task.actions[i];
                    WitnessStep {
                        action: action.display(),
                        origin: if learned_names.contains(&action.schema) {
                            StepOrigin::Learned
                        } else {
                            StepOrigin::Prior
                        },
                    }
                })
                .collect();
            Ok(PostDemoVerdict::Solvable { witness })
        }
        UnsolvabilityVerdict::ProvenUnsolvable(cert) => {
            let certificate = match cert {
                UnsolvabilityCertificate::UnreachableGoalAtoms(atoms) => format!(
                    "goal atoms unreachable even under delete relaxation: {}",
                    atoms.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")
                ),
                UnsolvabilityCertificate::ExhaustedStateSpace => {
                    "reachable state space exhausted without reaching the goal".into()
                }
            };
            Ok(PostDemoVerdict::Unsolvable { certificate })
        }
        UnsolvabilityVerdict::Unknown => Ok(PostDemoVerdict::Unknown),
    }
}

/// Demonstration lengths feeding the savings measures. The predicted full
/// and remaining lengths need a human model and may be absent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoLengths {
    pub demo: usize,
    pub full_demo: Option<usize>,
    pub remaining: Option<usize>,
}

/// The four guided-demonstration effectiveness measures for one session.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricsReport {
    pub f1_savings: Option<f64>,
    pub f1_clamped: bool,
    pub useful_fraction: f64,
    pub misdirected: bool,
    pub misdirection_diagnosis: Vec<String>,
    pub post_demo_solvable: bool,
    pub post_demo_witness: Vec<WitnessStep>,
    pub post_demo_certificate: Option<String>,
    pub demo_lengths: DemoLengths,
}

impl MetricsReport {
    /// Aligned text block mirroring the predicted-lengths table layout.
    pub fn render_text(&self) -> String {
        let opt = |v: Option<usize>| v.map_or_else(|| "-".into(), |n| n.to_string());
        let mut out = String::new();
        out.push_str(&format!(
            "{:<22} {:>8} {:>8} {:>10}\n",
            "", "demo", "G_R/P", "remaining"
        ));
        out.push_str(&format!(
            "{:<22} {:>8} {:>8} {:>10}\n",
            "demonstration size",
            self.demo_lengths.demo,
            opt(self.demo_lengths.full_demo),
            opt(self.demo_lengths.remaining)
        ));
        match self.f1_savings {
            Some(f1) => out.push_str(&format!("f1 savings          {f1:>10.3}\n")),
            None => out.push_str("f1 savings                   -\n"),
        }
        out.push_str(&format!("useful fraction     {:>10.3}\n", self.useful_fraction));
        out.push_str(&format!("misdirected         {:>10}\n", self.misdirected));
        out.push_str(&format!("post-demo solvable  {:>10}\n", self.post_demo_solvable));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::{Provenance, TraceStep};
    use crate::pddl::parse_atom;

    fn trace_of_len(n: usize) -> DemonstrationTrace {
        let mut steps = Vec::new();
        let mut state: BTreeSet<Atom> = BTreeSet::new();
        for i in 0..n {
            let pre = state.clone();
            state.insert(parse_atom(&format!("(p{i})")).unwrap());
            steps.push(TraceStep {
                label: crate::pddl::Ident::new(&format!("a{i}")).unwrap(),
                touched: vec![],
                pre,
                post: state.clone(),
            });
        }
        DemonstrationTrace::new(BTreeSet::new(), steps, Provenance::Simulated)
    }

    #[test]
    fn f1_matches_the_kitchen_arithmetic() {
        let f1 = f1_savings(&trace_of_len(9), 7).unwrap();
        assert!((f1.ratio - 7.0 / 9.0).abs() < 1e-12);
        assert!(!f1.clamped);
        let f1 = f1_savings(&trace_of_len(11), 10).unwrap();
        assert!((f1.ratio - 10.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn f1_guards_degenerate_inputs() {
        assert_eq!(f1_savings(&trace_of_len(0), 3), Err(MetricsError::EmptyFullTrace));
        assert_eq!(f1_savings(&trace_of_len(5), 0), Err(MetricsError::RemainingZero));
        let clamped = f1_savings(&trace_of_len(3), 5).unwrap();
        assert_eq!(clamped.ratio, 1.0);
        assert!(clamped.clamped);
    }
}

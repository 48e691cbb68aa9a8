use thiserror::Error;

use super::ground::GroundTask;
use super::state::{apply, models_goal, State};

/// A plan: an ordered list of references into the task's ground actions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<usize>,
}

impl Plan {
    pub fn new(steps: Vec<usize>) -> Plan {
        Plan { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Sum of the costs of all actions in the plan.
    pub fn cost(&self, task: &GroundTask) -> u32 {
        self.steps.iter().map(|&i| task.actions[i].cost).sum()
    }

    pub fn action_lines(&self, task: &GroundTask) -> Vec<String> {
        self.steps.iter().map(|&i| task.actions[i].display()).collect()
    }
}

/// Verdict of validating a plan against a task.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanVerdict {
    /// The plan is applicable from the initial state and reaches the goal;
    /// the cost is finite exactly in this case.
    Valid { cost: u32 },
    /// The step at this index is inapplicable (cost is the infinite sentinel).
    InapplicableStep { index: usize },
    /// Every step applies but the final state does not model the goal.
    GoalNotReached,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PlanIoError {
    #[error("line {line}: malformed plan line `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: action {action} does not belong to the task")]
    ForeignAction { line: usize, action: String },
    #[error("plan references action index {index} outside the task")]
    ForeignIndex { index: usize },
}

/// Validates a plan: applies it from the initial state and checks the goal.
pub fn validate_plan(task: &GroundTask, plan: &Plan) -> Result<PlanVerdict, PlanIoError> {
    validate_plan_from(task, &task.init, plan)
}

/// Same as [`validate_plan`] but from an explicit start state.
pub fn validate_plan_from(
    task: &GroundTask,
    start: &State,
    plan: &Plan,
) -> Result<PlanVerdict, PlanIoError> {
    if let Some(&bad) = plan.steps.iter().find(|&&i| i >= task.actions.len()) {
        return Err(PlanIoError::ForeignIndex { index: bad });
    }
    let mut state = start.clone();
    for (index, &step) in plan.steps.iter().enumerate() {
        match apply(&state, &task.actions[step]) {
            Some(next) => state = next,
            None => return Ok(PlanVerdict::InapplicableStep { index }),
        }
    }
    if models_goal(task, &state) {
        Ok(PlanVerdict::Valid { cost: plan.cost(task) })
    } else {
        Ok(PlanVerdict::GoalNotReached)
    }
}

/// Renders the plan text format: a `; cost = N` comment followed by one
/// `(name arg1 arg2)` line per action.
pub fn format_plan(task: &GroundTask, plan: &Plan) -> String {
    let mut out = format!("; cost = {}\n", plan.cost(task));
    for line in plan.action_lines(task) {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Parses the plan text format against a task. Lines must name ground
/// actions of the task; `;` comments and blank lines are skipped.
pub fn parse_plan(text: &str, task: &GroundTask) -> Result<Plan, PlanIoError> {
    let mut steps = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let body = line
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| PlanIoError::Malformed { line: lineno + 1, text: line.into() })?;
        let mut words = body.split_whitespace();
        let name = words
            .next()
            .ok_or_else(|| PlanIoError::Malformed { line: lineno + 1, text: line.into() })?
            .to_ascii_lowercase();
        let args: Vec<String> = words.map(|w| w.to_ascii_lowercase()).collect();
        let found = task.actions.iter().position(|a| {
            a.schema.as_str() == name
                && a.args.len() == args.len()
                && a.args.iter().zip(&args).all(|(x, y)| x.as_str() == y)
        });
        match found {
            Some(idx) => steps.push(idx),
            None => {
                return Err(PlanIoError::ForeignAction { line: lineno + 1, action: line.into() })
            }
        }
    }
    Ok(Plan::new(steps))
}

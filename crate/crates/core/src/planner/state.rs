use fixedbitset::FixedBitSet;

use super::ground::{GroundAction, GroundTask};

/// A state is the set of ground atoms currently true, closed-world.
pub type State = FixedBitSet;

pub fn satisfies(state: &State, atoms: &[usize]) -> bool {
    atoms.iter().all(|&a| state.contains(a))
}

pub fn models_goal(task: &GroundTask, state: &State) -> bool {
    satisfies(state, &task.goal_atoms)
}

/// The transition function: undefined when the precondition does not hold,
/// otherwise `(s \ del) ∪ add`. Because grounding enforces disjoint add and
/// delete sets this equals `s ∪ add \ del`, so both effect orders coincide.
pub fn apply(state: &State, action: &GroundAction) -> Option<State> {
    if !satisfies(state, &action.pre) {
        return None;
    }
    let mut next = state.clone();
    for &d in &action.del {
        next.remove(d);
    }
    for &a in &action.add {
        next.insert(a);
    }
    Some(next)
}

/// Left fold of [`apply`] over a plan's steps. The empty sequence returns the
/// state unchanged; the first inapplicable step's index is reported.
pub fn apply_seq<'a>(
    state: &State,
    steps: impl IntoIterator<Item = &'a GroundAction>,
) -> Result<State, usize> {
    let mut current = state.clone();
    for (i, action) in steps.into_iter().enumerate() {
        current = apply(&current, action).ok_or(i)?;
    }
    Ok(current)
}

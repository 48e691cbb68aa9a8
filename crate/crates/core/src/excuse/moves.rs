use std::collections::{BTreeMap, BTreeSet};

use crate::planner::{AtomId, GroundTask, State};

use super::ExcuseSearchConfig;

/// One unit of excuse size. A declared complementary pair with exactly one
/// side true flips as a single move; every other candidate atom contributes a
/// raw add or remove.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EditMove {
    Add(AtomId),
    Remove(AtomId),
    Flip { remove: AtomId, add: AtomId },
}

impl EditMove {
    pub fn raw_size(&self) -> usize {
        match self {
            EditMove::Add(_) | EditMove::Remove(_) => 1,
            EditMove::Flip { .. } => 2,
        }
    }

    pub fn apply_to(&self, state: &mut State) {
        match *self {
            EditMove::Add(a) => state.insert(a),
            EditMove::Remove(r) => state.remove(r),
            EditMove::Flip { remove, add } => {
                state.remove(remove);
                state.insert(add);
            }
        }
    }
}

/// Builds the move universe in canonical order: removals and flips first,
/// keyed by the removed atom, then pure additions, each phase ordered by the
/// canonical atom order. Moves touch pairwise-disjoint atoms, so every
/// combination of distinct moves is a well-formed edit set.
pub fn move_universe(task: &GroundTask, cfg: &ExcuseSearchConfig) -> Vec<EditMove> {
    let mut twin: BTreeMap<AtomId, AtomId> = BTreeMap::new();
    for &(a, b) in &task.mutex_pairs {
        twin.insert(a, b);
        twin.insert(b, a);
    }

    let allowed: Option<BTreeSet<AtomId>> = cfg.candidate_fluents.as_ref().map(|atoms| {
        atoms.iter().filter_map(|a| task.atom_id(a)).collect()
    });
    let candidate = |id: AtomId| -> bool {
        task.editable.contains(id) && allowed.as_ref().map_or(true, |s| s.contains(&id))
    };

    // candidate atom ids in canonical atom order
    let mut ordered: Vec<AtomId> = (0..task.num_atoms()).filter(|&id| candidate(id)).collect();
    ordered.sort_by(|&x, &y| task.atom(x).cmp(task.atom(y)));

    let mut moves = Vec::new();
    for &id in &ordered {
        if !task.init.contains(id) {
            continue;
        }
        match twin.get(&id) {
            Some(&t) if !task.init.contains(t) && candidate(t) => {
                moves.push(EditMove::Flip { remove: id, add: t });
            }
            _ => moves.push(EditMove::Remove(id)),
        }
    }
    for &id in &ordered {
        if task.init.contains(id) {
            continue;
        }
        // skip the absent side of a flippable pair; the flip covers it
        if let Some(&t) = twin.get(&id) {
            if task.init.contains(t) && candidate(t) {
                continue;
            }
        }
        moves.push(EditMove::Add(id));
    }
    moves
}

use fixedbitset::FixedBitSet;

use super::ground::GroundTask;
use super::state::State;

pub const INFINITY: u32 = u32::MAX;

/// Delete-relaxation fixpoint over a start state. One computation backs three
/// uses: reachability proofs (finite h_max), the admissible h_max heuristic,
/// and the additive h_add heuristic.
pub struct Relaxation {
    pub hmax: Vec<u32>,
    pub hadd: Vec<u32>,
}

impl Relaxation {
    pub fn compute(task: &GroundTask, start: &State) -> Relaxation {
        let n = task.num_atoms();
        let mut hmax = vec![INFINITY; n];
        let mut hadd = vec![INFINITY; n];
        for atom in start.ones() {
            hmax[atom] = 0;
            hadd[atom] = 0;
        }
        // Bellman-Ford style iteration to the fixpoint; desk-scale tasks
        // converge in a handful of sweeps.
        let mut changed = true;
        while changed {
            changed = false;
            for action in &task.actions {
                let mut pre_max: u32 = 0;
                let mut pre_sum: u64 = 0;
                let mut reachable = true;
                for &p in &action.pre {
                    if hmax[p] == INFINITY {
                        reachable = false;
                        break;
                    }
                    pre_max = pre_max.max(hmax[p]);
                    pre_sum += u64::from(hadd[p]);
                }
                if !reachable {
                    continue;
                }
                let via_max = pre_max.saturating_add(action.cost);
                let via_add =
                    u32::try_from(pre_sum.saturating_add(u64::from(action.cost)).min(u64::from(INFINITY - 1)))
                        .unwrap_or(INFINITY - 1);
                for &a in &action.add {
                    if via_max < hmax[a] {
                        hmax[a] = via_max;
                        changed = true;
                    }
                    if via_add < hadd[a] {
                        hadd[a] = via_add;
                        changed = true;
                    }
                }
            }
        }
        Relaxation { hmax, hadd }
    }

    /// Max-cost estimate of achieving a conjunction; ∞ when unreachable.
    pub fn goal_hmax(&self, goal: &[usize]) -> u32 {
        goal.iter().map(|&g| self.hmax[g]).max().unwrap_or(0)
    }

    /// Additive estimate of achieving a conjunction; ∞ when unreachable.
    pub fn goal_hadd(&self, goal: &[usize]) -> u32 {
        let mut sum: u64 = 0;
        for &g in goal {
            if self.hadd[g] == INFINITY {
                return INFINITY;
            }
            sum += u64::from(self.hadd[g]);
        }
        u32::try_from(sum.min(u64::from(INFINITY - 1))).unwrap_or(INFINITY - 1)
    }

    /// Atoms reachable under the delete relaxation.
    pub fn reachable(&self) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(self.hmax.len());
        for (i, &h) in self.hmax.iter().enumerate() {
            if h != INFINITY {
                bits.insert(i);
            }
        }
        bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::parse_atom;
    use crate::planner::ground::GroundTask;

    fn chain_task() -> GroundTask {
        // a -> b -> c, unit costs
        GroundTask::from_parts(
            "chain",
            vec![
                parse_atom("(a)").unwrap(),
                parse_atom("(b)").unwrap(),
                parse_atom("(c)").unwrap(),
            ],
            vec![
                ("ab".into(), 1, vec![0], vec![1], vec![]),
                ("bc".into(), 1, vec![1], vec![2], vec![]),
            ],
            &[0],
            &[2],
        )
        .unwrap()
    }

    #[test]
    fn hmax_and_hadd_agree_on_chains() {
        let task = chain_task();
        let relax = Relaxation::compute(&task, &task.init);
        assert_eq!(relax.hmax, vec![0, 1, 2]);
        assert_eq!(relax.hadd, vec![0, 1, 2]);
        assert_eq!(relax.goal_hmax(&task.goal_atoms), 2);
    }

    #[test]
    fn unreachable_atoms_stay_infinite() {
        let task = GroundTask::from_parts(
            "t",
            vec![parse_atom("(a)").unwrap(), parse_atom("(b)").unwrap()],
            vec![],
            &[0],
            &[1],
        )
        .unwrap();
        let relax = Relaxation::compute(&task, &task.init);
        assert_eq!(relax.hmax[1], INFINITY);
        assert!(!relax.reachable().contains(1));
        assert_eq!(relax.goal_hmax(&task.goal_atoms), INFINITY);
    }

    #[test]
    fn hadd_sums_while_hmax_maxes() {
        // two independent subgoals each one step away
        let task = GroundTask::from_parts(
            "t",
            vec![
                parse_atom("(s)").unwrap(),
                parse_atom("(g1)").unwrap(),
                parse_atom("(g2)").unwrap(),
            ],
            vec![
                ("m1".into(), 1, vec![0], vec![1], vec![]),
                ("m2".into(), 1, vec![0], vec![2], vec![]),
            ],
            &[0],
            &[1, 2],
        )
        .unwrap();
        let relax = Relaxation::compute(&task, &task.init);
        assert_eq!(relax.goal_hmax(&task.goal_atoms), 1);
        assert_eq!(relax.goal_hadd(&task.goal_atoms), 2);
    }
}

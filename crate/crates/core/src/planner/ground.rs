use std::collections::{BTreeMap, BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::pddl::{
    Atom, Ident, ObjectName, PlanningDomain, PlanningProblem, PredicateName, Term, TypeName,
};

pub type AtomId = usize;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GroundError {
    #[error("fluent universe exceeds the grounding cap ({size} > {cap})")]
    FluentExplosion { size: usize, cap: usize },
    #[error("ground action count exceeds the grounding cap ({size} > {cap})")]
    ActionExplosion { size: usize, cap: usize },
    #[error("ground action {action} has overlapping add and delete effects on {atom}")]
    ConflictingEffects { action: String, atom: String },
    #[error("atom {0} in the problem is outside the grounded fluent universe")]
    UnknownAtom(String),
}

/// Caps guarding against grounding explosion.
#[derive(Clone, Copy, Debug)]
pub struct GroundConfig {
    pub max_fluents: usize,
    pub max_actions: usize,
}

impl Default for GroundConfig {
    fn default() -> Self {
        GroundConfig { max_fluents: 100_000, max_actions: 100_000 }
    }
}

/// One type-consistent instantiation of an action schema.
#[derive(Clone, Debug)]
pub struct GroundAction {
    pub schema: Ident,
    pub args: Vec<ObjectName>,
    pub cost: u32,
    pub pre: Vec<AtomId>,
    pub add: Vec<AtomId>,
    pub del: Vec<AtomId>,
}

impl GroundAction {
    /// Plan-line rendering: `(name arg1 arg2)`.
    pub fn display(&self) -> String {
        let mut s = format!("({}", self.schema);
        for a in &self.args {
            s.push(' ');
            s.push_str(a.as_str());
        }
        s.push(')');
        s
    }
}

/// A grounded planning task: indexed fluent universe, ground actions, and
/// initial/goal states as bitsets over the universe. Indices are stable for
/// the lifetime of the task.
#[derive(Clone, Debug)]
pub struct GroundTask {
    pub domain_name: Ident,
    pub problem_name: Ident,
    atoms: Vec<Atom>,
    index: HashMap<Atom, AtomId>,
    pub actions: Vec<GroundAction>,
    pub init: FixedBitSet,
    pub goal: FixedBitSet,
    pub goal_atoms: Vec<AtomId>,
    /// Ground instances of declared `:mutex-pair` predicates.
    pub mutex_pairs: Vec<(AtomId, AtomId)>,
    /// Atoms of predicates that occur in some effect; the model-space search
    /// edits only these, which keeps static pruning sound across edits.
    pub editable: FixedBitSet,
}

impl GroundTask {
    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, id: AtomId) -> &Atom {
        &self.atoms[id]
    }

    pub fn atom_id(&self, atom: &Atom) -> Option<AtomId> {
        self.index.get(atom).copied()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Converts a set of atoms to a state bitset; unknown atoms are errors.
    pub fn state_from_atoms<'a>(
        &self,
        atoms: impl IntoIterator<Item = &'a Atom>,
    ) -> Result<FixedBitSet, GroundError> {
        let mut state = FixedBitSet::with_capacity(self.num_atoms());
        for atom in atoms {
            let id = self
                .atom_id(atom)
                .ok_or_else(|| GroundError::UnknownAtom(atom.to_string()))?;
            state.insert(id);
        }
        Ok(state)
    }

    pub fn atoms_in_state(&self, state: &FixedBitSet) -> Vec<Atom> {
        state.ones().map(|i| self.atoms[i].clone()).collect()
    }

    /// Builds a task directly from ground parts; used by tests and tools that
    /// work below the PDDL layer. Enforces the same invariants as grounding.
    pub fn from_parts(
        name: &str,
        atoms: Vec<Atom>,
        actions: Vec<(String, u32, Vec<usize>, Vec<usize>, Vec<usize>)>,
        init: &[usize],
        goal: &[usize],
    ) -> Result<GroundTask, GroundError> {
        let index: HashMap<Atom, AtomId> =
            atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let n = atoms.len();
        let mut ground_actions = Vec::new();
        for (label, cost, pre, add, del) in actions {
            let action = GroundAction {
                schema: Ident::new(&label).expect("valid action label"),
                args: Vec::new(),
                cost,
                pre: sorted(pre),
                add: sorted(add),
                del: sorted(del),
            };
            if let Some(&clash) = action.add.iter().find(|a| action.del.contains(a)) {
                return Err(GroundError::ConflictingEffects {
                    action: action.display(),
                    atom: atoms[clash].to_string(),
                });
            }
            ground_actions.push(action);
        }
        let mut init_bs = FixedBitSet::with_capacity(n);
        init.iter().for_each(|&i| init_bs.insert(i));
        let mut goal_bs = FixedBitSet::with_capacity(n);
        goal.iter().for_each(|&i| goal_bs.insert(i));
        let mut editable = FixedBitSet::with_capacity(n);
        editable.insert_range(..);
        Ok(GroundTask {
            domain_name: Ident::new(name).expect("valid name"),
            problem_name: Ident::new(name).expect("valid name"),
            atoms,
            index,
            actions: ground_actions,
            init: init_bs,
            goal_atoms: goal_bs.ones().collect(),
            goal: goal_bs,
            mutex_pairs: Vec::new(),
            editable,
        })
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Grounds a domain/problem pair: every type-consistent instantiation of
/// every schema and every declared predicate. Instances with a statically
/// false precondition (predicate never added by any schema and atom absent
/// from the initial state) are pruned; that proof is sound and independent of
/// later initial-state edits because such atoms are never edit candidates.
pub fn ground(
    domain: &PlanningDomain,
    problem: &PlanningProblem,
    config: &GroundConfig,
) -> Result<GroundTask, GroundError> {
    let mut objects: Vec<(ObjectName, TypeName)> = domain.constants.clone();
    for (o, t) in &problem.objects {
        // problem objects may re-declare domain constants (merged domains)
        if !objects.iter().any(|(existing, _)| existing == o) {
            objects.push((o.clone(), t.clone()));
        }
    }

    // objects per type, in canonical object order
    let mut by_type: BTreeMap<TypeName, Vec<ObjectName>> = BTreeMap::new();
    let mut type_names: BTreeSet<TypeName> = domain.types.declared().map(|(c, _)| c.clone()).collect();
    type_names.insert(crate::pddl::TypeTree::root());
    let mut sorted_objects = objects.clone();
    sorted_objects.sort();
    for ty in &type_names {
        let members: Vec<ObjectName> = sorted_objects
            .iter()
            .filter(|(_, ot)| domain.types.is_subtype(ot, ty))
            .map(|(o, _)| o.clone())
            .collect();
        by_type.insert(ty.clone(), members);
    }

    // fluent universe: all well-typed ground instances of every predicate
    let mut atoms: Vec<Atom> = Vec::new();
    let mut index: HashMap<Atom, AtomId> = HashMap::new();
    for decl in &domain.predicates {
        let domains: Vec<&Vec<ObjectName>> = decl
            .params
            .iter()
            .map(|(_, t)| by_type.get(t).expect("type table covers declared types"))
            .collect();
        for combo in cartesian(&domains) {
            let atom = Atom::new(decl.name.clone(), combo);
            if index.contains_key(&atom) {
                continue;
            }
            if index.len() >= config.max_fluents {
                return Err(GroundError::FluentExplosion {
                    size: index.len() + 1,
                    cap: config.max_fluents,
                });
            }
            index.insert(atom.clone(), atoms.len());
            atoms.push(atom);
        }
    }

    // World-state predicates are those some effect touches or that carry a
    // mutex-pair annotation (complementary poles a demonstrator could flip
    // even when this model cannot). Everything else is world structure:
    // such atoms hold exactly when listed in I, in every state reachable
    // from any edited initial state, so pruning on them stays sound under
    // model-space edits, which only ever touch world-state atoms.
    let mut state_preds: BTreeSet<PredicateName> = BTreeSet::new();
    for schema in &domain.actions {
        for atom in schema.add.iter().chain(&schema.del) {
            state_preds.insert(atom.pred.clone());
        }
    }
    for (a, b) in &domain.mutex_pairs {
        state_preds.insert(a.clone());
        state_preds.insert(b.clone());
    }

    let init_set: BTreeSet<&Atom> = problem.init.iter().collect();
    let mut actions: Vec<GroundAction> = Vec::new();
    for schema in &domain.actions {
        let domains: Vec<&Vec<ObjectName>> = schema
            .params
            .iter()
            .map(|(_, t)| by_type.get(t).expect("type table covers declared types"))
            .collect();
        'bindings: for combo in cartesian(&domains) {
            let binding: BTreeMap<&Ident, &ObjectName> = schema
                .params
                .iter()
                .map(|(v, _)| v)
                .zip(combo.iter())
                .collect();
            let instantiate = |lifted: &crate::pddl::LiftedAtom| -> Atom {
                let args = lifted
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => (*binding.get(v).expect("validated variable")).clone(),
                        Term::Const(c) => c.clone(),
                    })
                    .collect();
                Atom::new(lifted.pred.clone(), args)
            };

            let mut pre = Vec::new();
            for lifted in &schema.pre {
                let atom = instantiate(lifted);
                if !state_preds.contains(&atom.pred) && !init_set.contains(&atom) {
                    continue 'bindings; // statically false precondition
                }
                pre.push(index[&atom]);
            }
            let add: Vec<AtomId> = schema.add.iter().map(|l| index[&instantiate(l)]).collect();
            let del: Vec<AtomId> = schema.del.iter().map(|l| index[&instantiate(l)]).collect();

            let action = GroundAction {
                schema: schema.name.clone(),
                args: combo,
                cost: schema.cost,
                pre: sorted(pre),
                add: sorted(add),
                del: sorted(del),
            };
            if let Some(&clash) = action.add.iter().find(|a| action.del.contains(a)) {
                return Err(GroundError::ConflictingEffects {
                    action: action.display(),
                    atom: atoms[clash].to_string(),
                });
            }
            if actions.len() >= config.max_actions {
                return Err(GroundError::ActionExplosion {
                    size: actions.len() + 1,
                    cap: config.max_actions,
                });
            }
            actions.push(action);
        }
    }

    let n = atoms.len();
    let mut init = FixedBitSet::with_capacity(n);
    for atom in &problem.init {
        let id = *index
            .get(atom)
            .ok_or_else(|| GroundError::UnknownAtom(atom.to_string()))?;
        init.insert(id);
    }
    let mut goal = FixedBitSet::with_capacity(n);
    for atom in &problem.goal {
        let id = *index
            .get(atom)
            .ok_or_else(|| GroundError::UnknownAtom(atom.to_string()))?;
        goal.insert(id);
    }

    let mut editable = FixedBitSet::with_capacity(n);
    for (id, atom) in atoms.iter().enumerate() {
        if state_preds.contains(&atom.pred) {
            editable.insert(id);
        }
    }

    let mut mutex_pairs = Vec::new();
    for (pa, pb) in &domain.mutex_pairs {
        for (id, atom) in atoms.iter().enumerate() {
            if atom.pred == *pa {
                let twin = Atom::new(pb.clone(), atom.args.clone());
                if let Some(&tid) = index.get(&twin) {
                    mutex_pairs.push((id, tid));
                }
            }
        }
    }

    Ok(GroundTask {
        domain_name: domain.name.clone(),
        problem_name: problem.name.clone(),
        atoms,
        index,
        actions,
        init,
        goal_atoms: goal.ones().collect(),
        goal,
        mutex_pairs,
        editable,
    })
}

fn cartesian(domains: &[&Vec<ObjectName>]) -> Vec<Vec<ObjectName>> {
    let mut combos: Vec<Vec<ObjectName>> = vec![Vec::new()];
    for domain in domains {
        let mut next = Vec::with_capacity(combos.len() * domain.len());
        for combo in &combos {
            for obj in domain.iter() {
                let mut extended = combo.clone();
                extended.push(obj.clone());
                next.push(extended);
            }
        }
        combos = next;
    }
    combos
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_problem};

    #[test]
    fn two_params_three_objects_each_gives_nine_instances() {
        let d = parse_domain(
            "(define (domain t) (:requirements :strips :typing)
               (:types thing - object)
               (:predicates (linked ?a - thing ?b - thing))
               (:action link
                 :parameters (?a - thing ?b - thing)
                 :precondition ()
                 :effect (linked ?a ?b)))",
        )
        .unwrap();
        let p = parse_problem(
            "(define (problem p) (:domain t) (:objects x y z - thing)
               (:init) (:goal (linked x y)))",
            &d,
        )
        .unwrap();
        let task = ground(&d, &p, &GroundConfig::default()).unwrap();
        assert_eq!(task.actions.len(), 9);
        assert_eq!(task.num_atoms(), 9);
    }

    #[test]
    fn overlapping_add_and_del_after_binding_is_an_error_naming_the_action() {
        let d = parse_domain(
            "(define (domain t) (:requirements :strips :typing)
               (:types thing - object)
               (:predicates (p ?a - thing) (q ?a - thing ?b - thing))
               (:action clash
                 :parameters (?a - thing ?b - thing)
                 :precondition ()
                 :effect (and (q ?a ?b) (not (q ?b ?a)))))",
        )
        .unwrap();
        let p = parse_problem(
            "(define (problem p) (:domain t) (:objects x - thing)
               (:init) (:goal (p x)))",
            &d,
        )
        .unwrap();
        let err = ground(&d, &p, &GroundConfig::default()).unwrap_err();
        match err {
            GroundError::ConflictingEffects { action, .. } => {
                assert_eq!(action, "(clash x x)");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn statically_false_preconditions_prune_instances() {
        // `connected` is never added, so self-moves ground away soundly
        let d = parse_domain(
            "(define (domain t) (:requirements :strips :typing)
               (:types loc - object)
               (:predicates (at ?l - loc) (connected ?a - loc ?b - loc))
               (:action move
                 :parameters (?from - loc ?to - loc)
                 :precondition (and (at ?from) (connected ?from ?to))
                 :effect (and (at ?to) (not (at ?from)))))",
        )
        .unwrap();
        let p = parse_problem(
            "(define (problem p) (:domain t) (:objects a b - loc)
               (:init (at a) (connected a b) (connected b a))
               (:goal (at b)))",
            &d,
        )
        .unwrap();
        let task = ground(&d, &p, &GroundConfig::default()).unwrap();
        assert_eq!(task.actions.len(), 2);
        // `connected` atoms are not edit candidates
        let conn = task
            .atom_id(&crate::pddl::parse_atom("(connected a b)").unwrap())
            .unwrap();
        assert!(!task.editable.contains(conn));
        let at_a = task.atom_id(&crate::pddl::parse_atom("(at a)").unwrap()).unwrap();
        assert!(task.editable.contains(at_a));
    }

    #[test]
    fn explosion_guard_fires() {
        let d = parse_domain(
            "(define (domain t) (:requirements :strips :typing)
               (:types thing - object)
               (:predicates (r ?a - thing ?b - thing ?c - thing)))",
        )
        .unwrap();
        let p = parse_problem(
            "(define (problem p) (:domain t)
               (:objects a b c d e f g h i j - thing)
               (:init) (:goal (r a b c)))",
            &d,
        )
        .unwrap();
        let cfg = GroundConfig { max_fluents: 500, max_actions: 500 };
        assert!(matches!(
            ground(&d, &p, &cfg),
            Err(GroundError::FluentExplosion { .. })
        ));
    }
}

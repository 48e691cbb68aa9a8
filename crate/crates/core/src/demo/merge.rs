use std::collections::{BTreeMap, BTreeSet};

use crate::pddl::{
    ActionSchema, Ident, ObjectName, PlanningDomain, PredicateDecl, Term, TypeName,
};

/// Result of merging learned schemas into a robot domain.
#[derive(Clone, Debug)]
pub struct MergeOutcome {
    pub domain: PlanningDomain,
    /// Names the merged domain gained.
    pub added: Vec<Ident>,
    /// Learned schemas an existing robot schema already subsumes.
    pub dropped_duplicates: Vec<Ident>,
    /// Name clashes resolved by suffixing: (learned name, merged name).
    pub renamed: Vec<(Ident, Ident)>,
}

impl MergeOutcome {
    pub fn learned_names(&self) -> BTreeSet<Ident> {
        self.added.iter().cloned().collect()
    }
}

/// Merges learned schemas into the robot domain. Prior schemas are preserved
/// verbatim; learned schemas an existing one subsumes are dropped; name
/// clashes with a structural difference are resolved by suffixing. Predicates
/// and constants the learned schemas mention but the domain lacks are added,
/// typed from the supplied object table.
pub fn merge_domains(
    robot: &PlanningDomain,
    learned: &[ActionSchema],
    objects: &BTreeMap<ObjectName, TypeName>,
) -> MergeOutcome {
    let mut domain = robot.clone();
    let mut added = Vec::new();
    let mut dropped = Vec::new();
    let mut renamed = Vec::new();

    for schema in learned {
        if let Some(existing) = domain.actions.iter().find(|r| r.subsumes(schema)) {
            dropped.push(existing.name.clone());
            continue;
        }
        let mut merged = schema.clone();
        if domain.action(&schema.name).is_some() {
            let mut variant = 2usize;
            let fresh = loop {
                let candidate = Ident::new(&format!("{}-{variant}", schema.name)).unwrap();
                if domain.action(&candidate).is_none() {
                    break candidate;
                }
                variant += 1;
            };
            renamed.push((schema.name.clone(), fresh.clone()));
            merged.name = fresh;
        }

        // declare predicates and constants this schema introduces
        for atom in merged.pre.iter().chain(&merged.add).chain(&merged.del) {
            if domain.predicate(&atom.pred).is_none() {
                let params = atom
                    .args
                    .iter()
                    .enumerate()
                    .map(|(i, term)| {
                        let ty = match term {
                            Term::Var(v) => merged
                                .params
                                .iter()
                                .find(|(p, _)| p == v)
                                .map(|(_, t)| t.clone()),
                            Term::Const(c) => objects.get(c).cloned(),
                        }
                        .unwrap_or_else(crate::pddl::TypeTree::root);
                        (Ident::new(&format!("x{}", i + 1)).unwrap(), ty)
                    })
                    .collect();
                domain.predicates.push(PredicateDecl { name: atom.pred.clone(), params });
            }
            for term in &atom.args {
                if let Term::Const(c) = term {
                    let known = domain.constants.iter().any(|(o, _)| o == c);
                    if !known {
                        let ty = objects.get(c).cloned().unwrap_or_else(crate::pddl::TypeTree::root);
                        domain.constants.push((c.clone(), ty));
                    }
                }
            }
        }

        added.push(merged.name.clone());
        domain.actions.push(merged);
    }

    MergeOutcome { domain, added, dropped_duplicates: dropped, renamed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, LiftedAtom};
    use std::collections::BTreeSet;

    fn id(s: &str) -> Ident {
        Ident::new(s).unwrap()
    }

    fn robot() -> PlanningDomain {
        parse_domain(
            "(define (domain k) (:requirements :strips :typing)
               (:types drawer - object)
               (:predicates (open ?d - drawer) (closed ?d - drawer))
               (:action close-drawer
                 :parameters (?d - drawer)
                 :precondition (and (open ?d))
                 :effect (and (closed ?d) (not (open ?d)))))",
        )
        .unwrap()
    }

    fn open_schema(name: &str) -> ActionSchema {
        ActionSchema {
            name: id(name),
            params: vec![(id("o1"), id("drawer"))],
            cost: 1,
            pre: [LiftedAtom { pred: id("closed"), args: vec![Term::Var(id("o1"))] }].into(),
            add: [LiftedAtom { pred: id("open"), args: vec![Term::Var(id("o1"))] }].into(),
            del: [LiftedAtom { pred: id("closed"), args: vec![Term::Var(id("o1"))] }].into(),
        }
    }

    #[test]
    fn empty_learned_list_leaves_the_domain_unchanged() {
        let r = robot();
        let out = merge_domains(&r, &[], &BTreeMap::new());
        assert_eq!(out.domain, r);
        assert!(out.added.is_empty());
    }

    #[test]
    fn new_capability_is_added_and_the_result_validates() {
        let out = merge_domains(&robot(), &[open_schema("open-drawer")], &BTreeMap::new());
        assert_eq!(out.added, vec![id("open-drawer")]);
        assert_eq!(out.domain.actions.len(), 2);
        assert!(out.domain.validate().is_ok());
        // prior schema preserved verbatim
        assert_eq!(out.domain.actions[0], robot().actions[0]);
    }

    #[test]
    fn subsumed_learned_operator_is_dropped() {
        // the learned closer has an extra precondition: the prior one covers it
        let mut learned = ActionSchema {
            name: id("close-drawer"),
            params: vec![(id("o1"), id("drawer"))],
            cost: 1,
            pre: [
                LiftedAtom { pred: id("open"), args: vec![Term::Var(id("o1"))] },
                LiftedAtom { pred: id("closed"), args: vec![Term::Const(id("other"))] },
            ]
            .into(),
            add: [LiftedAtom { pred: id("closed"), args: vec![Term::Var(id("o1"))] }].into(),
            del: [LiftedAtom { pred: id("open"), args: vec![Term::Var(id("o1"))] }].into(),
        };
        learned.name = id("close-drawer");
        let out = merge_domains(
            &robot(),
            &[learned],
            &[(id("other"), id("drawer"))].into(),
        );
        assert_eq!(out.dropped_duplicates, vec![id("close-drawer")]);
        assert_eq!(out.domain.actions.len(), 1);
    }

    #[test]
    fn name_clash_with_different_structure_is_suffixed() {
        // same name as the prior closer but structurally an opener
        let clashing = open_schema("close-drawer");
        let out = merge_domains(&robot(), &[clashing], &BTreeMap::new());
        assert_eq!(out.renamed, vec![(id("close-drawer"), id("close-drawer-2"))]);
        assert!(out.domain.action(&id("close-drawer-2")).is_some());
    }

    #[test]
    fn unknown_predicates_and_constants_are_declared() {
        let mut schema = open_schema("open-drawer");
        schema.pre.insert(LiftedAtom {
            pred: id("reachable"),
            args: vec![Term::Var(id("o1")), Term::Const(id("side"))],
        });
        let objects: BTreeMap<ObjectName, TypeName> = [(id("side"), id("object"))].into();
        let out = merge_domains(&robot(), &[schema], &objects);
        assert!(out.domain.predicate(&id("reachable")).is_some());
        assert!(out.domain.constants.iter().any(|(o, _)| o.as_str() == "side"));
        assert!(out.domain.validate().is_ok());
    }
}

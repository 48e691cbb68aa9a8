use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::pddl::{
    ActionSchema, Atom, Ident, LiftedAtom, ObjectName, PlanningDomain, Term, TypeName, VarName,
};

use super::{DemonstrationTrace, TraceError, TraceStep};

/// An action schema learned from demonstration steps, with the evidence it
/// came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LearnedOperator {
    pub schema: ActionSchema,
    /// Indices of the contributing trace steps.
    pub sources: Vec<usize>,
    /// Lifting substitution of the first contributing instance.
    pub binding: Vec<(VarName, ObjectName)>,
}

impl LearnedOperator {
    /// The grounded first instance: the schema with its binding applied.
    /// Replaying it on the recorded pre-state must reproduce the post-state.
    pub fn grounded_first_instance(&self) -> (BTreeSet<Atom>, BTreeSet<Atom>, BTreeSet<Atom>) {
        let subst: BTreeMap<&VarName, &ObjectName> =
            self.binding.iter().map(|(v, o)| (v, o)).collect();
        let ground = |atoms: &BTreeSet<LiftedAtom>| -> BTreeSet<Atom> {
            atoms
                .iter()
                .map(|l| Atom {
                    pred: l.pred.clone(),
                    args: l
                        .args
                        .iter()
                        .map(|t| match t {
                            Term::Var(v) => (*subst.get(v).expect("binding covers params")).clone(),
                            Term::Const(c) => c.clone(),
                        })
                        .collect(),
                })
                .collect()
        };
        (ground(&self.schema.pre), ground(&self.schema.add), ground(&self.schema.del))
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LearnError {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("step {index}: atom {atom} references object `{object}` absent from the problem")]
    UnknownObject { index: usize, atom: String, object: Ident },
    #[error("step {index}: {message}")]
    BadAtom { index: usize, message: String },
}

/// Selects the fluents of interest for a step: every atom mentioning at least
/// one touched object, and every zero-arity atom (global facts touch
/// everything the hand does).
fn relevant(atom: &Atom, touched: &[ObjectName]) -> bool {
    atom.args.is_empty() || atom.args.iter().any(|a| touched.contains(a))
}

/// Learns one lifted operator from a single effective step. Preconditions
/// take all fluents of interest from the pre-state, including statically true
/// ones; effects are the state delta restricted to the same fluents. Each
/// distinct touched object becomes a typed parameter, substituted
/// consistently; untouched objects stay constant.
pub fn learn_step(
    step: &TraceStep,
    index: usize,
    domain: &PlanningDomain,
    objects: &BTreeMap<ObjectName, TypeName>,
    label: Ident,
) -> Result<LearnedOperator, LearnError> {
    let object_type = |o: &ObjectName| -> Option<TypeName> {
        objects.get(o).cloned().or_else(|| {
            domain.constants.iter().find(|(c, _)| c == o).map(|(_, t)| t.clone())
        })
    };
    for atom in step.pre.iter().chain(&step.post) {
        domain
            .check_ground_atom(atom, &object_type)
            .map_err(|kind| match kind {
                crate::pddl::ParseErrorKind::UnknownObject(object) => LearnError::UnknownObject {
                    index,
                    atom: atom.to_string(),
                    object,
                },
                other => LearnError::BadAtom { index, message: other.to_string() },
            })?;
    }

    // distinct touched objects, in first-touch order, become parameters
    let mut distinct: Vec<ObjectName> = Vec::new();
    for o in &step.touched {
        if !distinct.contains(o) {
            if object_type(o).is_none() {
                return Err(LearnError::UnknownObject {
                    index,
                    atom: "(touched)".into(),
                    object: o.clone(),
                });
            }
            distinct.push(o.clone());
        }
    }
    let binding: Vec<(VarName, ObjectName)> = distinct
        .iter()
        .enumerate()
        .map(|(i, o)| (Ident::new(&format!("o{}", i + 1)).unwrap(), o.clone()))
        .collect();
    let var_of: BTreeMap<&ObjectName, &VarName> =
        binding.iter().map(|(v, o)| (o, v)).collect();

    let lift = |atoms: BTreeSet<Atom>| -> BTreeSet<LiftedAtom> {
        atoms
            .into_iter()
            .map(|atom| LiftedAtom {
                pred: atom.pred,
                args: atom
                    .args
                    .into_iter()
                    .map(|o| match var_of.get(&o) {
                        Some(v) => Term::Var((*v).clone()),
                        None => Term::Const(o),
                    })
                    .collect(),
            })
            .collect()
    };

    let pre: BTreeSet<Atom> =
        step.pre.iter().filter(|a| relevant(a, &step.touched)).cloned().collect();
    let add: BTreeSet<Atom> =
        step.adds().into_iter().filter(|a| relevant(a, &step.touched)).collect();
    let del: BTreeSet<Atom> =
        step.dels().into_iter().filter(|a| relevant(a, &step.touched)).collect();

    let params: Vec<(VarName, TypeName)> = binding
        .iter()
        .map(|(v, o)| (v.clone(), object_type(o).expect("checked above")))
        .collect();

    Ok(LearnedOperator {
        schema: ActionSchema {
            name: label,
            params,
            cost: 1,
            pre: lift(pre),
            add: lift(add),
            del: lift(del),
        },
        sources: vec![index],
        binding,
    })
}

/// Learns lifted operators from every effective step of a trace. Steps with
/// the same label and the same lifted schema merge into one operator; the
/// same label with a conflicting schema yields disambiguated variants
/// (`label-2`, `label-3`, ...).
pub fn learn_operators(
    trace: &DemonstrationTrace,
    domain: &PlanningDomain,
    objects: &BTreeMap<ObjectName, TypeName>,
) -> Result<Vec<LearnedOperator>, LearnError> {
    trace.validate_chain()?;
    let mut learned: Vec<LearnedOperator> = Vec::new();
    for (index, step) in trace.steps.iter().enumerate() {
        if !step.is_effective() {
            continue;
        }
        let candidate = learn_step(step, index, domain, objects, step.label.clone())?;
        let mut variant = 1usize;
        let mut placed = false;
        while !placed {
            let name = if variant == 1 {
                step.label.clone()
            } else {
                Ident::new(&format!("{}-{variant}", step.label)).unwrap()
            };
            match learned.iter_mut().find(|op| op.schema.name == name) {
                Some(existing) => {
                    let mut renamed = candidate.schema.clone();
                    renamed.name = name;
                    if existing.schema.structurally_equal(&renamed) {
                        existing.sources.push(index);
                        placed = true;
                    } else {
                        variant += 1;
                    }
                }
                None => {
                    let mut op = candidate.clone();
                    op.schema.name = name;
                    learned.push(op);
                    placed = true;
                }
            }
        }
    }
    Ok(learned)
}

use std::collections::BTreeMap;
use std::fmt::Write;

use super::ast::{
    ActionSchema, PlanningDomain, PlanningProblem, Requirement, TypeName,
};

/// Renders a domain in the subset grammar. The output re-parses to a
/// structurally identical domain; atom sets print in canonical order.
pub fn emit_domain(domain: &PlanningDomain) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {})", domain.name);

    if !domain.requirements.is_empty() {
        let reqs: Vec<&str> = domain.requirements.iter().map(Requirement::keyword).collect();
        let _ = writeln!(out, "  (:requirements {})", reqs.join(" "));
    }

    let typed_groups = group_by_type(domain.types.declared().map(|(c, p)| (c.clone(), p.clone())));
    if !typed_groups.is_empty() {
        let _ = write!(out, "  (:types");
        for (parent, children) in &typed_groups {
            for child in children {
                let _ = write!(out, " {child}");
            }
            let _ = write!(out, " - {parent}");
        }
        let _ = writeln!(out, ")");
    }

    if !domain.constants.is_empty() {
        let _ = write!(out, "  (:constants");
        for (parent, children) in group_by_type(domain.constants.iter().cloned()) {
            for child in children {
                let _ = write!(out, " {child}");
            }
            let _ = write!(out, " - {parent}");
        }
        let _ = writeln!(out, ")");
    }

    let _ = writeln!(out, "  (:predicates");
    for decl in &domain.predicates {
        let _ = write!(out, "    ({}", decl.name);
        for (v, t) in &decl.params {
            let _ = write!(out, " ?{v} - {t}");
        }
        let _ = writeln!(out, ")");
    }
    let _ = writeln!(out, "  )");

    for (a, b) in &domain.mutex_pairs {
        let _ = writeln!(out, "  (:mutex-pair {a} {b})");
    }

    let costs = domain.requirements.contains(&Requirement::ActionCosts);
    for schema in &domain.actions {
        emit_action(&mut out, schema, costs);
    }

    out.push_str(")\n");
    out
}

fn emit_action(out: &mut String, schema: &ActionSchema, costs: bool) {
    let _ = writeln!(out, "  (:action {}", schema.name);
    let _ = write!(out, "    :parameters (");
    for (i, (v, t)) in schema.params.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "?{v} - {t}");
    }
    let _ = writeln!(out, ")");

    let _ = write!(out, "    :precondition (and");
    for atom in &schema.pre {
        let _ = write!(out, " {atom}");
    }
    let _ = writeln!(out, ")");

    let _ = write!(out, "    :effect (and");
    for atom in &schema.add {
        let _ = write!(out, " {atom}");
    }
    for atom in &schema.del {
        let _ = write!(out, " (not {atom})");
    }
    if costs {
        let _ = write!(out, " (increase (total-cost) {})", schema.cost);
    }
    let _ = writeln!(out, "))");
}

/// Renders a problem; init and goal print in canonical atom order.
pub fn emit_problem(problem: &PlanningProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", problem.name);
    let _ = writeln!(out, "  (:domain {})", problem.domain_name);

    if !problem.objects.is_empty() {
        let _ = write!(out, "  (:objects");
        for (parent, children) in
            group_by_type(problem.objects.iter().map(|(o, t)| (o.clone(), t.clone())))
        {
            for child in children {
                let _ = write!(out, " {child}");
            }
            let _ = write!(out, " - {parent}");
        }
        let _ = writeln!(out, ")");
    }

    let _ = writeln!(out, "  (:init");
    for atom in &problem.init {
        let _ = writeln!(out, "    {atom}");
    }
    let _ = writeln!(out, "  )");

    let _ = write!(out, "  (:goal (and");
    for atom in &problem.goal {
        let _ = write!(out, " {atom}");
    }
    let _ = writeln!(out, "))");
    out.push_str(")\n");
    out
}

/// Groups (name, type) pairs by type, preserving first-appearance order of
/// both groups and members, so emission is deterministic.
fn group_by_type<N: Clone>(
    items: impl Iterator<Item = (N, TypeName)>,
) -> Vec<(TypeName, Vec<N>)> {
    let mut order: Vec<TypeName> = Vec::new();
    let mut groups: BTreeMap<TypeName, Vec<N>> = BTreeMap::new();
    for (name, ty) in items {
        if !groups.contains_key(&ty) {
            order.push(ty.clone());
        }
        groups.entry(ty).or_default().push(name);
    }
    order
        .into_iter()
        .map(|t| {
            let members = groups.remove(&t).unwrap_or_default();
            (t, members)
        })
        .collect()
}

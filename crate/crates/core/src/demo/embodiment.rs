use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pddl::{ActionSchema, Ident};

use super::learn::LearnedOperator;

/// One translation entry: a demonstrated label becomes a robot label, with an
/// optional parameter permutation (`robot param i = human param order[i]`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingEntry {
    pub human: String,
    pub robot: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param_order: Option<Vec<usize>>,
}

/// Embodiment mapping from demonstrated human activity to robot-executable
/// actions. Unmapped labels pass through unchanged; the default is identity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmbodimentMapping {
    entries: BTreeMap<Ident, (Ident, Option<Vec<usize>>)>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EmbodimentError {
    #[error("mapping is not injective: `{human_a}` and `{human_b}` both map to `{robot}` with conflicting schemas")]
    MergeConflict { human_a: Ident, human_b: Ident, robot: Ident },
    #[error("mapping entry for `{human}`: {message}")]
    BadEntry { human: String, message: String },
}

impl EmbodimentMapping {
    pub fn identity() -> Self {
        EmbodimentMapping::default()
    }

    pub fn from_entries(entries: Vec<MappingEntry>) -> Result<Self, EmbodimentError> {
        let mut mapping = EmbodimentMapping::default();
        for entry in entries {
            let human = Ident::new(&entry.human).map_err(|m| EmbodimentError::BadEntry {
                human: entry.human.clone(),
                message: m,
            })?;
            let robot = Ident::new(&entry.robot).map_err(|m| EmbodimentError::BadEntry {
                human: entry.human.clone(),
                message: m,
            })?;
            if let Some(order) = &entry.param_order {
                let mut seen = vec![false; order.len()];
                for &i in order {
                    if i >= order.len() || seen[i] {
                        return Err(EmbodimentError::BadEntry {
                            human: entry.human.clone(),
                            message: format!("param_order {order:?} is not a permutation"),
                        });
                    }
                    seen[i] = true;
                }
            }
            if mapping.entries.insert(human.clone(), (robot, entry.param_order)).is_some() {
                return Err(EmbodimentError::BadEntry {
                    human: entry.human.clone(),
                    message: "duplicate mapping entry".into(),
                });
            }
        }
        Ok(mapping)
    }

    pub fn is_identity(&self) -> bool {
        self.entries.is_empty()
    }

    fn translate(&self, schema: &ActionSchema) -> Result<ActionSchema, EmbodimentError> {
        let Some((robot, order)) = self.entries.get(&schema.name) else {
            return Ok(schema.clone());
        };
        let mut out = schema.clone();
        out.name = robot.clone();
        if let Some(order) = order {
            if order.len() != schema.params.len() {
                return Err(EmbodimentError::BadEntry {
                    human: schema.name.to_string(),
                    message: format!(
                        "param_order has {} entries but the operator has {} parameters",
                        order.len(),
                        schema.params.len()
                    ),
                });
            }
            out.params = order.iter().map(|&i| schema.params[i].clone()).collect();
        }
        Ok(out)
    }
}

/// Translates learned operators into robot-executable schemas. Two human
/// labels mapping to one robot label must agree structurally; identical
/// results deduplicate.
pub fn map_embodiment(
    ops: &[LearnedOperator],
    mapping: &EmbodimentMapping,
) -> Result<Vec<ActionSchema>, EmbodimentError> {
    let mut out: Vec<(Ident, ActionSchema)> = Vec::new();
    for op in ops {
        let translated = mapping.translate(&op.schema)?;
        match out.iter().find(|(_, existing)| existing.name == translated.name) {
            Some((origin, existing)) => {
                if !existing.structurally_equal(&translated) {
                    return Err(EmbodimentError::MergeConflict {
                        human_a: origin.clone(),
                        human_b: op.schema.name.clone(),
                        robot: translated.name.clone(),
                    });
                }
                // identical: deduplicated
            }
            None => out.push((op.schema.name.clone(), translated)),
        }
    }
    Ok(out.into_iter().map(|(_, s)| s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    use crate::pddl::{LiftedAtom, Term};

    fn id(s: &str) -> Ident {
        Ident::new(s).unwrap()
    }

    fn schema(name: &str, params: &[(&str, &str)], add_pred: &str) -> ActionSchema {
        ActionSchema {
            name: id(name),
            params: params.iter().map(|(v, t)| (id(v), id(t))).collect(),
            cost: 1,
            pre: BTreeSet::new(),
            add: [LiftedAtom {
                pred: id(add_pred),
                args: params.iter().map(|(v, _)| Term::Var(id(v))).collect(),
            }]
            .into(),
            del: BTreeSet::new(),
        }
    }

    fn learned(s: ActionSchema) -> LearnedOperator {
        LearnedOperator { schema: s, sources: vec![0], binding: vec![] }
    }

    #[test]
    fn identity_mapping_is_a_no_op() {
        let ops = vec![learned(schema("open", &[("o1", "drawer")], "open"))];
        let out = map_embodiment(&ops, &EmbodimentMapping::identity()).unwrap();
        assert_eq!(out[0], ops[0].schema);
    }

    #[test]
    fn relabeling_keeps_structure() {
        let ops = vec![learned(schema("human-open", &[("o1", "drawer")], "open"))];
        let mapping = EmbodimentMapping::from_entries(vec![MappingEntry {
            human: "human-open".into(),
            robot: "robot-open".into(),
            param_order: None,
        }])
        .unwrap();
        let out = map_embodiment(&ops, &mapping).unwrap();
        assert_eq!(out[0].name.as_str(), "robot-open");
        assert_eq!(out[0].add, ops[0].schema.add);
    }

    #[test]
    fn parameter_permutation_reorders_params() {
        let ops = vec![learned(schema(
            "hand-over",
            &[("o1", "plate"), ("o2", "drawer")],
            "rel",
        ))];
        let mapping = EmbodimentMapping::from_entries(vec![MappingEntry {
            human: "hand-over".into(),
            robot: "stash".into(),
            param_order: Some(vec![1, 0]),
        }])
        .unwrap();
        let out = map_embodiment(&ops, &mapping).unwrap();
        assert_eq!(out[0].params[0].0.as_str(), "o2");
        assert_eq!(out[0].params[1].0.as_str(), "o1");
    }

    #[test]
    fn conflicting_targets_are_a_merge_conflict() {
        let ops = vec![
            learned(schema("wave", &[("o1", "drawer")], "open")),
            learned(schema("shove", &[("o1", "drawer")], "closed")),
        ];
        let mapping = EmbodimentMapping::from_entries(vec![
            MappingEntry { human: "wave".into(), robot: "act".into(), param_order: None },
            MappingEntry { human: "shove".into(), robot: "act".into(), param_order: None },
        ])
        .unwrap();
        let err = map_embodiment(&ops, &mapping).unwrap_err();
        assert!(matches!(err, EmbodimentError::MergeConflict { .. }));
    }

    #[test]
    fn identical_targets_deduplicate() {
        let ops = vec![
            learned(schema("wave", &[("o1", "drawer")], "open")),
            learned(schema("flick", &[("o1", "drawer")], "open")),
        ];
        let mapping = EmbodimentMapping::from_entries(vec![
            MappingEntry { human: "wave".into(), robot: "act".into(), param_order: None },
            MappingEntry { human: "flick".into(), robot: "act".into(), param_order: None },
        ])
        .unwrap();
        let out = map_embodiment(&ops, &mapping).unwrap();
        assert_eq!(out.len(), 1);
    }
}

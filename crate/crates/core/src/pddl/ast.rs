use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::error::{ParseError, ParseErrorKind};

/// A case-normalized PDDL identifier.
///
/// Identifiers are nonempty, start with a letter, contain only letters,
/// digits, `-` and `_`, and are folded to lower case so that `PinkDrawer`
/// and `pinkdrawer` unify.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ident(String);

impl Ident {
    pub fn new(raw: &str) -> Result<Ident, String> {
        let lowered = raw.to_ascii_lowercase();
        let mut chars = lowered.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return Err(format!("invalid identifier `{raw}`")),
        }
        if !chars.all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(format!("invalid identifier `{raw}`"));
        }
        Ok(Ident(lowered))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type TypeName = Ident;
pub type ObjectName = Ident;
pub type PredicateName = Ident;
pub type VarName = Ident;

/// Name of the built-in universal type at the root of every type tree.
pub const OBJECT_TYPE: &str = "object";

/// The object-type tree, rooted at the built-in `object` type.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeTree {
    // child -> parent; the root is absent from the map
    parent: BTreeMap<TypeName, TypeName>,
    // declaration order, for stable emission
    order: Vec<TypeName>,
}

impl TypeTree {
    pub fn root() -> TypeName {
        Ident::new(OBJECT_TYPE).unwrap()
    }

    pub fn insert(&mut self, child: TypeName, parent: TypeName) -> Result<(), String> {
        if child.as_str() == OBJECT_TYPE {
            return if parent.as_str() == OBJECT_TYPE {
                Ok(())
            } else {
                Err("the universal type `object` cannot have a parent".into())
            };
        }
        if let Some(existing) = self.parent.get(&child) {
            if *existing != parent {
                return Err(format!(
                    "type `{child}` declared with two parents: `{existing}` and `{parent}`"
                ));
            }
            return Ok(());
        }
        // walking up from the parent must not reach the child
        let mut cursor = parent.clone();
        while cursor.as_str() != OBJECT_TYPE {
            if cursor == child {
                return Err(format!("type cycle through `{child}`"));
            }
            cursor = self
                .parent
                .get(&cursor)
                .cloned()
                .unwrap_or_else(TypeTree::root);
        }
        self.parent.insert(child.clone(), parent);
        self.order.push(child);
        Ok(())
    }

    pub fn contains(&self, ty: &TypeName) -> bool {
        ty.as_str() == OBJECT_TYPE || self.parent.contains_key(ty)
    }

    /// True when `sub` equals `sup` or descends from it.
    pub fn is_subtype(&self, sub: &TypeName, sup: &TypeName) -> bool {
        if sup.as_str() == OBJECT_TYPE || sub == sup {
            return true;
        }
        let mut cursor = sub.clone();
        while cursor.as_str() != OBJECT_TYPE {
            if cursor == *sup {
                return true;
            }
            cursor = match self.parent.get(&cursor) {
                Some(p) => p.clone(),
                None => return false,
            };
        }
        false
    }

    /// Declared types in declaration order, excluding the root.
    pub fn declared(&self) -> impl Iterator<Item = (&TypeName, &TypeName)> {
        self.order.iter().map(move |t| (t, &self.parent[t]))
    }
}

/// Argument of a lifted atom: a schema variable or a constant object.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(VarName),
    Const(ObjectName),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

/// A lifted atom appearing in an action schema.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LiftedAtom {
    pub pred: PredicateName,
    pub args: Vec<Term>,
}

impl fmt::Display for LiftedAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.pred)?;
        for arg in &self.args {
            write!(f, " {arg}")?;
        }
        write!(f, ")")
    }
}

/// A ground atom over the fluent universe. Atoms order canonically by
/// predicate name, then argument names.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub pred: PredicateName,
    pub args: Vec<ObjectName>,
}

impl Atom {
    pub fn new(pred: PredicateName, args: Vec<ObjectName>) -> Atom {
        Atom { pred, args }
    }

    /// Functional rendering used in diffs and diagnostics: `open(pink-drawer)`.
    pub fn functional(&self) -> String {
        if self.args.is_empty() {
            format!("{}()", self.pred)
        } else {
            let args: Vec<&str> = self.args.iter().map(|a| a.as_str()).collect();
            format!("{}({})", self.pred, args.join(", "))
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.pred)?;
        for arg in &self.args {
            write!(f, " {arg}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Declared fluent schema: name plus typed parameter list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: PredicateName,
    pub params: Vec<(VarName, TypeName)>,
}

impl PredicateDecl {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

/// Supported `:requirements` flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Requirement {
    Strips,
    Typing,
    ActionCosts,
}

impl Requirement {
    pub fn from_keyword(kw: &str) -> Option<Requirement> {
        match kw {
            ":strips" => Some(Requirement::Strips),
            ":typing" => Some(Requirement::Typing),
            ":action-costs" => Some(Requirement::ActionCosts),
            _ => None,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Requirement::Strips => ":strips",
            Requirement::Typing => ":typing",
            Requirement::ActionCosts => ":action-costs",
        }
    }
}

/// A lifted action: typed parameters, cost, positive preconditions and
/// add/delete effects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: Ident,
    pub params: Vec<(VarName, TypeName)>,
    pub cost: u32,
    pub pre: BTreeSet<LiftedAtom>,
    pub add: BTreeSet<LiftedAtom>,
    pub del: BTreeSet<LiftedAtom>,
}

impl ActionSchema {
    /// Structural equality up to positional parameter renaming: same ordered
    /// parameter types, same cost, and identical atom sets once variables are
    /// replaced by their parameter position.
    pub fn structurally_equal(&self, other: &ActionSchema) -> bool {
        self.cost == other.cost
            && self.param_types() == other.param_types()
            && self.positional(&self.pre) == other.positional(&other.pre)
            && self.positional(&self.add) == other.positional(&other.add)
            && self.positional(&self.del) == other.positional(&other.del)
    }

    /// True when `self` applies at least whenever `other` would and has the
    /// same effects: identical parameter types and effects up to positional
    /// renaming, with `self.pre` a subset of `other.pre`. An operator
    /// subsumed by an existing one adds no new capability.
    pub fn subsumes(&self, other: &ActionSchema) -> bool {
        self.param_types() == other.param_types()
            && self.positional(&self.add) == other.positional(&other.add)
            && self.positional(&self.del) == other.positional(&other.del)
            && self
                .positional(&self.pre)
                .is_subset(&other.positional(&other.pre))
    }

    fn param_types(&self) -> Vec<&TypeName> {
        self.params.iter().map(|(_, t)| t).collect()
    }

    fn positional(&self, atoms: &BTreeSet<LiftedAtom>) -> BTreeSet<LiftedAtom> {
        let index: BTreeMap<&VarName, usize> = self
            .params
            .iter()
            .enumerate()
            .map(|(i, (v, _))| (v, i))
            .collect();
        atoms
            .iter()
            .map(|atom| LiftedAtom {
                pred: atom.pred.clone(),
                args: atom
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => Term::Var(Ident::new(&format!("p{}", index[v])).unwrap()),
                        Term::Const(c) => Term::Const(c.clone()),
                    })
                    .collect(),
            })
            .collect()
    }
}

/// A lifted planning domain: type tree, fluent declarations and action
/// schemas, plus optional complementary-fluent annotations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanningDomain {
    pub name: Ident,
    pub requirements: BTreeSet<Requirement>,
    pub types: TypeTree,
    pub constants: Vec<(ObjectName, TypeName)>,
    pub predicates: Vec<PredicateDecl>,
    /// Declared complementary fluent pairs (`:mutex-pair`): predicates with
    /// identical signatures whose ground instances flip as one edit move.
    pub mutex_pairs: Vec<(PredicateName, PredicateName)>,
    pub actions: Vec<ActionSchema>,
}

impl PlanningDomain {
    pub fn predicate(&self, name: &PredicateName) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == *name)
    }

    pub fn action(&self, name: &Ident) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == *name)
    }

    /// Validates a ground atom against the declarations: known predicate,
    /// matching arity, and argument types compatible with the signature.
    pub fn check_ground_atom(
        &self,
        atom: &Atom,
        object_type: impl Fn(&ObjectName) -> Option<TypeName>,
    ) -> Result<(), ParseErrorKind> {
        let decl = self
            .predicate(&atom.pred)
            .ok_or_else(|| ParseErrorKind::UnknownPredicate(atom.pred.clone()))?;
        if decl.arity() != atom.args.len() {
            return Err(ParseErrorKind::ArityMismatch {
                predicate: atom.pred.clone(),
                expected: decl.arity(),
                found: atom.args.len(),
            });
        }
        for (arg, (_, want)) in atom.args.iter().zip(&decl.params) {
            let have = object_type(arg)
                .ok_or_else(|| ParseErrorKind::UnknownObject(arg.clone()))?;
            if !self.types.is_subtype(&have, want) {
                return Err(ParseErrorKind::IllTypedAtom {
                    atom: atom.to_string(),
                    argument: arg.clone(),
                    expected: want.clone(),
                    found: have,
                });
            }
        }
        Ok(())
    }

    /// Full structural validation; used after parsing and after programmatic
    /// construction (merging learned operators).
    pub fn validate(&self) -> Result<(), ParseError> {
        let mut seen = BTreeSet::new();
        for schema in &self.actions {
            if !seen.insert(schema.name.clone()) {
                return Err(ParseError::internal(ParseErrorKind::DuplicateName(
                    format!("action `{}`", schema.name),
                )));
            }
            let mut params = BTreeSet::new();
            for (v, t) in &schema.params {
                if !params.insert(v.clone()) {
                    return Err(ParseError::internal(ParseErrorKind::DuplicateName(
                        format!("parameter `?{v}` in action `{}`", schema.name),
                    )));
                }
                if !self.types.contains(t) {
                    return Err(ParseError::internal(ParseErrorKind::UnknownType(t.clone())));
                }
            }
            for atom in schema.pre.iter().chain(&schema.add).chain(&schema.del) {
                self.check_lifted_atom(schema, atom)
                    .map_err(ParseError::internal)?;
            }
        }
        for (a, b) in &self.mutex_pairs {
            let (da, db) = match (self.predicate(a), self.predicate(b)) {
                (Some(da), Some(db)) => (da, db),
                _ => {
                    let missing = if self.predicate(a).is_none() { a } else { b };
                    return Err(ParseError::internal(ParseErrorKind::UnknownPredicate(
                        missing.clone(),
                    )));
                }
            };
            let sig = |d: &PredicateDecl| -> Vec<TypeName> {
                d.params.iter().map(|(_, t)| t.clone()).collect()
            };
            if sig(da) != sig(db) {
                return Err(ParseError::internal(ParseErrorKind::MutexSignatureMismatch {
                    first: a.clone(),
                    second: b.clone(),
                }));
            }
        }
        Ok(())
    }

    fn check_lifted_atom(
        &self,
        schema: &ActionSchema,
        atom: &LiftedAtom,
    ) -> Result<(), ParseErrorKind> {
        let decl = self
            .predicate(&atom.pred)
            .ok_or_else(|| ParseErrorKind::UnknownPredicate(atom.pred.clone()))?;
        if decl.arity() != atom.args.len() {
            return Err(ParseErrorKind::ArityMismatch {
                predicate: atom.pred.clone(),
                expected: decl.arity(),
                found: atom.args.len(),
            });
        }
        for (term, (_, want)) in atom.args.iter().zip(&decl.params) {
            match term {
                Term::Var(v) => {
                    let ty = schema
                        .params
                        .iter()
                        .find(|(p, _)| p == v)
                        .map(|(_, t)| t.clone())
                        .ok_or_else(|| ParseErrorKind::UnboundVariable(v.clone()))?;
                    if !self.types.is_subtype(&ty, want) {
                        return Err(ParseErrorKind::IllTypedAtom {
                            atom: atom.to_string(),
                            argument: v.clone(),
                            expected: want.clone(),
                            found: ty,
                        });
                    }
                }
                Term::Const(c) => {
                    let ty = self
                        .constants
                        .iter()
                        .find(|(o, _)| o == c)
                        .map(|(_, t)| t.clone())
                        .ok_or_else(|| ParseErrorKind::UnknownObject(c.clone()))?;
                    if !self.types.is_subtype(&ty, want) {
                        return Err(ParseErrorKind::IllTypedAtom {
                            atom: atom.to_string(),
                            argument: c.clone(),
                            expected: want.clone(),
                            found: ty,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// A planning problem: typed objects, initial state and goal over a domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanningProblem {
    pub name: Ident,
    pub domain_name: Ident,
    pub objects: BTreeMap<ObjectName, TypeName>,
    pub init: BTreeSet<Atom>,
    pub goal: BTreeSet<Atom>,
}

impl PlanningProblem {
    /// Type of an object or domain constant.
    pub fn object_type(&self, domain: &PlanningDomain, name: &ObjectName) -> Option<TypeName> {
        self.objects.get(name).cloned().or_else(|| {
            domain
                .constants
                .iter()
                .find(|(o, _)| o == name)
                .map(|(_, t)| t.clone())
        })
    }
}

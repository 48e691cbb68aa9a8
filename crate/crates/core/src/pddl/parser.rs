use std::collections::{BTreeMap, BTreeSet};

use super::ast::{
    ActionSchema, Atom, Ident, LiftedAtom, ObjectName, PlanningDomain, PlanningProblem,
    PredicateDecl, Requirement, Term, TypeName, TypeTree, VarName,
};
use super::error::{ParseError, ParseErrorKind};
use super::lexer::{tokenize, Token, TokenKind};

/// Parses a PDDL domain in the `:strips` + `:typing` + `:action-costs`
/// subset. Any other requirement is rejected with a named-feature error.
pub fn parse_domain(text: &str) -> Result<PlanningDomain, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(&tokens);
    let domain = p.domain()?;
    p.expect_end()?;
    domain.validate()?;
    Ok(domain)
}

/// Parses a PDDL problem against an already-parsed domain. Init atoms are
/// deduplicated by the set representation; an empty goal is rejected.
pub fn parse_problem(text: &str, domain: &PlanningDomain) -> Result<PlanningProblem, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(&tokens);
    let problem = p.problem(domain)?;
    p.expect_end()?;
    Ok(problem)
}

/// Parses a single ground atom written as `(pred arg ...)`. Used by the plan
/// and trace file formats.
pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(&tokens);
    let atom = p.ground_atom_sexpr()?;
    p.expect_end()?;
    Ok(atom)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token]) -> Parser<'t> {
        Parser { tokens, pos: 0 }
    }

    fn here(&self) -> (u32, u32) {
        match self.tokens.get(self.pos).or_else(|| self.tokens.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        }
    }

    fn fail<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::at(line, col, kind))
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn next(&mut self, expected: &str) -> Result<&'t Token, ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t)
            }
            None => self.fail(ParseErrorKind::UnexpectedEof(expected.into())),
        }
    }

    fn expect_lparen(&mut self) -> Result<(), ParseError> {
        let t = self.next("`(`")?;
        match t.kind {
            TokenKind::LParen => Ok(()),
            ref k => Err(ParseError::at(
                t.line,
                t.col,
                ParseErrorKind::UnexpectedToken { expected: "`(`".into(), found: k.describe() },
            )),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let t = self.next("`)`")?;
        match t.kind {
            TokenKind::RParen => Ok(()),
            ref k => Err(ParseError::at(
                t.line,
                t.col,
                ParseErrorKind::UnexpectedToken { expected: "`)`".into(), found: k.describe() },
            )),
        }
    }

    fn expect_symbol(&mut self, word: &str) -> Result<(), ParseError> {
        let t = self.next(&format!("`{word}`"))?;
        match &t.kind {
            TokenKind::Symbol(s) if s == word => Ok(()),
            k => Err(ParseError::at(
                t.line,
                t.col,
                ParseErrorKind::UnexpectedToken {
                    expected: format!("`{word}`"),
                    found: k.describe(),
                },
            )),
        }
    }

    fn symbol(&mut self, what: &str) -> Result<(String, u32, u32), ParseError> {
        let t = self.next(what)?;
        match &t.kind {
            TokenKind::Symbol(s) => Ok((s.clone(), t.line, t.col)),
            k => Err(ParseError::at(
                t.line,
                t.col,
                ParseErrorKind::UnexpectedToken { expected: what.into(), found: k.describe() },
            )),
        }
    }

    fn ident(&mut self, what: &str) -> Result<Ident, ParseError> {
        let (s, line, col) = self.symbol(what)?;
        Ident::new(&s).map_err(|m| ParseError::at(line, col, ParseErrorKind::InvalidIdentifier(m)))
    }

    fn at_rparen(&self) -> bool {
        matches!(self.peek(), Some(TokenKind::RParen))
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            let found = self.tokens[self.pos].kind.describe();
            self.fail(ParseErrorKind::UnexpectedToken { expected: "end of input".into(), found })
        }
    }

    // ------------------------------------------------------------------
    // domain
    // ------------------------------------------------------------------

    fn domain(&mut self) -> Result<PlanningDomain, ParseError> {
        self.expect_lparen()?;
        self.expect_symbol("define")?;
        self.expect_lparen()?;
        self.expect_symbol("domain")?;
        let name = self.ident("domain name")?;
        self.expect_rparen()?;

        let mut domain = PlanningDomain {
            name,
            requirements: BTreeSet::new(),
            types: TypeTree::default(),
            constants: Vec::new(),
            predicates: Vec::new(),
            mutex_pairs: Vec::new(),
            actions: Vec::new(),
        };

        while !self.at_rparen() {
            self.expect_lparen()?;
            let (section, line, col) = self.symbol("domain section")?;
            match section.as_str() {
                ":requirements" => self.requirements(&mut domain)?,
                ":types" => self.types_section(&mut domain)?,
                ":constants" => {
                    let typed = self.typed_list_symbols(&domain.types)?;
                    for (obj, ty) in typed {
                        if domain.constants.iter().any(|(o, _)| *o == obj) {
                            return self
                                .fail(ParseErrorKind::DuplicateName(format!("constant `{obj}`")));
                        }
                        domain.constants.push((obj, ty));
                    }
                    self.expect_rparen()?;
                }
                ":predicates" => self.predicates_section(&mut domain)?,
                ":functions" => self.functions_section()?,
                ":mutex-pair" => {
                    let a = self.ident("predicate name")?;
                    let b = self.ident("predicate name")?;
                    domain.mutex_pairs.push((a, b));
                    self.expect_rparen()?;
                }
                ":action" => {
                    let schema = self.action_section(&domain)?;
                    if domain.actions.iter().any(|a| a.name == schema.name) {
                        return Err(ParseError::at(
                            line,
                            col,
                            ParseErrorKind::DuplicateName(format!("action `{}`", schema.name)),
                        ));
                    }
                    domain.actions.push(schema);
                }
                other => {
                    return Err(ParseError::at(
                        line,
                        col,
                        ParseErrorKind::UnsupportedFeature(format!("domain section `{other}`")),
                    ))
                }
            }
        }
        self.expect_rparen()?;
        Ok(domain)
    }

    fn requirements(&mut self, domain: &mut PlanningDomain) -> Result<(), ParseError> {
        while !self.at_rparen() {
            let (kw, line, col) = self.symbol("requirement keyword")?;
            match Requirement::from_keyword(&kw) {
                Some(req) => {
                    domain.requirements.insert(req);
                }
                None => {
                    return Err(ParseError::at(
                        line,
                        col,
                        ParseErrorKind::UnsupportedRequirement(kw),
                    ))
                }
            }
        }
        self.expect_rparen()
    }

    fn types_section(&mut self, domain: &mut PlanningDomain) -> Result<(), ParseError> {
        // names... [- parent] repeated; untyped names root at `object`
        let mut pending: Vec<Ident> = Vec::new();
        loop {
            if self.at_rparen() {
                for child in pending.drain(..) {
                    self.insert_type(domain, child, TypeTree::root())?;
                }
                break;
            }
            let (word, line, col) = self.symbol("type name")?;
            if word == "-" {
                let parent = self.ident("parent type")?;
                if !domain.types.contains(&parent) && parent.as_str() != "object" {
                    // parents may be introduced by their first use
                    domain
                        .types
                        .insert(parent.clone(), TypeTree::root())
                        .map_err(|m| {
                            ParseError::at(line, col, ParseErrorKind::TypeTree(m))
                        })?;
                }
                for child in pending.drain(..) {
                    self.insert_type(domain, child, parent.clone())?;
                }
            } else {
                let child = Ident::new(&word).map_err(|m| {
                    ParseError::at(line, col, ParseErrorKind::InvalidIdentifier(m))
                })?;
                pending.push(child);
            }
        }
        self.expect_rparen()
    }

    fn insert_type(
        &self,
        domain: &mut PlanningDomain,
        child: Ident,
        parent: Ident,
    ) -> Result<(), ParseError> {
        let (line, col) = self.here();
        domain
            .types
            .insert(child, parent)
            .map_err(|m| ParseError::at(line, col, ParseErrorKind::TypeTree(m)))
    }

    fn predicates_section(&mut self, domain: &mut PlanningDomain) -> Result<(), ParseError> {
        while !self.at_rparen() {
            self.expect_lparen()?;
            let name = self.ident("predicate name")?;
            if domain.predicates.iter().any(|p| p.name == name) {
                return self.fail(ParseErrorKind::DuplicateName(format!("predicate `{name}`")));
            }
            let params = self.typed_list_variables(&domain.types)?;
            let mut seen = BTreeSet::new();
            for (v, _) in &params {
                if !seen.insert(v.clone()) {
                    return self.fail(ParseErrorKind::DuplicateName(format!(
                        "parameter `?{v}` in predicate `{name}`"
                    )));
                }
            }
            domain.predicates.push(PredicateDecl { name, params });
            self.expect_rparen()?;
        }
        self.expect_rparen()
    }

    /// Only `(total-cost)` is understood, as the cost bookkeeping function.
    fn functions_section(&mut self) -> Result<(), ParseError> {
        while !self.at_rparen() {
            self.expect_lparen()?;
            let (name, line, col) = self.symbol("function name")?;
            if name != "total-cost" {
                return Err(ParseError::at(
                    line,
                    col,
                    ParseErrorKind::UnsupportedFeature(format!("numeric function `{name}`")),
                ));
            }
            self.expect_rparen()?;
            // optional `- number` type annotation
            if let Some(TokenKind::Symbol(s)) = self.peek() {
                if s == "-" {
                    self.next("`-`")?;
                    self.symbol("function type")?;
                }
            }
        }
        self.expect_rparen()
    }

    fn action_section(&mut self, domain: &PlanningDomain) -> Result<ActionSchema, ParseError> {
        let name = self.ident("action name")?;
        let mut schema = ActionSchema {
            name,
            params: Vec::new(),
            cost: 1,
            pre: BTreeSet::new(),
            add: BTreeSet::new(),
            del: BTreeSet::new(),
        };
        while !self.at_rparen() {
            let (kw, line, col) = self.symbol("action clause")?;
            match kw.as_str() {
                ":parameters" => {
                    self.expect_lparen()?;
                    schema.params = self.typed_list_variables(&domain.types)?;
                    self.expect_rparen()?;
                    let mut seen = BTreeSet::new();
                    for (v, _) in &schema.params {
                        if !seen.insert(v.clone()) {
                            return self.fail(ParseErrorKind::DuplicateName(format!(
                                "parameter `?{v}` in action `{}`",
                                schema.name
                            )));
                        }
                    }
                }
                ":precondition" => {
                    for atom in self.conjunction(false)? {
                        match atom {
                            EffectItem::Positive(a) => {
                                schema.pre.insert(a);
                            }
                            EffectItem::Negative(_) => {
                                return self.fail(ParseErrorKind::NegativePrecondition)
                            }
                            EffectItem::Cost(_) => {
                                return self.fail(ParseErrorKind::UnsupportedFeature(
                                    "cost term in precondition".into(),
                                ))
                            }
                        }
                    }
                }
                ":effect" => {
                    for item in self.conjunction(true)? {
                        match item {
                            EffectItem::Positive(a) => {
                                schema.add.insert(a);
                            }
                            EffectItem::Negative(a) => {
                                schema.del.insert(a);
                            }
                            EffectItem::Cost(c) => {
                                if !domain.requirements.contains(&Requirement::ActionCosts) {
                                    return self.fail(ParseErrorKind::UnsupportedFeature(
                                        "action costs without the :action-costs requirement"
                                            .into(),
                                    ));
                                }
                                schema.cost = c;
                            }
                        }
                    }
                }
                other => {
                    return Err(ParseError::at(
                        line,
                        col,
                        ParseErrorKind::UnsupportedFeature(format!("action clause `{other}`")),
                    ))
                }
            }
        }
        self.expect_rparen()?;
        Ok(schema)
    }

    /// Parses `()`, a single item, or `(and item...)`.
    fn conjunction(&mut self, effects: bool) -> Result<Vec<EffectItem>, ParseError> {
        self.expect_lparen()?;
        match self.peek() {
            Some(TokenKind::RParen) => {
                self.expect_rparen()?;
                Ok(Vec::new())
            }
            Some(TokenKind::Symbol(s)) if s == "and" => {
                self.next("`and`")?;
                let mut items = Vec::new();
                while !self.at_rparen() {
                    self.expect_lparen()?;
                    items.push(self.effect_item(effects)?);
                }
                self.expect_rparen()?;
                Ok(items)
            }
            _ => Ok(vec![self.effect_item(effects)?]),
        }
    }

    /// An item whose opening paren was already consumed.
    fn effect_item(&mut self, effects: bool) -> Result<EffectItem, ParseError> {
        match self.peek() {
            Some(TokenKind::Symbol(s)) if s == "not" => {
                self.next("`not`")?;
                if !effects {
                    return self.fail(ParseErrorKind::NegativePrecondition);
                }
                self.expect_lparen()?;
                let atom = self.lifted_atom_body()?;
                self.expect_rparen()?;
                self.expect_rparen()?; // closes the (not ...) wrapper
                Ok(EffectItem::Negative(atom))
            }
            Some(TokenKind::Symbol(s)) if s == "increase" => {
                self.next("`increase`")?;
                self.expect_lparen()?;
                self.expect_symbol("total-cost")?;
                self.expect_rparen()?;
                let t = self.next("cost literal")?;
                let cost = match t.kind {
                    TokenKind::Integer(n) => u32::try_from(n).map_err(|_| {
                        ParseError::at(
                            t.line,
                            t.col,
                            ParseErrorKind::Lexical(format!("cost `{n}` out of range")),
                        )
                    })?,
                    ref k => {
                        return Err(ParseError::at(
                            t.line,
                            t.col,
                            ParseErrorKind::UnexpectedToken {
                                expected: "integer cost".into(),
                                found: k.describe(),
                            },
                        ))
                    }
                };
                self.expect_rparen()?;
                Ok(EffectItem::Cost(cost))
            }
            _ => {
                let atom = self.lifted_atom_body()?;
                self.expect_rparen()?;
                Ok(EffectItem::Positive(atom))
            }
        }
    }

    /// Atom body after `(`: predicate followed by variables or constants.
    fn lifted_atom_body(&mut self) -> Result<LiftedAtom, ParseError> {
        let pred = self.ident("predicate name")?;
        let mut args = Vec::new();
        while !self.at_rparen() {
            let t = self.next("atom argument")?;
            match &t.kind {
                TokenKind::Variable(v) => {
                    let v = Ident::new(v).map_err(|m| {
                        ParseError::at(t.line, t.col, ParseErrorKind::InvalidIdentifier(m))
                    })?;
                    args.push(Term::Var(v));
                }
                TokenKind::Symbol(s) => {
                    let c = Ident::new(s).map_err(|m| {
                        ParseError::at(t.line, t.col, ParseErrorKind::InvalidIdentifier(m))
                    })?;
                    args.push(Term::Const(c));
                }
                k => {
                    return Err(ParseError::at(
                        t.line,
                        t.col,
                        ParseErrorKind::UnexpectedToken {
                            expected: "variable or object name".into(),
                            found: k.describe(),
                        },
                    ))
                }
            }
        }
        Ok(LiftedAtom { pred, args })
    }

    fn ground_atom_sexpr(&mut self) -> Result<Atom, ParseError> {
        self.expect_lparen()?;
        let pred = self.ident("predicate name")?;
        let mut args = Vec::new();
        while !self.at_rparen() {
            args.push(self.ident("object name")?);
        }
        self.expect_rparen()?;
        Ok(Atom::new(pred, args))
    }

    /// `?v ?w - type ...` — variables with types, default `object`.
    fn typed_list_variables(
        &mut self,
        types: &TypeTree,
    ) -> Result<Vec<(VarName, TypeName)>, ParseError> {
        let mut out: Vec<(VarName, TypeName)> = Vec::new();
        let mut pending: Vec<VarName> = Vec::new();
        loop {
            match self.peek() {
                Some(TokenKind::Variable(_)) => {
                    let t = self.next("variable")?;
                    if let TokenKind::Variable(v) = &t.kind {
                        let v = Ident::new(v).map_err(|m| {
                            ParseError::at(t.line, t.col, ParseErrorKind::InvalidIdentifier(m))
                        })?;
                        pending.push(v);
                    }
                }
                Some(TokenKind::Symbol(s)) if s == "-" => {
                    self.next("`-`")?;
                    let ty = self.ident("type name")?;
                    if !types.contains(&ty) {
                        return self.fail(ParseErrorKind::UnknownType(ty));
                    }
                    for v in pending.drain(..) {
                        out.push((v, ty.clone()));
                    }
                }
                _ => {
                    for v in pending.drain(..) {
                        out.push((v, TypeTree::root()));
                    }
                    return Ok(out);
                }
            }
        }
    }

    /// `name name - type ...` — object names with types, default `object`.
    fn typed_list_symbols(
        &mut self,
        types: &TypeTree,
    ) -> Result<Vec<(ObjectName, TypeName)>, ParseError> {
        let mut out: Vec<(ObjectName, TypeName)> = Vec::new();
        let mut pending: Vec<ObjectName> = Vec::new();
        loop {
            match self.peek() {
                Some(TokenKind::Symbol(s)) if s == "-" => {
                    self.next("`-`")?;
                    let ty = self.ident("type name")?;
                    if !types.contains(&ty) {
                        return self.fail(ParseErrorKind::UnknownType(ty));
                    }
                    for o in pending.drain(..) {
                        out.push((o, ty.clone()));
                    }
                }
                Some(TokenKind::Symbol(_)) => {
                    let name = self.ident("object name")?;
                    pending.push(name);
                }
                _ => {
                    for o in pending.drain(..) {
                        out.push((o, TypeTree::root()));
                    }
                    return Ok(out);
                }
            }
        }
    }

    // ------------------------------------------------------------------
    // problem
    // ------------------------------------------------------------------

    fn problem(&mut self, domain: &PlanningDomain) -> Result<PlanningProblem, ParseError> {
        self.expect_lparen()?;
        self.expect_symbol("define")?;
        self.expect_lparen()?;
        self.expect_symbol("problem")?;
        let name = self.ident("problem name")?;
        self.expect_rparen()?;

        let mut problem = PlanningProblem {
            name,
            domain_name: domain.name.clone(),
            objects: BTreeMap::new(),
            init: BTreeSet::new(),
            goal: BTreeSet::new(),
        };
        let mut saw_goal = false;

        while !self.at_rparen() {
            self.expect_lparen()?;
            let (section, line, col) = self.symbol("problem section")?;
            match section.as_str() {
                ":domain" => {
                    let declared = self.ident("domain name")?;
                    if declared != domain.name {
                        return Err(ParseError::at(
                            line,
                            col,
                            ParseErrorKind::DomainMismatch {
                                expected: declared,
                                found: domain.name.clone(),
                            },
                        ));
                    }
                    self.expect_rparen()?;
                }
                ":objects" => {
                    let typed = self.typed_list_symbols(&domain.types)?;
                    for (obj, ty) in typed {
                        // re-declaring a domain constant at the same type is
                        // tolerated so merged domains accept prior problems
                        if let Some((_, ct)) =
                            domain.constants.iter().find(|(o, _)| *o == obj)
                        {
                            if *ct == ty {
                                continue;
                            }
                            return self
                                .fail(ParseErrorKind::DuplicateName(format!("object `{obj}`")));
                        }
                        if problem.objects.contains_key(&obj) {
                            return self
                                .fail(ParseErrorKind::DuplicateName(format!("object `{obj}`")));
                        }
                        problem.objects.insert(obj, ty);
                    }
                    self.expect_rparen()?;
                }
                ":init" => {
                    while !self.at_rparen() {
                        self.expect_lparen()?;
                        if let Some(TokenKind::Symbol(s)) = self.peek() {
                            if s == "=" {
                                // (= (total-cost) 0) bookkeeping, ignored
                                self.next("`=`")?;
                                self.expect_lparen()?;
                                self.expect_symbol("total-cost")?;
                                self.expect_rparen()?;
                                self.next("integer")?;
                                self.expect_rparen()?;
                                continue;
                            }
                        }
                        let (line, col) = self.here();
                        let atom = self.ground_atom_body()?;
                        self.check_atom(domain, &problem, &atom, line, col)?;
                        problem.init.insert(atom);
                    }
                    self.expect_rparen()?;
                }
                ":goal" => {
                    saw_goal = true;
                    let items = self.conjunction(false)?;
                    if items.is_empty() {
                        return Err(ParseError::at(line, col, ParseErrorKind::EmptyGoal));
                    }
                    for item in items {
                        match item {
                            EffectItem::Positive(lifted) => {
                                let atom = self.lower_ground(&lifted, line, col)?;
                                self.check_atom(domain, &problem, &atom, line, col)?;
                                problem.goal.insert(atom);
                            }
                            _ => {
                                return Err(ParseError::at(
                                    line,
                                    col,
                                    ParseErrorKind::UnsupportedFeature(
                                        "non-positive goal condition".into(),
                                    ),
                                ))
                            }
                        }
                    }
                    self.expect_rparen()?;
                }
                ":metric" => {
                    // (:metric minimize (total-cost)) accepted and ignored
                    self.expect_symbol("minimize")?;
                    self.expect_lparen()?;
                    self.expect_symbol("total-cost")?;
                    self.expect_rparen()?;
                    self.expect_rparen()?;
                }
                other => {
                    return Err(ParseError::at(
                        line,
                        col,
                        ParseErrorKind::UnsupportedFeature(format!("problem section `{other}`")),
                    ))
                }
            }
        }
        self.expect_rparen()?;
        if !saw_goal || problem.goal.is_empty() {
            return self.fail(ParseErrorKind::EmptyGoal);
        }
        Ok(problem)
    }

    fn ground_atom_body(&mut self) -> Result<Atom, ParseError> {
        let pred = self.ident("predicate name")?;
        let mut args = Vec::new();
        while !self.at_rparen() {
            args.push(self.ident("object name")?);
        }
        self.expect_rparen()?;
        Ok(Atom::new(pred, args))
    }

    fn lower_ground(&self, lifted: &LiftedAtom, line: u32, col: u32) -> Result<Atom, ParseError> {
        let mut args = Vec::new();
        for t in &lifted.args {
            match t {
                Term::Const(c) => args.push(c.clone()),
                Term::Var(v) => {
                    return Err(ParseError::at(
                        line,
                        col,
                        ParseErrorKind::UnboundVariable(v.clone()),
                    ))
                }
            }
        }
        Ok(Atom::new(lifted.pred.clone(), args))
    }

    fn check_atom(
        &self,
        domain: &PlanningDomain,
        problem: &PlanningProblem,
        atom: &Atom,
        line: u32,
        col: u32,
    ) -> Result<(), ParseError> {
        domain
            .check_ground_atom(atom, |o| problem.object_type(domain, o))
            .map_err(|kind| ParseError::at(line, col, kind))
    }
}

enum EffectItem {
    Positive(LiftedAtom),
    Negative(LiftedAtom),
    Cost(u32),
}

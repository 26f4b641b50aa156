//! Many-sorted trace logic: sorts, terms, formulas, sort checking and
//! groundings.
//!
//! Terms are typed by construction (every variant has a fixed result sort),
//! so sort checking only has to validate argument sorts and symbol arities
//! against a [`Signature`].

mod display;
pub mod sexpr;
mod signature;

use std::collections::{BTreeMap, BTreeSet};

pub use signature::{
    LastIterationSymbol, LocationSymbol, Signature, SymbolKind, VariableSymbol, MAIN_END,
    NAT_THEORY_SYMBOLS,
};

use thiserror::Error;

/// The four sorts of trace logic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    /// Loop iterations: the term algebra `zero`, `suc`.
    Nat,
    /// Program values.
    Int,
    /// Timepoints (location symbols applied to iterations).
    Time,
    Bool,
}

impl Sort {
    pub fn name(self) -> &'static str {
        match self {
            Sort::Nat => "Nat",
            Sort::Int => "Int",
            Sort::Time => "Time",
            Sort::Bool => "Bool",
        }
    }
}

/// A program location. `Line(n)` is the location of the statement whose
/// first token sits on source line `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    Line(u32),
    End,
}

impl Location {
    pub fn symbol(self) -> String {
        match self {
            Location::Line(n) => format!("l{n}"),
            Location::End => "l_end".to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

/// Integer comparisons. Equality is [`Formula::Eq`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Logical variable with its sort.
    Var(String, Sort),
    Zero,
    Suc(Box<Term>),
    Pred(Box<Term>),
    Int(i64),
    Arith(ArithOp, Box<Term>, Box<Term>),
    /// Location symbol applied to iteration arguments, outermost loop first.
    Loc(Location, Vec<Term>),
    /// Last-iteration symbol `n<line>` applied to enclosing iterations.
    LastIt(u32, Vec<Term>),
    /// Program variable symbol. Mutable variables carry a timepoint,
    /// arrays carry a position.
    Prog {
        var: String,
        time: Option<Box<Term>>,
        index: Option<Box<Term>>,
    },
    /// Length constant `<array>_length`.
    Length(String),
}

impl Term {
    pub fn var(name: impl Into<String>, sort: Sort) -> Term {
        Term::Var(name.into(), sort)
    }

    pub fn nat_var(name: impl Into<String>) -> Term {
        Term::Var(name.into(), Sort::Nat)
    }

    pub fn suc(t: Term) -> Term {
        Term::Suc(Box::new(t))
    }

    /// The numeral `suc^n(zero)`.
    pub fn nat(n: u64) -> Term {
        (0..n).fold(Term::Zero, |t, _| Term::suc(t))
    }

    pub fn end() -> Term {
        Term::Loc(Location::End, Vec::new())
    }

    pub fn arith(op: ArithOp, lhs: Term, rhs: Term) -> Term {
        Term::Arith(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn plus(lhs: Term, rhs: Term) -> Term {
        Term::arith(ArithOp::Add, lhs, rhs)
    }

    /// Program variable application `v(time[, index])`.
    pub fn prog(var: impl Into<String>, time: Option<Term>, index: Option<Term>) -> Term {
        Term::Prog {
            var: var.into(),
            time: time.map(Box::new),
            index: index.map(Box::new),
        }
    }

    /// The result sort. Intrinsic to the variant.
    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(_, s) => *s,
            Term::Zero | Term::Suc(_) | Term::Pred(_) | Term::LastIt(..) => Sort::Nat,
            Term::Int(_) | Term::Arith(..) | Term::Prog { .. } | Term::Length(_) => Sort::Int,
            Term::Loc(..) => Sort::Time,
        }
    }

    pub fn is_ground(&self) -> bool {
        let mut vars = BTreeSet::new();
        self.collect_vars(&mut vars);
        vars.is_empty()
    }

    fn collect_vars(&self, out: &mut BTreeSet<(String, Sort)>) {
        match self {
            Term::Var(n, s) => {
                out.insert((n.clone(), *s));
            }
            Term::Zero | Term::Int(_) | Term::Length(_) => {}
            Term::Suc(t) | Term::Pred(t) => t.collect_vars(out),
            Term::Arith(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Loc(_, args) | Term::LastIt(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
            Term::Prog { time, index, .. } => {
                if let Some(t) = time {
                    t.collect_vars(out);
                }
                if let Some(i) = index {
                    i.collect_vars(out);
                }
            }
        }
    }

    /// Top-down rewrite: `f` replaces a whole subterm when it returns `Some`.
    pub fn rewrite(&self, f: &dyn Fn(&Term) -> Option<Term>) -> Term {
        if let Some(t) = f(self) {
            return t;
        }
        match self {
            Term::Var(..) | Term::Zero | Term::Int(_) | Term::Length(_) => self.clone(),
            Term::Suc(t) => Term::Suc(Box::new(t.rewrite(f))),
            Term::Pred(t) => Term::Pred(Box::new(t.rewrite(f))),
            Term::Arith(op, a, b) => Term::arith(*op, a.rewrite(f), b.rewrite(f)),
            Term::Loc(l, args) => Term::Loc(*l, args.iter().map(|a| a.rewrite(f)).collect()),
            Term::LastIt(n, args) => {
                Term::LastIt(*n, args.iter().map(|a| a.rewrite(f)).collect())
            }
            Term::Prog { var, time, index } => Term::Prog {
                var: var.clone(),
                time: time.as_ref().map(|t| Box::new(t.rewrite(f))),
                index: index.as_ref().map(|t| Box::new(t.rewrite(f))),
            },
        }
    }

    fn substitute(&self, map: &BTreeMap<String, Term>) -> Term {
        if map.is_empty() {
            return self.clone();
        }
        self.rewrite(&|t| match t {
            Term::Var(n, _) => map.get(n).cloned(),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Binder {
    pub name: String,
    pub sort: Sort,
}

impl Binder {
    pub fn new(name: impl Into<String>, sort: Sort) -> Binder {
        Binder {
            name: name.into(),
            sort,
        }
    }

    pub fn nat(name: impl Into<String>) -> Binder {
        Binder::new(name, Sort::Nat)
    }

    pub fn term(&self) -> Term {
        Term::Var(self.name.clone(), self.sort)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    /// Equality; both sides share a sort.
    Eq(Term, Term),
    /// `leq` over Nat. Strict `<` is `leq(suc(x), y)`, see [`Formula::nat_lt`].
    NatLeq(Term, Term),
    Cmp(CmpOp, Term, Term),
    Reach(Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Vec<Binder>, Box<Formula>),
    Exists(Vec<Binder>, Box<Formula>),
}

impl Formula {
    /// Conjunction that flattens nested conjunctions and drops `True`.
    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Disjunction that flattens nested disjunctions and drops `False`.
    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    /// Universal closure over `binders`; no quantifier when the list is empty.
    pub fn forall(binders: Vec<Binder>, body: Formula) -> Formula {
        if binders.is_empty() {
            body
        } else {
            Formula::Forall(binders, Box::new(body))
        }
    }

    pub fn exists(binders: Vec<Binder>, body: Formula) -> Formula {
        if binders.is_empty() {
            body
        } else {
            Formula::Exists(binders, Box::new(body))
        }
    }

    pub fn eq(lhs: Term, rhs: Term) -> Formula {
        Formula::Eq(lhs, rhs)
    }

    pub fn nat_leq(lhs: Term, rhs: Term) -> Formula {
        Formula::NatLeq(lhs, rhs)
    }

    /// `lhs < rhs` over Nat, in the normal form `leq(suc(lhs), rhs)`.
    pub fn nat_lt(lhs: Term, rhs: Term) -> Formula {
        Formula::NatLeq(Term::suc(lhs), rhs)
    }

    pub fn cmp(op: CmpOp, lhs: Term, rhs: Term) -> Formula {
        Formula::Cmp(op, lhs, rhs)
    }

    pub fn reach(tp: Term) -> Formula {
        Formula::Reach(tp)
    }

    /// Free variables with their sorts.
    pub fn free_vars(&self) -> BTreeSet<(String, Sort)> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<(String, Sort)>) {
        let add_term = |t: &Term, bound: &Vec<String>, out: &mut BTreeSet<_>| {
            let mut vs = BTreeSet::new();
            t.collect_vars(&mut vs);
            out.extend(vs.into_iter().filter(|(n, _)| !bound.contains(n)));
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::NatLeq(a, b) | Formula::Cmp(_, a, b) => {
                add_term(a, bound, out);
                add_term(b, bound, out);
            }
            Formula::Reach(t) => add_term(t, bound, out),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_free(bound, out);
                }
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(bs, body) | Formula::Exists(bs, body) => {
                let mark = bound.len();
                bound.extend(bs.iter().map(|b| b.name.clone()));
                body.collect_free(bound, out);
                bound.truncate(mark);
            }
        }
    }

    /// Applies `f` to every maximal term of every atom, outside-in.
    /// Binders are left untouched; callers must not rewrite bound variables.
    pub fn rewrite_terms(&self, f: &dyn Fn(&Term) -> Option<Term>) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Eq(a, b) => Formula::Eq(a.rewrite(f), b.rewrite(f)),
            Formula::NatLeq(a, b) => Formula::NatLeq(a.rewrite(f), b.rewrite(f)),
            Formula::Cmp(op, a, b) => Formula::Cmp(*op, a.rewrite(f), b.rewrite(f)),
            Formula::Reach(t) => Formula::Reach(t.rewrite(f)),
            Formula::Not(g) => Formula::not(g.rewrite_terms(f)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.rewrite_terms(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.rewrite_terms(f)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.rewrite_terms(f), b.rewrite_terms(f)),
            Formula::Iff(a, b) => Formula::iff(a.rewrite_terms(f), b.rewrite_terms(f)),
            Formula::Forall(bs, body) => {
                Formula::Forall(bs.clone(), Box::new(body.rewrite_terms(f)))
            }
            Formula::Exists(bs, body) => {
                Formula::Exists(bs.clone(), Box::new(body.rewrite_terms(f)))
            }
        }
    }

    /// Capture-avoiding substitution of free variables.
    pub fn substitute(&self, map: &BTreeMap<String, Term>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Eq(a, b) => Formula::Eq(a.substitute(map), b.substitute(map)),
            Formula::NatLeq(a, b) => Formula::NatLeq(a.substitute(map), b.substitute(map)),
            Formula::Cmp(op, a, b) => Formula::Cmp(*op, a.substitute(map), b.substitute(map)),
            Formula::Reach(t) => Formula::Reach(t.substitute(map)),
            Formula::Not(g) => Formula::not(g.substitute(map)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.substitute(map)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.substitute(map)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.substitute(map), b.substitute(map)),
            Formula::Iff(a, b) => Formula::iff(a.substitute(map), b.substitute(map)),
            Formula::Forall(bs, body) | Formula::Exists(bs, body) => {
                let (bs, body) = substitute_under(bs, body, map);
                if matches!(self, Formula::Forall(..)) {
                    Formula::Forall(bs, Box::new(body))
                } else {
                    Formula::Exists(bs, Box::new(body))
                }
            }
        }
    }
}

fn substitute_under(
    binders: &[Binder],
    body: &Formula,
    map: &BTreeMap<String, Term>,
) -> (Vec<Binder>, Formula) {
    let mut inner: BTreeMap<String, Term> = map
        .iter()
        .filter(|(k, _)| !binders.iter().any(|b| &b.name == *k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    // Names free in the replacement terms that a binder would capture.
    let mut incoming = BTreeSet::new();
    for t in inner.values() {
        let mut vs = BTreeSet::new();
        t.collect_vars(&mut vs);
        incoming.extend(vs.into_iter().map(|(n, _)| n));
    }
    let mut taken: BTreeSet<String> = incoming.clone();
    taken.extend(body.free_vars().into_iter().map(|(n, _)| n));
    let mut out = Vec::with_capacity(binders.len());
    for b in binders {
        if incoming.contains(&b.name) {
            let mut k = 1;
            let fresh = loop {
                let cand = format!("{}_{k}", b.name);
                if !taken.contains(&cand) {
                    break cand;
                }
                k += 1;
            };
            taken.insert(fresh.clone());
            inner.insert(b.name.clone(), Term::Var(fresh.clone(), b.sort));
            out.push(Binder::new(fresh, b.sort));
        } else {
            out.push(b.clone());
        }
    }
    (out, body.substitute(&inner))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("sort error at {path}: {message}")]
    Sort { path: String, message: String },
    #[error("grounding for `{0}` is not a ground term")]
    NonGround(String),
    #[error("grounding for `{0}` must have sort Nat")]
    NotNat(String),
}

/// Map from Nat-sorted variables to ground Nat terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Grounding {
    map: BTreeMap<String, Term>,
}

impl Grounding {
    pub fn new() -> Grounding {
        Grounding::default()
    }

    pub fn insert(&mut self, var: impl Into<String>, term: Term) -> Result<(), LogicError> {
        let var = var.into();
        if term.sort() != Sort::Nat {
            return Err(LogicError::NotNat(var));
        }
        if !term.is_ground() {
            return Err(LogicError::NonGround(var));
        }
        self.map.insert(var, term);
        Ok(())
    }

    pub fn with(mut self, var: impl Into<String>, term: Term) -> Result<Grounding, LogicError> {
        self.insert(var, term)?;
        Ok(self)
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.map.get(var)
    }

    pub fn domain(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }

    /// `other ∘ self`: apply `self` first, then `other`.
    pub fn then(&self, other: &Grounding) -> Grounding {
        let mut map: BTreeMap<String, Term> = self
            .map
            .iter()
            .map(|(k, v)| (k.clone(), v.substitute(&other.map)))
            .collect();
        for (k, v) in &other.map {
            map.entry(k.clone()).or_insert_with(|| v.clone());
        }
        Grounding { map }
    }

    pub fn as_map(&self) -> &BTreeMap<String, Term> {
        &self.map
    }
}

/// Replaces every free occurrence of the grounding's variables.
pub fn apply_grounding(f: &Formula, g: &Grounding) -> Formula {
    f.substitute(&g.map)
}

/// Checks that `f` is well-sorted against `sig`.
pub fn sort_check(f: &Formula, sig: &Signature) -> Result<(), LogicError> {
    SortChecker {
        sig,
        scopes: Vec::new(),
    }
    .formula(f, "formula")
}

struct SortChecker<'a> {
    sig: &'a Signature,
    scopes: Vec<Binder>,
}

impl SortChecker<'_> {
    fn err<T>(path: &str, message: impl Into<String>) -> Result<T, LogicError> {
        Err(LogicError::Sort {
            path: path.to_string(),
            message: message.into(),
        })
    }

    fn expect(&mut self, t: &Term, sort: Sort, path: &str) -> Result<(), LogicError> {
        self.term(t, path)?;
        if t.sort() != sort {
            return Self::err(
                path,
                format!("expected {}, found {}", sort.name(), t.sort().name()),
            );
        }
        Ok(())
    }

    fn args(&mut self, args: &[Term], sorts: &[Sort], path: &str) -> Result<(), LogicError> {
        if args.len() != sorts.len() {
            return Self::err(
                path,
                format!("expected {} arguments, found {}", sorts.len(), args.len()),
            );
        }
        for (k, (a, s)) in args.iter().zip(sorts).enumerate() {
            self.expect(a, *s, &format!("{path}.arg{k}"))?;
        }
        Ok(())
    }

    fn term(&mut self, t: &Term, path: &str) -> Result<(), LogicError> {
        match t {
            Term::Var(name, sort) => {
                if let Some(b) = self.scopes.iter().rev().find(|b| &b.name == name) {
                    if b.sort != *sort {
                        return Self::err(
                            path,
                            format!(
                                "variable `{name}` bound as {} used as {}",
                                b.sort.name(),
                                sort.name()
                            ),
                        );
                    }
                }
                if self.sig.lookup(name).is_some() {
                    return Self::err(path, format!("variable `{name}` clashes with a symbol"));
                }
                Ok(())
            }
            Term::Zero | Term::Int(_) => Ok(()),
            Term::Suc(a) => self.expect(a, Sort::Nat, &format!("{path}.suc")),
            Term::Pred(a) => self.expect(a, Sort::Nat, &format!("{path}.pred")),
            Term::Arith(_, a, b) => {
                self.expect(a, Sort::Int, &format!("{path}.lhs"))?;
                self.expect(b, Sort::Int, &format!("{path}.rhs"))
            }
            Term::Loc(loc, args) => {
                let Some(sym) = self.sig.location(*loc) else {
                    return Self::err(path, format!("unknown location `{}`", loc.symbol()));
                };
                let sorts = vec![Sort::Nat; sym.arity];
                self.args(args, &sorts, &format!("{path}.{}", loc.symbol()))
            }
            Term::LastIt(line, args) => {
                let Some(sym) = self.sig.last_iteration(*line) else {
                    return Self::err(path, format!("unknown last-iteration symbol `n{line}`"));
                };
                let sorts = vec![Sort::Nat; sym.arity];
                self.args(args, &sorts, &format!("{path}.n{line}"))
            }
            Term::Prog { var, time, index } => {
                let Some(sym) = self.sig.variable(var) else {
                    return Self::err(path, format!("unknown program variable `{var}`"));
                };
                let expected: Vec<Sort> = sym.arg_sorts();
                let mut given = Vec::new();
                given.extend(time.iter().map(|t| (**t).clone()));
                given.extend(index.iter().map(|t| (**t).clone()));
                if time.is_some() != sym.mutable {
                    return Self::err(
                        path,
                        format!("timepoint argument mismatch for `{var}`"),
                    );
                }
                self.args(&given, &expected, &format!("{path}.{var}"))
            }
            Term::Length(arr) => {
                if self.sig.lookup(&format!("{arr}_length")).is_none() {
                    return Self::err(path, format!("unknown length constant for `{arr}`"));
                }
                Ok(())
            }
        }
    }

    fn same_sort(&mut self, a: &Term, b: &Term, path: &str) -> Result<(), LogicError> {
        self.term(a, &format!("{path}.lhs"))?;
        self.term(b, &format!("{path}.rhs"))?;
        if a.sort() != b.sort() {
            return Self::err(
                path,
                format!(
                    "equality between {} and {}",
                    a.sort().name(),
                    b.sort().name()
                ),
            );
        }
        Ok(())
    }

    fn formula(&mut self, f: &Formula, path: &str) -> Result<(), LogicError> {
        match f {
            Formula::True | Formula::False => Ok(()),
            Formula::Eq(a, b) => self.same_sort(a, b, &format!("{path}.eq")),
            Formula::NatLeq(a, b) => {
                self.expect(a, Sort::Nat, &format!("{path}.leq.lhs"))?;
                self.expect(b, Sort::Nat, &format!("{path}.leq.rhs"))
            }
            Formula::Cmp(op, a, b) => {
                let p = format!("{path}.{}", op.symbol());
                self.expect(a, Sort::Int, &format!("{p}.lhs"))?;
                self.expect(b, Sort::Int, &format!("{p}.rhs"))
            }
            Formula::Reach(t) => self.expect(t, Sort::Time, &format!("{path}.Reach")),
            Formula::Not(g) => self.formula(g, &format!("{path}.not")),
            Formula::And(gs) | Formula::Or(gs) => {
                let op = if matches!(f, Formula::And(_)) { "and" } else { "or" };
                for (k, g) in gs.iter().enumerate() {
                    self.formula(g, &format!("{path}.{op}[{k}]"))?;
                }
                Ok(())
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                let op = if matches!(f, Formula::Implies(..)) { "implies" } else { "iff" };
                self.formula(a, &format!("{path}.{op}.lhs"))?;
                self.formula(b, &format!("{path}.{op}.rhs"))
            }
            Formula::Forall(bs, body) | Formula::Exists(bs, body) => {
                for b in bs {
                    if b.sort == Sort::Bool {
                        return Self::err(path, format!("cannot quantify `{}` over Bool", b.name));
                    }
                }
                let mark = self.scopes.len();
                self.scopes.extend(bs.iter().cloned());
                let q = if matches!(f, Formula::Forall(..)) { "forall" } else { "exists" };
                let r = self.formula(body, &format!("{path}.{q}"));
                self.scopes.truncate(mark);
                r
            }
        }
    }
}

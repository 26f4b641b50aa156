//! Trace lemma instances: value evolution (A1), intermediate value (B1)
//! and iteration injectivity (B2), per loop and mutable variable.

use std::collections::BTreeSet;

use crate::ast::VarKind;
use crate::logic::{Binder, CmpOp, Formula, Signature, Sort, Term, VariableSymbol};
use crate::program_model::{iteration_name, Iterations, ProgramModel};
use crate::semantics::{Axiom, AxiomKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LemmaKind {
    A1Eq,
    A1Leq,
    B1,
    B2,
}

impl LemmaKind {
    pub fn tag(self) -> &'static str {
        match self {
            LemmaKind::A1Eq => "a1-eq",
            LemmaKind::A1Leq => "a1-leq",
            LemmaKind::B1 => "b1",
            LemmaKind::B2 => "b2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaInstance {
    pub kind: LemmaKind,
    pub loop_line: u32,
    pub variable: String,
    pub formula: Formula,
    pub label: String,
}

impl LemmaInstance {
    pub fn into_axiom(self) -> Axiom {
        Axiom::new(self.label, AxiomKind::Lemma, self.formula)
    }
}

/// The value relation `∘` of A1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Leq,
}

impl Relation {
    fn apply(self, a: Term, b: Term) -> Formula {
        match self {
            Relation::Eq => Formula::eq(a, b),
            Relation::Leq => Formula::cmp(CmpOp::Le, a, b),
        }
    }
}

/// Names and terms shared by the lemma templates for one `(w, v)` pair.
struct Frame<'a> {
    model: &'a ProgramModel,
    w: u32,
    v: &'a VariableSymbol,
    /// Position variable for arrays.
    pos: Option<Binder>,
    taken: BTreeSet<String>,
}

impl<'a> Frame<'a> {
    fn new(model: &'a ProgramModel, w: u32, v: &'a VariableSymbol) -> Frame<'a> {
        let mut taken: BTreeSet<String> = model
            .loops()
            .into_iter()
            .map(iteration_name)
            .collect();
        let mut frame = Frame {
            model,
            w,
            v,
            pos: None,
            taken: BTreeSet::new(),
        };
        if v.kind == VarKind::Array {
            let name = fresh(model.signature(), &mut taken, "pos");
            frame.pos = Some(Binder::new(name, Sort::Int));
        }
        frame.taken = taken;
        frame
    }

    /// A bound name avoiding symbols, iteration variables and names
    /// already used in this instance.
    fn fresh(&mut self, base: &str) -> String {
        fresh(self.model.signature(), &mut self.taken, base)
    }

    /// `v(tp_w(it))`, at the lifted position for arrays.
    fn value(&self, it: Term) -> Term {
        let tp = self
            .model
            .tp_at(self.w, it)
            .expect("loop line from the model");
        Term::prog(
            &self.v.name,
            Some(tp),
            self.pos.as_ref().map(Binder::term),
        )
    }

    fn last_it(&self) -> Term {
        self.model
            .last_it(self.w, &Iterations::symbolic())
            .expect("loop line from the model")
    }

    /// Closes `body` over the position variable, then the enclosing
    /// iterations (outermost first).
    fn close(&self, body: Formula) -> Formula {
        let body = Formula::forall(self.pos.iter().cloned().collect(), body);
        let encl = self
            .model
            .enclosing_loops(self.w)
            .expect("loop line from the model")
            .iter()
            .map(|l| Binder::nat(iteration_name(*l)))
            .collect();
        Formula::forall(encl, body)
    }

    fn dense(&mut self) -> Formula {
        let it = self.fresh("it");
        let t = Term::nat_var(&it);
        let now = self.value(t.clone());
        let next = self.value(Term::suc(t.clone()));
        Formula::forall(
            vec![Binder::nat(it)],
            Formula::implies(
                Formula::nat_lt(t, self.last_it()),
                Formula::or([
                    Formula::eq(next.clone(), now.clone()),
                    Formula::eq(next, Term::plus(now, Term::Int(1))),
                ]),
            ),
        )
    }

    fn a1(&mut self, rel: Relation) -> Formula {
        let (bl, br, it) = (self.fresh("bl"), self.fresh("br"), self.fresh("it"));
        let (l, r, i) = (Term::nat_var(&bl), Term::nat_var(&br), Term::nat_var(&it));
        let at_bl = self.value(l.clone());
        let step = Formula::forall(
            vec![Binder::nat(&it)],
            Formula::implies(
                Formula::and([
                    Formula::nat_leq(l.clone(), i.clone()),
                    Formula::nat_lt(i.clone(), r.clone()),
                    rel.apply(at_bl.clone(), self.value(i.clone())),
                ]),
                rel.apply(at_bl.clone(), self.value(Term::suc(i))),
            ),
        );
        let conclusion = Formula::implies(
            Formula::nat_leq(l, r.clone()),
            rel.apply(at_bl, self.value(r)),
        );
        self.close(Formula::forall(
            vec![Binder::nat(bl), Binder::nat(br)],
            Formula::implies(step, conclusion),
        ))
    }

    fn b1(&mut self) -> Formula {
        let dense = self.dense();
        let x = self.fresh("x");
        let it = self.fresh("it");
        let (xv, i) = (Term::var(&x, Sort::Int), Term::nat_var(&it));
        let last = self.last_it();
        let now = self.value(i.clone());
        let premise = Formula::and([
            dense,
            Formula::cmp(CmpOp::Le, self.value(Term::Zero), xv.clone()),
            Formula::cmp(CmpOp::Lt, xv.clone(), self.value(last.clone())),
        ]);
        let witness = Formula::exists(
            vec![Binder::nat(it)],
            Formula::and([
                Formula::nat_lt(i.clone(), last),
                Formula::eq(now.clone(), xv),
                Formula::eq(self.value(Term::suc(i)), Term::plus(now, Term::Int(1))),
            ]),
        );
        self.close(Formula::forall(
            vec![Binder::new(x, Sort::Int)],
            Formula::implies(premise, witness),
        ))
    }

    fn b2(&mut self) -> Formula {
        let dense = self.dense();
        let (n1, n2) = (self.fresh("it1"), self.fresh("it2"));
        let (i1, i2) = (Term::nat_var(&n1), Term::nat_var(&n2));
        let at1 = self.value(i1.clone());
        let premise = Formula::and([
            dense,
            Formula::eq(
                self.value(Term::suc(i1.clone())),
                Term::plus(at1.clone(), Term::Int(1)),
            ),
            Formula::nat_lt(i1, i2.clone()),
            Formula::nat_leq(i2.clone(), self.last_it()),
        ]);
        self.close(Formula::forall(
            vec![Binder::nat(n1), Binder::nat(n2)],
            Formula::implies(premise, Formula::not(Formula::eq(at1, self.value(i2)))),
        ))
    }
}

fn fresh(sig: &Signature, taken: &mut BTreeSet<String>, base: &str) -> String {
    let ok = |n: &str, taken: &BTreeSet<String>| sig.lookup(n).is_none() && !taken.contains(n);
    let name = if ok(base, taken) {
        base.to_string()
    } else {
        (1..)
            .map(|k| format!("{base}_{k}"))
            .find(|n| ok(n, taken))
            .unwrap()
    };
    taken.insert(name.clone());
    name
}

fn variable<'a>(model: &'a ProgramModel, v: &str) -> &'a VariableSymbol {
    model
        .signature()
        .variable(v)
        .filter(|s| s.mutable)
        .unwrap_or_else(|| panic!("`{v}` is not a mutable variable"))
}

fn instance(kind: LemmaKind, w: u32, v: &str, formula: Formula) -> LemmaInstance {
    LemmaInstance {
        kind,
        loop_line: w,
        variable: v.to_string(),
        formula,
        label: format!("lemma-{}-l{w}-{v}", kind.tag()),
    }
}

/// `Dense_{w,v}`, closed over the enclosing iterations (and the position
/// for arrays).
pub fn dense_formula(model: &ProgramModel, w: u32, v: &str) -> Formula {
    let mut frame = Frame::new(model, w, variable(model, v));
    let d = frame.dense();
    frame.close(d)
}

pub fn lemma_a1(model: &ProgramModel, w: u32, v: &str, rel: Relation) -> LemmaInstance {
    let kind = match rel {
        Relation::Eq => LemmaKind::A1Eq,
        Relation::Leq => LemmaKind::A1Leq,
    };
    let f = Frame::new(model, w, variable(model, v)).a1(rel);
    instance(kind, w, v, f)
}

pub fn lemma_b1(model: &ProgramModel, w: u32, v: &str) -> LemmaInstance {
    let f = Frame::new(model, w, variable(model, v)).b1();
    instance(LemmaKind::B1, w, v, f)
}

pub fn lemma_b2(model: &ProgramModel, w: u32, v: &str) -> LemmaInstance {
    let f = Frame::new(model, w, variable(model, v)).b2();
    instance(LemmaKind::B2, w, v, f)
}

/// A1 (both relations), B1 and B2 for every loop and mutable variable.
/// Arrays are lifted over an outer position quantifier.
pub fn instantiate_all(model: &ProgramModel) -> Vec<LemmaInstance> {
    let mut out = Vec::new();
    for w in model.loops() {
        for v in model.signature().mutable_variables() {
            let v = v.name.as_str();
            out.push(lemma_a1(model, w, v, Relation::Eq));
            out.push(lemma_a1(model, w, v, Relation::Leq));
            out.push(lemma_b1(model, w, v));
            out.push(lemma_b2(model, w, v));
        }
    }
    out
}

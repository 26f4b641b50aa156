//! Axiomatic semantics: one Reach-guarded axiom per statement, the Reach
//! definitions, and the embedded safety conjecture.

use thiserror::Error;

use crate::ast::{Expr, RelOp, StmtKind, VarKind};
use crate::lemmas;
use crate::logic::{
    sort_check, Binder, CmpOp, Formula, LogicError, Signature, Sort, Term,
    VariableSymbol,
};
use crate::program_model::{
    iteration_name, iteration_var, ContextOwner, Iterations, ModelError, ProgramModel, Subprogram,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{label}: {source}")]
    Logic { label: String, source: LogicError },
    #[error("unknown symbol `{0}` in property")]
    Scope(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxiomKind {
    Theory,
    Semantics,
    Reach,
    Lemma,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axiom {
    pub label: String,
    pub kind: AxiomKind,
    pub formula: Formula,
}

impl Axiom {
    pub fn new(label: impl Into<String>, kind: AxiomKind, formula: Formula) -> Axiom {
        Axiom {
            label: label.into(),
            kind,
            formula,
        }
    }
}

/// Everything handed to a prover: signature, axioms and the conjecture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationTask {
    pub signature: Signature,
    pub theory_axioms: Vec<Axiom>,
    pub semantics_axioms: Vec<Axiom>,
    pub reach_axioms: Vec<Axiom>,
    pub lemma_instances: Vec<Axiom>,
    pub conjecture: Formula,
}

impl VerificationTask {
    /// Program axioms in emission order: semantics, Reach, lemmas.
    pub fn program_axioms(&self) -> impl Iterator<Item = &Axiom> {
        self.semantics_axioms
            .iter()
            .chain(&self.reach_axioms)
            .chain(&self.lemma_instances)
    }
}

/// A deliberate corruption of the generator, used to test that the oracle
/// notices encoding bugs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// In the assignment at `line`, the frame conjunct for `var` becomes
    /// `var(end) = var(start) + 1`. For the assigned array itself this hits
    /// the untouched-positions clause.
    Frame { line: u32, var: String },
    /// In the Reach definition of the statement at `line`, the innermost
    /// guard (branch condition or iteration bound) is negated.
    ReachGuard { line: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskOptions {
    pub include_lemmas: bool,
    pub mutation: Option<Mutation>,
}

impl Default for TaskOptions {
    fn default() -> Self {
        TaskOptions {
            include_lemmas: true,
            mutation: None,
        }
    }
}

/// Translation of a program expression at a timepoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evaluated {
    Term(Term),
    Formula(Formula),
}

/// `⟦e⟧(tp)`.
pub fn eval_expr_at(sig: &Signature, e: &Expr, tp: &Term) -> Evaluated {
    let term = |e: &Expr| match eval_expr_at(sig, e, tp) {
        Evaluated::Term(t) => t,
        Evaluated::Formula(_) => unreachable!("well-sorted integer expression"),
    };
    let formula = |e: &Expr| match eval_expr_at(sig, e, tp) {
        Evaluated::Formula(f) => f,
        Evaluated::Term(_) => unreachable!("well-sorted condition"),
    };
    let time = |v: &str| {
        sig.variable(v)
            .is_some_and(|s| s.mutable)
            .then(|| tp.clone())
    };
    match e {
        Expr::Int(n) => Evaluated::Term(Term::Int(*n)),
        Expr::Bool(true) => Evaluated::Formula(Formula::True),
        Expr::Bool(false) => Evaluated::Formula(Formula::False),
        Expr::Var(v) => Evaluated::Term(Term::prog(v, time(v), None)),
        Expr::ArrayRead(a, i) => Evaluated::Term(Term::prog(a, time(a), Some(term(i)))),
        Expr::Length(a) => Evaluated::Term(Term::Length(a.clone())),
        Expr::Arith(op, a, b) => Evaluated::Term(Term::arith(*op, term(a), term(b))),
        Expr::Rel(op, a, b) => {
            let (a, b) = (term(a), term(b));
            Evaluated::Formula(match op {
                RelOp::Lt => Formula::cmp(CmpOp::Lt, a, b),
                RelOp::Le => Formula::cmp(CmpOp::Le, a, b),
                RelOp::Gt => Formula::cmp(CmpOp::Gt, a, b),
                RelOp::Ge => Formula::cmp(CmpOp::Ge, a, b),
                RelOp::Eq => Formula::eq(a, b),
                RelOp::Ne => Formula::not(Formula::eq(a, b)),
            })
        }
        Expr::Not(a) => Evaluated::Formula(Formula::not(formula(a))),
        Expr::And(a, b) => Evaluated::Formula(Formula::and([formula(a), formula(b)])),
        Expr::Or(a, b) => Evaluated::Formula(Formula::or([formula(a), formula(b)])),
    }
}

fn cond_at(sig: &Signature, e: &Expr, tp: &Term) -> Formula {
    match eval_expr_at(sig, e, tp) {
        Evaluated::Formula(f) => f,
        Evaluated::Term(_) => unreachable!("conditions are boolean"),
    }
}

fn int_at(sig: &Signature, e: &Expr, tp: &Term) -> Term {
    match eval_expr_at(sig, e, tp) {
        Evaluated::Term(t) => t,
        Evaluated::Formula(_) => unreachable!("assigned values are integers"),
    }
}

fn value(v: &VariableSymbol, tp: &Term, pos: Option<&Term>) -> Term {
    Term::prog(&v.name, v.mutable.then(|| tp.clone()), pos.cloned())
}

/// `lhs(t2) = lhs(t1) (+ 1 when corrupted)`, lifted over positions for
/// arrays.
fn same_value(sig: &Signature, v: &VariableSymbol, tp1: &Term, tp2: &Term, bump: bool) -> Formula {
    let rhs = |t: Term| if bump { Term::plus(t, Term::Int(1)) } else { t };
    if v.kind == VarKind::Array {
        let pos = Binder::new(sig.fresh("pos"), Sort::Int);
        let p = pos.term();
        let (a, b) = (value(v, tp1, Some(&p)), value(v, tp2, Some(&p)));
        let eq = if bump {
            Formula::eq(b, rhs(a))
        } else {
            Formula::eq(a, b)
        };
        Formula::forall(vec![pos], eq)
    } else if bump {
        Formula::eq(value(v, tp2, None), rhs(value(v, tp1, None)))
    } else {
        Formula::eq(value(v, tp1, None), value(v, tp2, None))
    }
}

/// `Eq(v, tp1, tp2)`.
pub fn eq_formula(sig: &Signature, v: &VariableSymbol, tp1: &Term, tp2: &Term) -> Formula {
    same_value(sig, v, tp1, tp2, false)
}

/// `EqAll(tp1, tp2)` over the mutable variables.
pub fn eqall_formula(sig: &Signature, tp1: &Term, tp2: &Term) -> Formula {
    Formula::and(
        sig.mutable_variables()
            .map(|v| eq_formula(sig, v, tp1, tp2)),
    )
}

fn frames(
    sig: &Signature,
    except: &str,
    tp1: &Term,
    tp2: &Term,
    corrupt: Option<&str>,
) -> Vec<Formula> {
    sig.mutable_variables()
        .filter(|v| v.name != except)
        .map(|v| same_value(sig, v, tp1, tp2, corrupt == Some(v.name.as_str())))
        .collect()
}

/// `Update(v, e, tp1, tp2)`: `v(tp2) = ⟦e⟧(tp1)` and every other mutable
/// variable unchanged.
pub fn update_formula(sig: &Signature, v: &str, e: &Expr, tp1: &Term, tp2: &Term) -> Formula {
    update_with(sig, v, e, tp1, tp2, None)
}

fn update_with(
    sig: &Signature,
    v: &str,
    e: &Expr,
    tp1: &Term,
    tp2: &Term,
    corrupt: Option<&str>,
) -> Formula {
    let mut parts = vec![Formula::eq(
        Term::prog(v, Some(tp2.clone()), None),
        int_at(sig, e, tp1),
    )];
    parts.extend(frames(sig, v, tp1, tp2, corrupt));
    Formula::and(parts)
}

/// `UpdateArr(v, e1, e2, tp1, tp2)`.
pub fn update_arr_formula(
    sig: &Signature,
    v: &str,
    index: &Expr,
    val: &Expr,
    tp1: &Term,
    tp2: &Term,
) -> Formula {
    update_arr_with(sig, v, index, val, tp1, tp2, None)
}

fn update_arr_with(
    sig: &Signature,
    v: &str,
    index: &Expr,
    val: &Expr,
    tp1: &Term,
    tp2: &Term,
    corrupt: Option<&str>,
) -> Formula {
    let at = int_at(sig, index, tp1);
    let pos = Binder::new(sig.fresh("pos"), Sort::Int);
    let p = pos.term();
    let old = Term::prog(v, Some(tp1.clone()), Some(p.clone()));
    let new = Term::prog(v, Some(tp2.clone()), Some(p.clone()));
    let untouched = if corrupt == Some(v) {
        Formula::eq(new, Term::plus(old, Term::Int(1)))
    } else {
        Formula::eq(new, old)
    };
    let mut parts = vec![
        Formula::forall(
            vec![pos],
            Formula::implies(Formula::not(Formula::eq(p, at.clone())), untouched),
        ),
        Formula::eq(
            Term::prog(v, Some(tp2.clone()), Some(at)),
            int_at(sig, val, tp1),
        ),
    ];
    parts.extend(frames(sig, v, tp1, tp2, corrupt));
    Formula::and(parts)
}

fn binders(loops: &[u32]) -> Vec<Binder> {
    loops.iter().map(|w| Binder::nat(iteration_name(*w))).collect()
}

/// `⟦s⟧` for the statement at `line`, over the symbolic iteration
/// variables of its enclosing loops.
pub fn statement_semantics(model: &ProgramModel, line: u32) -> Result<Formula, SemanticsError> {
    statement_with(model, line, None)
}

fn statement_with(
    model: &ProgramModel,
    line: u32,
    corrupt: Option<&str>,
) -> Result<Formula, SemanticsError> {
    let sig = model.signature();
    let start = model.start_of(Subprogram::Stmt(line))?;
    let end = model.end_of(Subprogram::Stmt(line))?;
    let s = model.statement(line)?;
    Ok(match &s.kind {
        StmtKind::Skip => eqall_formula(sig, &end, &start),
        StmtKind::Assign { target, value } => update_with(sig, target, value, &start, &end, corrupt),
        StmtKind::ArrayAssign {
            target,
            index,
            value,
        } => update_arr_with(sig, target, index, value, &start, &end, corrupt),
        StmtKind::If { cond, .. } => {
            let c = cond_at(sig, cond, &start);
            let then_ctx = model
                .context_of_owner(ContextOwner::Then(line))
                .expect("if owns a then context");
            let else_ctx = model
                .context_of_owner(ContextOwner::Else(line))
                .expect("if owns an else context");
            let then_start = model.start_of(Subprogram::Context(then_ctx))?;
            let else_start = model.start_of(Subprogram::Context(else_ctx))?;
            Formula::and([
                Formula::implies(c.clone(), eqall_formula(sig, &then_start, &start)),
                Formula::implies(Formula::not(c), eqall_formula(sig, &else_start, &start)),
            ])
        }
        StmtKind::While { cond, .. } => {
            let it = iteration_var(line);
            let last = model.last_it(line, &Iterations::symbolic())?;
            let tp_it = model.tp_at(line, it.clone())?;
            let tp_last = model.tp_at(line, last.clone())?;
            let body = model
                .context_of_owner(ContextOwner::Body(line))
                .expect("while owns a body context");
            let body_start = model.start_of(Subprogram::Context(body))?;
            let own = vec![Binder::nat(iteration_name(line))];
            let before_last = Formula::nat_lt(it, last);
            Formula::and([
                Formula::forall(
                    own.clone(),
                    Formula::implies(before_last.clone(), cond_at(sig, cond, &tp_it)),
                ),
                Formula::not(cond_at(sig, cond, &tp_last)),
                Formula::forall(
                    own,
                    Formula::implies(before_last, eqall_formula(sig, &body_start, &tp_it)),
                ),
                eqall_formula(sig, &end, &tp_last),
            ])
        }
    })
}

/// `∀enclIts. (Reach(start_s) → ⟦s⟧)`.
pub fn semantics_axiom(model: &ProgramModel, line: u32) -> Result<Axiom, SemanticsError> {
    semantics_axiom_with(model, line, None)
}

fn semantics_axiom_with(
    model: &ProgramModel,
    line: u32,
    corrupt: Option<&str>,
) -> Result<Axiom, SemanticsError> {
    let start = model.start_of(Subprogram::Stmt(line))?;
    let body = statement_with(model, line, corrupt)?;
    let f = Formula::forall(
        binders(model.enclosing_loops(line)?),
        Formula::implies(Formula::reach(start), body),
    );
    Ok(Axiom::new(
        format!("semantics-l{line}"),
        AxiomKind::Semantics,
        f,
    ))
}

/// Right-hand side of `Reach(start_c) := ...` for the context holding
/// `line`; `flip` negates its guard.
fn context_reach(model: &ProgramModel, line: u32, flip: bool) -> Result<Formula, SemanticsError> {
    let sig = model.signature();
    let ctx = model.context_of(line)?;
    let guard = |f: Formula| if flip { Formula::not(f) } else { f };
    Ok(match model.context(ctx).owner {
        ContextOwner::TopLevel => Formula::True,
        ContextOwner::Then(s) | ContextOwner::Else(s) => {
            let start = model.start_of(Subprogram::Stmt(s))?;
            let StmtKind::If { cond, .. } = &model.statement(s)?.kind else {
                unreachable!("branch contexts belong to if statements")
            };
            let mut c = cond_at(sig, cond, &start);
            if matches!(model.context(ctx).owner, ContextOwner::Else(_)) {
                c = Formula::not(c);
            }
            Formula::and([Formula::reach(start), guard(c)])
        }
        ContextOwner::Body(w) => {
            let start = model.start_of(Subprogram::Stmt(w))?;
            let last = model.last_it(w, &Iterations::symbolic())?;
            Formula::and([
                Formula::reach(start),
                guard(Formula::nat_lt(iteration_var(w), last)),
            ])
        }
    })
}

fn reach_axiom(model: &ProgramModel, line: u32, flip: bool) -> Result<Axiom, SemanticsError> {
    let mut loops = model.enclosing_loops(line)?.to_vec();
    let f = if model.is_while(line) {
        loops.push(line);
        let it = iteration_var(line);
        let last = model.last_it(line, &Iterations::symbolic())?;
        let bound = Formula::nat_leq(it.clone(), last);
        let bound = if flip { Formula::not(bound) } else { bound };
        Formula::iff(
            Formula::reach(model.tp_at(line, it)?),
            Formula::and([context_reach(model, line, false)?, bound]),
        )
    } else {
        Formula::iff(
            Formula::reach(model.start_of(Subprogram::Stmt(line))?),
            context_reach(model, line, flip)?,
        )
    };
    Ok(Axiom::new(
        format!("reach-l{line}"),
        AxiomKind::Reach,
        Formula::forall(binders(&loops), f),
    ))
}

/// Reach definitions: one per statement start, plus `Reach(l_end)`.
///
/// A context's start is its first statement's start, so the context cases
/// appear as the right-hand sides of these biconditionals.
pub fn reach_axioms(model: &ProgramModel) -> Result<Vec<Axiom>, SemanticsError> {
    reach_axioms_with(model, None)
}

fn reach_axioms_with(
    model: &ProgramModel,
    flip_line: Option<u32>,
) -> Result<Vec<Axiom>, SemanticsError> {
    let mut out = Vec::new();
    for &line in model.statement_lines() {
        out.push(reach_axiom(model, line, flip_line == Some(line))?);
    }
    out.push(Axiom::new(
        "reach-l_end",
        AxiomKind::Reach,
        Formula::iff(Formula::reach(Term::end()), Formula::True),
    ));
    Ok(out)
}

/// The property as a conjecture over the signature. Whole-program
/// properties need no Reach guard since the program start is reached.
pub fn embed_property(model: &ProgramModel, f: &Formula) -> Result<Formula, SemanticsError> {
    let sig = model.signature();
    check_symbols(sig, f)?;
    sort_check(f, sig).map_err(|source| SemanticsError::Logic {
        label: "conjecture".into(),
        source,
    })?;
    Ok(f.clone())
}

fn check_symbols(sig: &Signature, f: &Formula) -> Result<(), SemanticsError> {
    let missing = std::cell::RefCell::new(None);
    f.rewrite_terms(&|t| {
        let name = match t {
            Term::Prog { var, .. } if sig.variable(var).is_none() => Some(var.clone()),
            Term::Length(a) if sig.lookup(&format!("{a}_length")).is_none() => {
                Some(format!("{a}_length"))
            }
            Term::Loc(l, _) if sig.location(*l).is_none() => Some(l.symbol()),
            _ => None,
        };
        if let Some(n) = name {
            missing.borrow_mut().get_or_insert(n);
        }
        None
    });
    match missing.into_inner() {
        Some(n) => Err(SemanticsError::Scope(n)),
        None => Ok(()),
    }
}

/// Moves every program variable read at `l_end` to `tp`.
fn retime(f: &Formula, tp: &Term) -> Formula {
    f.rewrite_terms(&|t| retimed(t, tp))
}

fn retimed(t: &Term, tp: &Term) -> Option<Term> {
    match t {
        Term::Prog {
            var,
            time: Some(time),
            index,
        } if **time == Term::end() => Some(Term::prog(
            var,
            Some(tp.clone()),
            index.as_ref().map(|i| i.rewrite(&|u| retimed(u, tp))),
        )),
        _ => None,
    }
}

/// The trace-logic reading of the Hoare triple `{pre} p {post}`:
/// `∀enclIts. Reach(start_p) → (pre(start_p) → post(end_p))`.
///
/// `pre` and `post` are written like assertions, with variables read at
/// `main_end`; those reads are moved to `start_p` and `end_p`.
pub fn hoare_triple(
    model: &ProgramModel,
    p: Subprogram,
    pre: &Formula,
    post: &Formula,
) -> Result<Formula, SemanticsError> {
    let start = model.start_of(p)?;
    let end = model.end_of(p)?;
    let loops = match p {
        Subprogram::Stmt(line) => model.enclosing_loops(line)?.to_vec(),
        Subprogram::Context(id) => model.context_loops(id),
    };
    Ok(Formula::forall(
        binders(&loops),
        Formula::implies(
            Formula::reach(start.clone()),
            Formula::implies(retime(pre, &start), retime(post, &end)),
        ),
    ))
}

/// Axioms of the Nat term algebra with `leqNat`. Bound names avoid the
/// symbols of `sig`.
pub fn nat_theory_axioms(sig: &Signature) -> Vec<Axiom> {
    let (xn, yn) = (sig.fresh("x"), sig.fresh("y"));
    let x = || Term::nat_var(&xn);
    let y = || Term::nat_var(&yn);
    let bx = || vec![Binder::nat(&xn)];
    vec![
        Axiom::new(
            "nat-pred-suc",
            AxiomKind::Theory,
            Formula::forall(bx(), Formula::eq(Term::Pred(Box::new(Term::suc(x()))), x())),
        ),
        Axiom::new(
            "nat-leq-zero",
            AxiomKind::Theory,
            Formula::forall(bx(), Formula::nat_leq(Term::Zero, x())),
        ),
        Axiom::new(
            "nat-leq-suc",
            AxiomKind::Theory,
            Formula::forall(
                vec![Binder::nat(&xn), Binder::nat(&yn)],
                Formula::iff(
                    Formula::nat_leq(Term::suc(x()), Term::suc(y())),
                    Formula::nat_leq(x(), y()),
                ),
            ),
        ),
        Axiom::new(
            "nat-suc-not-leq-zero",
            AxiomKind::Theory,
            Formula::forall(bx(), Formula::not(Formula::nat_leq(Term::suc(x()), Term::Zero))),
        ),
    ]
}

/// Every place a [`Mutation`] can be seeded.
///
/// Reach flips skip top-level non-loop statements, whose definition has no
/// guard to negate.
pub fn mutation_sites(model: &ProgramModel) -> Vec<Mutation> {
    let sig = model.signature();
    let mut out = Vec::new();
    for &line in model.statement_lines() {
        let s = model.statement(line).expect("line from the model");
        let target = match &s.kind {
            StmtKind::Assign { target, .. } => Some((target.as_str(), false)),
            StmtKind::ArrayAssign { target, .. } => Some((target.as_str(), true)),
            _ => None,
        };
        if let Some((target, array)) = target {
            for v in sig.mutable_variables() {
                if v.name != target || array {
                    out.push(Mutation::Frame {
                        line,
                        var: v.name.clone(),
                    });
                }
            }
        }
    }
    for &line in model.statement_lines() {
        let top = model.context_of(line).ok() == Some(model.top_level());
        if !top || model.is_while(line) {
            out.push(Mutation::ReachGuard { line });
        }
    }
    out
}

/// Assembles the verification task for the program held by `model`.
pub fn build_task(
    model: &ProgramModel,
    opts: &TaskOptions,
) -> Result<VerificationTask, SemanticsError> {
    let sig = model.signature().clone();
    let (frame, flip) = match &opts.mutation {
        Some(Mutation::Frame { line, var }) => (Some((*line, var.as_str())), None),
        Some(Mutation::ReachGuard { line }) => (None, Some(*line)),
        None => (None, None),
    };
    let mut semantics_axioms = Vec::new();
    for &line in model.statement_lines() {
        let corrupt = frame.and_then(|(l, v)| (l == line).then_some(v));
        semantics_axioms.push(semantics_axiom_with(model, line, corrupt)?);
    }
    let reach_axioms = reach_axioms_with(model, flip)?;
    let lemma_instances = if opts.include_lemmas {
        lemmas::instantiate_all(model)
            .into_iter()
            .map(lemmas::LemmaInstance::into_axiom)
            .collect()
    } else {
        Vec::new()
    };
    let conjecture = embed_property(model, &model.program().assertion)?;
    let task = VerificationTask {
        theory_axioms: nat_theory_axioms(&sig),
        signature: sig,
        semantics_axioms,
        reach_axioms,
        lemma_instances,
        conjecture,
    };
    for a in task.theory_axioms.iter().chain(task.program_axioms()) {
        sort_check(&a.formula, &task.signature).map_err(|source| SemanticsError::Logic {
            label: a.label.clone(),
            source,
        })?;
    }
    Ok(task)
}

#[cfg(test)]
mod tests;

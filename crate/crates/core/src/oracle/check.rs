use std::fmt;

use super::eval::{eval_formula_in, Env, EvalDomains, EvalError, Value};
use super::exec::{ExecutionTrace, InputValuation};
use crate::logic::{Binder, Formula};
use crate::program_model::{
    iteration_name, iteration_var, ContextId, ContextOwner, Iterations, ModelError, ProgramModel,
    Subprogram,
};
use crate::semantics::{Axiom, AxiomKind, VerificationTask};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckCategory {
    Theory,
    Semantics,
    Reach,
    Lemma,
    /// Reachability facts that hold on every terminating trace.
    Fact,
    Conjecture,
}

impl From<AxiomKind> for CheckCategory {
    fn from(k: AxiomKind) -> Self {
        match k {
            AxiomKind::Theory => CheckCategory::Theory,
            AxiomKind::Semantics => CheckCategory::Semantics,
            AxiomKind::Reach => CheckCategory::Reach,
            AxiomKind::Lemma => CheckCategory::Lemma,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    False,
    OutOfDomain(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub label: String,
    pub category: CheckCategory,
    pub trace: usize,
    pub input: InputValuation,
    /// Values of the outermost universally bound variables.
    pub grounding: Vec<(String, Value)>,
    pub outcome: Outcome,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on trace {} [{}]: ", self.label, self.trace, self.input)?;
        match &self.outcome {
            Outcome::False => f.write_str("false")?,
            Outcome::OutOfDomain(m) => write!(f, "out of domain ({m})")?,
        }
        if !self.grounding.is_empty() {
            let g: Vec<String> = self
                .grounding
                .iter()
                .map(|(n, v)| format!("{n}={v}"))
                .collect();
            write!(f, " at {}", g.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub checks: usize,
    /// False or unevaluable axioms, lemmas and facts.
    pub violations: Vec<Violation>,
    /// Traces on which the conjecture does not hold.
    pub conjecture_failures: Vec<Violation>,
}

impl CheckReport {
    pub fn is_sound(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checks += other.checks;
        self.violations.extend(other.violations);
        self.conjecture_failures.extend(other.conjecture_failures);
    }

    pub fn summary(&self) -> String {
        format!("{} violations / {} checks", self.violations.len(), self.checks)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for v in &self.violations {
            out.push_str(&format!("VIOLATION {v}\n"));
        }
        for v in &self.conjecture_failures {
            out.push_str(&format!("CONJECTURE {v}\n"));
        }
        out.push_str(&self.summary());
        out.push('\n');
        out
    }
}

/// A closed formula checked alongside the task.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fact {
    pub label: String,
    pub formula: Formula,
}

/// `∀encl. Reach(start_p) → Reach(end_p)` for every statement and context,
/// and for every loop `∀encl. Reach(tp_w(0)) → ∀it. it ≤ n_w → Reach(tp_w(it))`.
pub fn lemma1_facts(model: &ProgramModel) -> Result<Vec<Fact>, ModelError> {
    let binders = |loops: &[u32]| -> Vec<Binder> {
        loops
            .iter()
            .map(|w| Binder::nat(iteration_name(*w)))
            .collect()
    };
    let fact = |p: Subprogram, loops: &[u32], label: String| -> Result<Fact, ModelError> {
        Ok(Fact {
            label,
            formula: Formula::forall(
                binders(loops),
                Formula::implies(
                    Formula::reach(model.start_of(p)?),
                    Formula::reach(model.end_of(p)?),
                ),
            ),
        })
    };
    let mut out = Vec::new();
    for &line in model.statement_lines() {
        out.push(fact(
            Subprogram::Stmt(line),
            model.enclosing_loops(line)?,
            format!("lemma1-l{line}"),
        )?);
    }
    for (k, ctx) in model.contexts().iter().enumerate() {
        let id = ContextId(k);
        let label = match ctx.owner {
            ContextOwner::TopLevel => "lemma1-top".to_string(),
            ContextOwner::Then(s) => format!("lemma1-then-l{s}"),
            ContextOwner::Else(s) => format!("lemma1-else-l{s}"),
            ContextOwner::Body(s) => format!("lemma1-body-l{s}"),
        };
        out.push(fact(Subprogram::Context(id), &model.context_loops(id), label)?);
    }
    for w in model.loops() {
        let it = iteration_var(w);
        let every = Formula::forall(
            vec![Binder::nat(iteration_name(w))],
            Formula::implies(
                Formula::nat_leq(it.clone(), model.last_it(w, &Iterations::symbolic())?),
                Formula::reach(model.tp_at(w, it)?),
            ),
        );
        out.push(Fact {
            label: format!("lemma1-iterations-l{w}"),
            formula: Formula::forall(
                binders(model.enclosing_loops(w)?),
                Formula::implies(Formula::reach(model.start_of(Subprogram::Stmt(w))?), every),
            ),
        });
    }
    Ok(out)
}

/// Searches the outermost universal block of `f` for an assignment that
/// falsifies its body. `Err` carries the assignment at which evaluation
/// failed.
pub fn counterexample(
    f: &Formula,
    trace: &ExecutionTrace,
    dom: &EvalDomains,
) -> Result<Option<Env>, (EvalError, Env)> {
    let mut binders: Vec<&Binder> = Vec::new();
    let mut body = f;
    while let Formula::Forall(bs, inner) = body {
        binders.extend(bs);
        body = inner;
    }
    let mut env = Env::new();
    search(&binders, body, trace, dom, &mut env)
}

fn search(
    bs: &[&Binder],
    body: &Formula,
    trace: &ExecutionTrace,
    dom: &EvalDomains,
    env: &mut Env,
) -> Result<Option<Env>, (EvalError, Env)> {
    let Some((first, rest)) = bs.split_first() else {
        return match eval_formula_in(body, trace, dom, env) {
            Ok(true) => Ok(None),
            Ok(false) => Ok(Some(env.clone())),
            Err(e) => Err((e, env.clone())),
        };
    };
    let values = dom.values(first.sort).map_err(|e| (e, env.clone()))?;
    for v in values {
        env.push((first.name.clone(), v));
        let r = search(rest, body, trace, dom, env);
        env.pop();
        if let Some(found) = r? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

fn check_one(
    label: &str,
    category: CheckCategory,
    f: &Formula,
    trace: &ExecutionTrace,
    index: usize,
    dom: &EvalDomains,
    report: &mut CheckReport,
) {
    report.checks += 1;
    let (grounding, outcome) = match counterexample(f, trace, dom) {
        Ok(None) => return,
        Ok(Some(env)) => (env, Outcome::False),
        Err((e, env)) => {
            let EvalError::OutOfDomain(m) = e;
            (env, Outcome::OutOfDomain(m))
        }
    };
    let v = Violation {
        label: label.to_string(),
        category,
        trace: index,
        input: trace.input().clone(),
        grounding,
        outcome,
    };
    if category == CheckCategory::Conjecture {
        report.conjecture_failures.push(v);
    } else {
        report.violations.push(v);
    }
}

/// Checks every axiom, lemma instance and the conjecture on one trace;
/// `index` identifies the trace in the report.
pub fn check_trace(task: &VerificationTask, trace: &ExecutionTrace, index: usize) -> CheckReport {
    let dom = EvalDomains::for_trace(trace);
    let mut report = CheckReport::default();
    let axioms: Vec<&Axiom> = task.theory_axioms.iter().chain(task.program_axioms()).collect();
    for a in axioms {
        check_one(&a.label, a.kind.into(), &a.formula, trace, index, &dom, &mut report);
    }
    check_one(
        "conjecture",
        CheckCategory::Conjecture,
        &task.conjecture,
        trace,
        index,
        &dom,
        &mut report,
    );
    report
}

pub fn check_task(task: &VerificationTask, traces: &[ExecutionTrace]) -> CheckReport {
    let mut report = CheckReport::default();
    for (k, tr) in traces.iter().enumerate() {
        report.merge(check_trace(task, tr, k));
    }
    report
}

/// Checks `facts` on one trace. Partial traces are skipped, since the
/// facts only hold once execution has finished.
pub fn check_facts_on_trace(facts: &[Fact], trace: &ExecutionTrace, index: usize) -> CheckReport {
    let mut report = CheckReport::default();
    if !trace.terminated() {
        return report;
    }
    let dom = EvalDomains::for_trace(trace);
    for f in facts {
        check_one(&f.label, CheckCategory::Fact, &f.formula, trace, index, &dom, &mut report);
    }
    report
}

pub fn check_facts(facts: &[Fact], traces: &[ExecutionTrace]) -> CheckReport {
    let mut report = CheckReport::default();
    for (k, tr) in traces.iter().enumerate() {
        report.merge(check_facts_on_trace(facts, tr, k));
    }
    report
}

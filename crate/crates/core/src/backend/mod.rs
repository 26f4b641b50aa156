//! SMT-LIB emission and the external prover driver.

mod prover;

use std::fmt::Write;

use thiserror::Error;

pub use crate::logic::sexpr::NatEncoding;
use crate::logic::sexpr::Style;
use crate::logic::{Binder, Formula, Sort, Term, MAIN_END};
use crate::semantics::{Axiom, VerificationTask};
pub use prover::{classify_output, run_prover, ProverCommand, ProverStatus, ProverVerdict};

/// Environment variable holding the default prover command template.
pub const PROVER_ENV: &str = "TRACEGEN_PROVER";

pub const DEFAULT_TIMEOUT_SECONDS: u64 = 60;

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("timeout must be positive")]
    InvalidTimeout,
    #[error("{label}: {reason}")]
    Unsupported { label: String, reason: String },
    #[error("empty prover command")]
    EmptyCommand,
    #[error("cannot start prover `{program}`: {source}")]
    Spawn {
        program: String,
        source: std::io::Error,
    },
    #[error("i/o error while running prover: {0}")]
    Io(#[from] std::io::Error),
}

/// How the conjecture is stated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ConjectureMode {
    /// `(assert-not F)`, understood by first-order provers such as Vampire.
    AssertNot,
    /// `(assert (not F))`, understood by every SMT solver.
    #[default]
    NegatedAssert,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmissionConfig {
    pub nat_mode: NatEncoding,
    pub conjecture_mode: ConjectureMode,
    pub include_lemmas: bool,
    timeout_seconds: u64,
}

impl Default for EmissionConfig {
    fn default() -> Self {
        EmissionConfig {
            nat_mode: NatEncoding::Algebraic,
            conjecture_mode: ConjectureMode::NegatedAssert,
            include_lemmas: true,
            timeout_seconds: DEFAULT_TIMEOUT_SECONDS,
        }
    }
}

impl EmissionConfig {
    pub fn timeout_seconds(&self) -> u64 {
        self.timeout_seconds
    }

    pub fn with_timeout(mut self, seconds: u64) -> Result<EmissionConfig, BackendError> {
        if seconds == 0 {
            return Err(BackendError::InvalidTimeout);
        }
        self.timeout_seconds = seconds;
        Ok(self)
    }
}

/// Label of the (negated) conjecture assertion.
pub const CONJECTURE_LABEL: &str = "negated-conjecture";

/// Renders `task` as an SMT-LIB 2.6 script ending in `(check-sat)`.
pub fn emit_smtlib(task: &VerificationTask, cfg: &EmissionConfig) -> Result<String, BackendError> {
    let style = Style {
        nat: cfg.nat_mode,
        ..Style::default()
    };
    let sig = &task.signature;
    let nat = style.sort(Sort::Nat);
    let mut out = String::new();
    out.push_str("(set-logic ALL)\n");
    out.push_str("(declare-sort Time 0)\n");
    if cfg.nat_mode == NatEncoding::Algebraic {
        out.push_str("(declare-datatypes ((Nat 0)) (((zero) (suc (pred Nat)))))\n");
        out.push_str("(declare-fun leqNat (Nat Nat) Bool)\n");
    }
    out.push_str("(declare-fun Reach (Time) Bool)\n");
    for loc in sig.locations() {
        declare(&mut out, &loc.name(), &vec![nat; loc.arity], "Time");
    }
    let _ = writeln!(out, "(define-fun {MAIN_END} () Time l_end)");
    for n in sig.last_iterations() {
        declare(&mut out, &n.name(), &vec![nat; n.arity], nat);
    }
    for v in sig.variables() {
        let args: Vec<&str> = v.arg_sorts().into_iter().map(|s| style.sort(s)).collect();
        declare(&mut out, &v.name, &args, "Int");
    }
    for a in sig.arrays() {
        declare(&mut out, &format!("{}_length", a.name), &[], "Int");
    }

    let mut axioms: Vec<Axiom> = Vec::new();
    match cfg.nat_mode {
        NatEncoding::Algebraic => axioms.extend(task.theory_axioms.iter().cloned()),
        NatEncoding::Integer => axioms.extend(nonnegativity_axioms(task)),
    }
    axioms.extend(task.semantics_axioms.iter().cloned());
    axioms.extend(task.reach_axioms.iter().cloned());
    if cfg.include_lemmas {
        axioms.extend(task.lemma_instances.iter().cloned());
    }
    for a in &axioms {
        let text = render(&style, &a.label, &a.formula)?;
        let _ = writeln!(out, "(assert (! {text} :named {}))", a.label);
    }
    let conj = render(&style, "conjecture", &task.conjecture)?;
    match cfg.conjecture_mode {
        ConjectureMode::AssertNot => {
            let _ = writeln!(out, "(assert-not {conj})");
        }
        ConjectureMode::NegatedAssert => {
            let _ = writeln!(out, "(assert (! (not {conj}) :named {CONJECTURE_LABEL}))");
        }
    }
    out.push_str("(check-sat)\n");
    Ok(out)
}

fn declare(out: &mut String, name: &str, args: &[&str], range: &str) {
    let _ = writeln!(out, "(declare-fun {name} ({}) {range})", args.join(" "));
}

fn render(style: &Style, label: &str, f: &Formula) -> Result<String, BackendError> {
    style.formula(f).map_err(|e| BackendError::Unsupported {
        label: label.to_string(),
        reason: e.0,
    })
}

/// Integer Nat mode: every last-iteration symbol yields a non-negative
/// value on non-negative arguments.
fn nonnegativity_axioms(task: &VerificationTask) -> Vec<Axiom> {
    let sig = &task.signature;
    task.signature
        .last_iterations()
        .iter()
        .map(|n| {
            let binders: Vec<Binder> = (0..n.arity)
                .map(|k| Binder::nat(sig.fresh(&format!("x{k}"))))
                .collect();
            let app = Term::LastIt(n.line, binders.iter().map(Binder::term).collect());
            Axiom::new(
                format!("nat-nonneg-{}", n.name()),
                crate::semantics::AxiomKind::Theory,
                Formula::forall(binders, Formula::nat_leq(Term::Zero, app)),
            )
        })
        .collect()
}

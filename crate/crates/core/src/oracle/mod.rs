//! Concrete executions under the small-step semantics, and bounded
//! evaluation of trace-logic formulas over them.

mod check;
mod eval;
mod exec;
mod sample;

pub use check::{
    check_facts, check_facts_on_trace, check_task, check_trace, counterexample, lemma1_facts,
    CheckCategory, CheckReport, Fact, Outcome, Violation,
};
pub use eval::{eval_formula, eval_formula_in, eval_term, Env, EvalDomains, EvalError, Value};
pub use exec::{
    execute, ExecConfig, ExecError, ExecutionTrace, InputValuation, Rule, State, TimeValue,
    DEFAULT_STEP_LIMIT,
};
pub use sample::{sample_inputs, SampleBounds};

#[cfg(test)]
mod tests;

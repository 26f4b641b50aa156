//! Trace-logic verification conditions for while-programs.
//!
//! Pipeline: [`frontend::parse_program`] builds a [`ast::Program`],
//! [`program_model::ProgramModel`] fixes its timepoint structure,
//! [`semantics::build_task`] produces the axioms and conjecture,
//! [`backend::emit_smtlib`] renders them for an external prover, and
//! [`oracle`] checks the axioms against concrete executions.

pub mod ast;
pub mod backend;
pub mod frontend;
pub mod logic;
pub mod oracle;
pub mod program_model;
pub mod lemmas;
pub mod semantics;

//! Timepoint structure of a program: location and last-iteration symbols,
//! `tp`, `start`, `end`, `lastIt`, and the trace-logic signature.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ast::{Program, Statement, StmtKind};
use crate::logic::{Location, Signature, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("no iteration given for loop at line {loop_line} when building `{symbol}`")]
    Arity { symbol: String, loop_line: u32 },
    #[error("no statement at line {0}")]
    UnknownStatement(u32),
}

/// Index into [`ProgramModel::contexts`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContextId(pub usize);

/// Where a context sits in the program.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContextOwner {
    TopLevel,
    Then(u32),
    Else(u32),
    Body(u32),
}

#[derive(Clone, Debug)]
pub struct ContextInfo {
    pub owner: ContextOwner,
    /// Statement lines in order.
    pub statements: Vec<u32>,
}

#[derive(Clone, Debug)]
struct StmtInfo {
    context: ContextId,
    index: usize,
    enclosing: Vec<u32>,
    is_while: bool,
}

/// A statement or a context.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subprogram {
    Stmt(u32),
    Context(ContextId),
}

/// Nat terms for loop iteration variables, keyed by loop line.
///
/// A symbolic map answers every missing loop with its iteration variable
/// `it<line>`; a strict map reports an arity error instead.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Iterations {
    map: BTreeMap<u32, Term>,
    symbolic: bool,
}

impl Iterations {
    pub fn strict() -> Iterations {
        Iterations::default()
    }

    pub fn symbolic() -> Iterations {
        Iterations {
            map: BTreeMap::new(),
            symbolic: true,
        }
    }

    pub fn with(mut self, loop_line: u32, term: Term) -> Iterations {
        self.map.insert(loop_line, term);
        self
    }

    pub fn set(&mut self, loop_line: u32, term: Term) {
        self.map.insert(loop_line, term);
    }

    pub fn get(&self, loop_line: u32) -> Option<Term> {
        match self.map.get(&loop_line) {
            Some(t) => Some(t.clone()),
            None if self.symbolic => Some(iteration_var(loop_line)),
            None => None,
        }
    }
}

/// The iteration variable `it<line>` of a loop.
pub fn iteration_var(loop_line: u32) -> Term {
    Term::nat_var(iteration_name(loop_line))
}

pub fn iteration_name(loop_line: u32) -> String {
    format!("it{loop_line}")
}

#[derive(Clone, Debug)]
pub struct ProgramModel {
    program: Program,
    contexts: Vec<ContextInfo>,
    stmts: BTreeMap<u32, StmtInfo>,
    /// Statement lines, pre-order.
    order: Vec<u32>,
    signature: Signature,
}

impl ProgramModel {
    pub fn new(program: Program) -> ProgramModel {
        let mut model = ProgramModel {
            program,
            contexts: Vec::new(),
            stmts: BTreeMap::new(),
            order: Vec::new(),
            signature: Signature::new(),
        };
        let body = model.program.body.clone();
        model.walk(&body, ContextOwner::TopLevel, &mut Vec::new());
        model.signature = derive_signature(&model.program);
        model
    }

    fn walk(&mut self, ctx: &[Statement], owner: ContextOwner, loops: &mut Vec<u32>) {
        let id = ContextId(self.contexts.len());
        self.contexts.push(ContextInfo {
            owner,
            statements: ctx.iter().map(|s| s.line).collect(),
        });
        for (index, s) in ctx.iter().enumerate() {
            self.order.push(s.line);
            self.stmts.insert(
                s.line,
                StmtInfo {
                    context: id,
                    index,
                    enclosing: loops.clone(),
                    is_while: s.is_while(),
                },
            );
            match &s.kind {
                StmtKind::If {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    self.walk(then_branch, ContextOwner::Then(s.line), loops);
                    self.walk(else_branch, ContextOwner::Else(s.line), loops);
                }
                StmtKind::While { body, .. } => {
                    loops.push(s.line);
                    self.walk(body, ContextOwner::Body(s.line), loops);
                    loops.pop();
                }
                _ => {}
            }
        }
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn contexts(&self) -> &[ContextInfo] {
        &self.contexts
    }

    pub fn context(&self, id: ContextId) -> &ContextInfo {
        &self.contexts[id.0]
    }

    pub fn top_level(&self) -> ContextId {
        ContextId(0)
    }

    /// The context of the branch or body owned by `owner`.
    pub fn context_of_owner(&self, owner: ContextOwner) -> Option<ContextId> {
        self.contexts
            .iter()
            .position(|c| c.owner == owner)
            .map(ContextId)
    }

    /// Statement lines in pre-order.
    pub fn statement_lines(&self) -> &[u32] {
        &self.order
    }

    /// Lines of all while statements, pre-order.
    pub fn loops(&self) -> Vec<u32> {
        self.order
            .iter()
            .copied()
            .filter(|l| self.is_while(*l))
            .collect()
    }

    pub fn statement(&self, line: u32) -> Result<&Statement, ModelError> {
        self.program
            .statement(line)
            .ok_or(ModelError::UnknownStatement(line))
    }

    fn info(&self, line: u32) -> Result<&StmtInfo, ModelError> {
        self.stmts.get(&line).ok_or(ModelError::UnknownStatement(line))
    }

    pub fn is_while(&self, line: u32) -> bool {
        self.stmts.get(&line).is_some_and(|s| s.is_while)
    }

    /// The context directly containing the statement.
    pub fn context_of(&self, line: u32) -> Result<ContextId, ModelError> {
        Ok(self.info(line)?.context)
    }

    /// Enclosing loops of a statement, outermost first, excluding itself.
    pub fn enclosing_loops(&self, line: u32) -> Result<&[u32], ModelError> {
        Ok(&self.info(line)?.enclosing)
    }

    /// Enclosing loops of a context, outermost first.
    pub fn context_loops(&self, id: ContextId) -> Vec<u32> {
        match self.context(id).owner {
            ContextOwner::TopLevel => Vec::new(),
            ContextOwner::Then(s) | ContextOwner::Else(s) => {
                self.stmts[&s].enclosing.clone()
            }
            ContextOwner::Body(w) => {
                let mut out = self.stmts[&w].enclosing.clone();
                out.push(w);
                out
            }
        }
    }

    fn args(&self, loops: &[u32], iters: &Iterations, symbol: &str) -> Result<Vec<Term>, ModelError> {
        loops
            .iter()
            .map(|w| {
                iters.get(*w).ok_or(ModelError::Arity {
                    symbol: symbol.to_string(),
                    loop_line: *w,
                })
            })
            .collect()
    }

    /// `tp_s`: `l_s` applied to the enclosing iterations, plus the loop's
    /// own iteration when `s` is a while statement.
    pub fn tp(&self, line: u32, iters: &Iterations) -> Result<Term, ModelError> {
        let mut loops = self.info(line)?.enclosing.clone();
        if self.is_while(line) {
            loops.push(line);
        }
        let args = self.args(&loops, iters, &format!("l{line}"))?;
        Ok(Term::Loc(Location::Line(line), args))
    }

    /// `tp_w` with its own iteration set to `it`, other loops symbolic.
    pub fn tp_at(&self, line: u32, it: Term) -> Result<Term, ModelError> {
        self.tp(line, &Iterations::symbolic().with(line, it))
    }

    /// `lastIt_w`: `n_w` applied to the enclosing iterations.
    pub fn last_it(&self, line: u32, iters: &Iterations) -> Result<Term, ModelError> {
        let loops = self.info(line)?.enclosing.clone();
        let args = self.args(&loops, iters, &format!("n{line}"))?;
        Ok(Term::LastIt(line, args))
    }

    pub fn start_of(&self, p: Subprogram) -> Result<Term, ModelError> {
        self.start_in(p, &Iterations::symbolic())
    }

    pub fn end_of(&self, p: Subprogram) -> Result<Term, ModelError> {
        self.end_in(p, &Iterations::symbolic())
    }

    /// `start_p` with the enclosing iterations taken from `iters`.
    pub fn start_in(&self, p: Subprogram, iters: &Iterations) -> Result<Term, ModelError> {
        match p {
            Subprogram::Stmt(line) => {
                if self.is_while(line) {
                    let iters = iters.clone().with(line, Term::Zero);
                    self.tp(line, &iters)
                } else {
                    self.tp(line, iters)
                }
            }
            Subprogram::Context(id) => match self.context(id).statements.first() {
                Some(first) => self.start_in(Subprogram::Stmt(*first), iters),
                // An empty context starts where it ends.
                None => self.end_in(p, iters),
            },
        }
    }

    /// `end_p` with the enclosing iterations taken from `iters`.
    pub fn end_in(&self, p: Subprogram, iters: &Iterations) -> Result<Term, ModelError> {
        match p {
            Subprogram::Stmt(line) => {
                let info = self.info(line)?;
                let ctx = self.context(info.context);
                match ctx.statements.get(info.index + 1) {
                    Some(next) => self.start_in(Subprogram::Stmt(*next), iters),
                    None => self.end_in(Subprogram::Context(info.context), iters),
                }
            }
            Subprogram::Context(id) => match self.context(id).owner {
                ContextOwner::TopLevel => Ok(Term::end()),
                ContextOwner::Then(s) | ContextOwner::Else(s) => {
                    self.end_in(Subprogram::Stmt(s), iters)
                }
                ContextOwner::Body(w) => {
                    let own = iters.get(w).ok_or(ModelError::Arity {
                        symbol: format!("l{w}"),
                        loop_line: w,
                    })?;
                    let iters = iters.clone().with(w, Term::suc(own));
                    self.tp(w, &iters)
                }
            },
        }
    }
}

/// The signature of `p`: one location per statement (pre-order) and
/// `l_end`, one last-iteration symbol per loop, and the program variables.
pub fn derive_signature(p: &Program) -> Signature {
    fn walk(ctx: &[Statement], depth: usize, sig: &mut Signature) {
        for s in ctx {
            let own = usize::from(s.is_while());
            sig.add_location(Location::Line(s.line), depth + own);
            match &s.kind {
                StmtKind::If {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    walk(then_branch, depth, sig);
                    walk(else_branch, depth, sig);
                }
                StmtKind::While { body, .. } => walk(body, depth + 1, sig),
                _ => {}
            }
        }
    }
    let mut sig = Signature::new();
    walk(&p.body, 0, &mut sig);
    sig.add_location(Location::End, 0);
    for s in p.statements() {
        if s.is_while() {
            // Arity of n_w is the number of loops enclosing w.
            let arity = sig.location(Location::Line(s.line)).unwrap().arity - 1;
            sig.add_last_iteration(s.line, arity);
        }
    }
    for d in &p.decls {
        sig.add_variable(d);
    }
    sig
}

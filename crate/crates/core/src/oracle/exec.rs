use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write};

use thiserror::Error;

use crate::ast::{Expr, Program, RelOp, Statement, StmtKind, VarDecl, VarKind};
use crate::logic::{ArithOp, Location, Term};

pub const DEFAULT_STEP_LIMIT: usize = 100_000;

/// A ground timepoint: a location applied to concrete iterations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeValue {
    pub location: Location,
    pub iterations: Vec<u64>,
}

impl TimeValue {
    pub fn new(location: Location, iterations: Vec<u64>) -> TimeValue {
        TimeValue {
            location,
            iterations,
        }
    }

    pub fn end() -> TimeValue {
        TimeValue::new(Location::End, Vec::new())
    }

    pub fn to_term(&self) -> Term {
        Term::Loc(
            self.location,
            self.iterations.iter().map(|&n| Term::nat(n)).collect(),
        )
    }
}

impl fmt::Display for TimeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.location.symbol())?;
        if !self.iterations.is_empty() {
            let its: Vec<String> = self.iterations.iter().map(u64::to_string).collect();
            write!(f, "({})", its.join(","))?;
        }
        Ok(())
    }
}

/// Initial values: const inputs and the arbitrary starting contents of
/// mutable variables. Missing entries read as 0 or the empty array.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct InputValuation {
    pub ints: BTreeMap<String, i64>,
    pub arrays: BTreeMap<String, Vec<i64>>,
}

impl InputValuation {
    pub fn int(&self, name: &str) -> i64 {
        self.ints.get(name).copied().unwrap_or(0)
    }

    pub fn array(&self, name: &str) -> &[i64] {
        self.arrays.get(name).map(Vec::as_slice).unwrap_or(&[])
    }
}

impl fmt::Display for InputValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: BTreeMap<&str, String> = BTreeMap::new();
        for (k, v) in &self.ints {
            parts.insert(k, v.to_string());
        }
        for (k, v) in &self.arrays {
            let items: Vec<String> = v.iter().map(i64::to_string).collect();
            parts.insert(k, format!("[{}]", items.join(",")));
        }
        let mut first = true;
        for (k, v) in parts {
            if !first {
                f.write_char(' ')?;
            }
            first = false;
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Values of the mutable variables at one timepoint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct State {
    pub ints: BTreeMap<String, i64>,
    /// Positions never written and outside the initial contents are absent
    /// and read as 0.
    pub arrays: BTreeMap<String, BTreeMap<i64, i64>>,
}

impl State {
    fn render(&self) -> String {
        let mut parts: BTreeMap<&str, String> = BTreeMap::new();
        for (k, v) in &self.ints {
            parts.insert(k, v.to_string());
        }
        for (k, m) in &self.arrays {
            let items: Vec<String> = m.iter().map(|(p, v)| format!("{p}:{v}")).collect();
            parts.insert(k, format!("{{{}}}", items.join(",")));
        }
        parts
            .into_iter()
            .map(|(k, v)| format!(" {k}={v}"))
            .collect()
    }
}

/// The operational rule that produced a timepoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Init,
    Skip,
    Asg,
    AsgArr,
    IteT,
    IteF,
    WhileT,
    WhileF,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Init => "init",
            Rule::Skip => "skip",
            Rule::Asg => "asg",
            Rule::AsgArr => "asg_arr",
            Rule::IteT => "ite_T",
            Rule::IteF => "ite_F",
            Rule::WhileT => "while_T",
            Rule::WhileF => "while_F",
        }
    }
}

/// The reached timepoints in order, the state at each, and the bound
/// last-iteration values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionTrace {
    decls: Vec<VarDecl>,
    input: InputValuation,
    reached: Vec<TimeValue>,
    rules: Vec<Rule>,
    states: Vec<State>,
    index: HashMap<TimeValue, usize>,
    last_iterations: BTreeMap<(u32, Vec<u64>), u64>,
    terminated: bool,
}

impl ExecutionTrace {
    pub fn input(&self) -> &InputValuation {
        &self.input
    }

    pub fn reached(&self) -> &[TimeValue] {
        &self.reached
    }

    pub fn is_reached(&self, tp: &TimeValue) -> bool {
        self.index.contains_key(tp)
    }

    pub fn state_at(&self, tp: &TimeValue) -> Option<&State> {
        self.index.get(tp).map(|&k| &self.states[k])
    }

    /// Records in execution order.
    pub fn steps(&self) -> impl Iterator<Item = (&TimeValue, Rule, &State)> {
        self.reached
            .iter()
            .zip(&self.rules)
            .zip(&self.states)
            .map(|((t, r), s)| (t, *r, s))
    }

    /// Rule applications after the initial state.
    pub fn step_count(&self) -> usize {
        self.reached.len().saturating_sub(1)
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }

    pub fn last_iterations(&self) -> &BTreeMap<(u32, Vec<u64>), u64> {
        &self.last_iterations
    }

    /// `n_w(enclosing)`, or 0 where that loop instance never ran.
    pub fn last_iteration(&self, line: u32, enclosing: &[u64]) -> u64 {
        self.last_iterations
            .get(&(line, enclosing.to_vec()))
            .copied()
            .unwrap_or(0)
    }

    fn decl(&self, name: &str) -> Option<&VarDecl> {
        self.decls.iter().find(|d| d.name == name)
    }

    /// Value of mutable `var` (at `pos` for arrays) at `tp`; 0 at
    /// unreached timepoints.
    pub fn value_at(&self, var: &str, tp: &TimeValue, pos: Option<i64>) -> i64 {
        let Some(state) = self.state_at(tp) else {
            return 0;
        };
        match pos {
            None => state.ints.get(var).copied().unwrap_or(0),
            Some(p) => state
                .arrays
                .get(var)
                .and_then(|m| m.get(&p))
                .copied()
                .unwrap_or(0),
        }
    }

    /// Value of a const variable; array positions outside the input read 0.
    pub fn const_value(&self, var: &str, pos: Option<i64>) -> i64 {
        match pos {
            None => self.input.int(var),
            Some(p) => usize::try_from(p)
                .ok()
                .and_then(|p| self.input.array(var).get(p))
                .copied()
                .unwrap_or(0),
        }
    }

    pub fn is_mutable(&self, var: &str) -> bool {
        self.decl(var).is_some_and(VarDecl::is_mutable)
    }

    pub fn length(&self, array: &str) -> i64 {
        self.input.array(array).len() as i64
    }

    /// One line per step: `<timepoint> <rule> <var>=<value>...`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (tp, rule, state) in self.steps() {
            let _ = writeln!(out, "{tp} {}{}", rule.name(), state.render());
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExecConfig {
    pub step_limit: usize,
    /// Read 0 instead of failing on out-of-bounds reads of const arrays.
    pub permissive_reads: bool,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            step_limit: DEFAULT_STEP_LIMIT,
            permissive_reads: false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExecError {
    #[error("no termination within {limit} steps")]
    StepLimitExceeded {
        limit: usize,
        partial: Box<ExecutionTrace>,
    },
    #[error("line {line}: read of {array}[{index}] outside [0, {length})")]
    OutOfBoundsRead {
        line: u32,
        array: String,
        index: i64,
        length: usize,
    },
    #[error("line {line}: integer overflow")]
    Overflow { line: u32 },
    #[error("input names unknown variable `{0}`")]
    UnknownInput(String),
    #[error("input gives `{0}` a value of the wrong kind")]
    InputKind(String),
}

#[derive(Clone, Copy)]
enum Val {
    I(i64),
    B(bool),
}

/// Runs `p` on `input` under the small-step rules, recording every reached
/// timepoint with its state.
pub fn execute(
    p: &Program,
    input: &InputValuation,
    cfg: &ExecConfig,
) -> Result<ExecutionTrace, ExecError> {
    for (name, kind) in input
        .ints
        .keys()
        .map(|k| (k, VarKind::Int))
        .chain(input.arrays.keys().map(|k| (k, VarKind::Array)))
    {
        match p.decl(name) {
            None => return Err(ExecError::UnknownInput(name.clone())),
            Some(d) if d.kind != kind => return Err(ExecError::InputKind(name.clone())),
            Some(_) => {}
        }
    }
    let mut state = State::default();
    for d in p.decls.iter().filter(|d| d.is_mutable()) {
        match d.kind {
            VarKind::Int => {
                state.ints.insert(d.name.clone(), input.int(&d.name));
            }
            VarKind::Array => {
                let contents = input
                    .array(&d.name)
                    .iter()
                    .enumerate()
                    .map(|(k, v)| (k as i64, *v))
                    .collect();
                state.arrays.insert(d.name.clone(), contents);
            }
        }
    }
    let mut m = Machine {
        cfg,
        state,
        trace: ExecutionTrace {
            decls: p.decls.clone(),
            input: input.clone(),
            reached: Vec::new(),
            rules: Vec::new(),
            states: Vec::new(),
            index: HashMap::new(),
            last_iterations: BTreeMap::new(),
            terminated: false,
        },
    };
    let end = TimeValue::end();
    let mut iters = Vec::new();
    m.record(block_start(&p.body, &iters, &end), Rule::Init)?;
    m.run_block(&p.body, &mut iters, &end)?;
    m.trace.terminated = true;
    Ok(m.trace)
}

fn stmt_start(s: &Statement, iters: &[u64]) -> TimeValue {
    let mut its = iters.to_vec();
    if s.is_while() {
        its.push(0);
    }
    TimeValue::new(Location::Line(s.line), its)
}

fn block_start(block: &[Statement], iters: &[u64], end: &TimeValue) -> TimeValue {
    block
        .first()
        .map_or_else(|| end.clone(), |s| stmt_start(s, iters))
}

struct Machine<'a> {
    cfg: &'a ExecConfig,
    state: State,
    trace: ExecutionTrace,
}

impl Machine<'_> {
    fn record(&mut self, tp: TimeValue, rule: Rule) -> Result<(), ExecError> {
        if self.trace.reached.len() > self.cfg.step_limit {
            return Err(ExecError::StepLimitExceeded {
                limit: self.cfg.step_limit,
                partial: Box::new(self.trace.clone()),
            });
        }
        let k = self.trace.reached.len();
        let fresh = self.trace.index.insert(tp.clone(), k).is_none();
        assert!(fresh, "timepoint {tp} reached twice");
        self.trace.reached.push(tp);
        self.trace.rules.push(rule);
        self.trace.states.push(self.state.clone());
        Ok(())
    }

    fn run_block(
        &mut self,
        block: &[Statement],
        iters: &mut Vec<u64>,
        end: &TimeValue,
    ) -> Result<(), ExecError> {
        for (k, s) in block.iter().enumerate() {
            let next = match block.get(k + 1) {
                Some(n) => stmt_start(n, iters),
                None => end.clone(),
            };
            self.run_stmt(s, iters, next)?;
        }
        Ok(())
    }

    fn run_stmt(
        &mut self,
        s: &Statement,
        iters: &mut Vec<u64>,
        end: TimeValue,
    ) -> Result<(), ExecError> {
        let line = s.line;
        match &s.kind {
            StmtKind::Skip => self.record(end, Rule::Skip),
            StmtKind::Assign { target, value } => {
                let v = self.int(value, line)?;
                self.state.ints.insert(target.clone(), v);
                self.record(end, Rule::Asg)
            }
            StmtKind::ArrayAssign {
                target,
                index,
                value,
            } => {
                let i = self.int(index, line)?;
                let v = self.int(value, line)?;
                self.state
                    .arrays
                    .entry(target.clone())
                    .or_default()
                    .insert(i, v);
                self.record(end, Rule::AsgArr)
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let (branch, rule) = if self.bool(cond, line)? {
                    (then_branch, Rule::IteT)
                } else {
                    (else_branch, Rule::IteF)
                };
                self.record(block_start(branch, iters, &end), rule)?;
                self.run_block(branch, iters, &end)
            }
            StmtKind::While { cond, body } => {
                let mut k = 0u64;
                loop {
                    iters.push(k);
                    if self.bool(cond, line)? {
                        let mut next = iters.clone();
                        *next.last_mut().expect("own iteration") += 1;
                        let body_end = TimeValue::new(Location::Line(line), next);
                        self.record(block_start(body, iters, &body_end), Rule::WhileT)?;
                        self.run_block(body, iters, &body_end)?;
                        iters.pop();
                        k += 1;
                    } else {
                        iters.pop();
                        self.trace.last_iterations.insert((line, iters.clone()), k);
                        return self.record(end, Rule::WhileF);
                    }
                }
            }
        }
    }

    fn int(&self, e: &Expr, line: u32) -> Result<i64, ExecError> {
        match self.eval(e, line)? {
            Val::I(n) => Ok(n),
            Val::B(_) => unreachable!("well-sorted integer expression"),
        }
    }

    fn bool(&self, e: &Expr, line: u32) -> Result<bool, ExecError> {
        match self.eval(e, line)? {
            Val::B(b) => Ok(b),
            Val::I(_) => unreachable!("well-sorted condition"),
        }
    }

    fn eval(&self, e: &Expr, line: u32) -> Result<Val, ExecError> {
        let input = &self.trace.input;
        let mutable = |v: &str| self.trace.is_mutable(v);
        Ok(match e {
            Expr::Int(n) => Val::I(*n),
            Expr::Bool(b) => Val::B(*b),
            Expr::Var(v) if mutable(v) => Val::I(self.state.ints.get(v).copied().unwrap_or(0)),
            Expr::Var(v) => Val::I(input.int(v)),
            Expr::ArrayRead(a, idx) => {
                let i = self.int(idx, line)?;
                if mutable(a) {
                    let m = self.state.arrays.get(a);
                    Val::I(m.and_then(|m| m.get(&i)).copied().unwrap_or(0))
                } else {
                    let data = input.array(a);
                    match usize::try_from(i).ok().and_then(|i| data.get(i)) {
                        Some(v) => Val::I(*v),
                        None if self.cfg.permissive_reads => Val::I(0),
                        None => {
                            return Err(ExecError::OutOfBoundsRead {
                                line,
                                array: a.clone(),
                                index: i,
                                length: data.len(),
                            })
                        }
                    }
                }
            }
            Expr::Length(a) => Val::I(input.array(a).len() as i64),
            Expr::Arith(op, a, b) => {
                let (x, y) = (self.int(a, line)?, self.int(b, line)?);
                let r = match op {
                    ArithOp::Add => x.checked_add(y),
                    ArithOp::Sub => x.checked_sub(y),
                    ArithOp::Mul => x.checked_mul(y),
                };
                Val::I(r.ok_or(ExecError::Overflow { line })?)
            }
            Expr::Rel(op, a, b) => {
                let (x, y) = (self.int(a, line)?, self.int(b, line)?);
                Val::B(match op {
                    RelOp::Lt => x < y,
                    RelOp::Le => x <= y,
                    RelOp::Gt => x > y,
                    RelOp::Ge => x >= y,
                    RelOp::Eq => x == y,
                    RelOp::Ne => x != y,
                })
            }
            Expr::Not(a) => Val::B(!self.bool(a, line)?),
            Expr::And(a, b) => Val::B(self.bool(a, line)? && self.bool(b, line)?),
            Expr::Or(a, b) => Val::B(self.bool(a, line)? || self.bool(b, line)?),
        })
    }
}

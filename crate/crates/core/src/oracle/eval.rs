use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::exec::{ExecutionTrace, TimeValue};
use crate::logic::{ArithOp, Binder, CmpOp, Formula, Sort, Term};

/// A value of sort Nat, Int or Time.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Nat(u64),
    Int(i128),
    Time(TimeValue),
}

impl Value {
    pub fn to_term(&self) -> Term {
        match self {
            Value::Nat(n) => Term::nat(*n),
            Value::Int(n) => Term::Int(*n as i64),
            Value::Time(t) => t.to_term(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Nat(n) => write!(f, "{n}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Time(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("out of domain: {0}")]
    OutOfDomain(String),
}

/// Finite ranges for the quantifiers of one trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalDomains {
    /// Nat quantifiers range over `0..=nat_bound`.
    pub nat_bound: u64,
    pub int_window: Vec<i128>,
    pub time_domain: Vec<TimeValue>,
}

impl EvalDomains {
    /// Nat up to the largest observed iteration plus 2; Int over
    /// `-2..=max_len+2` and every integer in the trace, widened by one.
    pub fn for_trace(trace: &ExecutionTrace) -> EvalDomains {
        let mut max_it = 0;
        for tp in trace.reached() {
            max_it = tp.iterations.iter().copied().fold(max_it, u64::max);
        }
        for &n in trace.last_iterations().values() {
            max_it = max_it.max(n);
        }
        let input = trace.input();
        let max_len = input.arrays.values().map(Vec::len).max().unwrap_or(0) as i128;
        let mut ints: BTreeSet<i128> = (-2..=max_len + 2).collect();
        let mut add = |v: i64| {
            let v = i128::from(v);
            ints.extend([v - 1, v, v + 1]);
        };
        input.ints.values().copied().for_each(&mut add);
        input.arrays.values().flatten().copied().for_each(&mut add);
        for (_, _, state) in trace.steps() {
            state.ints.values().copied().for_each(&mut add);
            for m in state.arrays.values() {
                for (&p, &v) in m {
                    add(p);
                    add(v);
                }
            }
        }
        let mut time_domain = trace.reached().to_vec();
        if !trace.is_reached(&TimeValue::end()) {
            time_domain.push(TimeValue::end());
        }
        EvalDomains {
            nat_bound: max_it + 2,
            int_window: ints.into_iter().collect(),
            time_domain,
        }
    }

    pub fn values(&self, sort: Sort) -> Result<Vec<Value>, EvalError> {
        Ok(match sort {
            Sort::Nat => (0..=self.nat_bound).map(Value::Nat).collect(),
            Sort::Int => self.int_window.iter().map(|&n| Value::Int(n)).collect(),
            Sort::Time => self.time_domain.iter().cloned().map(Value::Time).collect(),
            Sort::Bool => {
                return Err(EvalError::OutOfDomain(
                    "quantifier over Bool".to_string(),
                ))
            }
        })
    }
}

/// Variable bindings, innermost last.
pub type Env = Vec<(String, Value)>;

/// Evaluates a closed formula on `trace`.
pub fn eval_formula(
    f: &Formula,
    trace: &ExecutionTrace,
    dom: &EvalDomains,
) -> Result<bool, EvalError> {
    Evaluator { trace, dom }.formula(f, &mut Vec::new())
}

/// Evaluates `f` with its free variables bound by `env`.
pub fn eval_formula_in(
    f: &Formula,
    trace: &ExecutionTrace,
    dom: &EvalDomains,
    env: &mut Env,
) -> Result<bool, EvalError> {
    Evaluator { trace, dom }.formula(f, env)
}

pub fn eval_term(t: &Term, trace: &ExecutionTrace, env: &Env) -> Result<Value, EvalError> {
    let dom = EvalDomains {
        nat_bound: 0,
        int_window: Vec::new(),
        time_domain: Vec::new(),
    };
    Evaluator { trace, dom: &dom }.term(t, env)
}

struct Evaluator<'a> {
    trace: &'a ExecutionTrace,
    dom: &'a EvalDomains,
}

fn overflow() -> EvalError {
    EvalError::OutOfDomain("integer overflow".to_string())
}

impl Evaluator<'_> {
    fn formula(&self, f: &Formula, env: &mut Env) -> Result<bool, EvalError> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Eq(a, b) => self.term(a, env)? == self.term(b, env)?,
            Formula::NatLeq(a, b) => self.nat(a, env)? <= self.nat(b, env)?,
            Formula::Cmp(op, a, b) => {
                let (x, y) = (self.int(a, env)?, self.int(b, env)?);
                match op {
                    CmpOp::Lt => x < y,
                    CmpOp::Le => x <= y,
                    CmpOp::Gt => x > y,
                    CmpOp::Ge => x >= y,
                }
            }
            Formula::Reach(t) => self.trace.is_reached(&self.time(t, env)?),
            Formula::Not(g) => !self.formula(g, env)?,
            Formula::And(gs) => {
                for g in gs {
                    if !self.formula(g, env)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(gs) => {
                for g in gs {
                    if self.formula(g, env)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(a, b) => !self.formula(a, env)? || self.formula(b, env)?,
            Formula::Iff(a, b) => self.formula(a, env)? == self.formula(b, env)?,
            Formula::Forall(bs, body) => self.quantify(bs, body, env, true)?,
            Formula::Exists(bs, body) => self.quantify(bs, body, env, false)?,
        })
    }

    /// For `universal`, true iff `body` holds for every assignment; else
    /// true iff it holds for some.
    fn quantify(
        &self,
        bs: &[Binder],
        body: &Formula,
        env: &mut Env,
        universal: bool,
    ) -> Result<bool, EvalError> {
        let Some((first, rest)) = bs.split_first() else {
            return self.formula(body, env);
        };
        for v in self.dom.values(first.sort)? {
            env.push((first.name.clone(), v));
            let r = self.quantify(rest, body, env, universal);
            env.pop();
            if r? != universal {
                return Ok(!universal);
            }
        }
        Ok(universal)
    }

    fn term(&self, t: &Term, env: &Env) -> Result<Value, EvalError> {
        Ok(match t {
            Term::Var(name, _) => env
                .iter()
                .rev()
                .find(|(n, _)| n == name)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| EvalError::OutOfDomain(format!("unbound variable {name}")))?,
            Term::Zero => Value::Nat(0),
            Term::Suc(a) => Value::Nat(self.nat(a, env)?.checked_add(1).ok_or_else(overflow)?),
            Term::Pred(a) => Value::Nat(self.nat(a, env)?.saturating_sub(1)),
            Term::Int(n) => Value::Int(i128::from(*n)),
            Term::Arith(op, a, b) => {
                let (x, y) = (self.int(a, env)?, self.int(b, env)?);
                let r = match op {
                    ArithOp::Add => x.checked_add(y),
                    ArithOp::Sub => x.checked_sub(y),
                    ArithOp::Mul => x.checked_mul(y),
                };
                Value::Int(r.ok_or_else(overflow)?)
            }
            Term::Loc(loc, args) => Value::Time(TimeValue::new(*loc, self.nats(args, env)?)),
            Term::LastIt(line, args) => {
                Value::Nat(self.trace.last_iteration(*line, &self.nats(args, env)?))
            }
            Term::Prog { var, time, index } => {
                let pos = match index {
                    // Positions beyond the machine range are never written.
                    Some(i) => match i64::try_from(self.int(i, env)?) {
                        Ok(p) => Some(p),
                        Err(_) => return Ok(Value::Int(0)),
                    },
                    None => None,
                };
                let v = match time {
                    Some(t) => self.trace.value_at(var, &self.time(t, env)?, pos),
                    None => self.trace.const_value(var, pos),
                };
                Value::Int(i128::from(v))
            }
            Term::Length(a) => Value::Int(i128::from(self.trace.length(a))),
        })
    }

    fn nats(&self, ts: &[Term], env: &Env) -> Result<Vec<u64>, EvalError> {
        ts.iter().map(|t| self.nat(t, env)).collect()
    }

    fn nat(&self, t: &Term, env: &Env) -> Result<u64, EvalError> {
        match self.term(t, env)? {
            Value::Nat(n) => Ok(n),
            v => Err(EvalError::OutOfDomain(format!("expected Nat, got {v}"))),
        }
    }

    fn int(&self, t: &Term, env: &Env) -> Result<i128, EvalError> {
        match self.term(t, env)? {
            Value::Int(n) => Ok(n),
            v => Err(EvalError::OutOfDomain(format!("expected Int, got {v}"))),
        }
    }

    fn time(&self, t: &Term, env: &Env) -> Result<TimeValue, EvalError> {
        match self.term(t, env)? {
            Value::Time(tp) => Ok(tp),
            v => Err(EvalError::OutOfDomain(format!("expected Time, got {v}"))),
        }
    }
}

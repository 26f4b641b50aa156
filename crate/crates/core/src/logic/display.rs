use std::fmt;

use super::{Binder, Formula, Term};

fn list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (k, it) in items.iter().enumerate() {
        if k > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{it}")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(n, _) => f.write_str(n),
            Term::Zero => f.write_str("zero"),
            Term::Suc(t) => write!(f, "suc({t})"),
            Term::Pred(t) => write!(f, "pred({t})"),
            Term::Int(n) => write!(f, "{n}"),
            Term::Arith(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Term::Loc(loc, args) => {
                f.write_str(&loc.symbol())?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    list(f, args, ", ")?;
                    f.write_str(")")?;
                }
                Ok(())
            }
            Term::LastIt(line, args) => {
                write!(f, "n{line}")?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    list(f, args, ", ")?;
                    f.write_str(")")?;
                }
                Ok(())
            }
            Term::Prog { var, time, index } => {
                f.write_str(var)?;
                match (time, index) {
                    (None, None) => Ok(()),
                    (Some(t), None) => write!(f, "({t})"),
                    (None, Some(i)) => write!(f, "({i})"),
                    (Some(t), Some(i)) => write!(f, "({t}, {i})"),
                }
            }
            Term::Length(a) => write!(f, "{a}_length"),
        }
    }
}

impl fmt::Display for Binder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.sort.name())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::NatLeq(a, b) => write!(f, "{a} <=N {b}"),
            Formula::Cmp(op, a, b) => write!(f, "{a} {} {b}", op.symbol()),
            Formula::Reach(t) => write!(f, "Reach({t})"),
            Formula::Not(g) => write!(f, "~({g})"),
            Formula::And(gs) => {
                f.write_str("(")?;
                list(f, gs, " & ")?;
                f.write_str(")")
            }
            Formula::Or(gs) => {
                f.write_str("(")?;
                list(f, gs, " | ")?;
                f.write_str(")")
            }
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Iff(a, b) => write!(f, "({a} <-> {b})"),
            Formula::Forall(bs, body) => {
                f.write_str("forall ")?;
                list(f, bs, ", ")?;
                write!(f, ". {body}")
            }
            Formula::Exists(bs, body) => {
                f.write_str("exists ")?;
                list(f, bs, ", ")?;
                write!(f, ". {body}")
            }
        }
    }
}

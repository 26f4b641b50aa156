//! SMT-LIB style rendering of terms and formulas.

use std::fmt::Write;

use super::{Binder, Formula, Location, Sort, Term};

/// How the Nat sort is rendered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum NatEncoding {
    /// Term algebra `zero`/`suc` with the `leqNat` predicate.
    #[default]
    Algebraic,
    /// Non-negative integers; Nat quantifiers get `(>= x 0)` guards.
    Integer,
}

#[derive(Clone, Copy, Debug)]
pub struct Style<'a> {
    pub nat: NatEncoding,
    /// Symbol printed for `l_end`.
    pub end_symbol: &'a str,
}

impl Default for Style<'_> {
    fn default() -> Self {
        Style {
            nat: NatEncoding::Algebraic,
            end_symbol: "l_end",
        }
    }
}

/// A construct with no rendering under the chosen [`Style`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unsupported(pub String);

impl Style<'_> {
    pub fn sort(&self, s: Sort) -> &'static str {
        match (s, self.nat) {
            (Sort::Nat, NatEncoding::Integer) => "Int",
            _ => s.name(),
        }
    }

    pub fn term(&self, t: &Term) -> Result<String, Unsupported> {
        let mut out = String::new();
        self.write_term(t, &mut out)?;
        Ok(out)
    }

    pub fn formula(&self, f: &Formula) -> Result<String, Unsupported> {
        let mut out = String::new();
        self.write_formula(f, &mut out)?;
        Ok(out)
    }

    fn app(&self, head: &str, args: &[&Term], out: &mut String) -> Result<(), Unsupported> {
        if args.is_empty() {
            out.push_str(head);
            return Ok(());
        }
        out.push('(');
        out.push_str(head);
        for a in args {
            out.push(' ');
            self.write_term(a, out)?;
        }
        out.push(')');
        Ok(())
    }

    fn write_term(&self, t: &Term, out: &mut String) -> Result<(), Unsupported> {
        match t {
            Term::Var(n, _) => out.push_str(n),
            Term::Zero => out.push_str(match self.nat {
                NatEncoding::Algebraic => "zero",
                NatEncoding::Integer => "0",
            }),
            Term::Suc(a) => match self.nat {
                NatEncoding::Algebraic => self.app("suc", &[a], out)?,
                NatEncoding::Integer => {
                    out.push_str("(+ ");
                    self.write_term(a, out)?;
                    out.push_str(" 1)");
                }
            },
            Term::Pred(a) => match self.nat {
                NatEncoding::Algebraic => self.app("pred", &[a], out)?,
                NatEncoding::Integer => {
                    return Err(Unsupported(
                        "pred has no total rendering over non-negative integers".into(),
                    ))
                }
            },
            Term::Int(n) => {
                if *n < 0 {
                    let _ = write!(out, "(- {})", n.unsigned_abs());
                } else {
                    let _ = write!(out, "{n}");
                }
            }
            Term::Arith(op, a, b) => self.app(op.symbol(), &[a, b], out)?,
            Term::Loc(loc, args) => {
                let name = match loc {
                    Location::End => self.end_symbol.to_string(),
                    l => l.symbol(),
                };
                let args: Vec<&Term> = args.iter().collect();
                self.app(&name, &args, out)?;
            }
            Term::LastIt(line, args) => {
                let args: Vec<&Term> = args.iter().collect();
                self.app(&format!("n{line}"), &args, out)?;
            }
            Term::Prog { var, time, index } => {
                let args: Vec<&Term> = time
                    .iter()
                    .chain(index.iter())
                    .map(|b| b.as_ref())
                    .collect();
                self.app(var, &args, out)?;
            }
            Term::Length(a) => {
                let _ = write!(out, "{a}_length");
            }
        }
        Ok(())
    }

    fn nary(&self, head: &str, fs: &[&Formula], out: &mut String) -> Result<(), Unsupported> {
        out.push('(');
        out.push_str(head);
        for f in fs {
            out.push(' ');
            self.write_formula(f, out)?;
        }
        out.push(')');
        Ok(())
    }

    fn binders(&self, bs: &[Binder], out: &mut String) {
        out.push('(');
        for (k, b) in bs.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            let _ = write!(out, "({} {})", b.name, self.sort(b.sort));
        }
        out.push(')');
    }

    fn nat_guard(&self, bs: &[Binder]) -> Vec<String> {
        if self.nat != NatEncoding::Integer {
            return Vec::new();
        }
        bs.iter()
            .filter(|b| b.sort == Sort::Nat)
            .map(|b| format!("(>= {} 0)", b.name))
            .collect()
    }

    fn write_formula(&self, f: &Formula, out: &mut String) -> Result<(), Unsupported> {
        match f {
            Formula::True => out.push_str("true"),
            Formula::False => out.push_str("false"),
            Formula::Eq(a, b) => self.app("=", &[a, b], out)?,
            Formula::NatLeq(a, b) => match self.nat {
                NatEncoding::Algebraic => self.app("leqNat", &[a, b], out)?,
                NatEncoding::Integer => self.app("<=", &[a, b], out)?,
            },
            Formula::Cmp(op, a, b) => self.app(op.symbol(), &[a, b], out)?,
            Formula::Reach(t) => self.app("Reach", &[t], out)?,
            Formula::Not(g) => self.nary("not", &[g], out)?,
            Formula::And(gs) | Formula::Or(gs) => {
                let (head, unit) = if matches!(f, Formula::And(_)) {
                    ("and", "true")
                } else {
                    ("or", "false")
                };
                match gs.len() {
                    0 => out.push_str(unit),
                    1 => self.write_formula(&gs[0], out)?,
                    _ => self.nary(head, &gs.iter().collect::<Vec<_>>(), out)?,
                }
            }
            Formula::Implies(a, b) => self.nary("=>", &[a, b], out)?,
            Formula::Iff(a, b) => self.nary("=", &[a, b], out)?,
            Formula::Forall(bs, body) | Formula::Exists(bs, body) => {
                let universal = matches!(f, Formula::Forall(..));
                out.push_str(if universal { "(forall " } else { "(exists " });
                self.binders(bs, out);
                out.push(' ');
                let guards = self.nat_guard(bs);
                if guards.is_empty() {
                    self.write_formula(body, out)?;
                } else {
                    let guard = if guards.len() == 1 {
                        guards[0].clone()
                    } else {
                        format!("(and {})", guards.join(" "))
                    };
                    out.push_str(if universal { "(=> " } else { "(and " });
                    out.push_str(&guard);
                    out.push(' ');
                    self.write_formula(body, out)?;
                    out.push(')');
                }
                out.push(')');
            }
        }
        Ok(())
    }
}

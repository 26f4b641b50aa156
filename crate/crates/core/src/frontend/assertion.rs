//! Reader for the `assert` clause: an SMT-LIB style s-expression over
//! program variables at `main_end`.

use super::{is_reserved, FrontendError, Pos};
use crate::ast::{VarDecl, VarKind};
use crate::logic::{ArithOp, Binder, CmpOp, Formula, Sort, Term, MAIN_END};

#[derive(Clone, Debug)]
enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    fn describe(&self) -> String {
        match self {
            Sexp::Atom(a, _) => format!("`{a}`"),
            Sexp::List(..) => "a list".into(),
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some(';') => self.skip_line(),
                Some('/') => {
                    let mut ahead = self.chars.clone();
                    ahead.next();
                    if ahead.next() != Some('/') {
                        return;
                    }
                    self.skip_line();
                }
                _ => return,
            }
        }
    }

    fn skip_line(&mut self) {
        while let Some(c) = self.bump() {
            if c == '\n' {
                break;
            }
        }
    }

    fn found(&mut self) -> String {
        match self.chars.peek() {
            None => "end of input".into(),
            Some(c) => format!("`{c}`"),
        }
    }

    fn sexp(&mut self) -> Result<Sexp, FrontendError> {
        self.skip_trivia();
        let pos = self.pos;
        match self.chars.peek() {
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, pos));
                        }
                        None => {
                            return Err(FrontendError::Syntax {
                                pos: self.pos,
                                expected: "`)`".into(),
                                found: "end of input".into(),
                            })
                        }
                        _ => items.push(self.sexp()?),
                    }
                }
            }
            Some(&c) if is_atom_char(c) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if !is_atom_char(c) {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom(s, pos))
            }
            _ => Err(FrontendError::Syntax {
                pos,
                expected: "an s-expression".into(),
                found: self.found(),
            }),
        }
    }
}

fn is_atom_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "_+-*<>=!.".contains(c)
}

/// Parses the assertion text that follows the `assert` keyword.
pub(crate) fn parse(src: &str, start: Pos, decls: &[VarDecl]) -> Result<Formula, FrontendError> {
    let mut reader = Reader {
        chars: src.chars().peekable(),
        pos: start,
    };
    let sexp = reader.sexp()?;
    reader.skip_trivia();
    if reader.chars.peek().is_some() {
        return Err(FrontendError::Syntax {
            pos: reader.pos,
            expected: "end of input after the assertion".into(),
            found: reader.found(),
        });
    }
    Translator {
        decls,
        scopes: Vec::new(),
    }
    .formula(&sexp)
}

struct Translator<'a> {
    decls: &'a [VarDecl],
    scopes: Vec<Binder>,
}

fn sort_err<T>(pos: Pos, message: impl Into<String>) -> Result<T, FrontendError> {
    Err(FrontendError::Sort {
        pos,
        message: message.into(),
    })
}

fn scope_err<T>(pos: Pos, name: &str, message: &str) -> Result<T, FrontendError> {
    Err(FrontendError::Scope {
        pos,
        name: name.to_string(),
        message: message.to_string(),
    })
}

fn syntax_err<T>(s: &Sexp, expected: &str) -> Result<T, FrontendError> {
    Err(FrontendError::Syntax {
        pos: s.pos(),
        expected: expected.to_string(),
        found: s.describe(),
    })
}

fn cmp_op(head: &str) -> Option<CmpOp> {
    Some(match head {
        "<" => CmpOp::Lt,
        "<=" => CmpOp::Le,
        ">" => CmpOp::Gt,
        ">=" => CmpOp::Ge,
        _ => return None,
    })
}

impl Translator<'_> {
    fn decl(&self, name: &str) -> Option<&VarDecl> {
        self.decls.iter().find(|d| d.name == name)
    }

    fn bound(&self, name: &str) -> Option<Sort> {
        self.scopes.iter().rev().find(|b| b.name == name).map(|b| b.sort)
    }

    fn formula(&mut self, s: &Sexp) -> Result<Formula, FrontendError> {
        let (items, pos) = match s {
            Sexp::Atom(a, pos) => {
                return match a.as_str() {
                    "true" => Ok(Formula::True),
                    "false" => Ok(Formula::False),
                    _ => sort_err(*pos, format!("`{a}` is not a formula")),
                }
            }
            Sexp::List(items, pos) => (items, *pos),
        };
        let Some(first) = items.first() else {
            return syntax_err(s, "a non-empty list");
        };
        if items.len() == 1 {
            return self.formula(first);
        }
        let Sexp::Atom(head, _) = first else {
            return syntax_err(first, "an operator");
        };
        let args = &items[1..];
        match head.as_str() {
            "not" => {
                let [a] = args else {
                    return syntax_err(s, "`(not F)`");
                };
                Ok(Formula::not(self.formula(a)?))
            }
            "and" | "or" => {
                let parts = args
                    .iter()
                    .map(|a| self.formula(a))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(if head == "and" {
                    Formula::and(parts)
                } else {
                    Formula::or(parts)
                })
            }
            "=>" => {
                if args.len() < 2 {
                    return syntax_err(s, "at least two operands for `=>`");
                }
                let mut parts = args
                    .iter()
                    .map(|a| self.formula(a))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut acc = parts.pop().unwrap();
                while let Some(p) = parts.pop() {
                    acc = Formula::implies(p, acc);
                }
                Ok(acc)
            }
            "forall" | "exists" => self.quantifier(head == "forall", args, s),
            "=" | "distinct" => {
                let terms = self.operands(args, s)?;
                let mut out = Vec::new();
                if head == "=" {
                    for w in terms.windows(2) {
                        out.push(Formula::eq(w[0].clone(), w[1].clone()));
                    }
                } else {
                    for i in 0..terms.len() {
                        for j in i + 1..terms.len() {
                            out.push(Formula::not(Formula::eq(terms[i].clone(), terms[j].clone())));
                        }
                    }
                }
                Ok(Formula::and(out))
            }
            "leqNat" => {
                let terms = self.operands(args, s)?;
                let [a, b] = &terms[..] else {
                    return syntax_err(s, "`(leqNat x y)`");
                };
                if a.sort() != Sort::Nat {
                    return sort_err(pos, "`leqNat` compares Nat terms");
                }
                Ok(Formula::nat_leq(a.clone(), b.clone()))
            }
            h => match cmp_op(h) {
                Some(op) => {
                    let terms = self.operands(args, s)?;
                    let nat = terms[0].sort() == Sort::Nat;
                    let mut out = Vec::new();
                    for w in terms.windows(2) {
                        let (a, b) = (w[0].clone(), w[1].clone());
                        out.push(if nat {
                            match op {
                                CmpOp::Lt => Formula::nat_lt(a, b),
                                CmpOp::Le => Formula::nat_leq(a, b),
                                CmpOp::Gt => Formula::nat_lt(b, a),
                                CmpOp::Ge => Formula::nat_leq(b, a),
                            }
                        } else {
                            Formula::cmp(op, a, b)
                        });
                    }
                    Ok(Formula::and(out))
                }
                None => sort_err(pos, format!("`{h}` does not build a formula")),
            },
        }
    }

    /// At least two terms of one sort.
    fn operands(&mut self, args: &[Sexp], s: &Sexp) -> Result<Vec<Term>, FrontendError> {
        if args.len() < 2 {
            return syntax_err(s, "at least two operands");
        }
        let terms = args
            .iter()
            .map(|a| self.term(a))
            .collect::<Result<Vec<_>, _>>()?;
        let sort = terms[0].sort();
        for (t, a) in terms.iter().zip(args).skip(1) {
            if t.sort() != sort {
                return sort_err(
                    a.pos(),
                    format!("expected {}, found {}", sort.name(), t.sort().name()),
                );
            }
        }
        Ok(terms)
    }

    fn quantifier(
        &mut self,
        universal: bool,
        args: &[Sexp],
        s: &Sexp,
    ) -> Result<Formula, FrontendError> {
        let [Sexp::List(binders, _), body] = args else {
            return syntax_err(s, "`((name Sort) ...) body`");
        };
        let mut bs = Vec::new();
        for b in binders {
            let Sexp::List(pair, _) = b else {
                return syntax_err(b, "a binder `(name Sort)`");
            };
            let [Sexp::Atom(name, npos), Sexp::Atom(sort, spos)] = &pair[..] else {
                return syntax_err(b, "a binder `(name Sort)`");
            };
            let sort = match sort.as_str() {
                "Int" => Sort::Int,
                "Nat" => Sort::Nat,
                other => return sort_err(*spos, format!("cannot quantify over `{other}`")),
            };
            if self.decl(name).is_some() {
                return scope_err(*npos, name, "bound variable clashes with a program variable");
            }
            if is_reserved(name) {
                return scope_err(*npos, name, "reserved identifier");
            }
            bs.push(Binder::new(name.clone(), sort));
        }
        let mark = self.scopes.len();
        self.scopes.extend(bs.iter().cloned());
        let body = self.formula(body);
        self.scopes.truncate(mark);
        let body = body?;
        Ok(if universal {
            Formula::forall(bs, body)
        } else {
            Formula::exists(bs, body)
        })
    }

    fn term(&mut self, s: &Sexp) -> Result<Term, FrontendError> {
        match s {
            Sexp::Atom(a, pos) => self.atom(a, *pos),
            Sexp::List(items, pos) => {
                let Some(first) = items.first() else {
                    return syntax_err(s, "a non-empty list");
                };
                let Sexp::Atom(head, hpos) = first else {
                    return syntax_err(first, "a function symbol");
                };
                let args = &items[1..];
                match head.as_str() {
                    "+" | "*" | "-" => self.arith(head, args, s),
                    "suc" | "pred" => {
                        let [a] = args else {
                            return syntax_err(s, "one argument");
                        };
                        let t = self.term(a)?;
                        if t.sort() != Sort::Nat {
                            return sort_err(a.pos(), format!("`{head}` takes a Nat"));
                        }
                        Ok(if head == "suc" {
                            Term::suc(t)
                        } else {
                            Term::Pred(Box::new(t))
                        })
                    }
                    _ if args.is_empty() => self.atom(head, *hpos),
                    _ => self.application(head, *hpos, args, *pos),
                }
            }
        }
    }

    fn arith(&mut self, head: &str, args: &[Sexp], s: &Sexp) -> Result<Term, FrontendError> {
        if head == "-" {
            if let [Sexp::Atom(lit, pos)] = args {
                if lit.bytes().all(|b| b.is_ascii_digit()) {
                    return format!("-{lit}")
                        .parse::<i64>()
                        .map(Term::Int)
                        .map_err(|_| overflow(*pos, lit));
                }
            }
        }
        if args.is_empty() {
            return syntax_err(s, "operands");
        }
        let mut terms = Vec::new();
        for a in args {
            let t = self.term(a)?;
            if t.sort() != Sort::Int {
                return sort_err(a.pos(), format!("`{head}` takes Int operands"));
            }
            terms.push(t);
        }
        let op = match head {
            "+" => ArithOp::Add,
            "-" => ArithOp::Sub,
            _ => ArithOp::Mul,
        };
        if terms.len() == 1 {
            return Ok(match op {
                ArithOp::Sub => Term::arith(op, Term::Int(0), terms.pop().unwrap()),
                _ => terms.pop().unwrap(),
            });
        }
        let mut it = terms.into_iter();
        let first = it.next().unwrap();
        Ok(it.fold(first, |acc, t| Term::arith(op, acc, t)))
    }

    fn atom(&self, a: &str, pos: Pos) -> Result<Term, FrontendError> {
        if a.bytes().all(|b| b.is_ascii_digit()) {
            return a.parse::<i64>().map(Term::Int).map_err(|_| overflow(pos, a));
        }
        if a == "zero" {
            return Ok(Term::Zero);
        }
        if let Some(sort) = self.bound(a) {
            return Ok(Term::var(a, sort));
        }
        if let Some(arr) = a.strip_suffix("_length") {
            return match self.decl(arr) {
                Some(d) if d.kind == VarKind::Array => Ok(Term::Length(arr.to_string())),
                _ => scope_err(pos, a, "no such array"),
            };
        }
        match self.decl(a) {
            Some(d) if d.kind == VarKind::Int && !d.is_mutable() => {
                Ok(Term::prog(a, None, None))
            }
            Some(d) if d.is_mutable() => sort_err(
                pos,
                format!("mutable variable `{a}` needs a timepoint, as in `({a} {MAIN_END})`"),
            ),
            Some(_) => sort_err(pos, format!("array `{a}` needs a position")),
            None => scope_err(pos, a, "undeclared identifier"),
        }
    }

    fn application(
        &mut self,
        head: &str,
        hpos: Pos,
        args: &[Sexp],
        pos: Pos,
    ) -> Result<Term, FrontendError> {
        let Some(decl) = self.decl(head).cloned() else {
            return scope_err(hpos, head, "undeclared function symbol");
        };
        let mut rest = args;
        let time = if decl.is_mutable() {
            match rest.first() {
                Some(Sexp::Atom(t, _)) if t == MAIN_END || t == "l_end" => {
                    rest = &rest[1..];
                    Some(Term::end())
                }
                _ => {
                    return sort_err(
                        pos,
                        format!("mutable variable `{head}` takes `{MAIN_END}` first"),
                    )
                }
            }
        } else {
            None
        };
        let index = match (decl.kind, rest) {
            (VarKind::Int, []) => None,
            (VarKind::Array, [i]) => {
                let t = self.term(i)?;
                if t.sort() != Sort::Int {
                    return sort_err(i.pos(), "array positions are Int");
                }
                Some(t)
            }
            _ => return sort_err(pos, format!("wrong number of arguments for `{head}`")),
        };
        Ok(Term::prog(head, time, index))
    }
}

fn overflow(pos: Pos, digits: &str) -> FrontendError {
    FrontendError::Syntax {
        pos,
        expected: "a 64-bit signed integer".into(),
        found: format!("`{digits}`"),
    }
}

//! A small SMT-LIB 2.6 reader and sort checker, written against the
//! standard's concrete syntax independently of the emitter.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    LParen,
    RParen,
    Numeral(String),
    Symbol(String),
    Keyword(String),
    Str(String),
}

const RESERVED: &[&str] = &[
    "!", "_", "as", "BINARY", "DECIMAL", "exists", "HEXADECIMAL", "forall", "let", "match",
    "NUMERAL", "par", "STRING", "assert", "check-sat", "declare-const", "declare-datatype",
    "declare-datatypes", "declare-fun", "declare-sort", "define-fun", "define-sort", "exit",
    "set-info", "set-logic", "set-option",
];

fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c)
}

pub fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let cs: Vec<char> = src.chars().collect();
    let mut k = 0;
    let mut out = Vec::new();
    while k < cs.len() {
        let c = cs[k];
        match c {
            ' ' | '\t' | '\r' | '\n' => k += 1,
            ';' => {
                while k < cs.len() && cs[k] != '\n' {
                    k += 1;
                }
            }
            '(' => {
                out.push(Tok::LParen);
                k += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                k += 1;
            }
            '"' => {
                let mut s = String::new();
                k += 1;
                loop {
                    match cs.get(k) {
                        None => return Err("unterminated string".into()),
                        Some('"') if cs.get(k + 1) == Some(&'"') => {
                            s.push('"');
                            k += 2;
                        }
                        Some('"') => {
                            k += 1;
                            break;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            k += 1;
                        }
                    }
                }
                out.push(Tok::Str(s));
            }
            '|' => {
                let start = k + 1;
                k = start;
                while k < cs.len() && cs[k] != '|' {
                    if cs[k] == '\\' {
                        return Err("backslash in quoted symbol".into());
                    }
                    k += 1;
                }
                if k == cs.len() {
                    return Err("unterminated quoted symbol".into());
                }
                out.push(Tok::Symbol(cs[start..k].iter().collect()));
                k += 1;
            }
            ':' => {
                let start = k + 1;
                k = start;
                while k < cs.len() && is_symbol_char(cs[k]) {
                    k += 1;
                }
                if k == start {
                    return Err("empty keyword".into());
                }
                out.push(Tok::Keyword(cs[start..k].iter().collect()));
            }
            d if d.is_ascii_digit() => {
                let start = k;
                while k < cs.len() && cs[k].is_ascii_digit() {
                    k += 1;
                }
                let n: String = cs[start..k].iter().collect();
                if n.len() > 1 && n.starts_with('0') {
                    return Err(format!("numeral with leading zero: {n}"));
                }
                if k < cs.len() && is_symbol_char(cs[k]) {
                    return Err(format!("symbol starting with a digit near {n}"));
                }
                out.push(Tok::Numeral(n));
            }
            c if is_symbol_char(c) => {
                let start = k;
                while k < cs.len() && is_symbol_char(cs[k]) {
                    k += 1;
                }
                out.push(Tok::Symbol(cs[start..k].iter().collect()));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sexp {
    Atom(Tok),
    List(Vec<Sexp>),
}

pub fn read_all(src: &str) -> Result<Vec<Sexp>, String> {
    let toks = lex(src)?;
    let mut k = 0;
    let mut out = Vec::new();
    while k < toks.len() {
        out.push(read(&toks, &mut k)?);
    }
    Ok(out)
}

fn read(toks: &[Tok], k: &mut usize) -> Result<Sexp, String> {
    match toks.get(*k) {
        None => Err("unexpected end of input".into()),
        Some(Tok::RParen) => Err("unbalanced )".into()),
        Some(Tok::LParen) => {
            *k += 1;
            let mut items = Vec::new();
            loop {
                match toks.get(*k) {
                    None => return Err("unbalanced (".into()),
                    Some(Tok::RParen) => {
                        *k += 1;
                        return Ok(Sexp::List(items));
                    }
                    _ => items.push(read(toks, k)?),
                }
            }
        }
        Some(t) => {
            *k += 1;
            Ok(Sexp::Atom(t.clone()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SortT {
    Bool,
    Int,
    User(String),
}

#[derive(Clone, Debug)]
enum FunSig {
    Fixed(Vec<SortT>, SortT),
    Builtin(&'static str),
}

#[derive(Default, Debug)]
pub struct Summary {
    pub logic: Option<String>,
    pub sorts: Vec<String>,
    pub functions: Vec<(String, usize)>,
    pub named: Vec<String>,
    pub asserts: usize,
    pub assert_nots: usize,
    pub check_sats: usize,
}

struct Checker {
    sorts: HashMap<String, ()>,
    funs: HashMap<String, FunSig>,
    named: BTreeSet<String>,
    allow_assert_not: bool,
}

fn sym(s: &Sexp) -> Result<&str, String> {
    match s {
        Sexp::Atom(Tok::Symbol(n)) => Ok(n),
        other => Err(format!("expected symbol, got {other:?}")),
    }
}

fn list(s: &Sexp) -> Result<&[Sexp], String> {
    match s {
        Sexp::List(v) => Ok(v),
        other => Err(format!("expected list, got {other:?}")),
    }
}

/// Parses and sort-checks a script. `assert-not` is accepted only when
/// `allow_assert_not` is set, since it is a prover extension.
pub fn check_script(src: &str, allow_assert_not: bool) -> Result<Summary, String> {
    let mut c = Checker {
        sorts: HashMap::new(),
        funs: HashMap::new(),
        named: BTreeSet::new(),
        allow_assert_not,
    };
    for b in [
        "true", "false", "not", "=>", "and", "or", "xor", "=", "distinct", "ite", "+", "-", "*",
        "<=", "<", ">=", ">", "div", "mod", "abs",
    ] {
        c.funs.insert(b.to_string(), FunSig::Builtin(b));
    }
    let mut summary = Summary::default();
    for cmd in read_all(src)? {
        let items = list(&cmd)?;
        let head = sym(items.first().ok_or("empty command")?)?;
        let args = &items[1..];
        match head {
            "set-logic" => {
                if args.len() != 1 {
                    return Err("set-logic arity".into());
                }
                summary.logic = Some(sym(&args[0])?.to_string());
            }
            "set-option" | "set-info" => {}
            "declare-sort" => {
                if args.len() != 2 {
                    return Err("declare-sort arity".into());
                }
                let n = c.fresh(sym(&args[0])?)?;
                if args[1] != Sexp::Atom(Tok::Numeral("0".into())) {
                    return Err("only nullary sorts supported".into());
                }
                c.sorts.insert(n.clone(), ());
                summary.sorts.push(n);
            }
            "declare-datatypes" => {
                if args.len() != 2 {
                    return Err("declare-datatypes arity".into());
                }
                let decls = list(&args[0])?;
                let bodies = list(&args[1])?;
                if decls.len() != bodies.len() {
                    return Err("datatype count mismatch".into());
                }
                let mut names = Vec::new();
                for d in decls {
                    let d = list(d)?;
                    if d.len() != 2 || d[1] != Sexp::Atom(Tok::Numeral("0".into())) {
                        return Err("datatype declaration".into());
                    }
                    let n = c.fresh(sym(&d[0])?)?;
                    c.sorts.insert(n.clone(), ());
                    summary.sorts.push(n.clone());
                    names.push(n);
                }
                for (name, body) in names.iter().zip(bodies) {
                    for ctor in list(body)? {
                        let ctor = list(ctor)?;
                        let cname = c.fresh(sym(ctor.first().ok_or("empty constructor")?)?)?;
                        let mut fields = Vec::new();
                        for sel in &ctor[1..] {
                            let sel = list(sel)?;
                            if sel.len() != 2 {
                                return Err("selector".into());
                            }
                            let sname = c.fresh(sym(&sel[0])?)?;
                            let ssort = c.sort(&sel[1])?;
                            c.funs.insert(
                                sname,
                                FunSig::Fixed(vec![SortT::User(name.clone())], ssort.clone()),
                            );
                            fields.push(ssort);
                        }
                        c.funs
                            .insert(cname, FunSig::Fixed(fields, SortT::User(name.clone())));
                    }
                }
            }
            "declare-fun" => {
                if args.len() != 3 {
                    return Err("declare-fun arity".into());
                }
                let n = c.fresh(sym(&args[0])?)?;
                let dom = list(&args[1])?
                    .iter()
                    .map(|s| c.sort(s))
                    .collect::<Result<Vec<_>, _>>()?;
                let range = c.sort(&args[2])?;
                summary.functions.push((n.clone(), dom.len()));
                c.funs.insert(n, FunSig::Fixed(dom, range));
            }
            "declare-const" => {
                if args.len() != 2 {
                    return Err("declare-const arity".into());
                }
                let n = c.fresh(sym(&args[0])?)?;
                let range = c.sort(&args[1])?;
                summary.functions.push((n.clone(), 0));
                c.funs.insert(n, FunSig::Fixed(Vec::new(), range));
            }
            "define-fun" => {
                if args.len() != 4 {
                    return Err("define-fun arity".into());
                }
                let n = c.fresh(sym(&args[0])?)?;
                let mut env = Vec::new();
                for p in list(&args[1])? {
                    let p = list(p)?;
                    if p.len() != 2 {
                        return Err("parameter".into());
                    }
                    env.push((sym(&p[0])?.to_string(), c.sort(&p[1])?));
                }
                let range = c.sort(&args[2])?;
                let body = c.term(&args[3], &mut env)?;
                if body != range {
                    return Err(format!("define-fun {n}: body sort {body:?} != {range:?}"));
                }
                let dom = env.iter().map(|(_, s)| s.clone()).collect();
                summary.functions.push((n.clone(), env.len()));
                c.funs.insert(n, FunSig::Fixed(dom, range));
            }
            "assert" | "assert-not" => {
                if head == "assert-not" && !c.allow_assert_not {
                    return Err("assert-not is not standard SMT-LIB".into());
                }
                if args.len() != 1 {
                    return Err(format!("{head} arity"));
                }
                let s = c.term(&args[0], &mut Vec::new())?;
                if s != SortT::Bool {
                    return Err(format!("{head} of non-Bool term"));
                }
                if head == "assert" {
                    summary.asserts += 1;
                } else {
                    summary.assert_nots += 1;
                }
            }
            "check-sat" => {
                if !args.is_empty() {
                    return Err("check-sat arity".into());
                }
                summary.check_sats += 1;
            }
            "exit" => {}
            other => return Err(format!("unknown command {other}")),
        }
    }
    summary.named = c.named.iter().cloned().collect();
    Ok(summary)
}

impl Checker {
    fn fresh(&self, n: &str) -> Result<String, String> {
        if RESERVED.contains(&n) {
            return Err(format!("reserved word {n} used as a name"));
        }
        if self.funs.contains_key(n) || self.sorts.contains_key(n) || self.named.contains(n) {
            return Err(format!("{n} declared twice"));
        }
        Ok(n.to_string())
    }

    fn sort(&self, s: &Sexp) -> Result<SortT, String> {
        match sym(s)? {
            "Bool" => Ok(SortT::Bool),
            "Int" => Ok(SortT::Int),
            n if self.sorts.contains_key(n) => Ok(SortT::User(n.to_string())),
            n => Err(format!("unknown sort {n}")),
        }
    }

    fn term(&mut self, t: &Sexp, env: &mut Vec<(String, SortT)>) -> Result<SortT, String> {
        match t {
            Sexp::Atom(Tok::Numeral(_)) => Ok(SortT::Int),
            Sexp::Atom(Tok::Symbol(n)) => {
                if let Some((_, s)) = env.iter().rev().find(|(v, _)| v == n) {
                    return Ok(s.clone());
                }
                self.apply(n, &[])
            }
            Sexp::Atom(other) => Err(format!("unexpected atom {other:?}")),
            Sexp::List(items) => {
                let head = items.first().ok_or("empty application")?;
                match head {
                    Sexp::Atom(Tok::Symbol(h)) if h == "forall" || h == "exists" => {
                        if items.len() != 3 {
                            return Err(format!("{h} arity"));
                        }
                        let binders = list(&items[1])?;
                        if binders.is_empty() {
                            return Err(format!("{h} without binders"));
                        }
                        let depth = env.len();
                        for b in binders {
                            let b = list(b)?;
                            if b.len() != 2 {
                                return Err("binder".into());
                            }
                            env.push((sym(&b[0])?.to_string(), self.sort(&b[1])?));
                        }
                        let s = self.term(&items[2], env)?;
                        env.truncate(depth);
                        if s != SortT::Bool {
                            return Err(format!("{h} body not Bool"));
                        }
                        Ok(SortT::Bool)
                    }
                    Sexp::Atom(Tok::Symbol(h)) if h == "!" => {
                        if items.len() < 4 || (items.len() - 2) % 2 != 0 {
                            return Err("annotation arity".into());
                        }
                        let s = self.term(&items[1], env)?;
                        for pair in items[2..].chunks(2) {
                            match (&pair[0], &pair[1]) {
                                (Sexp::Atom(Tok::Keyword(k)), v) if k == "named" => {
                                    if !env.is_empty() {
                                        return Err("named term inside binder".into());
                                    }
                                    let n = self.fresh(sym(v)?)?;
                                    self.named.insert(n);
                                }
                                (Sexp::Atom(Tok::Keyword(_)), _) => {}
                                _ => return Err("attribute".into()),
                            }
                        }
                        Ok(s)
                    }
                    Sexp::Atom(Tok::Symbol(h)) if h == "let" || h == "match" || h == "_" || h == "as" => {
                        Err(format!("{h} not expected in emitted output"))
                    }
                    Sexp::Atom(Tok::Symbol(h)) => {
                        let h = h.clone();
                        let args = items[1..]
                            .iter()
                            .map(|a| self.term(a, env))
                            .collect::<Result<Vec<_>, _>>()?;
                        if args.is_empty() {
                            return Err(format!("({h}) with no arguments"));
                        }
                        self.apply(&h, &args)
                    }
                    other => Err(format!("bad head {other:?}")),
                }
            }
        }
    }

    fn apply(&self, f: &str, args: &[SortT]) -> Result<SortT, String> {
        let sig = self
            .funs
            .get(f)
            .ok_or_else(|| format!("undeclared symbol {f}"))?;
        let all = |s: SortT| args.iter().all(|a| *a == s);
        let same = args.windows(2).all(|w| w[0] == w[1]);
        let bad = || format!("ill-sorted application of {f} to {args:?}");
        match sig {
            FunSig::Fixed(dom, range) => {
                if dom.as_slice() == args {
                    Ok(range.clone())
                } else {
                    Err(bad())
                }
            }
            FunSig::Builtin(b) => match *b {
                "true" | "false" if args.is_empty() => Ok(SortT::Bool),
                "not" if args.len() == 1 && all(SortT::Bool) => Ok(SortT::Bool),
                "=>" | "and" | "or" | "xor" if args.len() >= 2 && all(SortT::Bool) => {
                    Ok(SortT::Bool)
                }
                "=" | "distinct" if args.len() >= 2 && same => Ok(SortT::Bool),
                "ite" if args.len() == 3 && args[0] == SortT::Bool && args[1] == args[2] => {
                    Ok(args[1].clone())
                }
                "-" if !args.is_empty() && all(SortT::Int) => Ok(SortT::Int),
                "+" | "*" | "div" | "mod" if args.len() >= 2 && all(SortT::Int) => Ok(SortT::Int),
                "abs" if args.len() == 1 && all(SortT::Int) => Ok(SortT::Int),
                "<=" | "<" | ">=" | ">" if args.len() >= 2 && all(SortT::Int) => Ok(SortT::Bool),
                _ => Err(bad()),
            },
        }
    }
}

#[cfg(test)]
mod self_tests {
    use super::*;

    #[test]
    fn rejects_malformed_scripts() {
        assert!(check_script("(assert (+ 1 2))", false).is_err());
        assert!(check_script("(assert (f 1))", false).is_err());
        assert!(check_script("(declare-fun f (Int) Int)(assert (= (f true) 1))", false).is_err());
        assert!(check_script("(assert true", false).is_err());
        assert!(check_script("(assert-not true)", false).is_err());
        assert!(check_script("(assert (! true :named a))(assert (! true :named a))", false).is_err());
        assert!(check_script("(declare-fun 1x () Int)", false).is_err());
        assert!(check_script("(assert (forall ((x Int)) (! (= x x) :named n)))", false).is_err());
    }

    #[test]
    fn accepts_standard_forms() {
        let s = check_script(
            "; comment\n(set-logic ALL)(declare-sort T 0)\
             (declare-datatypes ((N 0)) (((z) (s (p N)))))\
             (declare-fun f (T N) Int)(declare-fun c () T)\
             (assert (! (forall ((x N)) (= (f c (s x)) (- 3))) :named ax))\
             (assert-not (exists ((y Int)) (<= y 0)))(check-sat)",
            true,
        )
        .unwrap();
        assert_eq!(s.asserts, 1);
        assert_eq!(s.assert_nots, 1);
        assert_eq!(s.named, ["ax"]);
    }
}

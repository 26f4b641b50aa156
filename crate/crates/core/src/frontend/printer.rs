use std::fmt::Write;

use crate::ast::{Expr, Mutability, Program, Statement, StmtKind, VarKind};
use crate::logic::sexpr::Style;
use crate::logic::MAIN_END;

/// Canonical W source for `p`: declarations first, one space of indentation
/// per nesting level, nested binary expressions fully parenthesized.
pub fn pretty_print(p: &Program) -> String {
    let mut out = String::from("func main() {\n");
    for d in &p.decls {
        let konst = if d.mutability == Mutability::Const {
            "const "
        } else {
            ""
        };
        let ty = match d.kind {
            VarKind::Int => "Int",
            VarKind::Array => "Int[]",
        };
        let _ = writeln!(out, " {konst}{ty} {};", d.name);
    }
    for s in &p.body {
        statement(s, 1, &mut out);
    }
    out.push_str("}\n");
    let style = Style {
        end_symbol: MAIN_END,
        ..Style::default()
    };
    // The assertion reader builds only constructs with an algebraic
    // rendering, so this cannot fail for parsed programs.
    let text = style
        .formula(&p.assertion)
        .unwrap_or_else(|e| panic!("assertion not printable: {}", e.0));
    if text.starts_with('(') {
        let _ = write!(out, "assert {text}");
    } else {
        let _ = write!(out, "assert ({text})");
    }
    out
}

fn statement(s: &Statement, depth: usize, out: &mut String) {
    let pad = " ".repeat(depth);
    match &s.kind {
        StmtKind::Skip => {
            let _ = writeln!(out, "{pad}skip;");
        }
        StmtKind::Assign { target, value } => {
            let _ = writeln!(out, "{pad}{target} = {};", expr(value, true));
        }
        StmtKind::ArrayAssign {
            target,
            index,
            value,
        } => {
            let _ = writeln!(
                out,
                "{pad}{target}[{}] = {};",
                expr(index, true),
                expr(value, true)
            );
        }
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            let _ = writeln!(out, "{pad}if ({}) {{", expr(cond, true));
            for t in then_branch {
                statement(t, depth + 1, out);
            }
            if else_branch.is_empty() {
                let _ = writeln!(out, "{pad}}}");
            } else {
                let _ = writeln!(out, "{pad}}} else {{");
                for t in else_branch {
                    statement(t, depth + 1, out);
                }
                let _ = writeln!(out, "{pad}}}");
            }
        }
        StmtKind::While { cond, body } => {
            let _ = writeln!(out, "{pad}while ({}) {{", expr(cond, true));
            for t in body {
                statement(t, depth + 1, out);
            }
            let _ = writeln!(out, "{pad}}}");
        }
    }
}

fn expr(e: &Expr, top: bool) -> String {
    let bin = |op: &str, a: &Expr, b: &Expr| {
        let s = format!("{} {op} {}", expr(a, false), expr(b, false));
        if top {
            s
        } else {
            format!("({s})")
        }
    };
    match e {
        Expr::Int(n) => n.to_string(),
        Expr::Bool(b) => b.to_string(),
        Expr::Var(v) => v.clone(),
        Expr::ArrayRead(a, i) => format!("{a}[{}]", expr(i, true)),
        Expr::Length(a) => format!("{a}.length"),
        Expr::Arith(op, a, b) => bin(op.symbol(), a, b),
        Expr::Rel(op, a, b) => bin(op.symbol(), a, b),
        Expr::And(a, b) => bin("&&", a, b),
        Expr::Or(a, b) => bin("||", a, b),
        Expr::Not(a) => format!("!{}", expr(a, false)),
    }
}

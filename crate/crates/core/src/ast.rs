//! Abstract syntax of while-programs.

use crate::logic::{ArithOp, Formula};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Int,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mutability {
    Mutable,
    Const,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
    pub mutability: Mutability,
}

impl VarDecl {
    pub fn new(name: impl Into<String>, kind: VarKind, mutability: Mutability) -> VarDecl {
        VarDecl {
            name: name.into(),
            kind,
            mutability,
        }
    }

    pub fn is_mutable(&self) -> bool {
        self.mutability == Mutability::Mutable
    }
}

/// Relational operators of program conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Var(String),
    ArrayRead(String, Box<Expr>),
    /// `a.length`
    Length(String),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Rel(RelOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn arith(op: ArithOp, a: Expr, b: Expr) -> Expr {
        Expr::Arith(op, Box::new(a), Box::new(b))
    }

    pub fn rel(op: RelOp, a: Expr, b: Expr) -> Expr {
        Expr::Rel(op, Box::new(a), Box::new(b))
    }

    pub fn is_boolean(&self) -> bool {
        matches!(
            self,
            Expr::Bool(_) | Expr::Rel(..) | Expr::Not(_) | Expr::And(..) | Expr::Or(..)
        )
    }
}

pub type Context = Vec<Statement>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Statement {
    /// 1-based source line of the statement's first token; the location key.
    pub line: u32,
    pub kind: StmtKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Skip,
    Assign {
        target: String,
        value: Expr,
    },
    ArrayAssign {
        target: String,
        index: Expr,
        value: Expr,
    },
    If {
        cond: Expr,
        then_branch: Context,
        else_branch: Context,
    },
    While {
        cond: Expr,
        body: Context,
    },
}

impl Statement {
    pub fn new(line: u32, kind: StmtKind) -> Statement {
        Statement { line, kind }
    }

    pub fn is_while(&self) -> bool {
        matches!(self.kind, StmtKind::While { .. })
    }
}

/// A parsed and validated `main` function with its safety assertion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub decls: Vec<VarDecl>,
    pub body: Context,
    /// Property over program variables at `l_end` (written `main_end`).
    pub assertion: Formula,
}

impl Program {
    pub fn decl(&self, name: &str) -> Option<&VarDecl> {
        self.decls.iter().find(|d| d.name == name)
    }

    /// All statements, pre-order.
    pub fn statements(&self) -> Vec<&Statement> {
        fn walk<'a>(ctx: &'a [Statement], out: &mut Vec<&'a Statement>) {
            for s in ctx {
                out.push(s);
                match &s.kind {
                    StmtKind::If {
                        then_branch,
                        else_branch,
                        ..
                    } => {
                        walk(then_branch, out);
                        walk(else_branch, out);
                    }
                    StmtKind::While { body, .. } => walk(body, out),
                    _ => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.body, &mut out);
        out
    }

    pub fn statement(&self, line: u32) -> Option<&Statement> {
        self.statements().into_iter().find(|s| s.line == line)
    }

    /// Equality up to statement line numbers.
    pub fn same_structure(&self, other: &Program) -> bool {
        fn strip(ctx: &[Statement]) -> Context {
            ctx.iter()
                .map(|s| Statement {
                    line: 0,
                    kind: match &s.kind {
                        StmtKind::If {
                            cond,
                            then_branch,
                            else_branch,
                        } => StmtKind::If {
                            cond: cond.clone(),
                            then_branch: strip(then_branch),
                            else_branch: strip(else_branch),
                        },
                        StmtKind::While { cond, body } => StmtKind::While {
                            cond: cond.clone(),
                            body: strip(body),
                        },
                        k => k.clone(),
                    },
                })
                .collect()
        }
        self.decls == other.decls
            && self.assertion == other.assertion
            && strip(&self.body) == strip(&other.body)
    }
}

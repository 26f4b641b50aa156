use std::collections::HashSet;

use super::assertion;
use super::lexer::{Lexer, Tok};
use super::{is_reserved, FrontendError, Pos};
use crate::ast::{Context, Expr, Mutability, Program, RelOp, Statement, StmtKind, VarDecl, VarKind};
use crate::logic::ArithOp;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
}

impl Ty {
    fn name(self) -> &'static str {
        match self {
            Ty::Int => "Int",
            Ty::Bool => "Bool",
        }
    }
}

pub(crate) struct Parser<'a> {
    src: &'a str,
    lexer: Lexer<'a>,
    tok: Tok,
    pos: Pos,
    decls: Vec<VarDecl>,
    lines: HashSet<u32>,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &'a str) -> Result<Parser<'a>, FrontendError> {
        let mut lexer = Lexer::new(src);
        let (tok, pos) = lexer.next_token()?;
        Ok(Parser {
            src,
            lexer,
            tok,
            pos,
            decls: Vec::new(),
            lines: HashSet::new(),
        })
    }

    fn bump(&mut self) -> Result<(), FrontendError> {
        let (tok, pos) = self.lexer.next_token()?;
        self.tok = tok;
        self.pos = pos;
        Ok(())
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, FrontendError> {
        Err(FrontendError::Syntax {
            pos: self.pos,
            expected: expected.to_string(),
            found: self.tok.describe(),
        })
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), FrontendError> {
        if self.tok == tok {
            self.bump()
        } else {
            self.unexpected(expected)
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.tok, Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), FrontendError> {
        if self.is_keyword(kw) {
            self.bump()
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), FrontendError> {
        match &self.tok {
            Tok::Ident(s) => {
                let out = (s.clone(), self.pos);
                self.bump()?;
                Ok(out)
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn lookup(&self, name: &str, pos: Pos) -> Result<&VarDecl, FrontendError> {
        self.decls
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| FrontendError::Scope {
                pos,
                name: name.to_string(),
                message: "undeclared identifier".into(),
            })
    }

    pub(crate) fn program(mut self) -> Result<Program, FrontendError> {
        self.expect_keyword("func")?;
        self.expect_keyword("main")?;
        self.expect(Tok::LParen, "`(`")?;
        self.expect(Tok::RParen, "`)`")?;
        self.expect(Tok::LBrace, "`{`")?;
        let body = self.context()?;
        // Do not bump past `}` yet: the token after it must be `assert`,
        // whose tail is read as an s-expression.
        if self.tok != Tok::RBrace {
            return self.unexpected("`}`");
        }
        self.bump()?;
        if !self.is_keyword("assert") {
            return self.unexpected("`assert`");
        }
        let start = self.lexer.offset();
        let start_pos = self.lexer.pos();
        let assertion = assertion::parse(&self.src[start..], start_pos, &self.decls)?;
        Ok(Program {
            decls: self.decls,
            body,
            assertion,
        })
    }

    fn context(&mut self) -> Result<Context, FrontendError> {
        let mut out = Vec::new();
        while self.tok != Tok::RBrace && self.tok != Tok::Eof {
            if let Some(s) = self.statement()? {
                out.push(s);
            }
        }
        Ok(out)
    }

    fn block(&mut self) -> Result<Context, FrontendError> {
        self.expect(Tok::LBrace, "`{`")?;
        let ctx = self.context()?;
        self.expect(Tok::RBrace, "`}`")?;
        Ok(ctx)
    }

    fn claim_line(&mut self, pos: Pos) -> Result<u32, FrontendError> {
        if !self.lines.insert(pos.line) {
            return Err(FrontendError::Syntax {
                pos,
                expected: "one statement per line".into(),
                found: "a second statement".into(),
            });
        }
        Ok(pos.line)
    }

    fn statement(&mut self) -> Result<Option<Statement>, FrontendError> {
        let pos = self.pos;
        let Tok::Ident(word) = self.tok.clone() else {
            return self.unexpected("a statement");
        };
        match word.as_str() {
            "const" | "Int" => self.declaration(),
            "skip" => {
                self.bump()?;
                self.expect(Tok::Semi, "`;`")?;
                let line = self.claim_line(pos)?;
                Ok(Some(Statement::new(line, StmtKind::Skip)))
            }
            "if" => {
                let line = self.claim_line(pos)?;
                self.bump()?;
                let cond = self.condition()?;
                let then_branch = self.block()?;
                let else_branch = if self.is_keyword("else") {
                    self.bump()?;
                    self.block()?
                } else {
                    Vec::new()
                };
                Ok(Some(Statement::new(
                    line,
                    StmtKind::If {
                        cond,
                        then_branch,
                        else_branch,
                    },
                )))
            }
            "while" => {
                let line = self.claim_line(pos)?;
                self.bump()?;
                let cond = self.condition()?;
                let body = self.block()?;
                Ok(Some(Statement::new(line, StmtKind::While { cond, body })))
            }
            _ => self.assignment().map(Some),
        }
    }

    fn condition(&mut self) -> Result<Expr, FrontendError> {
        self.expect(Tok::LParen, "`(`")?;
        let pos = self.pos;
        let (cond, ty) = self.expr()?;
        if ty != Ty::Bool {
            return Err(FrontendError::Sort {
                pos,
                message: "condition must be boolean".into(),
            });
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(cond)
    }

    fn declaration(&mut self) -> Result<Option<Statement>, FrontendError> {
        let pos = self.pos;
        let mutability = if self.is_keyword("const") {
            self.bump()?;
            Mutability::Const
        } else {
            Mutability::Mutable
        };
        self.expect_keyword("Int")?;
        let kind = if self.tok == Tok::LBracket {
            self.bump()?;
            self.expect(Tok::RBracket, "`]`")?;
            VarKind::Array
        } else {
            VarKind::Int
        };
        let (name, name_pos) = self.ident()?;
        if is_reserved(&name) {
            return Err(FrontendError::Scope {
                pos: name_pos,
                name,
                message: "reserved identifier".into(),
            });
        }
        if self.decls.iter().any(|d| d.name == name) {
            return Err(FrontendError::Scope {
                pos: name_pos,
                name,
                message: "duplicate declaration".into(),
            });
        }
        self.decls.push(VarDecl::new(name.clone(), kind, mutability));
        if self.tok == Tok::Semi {
            self.bump()?;
            return Ok(None);
        }
        if self.tok != Tok::Assign {
            return self.unexpected("`;` or `=`");
        }
        if mutability == Mutability::Const {
            return Err(FrontendError::Mutability { pos: self.pos, name });
        }
        if kind == VarKind::Array {
            return Err(FrontendError::Sort {
                pos: self.pos,
                message: format!("array `{name}` cannot be initialized with a value"),
            });
        }
        self.bump()?;
        let value = self.int_expr()?;
        self.expect(Tok::Semi, "`;`")?;
        let line = self.claim_line(pos)?;
        Ok(Some(Statement::new(
            line,
            StmtKind::Assign {
                target: name,
                value,
            },
        )))
    }

    fn assignment(&mut self) -> Result<Statement, FrontendError> {
        let pos = self.pos;
        let (name, name_pos) = self.ident()?;
        let decl = self.lookup(&name, name_pos)?.clone();
        let index = if self.tok == Tok::LBracket {
            self.bump()?;
            let idx = self.int_expr()?;
            self.expect(Tok::RBracket, "`]`")?;
            Some(idx)
        } else {
            None
        };
        if self.tok != Tok::Assign {
            return self.unexpected("`=`");
        }
        if decl.mutability == Mutability::Const {
            return Err(FrontendError::Mutability {
                pos: name_pos,
                name,
            });
        }
        match (decl.kind, index.is_some()) {
            (VarKind::Int, true) => {
                return Err(FrontendError::Sort {
                    pos: name_pos,
                    message: format!("`{name}` is not an array"),
                })
            }
            (VarKind::Array, false) => {
                return Err(FrontendError::Sort {
                    pos: name_pos,
                    message: format!("array `{name}` assigned without an index"),
                })
            }
            _ => {}
        }
        self.bump()?;
        let value = self.int_expr()?;
        self.expect(Tok::Semi, "`;`")?;
        let line = self.claim_line(pos)?;
        let kind = match index {
            Some(index) => StmtKind::ArrayAssign {
                target: name,
                index,
                value,
            },
            None => StmtKind::Assign {
                target: name,
                value,
            },
        };
        Ok(Statement::new(line, kind))
    }

    fn int_expr(&mut self) -> Result<Expr, FrontendError> {
        let pos = self.pos;
        let (e, ty) = self.expr()?;
        if ty != Ty::Int {
            return Err(FrontendError::Sort {
                pos,
                message: "expected an integer expression".into(),
            });
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<(Expr, Ty), FrontendError> {
        self.or_expr()
    }

    fn want(&self, ty: Ty, got: Ty, pos: Pos, op: &str) -> Result<(), FrontendError> {
        if ty == got {
            Ok(())
        } else {
            Err(FrontendError::Sort {
                pos,
                message: format!("operand of `{op}` must be {}, found {}", ty.name(), got.name()),
            })
        }
    }

    fn or_expr(&mut self) -> Result<(Expr, Ty), FrontendError> {
        let pos = self.pos;
        let (mut lhs, ty) = self.and_expr()?;
        while self.tok == Tok::OrOr {
            self.want(Ty::Bool, ty, pos, "||")?;
            self.bump()?;
            let rpos = self.pos;
            let (rhs, rty) = self.and_expr()?;
            self.want(Ty::Bool, rty, rpos, "||")?;
            lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok((lhs, ty))
    }

    fn and_expr(&mut self) -> Result<(Expr, Ty), FrontendError> {
        let pos = self.pos;
        let (mut lhs, ty) = self.eq_expr()?;
        while self.tok == Tok::AndAnd {
            self.want(Ty::Bool, ty, pos, "&&")?;
            self.bump()?;
            let rpos = self.pos;
            let (rhs, rty) = self.eq_expr()?;
            self.want(Ty::Bool, rty, rpos, "&&")?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok((lhs, ty))
    }

    fn eq_expr(&mut self) -> Result<(Expr, Ty), FrontendError> {
        let pos = self.pos;
        let (mut lhs, mut ty) = self.rel_expr()?;
        loop {
            let op = match self.tok {
                Tok::EqEq => RelOp::Eq,
                Tok::Ne => RelOp::Ne,
                _ => return Ok((lhs, ty)),
            };
            self.want(Ty::Int, ty, pos, op.symbol())?;
            self.bump()?;
            let rpos = self.pos;
            let (rhs, rty) = self.rel_expr()?;
            self.want(Ty::Int, rty, rpos, op.symbol())?;
            lhs = Expr::rel(op, lhs, rhs);
            ty = Ty::Bool;
        }
    }

    fn rel_expr(&mut self) -> Result<(Expr, Ty), FrontendError> {
        let pos = self.pos;
        let (mut lhs, mut ty) = self.add_expr()?;
        loop {
            let op = match self.tok {
                Tok::Lt => RelOp::Lt,
                Tok::Le => RelOp::Le,
                Tok::Gt => RelOp::Gt,
                Tok::Ge => RelOp::Ge,
                _ => return Ok((lhs, ty)),
            };
            self.want(Ty::Int, ty, pos, op.symbol())?;
            self.bump()?;
            let rpos = self.pos;
            let (rhs, rty) = self.add_expr()?;
            self.want(Ty::Int, rty, rpos, op.symbol())?;
            lhs = Expr::rel(op, lhs, rhs);
            ty = Ty::Bool;
        }
    }

    fn add_expr(&mut self) -> Result<(Expr, Ty), FrontendError> {
        let pos = self.pos;
        let (mut lhs, ty) = self.mul_expr()?;
        loop {
            let op = match self.tok {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok((lhs, ty)),
            };
            self.want(Ty::Int, ty, pos, op.symbol())?;
            self.bump()?;
            let rpos = self.pos;
            let (rhs, rty) = self.mul_expr()?;
            self.want(Ty::Int, rty, rpos, op.symbol())?;
            lhs = Expr::arith(op, lhs, rhs);
        }
    }

    fn mul_expr(&mut self) -> Result<(Expr, Ty), FrontendError> {
        let pos = self.pos;
        let (mut lhs, ty) = self.unary()?;
        while self.tok == Tok::Star {
            self.want(Ty::Int, ty, pos, "*")?;
            self.bump()?;
            let rpos = self.pos;
            let (rhs, rty) = self.unary()?;
            self.want(Ty::Int, rty, rpos, "*")?;
            lhs = Expr::arith(ArithOp::Mul, lhs, rhs);
        }
        Ok((lhs, ty))
    }

    fn unary(&mut self) -> Result<(Expr, Ty), FrontendError> {
        let pos = self.pos;
        match self.tok {
            Tok::Bang => {
                self.bump()?;
                let (e, ty) = self.unary()?;
                self.want(Ty::Bool, ty, pos, "!")?;
                Ok((Expr::Not(Box::new(e)), Ty::Bool))
            }
            Tok::Minus => {
                self.bump()?;
                if let Tok::Int(digits) = self.tok.clone() {
                    let lit_pos = self.pos;
                    self.bump()?;
                    let v = format!("-{digits}")
                        .parse::<i64>()
                        .map_err(|_| overflow(lit_pos, &digits))?;
                    return Ok((Expr::Int(v), Ty::Int));
                }
                let (e, ty) = self.unary()?;
                self.want(Ty::Int, ty, pos, "-")?;
                Ok((Expr::arith(ArithOp::Sub, Expr::Int(0), e), Ty::Int))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<(Expr, Ty), FrontendError> {
        let pos = self.pos;
        match self.tok.clone() {
            Tok::Int(digits) => {
                self.bump()?;
                let v = digits.parse::<i64>().map_err(|_| overflow(pos, &digits))?;
                Ok((Expr::Int(v), Ty::Int))
            }
            Tok::LParen => {
                self.bump()?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(w) if w == "true" || w == "false" => {
                self.bump()?;
                Ok((Expr::Bool(w == "true"), Ty::Bool))
            }
            Tok::Ident(name) => {
                self.bump()?;
                let decl = self.lookup(&name, pos)?.clone();
                match self.tok {
                    Tok::LBracket => {
                        if decl.kind != VarKind::Array {
                            return Err(FrontendError::Sort {
                                pos,
                                message: format!("`{name}` is not an array"),
                            });
                        }
                        self.bump()?;
                        let idx = self.int_expr()?;
                        self.expect(Tok::RBracket, "`]`")?;
                        Ok((Expr::ArrayRead(name, Box::new(idx)), Ty::Int))
                    }
                    Tok::Dot => {
                        self.bump()?;
                        self.expect_keyword("length")?;
                        if decl.kind != VarKind::Array {
                            return Err(FrontendError::Sort {
                                pos,
                                message: format!("`.length` applied to non-array `{name}`"),
                            });
                        }
                        Ok((Expr::Length(name), Ty::Int))
                    }
                    _ => {
                        if decl.kind == VarKind::Array {
                            return Err(FrontendError::Sort {
                                pos,
                                message: format!("array `{name}` used as an integer"),
                            });
                        }
                        Ok((Expr::Var(name), Ty::Int))
                    }
                }
            }
            _ => self.unexpected("an expression"),
        }
    }
}

fn overflow(pos: Pos, digits: &str) -> FrontendError {
    FrontendError::Syntax {
        pos,
        expected: "a 64-bit signed integer".into(),
        found: format!("`{digits}`"),
    }
}

//! Recursive-descent parser for `.imp` sources and specification predicates.
//!
//! ```text
//! program  := item*
//! item     := decl | stmt
//! decl     := "const" IDENT "=" expr ";"
//!           | "int" declarator ("," declarator)* ";"
//! declarator := IDENT ("[" expr "]")? ("in" expr ".." expr)? ("=" expr)?
//! stmt     := "skip" ";" | "abort" ";" | ";"
//!           | target "=" expr ";"
//!           | "if" "(" cond ")" stmt ("else" stmt)?
//!           | "while" "(" cond ")" stmt
//!           | "{" item* "}"
//! ```
//!
//! Declarations before the first statement of a file declare the state
//! space; any other declaration opens a block scoped over the rest of the
//! enclosing statement list.

use std::collections::HashMap;

use super::ast::{ArithOp, CmpOp, Cond, Expr, Ident, Program, Stmt, Target};
use crate::error::{Error, Result};
use crate::relations::{Domain, Interval, StateSpace, VarDecl};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 24] = [
    "&&", "||", "==", "!=", "<=", ">=", "..", "(", ")", "{", "}", "[", "]", ";", ",", "=", "<",
    ">", "+", "-", "*", "/", "%", "!",
];

fn lex(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: String| Error::Syntax { line, col, msg };
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if src[i..].starts_with("/*") {
            let end = src[i + 2..]
                .find("*/")
                .ok_or_else(|| err(line, col, "unterminated comment".into()))?;
            for ch in src[i..i + 2 + end + 2].chars() {
                if ch == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
            }
            i += 2 + end + 2;
            continue;
        }
        let (tl, tc) = (line, col);
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let v = src[start..i]
                .parse()
                .map_err(|_| err(tl, tc, format!("integer literal `{}` out of range", &src[start..i])))?;
            col += i - start;
            out.push(Token { tok: Tok::Int(v), line: tl, col: tc });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            // a trailing prime marks a final-state reference
            if i < bytes.len() && bytes[i] == b'\'' {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                line: tl,
                col: tc,
            });
            continue;
        }
        match SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) {
            Some(s) => {
                i += s.len();
                col += s.len();
                out.push(Token { tok: Tok::Sym(s), line: tl, col: tc });
            }
            None => return Err(err(tl, tc, format!("unexpected character `{c}`"))),
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

const KEYWORDS: [&str; 10] = [
    "int", "const", "in", "if", "else", "while", "skip", "abort", "true", "false",
];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Shape {
    Scalar,
    Array,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    consts: HashMap<String, i64>,
    scopes: Vec<Vec<(String, Shape)>>,
    allow_primes: bool,
}

impl Parser {
    fn new(src: &str) -> Result<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            consts: HashMap::new(),
            scopes: vec![Vec::new()],
            allow_primes: false,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> Error {
        let t = &self.toks[self.pos];
        let found = match &t.tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        };
        Error::Syntax {
            line: t.line,
            col: t.col,
            msg: format!("expected {expected}, found {found}"),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == kw)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(&format!("`{s}`")))
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<Ident> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                match s.strip_suffix('\'') {
                    Some(base) if self.allow_primes => Ok(Ident {
                        name: base.to_string(),
                        primed: true,
                    }),
                    Some(_) => {
                        self.pos -= 1;
                        Err(self.error("identifier (primed names only appear in specifications)"))
                    }
                    None => Ok(Ident { name: s, primed: false }),
                }
            }
            _ => Err(self.error("identifier")),
        }
    }

    fn lookup(&self, name: &str) -> Option<Shape> {
        self.scopes
            .iter()
            .rev()
            .flat_map(|s| s.iter().rev())
            .find(|(n, _)| n == name)
            .map(|(_, sh)| *sh)
    }

    fn check_var(&self, name: &str, want: Shape) -> Result<()> {
        match self.lookup(name) {
            None => Err(Error::Undeclared(name.to_string())),
            Some(sh) if sh == want => Ok(()),
            Some(Shape::Array) => Err(Error::Spec(format!("array `{name}` used without a subscript"))),
            Some(Shape::Scalar) => Err(Error::Spec(format!("scalar `{name}` used with a subscript"))),
        }
    }

    // ---- expressions

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat_sym("+") {
                ArithOp::Add
            } else if self.eat_sym("-") {
                ArithOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat_sym("*") {
                ArithOp::Mul
            } else if self.eat_sym("/") {
                ArithOp::Div
            } else if self.eat_sym("%") {
                ArithOp::Mod
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_sym("-") {
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Lit(v) => Expr::Lit(-v),
                other => Expr::Neg(Box::new(other)),
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Lit(v))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(_) => {
                let id = self.ident()?;
                if !id.primed {
                    if let Some(v) = self.consts.get(&id.name) {
                        return Ok(Expr::Lit(*v));
                    }
                }
                if self.eat_sym("[") {
                    self.check_var(&id.name, Shape::Array)?;
                    let i = self.expr()?;
                    self.expect_sym("]")?;
                    Ok(Expr::Index(id, Box::new(i)))
                } else {
                    self.check_var(&id.name, Shape::Scalar)?;
                    Ok(Expr::Var(id))
                }
            }
            _ => Err(self.error("expression")),
        }
    }

    /// Constant expression: literals and `const` names only.
    fn const_expr(&mut self) -> Result<i64> {
        let start = self.pos;
        let saved = std::mem::replace(&mut self.scopes, vec![Vec::new()]);
        let e = self.expr();
        self.scopes = saved;
        let e = e?;
        fold(&e).ok_or_else(|| {
            let t = &self.toks[start];
            Error::Syntax {
                line: t.line,
                col: t.col,
                msg: "expected a constant expression".into(),
            }
        })
    }

    // ---- conditions

    fn cond(&mut self) -> Result<Cond> {
        let mut lhs = self.cond_and()?;
        while self.eat_sym("||") {
            let rhs = self.cond_and()?;
            lhs = Cond::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn cond_and(&mut self) -> Result<Cond> {
        let mut lhs = self.cond_not()?;
        while self.eat_sym("&&") {
            let rhs = self.cond_not()?;
            lhs = Cond::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn cond_not(&mut self) -> Result<Cond> {
        if self.eat_sym("!") {
            return Ok(Cond::Not(Box::new(self.cond_not()?)));
        }
        if self.eat_kw("true") {
            return Ok(Cond::Bool(true));
        }
        if self.eat_kw("false") {
            return Ok(Cond::Bool(false));
        }
        if self.is_sym("(") {
            // parenthesised condition, or a comparison whose left side starts with `(`
            let save = self.pos;
            self.bump();
            if let Ok(c) = self.cond() {
                if self.eat_sym(")") && !self.at_cmp() && !self.at_arith() {
                    return Ok(c);
                }
            }
            self.pos = save;
        }
        let l = self.expr()?;
        let op = self.cmp_op()?;
        let r = self.expr()?;
        Ok(Cond::Cmp(op, l, r))
    }

    fn at_cmp(&self) -> bool {
        ["<", "<=", ">", ">=", "==", "!="].iter().any(|s| self.is_sym(s))
    }

    fn at_arith(&self) -> bool {
        ["+", "-", "*", "/", "%"].iter().any(|s| self.is_sym(s))
    }

    fn cmp_op(&mut self) -> Result<CmpOp> {
        let op = match self.peek() {
            Tok::Sym("<") => CmpOp::Lt,
            Tok::Sym("<=") => CmpOp::Le,
            Tok::Sym(">") => CmpOp::Gt,
            Tok::Sym(">=") => CmpOp::Ge,
            Tok::Sym("==") => CmpOp::Eq,
            Tok::Sym("!=") => CmpOp::Ne,
            _ => return Err(self.error("comparison operator")),
        };
        self.bump();
        Ok(op)
    }

    // ---- declarations and statements

    /// Parses `int d1, d2, ...;` returning each declaration with its optional initializer.
    fn int_decl(&mut self) -> Result<Vec<(VarDecl, Option<Expr>)>> {
        let mut out = Vec::new();
        loop {
            let id = self.ident()?;
            if id.primed {
                return Err(self.error("unprimed identifier"));
            }
            let len = if self.eat_sym("[") {
                let n = self.const_expr()?;
                self.expect_sym("]")?;
                if n <= 0 {
                    return Err(Error::InvalidSpace(format!("array `{}` needs a positive size", id.name)));
                }
                Some(n as usize)
            } else {
                None
            };
            let elem = if self.eat_kw("in") {
                let lo = self.const_expr()?;
                self.expect_sym("..")?;
                let hi = self.const_expr()?;
                Interval::new(lo, hi)?
            } else {
                Interval::machine()
            };
            let domain = match len {
                Some(len) => Domain::Array { len, elem },
                None => Domain::Int(elem),
            };
            let shape = if len.is_some() { Shape::Array } else { Shape::Scalar };
            if self.consts.contains_key(&id.name) {
                return Err(Error::InvalidSpace(format!("`{}` is already a constant", id.name)));
            }
            self.scopes.last_mut().unwrap().push((id.name.clone(), shape));
            let init = if self.eat_sym("=") {
                if shape == Shape::Array {
                    return Err(self.error("`;` (arrays cannot be initialised)"));
                }
                Some(self.expr()?)
            } else {
                None
            };
            out.push((VarDecl { name: id.name, domain }, init));
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_sym(";")?;
        Ok(out)
    }

    fn const_decl(&mut self) -> Result<()> {
        let id = self.ident()?;
        self.expect_sym("=")?;
        let v = self.const_expr()?;
        self.expect_sym(";")?;
        self.consts.insert(id.name, v);
        Ok(())
    }

    /// Statement list up to `}` or end of input, with declarations turned into blocks.
    fn items(&mut self, until_brace: bool) -> Result<Stmt> {
        let mut stmts: Vec<Stmt> = Vec::new();
        // each pending block wraps everything parsed after it
        let mut opened: Vec<(usize, VarDecl)> = Vec::new();
        loop {
            if until_brace && self.is_sym("}") || !until_brace && *self.peek() == Tok::Eof {
                break;
            }
            if self.eat_kw("const") {
                self.const_decl()?;
            } else if self.eat_kw("int") {
                for (decl, init) in self.int_decl()? {
                    opened.push((stmts.len(), decl.clone()));
                    if let Some(e) = init {
                        stmts.push(Stmt::assign(&decl.name, e));
                    }
                }
            } else {
                stmts.push(self.stmt()?);
            }
        }
        while let Some((at, decl)) = opened.pop() {
            let inner = stmts.split_off(at);
            stmts.push(Stmt::Block(decl, Box::new(Stmt::seq_all(inner))));
        }
        Ok(Stmt::seq_all(stmts))
    }

    fn stmt(&mut self) -> Result<Stmt> {
        if self.eat_sym(";") {
            return Ok(Stmt::Skip);
        }
        if self.eat_kw("skip") {
            self.expect_sym(";")?;
            return Ok(Stmt::Skip);
        }
        if self.eat_kw("abort") {
            self.expect_sym(";")?;
            return Ok(Stmt::Abort);
        }
        if self.eat_kw("if") {
            self.expect_sym("(")?;
            let c = self.cond()?;
            self.expect_sym(")")?;
            let then = self.stmt()?;
            if self.eat_kw("else") {
                let els = self.stmt()?;
                return Ok(Stmt::IfElse(c, Box::new(then), Box::new(els)));
            }
            return Ok(Stmt::If(c, Box::new(then)));
        }
        if self.eat_kw("while") {
            self.expect_sym("(")?;
            let c = self.cond()?;
            self.expect_sym(")")?;
            return Ok(Stmt::While(c, Box::new(self.stmt()?)));
        }
        if self.eat_sym("{") {
            self.scopes.push(Vec::new());
            let body = self.items(true);
            self.scopes.pop();
            let body = body?;
            self.expect_sym("}")?;
            return Ok(body);
        }
        if let Tok::Ident(name) = self.peek() {
            if !KEYWORDS.contains(&name.as_str()) {
                let id = self.ident()?;
                if self.consts.contains_key(&id.name) {
                    return Err(Error::Spec(format!("cannot assign to constant `{}`", id.name)));
                }
                let target = if self.eat_sym("[") {
                    self.check_var(&id.name, Shape::Array)?;
                    let i = self.expr()?;
                    self.expect_sym("]")?;
                    Target::Elem(id.name, i)
                } else {
                    self.check_var(&id.name, Shape::Scalar)?;
                    Target::Var(id.name)
                };
                self.expect_sym("=")?;
                let e = self.expr()?;
                self.expect_sym(";")?;
                return Ok(Stmt::Assign(target, e));
            }
        }
        Err(self.error("statement"))
    }

    fn program(&mut self) -> Result<Program> {
        let mut header = Vec::new();
        let mut inits = Vec::new();
        loop {
            if self.eat_kw("const") {
                self.const_decl()?;
            } else if self.is_kw("int") {
                self.bump();
                for (decl, init) in self.int_decl()? {
                    if let Some(e) = init {
                        inits.push(Stmt::assign(&decl.name, e));
                    }
                    header.push(decl);
                }
            } else {
                break;
            }
        }
        let space = StateSpace::new(header)?;
        let rest = self.items(false)?;
        if *self.peek() != Tok::Eof {
            return Err(self.error("end of input"));
        }
        inits.push(rest);
        Ok(Program {
            space,
            body: Stmt::seq_all(inits),
        })
    }
}

fn fold(e: &Expr) -> Option<i64> {
    match e {
        Expr::Lit(v) => Some(*v),
        Expr::Neg(x) => fold(x)?.checked_neg(),
        Expr::Bin(op, l, r) => {
            let (a, b) = (fold(l)?, fold(r)?);
            match op {
                ArithOp::Add => a.checked_add(b),
                ArithOp::Sub => a.checked_sub(b),
                ArithOp::Mul => a.checked_mul(b),
                ArithOp::Div => a.checked_div(b),
                ArithOp::Mod => a.checked_rem(b),
            }
        }
        _ => None,
    }
}

/// Parses a program source file.
pub fn parse(src: &str) -> Result<Program> {
    Parser::new(src)?.program()
}

/// Parses a bare statement list against an existing state space.
pub fn parse_stmt(src: &str, space: &StateSpace) -> Result<Stmt> {
    let mut p = Parser::new(src)?;
    p.scopes = vec![shapes(space)];
    let s = p.items(false)?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of input"));
    }
    Ok(s)
}

/// Parses a predicate over `space`; with `allow_primes`, `x'` names the final value of `x`.
pub fn parse_cond(src: &str, space: &StateSpace, allow_primes: bool) -> Result<Cond> {
    let mut p = Parser::new(src)?;
    p.scopes = vec![shapes(space)];
    p.allow_primes = allow_primes;
    let c = p.cond()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of predicate"));
    }
    Ok(c)
}

/// Parses an arithmetic expression over `space`.
pub fn parse_expr(src: &str, space: &StateSpace) -> Result<Expr> {
    let mut p = Parser::new(src)?;
    p.scopes = vec![shapes(space)];
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of expression"));
    }
    Ok(e)
}

fn shapes(space: &StateSpace) -> Vec<(String, Shape)> {
    space
        .vars()
        .iter()
        .map(|v| {
            let sh = if v.domain.is_array() { Shape::Array } else { Shape::Scalar };
            (v.name.clone(), sh)
        })
        .collect()
}

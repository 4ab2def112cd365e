use std::fmt;

use crate::relations::{Domain, StateSpace, VarDecl};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

impl ArithOp {
    /// Replacement order used by the AORB operator.
    pub const ALL: [ArithOp; 5] = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div, ArithOp::Mod];

    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
            ArithOp::Mod => "%",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            ArithOp::Add | ArithOp::Sub => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }

    pub fn eval(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }
}

/// Variable reference. `primed` refers to the final state (specification predicates only).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ident {
    pub name: String,
    pub primed: bool,
}

impl Ident {
    pub fn plain(name: &str) -> Self {
        Ident {
            name: name.to_string(),
            primed: false,
        }
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, if self.primed { "'" } else { "" })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(i64),
    Var(Ident),
    Index(Ident, Box<Expr>),
    Bin(ArithOp, Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Self {
        Expr::Var(Ident::plain(name))
    }

    pub fn bin(op: ArithOp, l: Expr, r: Expr) -> Self {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        match self {
            Expr::Lit(v) if *v < 0 => write!(f, "({v})"),
            Expr::Lit(v) => write!(f, "{v}"),
            Expr::Var(id) => write!(f, "{id}"),
            Expr::Index(id, e) => write!(f, "{id}[{e}]"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.fmt_prec(f, 3)
            }
            Expr::Bin(op, l, r) => {
                let p = op.precedence();
                if p < ctx {
                    f.write_str("(")?;
                }
                l.fmt_prec(f, p)?;
                write!(f, " {} ", op.symbol())?;
                // left-associative: the right operand needs parentheses at equal precedence
                r.fmt_prec(f, p + 1)?;
                if p < ctx {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cond {
    Bool(bool),
    Cmp(CmpOp, Expr, Expr),
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

impl Cond {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        match self {
            Cond::Bool(b) => write!(f, "{b}"),
            Cond::Cmp(op, l, r) => write!(f, "{l} {} {r}", op.symbol()),
            Cond::Not(c) => {
                f.write_str("!")?;
                match **c {
                    Cond::Bool(_) | Cond::Not(_) => c.fmt_prec(f, 3),
                    _ => {
                        f.write_str("(")?;
                        c.fmt_prec(f, 0)?;
                        f.write_str(")")
                    }
                }
            }
            Cond::And(l, r) | Cond::Or(l, r) => {
                let (p, sym) = if matches!(self, Cond::And(..)) {
                    (2, "&&")
                } else {
                    (1, "||")
                };
                if p < ctx {
                    f.write_str("(")?;
                }
                l.fmt_prec(f, p)?;
                write!(f, " {sym} ")?;
                r.fmt_prec(f, p + 1)?;
                if p < ctx {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Var(String),
    Elem(String, Expr),
}

impl Target {
    pub fn name(&self) -> &str {
        match self {
            Target::Var(n) | Target::Elem(n, _) => n,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Var(n) => f.write_str(n),
            Target::Elem(n, e) => write!(f, "{n}[{e}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Stmt {
    Abort,
    Skip,
    Assign(Target, Expr),
    Seq(Box<Stmt>, Box<Stmt>),
    If(Cond, Box<Stmt>),
    IfElse(Cond, Box<Stmt>, Box<Stmt>),
    While(Cond, Box<Stmt>),
    /// Block-local variable scoped over the body.
    Block(VarDecl, Box<Stmt>),
}

impl Stmt {
    pub fn assign(name: &str, e: Expr) -> Self {
        Stmt::Assign(Target::Var(name.to_string()), e)
    }

    pub fn seq(a: Stmt, b: Stmt) -> Self {
        Stmt::Seq(Box::new(a), Box::new(b))
    }

    /// Right-nested sequence of `items`; `Skip` when empty.
    pub fn seq_all(mut items: Vec<Stmt>) -> Self {
        let mut acc = match items.pop() {
            Some(s) => s,
            None => return Stmt::Skip,
        };
        while let Some(s) = items.pop() {
            acc = Stmt::seq(s, acc);
        }
        acc
    }

    /// Maximum nesting depth of `while` loops.
    pub fn loop_depth(&self) -> usize {
        match self {
            Stmt::Abort | Stmt::Skip | Stmt::Assign(..) => 0,
            Stmt::Seq(a, b) | Stmt::IfElse(_, a, b) => a.loop_depth().max(b.loop_depth()),
            Stmt::If(_, a) | Stmt::Block(_, a) => a.loop_depth(),
            Stmt::While(_, b) => 1 + b.loop_depth(),
        }
    }

    fn write_indented(&self, f: &mut fmt::Formatter<'_>, ind: usize) -> fmt::Result {
        let pad = "    ".repeat(ind);
        match self {
            Stmt::Abort => writeln!(f, "{pad}abort;"),
            Stmt::Skip => writeln!(f, "{pad}skip;"),
            Stmt::Assign(t, e) => writeln!(f, "{pad}{t} = {e};"),
            Stmt::Seq(a, b) => {
                a.write_indented(f, ind)?;
                b.write_indented(f, ind)
            }
            Stmt::If(c, a) => {
                writeln!(f, "{pad}if ({c}) {{")?;
                a.write_indented(f, ind + 1)?;
                writeln!(f, "{pad}}}")
            }
            Stmt::IfElse(c, a, b) => {
                writeln!(f, "{pad}if ({c}) {{")?;
                a.write_indented(f, ind + 1)?;
                writeln!(f, "{pad}}} else {{")?;
                b.write_indented(f, ind + 1)?;
                writeln!(f, "{pad}}}")
            }
            Stmt::While(c, b) => {
                writeln!(f, "{pad}while ({c}) {{")?;
                b.write_indented(f, ind + 1)?;
                writeln!(f, "{pad}}}")
            }
            Stmt::Block(d, b) => {
                writeln!(f, "{pad}{{")?;
                writeln!(f, "{}{};", "    ".repeat(ind + 1), DeclDisplay(d))?;
                b.write_indented(f, ind + 1)?;
                writeln!(f, "{pad}}}")
            }
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_indented(f, 0)
    }
}

struct DeclDisplay<'a>(&'a VarDecl);

impl fmt::Display for DeclDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.0;
        let elem = d.domain.elem();
        match d.domain {
            Domain::Int(_) => write!(f, "int {}", d.name)?,
            Domain::Array { len, .. } => write!(f, "int {}[{}]", d.name, len)?,
        }
        if !elem.is_machine() {
            write!(f, " in {}..{}", elem.min, elem.max)?;
        }
        Ok(())
    }
}

/// A parsed source file: the declared state space and the statement body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub space: StateSpace,
    pub body: Stmt,
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.space.vars() {
            writeln!(f, "{};", DeclDisplay(v))?;
        }
        if !self.space.vars().is_empty() {
            writeln!(f)?;
        }
        self.body.write_indented(f, 0)
    }
}

/// Position of an expression node inside a statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExprCtx {
    /// Preorder number among all expression nodes of the statement.
    pub index: usize,
    /// The node is the subscript of an array read or array-element target.
    pub is_subscript: bool,
}

/// Visits every expression node in deterministic preorder: statements in
/// source order; within an assignment the target subscript, then the value;
/// within `if`/`while` the condition, then the branches; within an
/// expression the node itself, then its operands left to right.
pub fn visit_exprs<'a>(stmt: &'a Stmt, f: &mut dyn FnMut(&'a Expr, ExprCtx)) {
    let mut counter = 0;
    walk_stmt(stmt, &mut counter, f);
}

fn walk_stmt<'a>(s: &'a Stmt, n: &mut usize, f: &mut dyn FnMut(&'a Expr, ExprCtx)) {
    match s {
        Stmt::Abort | Stmt::Skip => {}
        Stmt::Assign(t, e) => {
            if let Target::Elem(_, i) = t {
                walk_expr(i, true, n, f);
            }
            walk_expr(e, false, n, f);
        }
        Stmt::Seq(a, b) => {
            walk_stmt(a, n, f);
            walk_stmt(b, n, f);
        }
        Stmt::If(c, a) => {
            walk_cond(c, n, f);
            walk_stmt(a, n, f);
        }
        Stmt::IfElse(c, a, b) => {
            walk_cond(c, n, f);
            walk_stmt(a, n, f);
            walk_stmt(b, n, f);
        }
        Stmt::While(c, b) => {
            walk_cond(c, n, f);
            walk_stmt(b, n, f);
        }
        Stmt::Block(_, b) => walk_stmt(b, n, f),
    }
}

fn walk_cond<'a>(c: &'a Cond, n: &mut usize, f: &mut dyn FnMut(&'a Expr, ExprCtx)) {
    match c {
        Cond::Bool(_) => {}
        Cond::Cmp(_, l, r) => {
            walk_expr(l, false, n, f);
            walk_expr(r, false, n, f);
        }
        Cond::Not(c) => walk_cond(c, n, f),
        Cond::And(l, r) | Cond::Or(l, r) => {
            walk_cond(l, n, f);
            walk_cond(r, n, f);
        }
    }
}

fn walk_expr<'a>(e: &'a Expr, sub: bool, n: &mut usize, f: &mut dyn FnMut(&'a Expr, ExprCtx)) {
    f(
        e,
        ExprCtx {
            index: *n,
            is_subscript: sub,
        },
    );
    *n += 1;
    match e {
        Expr::Lit(_) | Expr::Var(_) => {}
        Expr::Index(_, i) => walk_expr(i, true, n, f),
        Expr::Bin(_, l, r) => {
            walk_expr(l, false, n, f);
            walk_expr(r, false, n, f);
        }
        Expr::Neg(e) => walk_expr(e, false, n, f),
    }
}

/// Returns a copy of `stmt` where expression node `index` (preorder number)
/// is replaced by `f(node)`, or `None` if no such node exists.
pub fn replace_expr(stmt: &Stmt, index: usize, f: &mut dyn FnMut(&Expr) -> Expr) -> Option<Stmt> {
    let mut n = 0;
    let mut hit = false;
    let out = rewrite_stmt(stmt, index, &mut n, &mut hit, f);
    hit.then_some(out)
}

fn rewrite_stmt(
    s: &Stmt,
    at: usize,
    n: &mut usize,
    hit: &mut bool,
    f: &mut dyn FnMut(&Expr) -> Expr,
) -> Stmt {
    match s {
        Stmt::Abort | Stmt::Skip => s.clone(),
        Stmt::Assign(t, e) => {
            let t = match t {
                Target::Elem(name, i) => Target::Elem(name.clone(), rewrite_expr(i, at, n, hit, f)),
                other => other.clone(),
            };
            Stmt::Assign(t, rewrite_expr(e, at, n, hit, f))
        }
        Stmt::Seq(a, b) => {
            let a = rewrite_stmt(a, at, n, hit, f);
            Stmt::seq(a, rewrite_stmt(b, at, n, hit, f))
        }
        Stmt::If(c, a) => {
            let c = rewrite_cond(c, at, n, hit, f);
            Stmt::If(c, Box::new(rewrite_stmt(a, at, n, hit, f)))
        }
        Stmt::IfElse(c, a, b) => {
            let c = rewrite_cond(c, at, n, hit, f);
            let a = rewrite_stmt(a, at, n, hit, f);
            Stmt::IfElse(c, Box::new(a), Box::new(rewrite_stmt(b, at, n, hit, f)))
        }
        Stmt::While(c, b) => {
            let c = rewrite_cond(c, at, n, hit, f);
            Stmt::While(c, Box::new(rewrite_stmt(b, at, n, hit, f)))
        }
        Stmt::Block(d, b) => Stmt::Block(d.clone(), Box::new(rewrite_stmt(b, at, n, hit, f))),
    }
}

fn rewrite_cond(
    c: &Cond,
    at: usize,
    n: &mut usize,
    hit: &mut bool,
    f: &mut dyn FnMut(&Expr) -> Expr,
) -> Cond {
    match c {
        Cond::Bool(_) => c.clone(),
        Cond::Cmp(op, l, r) => {
            let l = rewrite_expr(l, at, n, hit, f);
            Cond::Cmp(*op, l, rewrite_expr(r, at, n, hit, f))
        }
        Cond::Not(c) => Cond::Not(Box::new(rewrite_cond(c, at, n, hit, f))),
        Cond::And(l, r) => {
            let l = rewrite_cond(l, at, n, hit, f);
            Cond::And(Box::new(l), Box::new(rewrite_cond(r, at, n, hit, f)))
        }
        Cond::Or(l, r) => {
            let l = rewrite_cond(l, at, n, hit, f);
            Cond::Or(Box::new(l), Box::new(rewrite_cond(r, at, n, hit, f)))
        }
    }
}

fn rewrite_expr(
    e: &Expr,
    at: usize,
    n: &mut usize,
    hit: &mut bool,
    f: &mut dyn FnMut(&Expr) -> Expr,
) -> Expr {
    let me = *n;
    *n += 1;
    if me == at {
        *hit = true;
        // skip over the replaced subtree so later numbering is unchanged
        *n += count_nodes(e) - 1;
        return f(e);
    }
    match e {
        Expr::Lit(_) | Expr::Var(_) => e.clone(),
        Expr::Index(id, i) => Expr::Index(id.clone(), Box::new(rewrite_expr(i, at, n, hit, f))),
        Expr::Bin(op, l, r) => {
            let l = rewrite_expr(l, at, n, hit, f);
            Expr::Bin(*op, Box::new(l), Box::new(rewrite_expr(r, at, n, hit, f)))
        }
        Expr::Neg(x) => Expr::Neg(Box::new(rewrite_expr(x, at, n, hit, f))),
    }
}

fn count_nodes(e: &Expr) -> usize {
    match e {
        Expr::Lit(_) | Expr::Var(_) => 1,
        Expr::Index(_, i) | Expr::Neg(i) => 1 + count_nodes(i),
        Expr::Bin(_, l, r) => 1 + count_nodes(l) + count_nodes(r),
    }
}

/// The innermost simple statement (assignment) or condition holding
/// expression node `index`, rendered as source text.
pub fn enclosing_statement(stmt: &Stmt, index: usize) -> Option<String> {
    fn go(s: &Stmt, at: usize, n: &mut usize) -> Option<String> {
        let before = *n;
        match s {
            Stmt::Abort | Stmt::Skip => None,
            Stmt::Assign(t, e) => {
                if let Target::Elem(_, i) = t {
                    *n += count_nodes(i);
                }
                *n += count_nodes(e);
                (before..*n).contains(&at).then(|| format!("{t} = {e};"))
            }
            Stmt::Seq(a, b) => go(a, at, n).or_else(|| go(b, at, n)),
            Stmt::If(c, a) => cond_hit(c, at, n, "if").or_else(|| go(a, at, n)),
            Stmt::IfElse(c, a, b) => cond_hit(c, at, n, "if")
                .or_else(|| go(a, at, n))
                .or_else(|| go(b, at, n)),
            Stmt::While(c, b) => cond_hit(c, at, n, "while").or_else(|| go(b, at, n)),
            Stmt::Block(_, b) => go(b, at, n),
        }
    }
    fn cond_nodes(c: &Cond) -> usize {
        match c {
            Cond::Bool(_) => 0,
            Cond::Cmp(_, l, r) => count_nodes(l) + count_nodes(r),
            Cond::Not(c) => cond_nodes(c),
            Cond::And(l, r) | Cond::Or(l, r) => cond_nodes(l) + cond_nodes(r),
        }
    }
    fn cond_hit(c: &Cond, at: usize, n: &mut usize, kw: &str) -> Option<String> {
        let before = *n;
        *n += cond_nodes(c);
        (before..*n).contains(&at).then(|| format!("{kw} ({c})"))
    }
    go(stmt, index, &mut 0)
}

//! Slot-resolved evaluation of statements, expressions and conditions.
//!
//! Statements are lowered once into an IR that addresses variables by frame
//! slot; the frame holds the space's slots followed by block locals (and,
//! for specification predicates, the final-state slots).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::{ArithOp, CmpOp, Cond, Expr, Ident, Program, Stmt, Target};
use crate::error::{Error, Result};
use crate::relations::{Domain, Interval, State, StateSpace};

/// Integer semantics of assignments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Stored values must lie in the target's declared interval.
    Exact,
    /// 64-bit machine integers; declared intervals are ignored.
    Wide,
}

/// Why an evaluation is undefined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    DivisionByZero,
    Overflow,
    IndexOutOfBounds,
    OutOfDomain,
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fault::DivisionByZero => "division by zero",
            Fault::Overflow => "arithmetic overflow",
            Fault::IndexOutOfBounds => "array index out of bounds",
            Fault::OutOfDomain => "value outside declared domain",
        })
    }
}

/// Result of running a program on one initial state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Final { state: Vec<i64> },
    NonTermination,
    Undefined { fault: Fault },
}

impl Outcome {
    pub fn final_state(&self) -> Option<State> {
        match self {
            Outcome::Final { state } => Some(State::new(state.clone())),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum CExpr {
    Lit(i64),
    Slot(usize),
    Elem { base: usize, len: usize, idx: Box<CExpr> },
    Bin(ArithOp, Box<CExpr>, Box<CExpr>),
    Neg(Box<CExpr>),
}

#[derive(Clone, Debug)]
pub(crate) enum CCond {
    Bool(bool),
    Cmp(CmpOp, CExpr, CExpr),
    Not(Box<CCond>),
    And(Box<CCond>, Box<CCond>),
    Or(Box<CCond>, Box<CCond>),
}

#[derive(Clone, Debug)]
pub(crate) enum CStmt {
    Abort,
    Skip,
    Set { slot: usize, iv: Interval, e: CExpr },
    SetElem { base: usize, len: usize, iv: Interval, idx: CExpr, e: CExpr },
    Seq(Vec<CStmt>),
    If(CCond, Box<CStmt>, Box<CStmt>),
    While(CCond, Box<CStmt>),
    Local { base: usize, width: usize, init: i64, body: Box<CStmt> },
}

type Fallible<T> = std::result::Result<T, Fault>;

pub(crate) fn arith(op: ArithOp, a: i64, b: i64) -> Fallible<i64> {
    // `/` truncates toward zero and `%` takes the dividend's sign, as in C
    let r = match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Div | ArithOp::Mod if b == 0 => return Err(Fault::DivisionByZero),
        ArithOp::Div => a.checked_div(b),
        ArithOp::Mod => a.checked_rem(b),
    };
    r.ok_or(Fault::Overflow)
}

impl CExpr {
    pub(crate) fn eval(&self, f: &[i64]) -> Fallible<i64> {
        match self {
            CExpr::Lit(v) => Ok(*v),
            CExpr::Slot(s) => Ok(f[*s]),
            CExpr::Elem { base, len, idx } => {
                let i = idx.eval(f)?;
                if i < 0 || i as usize >= *len {
                    return Err(Fault::IndexOutOfBounds);
                }
                Ok(f[base + i as usize])
            }
            CExpr::Bin(op, l, r) => arith(*op, l.eval(f)?, r.eval(f)?),
            CExpr::Neg(e) => e.eval(f)?.checked_neg().ok_or(Fault::Overflow),
        }
    }
}

impl CCond {
    pub(crate) fn eval(&self, f: &[i64]) -> Fallible<bool> {
        match self {
            CCond::Bool(b) => Ok(*b),
            CCond::Cmp(op, l, r) => Ok(op.eval(l.eval(f)?, r.eval(f)?)),
            CCond::Not(c) => Ok(!c.eval(f)?),
            CCond::And(l, r) => Ok(l.eval(f)? && r.eval(f)?),
            CCond::Or(l, r) => Ok(l.eval(f)? || r.eval(f)?),
        }
    }
}

pub(crate) enum Stop {
    Fuel,
    Fault(Fault),
}

impl From<Fault> for Stop {
    fn from(f: Fault) -> Self {
        Stop::Fault(f)
    }
}

impl CStmt {
    /// Each completed loop body consumes one unit of `fuel`.
    pub(crate) fn run(&self, f: &mut [i64], fuel: &mut u64, mode: Mode) -> std::result::Result<(), Stop> {
        match self {
            CStmt::Abort => Err(Stop::Fuel),
            CStmt::Skip => Ok(()),
            CStmt::Set { slot, iv, e } => {
                let v = e.eval(f)?;
                if mode == Mode::Exact && !iv.contains(v) {
                    return Err(Fault::OutOfDomain.into());
                }
                f[*slot] = v;
                Ok(())
            }
            CStmt::SetElem { base, len, iv, idx, e } => {
                let i = idx.eval(f)?;
                if i < 0 || i as usize >= *len {
                    return Err(Fault::IndexOutOfBounds.into());
                }
                let v = e.eval(f)?;
                if mode == Mode::Exact && !iv.contains(v) {
                    return Err(Fault::OutOfDomain.into());
                }
                f[base + i as usize] = v;
                Ok(())
            }
            CStmt::Seq(items) => items.iter().try_for_each(|s| s.run(f, fuel, mode)),
            CStmt::If(c, a, b) => {
                if c.eval(f)? {
                    a.run(f, fuel, mode)
                } else {
                    b.run(f, fuel, mode)
                }
            }
            CStmt::While(c, body) => {
                while c.eval(f)? {
                    body.run(f, fuel, mode)?;
                    if *fuel == 0 {
                        return Err(Stop::Fuel);
                    }
                    *fuel -= 1;
                }
                Ok(())
            }
            CStmt::Local { base, width, init, body } => {
                f[*base..base + width].fill(*init);
                body.run(f, fuel, mode)
            }
        }
    }

    fn frame_width(&self) -> usize {
        match self {
            CStmt::Local { base, width, body, .. } => (base + width).max(body.frame_width()),
            CStmt::Seq(items) => items.iter().map(|s| s.frame_width()).max().unwrap_or(0),
            CStmt::If(_, a, b) => a.frame_width().max(b.frame_width()),
            CStmt::While(_, b) => b.frame_width(),
            _ => 0,
        }
    }
}

/// Variable layout during lowering: `(name, first slot, domain)`, innermost last.
struct Scope<'a> {
    vars: Vec<(&'a str, usize, Domain)>,
    primed_offset: Option<usize>,
}

impl<'a> Scope<'a> {
    fn of(space: &'a StateSpace) -> Self {
        let vars = space
            .vars()
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.as_str(), space.offset(i), v.domain))
            .collect();
        Scope {
            vars,
            primed_offset: None,
        }
    }

    fn next_slot(&self) -> usize {
        self.vars
            .iter()
            .map(|(_, o, d)| o + d.width())
            .max()
            .unwrap_or(0)
            .max(self.primed_offset.map_or(0, |p| 2 * p))
    }

    fn resolve(&self, id: &Ident) -> Result<(usize, Domain)> {
        let (_, off, dom) = self
            .vars
            .iter()
            .rev()
            .find(|(n, _, _)| *n == id.name)
            .ok_or_else(|| Error::Undeclared(id.name.clone()))?;
        match (id.primed, self.primed_offset) {
            (false, _) => Ok((*off, *dom)),
            (true, Some(p)) => Ok((off + p, *dom)),
            (true, None) => Err(Error::Spec(format!("primed name `{id}` outside a predicate"))),
        }
    }
}

fn lower_expr(e: &Expr, sc: &Scope) -> Result<CExpr> {
    Ok(match e {
        Expr::Lit(v) => CExpr::Lit(*v),
        Expr::Var(id) => match sc.resolve(id)? {
            (off, Domain::Int(_)) => CExpr::Slot(off),
            _ => return Err(Error::Spec(format!("array `{id}` used without a subscript"))),
        },
        Expr::Index(id, i) => match sc.resolve(id)? {
            (base, Domain::Array { len, .. }) => CExpr::Elem {
                base,
                len,
                idx: Box::new(lower_expr(i, sc)?),
            },
            _ => return Err(Error::Spec(format!("scalar `{id}` used with a subscript"))),
        },
        Expr::Bin(op, l, r) => CExpr::Bin(*op, Box::new(lower_expr(l, sc)?), Box::new(lower_expr(r, sc)?)),
        Expr::Neg(x) => CExpr::Neg(Box::new(lower_expr(x, sc)?)),
    })
}

fn lower_cond(c: &Cond, sc: &Scope) -> Result<CCond> {
    Ok(match c {
        Cond::Bool(b) => CCond::Bool(*b),
        Cond::Cmp(op, l, r) => CCond::Cmp(*op, lower_expr(l, sc)?, lower_expr(r, sc)?),
        Cond::Not(x) => CCond::Not(Box::new(lower_cond(x, sc)?)),
        Cond::And(l, r) => CCond::And(Box::new(lower_cond(l, sc)?), Box::new(lower_cond(r, sc)?)),
        Cond::Or(l, r) => CCond::Or(Box::new(lower_cond(l, sc)?), Box::new(lower_cond(r, sc)?)),
    })
}

fn lower_stmt<'a>(s: &'a Stmt, sc: &mut Scope<'a>) -> Result<CStmt> {
    Ok(match s {
        Stmt::Abort => CStmt::Abort,
        Stmt::Skip => CStmt::Skip,
        Stmt::Assign(Target::Var(n), e) => match sc.resolve(&Ident::plain(n))? {
            (slot, Domain::Int(iv)) => CStmt::Set {
                slot,
                iv,
                e: lower_expr(e, sc)?,
            },
            _ => return Err(Error::Spec(format!("cannot assign whole array `{n}`"))),
        },
        Stmt::Assign(Target::Elem(n, i), e) => match sc.resolve(&Ident::plain(n))? {
            (base, Domain::Array { len, elem }) => CStmt::SetElem {
                base,
                len,
                iv: elem,
                idx: lower_expr(i, sc)?,
                e: lower_expr(e, sc)?,
            },
            _ => return Err(Error::Spec(format!("scalar `{n}` used with a subscript"))),
        },
        Stmt::Seq(..) => {
            let mut items = Vec::new();
            let mut cur = s;
            while let Stmt::Seq(a, b) = cur {
                items.push(lower_stmt(a, sc)?);
                cur = b;
            }
            items.push(lower_stmt(cur, sc)?);
            CStmt::Seq(items)
        }
        Stmt::If(c, a) => CStmt::If(lower_cond(c, sc)?, Box::new(lower_stmt(a, sc)?), Box::new(CStmt::Skip)),
        Stmt::IfElse(c, a, b) => CStmt::If(
            lower_cond(c, sc)?,
            Box::new(lower_stmt(a, sc)?),
            Box::new(lower_stmt(b, sc)?),
        ),
        Stmt::While(c, b) => CStmt::While(lower_cond(c, sc)?, Box::new(lower_stmt(b, sc)?)),
        Stmt::Block(d, b) => {
            let base = sc.next_slot();
            let elem = d.domain.elem();
            let init = if elem.contains(0) { 0 } else { elem.min };
            sc.vars.push((d.name.as_str(), base, d.domain));
            let body = lower_stmt(b, sc);
            sc.vars.pop();
            CStmt::Local {
                base,
                width: d.domain.width(),
                init,
                body: Box::new(body?),
            }
        }
    })
}

/// A statement lowered against a state space, ready to run.
#[derive(Clone, Debug)]
pub struct Executable {
    code: CStmt,
    width: usize,
    frame: usize,
    mode: Mode,
}

impl Executable {
    pub fn new(body: &Stmt, space: &StateSpace, mode: Mode) -> Result<Self> {
        let mut sc = Scope::of(space);
        let code = lower_stmt(body, &mut sc)?;
        let frame = code.frame_width().max(space.width());
        Ok(Executable {
            code,
            width: space.width(),
            frame,
            mode,
        })
    }

    pub fn of(p: &Program, mode: Mode) -> Result<Self> {
        Executable::new(&p.body, &p.space, mode)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Runs on the slots of an initial state. Block locals start at zero
    /// (or their interval minimum when zero is excluded).
    pub fn run(&self, input: &[i64], fuel: u64) -> Outcome {
        let mut f = vec![0i64; self.frame];
        f[..self.width].copy_from_slice(input);
        let mut fuel = fuel;
        match self.code.run(&mut f, &mut fuel, self.mode) {
            Ok(()) => {
                f.truncate(self.width);
                Outcome::Final { state: f }
            }
            Err(Stop::Fuel) => Outcome::NonTermination,
            Err(Stop::Fault(fault)) => Outcome::Undefined { fault },
        }
    }
}

/// A condition lowered against a space; with primes, the frame is the
/// initial state followed by the final state.
#[derive(Clone, Debug)]
pub struct Predicate {
    code: CCond,
    width: usize,
}

impl Predicate {
    pub fn new(c: &Cond, space: &StateSpace, primed: bool) -> Result<Self> {
        let mut sc = Scope::of(space);
        if primed {
            sc.primed_offset = Some(space.width());
        }
        Ok(Predicate {
            code: lower_cond(c, &sc)?,
            width: space.width(),
        })
    }

    /// `None` when evaluation is undefined.
    pub fn holds(&self, s: &[i64]) -> Option<bool> {
        self.code.eval(s).ok()
    }

    pub fn holds_pair(&self, s: &[i64], t: &[i64]) -> Option<bool> {
        let mut f = Vec::with_capacity(2 * self.width);
        f.extend_from_slice(s);
        f.extend_from_slice(t);
        self.code.eval(&f).ok()
    }
}

/// `10 · (largest interval size)²`, saturating.
pub fn default_fuel(space: &StateSpace) -> u64 {
    let widest = (0..space.width())
        .map(|i| space.slot_interval(i).size())
        .max()
        .unwrap_or(1);
    let w = u64::try_from(widest).unwrap_or(u64::MAX);
    w.saturating_mul(w).saturating_mul(10)
}

/// Runs `p` on `s` in exact mode.
pub fn execute(p: &Program, s: &State, fuel: u64) -> Result<Outcome> {
    if !p.space.contains(s) {
        return Err(Error::InvalidState(p.space.render(s)));
    }
    Ok(Executable::of(p, Mode::Exact)?.run(&s.slots, fuel))
}

/// Runs `p` in wide mode on every input and keeps the terminating ones.
pub fn exec_mode_function(p: &Program, inputs: &[State], fuel: u64) -> Result<BTreeMap<State, State>> {
    let exe = Executable::of(p, Mode::Wide)?;
    let mut out = BTreeMap::new();
    for s in inputs {
        if s.slots.len() != p.space.width() {
            return Err(Error::InvalidState(format!("{:?} has the wrong width", s.slots)));
        }
        if let Some(t) = exe.run(&s.slots, fuel).final_state() {
            out.insert(s.clone(), t);
        }
    }
    Ok(out)
}

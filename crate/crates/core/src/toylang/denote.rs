//! Program functions computed compositionally over a finite state space.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::ast::{Cond, Program, Stmt};
use super::eval::{Executable, Mode, Outcome, Predicate};
use crate::error::Result;
use crate::relations::{Kind, Relation, StateId, StateSpace, DEFAULT_PAIR_CAP};

/// `[p]` over `space`, in exact mode.
pub fn denote(body: &Stmt, space: &Arc<StateSpace>) -> Result<Relation> {
    denote_capped(body, space, DEFAULT_PAIR_CAP)
}

pub fn denote_program(p: &Program) -> Result<Relation> {
    denote(&p.body, &Arc::new(p.space.clone()))
}

pub fn denote_capped(body: &Stmt, space: &Arc<StateSpace>, cap: u64) -> Result<Relation> {
    let n = space.checked_size(cap)?;
    Denoter { space, n, cap }.stmt(body)
}

/// `(true-set, false-set)` of a condition; states where it is undefined are in neither.
pub fn partition(c: &Cond, space: &StateSpace) -> Result<(BTreeSet<StateId>, BTreeSet<StateId>)> {
    let n = space.checked_size(DEFAULT_PAIR_CAP)?;
    let pred = Predicate::new(c, space, false)?;
    let mut yes = BTreeSet::new();
    let mut no = BTreeSet::new();
    for id in 0..n {
        match pred.holds(&space.state(id).slots) {
            Some(true) => {
                yes.insert(id);
            }
            Some(false) => {
                no.insert(id);
            }
            None => {}
        }
    }
    Ok((yes, no))
}

struct Denoter<'a> {
    space: &'a Arc<StateSpace>,
    n: usize,
    cap: u64,
}

impl Denoter<'_> {
    fn identity_on(&self, set: &BTreeSet<StateId>) -> Relation {
        Relation::from_ids(self.space.clone(), set.iter().map(|&s| (s, s)).collect())
    }

    fn stmt(&self, s: &Stmt) -> Result<Relation> {
        match s {
            Stmt::Abort => Ok(Relation::empty(self.space.clone())),
            Stmt::Skip => Relation::build_capped(self.space.clone(), Kind::Identity, self.cap),
            Stmt::Assign(..) => {
                // {(s, s') | s ∈ defin(E) ∧ s' = E(s)}
                let exe = Executable::new(s, self.space, Mode::Exact)?;
                let mut pairs = BTreeSet::new();
                for id in 0..self.n {
                    let st = self.space.state(id);
                    if let Outcome::Final { state } = exe.run(&st.slots, 0) {
                        let t = crate::relations::State::new(state);
                        pairs.insert((id, self.space.index(&t)));
                    }
                }
                Ok(Relation::from_ids(self.space.clone(), pairs))
            }
            Stmt::Seq(a, b) => self.stmt(a)?.compose(&self.stmt(b)?),
            Stmt::If(c, a) => {
                // T ∩ [p] ∪ T̄ ∩ I
                let (yes, no) = partition(c, self.space)?;
                self.stmt(a)?.restrict_domain(&yes).union(&self.identity_on(&no))
            }
            Stmt::IfElse(c, a, b) => {
                let (yes, no) = partition(c, self.space)?;
                self.stmt(a)?
                    .restrict_domain(&yes)
                    .union(&self.stmt(b)?.restrict_domain(&no))
            }
            Stmt::While(c, b) => {
                // (T ∩ [b])* ∩ converse(T̄)
                let (yes, no) = partition(c, self.space)?;
                let step = self.stmt(b)?.restrict_domain(&yes);
                let star = step.closure()?;
                let pairs = star
                    .pairs()
                    .iter()
                    .filter(|(_, t)| no.contains(t))
                    .copied()
                    .collect();
                Ok(Relation::from_ids(self.space.clone(), pairs))
            }
            Stmt::Block(decl, body) => {
                // {(s, s') | ∃ x, x': (<s,x>, <s',x'>) ∈ [p]}
                let ext = Arc::new(self.space.extend(decl.clone())?);
                let inner = denote_capped(body, &ext, self.cap)?;
                let local = decl.domain.size().unwrap_or(u128::MAX) as usize;
                let pairs = inner
                    .pairs()
                    .iter()
                    .map(|&(s, t)| (s / local, t / local))
                    .collect();
                Ok(Relation::from_ids(self.space.clone(), pairs))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::{is_correct, State};
    use crate::toylang::parse;

    fn rel_of(src: &str) -> (Program, Relation) {
        let p = parse(src).unwrap();
        let r = denote_program(&p).unwrap();
        (p, r)
    }

    #[test]
    fn skip_and_abort() {
        let (p, r) = rel_of("int x in 0..3; skip;");
        let sp = Arc::new(p.space.clone());
        assert_eq!(r, Relation::build(sp.clone(), Kind::Identity).unwrap());
        let (_, a) = rel_of("int x in 0..3; abort;");
        assert!(a.is_empty());
    }

    #[test]
    fn assignment_outside_domain_is_undefined() {
        let (_, r) = rel_of("int x in 0..3; x = x + 1;");
        assert_eq!(r.len(), 3);
        assert_eq!(r.domain().len(), 3);
    }

    #[test]
    fn array_sum_function() {
        let (p, r) = rel_of(
            "const N = 3; int a[N+1] in 0..2; int x in 0..6; int i in 0..4;
             x = 0; i = 0; while (i < N) { x = x + a[i]; i = i + 1; }",
        );
        assert!(r.is_deterministic());
        // total: sums of three elements stay within 0..6
        assert_eq!(r.domain().len() as u128, p.space.size().unwrap());
        for (s, t) in r.state_pairs() {
            let a = &s.slots[0..4];
            assert_eq!(&t.slots[0..4], a);
            assert_eq!(t.slots[4], a[0] + a[1] + a[2]);
            assert_eq!(t.slots[5], 3);
        }
    }

    #[test]
    fn divergence_leaves_the_domain() {
        let (_, r) = rel_of("int x in 0..3; while (x > 1) { x = x; }");
        let dom: Vec<i64> = r.domain().states().map(|s| s.slots[0]).collect();
        assert_eq!(dom, vec![0, 1]);
    }

    #[test]
    fn block_projects_local() {
        let (p, r) = rel_of("int x in 0..2; { int t in 0..2; t = x; x = 2 - t; }");
        assert!(r.is_deterministic());
        let sp = &p.space;
        let expect: Vec<(State, State)> = (0..3)
            .map(|v| (State::new(vec![v]), State::new(vec![2 - v])))
            .collect();
        let got: Vec<(State, State)> = r.state_pairs().collect();
        assert_eq!(got, expect);
        assert!(is_correct(&r, &r).unwrap());
        assert_eq!(sp.width(), 1);
    }

    #[test]
    fn uninitialised_local_is_existential() {
        // the final value of x ranges over every initial value of t
        let (_, r) = rel_of("int x in 0..2; { int t in 0..2; x = t; }");
        assert_eq!(r.len(), 9);
        assert!(!r.is_deterministic());
    }
}

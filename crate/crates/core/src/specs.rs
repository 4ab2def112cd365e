//! Specifications and the absolute-correctness oracle
//! `ω(s, s') = s ∈ dom(R) ⇒ (s, s') ∈ R`.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relations::{Relation, RelationJson, State, StateSpace, DEFAULT_PAIR_CAP};
use crate::toylang::{parse_cond, Cond, Outcome, Predicate};

/// A specification: either an explicit relation, or a pair of predicates
/// where `dom` characterises `dom(R)` and `rel` relates initial and final
/// (primed) values. Every state satisfying `dom` should have some final
/// state in the space satisfying `rel`; otherwise testing (which reads `dom`)
/// and exact enumeration (which keeps only related pairs) disagree on it.
#[derive(Clone, Debug)]
pub enum Spec {
    Enumerated(Relation),
    Predicate(PredicateSpec),
}

#[derive(Clone, Debug)]
pub struct PredicateSpec {
    space: Arc<StateSpace>,
    dom_src: String,
    rel_src: String,
    dom: Predicate,
    rel: Predicate,
}

impl PredicateSpec {
    pub fn new(space: StateSpace, dom: &str, rel: &str) -> Result<Self> {
        let dom_cond: Cond = parse_cond(dom, &space, false)?;
        let rel_cond: Cond = parse_cond(rel, &space, true)?;
        Ok(PredicateSpec {
            dom: Predicate::new(&dom_cond, &space, false)?,
            rel: Predicate::new(&rel_cond, &space, true)?,
            dom_src: dom.to_string(),
            rel_src: rel.to_string(),
            space: Arc::new(space),
        })
    }

    pub fn dom_source(&self) -> &str {
        &self.dom_src
    }

    pub fn rel_source(&self) -> &str {
        &self.rel_src
    }
}

/// Outcome of checking one execution against the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub passed: bool,
    /// The input lies outside `dom(R)`, so the test passes vacuously.
    pub vacuous: bool,
}

impl Spec {
    pub fn predicate(space: StateSpace, dom: &str, rel: &str) -> Result<Self> {
        Ok(Spec::Predicate(PredicateSpec::new(space, dom, rel)?))
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        match self {
            Spec::Enumerated(r) => r.space(),
            Spec::Predicate(p) => &p.space,
        }
    }

    /// Membership of `s` in `dom(R)`. Undefined predicate evaluation counts as outside.
    pub fn in_dom(&self, s: &State) -> bool {
        match self {
            Spec::Enumerated(r) => {
                r.space().contains(s) && {
                    let id = r.space().index(s);
                    r.pairs().range((id, 0)..=(id, usize::MAX)).next().is_some()
                }
            }
            Spec::Predicate(p) => {
                s.slots.len() == p.space.width() && p.dom.holds(&s.slots).unwrap_or(false)
            }
        }
    }

    /// `(s, t) ∈ R`, ignoring the domain predicate.
    pub fn relates(&self, s: &State, t: &State) -> bool {
        match self {
            Spec::Enumerated(r) => r.contains(s, t),
            Spec::Predicate(p) => {
                let w = p.space.width();
                s.slots.len() == w
                    && t.slots.len() == w
                    && p.rel.holds_pair(&s.slots, &t.slots).unwrap_or(false)
            }
        }
    }

    pub fn abs_oracle(&self, s: &State, out: &Outcome) -> OracleVerdict {
        if !self.in_dom(s) {
            return OracleVerdict {
                passed: true,
                vacuous: true,
            };
        }
        let passed = match out {
            Outcome::Final { state } => self.relates(s, &State::new(state.clone())),
            Outcome::NonTermination | Outcome::Undefined { .. } => false,
        };
        OracleVerdict {
            passed,
            vacuous: false,
        }
    }

    /// The relation `{(s, s') | s ∈ dom ∧ rel(s, s')}` over `space`.
    pub fn enumerate(&self) -> Result<Relation> {
        self.enumerate_capped(DEFAULT_PAIR_CAP)
    }

    pub fn enumerate_capped(&self, cap: u64) -> Result<Relation> {
        match self {
            Spec::Enumerated(r) => Ok(r.clone()),
            Spec::Predicate(p) => {
                let n = p.space.checked_size(cap)?;
                let states: Vec<State> = (0..n).map(|id| p.space.state(id)).collect();
                let mut pairs = BTreeSet::new();
                for (i, s) in states.iter().enumerate() {
                    if !self.in_dom(s) {
                        continue;
                    }
                    for (j, t) in states.iter().enumerate() {
                        if p.rel.holds_pair(&s.slots, &t.slots) == Some(true) {
                            if pairs.len() as u64 >= cap {
                                return Err(Error::Capacity {
                                    what: "relation pairs",
                                    needed: format!("more than {cap}"),
                                    cap,
                                });
                            }
                            pairs.insert((i, j));
                        }
                    }
                }
                Ok(Relation::from_ids(p.space.clone(), pairs))
            }
        }
    }

    pub fn to_json(&self) -> SpecJson {
        match self {
            Spec::Enumerated(r) => SpecJson::Enumerated(r.to_json()),
            Spec::Predicate(p) => SpecJson::Predicate {
                space: (*p.space).clone(),
                dom: p.dom_src.clone(),
                rel: p.rel_src.clone(),
            },
        }
    }

    pub fn from_json(doc: &SpecJson) -> Result<Self> {
        match doc {
            SpecJson::Enumerated(r) => Ok(Spec::Enumerated(Relation::from_json(r)?)),
            SpecJson::Predicate { space, dom, rel } => Spec::predicate(space.clone(), dom, rel),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let txt = std::fs::read_to_string(path)?;
        let doc: SpecJson = serde_json::from_str(&txt)?;
        Spec::from_json(&doc)
    }
}

/// Spec file format.
///
/// `{"type":"predicate","space":{...},"dom":"(n%2==1)||(n%4==0)","rel":"n == x'*x' - y'*y'"}`
/// or `{"type":"enumerated","space":{...},"pairs":[...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SpecJson {
    Enumerated(RelationJson),
    Predicate {
        space: StateSpace,
        dom: String,
        rel: String,
    },
}

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::space::{Binding, State, StateId, StateSpace};
use crate::error::{Error, Result};

/// Default cap on enumerated pairs (and on enumerated states).
pub const DEFAULT_PAIR_CAP: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Empty,
    Identity,
    Universal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersection,
    Difference,
    Complement,
}

/// A finite set of states of one space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSet {
    space: Arc<StateSpace>,
    members: BTreeSet<StateId>,
}

impl StateSet {
    pub fn new(space: Arc<StateSpace>, members: BTreeSet<StateId>) -> Self {
        StateSet { space, members }
    }

    pub fn from_states<'a>(
        space: Arc<StateSpace>,
        states: impl IntoIterator<Item = &'a State>,
    ) -> Result<Self> {
        let mut members = BTreeSet::new();
        for s in states {
            if !space.contains(s) {
                return Err(Error::InvalidState(space.render(s)));
            }
            members.insert(space.index(s));
        }
        Ok(StateSet { space, members })
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn ids(&self) -> &BTreeSet<StateId> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: &State) -> bool {
        self.space.contains(s) && self.members.contains(&self.space.index(s))
    }

    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        self.members.iter().map(|&id| self.space.state(id))
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.members.is_subset(&other.members)
    }

    /// The vector relation `{(s, s') | s ∈ self}`.
    pub fn as_vector(&self, cap: u64) -> Result<Relation> {
        let n = self.space.checked_size(cap)?;
        check_pairs(self.members.len() as u128 * n as u128, cap)?;
        let pairs = self
            .members
            .iter()
            .flat_map(|&s| (0..n).map(move |t| (s, t)))
            .collect();
        Ok(Relation::from_ids(self.space.clone(), pairs))
    }
}

/// A binary relation on a finite state space, stored as an explicit pair set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    space: Arc<StateSpace>,
    pairs: BTreeSet<(StateId, StateId)>,
}

fn check_pairs(needed: u128, cap: u64) -> Result<()> {
    if needed > cap as u128 {
        return Err(Error::Capacity {
            what: "relation pairs",
            needed: needed.to_string(),
            cap,
        });
    }
    Ok(())
}

impl Relation {
    pub fn build(space: Arc<StateSpace>, kind: Kind) -> Result<Self> {
        Relation::build_capped(space, kind, DEFAULT_PAIR_CAP)
    }

    pub fn build_capped(space: Arc<StateSpace>, kind: Kind, cap: u64) -> Result<Self> {
        let n = space.checked_size(cap)?;
        let pairs = match kind {
            Kind::Empty => BTreeSet::new(),
            Kind::Identity => (0..n).map(|s| (s, s)).collect(),
            Kind::Universal => {
                check_pairs(n as u128 * n as u128, cap)?;
                (0..n).flat_map(|s| (0..n).map(move |t| (s, t))).collect()
            }
        };
        Ok(Relation { space, pairs })
    }

    pub fn empty(space: Arc<StateSpace>) -> Self {
        Relation {
            space,
            pairs: BTreeSet::new(),
        }
    }

    pub fn from_ids(space: Arc<StateSpace>, pairs: BTreeSet<(StateId, StateId)>) -> Self {
        Relation { space, pairs }
    }

    pub fn from_pairs<'a>(
        space: Arc<StateSpace>,
        pairs: impl IntoIterator<Item = (&'a State, &'a State)>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (s, t) in pairs {
            for x in [s, t] {
                if !space.contains(x) {
                    return Err(Error::InvalidState(format!(
                        "{} is not in {}",
                        space.render(x),
                        space
                    )));
                }
            }
            set.insert((space.index(s), space.index(t)));
        }
        Ok(Relation { space, pairs: set })
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn pairs(&self) -> &BTreeSet<(StateId, StateId)> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, s: &State, t: &State) -> bool {
        self.space.contains(s)
            && self.space.contains(t)
            && self
                .pairs
                .contains(&(self.space.index(s), self.space.index(t)))
    }

    pub fn state_pairs(&self) -> impl Iterator<Item = (State, State)> + '_ {
        self.pairs
            .iter()
            .map(|&(s, t)| (self.space.state(s), self.space.state(t)))
    }

    fn same_space(&self, other: &Relation) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn setop(&self, other: &Relation, op: SetOp) -> Result<Relation> {
        let pairs = match op {
            SetOp::Complement => {
                let n = self.space.checked_size(DEFAULT_PAIR_CAP)?;
                check_pairs(n as u128 * n as u128, DEFAULT_PAIR_CAP)?;
                (0..n)
                    .flat_map(|s| (0..n).map(move |t| (s, t)))
                    .filter(|p| !self.pairs.contains(p))
                    .collect()
            }
            _ => {
                self.same_space(other)?;
                match op {
                    SetOp::Union => self.pairs.union(&other.pairs).copied().collect(),
                    SetOp::Intersection => {
                        self.pairs.intersection(&other.pairs).copied().collect()
                    }
                    SetOp::Difference => self.pairs.difference(&other.pairs).copied().collect(),
                    SetOp::Complement => unreachable!(),
                }
            }
        };
        Ok(Relation {
            space: self.space.clone(),
            pairs,
        })
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        self.setop(other, SetOp::Union)
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        self.setop(other, SetOp::Intersection)
    }

    pub fn difference(&self, other: &Relation) -> Result<Relation> {
        self.setop(other, SetOp::Difference)
    }

    pub fn complement(&self) -> Result<Relation> {
        self.setop(self, SetOp::Complement)
    }

    /// Images of each source state.
    pub fn successors(&self) -> BTreeMap<StateId, Vec<StateId>> {
        let mut succ: BTreeMap<StateId, Vec<StateId>> = BTreeMap::new();
        for &(s, t) in &self.pairs {
            succ.entry(s).or_default().push(t);
        }
        succ
    }

    /// Relational product `{(s, s') | ∃ s'': (s, s'') ∈ self ∧ (s'', s') ∈ other}`.
    pub fn compose(&self, other: &Relation) -> Result<Relation> {
        self.same_space(other)?;
        let succ = other.successors();
        let mut pairs = BTreeSet::new();
        for &(s, mid) in &self.pairs {
            if let Some(ts) = succ.get(&mid) {
                pairs.extend(ts.iter().map(|&t| (s, t)));
            }
        }
        Ok(Relation {
            space: self.space.clone(),
            pairs,
        })
    }

    pub fn converse(&self) -> Relation {
        Relation {
            space: self.space.clone(),
            pairs: self.pairs.iter().map(|&(s, t)| (t, s)).collect(),
        }
    }

    /// Reflexive transitive closure: the least relation containing `I ∪ R`
    /// closed under composition, obtained as the reachability fixpoint from
    /// every state.
    pub fn closure(&self) -> Result<Relation> {
        let n = self.space.checked_size(DEFAULT_PAIR_CAP)?;
        let succ = self.successors();
        let mut pairs = BTreeSet::new();
        let mut seen = vec![false; n];
        let mut touched = Vec::new();
        for s in 0..n {
            let mut queue = VecDeque::from([s]);
            seen[s] = true;
            touched.push(s);
            while let Some(u) = queue.pop_front() {
                pairs.insert((s, u));
                for &v in succ.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                    if !seen[v] {
                        seen[v] = true;
                        touched.push(v);
                        queue.push_back(v);
                    }
                }
            }
            for t in touched.drain(..) {
                seen[t] = false;
            }
        }
        Ok(Relation {
            space: self.space.clone(),
            pairs,
        })
    }

    pub fn domain(&self) -> StateSet {
        StateSet {
            space: self.space.clone(),
            members: self.pairs.iter().map(|&(s, _)| s).collect(),
        }
    }

    pub fn range(&self) -> StateSet {
        StateSet {
            space: self.space.clone(),
            members: self.pairs.iter().map(|&(_, t)| t).collect(),
        }
    }

    /// `R ∩ (set × S)`: keeps the pairs whose source is in `set`.
    pub fn restrict_domain(&self, set: &BTreeSet<StateId>) -> Relation {
        Relation {
            space: self.space.clone(),
            pairs: self
                .pairs
                .iter()
                .filter(|(s, _)| set.contains(s))
                .copied()
                .collect(),
        }
    }

    /// `R̂R ⊆ I`.
    pub fn is_deterministic(&self) -> bool {
        let mut last: Option<StateId> = None;
        for &(s, _) in &self.pairs {
            if last == Some(s) {
                return false;
            }
            last = Some(s);
        }
        true
    }

    pub fn predicates(&self) -> Predicates {
        let n = self.space.size().unwrap_or(u128::MAX);
        let has = |s: StateId, t: StateId| self.pairs.contains(&(s, t));
        let reflexive = n <= usize::MAX as u128 && (0..n as usize).all(|s| has(s, s));
        let symmetric = self.pairs.iter().all(|&(s, t)| has(t, s));
        let antisymmetric = self.pairs.iter().all(|&(s, t)| s == t || !has(t, s));
        let asymmetric = self.pairs.iter().all(|&(s, t)| !has(t, s));
        let succ = self.successors();
        let transitive = self.pairs.iter().all(|&(s, m)| {
            succ.get(&m)
                .is_none_or(|ts| ts.iter().all(|&t| has(s, t)))
        });
        let total = self.domain().len() as u128 == n;
        Predicates {
            reflexive,
            symmetric,
            antisymmetric,
            asymmetric,
            transitive,
            total,
            deterministic: self.is_deterministic(),
        }
    }

    /// `R'` refines `R` iff `RL ∩ R'L ∩ (R ∪ R') = R`.
    pub fn refines(&self, spec: &Relation) -> Result<bool> {
        self.same_space(spec)?;
        let dom_r = spec.domain();
        let dom_rp = self.domain();
        let both: BTreeSet<StateId> = dom_r.members.intersection(&dom_rp.members).copied().collect();
        let lhs = spec.union(self)?.restrict_domain(&both);
        Ok(lhs == *spec)
    }

    pub fn to_json(&self) -> RelationJson {
        RelationJson {
            space: (*self.space).clone(),
            pairs: self
                .state_pairs()
                .map(|(s, t)| [self.space.bindings(&s), self.space.bindings(&t)])
                .collect(),
        }
    }

    pub fn from_json(doc: &RelationJson) -> Result<Self> {
        let space = Arc::new(doc.space.clone());
        let mut pairs = BTreeSet::new();
        for [s, t] in &doc.pairs {
            let s = space.state_from(s)?;
            let t = space.state_from(t)?;
            pairs.insert((space.index(&s), space.index(&t)));
        }
        Ok(Relation { space, pairs })
    }
}

/// Structural flags of a relation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicates {
    pub reflexive: bool,
    pub symmetric: bool,
    pub antisymmetric: bool,
    pub asymmetric: bool,
    pub transitive: bool,
    pub total: bool,
    pub deterministic: bool,
}

/// `{"space": {...}, "pairs": [[{"x":0},{"x":1}], ...]}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationJson {
    pub space: StateSpace,
    pub pairs: Vec<[BTreeMap<String, Binding>; 2]>,
}

//! Absolute and relative correctness of deterministic programs, and the
//! partial order they induce on a set of candidates.

use serde::{Deserialize, Serialize};

use super::relation::{Relation, StateSet};
use crate::error::{Error, Result};

/// `dom(R ∩ P)`: the initial states on which `program` satisfies `spec`.
pub fn competence_domain(spec: &Relation, program: &Relation) -> Result<StateSet> {
    Ok(spec.intersection(program)?.domain())
}

/// Correctness of a deterministic program: `(R ∩ P)L = RL`.
pub fn is_correct(program: &Relation, spec: &Relation) -> Result<bool> {
    if !program.is_deterministic() {
        return Err(Error::NonDeterministic("program"));
    }
    Ok(competence_domain(spec, program)? == spec.domain())
}

/// `candidate` is more-correct than `base` w.r.t. `spec` when its competence
/// domain is a superset of the base's; proper superset when `strict`.
pub fn more_correct(
    candidate: &Relation,
    base: &Relation,
    spec: &Relation,
    strict: bool,
) -> Result<bool> {
    if !candidate.is_deterministic() {
        return Err(Error::NonDeterministic("candidate"));
    }
    if !base.is_deterministic() {
        return Err(Error::NonDeterministic("base"));
    }
    let cd_cand = competence_domain(spec, candidate)?;
    let cd_base = competence_domain(spec, base)?;
    let sup = cd_base.is_subset(&cd_cand);
    Ok(if strict {
        sup && cd_cand.len() > cd_base.len()
    } else {
        sup
    })
}

/// Candidates grouped by equal competence domain, with the covering edges of
/// the strict order between groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectnessOrder {
    /// Each group lists candidate indices in ascending order; groups are
    /// ordered by their smallest member.
    pub groups: Vec<Vec<usize>>,
    /// `(lower, upper)` group indices: `upper` is strictly more-correct than
    /// `lower` with nothing in between.
    pub covers: Vec<(usize, usize)>,
}

impl CorrectnessOrder {
    pub fn group_of(&self, program: usize) -> usize {
        self.groups
            .iter()
            .position(|g| g.contains(&program))
            .expect("every program belongs to a group")
    }

    pub fn minimal(&self) -> Vec<usize> {
        (0..self.groups.len())
            .filter(|g| !self.covers.iter().any(|&(_, hi)| hi == *g))
            .collect()
    }

    pub fn maximal(&self) -> Vec<usize> {
        (0..self.groups.len())
            .filter(|g| !self.covers.iter().any(|&(lo, _)| lo == *g))
            .collect()
    }

    /// Graphviz rendering of the Hasse diagram, bottom to top.
    pub fn to_dot(&self, names: &[String]) -> String {
        let mut out = String::from("digraph correctness {\n  rankdir=BT;\n");
        for (i, g) in self.groups.iter().enumerate() {
            let label: Vec<&str> = g.iter().map(|&p| names[p].as_str()).collect();
            out.push_str(&format!("  g{} [label=\"{}\"];\n", i, label.join(", ")));
        }
        for &(lo, hi) in &self.covers {
            out.push_str(&format!("  g{lo} -> g{hi};\n"));
        }
        out.push_str("}\n");
        out
    }
}

pub fn correctness_order(programs: &[Relation], spec: &Relation) -> Result<CorrectnessOrder> {
    let mut cds = Vec::with_capacity(programs.len());
    for p in programs {
        if !p.is_deterministic() {
            return Err(Error::NonDeterministic("candidate"));
        }
        cds.push(competence_domain(spec, p)?);
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, cd) in cds.iter().enumerate() {
        match groups.iter_mut().find(|g| cds[g[0]] == *cd) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }

    let reps: Vec<&StateSet> = groups.iter().map(|g| &cds[g[0]]).collect();
    let below = |a: usize, b: usize| a != b && reps[a].is_subset(reps[b]);
    let mut covers = Vec::new();
    for lo in 0..groups.len() {
        for hi in 0..groups.len() {
            if below(lo, hi) && !(0..groups.len()).any(|m| below(lo, m) && below(m, hi)) {
                covers.push((lo, hi));
            }
        }
    }
    Ok(CorrectnessOrder { groups, covers })
}

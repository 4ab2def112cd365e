//! The three bundled case studies: the five-state lattice, array sum, and
//! Fermat decomposition. Fixtures and expected facts are data files; the
//! built-in copies can be replaced by a directory of the same names.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::mutation::{generate, Operator, Patch, PatchSpec};
use crate::relations::{competence_domain, correctness_order, is_correct, Relation, StateSpace};
use crate::repair::{export_tree, repair, verify_fault, RepairConfig, RepairResult, TreeFormat};
use crate::specs::Spec;
use crate::testing::{Bounds, Classification, Selection};
use crate::toylang::{denote, exec_mode_function, parse, partition, parse_cond, Program};

const EMBEDDED: &[(&str, &str)] = &[
    ("lattice.json", include_str!("../fixtures/lattice.json")),
    ("lattice_expect.json", include_str!("../fixtures/lattice_expect.json")),
    ("arraysum.imp", include_str!("../fixtures/arraysum.imp")),
    ("arraysum_spec.json", include_str!("../fixtures/arraysum_spec.json")),
    ("arraysum_expect.json", include_str!("../fixtures/arraysum_expect.json")),
    ("fermat_base.imp", include_str!("../fixtures/fermat_base.imp")),
    ("fermat_correct.imp", include_str!("../fixtures/fermat_correct.imp")),
    ("fermat_spec.json", include_str!("../fixtures/fermat_spec.json")),
    ("fermat_expect.json", include_str!("../fixtures/fermat_expect.json")),
];

/// Reads fixture `name` from `dir`, or the built-in copy.
pub fn fixture(name: &str, dir: Option<&Path>) -> Result<String> {
    match dir {
        Some(d) => Ok(std::fs::read_to_string(d.join(name))?),
        None => EMBEDDED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, txt)| txt.to_string())
            .ok_or_else(|| Error::Format(format!("no built-in fixture `{name}`"))),
    }
}

fn fixture_json<T: for<'de> Deserialize<'de>>(name: &str, dir: Option<&Path>) -> Result<T> {
    Ok(serde_json::from_str(&fixture(name, dir)?)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Study {
    Lattice,
    Arraysum,
    Fermat,
}

impl std::str::FromStr for Study {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lattice" => Ok(Study::Lattice),
            "arraysum" => Ok(Study::Arraysum),
            "fermat" => Ok(Study::Fermat),
            other => Err(Error::Format(format!("unknown study `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fact {
    pub name: String,
    pub expected: Value,
    pub actual: Value,
    pub ok: bool,
}

impl Fact {
    fn new(name: impl Into<String>, expected: Value, actual: Value) -> Self {
        Fact {
            ok: expected == actual,
            name: name.into(),
            expected,
            actual,
        }
    }

    fn check(name: impl Into<String>, expected: Value, actual: Value, ok: bool) -> Self {
        Fact {
            name: name.into(),
            expected,
            actual,
            ok,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub study: Study,
    pub facts: Vec<Fact>,
    pub data: Value,
    /// File name to contents (DOT graphs, trees).
    #[serde(skip)]
    pub artifacts: BTreeMap<String, String>,
}

impl StudyReport {
    pub fn ok(&self) -> bool {
        self.facts.iter().all(|f| f.ok)
    }
}

pub fn run(study: Study, dir: Option<&Path>) -> Result<StudyReport> {
    match study {
        Study::Lattice => lattice(dir),
        Study::Arraysum => arraysum(dir),
        Study::Fermat => fermat(dir).map(|(r, _)| r),
    }
}

#[derive(Deserialize)]
struct LatticeFile {
    states: Vec<String>,
    spec: Vec<[String; 2]>,
    programs: BTreeMap<String, Vec<[String; 2]>>,
}

/// The lattice study: one variable whose values name the states.
pub struct Lattice {
    pub states: Vec<String>,
    pub spec: Relation,
    pub names: Vec<String>,
    pub programs: Vec<Relation>,
}

impl Lattice {
    pub fn letters(&self, ids: impl IntoIterator<Item = usize>) -> Vec<String> {
        ids.into_iter().map(|i| self.states[i].clone()).collect()
    }
}

pub fn load_lattice(dir: Option<&Path>) -> Result<Lattice> {
    let f: LatticeFile = fixture_json("lattice.json", dir)?;
    if f.states.is_empty() {
        return Err(Error::InvalidSpace("lattice has no states".into()));
    }
    let space = Arc::new(StateSpace::scalar("s", 0, f.states.len() as i64 - 1)?);
    let id = |name: &String| {
        f.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::InvalidState(name.clone()))
    };
    let rel = |pairs: &[[String; 2]]| -> Result<Relation> {
        let ids = pairs
            .iter()
            .map(|[a, b]| Ok((id(a)?, id(b)?)))
            .collect::<Result<BTreeSet<_>>>()?;
        Ok(Relation::from_ids(space.clone(), ids))
    };
    let spec = rel(&f.spec)?;
    let mut names = Vec::new();
    let mut programs = Vec::new();
    for (n, pairs) in &f.programs {
        names.push(n.clone());
        programs.push(rel(pairs)?);
    }
    Ok(Lattice {
        states: f.states,
        spec,
        names,
        programs,
    })
}

#[derive(Deserialize)]
struct LatticeExpect {
    spec_domain: Vec<String>,
    competence_domains: BTreeMap<String, Vec<String>>,
    correct: Vec<String>,
    groups: Vec<Vec<String>>,
    covers: Vec<[String; 2]>,
}

fn lattice(dir: Option<&Path>) -> Result<StudyReport> {
    let l = load_lattice(dir)?;
    let exp: LatticeExpect = fixture_json("lattice_expect.json", dir)?;
    let mut facts = vec![Fact::new(
        "dom(R)",
        json!(exp.spec_domain),
        json!(l.letters(l.spec.domain().ids().iter().copied())),
    )];
    let mut cds = BTreeMap::new();
    let mut correct = Vec::new();
    for (name, p) in l.names.iter().zip(&l.programs) {
        let cd = l.letters(competence_domain(&l.spec, p)?.ids().iter().copied());
        if let Some(want) = exp.competence_domains.get(name) {
            facts.push(Fact::new(format!("CD({name})"), json!(want), json!(cd)));
        }
        cds.insert(name.clone(), cd);
        if is_correct(p, &l.spec)? {
            correct.push(name.clone());
        }
    }
    facts.push(Fact::new("correct programs", json!(exp.correct), json!(correct)));
    let order = correctness_order(&l.programs, &l.spec)?;
    let groups: Vec<Vec<String>> = order
        .groups
        .iter()
        .map(|g| g.iter().map(|&i| l.names[i].clone()).collect())
        .collect();
    facts.push(Fact::new("equally correct groups", json!(exp.groups), json!(groups)));
    // covers named by the first member of each group
    let mut covers: Vec<[String; 2]> = order
        .covers
        .iter()
        .map(|&(lo, hi)| [groups[lo][0].clone(), groups[hi][0].clone()])
        .collect();
    covers.sort();
    let mut want = exp.covers.clone();
    want.sort();
    facts.push(Fact::new("Hasse covers", json!(want), json!(covers)));
    let mut artifacts = BTreeMap::new();
    artifacts.insert("hasse.dot".to_string(), order.to_dot(&l.names));
    Ok(StudyReport {
        study: Study::Lattice,
        facts,
        data: json!({ "competence_domains": cds, "groups": groups, "covers": covers }),
        artifacts,
    })
}

#[derive(Deserialize)]
struct ArraysumExpect {
    competence_domain: String,
    patches: BTreeMap<String, PatchSpec>,
    fault_removal: BTreeMap<String, bool>,
    #[serde(default)]
    applied_correct: BTreeMap<String, bool>,
    both_applied_correct: bool,
}

pub fn arraysum_program(dir: Option<&Path>) -> Result<(Program, Spec)> {
    let p = parse(&fixture("arraysum.imp", dir)?)?;
    let spec = Spec::from_json(&fixture_json("arraysum_spec.json", dir)?)?;
    Ok((p, spec))
}

fn arraysum(dir: Option<&Path>) -> Result<StudyReport> {
    let (p, spec) = arraysum_program(dir)?;
    let exp: ArraysumExpect = fixture_json("arraysum_expect.json", dir)?;
    let r = spec.enumerate()?;
    let space = r.space().clone();
    let prog = denote(&p.body, &space)?;
    let cd = competence_domain(&r, &prog)?;
    let (want, _) = partition(&parse_cond(&exp.competence_domain, &space, false)?, &space)?;
    let mut facts = vec![Fact::check(
        format!("CD(p) = {{{}}}", exp.competence_domain),
        json!(want.len()),
        json!(cd.len()),
        *cd.ids() == want,
    )];
    let mut data = BTreeMap::new();
    let mut resolved: BTreeMap<String, Patch> = BTreeMap::new();
    for (name, ps) in &exp.patches {
        let patch = ps.resolve(&p)?;
        let f = verify_fault(&p, &patch, &spec)?;
        if let Some(&want) = exp.fault_removal.get(name) {
            facts.push(Fact::new(format!("{name} is a fault removal"), json!(want), json!(f.is_fault_removal)));
        }
        let correct = is_correct(&denote(&f.patched.body, &space)?, &r)?;
        if let Some(&want) = exp.applied_correct.get(name) {
            facts.push(Fact::new(format!("{name} alone gives a correct program"), json!(want), json!(correct)));
        }
        data.insert(
            name.clone(),
            json!({
                "is_fault_removal": f.is_fault_removal,
                "correct": correct,
                "cd_before": f.cd_before.len(),
                "cd_after": f.cd_after.len(),
                "program": f.patched.body.to_string(),
            }),
        );
        resolved.insert(name.clone(), patch);
    }
    if let (Some(s1), Some(s2)) = (resolved.get("s1"), resolved.get("s2")) {
        let both = Patch::new(s1.substitutions.iter().chain(&s2.substitutions).cloned().collect());
        let f = verify_fault(&p, &both, &spec)?;
        let correct = is_correct(&denote(&f.patched.body, &space)?, &r)?;
        facts.push(Fact::new("s1 and s2 together give a correct program", json!(exp.both_applied_correct), json!(correct)));
        data.insert(
            "s1+s2".into(),
            json!({ "correct": correct, "cd_after": f.cd_after.len(), "program": f.patched.body.to_string() }),
        );
    }
    Ok(StudyReport {
        study: Study::Arraysum,
        facts,
        data: json!({ "states": space.size().map(|n| n as u64), "competence_domain": cd.len(), "patches": data }),
        artifacts: BTreeMap::new(),
    })
}

#[derive(Clone, Debug, Deserialize)]
pub struct FermatExpect {
    pub n_range: [i64; 2],
    pub fuel: u64,
    pub mutants: usize,
    pub level1_absolutely_correct: usize,
    pub level1_strictly_more_correct_min: usize,
    pub fault_depth_ub: usize,
    pub fault_density_lb_min: usize,
    pub depth1_dead_end: bool,
    pub solution_matches_correct: bool,
}

pub struct FermatSetup {
    pub base: Program,
    pub correct: Program,
    pub spec: Spec,
    pub expect: FermatExpect,
    pub config: RepairConfig,
}

pub fn fermat_setup(dir: Option<&Path>) -> Result<FermatSetup> {
    let expect: FermatExpect = fixture_json("fermat_expect.json", dir)?;
    let config = RepairConfig {
        operators: vec![Operator::Aorb],
        selection: Selection::Exhaustive {
            bounds: Bounds::default().with("n", expect.n_range[0], expect.n_range[1]),
        },
        fuel: expect.fuel,
        ..Default::default()
    };
    Ok(FermatSetup {
        base: parse(&fixture("fermat_base.imp", dir)?)?,
        correct: parse(&fixture("fermat_correct.imp", dir)?)?,
        spec: Spec::from_json(&fixture_json("fermat_spec.json", dir)?)?,
        expect,
        config,
    })
}

pub fn fermat(dir: Option<&Path>) -> Result<(StudyReport, RepairResult)> {
    let s = fermat_setup(dir)?;
    let exp = &s.expect;
    let count = generate(&s.base, &s.config.operators).len();
    let res = repair(&s.base, &s.spec, &s.config)?;
    let tree = &res.tree;
    let level1 = |c: Classification| tree.root().mutants.iter().filter(|v| v.classification == c).count();
    let abs1 = level1(Classification::AbsolutelyCorrect);
    let strict1 = level1(Classification::StrictlyMoreCorrect);
    let dead1: Vec<&str> = tree
        .dead_ends
        .iter()
        .filter(|&&d| tree.nodes[d].depth == 1)
        .map(|&d| tree.nodes[d].label.as_str())
        .collect();
    let m = res.metrics;
    let mut facts = vec![
        Fact::new("AORB mutants of p", json!(exp.mutants), json!(count)),
        Fact::new("level-1 absolutely correct", json!(exp.level1_absolutely_correct), json!(abs1)),
        Fact::check(
            "level-1 strictly more-correct",
            json!(format!(">= {}", exp.level1_strictly_more_correct_min)),
            json!(strict1),
            strict1 >= exp.level1_strictly_more_correct_min,
        ),
        Fact::new("fault depth upper bound", json!(exp.fault_depth_ub), json!(m.fault_depth_ub)),
        Fact::check(
            "fault density lower bound",
            json!(format!(">= {}", exp.fault_density_lb_min)),
            json!(m.fault_density_lb),
            m.fault_density_lb >= exp.fault_density_lb_min,
        ),
        Fact::new("a depth-1 branch is a dead end", json!(exp.depth1_dead_end), json!(!dead1.is_empty())),
    ];
    let suite = crate::testing::select_tests(&s.spec, None, s.config.selection.clone())?;
    let agree = match tree.solutions.iter().map(|&i| &tree.nodes[i]).min_by_key(|n| n.depth) {
        Some(sol) => {
            let got = exec_mode_function(&sol.program, &suite.inputs, s.config.fuel)?;
            let want = exec_mode_function(&s.correct, &suite.inputs, s.config.fuel)?;
            got == want && got.len() == suite.inputs.len()
        }
        None => false,
    };
    facts.push(Fact::new(
        "solution agrees with the correct program on the suite",
        json!(exp.solution_matches_correct),
        json!(agree),
    ));
    let mut artifacts = BTreeMap::new();
    artifacts.insert("tree.dot".to_string(), export_tree(&res, TreeFormat::Dot)?);
    artifacts.insert("tree.json".to_string(), export_tree(&res, TreeFormat::Json)?);
    let report = StudyReport {
        study: Study::Fermat,
        facts,
        data: json!({
            "suite_size": suite.inputs.len(),
            "metrics": m,
            "nodes": tree.nodes.iter().map(|n| json!({
                "label": n.label, "depth": n.depth, "classification": n.classification,
            })).collect::<Vec<_>>(),
            "solutions": tree.solutions.iter().map(|&i| &tree.nodes[i].label).collect::<Vec<_>>(),
            "depth1_dead_ends": dead1,
        }),
        artifacts,
    };
    Ok((report, res))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_facts_hold() {
        let r = lattice(None).unwrap();
        for f in &r.facts {
            assert!(f.ok, "{f:?}");
        }
        assert!(r.artifacts["hasse.dot"].contains("P7, P8, P9"));
    }

    #[test]
    fn arraysum_facts_hold() {
        let r = arraysum(None).unwrap();
        for f in &r.facts {
            assert!(f.ok, "{f:?}");
        }
    }

    #[test]
    fn fixture_directory_override() {
        let dir = tempfile::tempdir().unwrap();
        for (n, txt) in EMBEDDED {
            std::fs::write(dir.path().join(n), txt).unwrap();
        }
        let mut l: Value = serde_json::from_str(EMBEDDED[1].1).unwrap();
        l["correct"] = json!(["P7"]);
        std::fs::write(dir.path().join("lattice_expect.json"), l.to_string()).unwrap();
        let r = lattice(Some(dir.path())).unwrap();
        assert!(!r.ok());
        assert!(fixture("missing.json", Some(dir.path())).is_err());
    }
}

//! Stepwise repair: classify mutants against their base, keep the strictly
//! more-correct ones as new bases, and climb until an absolutely correct
//! program appears.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mutation::{apply_patch, fingerprint_outcomes, generate, relation_fingerprint, Mutant, Operator, Patch};
use crate::relations::{competence_domain, is_correct, more_correct, Relation, StateSet, StateSpace};
use crate::specs::Spec;
use crate::testing::{classify, report_from, run_all, same_layout, select_tests, Classification, Selection, TestSuite};
use crate::toylang::{denote, parse, Executable, Mode, Outcome, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassMode {
    /// Suite-based verdicts.
    Testing,
    /// Ground truth from program functions on the finite space.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairConfig {
    pub operators: Vec<Operator>,
    pub selection: Selection,
    pub fuel: u64,
    pub max_depth: usize,
    pub max_frontier: usize,
    pub mode: ClassMode,
    /// Interpreter mode for suite runs.
    pub exec: Mode,
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            operators: vec![Operator::Aorb],
            selection: Selection::Exhaustive {
                bounds: Default::default(),
            },
            fuel: 10_000,
            max_depth: 5,
            max_frontier: 64,
            mode: ClassMode::Testing,
            exec: Mode::Wide,
        }
    }
}

/// Classification of one mutant against its base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantVerdict {
    pub ordinal: usize,
    pub operator: Operator,
    pub statement: String,
    pub classification: Classification,
    pub n0: usize,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub fingerprint: String,
}

/// Fixed evaluation context for one base program.
enum Judge<'a> {
    Testing {
        spec: &'a Spec,
        suite: &'a TestSuite,
        base: Vec<Outcome>,
        fuel: u64,
        mode: Mode,
    },
    Exact {
        spec: &'a Relation,
        base_cd: StateSet,
        dom: StateSet,
    },
}

impl<'a> Judge<'a> {
    fn testing(base: &Program, spec: &'a Spec, suite: &'a TestSuite, cfg: &RepairConfig) -> Result<Self> {
        let exe = Executable::of(base, cfg.exec)?;
        Ok(Judge::Testing {
            spec,
            suite,
            base: run_all(&exe, suite, cfg.fuel),
            fuel: cfg.fuel,
            mode: cfg.exec,
        })
    }

    fn exact(base: &Program, spec: &'a Relation) -> Result<Self> {
        let p = denote(&base.body, spec.space())?;
        Ok(Judge::Exact {
            base_cd: competence_domain(spec, &p)?,
            dom: spec.domain(),
            spec,
        })
    }

    /// Verdict for `p` and the fingerprint of `p` itself.
    fn judge(&self, p: &Program) -> Result<(Classification, [usize; 4], String)> {
        match self {
            Judge::Testing { spec, suite, base, fuel, mode } => {
                let outs = run_all(&Executable::of(p, *mode)?, suite, *fuel);
                let r = report_from(spec, suite, base, &outs);
                Ok((classify(&r), [r.n0, r.n1, r.n2, r.n3], fingerprint_outcomes(outs)))
            }
            Judge::Exact { spec, base_cd, dom } => {
                let rel = denote(&p.body, spec.space())?;
                let cd = competence_domain(spec, &rel)?;
                let class = if is_correct(&rel, spec)? {
                    Classification::AbsolutelyCorrect
                } else if base_cd.is_subset(&cd) {
                    if cd.len() > base_cd.len() {
                        Classification::StrictlyMoreCorrect
                    } else {
                        Classification::AsCorrect
                    }
                } else {
                    Classification::NotMoreCorrect
                };
                let both = base_cd.ids().intersection(cd.ids()).count();
                let n = [
                    both,
                    cd.len() - both,
                    dom.ids().iter().filter(|s| !cd.ids().contains(s) && !base_cd.ids().contains(s)).count(),
                    base_cd.len() - both,
                ];
                Ok((class, n, relation_fingerprint(&rel)))
            }
        }
    }
}

fn verdicts(judge: &Judge<'_>, mutants: &[Mutant]) -> Result<Vec<MutantVerdict>> {
    mutants
        .par_iter()
        .map(|m| {
            let (classification, n, fingerprint) = judge.judge(&m.program)?;
            Ok(MutantVerdict {
                ordinal: m.ordinal,
                operator: m.operator,
                statement: m.statement(),
                classification,
                n0: n[0],
                n1: n[1],
                n2: n[2],
                n3: n[3],
                fingerprint,
            })
        })
        .collect()
}

/// Classifies each mutant against `base`, in mutant order. `suite` is
/// required in testing mode and ignored in exact mode.
pub fn classify_mutants(
    base: &Program,
    mutants: &[Mutant],
    spec: &Spec,
    suite: Option<&TestSuite>,
    cfg: &RepairConfig,
) -> Result<Vec<MutantVerdict>> {
    check_space(base, spec)?;
    match cfg.mode {
        ClassMode::Testing => {
            let suite = suite.ok_or_else(|| Error::EmptySuite("testing mode needs a suite".into()))?;
            verdicts(&Judge::testing(base, spec, suite, cfg)?, mutants)
        }
        ClassMode::Exact => {
            let r = spec.enumerate()?;
            verdicts(&Judge::exact(base, &r)?, mutants)
        }
    }
}

fn check_space(p: &Program, spec: &Spec) -> Result<()> {
    if same_layout(&p.space, spec.space()) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

mod program_text {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use crate::toylang::{parse, Program};

    pub fn serialize<S: Serializer>(p: &Program, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&p.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Program, D::Error> {
        let txt = String::deserialize(d)?;
        parse(&txt).map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairNode {
    pub id: usize,
    /// Mutant-ordinal path from the root, e.g. `base.12.28`.
    pub label: String,
    pub parent: Option<usize>,
    pub ordinal: Option<usize>,
    pub depth: usize,
    /// Verdict against the parent; the root carries its own absolute verdict.
    pub classification: Classification,
    pub fingerprint: String,
    #[serde(with = "program_text")]
    pub program: Program,
    pub expanded: bool,
    /// Verdicts of every mutant of this node, when expanded.
    pub mutants: Vec<MutantVerdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub parent: usize,
    pub child: usize,
    pub ordinal: usize,
}

/// A strictly more-correct mutant whose behaviour matches a node already in the tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Merge {
    pub label: String,
    pub into: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairTree {
    pub nodes: Vec<RepairNode>,
    pub edges: Vec<Edge>,
    pub dead_ends: Vec<usize>,
    pub solutions: Vec<usize>,
    /// Strict mutants pruned as revisits.
    pub merged: Vec<Merge>,
    /// As-correct mutants identical to an existing node.
    pub equivalent: Vec<Merge>,
    /// Strict children not expanded because the frontier was full.
    pub truncated: Vec<usize>,
}

impl RepairTree {
    pub fn root(&self) -> &RepairNode {
        &self.nodes[0]
    }

    pub fn children(&self, id: usize) -> impl Iterator<Item = &RepairNode> + '_ {
        self.edges.iter().filter(move |e| e.parent == id).map(|e| &self.nodes[e.child])
    }

    pub fn node(&self, label: &str) -> Option<&RepairNode> {
        self.nodes.iter().find(|n| n.label == label)
    }

    pub fn metrics(&self) -> FaultMetrics {
        FaultMetrics {
            fault_density_lb: self.children(0).count(),
            fault_depth_ub: self.solutions.iter().map(|&s| self.nodes[s].depth).min(),
        }
    }

    /// Root-to-node chain of ids.
    pub fn path(&self, id: usize) -> Vec<usize> {
        let mut out = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultMetrics {
    /// Distinct strictly more-correct single-site mutants of the root.
    pub fault_density_lb: usize,
    /// Shortest path to a solution, if one was found.
    pub fault_depth_ub: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairResult {
    pub tree: RepairTree,
    pub metrics: FaultMetrics,
}

/// Testing-mode fingerprint matches are confirmed by comparing program
/// functions when the space has at most this many states.
const CONFIRM_STATES: u64 = 100_000;

/// The node in `bucket` computing the same thing as `p`. Without `confirm`,
/// equal fingerprints are trusted.
fn revisit(tree: &RepairTree, bucket: Option<&Vec<usize>>, p: &Program, confirm: Option<&Arc<StateSpace>>) -> Result<Option<usize>> {
    for &n in bucket.into_iter().flatten() {
        match confirm {
            None => return Ok(Some(n)),
            Some(space) => {
                if denote(&tree.nodes[n].program.body, space)? == denote(&p.body, space)? {
                    return Ok(Some(n));
                }
            }
        }
    }
    Ok(None)
}

/// Breadth-first climb over strictly more-correct mutants. The level on
/// which the first solution appears is finished, then the search stops.
pub fn repair(base: &Program, spec: &Spec, cfg: &RepairConfig) -> Result<RepairResult> {
    if cfg.max_depth == 0 {
        return Err(Error::Spec("max_depth must be at least 1".into()));
    }
    check_space(base, spec)?;
    let ctx = match cfg.mode {
        ClassMode::Testing => Ctx::Testing(select_tests(spec, Some(base), cfg.selection.clone())?),
        ClassMode::Exact => Ctx::Exact(spec.enumerate()?),
    };
    let (root_class, root_fp) = ctx.root(base, spec, cfg)?;
    let mut tree = RepairTree {
        nodes: vec![RepairNode {
            id: 0,
            label: "base".into(),
            parent: None,
            ordinal: None,
            depth: 0,
            classification: root_class,
            fingerprint: root_fp.clone(),
            program: base.clone(),
            expanded: false,
            mutants: Vec::new(),
        }],
        edges: Vec::new(),
        dead_ends: Vec::new(),
        solutions: Vec::new(),
        merged: Vec::new(),
        equivalent: Vec::new(),
        truncated: Vec::new(),
    };
    if root_class == Classification::AbsolutelyCorrect {
        tree.solutions.push(0);
        let metrics = FaultMetrics {
            fault_density_lb: 0,
            fault_depth_ub: Some(0),
        };
        return Ok(RepairResult { tree, metrics });
    }
    let confirm = match cfg.mode {
        ClassMode::Testing if spec.space().checked_size(CONFIRM_STATES).is_ok() => Some(spec.space().clone()),
        _ => None,
    };
    let mut seen: BTreeMap<String, Vec<usize>> = BTreeMap::from([(root_fp, vec![0])]);
    let mut frontier = vec![0usize];
    for depth in 1..=cfg.max_depth {
        if frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for id in frontier {
            let program = tree.nodes[id].program.clone();
            let mutants = generate(&program, &cfg.operators);
            let judge = ctx.judge(&program, spec, cfg)?;
            let vs = verdicts(&judge, &mutants)?;
            let parent_label = tree.nodes[id].label.clone();
            let mut any_strict = false;
            for (m, v) in mutants.iter().zip(&vs) {
                let label = format!("{parent_label}.{}", m.ordinal);
                match v.classification {
                    Classification::StrictlyMoreCorrect | Classification::AbsolutelyCorrect => {
                        any_strict = true;
                        if let Some(into) = revisit(&tree, seen.get(&v.fingerprint), &m.program, confirm.as_ref())? {
                            tree.merged.push(Merge { label, into });
                            continue;
                        }
                        let child = tree.nodes.len();
                        seen.entry(v.fingerprint.clone()).or_default().push(child);
                        tree.nodes.push(RepairNode {
                            id: child,
                            label,
                            parent: Some(id),
                            ordinal: Some(m.ordinal),
                            depth,
                            classification: v.classification,
                            fingerprint: v.fingerprint.clone(),
                            program: m.program.clone(),
                            expanded: false,
                            mutants: Vec::new(),
                        });
                        tree.edges.push(Edge {
                            parent: id,
                            child,
                            ordinal: m.ordinal,
                        });
                        if v.classification == Classification::AbsolutelyCorrect {
                            tree.solutions.push(child);
                        } else if next.len() < cfg.max_frontier {
                            next.push(child);
                        } else {
                            tree.truncated.push(child);
                        }
                    }
                    Classification::AsCorrect => {
                        if let Some(into) = revisit(&tree, seen.get(&v.fingerprint), &m.program, confirm.as_ref())? {
                            if into != id {
                                tree.equivalent.push(Merge { label, into });
                            }
                        }
                    }
                    Classification::NotMoreCorrect => {}
                }
            }
            if !any_strict {
                tree.dead_ends.push(id);
            }
            let node = &mut tree.nodes[id];
            node.expanded = true;
            node.mutants = vs;
        }
        if !tree.solutions.is_empty() {
            break;
        }
        frontier = next;
    }
    let metrics = tree.metrics();
    Ok(RepairResult { tree, metrics })
}

enum Ctx {
    Testing(TestSuite),
    Exact(Relation),
}

impl Ctx {
    fn judge<'a>(&'a self, p: &Program, spec: &'a Spec, cfg: &RepairConfig) -> Result<Judge<'a>> {
        match self {
            Ctx::Testing(suite) => Judge::testing(p, spec, suite, cfg),
            Ctx::Exact(r) => Judge::exact(p, r),
        }
    }

    /// Absolute verdict and fingerprint of the root.
    fn root(&self, p: &Program, spec: &Spec, cfg: &RepairConfig) -> Result<(Classification, String)> {
        let (correct, fp) = match self {
            Ctx::Testing(_) => {
                let (class, _, fp) = self.judge(p, spec, cfg)?.judge(p)?;
                (class == Classification::AbsolutelyCorrect, fp)
            }
            Ctx::Exact(r) => {
                let rel = denote(&p.body, r.space())?;
                (is_correct(&rel, r)?, relation_fingerprint(&rel))
            }
        };
        let class = if correct {
            Classification::AbsolutelyCorrect
        } else {
            Classification::AsCorrect
        };
        Ok((class, fp))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeFormat {
    Dot,
    Json,
}

fn color(n: &RepairNode, tree: &RepairTree) -> &'static str {
    if tree.solutions.contains(&n.id) {
        "palegreen"
    } else if tree.dead_ends.contains(&n.id) {
        "lightpink"
    } else if n.parent.is_none() {
        "lightgray"
    } else {
        "lightblue"
    }
}

pub fn export_tree(result: &RepairResult, format: TreeFormat) -> Result<String> {
    match format {
        TreeFormat::Json => Ok(serde_json::to_string_pretty(result)?),
        TreeFormat::Dot => {
            let t = &result.tree;
            let mut out = String::from("digraph repair {\n  rankdir=BT;\n  node [style=filled];\n");
            for n in &t.nodes {
                let _ = writeln!(
                    out,
                    "  n{} [label=\"{}\\n{}\", fillcolor={}];",
                    n.id,
                    n.label,
                    n.classification,
                    color(n, t)
                );
            }
            for e in &t.edges {
                let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", e.parent, e.child, e.ordinal);
            }
            out.push_str("}\n");
            Ok(out)
        }
    }
}

pub fn import_tree(json: &str) -> Result<RepairResult> {
    Ok(serde_json::from_str(json)?)
}

/// Fault-removal check for an explicit patch, with both competence domains as evidence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaultCheck {
    pub is_fault_removal: bool,
    pub cd_before: StateSet,
    pub cd_after: StateSet,
    pub patched: Program,
}

pub fn verify_fault(base: &Program, patch: &Patch, spec: &Spec) -> Result<FaultCheck> {
    check_space(base, spec)?;
    let r = spec.enumerate()?;
    let space: &Arc<_> = r.space();
    let patched = apply_patch(base, patch)?;
    let before = denote(&base.body, space)?;
    let after = denote(&patched.body, space)?;
    Ok(FaultCheck {
        is_fault_removal: more_correct(&after, &before, &r, true)?,
        cd_before: competence_domain(&r, &before)?,
        cd_after: competence_domain(&r, &after)?,
        patched,
    })
}

/// Parses a program and checks it against the spec's variables.
pub fn load_program(src: &str, spec: &Spec) -> Result<Program> {
    let p = parse(src)?;
    check_space(&p, spec)?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mutation::{MutationSite, SiteKind};
    use crate::relations::StateSpace;
    use crate::testing::Bounds;
    use crate::toylang::{enclosing_statement, visit_exprs, ArithOp, Expr};

    const CORRECT: &str = include_str!("../fixtures/fermat_correct.imp");

    fn fermat_spec() -> Spec {
        let space: StateSpace =
            serde_json::from_str(r#"{"vars":[{"name":"n"},{"name":"x"},{"name":"y"}]}"#).unwrap();
        Spec::predicate(space, "(n%2==1)||(n%4==0)", "n == x'*x' - y'*y'").unwrap()
    }

    fn small_cfg() -> RepairConfig {
        RepairConfig {
            selection: Selection::Exhaustive {
                bounds: Bounds::default().with("n", 1, 40),
            },
            max_depth: 2,
            ..Default::default()
        }
    }

    #[test]
    fn correct_base_is_its_own_solution() {
        let p = parse(CORRECT).unwrap();
        let r = repair(&p, &fermat_spec(), &small_cfg()).unwrap();
        assert_eq!(r.tree.nodes.len(), 1);
        assert_eq!(r.tree.solutions, vec![0]);
        assert_eq!(r.metrics, FaultMetrics { fault_density_lb: 0, fault_depth_ub: Some(0) });
    }

    #[test]
    fn suite_twins_merge_only_when_functions_agree() {
        // both `x + 1` and `x + 2` mutants give 1 on the only test input, x = 0
        let src = |decl: &str| format!("{decl}\nx = (x - 1) + (x * 2);\n");
        let run = |decl: &str| {
            let p = parse(&src(decl)).unwrap();
            let spec = Spec::predicate(p.space.clone(), "x == 0", "x' == 1").unwrap();
            repair(&p, &spec, &RepairConfig { max_depth: 1, ..Default::default() }).unwrap()
        };
        let finite = run("int x in 0..7;");
        assert_eq!(finite.tree.solutions.len(), 2);
        assert!(finite.tree.merged.is_empty());
        let wide = run("int x;");
        assert_eq!(wide.tree.solutions.len(), 1);
        assert_eq!(wide.tree.merged.len(), 1);
    }

    #[test]
    fn one_seeded_fault_is_found_at_depth_one() {
        let good = parse(CORRECT).unwrap();
        // flip the `+` before the literal in the first loop body
        let text = good.to_string().replacen("r = r + 2 * x + 1;", "r = r + 2 * x - 1;", 1);
        let seeded = parse(&text).unwrap();
        assert_ne!(seeded, good);
        let r = repair(&seeded, &fermat_spec(), &small_cfg()).unwrap();
        assert_eq!(r.metrics.fault_depth_ub, Some(1));
        let sol = &r.tree.nodes[r.tree.solutions[0]];
        assert_eq!(sol.program, good);
        assert_eq!(sol.classification, Classification::AbsolutelyCorrect);
    }

    #[test]
    fn classify_mutants_of_a_correct_base() {
        let p = parse(CORRECT).unwrap();
        let spec = fermat_spec();
        let cfg = small_cfg();
        let suite = select_tests(&spec, None, cfg.selection.clone()).unwrap();
        let ms = generate(&p, &cfg.operators);
        let vs = classify_mutants(&p, &ms, &spec, Some(&suite), &cfg).unwrap();
        assert_eq!(vs.len(), 48);
        assert!(vs.iter().all(|v| v.classification != Classification::StrictlyMoreCorrect));
        assert!(vs.iter().enumerate().all(|(i, v)| v.ordinal == i + 1));
    }

    #[test]
    fn exports() {
        let p = parse(CORRECT).unwrap();
        let r = repair(&p, &fermat_spec(), &small_cfg()).unwrap();
        let dot = export_tree(&r, TreeFormat::Dot).unwrap();
        assert_eq!(dot.matches("[label=").count(), 1);
        assert!(!dot.contains("->"));
        let json = export_tree(&r, TreeFormat::Json).unwrap();
        assert_eq!(import_tree(&json).unwrap(), r);
    }

    fn arraysum() -> (Program, Spec) {
        let p = parse(include_str!("../fixtures/arraysum.imp")).unwrap();
        let spec = Spec::predicate(p.space.clone(), "true", "x' == a[1] + a[2] + a[3]").unwrap();
        (p, spec)
    }

    fn site(p: &Program, kind: SiteKind, text: &str, stmt: &str) -> MutationSite {
        let mut hit = None;
        visit_exprs(&p.body, &mut |e, ctx| {
            let ok = match kind {
                SiteKind::IntLiteral => matches!(e, Expr::Lit(_)),
                SiteKind::ArrayIndex => ctx.is_subscript,
                SiteKind::BinaryArith => matches!(e, Expr::Bin(..)),
            };
            if hit.is_none() && ok && e.to_string() == text && enclosing_statement(&p.body, ctx.index).as_deref() == Some(stmt) {
                hit = Some(MutationSite { path: ctx.index, kind });
            }
        });
        hit.unwrap()
    }

    #[test]
    fn arraysum_fault_removals() {
        let (p, spec) = arraysum();
        let i0 = site(&p, SiteKind::IntLiteral, "0", "i = 0;");
        let lim = site(&p, SiteKind::IntLiteral, "3", "while (i < 3)");
        let idx = site(&p, SiteKind::ArrayIndex, "i", "x = x + a[i];");
        let s1 = Patch::new(vec![(i0, Expr::Lit(1)), (lim, Expr::Lit(4))]);
        let s2 = Patch::single(idx, Expr::bin(ArithOp::Add, Expr::var("i"), Expr::Lit(1)));
        let f1 = verify_fault(&p, &s1, &spec).unwrap();
        assert!(f1.is_fault_removal);
        // cd_before is {a[0] = a[3]}: 3 choices for a[0]..a[2], x and i free
        assert_eq!(f1.cd_before.len(), 27 * 7 * 5);
        assert_eq!(f1.cd_after.len(), 81 * 7 * 5);
        assert!(verify_fault(&p, &s2, &spec).unwrap().is_fault_removal);
        assert!(!verify_fault(&p, &Patch::single(i0, Expr::Lit(1)), &spec).unwrap().is_fault_removal);
        assert!(!verify_fault(&p, &Patch::single(lim, Expr::Lit(4)), &spec).unwrap().is_fault_removal);
    }

    #[test]
    fn exact_mode_repair_on_arraysum() {
        let (p, spec) = arraysum();
        let cfg = RepairConfig {
            operators: vec![Operator::LiteralPm1, Operator::IndexPm1],
            mode: ClassMode::Exact,
            exec: Mode::Exact,
            max_depth: 2,
            ..Default::default()
        };
        let r = repair(&p, &spec, &cfg).unwrap();
        assert_eq!(r.metrics.fault_depth_ub, Some(1));
        let sol = &r.tree.nodes[r.tree.solutions[0]];
        assert!(sol.program.body.to_string().contains("a[i + 1]"));
    }
}

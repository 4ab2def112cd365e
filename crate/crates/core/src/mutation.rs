//! Single-site mutant generation over program ASTs: arithmetic operator
//! replacement (AORB), integer literal ±1 and array index ±1; multi-site
//! patches; behavioural fingerprints.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::relations::{Relation, State};
use crate::toylang::{
    enclosing_statement, parse_expr, replace_expr, visit_exprs, ArithOp, Executable, Expr, Mode, Outcome,
    Program, Stmt,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SiteKind {
    #[serde(rename = "binary-arith-op")]
    BinaryArith,
    #[serde(rename = "integer-literal")]
    IntLiteral,
    #[serde(rename = "array-index")]
    ArrayIndex,
}

impl SiteKind {
    pub const ALL: [SiteKind; 3] = [SiteKind::BinaryArith, SiteKind::IntLiteral, SiteKind::ArrayIndex];
}

impl fmt::Display for SiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SiteKind::BinaryArith => "binary-arith-op",
            SiteKind::IntLiteral => "integer-literal",
            SiteKind::ArrayIndex => "array-index",
        })
    }
}

/// An expression node, addressed by its preorder number in the program body.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MutationSite {
    pub path: usize,
    pub kind: SiteKind,
}

fn kinds_of(e: &Expr, is_subscript: bool) -> impl Iterator<Item = SiteKind> {
    let k = [
        matches!(e, Expr::Bin(..)).then_some(SiteKind::BinaryArith),
        matches!(e, Expr::Lit(_)).then_some(SiteKind::IntLiteral),
        is_subscript.then_some(SiteKind::ArrayIndex),
    ];
    k.into_iter().flatten()
}

/// Matching nodes in preorder; a node matching several kinds yields one site per kind.
pub fn sites(p: &Program, kinds: &[SiteKind]) -> Vec<MutationSite> {
    let mut out = Vec::new();
    visit_exprs(&p.body, &mut |e, ctx| {
        for kind in kinds_of(e, ctx.is_subscript) {
            if kinds.contains(&kind) {
                out.push(MutationSite { path: ctx.index, kind });
            }
        }
    });
    out
}

fn node_at(body: &Stmt, path: usize) -> Option<(Expr, bool)> {
    let mut hit = None;
    visit_exprs(body, &mut |e, ctx| {
        if ctx.index == path {
            hit = Some((e.clone(), ctx.is_subscript));
        }
    });
    hit
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operator {
    #[serde(rename = "AORB")]
    Aorb,
    #[serde(rename = "LIT")]
    LiteralPm1,
    #[serde(rename = "IDX")]
    IndexPm1,
}

impl Operator {
    pub fn kind(self) -> SiteKind {
        match self {
            Operator::Aorb => SiteKind::BinaryArith,
            Operator::LiteralPm1 => SiteKind::IntLiteral,
            Operator::IndexPm1 => SiteKind::ArrayIndex,
        }
    }

    /// Replacement nodes for `e`, in generation order.
    pub fn replacements(self, e: &Expr) -> Vec<Expr> {
        match (self, e) {
            (Operator::Aorb, Expr::Bin(op, l, r)) => ArithOp::ALL
                .iter()
                .filter(|o| *o != op)
                .map(|o| Expr::Bin(*o, l.clone(), r.clone()))
                .collect(),
            (Operator::LiteralPm1, Expr::Lit(k)) => [k.checked_add(1), k.checked_sub(1)]
                .into_iter()
                .flatten()
                .map(Expr::Lit)
                .collect(),
            (Operator::IndexPm1, e) => [ArithOp::Add, ArithOp::Sub]
                .into_iter()
                .map(|op| Expr::bin(op, e.clone(), Expr::Lit(1)))
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn parse_list(s: &str) -> Result<Vec<Operator>> {
        s.split(',')
            .map(|t| match t.trim().to_ascii_lowercase().as_str() {
                "aorb" => Ok(Operator::Aorb),
                "lit" | "literal" => Ok(Operator::LiteralPm1),
                "idx" | "index" => Ok(Operator::IndexPm1),
                other => Err(Error::Format(format!("unknown mutation operator `{other}`"))),
            })
            .collect()
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::Aorb => "AORB",
            Operator::LiteralPm1 => "LIT",
            Operator::IndexPm1 => "IDX",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mutant {
    pub ordinal: usize,
    pub site: MutationSite,
    pub operator: Operator,
    pub replacement: Expr,
    pub program: Program,
}

impl Mutant {
    /// Source text of the mutated statement or condition.
    pub fn statement(&self) -> String {
        enclosing_statement(&self.program.body, self.site.path).unwrap_or_default()
    }

    pub fn record(&self) -> MutantRecord {
        MutantRecord {
            ordinal: self.ordinal,
            path: self.site.path,
            kind: self.site.kind,
            operator: self.operator,
            replacement: self.replacement.to_string(),
            statement: self.statement(),
        }
    }
}

/// One line of the mutant manifest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantRecord {
    pub ordinal: usize,
    pub path: usize,
    pub kind: SiteKind,
    pub operator: Operator,
    pub replacement: String,
    pub statement: String,
}

/// All single-site mutants, numbered from 1 in (site preorder, operator, replacement) order.
pub fn generate(p: &Program, operators: &[Operator]) -> Vec<Mutant> {
    let mut nodes = Vec::new();
    visit_exprs(&p.body, &mut |e, ctx| nodes.push((ctx.index, e.clone(), ctx.is_subscript)));
    let mut out = Vec::new();
    for (path, e, sub) in nodes {
        for &op in operators {
            if !kinds_of(&e, sub).any(|k| k == op.kind()) {
                continue;
            }
            for rep in op.replacements(&e) {
                let body = replace_expr(&p.body, path, &mut |_| rep.clone())
                    .expect("site taken from the same body");
                out.push(Mutant {
                    ordinal: out.len() + 1,
                    site: MutationSite { path, kind: op.kind() },
                    operator: op,
                    replacement: rep,
                    program: Program {
                        space: p.space.clone(),
                        body,
                    },
                });
            }
        }
    }
    out
}

/// A simultaneous multi-site substitution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Patch {
    pub substitutions: Vec<(MutationSite, Expr)>,
}

impl Patch {
    pub fn new(substitutions: Vec<(MutationSite, Expr)>) -> Self {
        Patch { substitutions }
    }

    pub fn single(site: MutationSite, e: Expr) -> Self {
        Patch::new(vec![(site, e)])
    }
}

fn subtree_len(e: &Expr) -> usize {
    match e {
        Expr::Lit(_) | Expr::Var(_) => 1,
        Expr::Index(_, i) | Expr::Neg(i) => 1 + subtree_len(i),
        Expr::Bin(_, l, r) => 1 + subtree_len(l) + subtree_len(r),
    }
}

pub fn apply_patch(p: &Program, patch: &Patch) -> Result<Program> {
    let mut spans = Vec::new();
    for (site, _) in &patch.substitutions {
        let (node, sub) = node_at(&p.body, site.path)
            .ok_or_else(|| Error::Patch(format!("no expression node at {}", site.path)))?;
        if !kinds_of(&node, sub).any(|k| k == site.kind) {
            return Err(Error::Patch(format!("node {} (`{node}`) is not a {}", site.path, site.kind)));
        }
        spans.push((site.path, site.path + subtree_len(&node)));
    }
    spans.sort_unstable();
    if spans.windows(2).any(|w| w[1].0 < w[0].1) {
        return Err(Error::Patch("substitution sites overlap".into()));
    }
    // rewriting from the highest path down leaves lower numbers intact
    let mut subs: Vec<&(MutationSite, Expr)> = patch.substitutions.iter().collect();
    subs.sort_by_key(|s| std::cmp::Reverse(s.0.path));
    let mut body = p.body.clone();
    for (site, rep) in subs {
        body = replace_expr(&body, site.path, &mut |_| rep.clone()).expect("node checked above");
    }
    Ok(Program {
        space: p.space.clone(),
        body,
    })
}

/// A site named by source text: the enclosing statement (or `while (..)` /
/// `if (..)` header), the node's own text, and its kind. The first match in
/// preorder is used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteRef {
    pub statement: String,
    pub node: String,
    pub kind: SiteKind,
}

pub fn locate(p: &Program, r: &SiteRef) -> Result<MutationSite> {
    let mut hit = None;
    visit_exprs(&p.body, &mut |e, ctx| {
        if hit.is_none()
            && e.to_string() == r.node
            && kinds_of(e, ctx.is_subscript).any(|k| k == r.kind)
            && enclosing_statement(&p.body, ctx.index).as_deref() == Some(r.statement.as_str())
        {
            hit = Some(MutationSite { path: ctx.index, kind: r.kind });
        }
    });
    hit.ok_or_else(|| Error::Patch(format!("no {} `{}` in `{}`", r.kind, r.node, r.statement)))
}

/// Serialized patch: each substitution names its site and gives replacement source text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchSpec {
    pub substitutions: Vec<SubstitutionSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionSpec {
    #[serde(flatten)]
    pub site: SiteRef,
    pub replacement: String,
}

impl PatchSpec {
    pub fn resolve(&self, p: &Program) -> Result<Patch> {
        self.substitutions
            .iter()
            .map(|s| Ok((locate(p, &s.site)?, parse_expr(&s.replacement, &p.space)?)))
            .collect::<Result<Vec<_>>>()
            .map(Patch::new)
    }
}

fn digest(h: Sha256) -> String {
    hex::encode(h.finalize())
}

/// SHA-256 over the outcomes of `p` on `probe`; equal digests flag behaviourally identical programs.
pub fn semantic_fingerprint(p: &Program, probe: &[State], fuel: u64, mode: Mode) -> Result<String> {
    let exe = Executable::of(p, mode)?;
    Ok(fingerprint_outcomes(probe.iter().map(|s| exe.run(&s.slots, fuel))))
}

pub fn fingerprint_outcomes(outs: impl IntoIterator<Item = Outcome>) -> String {
    let mut h = Sha256::new();
    for o in outs {
        match o {
            Outcome::Final { state } => {
                h.update([0u8]);
                for v in state {
                    h.update(v.to_le_bytes());
                }
            }
            // all failures look alike to the oracle
            Outcome::NonTermination | Outcome::Undefined { .. } => h.update([1u8]),
        }
    }
    digest(h)
}

/// Digest of an exact program function; equal digests mean equal relations.
pub fn relation_fingerprint(r: &Relation) -> String {
    let mut h = Sha256::new();
    for &(s, t) in r.pairs() {
        h.update((s as u64).to_le_bytes());
        h.update((t as u64).to_le_bytes());
    }
    digest(h)
}

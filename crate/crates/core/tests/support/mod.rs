#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;
use std::sync::Arc;

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestError, TestRunner};

use relcor::mutation::{generate, Operator};
use relcor::relations::{competence_domain, is_correct, more_correct, Relation, StateSpace};
use relcor::repair::{classify_mutants, ClassMode, RepairConfig};
use relcor::specs::Spec;
use relcor::testing::{select_tests, Bounds, Selection};
use relcor::toylang::{denote_program, execute, parse, Mode, Outcome};

pub type Pairs = BTreeSet<(usize, usize)>;

pub fn runner(cases: u32, seed: u64) -> TestRunner {
    TestRunner::new(Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    })
}

/// Runs `test` on `cases` values; returns the number of cases run.
pub fn check<S, F>(cases: u32, seed: u64, strategy: S, test: F) -> Result<u32, String>
where
    S: Strategy,
    S::Value: Debug,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    let mut r = runner(cases, seed);
    match r.run(&strategy, test) {
        Ok(()) => Ok(cases),
        Err(TestError::Fail(why, v)) => Err(format!("{why}: {v:?}")),
        Err(TestError::Abort(why)) => Err(why.to_string()),
    }
}

/// Draws `n` values without shrinking, for tests that want the values themselves.
pub fn sample<S: Strategy>(n: usize, seed: u64, strategy: S) -> Vec<S::Value> {
    let mut r = runner(n as u32, seed);
    (0..n)
        .map(|_| strategy.new_tree(&mut r).expect("strategy").current())
        .collect()
}

pub fn space(n: usize) -> Arc<StateSpace> {
    Arc::new(StateSpace::scalar("s", 0, n as i64 - 1).unwrap())
}

pub fn rel(n: usize, pairs: &Pairs) -> Relation {
    Relation::from_ids(space(n), pairs.clone())
}

pub fn pairs_on(n: usize) -> impl Strategy<Value = Pairs> {
    prop::collection::btree_set((0..n, 0..n), 0..=n * n)
}

pub fn function_on(n: usize) -> impl Strategy<Value = Pairs> {
    prop::collection::vec(prop::option::weighted(0.8, 0..n), n)
        .prop_map(|img| img.into_iter().enumerate().filter_map(|(s, t)| t.map(|t| (s, t))).collect())
}

fn images(p: &Pairs, s: usize) -> BTreeSet<usize> {
    p.iter().filter(|&&(a, _)| a == s).map(|&(_, b)| b).collect()
}

fn dom(p: &Pairs) -> BTreeSet<usize> {
    p.iter().map(|&(s, _)| s).collect()
}

/// `q` refines `r`: larger domain, fewer images on `r`'s domain.
pub fn refines_oracle(q: &Pairs, r: &Pairs) -> bool {
    dom(r)
        .into_iter()
        .all(|s| !images(q, s).is_empty() && images(q, s).is_subset(&images(r, s)))
}

pub fn cd_oracle(spec: &Pairs, p: &Pairs) -> BTreeSet<usize> {
    p.intersection(spec).map(|&(s, _)| s).collect()
}

/// Shrinks images of `r` on its domain and adds arbitrary images elsewhere.
pub fn refinement_of(n: usize, r: &Pairs, bits: &[u32]) -> Pairs {
    let d = dom(r);
    let mut out = Pairs::new();
    for s in 0..n {
        let mask = bits[s % bits.len()];
        if d.contains(&s) {
            let img: Vec<usize> = images(r, s).into_iter().collect();
            let mut kept: Vec<usize> = img
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &t)| t)
                .collect();
            if kept.is_empty() {
                kept.push(img[mask as usize % img.len()]);
            }
            out.extend(kept.into_iter().map(|t| (s, t)));
        } else {
            out.extend((0..n).filter(|t| mask >> (t + 8) & 1 == 1).map(|t| (s, t)));
        }
    }
    out
}

/// A deterministic program correct for `r`.
pub fn correct_function(n: usize, r: &Pairs, bits: &[u32]) -> Pairs {
    let d = dom(r);
    (0..n)
        .filter_map(|s| {
            let mask = bits[s % bits.len()] as usize;
            if d.contains(&s) {
                let img: Vec<usize> = images(r, s).into_iter().collect();
                Some((s, img[mask % img.len()]))
            } else if mask & 1 == 1 {
                Some((s, (mask >> 1) % n))
            } else {
                None
            }
        })
        .collect()
}

pub fn refinement_laws(cases: u32, seed: u64) -> Result<u32, String> {
    let strat = (1usize..=5).prop_flat_map(|n| {
        (
            Just(n),
            pairs_on(n),
            pairs_on(n),
            prop::collection::vec(any::<u32>(), n),
            prop::collection::vec(any::<u32>(), n),
        )
    });
    check(cases, seed, strat, |(n, a, b, m1, m2)| {
        let ra = rel(n, &a);
        let rb = rel(n, &b);
        prop_assert!(ra.refines(&ra).unwrap(), "reflexivity");
        let ab = ra.refines(&rb).unwrap();
        prop_assert_eq!(ab, refines_oracle(&a, &b));
        if ab && rb.refines(&ra).unwrap() {
            prop_assert_eq!(&a, &b, "antisymmetry");
        }
        // a chain c ⊒ q ⊒ b, built so the transitivity check is never vacuous
        let q = refinement_of(n, &b, &m1);
        let c = refinement_of(n, &q, &m2);
        let (rq, rc) = (rel(n, &q), rel(n, &c));
        prop_assert!(rq.refines(&rb).unwrap());
        prop_assert!(rc.refines(&rq).unwrap());
        prop_assert!(rc.refines(&rb).unwrap(), "transitivity");
        if ab && rb.refines(&rq).unwrap() {
            prop_assert!(ra.refines(&rq).unwrap());
        }
        Ok(())
    })
}

pub fn correctness_equivalence(cases: u32, seed: u64) -> Result<u32, String> {
    let strat = (1usize..=5).prop_flat_map(|n| (Just(n), pairs_on(n), function_on(n)));
    check(cases, seed, strat, |(n, r, p)| {
        let (rr, rp) = (rel(n, &r), rel(n, &p));
        let cd = competence_domain(&rr, &rp).unwrap();
        prop_assert_eq!(cd.ids(), &cd_oracle(&r, &p));
        let refines = rp.refines(&rr).unwrap();
        prop_assert_eq!(refines, cd.ids() == &dom(&r));
        prop_assert_eq!(refines, is_correct(&rp, &rr).unwrap());
        Ok(())
    })
}

pub fn relative_order_laws(cases: u32, seed: u64) -> Result<u32, String> {
    let strat =
        (1usize..=5).prop_flat_map(|n| (Just(n), pairs_on(n), function_on(n), function_on(n), function_on(n)));
    check(cases, seed, strat, |(n, r, p, q, t)| {
        let rr = rel(n, &r);
        let (rp, rq, rt) = (rel(n, &p), rel(n, &q), rel(n, &t));
        prop_assert!(more_correct(&rp, &rp, &rr, false).unwrap());
        prop_assert!(!more_correct(&rp, &rp, &rr, true).unwrap());
        let pq = more_correct(&rp, &rq, &rr, false).unwrap();
        prop_assert_eq!(pq, cd_oracle(&r, &q).is_subset(&cd_oracle(&r, &p)));
        if pq && more_correct(&rq, &rt, &rr, false).unwrap() {
            prop_assert!(more_correct(&rp, &rt, &rr, false).unwrap(), "transitivity");
        }
        Ok(())
    })
}

pub fn correct_dominates(cases: u32, seed: u64) -> Result<u32, String> {
    let strat = (1usize..=5).prop_flat_map(|n| {
        (
            Just(n),
            pairs_on(n),
            prop::collection::vec(any::<u32>(), n),
            function_on(n),
        )
    });
    check(cases, seed, strat, |(n, r, bits, p)| {
        let rr = rel(n, &r);
        let good = rel(n, &correct_function(n, &r, &bits));
        prop_assert!(is_correct(&good, &rr).unwrap());
        prop_assert!(more_correct(&good, &rel(n, &p), &rr, false).unwrap());
        Ok(())
    })
}

/// Source of a random loop-free or shallow-loop program over three small
/// variables.
#[derive(Clone, Debug)]
pub struct RandProgram {
    pub sizes: [i64; 3],
    pub body: String,
}

impl RandProgram {
    pub fn source(&self) -> String {
        let [a, b, c] = self.sizes;
        format!("int x in 0..{}; int y in 0..{}; int z in 0..{};\n{}", a - 1, b - 1, c - 1, self.body)
    }

    pub fn states(&self) -> usize {
        self.sizes.iter().product::<i64>() as usize
    }
}

const VARS: [&str; 3] = ["x", "y", "z"];

pub fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        3 => prop::sample::select(&VARS[..]).prop_map(str::to_string),
        2 => (0i64..4).prop_map(|v| v.to_string()),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        (inner.clone(), prop::sample::select(&["+", "-", "*", "/", "%"][..]), inner)
            .prop_map(|(l, op, r)| format!("({l} {op} {r})"))
    })
}

pub fn cond() -> impl Strategy<Value = String> {
    let cmp = (expr(), prop::sample::select(&["<", "<=", "==", "!=", ">", ">="][..]), expr())
        .prop_map(|(l, op, r)| format!("{l} {op} {r}"));
    cmp.prop_recursive(1, 3, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|c| format!("!({c})")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("({a}) && ({b})")),
        ]
    })
}

pub fn assign() -> impl Strategy<Value = String> {
    (prop::sample::select(&VARS[..]), expr()).prop_map(|(v, e)| format!("{v} = {e};"))
}

pub fn simple_stmt() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => assign(),
        2 => (cond(), assign(), assign()).prop_map(|(c, a, b)| format!("if ({c}) {{ {a} }} else {{ {b} }}")),
        1 => (cond(), assign()).prop_map(|(c, a)| format!("if ({c}) {a}")),
        1 => Just("skip;".to_string()),
    ]
}

fn top_stmt() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => simple_stmt(),
        1 => (cond(), prop::collection::vec(simple_stmt(), 1..3))
            .prop_map(|(c, b)| format!("while ({c}) {{ {} }}", b.join(" "))),
        1 => (prop::sample::select(&VARS[..]), prop::collection::vec(simple_stmt(), 0..2))
            .prop_map(|(v, b)| format!("while ({v} > 0) {{ {v} = {v} - 1; {} }}", b.join(" "))),
    ]
}

/// Sizes bounded so the space has at most 500 states; loops never nest.
pub fn program() -> impl Strategy<Value = RandProgram> {
    (
        [2i64..=8, 2i64..=8, 2i64..=7],
        assign(),
        prop::collection::vec(top_stmt(), 0..4),
    )
        .prop_filter("at most 500 states", |(s, _, _)| s.iter().product::<i64>() <= 500)
        .prop_map(|(sizes, first, rest)| {
            let mut body = vec![first];
            body.extend(rest);
            RandProgram { sizes, body: body.join("\n") }
        })
}

/// Enough fuel for any terminating run: each of at most four sequential,
/// non-nested loops visits each state at most once.
pub fn fuel_for(p: &RandProgram) -> u64 {
    4 * p.states() as u64 + 4
}

pub fn denote_execute_agree(cases: u32, seed: u64) -> Result<u32, String> {
    check(cases, seed, program(), |rp| {
        let p = parse(&rp.source()).map_err(|e| TestCaseError::fail(format!("parse: {e}")))?;
        let r = denote_program(&p).map_err(|e| TestCaseError::fail(format!("denote: {e}")))?;
        prop_assert!(r.is_deterministic());
        let succ = r.successors();
        let fuel = fuel_for(&rp);
        for id in 0..rp.states() {
            let s = p.space.state(id);
            let out = execute(&p, &s, fuel).unwrap();
            let img = succ.get(&id).cloned().unwrap_or_default();
            match out {
                Outcome::Final { state } => {
                    let t = p.space.index(&relcor::relations::State::new(state));
                    prop_assert_eq!(img, vec![t], "state {}", p.space.render(&s));
                }
                _ => prop_assert!(img.is_empty(), "state {} has an image but {:?}", p.space.render(&s), out),
            }
        }
        Ok(())
    })
}

/// Spec `v' == e` on a random variable, restricted to where `e` is defined
/// and fits `v`, so every state in the domain has an image.
pub fn spec_text() -> impl Strategy<Value = (String, usize, String)> {
    (prop_oneof![1 => Just("true".to_string()), 1 => cond()], 0..3usize, expr())
}

pub fn spec_for(rp: &RandProgram, (d, v, e): &(String, usize, String)) -> (String, String) {
    let max = rp.sizes[*v] - 1;
    (format!("({d}) && 0 <= {e} && {e} <= {max}"), format!("{}' == {e}", VARS[*v]))
}

pub fn testing_exact_agree(cases: u32, seed: u64) -> Result<u32, String> {
    let strat = (program(), spec_text(), any::<prop::sample::Index>());
    check(cases, seed, strat, |(rp, st, pick)| {
        let p = parse(&rp.source()).unwrap();
        let (d, rl) = spec_for(&rp, &st);
        let spec = Spec::predicate(p.space.clone(), &d, &rl).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let mutants = generate(&p, &[Operator::Aorb, Operator::LiteralPm1]);
        prop_assume!(!mutants.is_empty());
        let m = &mutants[pick.index(mutants.len())..][..1];
        let fuel = fuel_for(&rp);
        let in_dom = (0..rp.states()).filter(|&id| spec.in_dom(&p.space.state(id))).count();
        prop_assume!(in_dom > 0);
        let suite = select_tests(&spec, None, Selection::Exhaustive { bounds: Bounds::default() }).unwrap();
        prop_assert_eq!(suite.inputs.len(), in_dom);
        let base = RepairConfig { fuel, exec: Mode::Exact, ..RepairConfig::default() };
        let testing = classify_mutants(&p, m, &spec, Some(&suite), &base).unwrap();
        let exact = classify_mutants(&p, m, &spec, None, &RepairConfig { mode: ClassMode::Exact, ..base }).unwrap();
        prop_assert_eq!(testing[0].classification, exact[0].classification);
        Ok(())
    })
}

pub fn classification_histogram(cases: usize, seed: u64) -> BTreeMap<String, usize> {
    let mut h = BTreeMap::new();
    for (rp, st, pick) in sample(cases, seed, (program(), spec_text(), any::<prop::sample::Index>())) {
        let p = parse(&rp.source()).unwrap();
        let (d, rl) = spec_for(&rp, &st);
        let spec = Spec::predicate(p.space.clone(), &d, &rl).unwrap();
        let mutants = generate(&p, &[Operator::Aorb, Operator::LiteralPm1]);
        if mutants.is_empty() {
            continue;
        }
        let m = &mutants[pick.index(mutants.len())..][..1];
        let cfg = RepairConfig { mode: ClassMode::Exact, ..RepairConfig::default() };
        let v = classify_mutants(&p, m, &spec, None, &cfg).unwrap();
        *h.entry(v[0].classification.to_string()).or_insert(0) += 1;
    }
    h
}

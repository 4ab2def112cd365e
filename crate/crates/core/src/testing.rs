//! Testing for relative correctness: the relative oracle
//! `Ω(s, s') = ω(s, P(s)) ⇒ ω(s, s')`, test-data selection, and suite runs
//! that reproduce the cumulative `abs`/`rel`/`strict` flags and the
//! N0/N1/N2 coverage partition.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relations::{competence_domain, State, StateSpace};
use crate::specs::{OracleVerdict, Spec};
use crate::toylang::{denote, Executable, Mode, Outcome, Program};

/// `Ω`: passes unless the base satisfies the spec on `s` and the candidate does not.
pub fn rel_oracle(spec: &Spec, base_out: &Outcome, s: &State, cand_out: &Outcome) -> OracleVerdict {
    let base = spec.abs_oracle(s, base_out);
    let cand = spec.abs_oracle(s, cand_out);
    OracleVerdict {
        passed: !base.passed || cand.passed,
        vacuous: base.vacuous,
    }
}

/// Per-variable value ranges for generated inputs. Variables without a
/// range use their declared interval when it is bounded, and 0 otherwise.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds(pub BTreeMap<String, (i64, i64)>);

impl Bounds {
    pub fn with(mut self, var: &str, lo: i64, hi: i64) -> Self {
        self.0.insert(var.to_string(), (lo, hi));
        self
    }

    fn slot_ranges(&self, space: &StateSpace) -> Result<Vec<(i64, i64)>> {
        for name in self.0.keys() {
            if space.position(name).is_none() {
                return Err(Error::Undeclared(name.clone()));
            }
        }
        let mut out = Vec::with_capacity(space.width());
        for v in space.vars() {
            let elem = v.domain.elem();
            let r = match self.0.get(&v.name) {
                Some(&(lo, hi)) if lo <= hi => (lo, hi),
                Some(&(lo, hi)) => {
                    return Err(Error::InvalidSpace(format!("empty range {lo}..{hi} for `{}`", v.name)))
                }
                None if elem.is_machine() => (0, 0),
                None => (elem.min, elem.max),
            };
            out.extend(std::iter::repeat_n(r, v.domain.width()));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum Selection {
    /// Every state in the bounded box that lies in `dom(R)`, in canonical order.
    Exhaustive {
        #[serde(default)]
        bounds: Bounds,
    },
    /// `count` draws (with replacement) from the box, rejection-sampled
    /// against `dom(R)` with a ChaCha8 generator seeded by `seed`.
    Random {
        seed: u64,
        count: usize,
        #[serde(default)]
        bounds: Bounds,
    },
    /// The competence domain of the base program (exact mode only).
    CompetenceDomainOfBase,
    /// Inputs read from a `name=value` file, one state per line.
    File { path: String },
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selection::Exhaustive { .. } => write!(f, "exhaustive"),
            Selection::Random { seed, count, .. } => write!(f, "random(seed={seed}, count={count})"),
            Selection::CompetenceDomainOfBase => write!(f, "competence domain of base"),
            Selection::File { path } => write!(f, "file {path}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestSuite {
    pub inputs: Vec<State>,
    pub selection: Selection,
}

const BOX_CAP: u128 = 10_000_000;

fn box_states(ranges: &[(i64, i64)]) -> Result<Vec<Vec<i64>>> {
    let total = ranges
        .iter()
        .try_fold(1u128, |acc, (lo, hi)| acc.checked_mul((*hi as i128 - *lo as i128 + 1) as u128));
    match total {
        Some(n) if n <= BOX_CAP => {}
        other => {
            return Err(Error::Capacity {
                what: "exhaustive test box",
                needed: other.map_or_else(|| "overflow".into(), |n| n.to_string()),
                cap: BOX_CAP as u64,
            })
        }
    }
    let mut out = Vec::new();
    let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        out.push(cur.clone());
        let mut k = ranges.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if cur[k] < ranges[k].1 {
                cur[k] += 1;
                break;
            }
            cur[k] = ranges[k].0;
        }
    }
}

/// Builds a test suite. `base` is needed only for `CompetenceDomainOfBase`.
pub fn select_tests(spec: &Spec, base: Option<&Program>, selection: Selection) -> Result<TestSuite> {
    let space = spec.space();
    let inputs: Vec<State> = match &selection {
        Selection::Exhaustive { bounds } => box_states(&bounds.slot_ranges(space)?)?
            .into_iter()
            .map(State::new)
            .filter(|s| spec.in_dom(s))
            .collect(),
        Selection::Random { seed, count, bounds } => {
            let ranges = bounds.slot_ranges(space)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let budget = (*count as u64).saturating_mul(1000).max(10_000);
            let mut out = Vec::with_capacity(*count);
            let mut tries = 0u64;
            while out.len() < *count {
                if tries == budget {
                    return Err(Error::EmptySuite(format!(
                        "only {} of {count} inputs found in dom(R) after {budget} draws",
                        out.len()
                    )));
                }
                tries += 1;
                let s = State::new(ranges.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect());
                if spec.in_dom(&s) {
                    out.push(s);
                }
            }
            out
        }
        Selection::CompetenceDomainOfBase => {
            let base = base.ok_or_else(|| {
                Error::EmptySuite("competence-domain selection needs a base program".into())
            })?;
            let r = spec.enumerate()?;
            let p = denote(&base.body, space)?;
            competence_domain(&r, &p)?.states().collect()
        }
        Selection::File { path } => read_inputs(Path::new(path), space)?,
    };
    if inputs.is_empty() {
        return Err(Error::EmptySuite(format!("{selection} selected nothing")));
    }
    Ok(TestSuite { inputs, selection })
}

/// Reads one `name=value ...` state per line; blank lines and `#` comments are skipped.
pub fn read_inputs(path: &Path, space: &StateSpace) -> Result<Vec<State>> {
    let txt = std::fs::read_to_string(path)?;
    txt.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| space.parse_state(l))
        .collect()
}

pub fn write_inputs(inputs: &[State], space: &StateSpace) -> String {
    let mut out = String::new();
    for s in inputs {
        out.push_str(&space.render(s));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestRow {
    pub input: String,
    pub base: OracleVerdict,
    pub candidate: OracleVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub selection: Selection,
    pub cumulabs: bool,
    pub cumulrel: bool,
    pub cumulstrict: bool,
    /// Both succeed.
    pub n0: usize,
    /// Base fails, candidate succeeds.
    pub n1: usize,
    /// Both fail.
    pub n2: usize,
    /// Base succeeds, candidate fails.
    pub n3: usize,
    pub rows: Vec<TestRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    AbsolutelyCorrect,
    StrictlyMoreCorrect,
    AsCorrect,
    NotMoreCorrect,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::AbsolutelyCorrect => "absolutely_correct",
            Classification::StrictlyMoreCorrect => "strictly_more_correct",
            Classification::AsCorrect => "as_correct",
            Classification::NotMoreCorrect => "not_more_correct",
        })
    }
}

pub fn classify(report: &SuiteReport) -> Classification {
    if report.cumulabs {
        Classification::AbsolutelyCorrect
    } else if report.cumulrel && report.cumulstrict {
        Classification::StrictlyMoreCorrect
    } else if report.cumulrel {
        Classification::AsCorrect
    } else {
        Classification::NotMoreCorrect
    }
}

pub(crate) fn same_layout(a: &StateSpace, b: &StateSpace) -> bool {
    a.vars().len() == b.vars().len()
        && a
            .vars()
            .iter()
            .zip(b.vars())
            .all(|(x, y)| x.name == y.name && x.domain.width() == y.domain.width() && x.domain.is_array() == y.domain.is_array())
}

/// Outcomes of one program on every suite input.
pub fn run_all(exe: &Executable, suite: &TestSuite, fuel: u64) -> Vec<Outcome> {
    suite.inputs.iter().map(|s| exe.run(&s.slots, fuel)).collect()
}

/// Builds the report from precomputed outcomes, the way the test driver
/// accumulates `abscor`, `relcor` and `strict`.
pub fn report_from(spec: &Spec, suite: &TestSuite, base: &[Outcome], cand: &[Outcome]) -> SuiteReport {
    let mut r = SuiteReport {
        selection: suite.selection.clone(),
        cumulabs: true,
        cumulrel: true,
        cumulstrict: false,
        n0: 0,
        n1: 0,
        n2: 0,
        n3: 0,
        rows: Vec::with_capacity(suite.inputs.len()),
    };
    let space = spec.space();
    for ((s, bo), co) in suite.inputs.iter().zip(base).zip(cand) {
        let bv = spec.abs_oracle(s, bo);
        let cv = spec.abs_oracle(s, co);
        let abscor = cv.passed;
        let relcor = !bv.passed || abscor;
        let strict = !bv.passed && abscor;
        r.cumulabs &= abscor;
        r.cumulrel &= relcor;
        r.cumulstrict |= strict;
        match (bv.passed, cv.passed) {
            (true, true) => r.n0 += 1,
            (false, true) => r.n1 += 1,
            (false, false) => r.n2 += 1,
            (true, false) => r.n3 += 1,
        }
        r.rows.push(TestRow {
            input: space.render(s),
            base: bv,
            candidate: cv,
        });
    }
    r
}

/// Runs base and candidate on every input of `suite` and compares them.
pub fn run_suite(
    candidate: &Program,
    base: &Program,
    spec: &Spec,
    suite: &TestSuite,
    fuel: u64,
    mode: Mode,
) -> Result<SuiteReport> {
    for p in [candidate, base] {
        if !same_layout(&p.space, spec.space()) {
            return Err(Error::SpaceMismatch);
        }
    }
    let cand = run_all(&Executable::of(candidate, mode)?, suite, fuel);
    let base = run_all(&Executable::of(base, mode)?, suite, fuel);
    Ok(report_from(spec, suite, &base, &cand))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toylang::{parse, Fault};

    fn fermat_spec() -> Spec {
        let space: StateSpace =
            serde_json::from_str(r#"{"vars":[{"name":"n"},{"name":"x"},{"name":"y"}]}"#).unwrap();
        Spec::predicate(space, "(n%2==1)||(n%4==0)", "n == x'*x' - y'*y'").unwrap()
    }

    #[test]
    fn relative_oracle_truth_table() {
        let spec = fermat_spec();
        let s = State::new(vec![21, 0, 0]);
        let good = Outcome::Final { state: vec![21, 5, 2] };
        let bad = Outcome::Undefined { fault: Fault::Overflow };
        assert!(rel_oracle(&spec, &bad, &s, &bad).passed);
        assert!(rel_oracle(&spec, &bad, &s, &good).passed);
        assert!(rel_oracle(&spec, &good, &s, &good).passed);
        assert!(!rel_oracle(&spec, &good, &s, &bad).passed);
    }

    #[test]
    fn random_selection_respects_domain_and_seed() {
        let spec = fermat_spec();
        let sel = Selection::Random {
            seed: 42,
            count: 50,
            bounds: Bounds::default().with("n", 1, 100),
        };
        let a = select_tests(&spec, None, sel.clone()).unwrap();
        assert_eq!(a.inputs.len(), 50);
        // independent check of the filter: odd or a multiple of four, within range
        for s in &a.inputs {
            let n = s.slots[0];
            assert!((1..=100).contains(&n));
            assert!(n % 2 == 1 || n % 4 == 0);
            assert_eq!(&s.slots[1..], &[0, 0]);
        }
        let b = select_tests(&spec, None, sel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exhaustive_box_selection() {
        let spec = fermat_spec();
        let t = select_tests(
            &spec,
            None,
            Selection::Exhaustive {
                bounds: Bounds::default().with("n", 1, 100),
            },
        )
        .unwrap();
        let expect: Vec<i64> = (1..=100).filter(|n| n % 2 == 1 || n % 4 == 0).collect();
        let got: Vec<i64> = t.inputs.iter().map(|s| s.slots[0]).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn empty_pool_is_an_error() {
        let sp = StateSpace::scalar("x", 0, 3).unwrap();
        let spec = Spec::predicate(sp, "false", "true").unwrap();
        let err = select_tests(&spec, None, Selection::Exhaustive { bounds: Bounds::default() });
        assert!(matches!(err, Err(Error::EmptySuite(_))));
        let err = select_tests(
            &spec,
            None,
            Selection::Random { seed: 1, count: 3, bounds: Bounds::default() },
        );
        assert!(matches!(err, Err(Error::EmptySuite(_))));
    }

    #[test]
    fn self_comparison_is_as_correct() {
        let spec = fermat_spec();
        let p = parse(include_str!("../fixtures/fermat_base.imp")).unwrap();
        let suite = select_tests(
            &spec,
            None,
            Selection::Exhaustive { bounds: Bounds::default().with("n", 1, 30) },
        )
        .unwrap();
        let r = run_suite(&p, &p, &spec, &suite, 10_000, Mode::Wide).unwrap();
        assert!(r.cumulrel && !r.cumulstrict);
        assert_eq!(r.n1, 0);
        assert_eq!(r.n3, 0);
    }

    #[test]
    fn divergent_base_against_correct_candidate() {
        let spec = fermat_spec();
        let base = parse("int n; int x; int y; while (true) skip;").unwrap();
        let good = parse(include_str!("../fixtures/fermat_correct.imp")).unwrap();
        let suite = select_tests(
            &spec,
            None,
            Selection::Exhaustive { bounds: Bounds::default().with("n", 1, 40) },
        )
        .unwrap();
        let r = run_suite(&good, &base, &spec, &suite, 10_000, Mode::Wide).unwrap();
        assert_eq!((r.n0, r.n1, r.n2, r.n3), (0, suite.inputs.len(), 0, 0));
        assert!(r.cumulstrict && r.cumulabs);
        assert_eq!(classify(&r), Classification::AbsolutelyCorrect);
    }

    #[test]
    fn classification_rules() {
        let mut r = SuiteReport {
            selection: Selection::CompetenceDomainOfBase,
            cumulabs: true,
            cumulrel: true,
            cumulstrict: false,
            n0: 1,
            n1: 0,
            n2: 0,
            n3: 0,
            rows: vec![],
        };
        assert_eq!(classify(&r), Classification::AbsolutelyCorrect);
        r.cumulabs = false;
        assert_eq!(classify(&r), Classification::AsCorrect);
        r.cumulstrict = true;
        r.n1 = 3;
        assert_eq!(classify(&r), Classification::StrictlyMoreCorrect);
        r.cumulrel = false;
        assert_eq!(classify(&r), Classification::NotMoreCorrect);
    }

    #[test]
    fn input_file_roundtrip() {
        let sp = StateSpace::scalar("n", 0, 100).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inputs.txt");
        std::fs::write(&path, "# comment\nn=3\n\nn=17\n").unwrap();
        let got = read_inputs(&path, &sp).unwrap();
        assert_eq!(got, vec![State::new(vec![3]), State::new(vec![17])]);
        assert_eq!(write_inputs(&got, &sp), "n=3\nn=17\n");
    }
}

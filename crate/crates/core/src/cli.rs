//! Command-line front end. Exit status: 0 success, 1 a false verdict under
//! `--assert` or a failed study fact, 2 unusable input.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::mutation::{generate, Operator};
use crate::relations::{competence_domain, is_correct, more_correct, Relation, RelationJson, StateSet, StateSpace};
use crate::repair::{export_tree, repair, ClassMode, RepairConfig, RepairResult, TreeFormat};
use crate::specs::{Spec, SpecJson};
use crate::studies::{self, Study};
use crate::testing::{Bounds, Selection, SuiteReport};
use crate::toylang::{default_fuel, denote, parse, Executable, Mode};

pub const SEED_ENV: &str = "RELCOR_SEED";
pub const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(name = "relcor", version, about = "Relative-correctness analysis and stepwise program repair")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide refinement, correctness, competence domains or relative correctness.
    Relcheck(RelcheckArgs),
    /// Print the program function of a program, or run it on given inputs.
    Semantics(SemanticsArgs),
    /// Write the single-site mutant manifest of a program.
    Mutate(MutateArgs),
    /// Stepwise repair by strict relative correctness.
    Repair(RepairArgs),
    /// Run a bundled case study and check its expected facts.
    Demo(DemoArgs),
    /// Tabulate JSON artifacts from earlier runs.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct RelcheckArgs {
    /// Specification: spec JSON, relation literal JSON, or `lattice:R`.
    #[arg(long)]
    pub spec: String,
    /// Does ARTIFACT refine the spec?
    #[arg(long, value_name = "ARTIFACT")]
    pub refines: Option<String>,
    /// Is ARTIFACT correct with respect to the spec?
    #[arg(long, value_name = "ARTIFACT")]
    pub correct: Option<String>,
    /// Competence domain of ARTIFACT.
    #[arg(long, value_name = "ARTIFACT")]
    pub competence_domain: Option<String>,
    /// Is the first artifact more-correct than the second?
    #[arg(long, num_args = 2, value_names = ["CANDIDATE", "BASE"])]
    pub more_correct: Option<Vec<String>>,
    #[arg(long)]
    pub strict: bool,
    /// Exit 1 when the verdict is false.
    #[arg(long)]
    pub assert: bool,
}

#[derive(Args, Debug)]
pub struct SemanticsArgs {
    #[arg(long)]
    pub program: PathBuf,
    /// Run on this `name=value ...` state instead of enumerating the function.
    #[arg(long = "input", value_name = "STATE")]
    pub inputs: Vec<String>,
    #[arg(long)]
    pub fuel: Option<u64>,
    /// Machine-integer execution instead of interval-confined execution.
    #[arg(long)]
    pub wide: bool,
}

#[derive(Args, Debug)]
pub struct MutateArgs {
    #[arg(long)]
    pub program: PathBuf,
    /// Comma-separated: aorb, lit, idx.
    #[arg(long, default_value = "aorb")]
    pub operators: String,
    /// Also write each mutant's source as `m<ordinal>.imp` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Testing,
    Exact,
}

#[derive(Args, Debug)]
pub struct RepairArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub program: PathBuf,
    #[arg(long, default_value = "aorb")]
    pub operators: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Testing)]
    pub mode: ModeArg,
    /// Seed for `--tests random:N`; defaults to $RELCOR_SEED, then 42.
    #[arg(long)]
    pub seed: Option<u64>,
    /// `exhaustive`, `random:COUNT`, `cd` (competence domain of the base) or `file:PATH`.
    #[arg(long, default_value = "exhaustive")]
    pub tests: String,
    /// Per-variable input ranges, e.g. `n=1..100`.
    #[arg(long = "bounds", value_name = "VAR=LO..HI")]
    pub bounds: Vec<String>,
    #[arg(long)]
    pub fuel: Option<u64>,
    #[arg(long, default_value_t = 5)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 64)]
    pub max_frontier: usize,
    /// Interval-confined execution for suite runs (default: machine integers).
    #[arg(long)]
    pub exact_exec: bool,
    #[arg(long)]
    pub dot_out: Option<PathBuf>,
    #[arg(long)]
    pub json_out: Option<PathBuf>,
    #[arg(long)]
    pub manifest_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DemoArgs {
    pub study: String,
    /// Directory for the report bundle.
    #[arg(long, default_value = "relcor-out")]
    pub out: PathBuf,
    /// Read fixtures and expectations from here instead of the built-in copies.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    pub inputs: Vec<PathBuf>,
}

/// Enough to re-run an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub config: Value,
    pub seed: u64,
    pub artifacts: Vec<String>,
    pub tool_version: String,
    pub duration_ms: u128,
}

impl RunManifest {
    fn new(config: Value, seed: u64, artifacts: Vec<String>, started: Instant) -> Self {
        RunManifest {
            command: std::env::args().collect(),
            config,
            seed,
            artifacts,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            duration_ms: started.elapsed().as_millis(),
        }
    }
}

pub fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// Parses arguments and runs; returns the exit status. Output goes to `out`.
pub fn run_with<I, T>(args: I, out: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn std::io::Write) -> Result<i32> {
    match cmd {
        Command::Relcheck(a) => relcheck(a, out),
        Command::Semantics(a) => semantics(a, out),
        Command::Mutate(a) => mutate(a, out),
        Command::Repair(a) => repair_cmd(a, out),
        Command::Demo(a) => demo(a, out),
        Command::Report(a) => report(a, out),
    }
}

fn print_json(out: &mut dyn std::io::Write, v: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn load_spec_any(arg: &str) -> Result<Spec> {
    if arg == "lattice:R" {
        return Ok(Spec::Enumerated(studies::load_lattice(None)?.spec));
    }
    let txt = read(Path::new(arg))?;
    let v: Value = serde_json::from_str(&txt)?;
    if v.get("type").is_some() {
        Spec::from_json(&serde_json::from_value::<SpecJson>(v)?)
    } else {
        Ok(Spec::Enumerated(Relation::from_json(&serde_json::from_value::<RelationJson>(v)?)?))
    }
}

/// A program function: `lattice:P4`, a relation literal (`.json`), or a program source.
fn load_artifact(arg: &str, space: &Arc<StateSpace>) -> Result<Relation> {
    if let Some(name) = arg.strip_prefix("lattice:") {
        let l = studies::load_lattice(None)?;
        let i = l
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Format(format!("no lattice program `{name}`")))?;
        return Ok(l.programs[i].clone());
    }
    let txt = read(Path::new(arg))?;
    if arg.ends_with(".json") {
        return Relation::from_json(&serde_json::from_str(&txt)?);
    }
    let p = parse(&txt)?;
    if p.space != **space {
        return Err(Error::SpaceMismatch);
    }
    denote(&p.body, space)
}

fn render_set(set: &StateSet) -> Vec<String> {
    set.states().map(|s| set.space().render(&s)).collect()
}

fn relcheck(a: RelcheckArgs, out: &mut dyn std::io::Write) -> Result<i32> {
    let spec = load_spec_any(&a.spec)?.enumerate()?;
    let space = spec.space().clone();
    let (doc, verdict) = if let Some(p) = &a.refines {
        let v = load_artifact(p, &space)?.refines(&spec)?;
        (json!({ "check": "refines", "program": p, "verdict": v }), Some(v))
    } else if let Some(p) = &a.correct {
        let rel = load_artifact(p, &space)?;
        let v = is_correct(&rel, &spec)?;
        (json!({ "check": "correct", "program": p, "verdict": v }), Some(v))
    } else if let Some(p) = &a.competence_domain {
        let cd = competence_domain(&spec, &load_artifact(p, &space)?)?;
        (
            json!({ "check": "competence_domain", "program": p, "size": cd.len(), "states": render_set(&cd) }),
            None,
        )
    } else if let Some(pair) = &a.more_correct {
        let cand = load_artifact(&pair[0], &space)?;
        let base = load_artifact(&pair[1], &space)?;
        let v = more_correct(&cand, &base, &spec, a.strict)?;
        (
            json!({ "check": "more_correct", "candidate": pair[0], "base": pair[1], "strict": a.strict, "verdict": v }),
            Some(v),
        )
    } else {
        return Err(Error::Format(
            "one of --refines, --correct, --competence-domain, --more-correct is required".into(),
        ));
    };
    print_json(out, &doc)?;
    Ok(if a.assert && verdict == Some(false) { 1 } else { 0 })
}

fn semantics(a: SemanticsArgs, out: &mut dyn std::io::Write) -> Result<i32> {
    let p = parse(&read(&a.program)?)?;
    if a.inputs.is_empty() {
        let rel = denote(&p.body, &Arc::new(p.space.clone()))?;
        print_json(out, &rel.to_json())?;
        return Ok(0);
    }
    let mode = if a.wide { Mode::Wide } else { Mode::Exact };
    let fuel = a.fuel.unwrap_or_else(|| if a.wide { 10_000 } else { default_fuel(&p.space) });
    let exe = Executable::of(&p, mode)?;
    let mut rows = Vec::new();
    for line in &a.inputs {
        let s = p.space.parse_state(line)?;
        if mode == Mode::Exact && !p.space.contains(&s) {
            return Err(Error::InvalidState(line.clone()));
        }
        let o = exe.run(&s.slots, fuel);
        let fin = o.final_state().map(|t| p.space.render(&t));
        rows.push(json!({ "input": p.space.render(&s), "outcome": o, "final": fin }));
    }
    print_json(out, &rows)?;
    Ok(0)
}

fn mutate(a: MutateArgs, out: &mut dyn std::io::Write) -> Result<i32> {
    let p = parse(&read(&a.program)?)?;
    let ops = Operator::parse_list(&a.operators)?;
    let ms = generate(&p, &ops);
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir)?;
        for m in &ms {
            std::fs::write(dir.join(format!("m{}.imp", m.ordinal)), m.program.to_string())?;
        }
    }
    let manifest: Vec<_> = ms.iter().map(|m| m.record()).collect();
    print_json(out, &manifest)?;
    Ok(0)
}

fn parse_bounds(items: &[String]) -> Result<Bounds> {
    let mut b = Bounds::default();
    for it in items {
        let bad = || Error::Format(format!("bad bounds `{it}`, expected VAR=LO..HI"));
        let (name, range) = it.split_once('=').ok_or_else(bad)?;
        let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
        let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
        b = b.with(name.trim(), lo, hi);
    }
    Ok(b)
}

fn parse_selection(tests: &str, seed: u64, bounds: Bounds) -> Result<Selection> {
    if tests == "exhaustive" {
        Ok(Selection::Exhaustive { bounds })
    } else if tests == "cd" {
        Ok(Selection::CompetenceDomainOfBase)
    } else if let Some(n) = tests.strip_prefix("random:") {
        let count = n
            .parse()
            .map_err(|_| Error::Format(format!("bad test count `{n}`")))?;
        Ok(Selection::Random { seed, count, bounds })
    } else if let Some(path) = tests.strip_prefix("file:") {
        Ok(Selection::File { path: path.to_string() })
    } else {
        Err(Error::Format(format!("unknown test selection `{tests}`")))
    }
}

fn write_file(path: &Path, body: &str) -> Result<String> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, body)?;
    Ok(path.display().to_string())
}

fn repair_cmd(a: RepairArgs, out: &mut dyn std::io::Write) -> Result<i32> {
    let started = Instant::now();
    let spec = Spec::load(&a.spec)?;
    let p = parse(&read(&a.program)?)?;
    let seed = a.seed.unwrap_or_else(default_seed);
    let mode = match a.mode {
        ModeArg::Testing => ClassMode::Testing,
        ModeArg::Exact => ClassMode::Exact,
    };
    let exec = if a.exact_exec || mode == ClassMode::Exact { Mode::Exact } else { Mode::Wide };
    let cfg = RepairConfig {
        operators: Operator::parse_list(&a.operators)?,
        selection: parse_selection(&a.tests, seed, parse_bounds(&a.bounds)?)?,
        fuel: a.fuel.unwrap_or(if exec == Mode::Wide { 10_000 } else { default_fuel(&p.space) }),
        max_depth: a.max_depth,
        max_frontier: a.max_frontier,
        mode,
        exec,
    };
    let res = repair(&p, &spec, &cfg)?;
    let mut artifacts = Vec::new();
    if let Some(path) = &a.dot_out {
        artifacts.push(write_file(path, &export_tree(&res, TreeFormat::Dot)?)?);
    }
    if let Some(path) = &a.json_out {
        artifacts.push(write_file(path, &export_tree(&res, TreeFormat::Json)?)?);
    }
    let t = &res.tree;
    print_json(
        out,
        &json!({
            "metrics": res.metrics,
            "nodes": t.nodes.len(),
            "solutions": t.solutions.iter().map(|&i| &t.nodes[i].label).collect::<Vec<_>>(),
            "dead_ends": t.dead_ends.iter().map(|&i| &t.nodes[i].label).collect::<Vec<_>>(),
        }),
    )?;
    if let Some(path) = &a.manifest_out {
        let m = RunManifest::new(serde_json::to_value(&cfg)?, seed, artifacts, started);
        write_file(path, &serde_json::to_string_pretty(&m)?)?;
    }
    Ok(0)
}

fn demo(a: DemoArgs, out: &mut dyn std::io::Write) -> Result<i32> {
    let started = Instant::now();
    let study: Study = a.study.parse()?;
    let seed = a.seed.unwrap_or_else(default_seed);
    let report = studies::run(study, a.fixtures.as_deref())?;
    let dir = a.out.join(&a.study);
    let mut artifacts = vec![write_file(&dir.join("report.json"), &serde_json::to_string_pretty(&report)?)?];
    for (name, body) in &report.artifacts {
        artifacts.push(write_file(&dir.join(name), body)?);
    }
    let mut config = json!({ "study": study, "fixtures": a.fixtures });
    if study == Study::Fermat {
        config["repair"] = serde_json::to_value(studies::fermat_setup(a.fixtures.as_deref())?.config)?;
    }
    let m = RunManifest::new(config, seed, artifacts, started);
    write_file(&dir.join("manifest.json"), &serde_json::to_string_pretty(&m)?)?;
    for f in &report.facts {
        writeln!(
            out,
            "[{}] {}: expected {}, got {}",
            if f.ok { "ok" } else { "FAIL" },
            f.name,
            f.expected,
            f.actual
        )?;
    }
    writeln!(out, "report written to {}", dir.display())?;
    Ok(if report.ok() { 0 } else { 1 })
}

/// Any artifact `report` understands.
#[derive(Deserialize)]
#[serde(untagged)]
enum Artifact {
    Tree(RepairResult),
    Suite(SuiteReport),
    Study(studies::StudyReport),
}

fn report(a: ReportArgs, out: &mut dyn std::io::Write) -> Result<i32> {
    let mut docs = Vec::new();
    for path in &a.inputs {
        let txt = read(path)?;
        let doc: Artifact = serde_json::from_str(&txt)
            .map_err(|e| Error::Format(format!("{}: not a recognised artifact ({e})", path.display())))?;
        docs.push((path, doc));
    }
    writeln!(out, "{:<24} {:>7} {:<8} {:<36} {:<22} {:>4} {:>4} {:>4} {:>4}", "node", "mutant", "op", "statement", "classification", "n0", "n1", "n2", "n3")?;
    for (path, doc) in docs {
        match doc {
            Artifact::Tree(r) => {
                for n in r.tree.nodes.iter().filter(|n| n.expanded) {
                    for v in &n.mutants {
                        writeln!(
                            out,
                            "{:<24} {:>7} {:<8} {:<36} {:<22} {:>4} {:>4} {:>4} {:>4}",
                            n.label,
                            v.ordinal,
                            v.operator.to_string(),
                            truncate(&v.statement, 36),
                            v.classification.to_string(),
                            v.n0,
                            v.n1,
                            v.n2,
                            v.n3
                        )?;
                    }
                }
            }
            Artifact::Suite(s) => {
                let c = crate::testing::classify(&s);
                writeln!(
                    out,
                    "{:<24} {:>7} {:<8} {:<36} {:<22} {:>4} {:>4} {:>4} {:>4}",
                    truncate(&path.display().to_string(), 24),
                    "-",
                    "-",
                    s.selection.to_string(),
                    c.to_string(),
                    s.n0,
                    s.n1,
                    s.n2,
                    s.n3
                )?;
            }
            Artifact::Study(st) => {
                for f in &st.facts {
                    writeln!(out, "{:<24} {}: {}", format!("{:?}", st.study).to_lowercase(), if f.ok { "ok" } else { "FAIL" }, f.name)?;
                }
            }
        }
    }
    Ok(0)
}

fn truncate(s: &str, n: usize) -> String {
    if s.chars().count() <= n {
        s.to_string()
    } else {
        let mut t: String = s.chars().take(n - 1).collect();
        t.push('~');
        t
    }
}

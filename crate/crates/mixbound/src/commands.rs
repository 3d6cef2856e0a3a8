//! The subcommands as library functions returning reports.

use mixbound_core::bounds::{self, BoundValue};
use mixbound_core::generators::{self, RandomKind};
use mixbound_core::geometry::{Normalization, SetQuantity};
use mixbound_core::levels;
use mixbound_core::subsets::{Direction, ProfileTable};
use mixbound_core::suite::{SuiteAccumulator, SUITE_TOL};
use mixbound_core::{Error, MarkovChain, VertexSet, MAX_ENUM_STATES};

use crate::chain_file;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Report, Table};
use crate::parallel;

/// A report and whether every verified statement held.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub passed: bool,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, passed: true }
    }
}

/// Default cap on the exact mixing-time search in `bound`.
pub const DEFAULT_N_MAX: usize = 100_000;
/// Node budget for the exact comparison value in `simulate`.
pub const SIMULATE_EXACT_BUDGET: usize = 1_000_000;

pub fn load_chain(cfg: &RunConfig) -> CliResult<MarkovChain> {
    let path = cfg.input.as_ref().ok_or_else(|| CliError::input("no input chain file given"))?;
    let chain = chain_file::read_chain(path)?;
    Ok(match cfg.tol {
        Some(t) => chain.with_tolerance(t),
        None => chain,
    })
}

fn label(chain: &MarkovChain, x: usize) -> String {
    chain.labels().map_or_else(|| x.to_string(), |l| l[x].clone())
}

fn witness(table: &ProfileTable) -> Cell {
    table.overall_witness().map(VertexSet::to_hex).into()
}

/// `(name, quantity, direction)` for the summary and profile commands.
fn summary_quantities(cfg: &RunConfig) -> CliResult<Vec<(String, SetQuantity, Direction)>> {
    let mut q = vec![
        ("conductance Phi~".to_string(), SetQuantity::Conductance(Normalization::Product), Direction::Min),
        ("modified conductance phi~".to_string(), SetQuantity::ModifiedConductance(Normalization::Product), Direction::Min),
        ("Psi".to_string(), SetQuantity::Psi, Direction::Min),
    ];
    for k in cfg.kernel_list()? {
        q.push((format!("C_{}", k.name()), SetQuantity::Congestion(k), Direction::Max));
    }
    Ok(q)
}

fn chain_meta(report: &mut Report, chain: &MarkovChain) {
    report.meta("n", chain.n());
    report.meta("min holding", chain.min_holding());
    report.meta("lazy", chain.is_lazy());
    report.meta("reversible", chain.is_reversible());
    report.meta("pi min", chain.pi_min());
}

pub fn analyze(cfg: &RunConfig, workers: usize) -> CliResult<Outcome> {
    let chain = load_chain(cfg)?;
    let mut table = Table::new(&["quantity", "value", "witness", "note"]);
    for x in 0..chain.n() {
        table.push(vec![format!("pi[{}]", label(&chain, x)).into(), chain.pi()[x].into(), Cell::Empty, Cell::Empty]);
    }
    let mut report = Report::new("analyze", Table::default());
    chain_meta(&mut report, &chain);
    if chain.n() > MAX_ENUM_STATES {
        report.note(format!("{} states: subset profiles need at most {MAX_ENUM_STATES}, skipped", chain.n()));
    } else {
        let named = summary_quantities(cfg)?;
        let q: Vec<_> = named.iter().map(|(_, q, d)| (q.clone(), *d)).collect();
        let tables = parallel::profiles(&chain, &q, workers)?;
        for ((name, quantity, _), t) in named.iter().zip(&tables) {
            let value = t.overall().unwrap_or(f64::NAN);
            let note = match quantity {
                SetQuantity::ModifiedConductance(_) if value <= chain.tol() => {
                    "periodic-style obstruction: some set has zero modified conductance"
                }
                _ => "",
            };
            table.push(vec![name.as_str().into(), value.into(), witness(t), note.into()]);
            if !note.is_empty() {
                report.note(note);
            }
        }
    }
    report.table = table;
    Ok(report.into())
}

pub fn profile(cfg: &RunConfig, workers: usize) -> CliResult<Outcome> {
    let chain = load_chain(cfg)?;
    let named = summary_quantities(cfg)?;
    let q: Vec<_> = named.iter().map(|(_, q, d)| (q.clone(), *d)).collect();
    let tables = parallel::profiles(&chain, &q, workers)?;
    let mut table = Table::new(&["quantity", "r", "value", "witness"]);
    for ((name, _, _), t) in named.iter().zip(&tables) {
        for row in t.rows() {
            table.push(vec![name.as_str().into(), row.r.into(), row.value.into(), row.witness.to_hex().into()]);
        }
    }
    let mut report = Report::new("profile", table);
    chain_meta(&mut report, &chain);
    Ok(report.into())
}

pub fn bound(cfg: &RunConfig, workers: usize) -> CliResult<Outcome> {
    let chain = load_chain(cfg)?;
    let profiles = parallel::chain_profiles(&chain, workers)?;
    let metrics = cfg.metric_list()?;
    let reports = bounds::all_bounds(&chain, &profiles, &metrics, &cfg.eps_list())?;
    let cap = cfg.n_max.unwrap_or(DEFAULT_N_MAX);
    let cmp = bounds::compare(&chain, &reports, cap)?;
    let mut table = Table::new(&[
        "method", "metric", "eps", "bound", "exact", "ratio", "raw", "dominates", "convexity", "clamped", "witness",
    ]);
    for (r, c) in reports.iter().zip(&cmp) {
        let bound = match r.value {
            BoundValue::Steps(s) => Cell::Int(s),
            BoundValue::Unbounded => Cell::Text("unbounded".into()),
        };
        table.push(vec![
            r.method.name().into(),
            r.metric.name().into(),
            r.eps.into(),
            bound,
            c.exact.into(),
            c.ratio.into(),
            r.raw.into(),
            c.dominates().into(),
            r.convexity.into(),
            r.clamped.into(),
            r.witness.as_ref().map(VertexSet::to_hex).into(),
        ]);
    }
    let mut report = Report::new("bound", table);
    chain_meta(&mut report, &chain);
    report.meta("exact search cap", cap);
    if cmp.iter().any(|c| c.exact.is_none()) {
        report.note(format!("some exact mixing times exceed the search cap of {cap} steps"));
    }
    if reports.iter().all(|r| r.value == BoundValue::Unbounded) {
        report.note("every bound is unbounded: no contraction (periodic or near-periodic chain)");
    }
    Ok(report.into())
}

/// The default verification suite: `count` random chains from `seed` plus
/// every catalog example.
pub fn suite_chains(count: usize, seed: u64) -> CliResult<Vec<(String, MarkovChain, Option<generators::NamedExample>)>> {
    let kinds = [RandomKind::Dense, RandomKind::Sparse, RandomKind::Lazy];
    let mut out = Vec::new();
    for s in seed..seed + count as u64 {
        let n = 3 + (s % 6) as usize;
        let kind = kinds[(s / 6 % 3) as usize];
        out.push((format!("random(n={n}, seed={s}, {kind:?})"), generators::random_chain(n, s, kind)?, None));
    }
    for ex in generators::catalog()? {
        out.push((ex.name.clone(), ex.chain.clone(), Some(ex)));
    }
    Ok(out)
}

pub fn verify(cfg: &RunConfig, workers: usize) -> CliResult<Outcome> {
    let mutation = cfg.mutation()?;
    let targets = match &cfg.input {
        Some(_) => vec![("input".to_string(), load_chain(cfg)?, None)],
        None => suite_chains(cfg.random.unwrap_or(50), cfg.seed.unwrap_or(1))?,
    };
    let mut acc = SuiteAccumulator::new();
    let mut table = Table::new(&["check", "worst_slack", "instances", "passed"]);
    let mut example_rows = Vec::new();
    for (name, chain, example) in &targets {
        acc.merge(parallel::chain_suite(chain, mutation, workers)?);
        if let Some(ex) = example {
            for r in ex.verify()? {
                example_rows.push((format!("{name}: {}", r.name), r));
            }
        }
    }
    let mut failed = Vec::new();
    let results = acc.finish(SUITE_TOL);
    let rows = results.into_iter().map(|r| (r.name.clone(), r)).chain(example_rows);
    for (name, r) in rows {
        if !r.passed {
            failed.push(name.clone());
        }
        table.push(vec![name.into(), r.worst_slack.into(), r.instances.into(), r.passed.into()]);
    }
    let mut report = Report::new("verify", table);
    report.meta("chains", targets.len());
    report.meta("tolerance", SUITE_TOL);
    for f in &failed {
        report.note(format!("violated: {f}"));
    }
    Ok(Outcome { passed: failed.is_empty(), report })
}

pub fn simulate(cfg: &RunConfig, workers: usize) -> CliResult<Outcome> {
    let chain = load_chain(cfg)?;
    let s0 = start_set(cfg, &chain)?;
    let steps = cfg.steps.unwrap_or(10);
    let samples = cfg.samples.unwrap_or(10_000);
    let seed = cfg.seed.unwrap_or(0);
    let decay = cfg.decay()?;
    let g = |s: &VertexSet| decay.eval(s.mass());
    let est = parallel::doob_expectation_mc(&chain, &s0, steps, g, samples, seed, workers)?;
    let exact = if chain.n() <= MAX_ENUM_STATES {
        match levels::exact_doob_expectation(&chain, &s0, steps, g, SIMULATE_EXACT_BUDGET) {
            Ok(v) => Some(v),
            Err(Error::BudgetExceeded { .. }) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let z = match (exact, est.stderr) {
        (Some(e), Some(se)) if se > 0.0 => Some((est.mean - e) / se),
        _ => None,
    };
    let mut table =
        Table::new(&["functional", "steps", "samples", "seed", "mean", "stderr", "weight_cv", "exact", "z"]);
    table.push(vec![
        decay.name().into(),
        steps.into(),
        samples.into(),
        seed.into(),
        est.mean.into(),
        est.stderr.into(),
        est.weight_cv.into(),
        exact.into(),
        z.into(),
    ]);
    let mut report = Report::new("simulate", table);
    report.meta("n", chain.n());
    report.meta("start", s0.to_hex());
    if est.stderr.is_none() {
        report.note("stderr undefined with a single sample");
    }
    if est.weights_suspicious() {
        report.note(format!("importance weights are heavy-tailed (cv {:.3e}); treat the estimate with care", est.weight_cv));
    }
    Ok(report.into())
}

/// The exact law of `S_n` from a start set, one row per reachable set.
pub fn evolve(cfg: &RunConfig, _workers: usize) -> CliResult<Outcome> {
    let chain = load_chain(cfg)?;
    let s0 = start_set(cfg, &chain)?;
    let steps = cfg.steps.unwrap_or(3);
    let doob = cfg.doob()?;
    let law = levels::evolve_exact(&chain, &s0, steps, doob, SIMULATE_EXACT_BUDGET)?;
    let mut table = Table::new(&["set", "size", "mass", "probability"]);
    for (set, p) in law.outcomes() {
        table.push(vec![set.to_hex().into(), set.len().into(), set.mass().into(), (*p).into()]);
    }
    let mut report = Report::new("evolve", table);
    report.meta("n", chain.n());
    report.meta("start", s0.to_hex());
    report.meta("steps", steps);
    report.meta("process", if doob { "doob" } else { "plain" });
    report.meta("total probability", law.total());
    report.meta("expected mass", law.expect(|s| s.mass()));
    Ok(report.into())
}

fn start_set(cfg: &RunConfig, chain: &MarkovChain) -> CliResult<VertexSet> {
    let start = cfg.start.clone().unwrap_or_else(|| vec![0]);
    let s0 = VertexSet::from_states(chain, start.iter().copied())?;
    if s0.is_empty() {
        return Err(CliError::input("start set is empty"));
    }
    Ok(s0)
}

/// The chain file for a named generator.
pub fn generate(name: &str, params: &[f64]) -> CliResult<String> {
    let ex = generators::by_name(name, params)?;
    Ok(chain_file::chain_to_json(&ex.chain))
}

/// Generator names with their parameter lists.
pub const GENERATORS: [(&str, &str); 7] = [
    ("two-point", "gamma"),
    ("complete", "m alpha"),
    ("cycle", "m"),
    ("bipartite", "m"),
    ("hypercube", "d"),
    ("pendant", "m"),
    ("eulerian", "vertices cycles seed [lazy]"),
];

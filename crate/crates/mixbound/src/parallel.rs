//! Deterministic multi-threaded versions of the subset census, the
//! verification suite and Monte Carlo sampling.
//!
//! Work is split into contiguous index ranges and merged in range order; the
//! core merges are order-independent, so results match the single-threaded
//! functions bit for bit at any worker count.

use std::env;
use std::ops::Range;
use std::thread;

use mixbound_core::bounds::ChainProfiles;
use mixbound_core::geometry::{Census, SetQuantity};
use mixbound_core::mc::{self, McEstimate};
use mixbound_core::subsets::{self, Direction, ProfileTable};
use mixbound_core::suite::{self, Mutation, SuiteAccumulator};
use mixbound_core::{MarkovChain, Result, VertexSet};

pub const THREADS_ENV: &str = "MIXBOUND_THREADS";

/// Worker count: the flag if given, else `MIXBOUND_THREADS`, else the
/// available parallelism.
pub fn worker_count(flag: Option<usize>) -> usize {
    flag.or_else(|| env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .filter(|&w| w > 0)
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()))
}

/// `[0, total)` cut into at most `parts` contiguous nonempty ranges.
pub fn split(total: u64, parts: usize) -> Vec<Range<u64>> {
    let parts = (parts.max(1) as u64).min(total.max(1));
    let chunk = total.div_ceil(parts);
    (0..parts).map(|i| (i * chunk).min(total)..((i + 1) * chunk).min(total)).filter(|r| !r.is_empty()).collect()
}

fn run_ranges<T: Send>(ranges: Vec<Range<u64>>, work: impl Fn(Range<u64>) -> T + Sync) -> Vec<T> {
    if ranges.len() <= 1 {
        return ranges.into_iter().map(&work).collect();
    }
    thread::scope(|s| {
        let handles: Vec<_> = ranges.into_iter().map(|r| s.spawn(|| work(r))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Profiles of `quantities` over every proper subset.
pub fn profiles(
    chain: &MarkovChain,
    quantities: &[(SetQuantity, Direction)],
    workers: usize,
) -> Result<Vec<ProfileTable>> {
    subsets::check_enumerable(chain.n())?;
    let n = chain.n();
    let parts = run_ranges(split(1u64 << n, workers), |r| -> Result<Census> {
        let mut census = Census::new(quantities);
        for mask in subsets::proper_subsets_in(n, r.start, r.end) {
            census.visit(chain, mask)?;
        }
        Ok(census)
    });
    let mut total = Census::new(quantities);
    for part in parts {
        total.merge(part?);
    }
    Ok(total.finish(chain))
}

pub fn chain_profiles(chain: &MarkovChain, workers: usize) -> Result<ChainProfiles> {
    ChainProfiles::from_tables(profiles(chain, &ChainProfiles::quantities(), workers)?)
}

pub fn chain_suite(chain: &MarkovChain, mutation: Option<Mutation>, workers: usize) -> Result<SuiteAccumulator> {
    subsets::check_enumerable(chain.n())?;
    let parts = run_ranges(split(1u64 << chain.n(), workers), |r| {
        suite::chain_suite_range(chain, r.start, r.end, mutation)
    });
    let mut acc = SuiteAccumulator::new();
    for part in parts {
        acc.merge(part?);
    }
    Ok(acc)
}

/// [`mc::doob_expectation_mc`] with trajectories spread over workers.
pub fn doob_expectation_mc<G: Fn(&VertexSet) -> f64 + Sync>(
    chain: &MarkovChain,
    s0: &VertexSet,
    n: usize,
    g: G,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<McEstimate> {
    let parts = run_ranges(split(samples, workers), |r| mc::weighted_samples(chain, s0, n, &g, seed, r));
    let mut all = Vec::with_capacity(samples as usize);
    for part in parts {
        all.extend(part?);
    }
    McEstimate::from_samples(&all, seed)
}

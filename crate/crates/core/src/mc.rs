//! Monte Carlo estimates of Doob-transform expectations `E^_n g(S_n)`.
//!
//! Trajectories run under the plain kernel `K` and are reweighted by
//! `pi(S_n)/pi(S_0)`. The uniform for step `k` of trajectory `j` is the
//! `k`-th draw of a ChaCha8 stream keyed by `(seed, j)`, so any split of the
//! trajectory range across workers reproduces the same values, and the final
//! reduction is a fixed pairwise sum over trajectory indices.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::{Error, MarkovChain, Result, VertexSet};

/// Coefficient of variation of the importance weights above which estimates
/// should be treated with suspicion.
pub const WEIGHT_CV_WARNING: f64 = 10.0;

/// Sparse transition structure for fast evolving-set steps.
#[derive(Clone, Debug)]
pub struct Stepper<'a> {
    chain: &'a MarkovChain,
    out: Vec<Vec<(usize, f64)>>,
}

impl<'a> Stepper<'a> {
    pub fn new(chain: &'a MarkovChain) -> Self {
        let n = chain.n();
        let out = (0..n)
            .map(|x| (0..n).filter(|&y| chain.p(x, y) > 0.0).map(|y| (y, chain.p(x, y))).collect())
            .collect();
        Stepper { chain, out }
    }

    /// `A_u = {y : Q(A,y) >= u pi(y)}`, with the same snapping of ratios to
    /// `{0, 1}` and threshold tolerance as [`crate::levels::set_at_level`].
    pub fn step(&self, a: &VertexSet, u: f64) -> VertexSet {
        let chain = self.chain;
        if a.is_empty() || a.is_full() {
            return a.clone();
        }
        let pi = chain.pi();
        let tol = chain.tol();
        let mut q = vec![0.0; chain.n()];
        for x in a.iter() {
            for &(y, p) in &self.out[x] {
                q[y] += pi[x] * p;
            }
        }
        let keep = q.iter().zip(pi).enumerate().filter_map(|(y, (qy, py))| {
            let r = qy / py;
            let r = if r >= 1.0 - tol {
                1.0
            } else if r <= tol {
                0.0
            } else {
                r
            };
            (r >= u - tol).then_some(y)
        });
        VertexSet::from_states(chain, keep).expect("states come from the chain")
    }
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    // (0, 1]: u = 0 would select every state
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn trajectory_rng(seed: u64, trajectory: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trajectory);
    rng
}

fn run(stepper: &Stepper<'_>, s0: &VertexSet, n: usize, seed: u64, trajectory: u64) -> VertexSet {
    let mut rng = trajectory_rng(seed, trajectory);
    let mut s = s0.clone();
    for _ in 0..n {
        if s.is_empty() || s.is_full() {
            break;
        }
        let u = unit(&mut rng);
        s = stepper.step(&s, u);
    }
    s
}

/// `S_n` under `K` from `S_0 = s0` for one trajectory index.
pub fn sample_trajectory(chain: &MarkovChain, s0: &VertexSet, n: usize, seed: u64, trajectory: u64) -> Result<VertexSet> {
    if s0.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(run(&Stepper::new(chain), s0, n, seed, trajectory))
}

/// Per-trajectory `(weight, weight * g(S_n))` for trajectory indices in
/// `range`, in index order. Workers call this on disjoint ranges.
pub fn weighted_samples<G: Fn(&VertexSet) -> f64>(
    chain: &MarkovChain,
    s0: &VertexSet,
    n: usize,
    g: &G,
    seed: u64,
    range: Range<u64>,
) -> Result<Vec<(f64, f64)>> {
    if s0.is_empty() {
        return Err(Error::EmptySet);
    }
    let stepper = Stepper::new(chain);
    let base = s0.mass();
    Ok(range
        .map(|j| {
            let s = run(&stepper, s0, n, seed, j);
            if s.is_empty() {
                (0.0, 0.0)
            } else {
                let w = s.mass() / base;
                (w, w * g(&s))
            }
        })
        .collect())
}

/// Sum in a fixed binary tree over indices, independent of how the values
/// were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// A Monte Carlo estimate.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`; undefined for one sample.
    pub stderr: Option<f64>,
    pub samples: u64,
    pub seed: u64,
    /// Coefficient of variation of the importance weights.
    pub weight_cv: f64,
}

impl McEstimate {
    /// Reduces per-trajectory `(weight, value)` pairs listed in index order.
    pub fn from_samples(samples: &[(f64, f64)], seed: u64) -> Result<Self> {
        let k = samples.len();
        if k == 0 {
            return Err(Error::BadArgument("samples must be at least 1"));
        }
        let kf = k as f64;
        let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let weights: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let mean = pairwise_sum(&values) / kf;
        let w_mean = pairwise_sum(&weights) / kf;
        let sq = |xs: &[f64], m: f64| {
            let d: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
            pairwise_sum(&d)
        };
        let stderr = (k > 1).then(|| libm::sqrt(sq(&values, mean) / (kf - 1.0)) / libm::sqrt(kf));
        let weight_cv = if k > 1 && w_mean > 0.0 {
            libm::sqrt(sq(&weights, w_mean) / (kf - 1.0)) / w_mean
        } else {
            0.0
        };
        Ok(McEstimate { mean, stderr, samples: k as u64, seed, weight_cv })
    }

    pub fn weights_suspicious(&self) -> bool {
        self.weight_cv > WEIGHT_CV_WARNING
    }
}

/// Estimates `E^_n g(S_n) = E_K[(pi(S_n)/pi(S_0)) g(S_n)]` from `samples`
/// independent trajectories.
pub fn doob_expectation_mc<G: Fn(&VertexSet) -> f64>(
    chain: &MarkovChain,
    s0: &VertexSet,
    n: usize,
    g: G,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::BadArgument("samples must be at least 1"));
    }
    let pairs = weighted_samples(chain, s0, n, &g, seed, 0..samples)?;
    McEstimate::from_samples(&pairs, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{self, RandomKind};
    use crate::levels;

    #[test]
    fn sparse_step_matches_level_sets() {
        let c = generators::random_chain(6, 5, RandomKind::Sparse).unwrap();
        let st = Stepper::new(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for mask in [1u64, 6, 21, 40, 62] {
            let a = VertexSet::from_mask(&c, mask).unwrap();
            for _ in 0..50 {
                let u = unit(&mut rng);
                assert_eq!(st.step(&a, u), levels::set_at_level(&c, &a, u).unwrap(), "mask {mask} u {u}");
            }
        }
    }

    #[test]
    fn zero_steps_returns_start() {
        let c = generators::cycle(5).unwrap().chain;
        let a = VertexSet::from_mask(&c, 0b101).unwrap();
        assert_eq!(sample_trajectory(&c, &a, 0, 3, 9).unwrap(), a);
    }

    #[test]
    fn complete_graph_one_step_frequencies() {
        // alpha = 0: A_u is V with probability pi(A), empty otherwise
        let c = generators::complete_graph(5, 0.0).unwrap().chain;
        let a = VertexSet::from_mask(&c, 0b11).unwrap();
        let draws = 100_000u64;
        let full = (0..draws).filter(|&j| sample_trajectory(&c, &a, 1, 7, j).unwrap().is_full()).count() as f64;
        let p = 0.4;
        let sigma = libm::sqrt(p * (1.0 - p) / draws as f64);
        assert!((full / draws as f64 - p).abs() < 3.0 * sigma);
    }

    #[test]
    fn estimate_agrees_with_exact_tree() {
        let c = generators::random_chain(5, 8, RandomKind::Dense).unwrap();
        let s0 = VertexSet::singleton(&c, 2).unwrap();
        let g = |s: &VertexSet| 1.0 - s.mass();
        let exact = levels::exact_doob_expectation(&c, &s0, 3, g, levels::DEFAULT_NODE_BUDGET).unwrap();
        let est = doob_expectation_mc(&c, &s0, 3, g, 20_000, 11).unwrap();
        assert!((est.mean - exact).abs() < 4.0 * est.stderr.unwrap(), "{est:?} vs {exact}");
    }

    #[test]
    fn constant_functional_estimates_one() {
        let c = generators::random_chain(5, 3, RandomKind::Lazy).unwrap();
        let s0 = VertexSet::singleton(&c, 0).unwrap();
        let est = doob_expectation_mc(&c, &s0, 4, |_| 1.0, 20_000, 5).unwrap();
        assert!((est.mean - 1.0).abs() < 4.0 * est.stderr.unwrap());
    }

    #[test]
    fn lazy_martingale() {
        let c = generators::random_chain(6, 13, RandomKind::Lazy).unwrap();
        let s0 = VertexSet::from_mask(&c, 0b1001).unwrap();
        let stepper = Stepper::new(&c);
        let masses: Vec<f64> = (0..50_000u64).map(|j| run(&stepper, &s0, 3, 2, j).mass()).collect();
        let k = masses.len() as f64;
        let mean = pairwise_sum(&masses) / k;
        let var = masses.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (k - 1.0);
        assert!((mean - s0.mass()).abs() < 3.0 * libm::sqrt(var / k));
    }

    #[test]
    fn split_ranges_reproduce_the_whole() {
        let c = generators::random_chain(5, 1, RandomKind::Sparse).unwrap();
        let s0 = VertexSet::singleton(&c, 4).unwrap();
        let g = |s: &VertexSet| libm::sqrt((1.0 - s.mass()) / s.mass());
        let whole = weighted_samples(&c, &s0, 4, &g, 99, 0..1000).unwrap();
        let mut parts = weighted_samples(&c, &s0, 4, &g, 99, 0..377).unwrap();
        parts.extend(weighted_samples(&c, &s0, 4, &g, 99, 377..1000).unwrap());
        assert_eq!(whole, parts);
        let a = McEstimate::from_samples(&whole, 99).unwrap();
        let b = McEstimate::from_samples(&parts, 99).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    }

    #[test]
    fn hypercube_l2_estimate_decreases() {
        let c = generators::lazy_hypercube(10).unwrap().chain;
        let s0 = VertexSet::singleton(&c, 0).unwrap();
        let g = |s: &VertexSet| libm::sqrt((1.0 - s.mass()) / s.mass());
        let est: Vec<McEstimate> =
            [0, 5, 10, 20].iter().map(|&n| doob_expectation_mc(&c, &s0, n, g, 4000, 17).unwrap()).collect();
        for w in est.windows(2) {
            let se = libm::sqrt(w[0].stderr.unwrap().powi(2) + w[1].stderr.unwrap().powi(2));
            assert!(w[1].mean < w[0].mean + 3.0 * se, "{:?} then {:?}", w[0], w[1]);
        }
        assert!(est[3].mean < 0.5 * est[0].mean);
    }

    #[test]
    fn single_sample_has_no_stderr() {
        let c = generators::cycle(5).unwrap().chain;
        let s0 = VertexSet::singleton(&c, 0).unwrap();
        let est = doob_expectation_mc(&c, &s0, 2, |_| 1.0, 1, 0).unwrap();
        assert_eq!(est.stderr, None);
        assert!(doob_expectation_mc(&c, &s0, 2, |_| 1.0, 0, 0).is_err());
    }
}

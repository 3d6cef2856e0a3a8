//! Exact n-step distances from matrix powers, exact mixing times and the
//! spectral lower bound.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg;
use crate::{Error, MarkovChain, Result};

/// A distance from a distribution `mu` to `pi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Metric {
    /// `max_x 1 - mu(x)/pi(x)`
    Separation,
    /// `1/2 sum |mu - pi|`; also the Wasserstein distance for the discrete metric.
    TotalVariation,
    /// `sum mu log(mu/pi)`
    RelativeEntropy,
    /// `sqrt(sum pi (mu/pi - 1)^2)`
    L2,
    /// `max_x |mu(x)/pi(x) - 1|`
    LInfinity,
    /// `sum pi (sqrt(mu/pi) - 1)^2`
    Hellinger,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Separation,
        Metric::TotalVariation,
        Metric::RelativeEntropy,
        Metric::L2,
        Metric::LInfinity,
        Metric::Hellinger,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Separation => "separation",
            Metric::TotalVariation => "tv",
            Metric::RelativeEntropy => "entropy",
            Metric::L2 => "l2",
            Metric::LInfinity => "linf",
            Metric::Hellinger => "hellinger",
        }
    }

    pub fn from_name(s: &str) -> Option<Metric> {
        Some(match s {
            "separation" | "sep" => Metric::Separation,
            "tv" | "total-variation" | "wasserstein" => Metric::TotalVariation,
            "entropy" | "kl" | "relative-entropy" => Metric::RelativeEntropy,
            "l2" => Metric::L2,
            "linf" | "l-infinity" => Metric::LInfinity,
            "hellinger" => Metric::Hellinger,
            _ => return None,
        })
    }
}

/// Evaluates `metric(mu, pi)` from its defining formula.
pub fn distance(mu: &[f64], pi: &[f64], metric: Metric) -> f64 {
    let ratios = mu.iter().zip(pi).map(|(m, p)| (m / p, *p));
    match metric {
        Metric::Separation => ratios.map(|(r, _)| 1.0 - r).fold(f64::NEG_INFINITY, f64::max),
        Metric::TotalVariation => 0.5 * mu.iter().zip(pi).map(|(m, p)| (m - p).abs()).sum::<f64>(),
        Metric::RelativeEntropy => ratios
            .map(|(r, p)| if r > 0.0 { p * r * libm::log(r) } else { 0.0 })
            .sum(),
        Metric::L2 => libm::sqrt(ratios.map(|(r, p)| p * (r - 1.0) * (r - 1.0)).sum()),
        Metric::LInfinity => ratios.map(|(r, _)| (r - 1.0).abs()).fold(0.0, f64::max),
        Metric::Hellinger => ratios
            .map(|(r, p)| {
                let d = libm::sqrt(r.max(0.0)) - 1.0;
                p * d * d
            })
            .sum(),
    }
}

fn check_state(chain: &MarkovChain, x: usize) -> Result<()> {
    if x < chain.n() {
        Ok(())
    } else {
        Err(Error::StateOutOfRange(x))
    }
}

/// `P^n(x, .)` by `n` vector-matrix products.
pub fn step_distribution(chain: &MarkovChain, x: usize, n: usize) -> Result<Vec<f64>> {
    check_state(chain, x)?;
    let mut mu = vec![0.0; chain.n()];
    mu[x] = 1.0;
    for _ in 0..n {
        mu = linalg::vec_mat(&mu, chain.matrix(), chain.n());
    }
    Ok(mu)
}

/// `metric(P^n(x,.), pi)`.
pub fn exact_distance(chain: &MarkovChain, x: usize, n: usize, metric: Metric) -> Result<f64> {
    Ok(distance(&step_distribution(chain, x, n)?, chain.pi(), metric))
}

/// Distances `d_0, ..., d_{n_max}` from start `x` (or the worst start when
/// `x` is `None`).
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DistanceSeries {
    pub metric: Metric,
    pub start: Option<usize>,
    pub values: Vec<(usize, f64)>,
}

/// Worst-start distance series for every metric at once, `n = 0..=n_max`.
/// Each row of `P^n` is advanced once per step.
pub fn worst_start_series(chain: &MarkovChain, n_max: usize, metrics: &[Metric]) -> Vec<DistanceSeries> {
    let n = chain.n();
    let mut series: Vec<DistanceSeries> = metrics
        .iter()
        .map(|&metric| DistanceSeries { metric, start: None, values: Vec::with_capacity(n_max + 1) })
        .collect();
    let mut power = linalg::identity(n);
    for step in 0..=n_max {
        for s in &mut series {
            let worst = (0..n)
                .map(|x| distance(&power[x * n..(x + 1) * n], chain.pi(), s.metric))
                .fold(f64::NEG_INFINITY, f64::max);
            s.values.push((step, worst));
        }
        if step < n_max {
            power = linalg::mat_mul(&power, chain.matrix(), n);
        }
    }
    series
}

/// Series from one start.
pub fn distance_series(chain: &MarkovChain, x: usize, n_max: usize, metric: Metric) -> Result<DistanceSeries> {
    check_state(chain, x)?;
    let mut mu = vec![0.0; chain.n()];
    mu[x] = 1.0;
    let mut values = Vec::with_capacity(n_max + 1);
    for step in 0..=n_max {
        values.push((step, distance(&mu, chain.pi(), metric)));
        if step < n_max {
            mu = linalg::vec_mat(&mu, chain.matrix(), chain.n());
        }
    }
    Ok(DistanceSeries { metric, start: Some(x), values })
}

/// `max_x metric(P^n(x,.), pi)`.
pub fn worst_start_distance(chain: &MarkovChain, n: usize, metric: Metric) -> f64 {
    let p = linalg::mat_pow(chain.matrix(), chain.n(), n as u64);
    let k = chain.n();
    (0..k)
        .map(|x| distance(&p[x * k..(x + 1) * k], chain.pi(), metric))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum MixingTime {
    Mixed(usize),
    /// No `n <= cap` reached the target.
    Unmixed,
}

impl MixingTime {
    pub fn steps(self) -> Option<usize> {
        match self {
            MixingTime::Mixed(n) => Some(n),
            MixingTime::Unmixed => None,
        }
    }
}

/// Smallest `n <= cap` whose worst-start distance is at most `eps`.
pub fn exact_mixing_time(chain: &MarkovChain, metric: Metric, eps: f64, cap: usize) -> Result<MixingTime> {
    if !(eps > 0.0) {
        return Err(Error::BadArgument("eps must be positive"));
    }
    let n = chain.n();
    let mut power = linalg::identity(n);
    for step in 0..=cap {
        let worst = (0..n)
            .map(|x| distance(&power[x * n..(x + 1) * n], chain.pi(), metric))
            .fold(f64::NEG_INFINITY, f64::max);
        if worst <= eps {
            return Ok(MixingTime::Mixed(step));
        }
        power = linalg::mat_mul(&power, chain.matrix(), n);
    }
    Ok(MixingTime::Unmixed)
}

/// Largest `|lambda|` over the non-trivial eigenvalues of a reversible chain,
/// from the symmetrized matrix `D^{1/2} P D^{-1/2}`.
pub fn second_eigenvalue_magnitude(chain: &MarkovChain) -> Result<f64> {
    if !chain.is_reversible() {
        return Err(Error::NotReversible);
    }
    let n = chain.n();
    let sq: Vec<f64> = chain.pi().iter().map(|p| libm::sqrt(*p)).collect();
    let mut s = vec![0.0; n * n];
    for x in 0..n {
        for y in 0..n {
            s[x * n + y] = sq[x] * chain.p(x, y) / sq[y];
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            let avg = 0.5 * (s[x * n + y] + s[y * n + x]);
            s[x * n + y] = avg;
            s[y * n + x] = avg;
        }
    }
    let mut eig = linalg::symmetric_eigenvalues(&s, n, 1e-12);
    eig.sort_by(|a, b| b.total_cmp(a));
    Ok(eig[1..].iter().map(|l| l.abs()).fold(0.0, f64::max))
}

/// `1/2 lambda_max^n`, a lower bound on the worst-start total variation.
pub fn spectral_tv_lower_bound(chain: &MarkovChain, n: usize) -> Result<f64> {
    let lam = second_eigenvalue_magnitude(chain)?;
    Ok(0.5 * libm::pow(lam, n as f64))
}

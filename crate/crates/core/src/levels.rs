//! The evolving-set step function `u -> pi(A_u)` and the kernels built from it.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, MarkovChain, Result, VertexSet};

/// Default node budget for exact tree expansion.
pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

/// States sharing one threshold `Q(A,y)/pi(y)`.
#[derive(Clone, Debug)]
pub struct LevelGroup {
    pub threshold: f64,
    /// Stationary mass of the group.
    pub mass: f64,
    /// Mass of this group and every group above it.
    pub cumulative: f64,
    pub states: Vec<usize>,
}

/// A maximal `u`-interval `(lo, hi]` on which `pi(A_u)` equals `level`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
    /// Number of leading groups making up `A_u` on this interval.
    pub groups: usize,
}

impl Step {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

/// The non-increasing step function `u -> pi(A_u)` on `(0, 1]`.
#[derive(Clone, Debug)]
pub struct LevelProfile {
    base_mass: f64,
    groups: Vec<LevelGroup>,
    steps: Vec<Step>,
    ratios: Vec<f64>,
    tol: f64,
}

impl LevelProfile {
    pub fn new(chain: &MarkovChain, a: &VertexSet) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::EmptySet);
        }
        let tol = chain.tol();
        let q = chain.flow_from(a);
        let ratios: Vec<f64> = q
            .iter()
            .zip(chain.pi())
            .map(|(qy, py)| {
                let r = qy / py;
                if r >= 1.0 - tol {
                    1.0
                } else if r <= tol {
                    0.0
                } else {
                    r
                }
            })
            .collect();
        let mut order: Vec<usize> = (0..chain.n()).collect();
        order.sort_by(|&x, &y| ratios[y].total_cmp(&ratios[x]).then(x.cmp(&y)));

        let mut groups: Vec<LevelGroup> = Vec::new();
        let mut cumulative = 0.0;
        for y in order {
            let r = ratios[y];
            let py = chain.pi()[y];
            cumulative += py;
            match groups.last_mut() {
                Some(g) if g.threshold - r <= tol * g.threshold.max(1.0) => {
                    g.mass += py;
                    g.cumulative = cumulative;
                    g.states.push(y);
                }
                _ => groups.push(LevelGroup { threshold: r, mass: py, cumulative, states: vec![y] }),
            }
        }

        if let Some(last) = groups.last_mut() {
            last.cumulative = 1.0;
        }

        // ascending in u: (0, t_J], (t_J, t_{J-1}], ..., (t_1, 1]
        let mut steps = Vec::with_capacity(groups.len() + 1);
        let mut lo = 0.0;
        for j in (0..groups.len()).rev() {
            let hi = groups[j].threshold;
            if hi > lo {
                steps.push(Step { lo, hi, level: groups[j].cumulative, groups: j + 1 });
                lo = hi;
            }
        }
        if lo < 1.0 {
            steps.push(Step { lo, hi: 1.0, level: 0.0, groups: 0 });
        }
        Ok(LevelProfile { base_mass: a.mass(), groups, steps, ratios, tol })
    }

    /// `pi(A)`.
    pub fn base_mass(&self) -> f64 {
        self.base_mass
    }

    pub fn groups(&self) -> &[LevelGroup] {
        &self.groups
    }

    /// Positive-length steps, ascending in `u`.
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// `Q(A,y)/pi(y)` per state, snapped to `{0, 1}` within tolerance.
    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    /// Breakpoints `(threshold, mass)` with positive threshold, descending.
    pub fn breakpoints(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.groups.iter().filter(|g| g.threshold > 0.0).map(|g| (g.threshold, g.mass))
    }

    /// `pi(A_u)`; `u = 0` gives the full space.
    pub fn mass_at(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 1.0;
        }
        self.steps
            .iter()
            .find(|s| u <= s.hi)
            .map_or(0.0, |s| s.level)
    }

    /// `int_0^1 F(pi(A_u)) du`, exact for the step function.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.steps.iter().map(|s| s.len() * f(s.level)).sum()
    }

    /// Admissible range `[lo, hi]` for the crossing level of `pi(A_u)` through `pi(A)`.
    pub fn wp_interval(&self) -> (f64, f64) {
        let a = self.base_mass;
        let band = self.tol * a.max(1.0);
        let lo = self
            .steps
            .iter()
            .find(|s| s.level <= a + band)
            .map_or(1.0, |s| s.lo);
        let hi = self
            .steps
            .iter()
            .rev()
            .find(|s| s.level >= a - band)
            .map_or(0.0, |s| s.hi);
        (lo, hi.max(lo))
    }

    /// Membership of `A_u` as a set.
    fn set_of(&self, chain: &MarkovChain, groups: usize) -> VertexSet {
        VertexSet::from_states(chain, self.groups[..groups].iter().flat_map(|g| g.states.iter().copied()))
            .expect("states come from the chain")
    }
}

/// `A_u = {y : Q(A,y) >= u pi(y)}`, comparing within the chain tolerance.
pub fn set_at_level(chain: &MarkovChain, a: &VertexSet, u: f64) -> Result<VertexSet> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::BadT(u));
    }
    if a.is_empty() {
        return Ok(VertexSet::empty(chain));
    }
    let profile = LevelProfile::new(chain, a)?;
    let tol = chain.tol();
    let count = profile.groups.iter().take_while(|g| g.threshold >= u - tol).count();
    Ok(profile.set_of(chain, count))
}

/// A finite distribution over sets.
#[derive(Clone, Debug, Default)]
pub struct SetDistribution {
    outcomes: Vec<(VertexSet, f64)>,
}

impl SetDistribution {
    pub(crate) fn from_outcomes(outcomes: Vec<(VertexSet, f64)>) -> Self {
        SetDistribution { outcomes }
    }

    pub fn outcomes(&self) -> &[(VertexSet, f64)] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.outcomes.iter().map(|(_, p)| p).sum()
    }

    pub fn probability_of(&self, s: &VertexSet) -> f64 {
        self.outcomes.iter().filter(|(t, _)| t == s).map(|(_, p)| p).sum()
    }

    /// `sum_S p(S) g(S)`.
    pub fn expect<G: FnMut(&VertexSet) -> f64>(&self, mut g: G) -> f64 {
        self.outcomes.iter().map(|(s, p)| p * g(s)).sum()
    }
}

/// One step of the evolving-set walk: `K(A, .)`, outcome probabilities are
/// the lengths of the `u`-intervals.
pub fn kernel_k(chain: &MarkovChain, a: &VertexSet) -> Result<SetDistribution> {
    let profile = LevelProfile::new(chain, a)?;
    let outcomes = profile
        .steps
        .iter()
        .rev()
        .map(|s| (profile.set_of(chain, s.groups), s.len()))
        .collect();
    Ok(SetDistribution { outcomes })
}

/// One step of the Doob transform: `K^(A,S) = pi(S)/pi(A) K(A,S)`; the empty
/// outcome carries no weight and is dropped.
pub fn doob_kernel(chain: &MarkovChain, a: &VertexSet) -> Result<SetDistribution> {
    let profile = LevelProfile::new(chain, a)?;
    Ok(doob_from_profile(chain, &profile))
}

fn doob_from_profile(chain: &MarkovChain, profile: &LevelProfile) -> SetDistribution {
    let base = profile.base_mass;
    let outcomes = profile
        .steps
        .iter()
        .rev()
        .filter(|s| s.groups > 0)
        .map(|s| (profile.set_of(chain, s.groups), s.len() * s.level / base))
        .collect();
    SetDistribution { outcomes }
}

/// The law of `S_n` under `K^` (or `K` when `doob` is false) started from
/// `s0`, by exhaustive expansion with identical sets merged at every level.
///
/// Sets are kept in sorted order, so the accumulation order (and hence the
/// result) does not depend on how the expansion is scheduled.
pub fn evolve_exact(
    chain: &MarkovChain,
    s0: &VertexSet,
    n: usize,
    doob: bool,
    budget: usize,
) -> Result<SetDistribution> {
    if s0.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut level: BTreeMap<VertexSet, f64> = BTreeMap::new();
    level.insert(s0.clone(), 1.0);
    let mut nodes = 1usize;
    for _ in 0..n {
        let mut next: BTreeMap<VertexSet, f64> = BTreeMap::new();
        for (set, w) in &level {
            if set.is_empty() || set.is_full() {
                *next.entry(set.clone()).or_insert(0.0) += w;
                continue;
            }
            let step = if doob { doob_kernel(chain, set)? } else { kernel_k(chain, set)? };
            for (s, p) in step.outcomes {
                *next.entry(s).or_insert(0.0) += w * p;
            }
        }
        nodes += next.len();
        if nodes > budget {
            return Err(Error::BudgetExceeded { nodes });
        }
        level = next;
    }
    Ok(SetDistribution { outcomes: level.into_iter().collect() })
}

/// `E^_n g(S_n)` with `S_0 = s0`, computed exactly.
pub fn exact_doob_expectation<G: FnMut(&VertexSet) -> f64>(
    chain: &MarkovChain,
    s0: &VertexSet,
    n: usize,
    g: G,
    budget: usize,
) -> Result<f64> {
    Ok(evolve_exact(chain, s0, n, true, budget)?.expect(g))
}

/// Convenience wrapper for [`LevelProfile::wp_interval`].
pub fn wp_interval(chain: &MarkovChain, a: &VertexSet) -> Result<(f64, f64)> {
    if !a.is_proper() {
        return Err(Error::TrivialSet);
    }
    Ok(LevelProfile::new(chain, a)?.wp_interval())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn complete_graph_three_levels() {
        let (m, alpha) = (5, 0.3);
        let c = generators::complete_graph(m, alpha).unwrap().chain;
        let a = VertexSet::from_states(&c, [0, 1]).unwrap();
        let pa = a.mass();
        let p = LevelProfile::new(&c, &a).unwrap();
        let lo = (1.0 - alpha) * pa;
        let hi = alpha + (1.0 - alpha) * pa;
        assert!((p.mass_at(lo * 0.5) - 1.0).abs() < 1e-12);
        assert!((p.mass_at(lo) - 1.0).abs() < 1e-12);
        assert!((p.mass_at((lo + hi) / 2.0) - pa).abs() < 1e-12);
        assert!(p.mass_at((hi + 1.0) / 2.0).abs() < 1e-12);

        let k = kernel_k(&c, &a).unwrap();
        let full = VertexSet::full(&c);
        assert!((k.probability_of(&full) - lo).abs() < 1e-12);
        assert!((k.probability_of(&a) - alpha).abs() < 1e-12);
        assert!((k.probability_of(&VertexSet::empty(&c)) - (1.0 - alpha) * (1.0 - pa)).abs() < 1e-12);

        let d = doob_kernel(&c, &a).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d.probability_of(&full) - (1.0 - alpha)).abs() < 1e-12);
        assert!((d.probability_of(&a) - alpha).abs() < 1e-12);
    }

    #[test]
    fn full_set_is_absorbing() {
        let c = generators::cycle(5).unwrap().chain;
        let full = VertexSet::full(&c);
        let k = kernel_k(&c, &full).unwrap();
        assert_eq!(k.len(), 1);
        assert!((k.probability_of(&full) - 1.0).abs() < 1e-15);
        let p = LevelProfile::new(&c, &full).unwrap();
        assert!((p.mass_at(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_set_rejected() {
        let c = generators::cycle(5).unwrap().chain;
        assert_eq!(LevelProfile::new(&c, &VertexSet::empty(&c)).unwrap_err(), Error::EmptySet);
    }

    #[test]
    fn even_cycle_alternating_set_flips() {
        let c = generators::cycle(6).unwrap().chain;
        let a = VertexSet::from_states(&c, [0, 2, 4]).unwrap();
        for u in [1e-6, 0.3, 0.5, 1.0] {
            let s = set_at_level(&c, &a, u).unwrap();
            assert_eq!(s, a.complement(&c), "u = {u}");
        }
        assert!(set_at_level(&c, &a, 0.0).unwrap().is_full());
        assert!(set_at_level(&c, &a, 1.5).is_err());
    }

    #[test]
    fn cycle_arc_crosses_at_half() {
        let c = generators::cycle(7).unwrap().chain;
        let a = VertexSet::from_states(&c, [1, 2, 3]).unwrap();
        let (lo, hi) = wp_interval(&c, &a).unwrap();
        assert!(lo <= 0.5 && 0.5 <= hi, "{lo} {hi}");
    }

    #[test]
    fn zero_steps_is_identity() {
        let c = generators::cycle(5).unwrap().chain;
        let s = VertexSet::from_states(&c, [2]).unwrap();
        let v = exact_doob_expectation(&c, &s, 0, |t| t.mass(), DEFAULT_NODE_BUDGET).unwrap();
        assert!((v - s.mass()).abs() < 1e-15);
    }

    #[test]
    fn budget_is_enforced() {
        let c = generators::cycle(9).unwrap().chain;
        let s = VertexSet::from_states(&c, [0]).unwrap();
        let err = evolve_exact(&c, &s, 6, true, 5).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }
}

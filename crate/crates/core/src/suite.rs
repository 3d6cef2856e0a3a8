//! Named inequality checks and the per-chain verification suite.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::congestion;
use crate::geometry::SetMeasures;
use crate::subsets;
use crate::{MarkovChain, Result, VertexSet};

/// Default slack tolerance for inequality suites.
pub const SUITE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Relation {
    /// `lhs >= rhs`
    Ge,
    /// `lhs <= rhs`
    Le,
    /// `lhs == rhs`
    Eq,
}

/// One evaluated comparison.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Check {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
}

impl Check {
    pub fn ge(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Check { name, lhs, rhs, relation: Relation::Ge }
    }

    pub fn le(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Check { name, lhs, rhs, relation: Relation::Le }
    }

    pub fn eq(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Check { name, lhs, rhs, relation: Relation::Eq }
    }

    /// Non-negative when the relation holds; NaN counts as a violation.
    pub fn slack(&self) -> f64 {
        let s = match self.relation {
            Relation::Ge => self.lhs - self.rhs,
            Relation::Le => self.rhs - self.lhs,
            Relation::Eq => -(self.lhs - self.rhs).abs(),
        };
        if s.is_nan() {
            f64::NEG_INFINITY
        } else {
            s
        }
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.slack() >= -tol
    }
}

/// Aggregated outcome of one named check over many instances.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CheckResult {
    pub name: String,
    pub worst_slack: f64,
    pub instances: usize,
    pub passed: bool,
}

/// Running per-name minimum slack.
#[derive(Clone, Debug, Default)]
pub struct SuiteAccumulator {
    worst: BTreeMap<String, (f64, usize)>,
}

impl SuiteAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, check: &Check) {
        self.add_slack(check.name, check.slack());
    }

    pub fn add_all<'a, I: IntoIterator<Item = &'a Check>>(&mut self, checks: I) {
        for c in checks {
            self.add(c);
        }
    }

    pub fn add_slack(&mut self, name: &str, slack: f64) {
        let e = self.worst.entry(name.into()).or_insert((f64::INFINITY, 0));
        e.0 = e.0.min(slack);
        e.1 += 1;
    }

    pub fn merge(&mut self, other: SuiteAccumulator) {
        for (name, (s, k)) in other.worst {
            let e = self.worst.entry(name).or_insert((f64::INFINITY, 0));
            e.0 = e.0.min(s);
            e.1 += k;
        }
    }

    pub fn finish(&self, tol: f64) -> Vec<CheckResult> {
        self.worst
            .iter()
            .map(|(name, &(s, k))| CheckResult { name: name.clone(), worst_slack: s, instances: k, passed: s >= -tol })
            .collect()
    }
}

/// A deliberate error injected into the suite to show it can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Reverses the direction of the first modified-conductance sandwich row.
    FlipSandwichSign,
}

/// Every set-level inequality for one proper subset.
pub fn set_checks(chain: &MarkovChain, a: &VertexSet, mutation: Option<Mutation>) -> Result<Vec<Check>> {
    let m = SetMeasures::new(chain, a)?;
    let mut out = congestion::sandwich_from_measures(&m)?;
    if mutation == Some(Mutation::FlipSandwichSign) {
        if let Some(first) = out.first_mut() {
            first.relation = Relation::Le;
        }
    }
    out.extend(congestion::pp_star_from_measures(&m));
    out.extend(congestion::conductance_sandwich_from_measures(chain, &m));
    if chain.min_holding() > 0.0 {
        out.extend(congestion::holding_from_measures(chain, &m)?);
    }
    out.extend(congestion::blocking_checks_from_measures(&m)?);
    out.extend(congestion::appendix_checks_from_measures(&m)?);
    out.push(congestion::martingale_check(&m));
    Ok(out)
}

/// Runs [`set_checks`] over every proper subset of `chain`.
pub fn chain_suite(chain: &MarkovChain, mutation: Option<Mutation>) -> Result<SuiteAccumulator> {
    subsets::check_enumerable(chain.n())?;
    let mut acc = SuiteAccumulator::new();
    for mask in subsets::proper_subsets(chain.n()) {
        let a = VertexSet::from_mask(chain, mask)?;
        acc.add_all(&set_checks(chain, &a, mutation)?);
    }
    Ok(acc)
}

/// Like [`chain_suite`] but only over masks in `[lo, hi)`, for splitting
/// work across threads.
pub fn chain_suite_range(chain: &MarkovChain, lo: u64, hi: u64, mutation: Option<Mutation>) -> Result<SuiteAccumulator> {
    subsets::check_enumerable(chain.n())?;
    let mut acc = SuiteAccumulator::new();
    for mask in subsets::proper_subsets_in(chain.n(), lo, hi) {
        let a = VertexSet::from_mask(chain, mask)?;
        acc.add_all(&set_checks(chain, &a, mutation)?);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn slack_signs() {
        assert_eq!(Check::ge("a", 2.0, 1.0).slack(), 1.0);
        assert_eq!(Check::le("a", 2.0, 1.0).slack(), -1.0);
        assert_eq!(Check::eq("a", 2.0, 1.5).slack(), -0.5);
        assert!(!Check::ge("a", f64::NAN, 0.0).holds(1.0));
    }

    #[test]
    fn mutation_is_detected() {
        let c = generators::random_chain(5, 3, generators::RandomKind::Dense).unwrap();
        let name = "modified sandwich: phi~ >= 1 - C_sqrtvar";
        let clean = chain_suite(&c, None).unwrap().finish(SUITE_TOL);
        assert!(clean.iter().find(|r| r.name == name).unwrap().passed);
        let bad = chain_suite(&c, Some(Mutation::FlipSandwichSign)).unwrap().finish(SUITE_TOL);
        assert!(!bad.iter().find(|r| r.name == name).unwrap().passed);
    }

    #[test]
    fn range_split_matches_whole() {
        let c = generators::random_chain(5, 9, generators::RandomKind::Sparse).unwrap();
        let whole = chain_suite(&c, None).unwrap().finish(SUITE_TOL);
        let mut a = chain_suite_range(&c, 0, 13, None).unwrap();
        a.merge(chain_suite_range(&c, 13, 32, None).unwrap());
        assert_eq!(whole, a.finish(SUITE_TOL));
    }
}

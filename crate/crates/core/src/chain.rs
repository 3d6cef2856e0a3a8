//! Validated Markov chains, state subsets and ergodic flow.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::linalg;
use crate::{Error, Result, DEFAULT_TOL};

/// Row sums may deviate from one by at most this much before rejection.
pub const ROW_SUM_TOL: f64 = 1e-9;
/// Tolerance for `pi P = pi`.
pub const STATIONARY_TOL: f64 = 1e-10;

/// A finite Markov chain: row-major transition matrix plus its stationary
/// distribution.
///
/// Chains built through [`MarkovChain::new`] are irreducible. Derived chains
/// (for example `P P*`) may be reducible; that is reported by
/// [`MarkovChain::is_irreducible`] rather than by failing.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MarkovChain {
    n: usize,
    p: Vec<f64>,
    pi: Vec<f64>,
    labels: Option<Vec<String>>,
    tol: f64,
    irreducible: bool,
}

impl MarkovChain {
    /// Builds a chain from rows of transition probabilities.
    ///
    /// Without `pi_hint` the stationary distribution is solved from
    /// `(P^T - I) pi = 0, sum(pi) = 1`.
    pub fn new(rows: &[Vec<f64>], pi_hint: Option<&[f64]>) -> Result<Self> {
        let n = rows.len();
        let mut p = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::Shape("matrix is not square"));
            }
            p.extend_from_slice(row);
        }
        Self::from_row_major(n, p, pi_hint)
    }

    pub fn from_row_major(n: usize, mut p: Vec<f64>, pi_hint: Option<&[f64]>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Shape("need at least two states"));
        }
        if p.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: p.len() });
        }
        for row in 0..n {
            for col in 0..n {
                let v = p[row * n + col];
                if !v.is_finite() || !(-DEFAULT_TOL..=1.0 + DEFAULT_TOL).contains(&v) {
                    return Err(Error::InvalidEntry { row, col, value: v });
                }
                p[row * n + col] = v.clamp(0.0, 1.0);
            }
            let sum: f64 = p[row * n..(row + 1) * n].iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::NonStochastic { row, sum });
            }
            // pull accepted rows onto the simplex; rows already within
            // rounding of 1 are left alone so reloading a chain is exact
            if (sum - 1.0).abs() > 4.0 * n as f64 * f64::EPSILON {
                for v in &mut p[row * n..(row + 1) * n] {
                    *v /= sum;
                }
            }
        }
        if !strongly_connected(n, &p) {
            return Err(Error::Reducible);
        }
        let pi = match pi_hint {
            Some(hint) => check_hint(n, &p, hint)?,
            None => solve_stationary(n, &p)?,
        };
        Ok(MarkovChain { n, p, pi, labels: None, tol: DEFAULT_TOL, irreducible: true })
    }

    /// Assembles a chain whose `pi` is already known to be stationary.
    fn derived(&self, p: Vec<f64>) -> Self {
        let irreducible = strongly_connected(self.n, &p);
        MarkovChain {
            n: self.n,
            p,
            pi: self.pi.clone(),
            labels: self.labels.clone(),
            tol: self.tol,
            irreducible,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Overrides the comparison tolerance (default `1e-12`).
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.n + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.p[x * self.n..(x + 1) * self.n]
    }

    /// Row-major transition matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.p
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// `pi_* = min_x pi(x)`.
    pub fn pi_min(&self) -> f64 {
        self.pi.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducible
    }

    /// Detailed balance `pi(x) P(x,y) = pi(y) P(y,x)` within the chain tolerance.
    pub fn is_reversible(&self) -> bool {
        (0..self.n).all(|x| {
            (x + 1..self.n)
                .all(|y| (self.pi[x] * self.p(x, y) - self.pi[y] * self.p(y, x)).abs() <= self.tol)
        })
    }

    /// `min_x P(x,x)`.
    pub fn min_holding(&self) -> f64 {
        (0..self.n).map(|x| self.p(x, x)).fold(f64::INFINITY, f64::min)
    }

    pub fn is_lazy(&self) -> bool {
        self.min_holding() >= 0.5 - self.tol
    }

    /// `Q(A, y)` for every state `y`.
    pub fn flow_from(&self, a: &VertexSet) -> Vec<f64> {
        let mut q = vec![0.0; self.n];
        for x in a.iter() {
            let w = self.pi[x];
            for (qy, &pxy) in q.iter_mut().zip(self.row(x)) {
                *qy += w * pxy;
            }
        }
        q
    }

    /// Ergodic flow `Q(A,B) = sum_{x in A, y in B} pi(x) P(x,y)`.
    pub fn ergodic_flow(&self, a: &VertexSet, b: &VertexSet) -> f64 {
        let mut total = 0.0;
        for x in a.iter() {
            let row = self.row(x);
            let inner: f64 = b.iter().map(|y| row[y]).sum();
            total += self.pi[x] * inner;
        }
        total
    }

    /// `P*(x,y) = pi(y) P(y,x) / pi(x)`.
    pub fn time_reversal(&self) -> MarkovChain {
        let n = self.n;
        let mut p = vec![0.0; n * n];
        for x in 0..n {
            for y in 0..n {
                p[x * n + y] = self.pi[y] * self.p(y, x) / self.pi[x];
            }
        }
        let mut rev = self.derived(p);
        rev.irreducible = self.irreducible;
        rev
    }

    /// `P P*`, reversible with respect to the same `pi`. May be reducible
    /// (for example when `P` is a permutation).
    pub fn multiplicative_reversibilization(&self) -> MarkovChain {
        let star = self.time_reversal();
        let p = linalg::mat_mul(&self.p, &star.p, self.n);
        self.derived(p)
    }

    /// Rescales `P` to `P' = c P + (1 - c) I` with `c = 1 / (2 (1 - gamma))`,
    /// so a chain holding with probability at least `gamma >= 1/2` becomes one
    /// holding with probability at least `1/2`.
    pub fn holding_speedup(&self, gamma: f64) -> Result<MarkovChain> {
        if !(gamma >= 0.5) {
            return Err(Error::GammaTooSmall(gamma));
        }
        for x in 0..self.n {
            if self.p(x, x) < gamma - self.tol || gamma >= 1.0 {
                return Err(Error::GammaNotHeld { state: x, holding: self.p(x, x) });
            }
        }
        let c = 1.0 / (2.0 * (1.0 - gamma));
        let n = self.n;
        let mut p: Vec<f64> = self.p.iter().map(|v| c * v).collect();
        for x in 0..n {
            p[x * n + x] += 1.0 - c;
            p[x * n + x] = p[x * n + x].clamp(0.0, 1.0);
        }
        Ok(self.derived(p))
    }
}

fn strongly_connected(n: usize, p: &[f64]) -> bool {
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for y in 0..n {
                let w = if forward { p[x * n + y] } else { p[y * n + x] };
                if w > 0.0 && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

fn stationary_residual(n: usize, p: &[f64], pi: &[f64]) -> f64 {
    let pp = linalg::vec_mat(pi, p, n);
    pp.iter().zip(pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn solve_stationary(n: usize, p: &[f64]) -> Result<Vec<f64>> {
    // rows 0..n-1 of (P^T - I) pi = 0, last row replaced by sum(pi) = 1
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = p[j * n + i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1) * n + j] = 1.0;
    }
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;
    let pi = linalg::solve(a, b, n).ok_or(Error::Singular)?;
    if pi.iter().any(|&v| !(v > 0.0)) || stationary_residual(n, p, &pi) > STATIONARY_TOL {
        return Err(Error::Singular);
    }
    let total: f64 = pi.iter().sum();
    Ok(pi.into_iter().map(|v| v / total).collect())
}

fn check_hint(n: usize, p: &[f64], hint: &[f64]) -> Result<Vec<f64>> {
    if hint.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: hint.len() });
    }
    if hint.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::BadPiHint("entries must be positive"));
    }
    let total: f64 = hint.iter().sum();
    if (total - 1.0).abs() > ROW_SUM_TOL {
        return Err(Error::BadPiHint("entries must sum to 1"));
    }
    let pi: Vec<f64> = hint.iter().map(|v| v / total).collect();
    if stationary_residual(n, p, &pi) > STATIONARY_TOL {
        return Err(Error::BadPiHint("pi P != pi"));
    }
    Ok(pi)
}

/// A subset of states with its cached stationary mass.
#[derive(Clone, Debug)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
    mass: f64,
}

impl PartialEq for VertexSet {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.words == other.words
    }
}

impl Eq for VertexSet {}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VertexSet {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        (self.n, &self.words).cmp(&(other.n, &other.words))
    }
}

fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

impl VertexSet {
    fn from_words(chain: &MarkovChain, words: Vec<u64>) -> Self {
        let mut set = VertexSet { n: chain.n, words, mass: 0.0 };
        // exactly 1 for the full space: kernels like sqrt(a(1-a)) amplify
        // a rounding error of 1e-16 at a = 1 to 1e-8
        set.mass = if set.len() == chain.n { 1.0 } else { set.iter().fold(0.0, |acc, x| acc + chain.pi[x]) };
        set
    }

    pub fn empty(chain: &MarkovChain) -> Self {
        VertexSet { n: chain.n, words: vec![0; word_count(chain.n)], mass: 0.0 }
    }

    pub fn full(chain: &MarkovChain) -> Self {
        let n = chain.n;
        let mut words = vec![u64::MAX; word_count(n)];
        if !n.is_multiple_of(64) {
            *words.last_mut().unwrap() = (1u64 << (n % 64)) - 1;
        }
        Self::from_words(chain, words)
    }

    pub fn singleton(chain: &MarkovChain, x: usize) -> Result<Self> {
        Self::from_states(chain, [x])
    }

    pub fn from_states<I: IntoIterator<Item = usize>>(chain: &MarkovChain, states: I) -> Result<Self> {
        let mut words = vec![0u64; word_count(chain.n)];
        for x in states {
            if x >= chain.n {
                return Err(Error::StateOutOfRange(x));
            }
            words[x / 64] |= 1 << (x % 64);
        }
        Ok(Self::from_words(chain, words))
    }

    /// Set from the low `n` bits of `mask`; requires `n <= 64`.
    pub fn from_mask(chain: &MarkovChain, mask: u64) -> Result<Self> {
        if chain.n > 64 {
            return Err(Error::TooManyStates { n: chain.n, max: 64 });
        }
        if chain.n < 64 && mask >> chain.n != 0 {
            return Err(Error::StateOutOfRange(63 - mask.leading_zeros() as usize));
        }
        Ok(Self::from_words(chain, vec![mask]))
    }

    pub fn complement(&self, chain: &MarkovChain) -> Self {
        let full = Self::full(chain);
        let words = self.words.iter().zip(&full.words).map(|(a, f)| !a & f).collect();
        Self::from_words(chain, words)
    }

    /// Stationary mass `pi(A)`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn state_count(&self) -> usize {
        self.n
    }

    pub fn contains(&self, x: usize) -> bool {
        x < self.n && self.words[x / 64] >> (x % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n
    }

    /// Proper nonempty subset.
    pub fn is_proper(&self) -> bool {
        !self.is_empty() && !self.is_full()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Member states in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + bit)
            })
        })
    }

    /// Bitmask when the chain has at most 64 states.
    pub fn mask(&self) -> Option<u64> {
        (self.n <= 64).then(|| self.words[0])
    }

    /// Lowercase hex of the membership bitmask, most significant word first.
    pub fn to_hex(&self) -> String {
        let mut s = String::new();
        let mut started = false;
        for &w in self.words.iter().rev() {
            if !started {
                if w == 0 {
                    continue;
                }
                let _ = write!(s, "{w:x}");
                started = true;
            } else {
                let _ = write!(s, "{w:016x}");
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn two_point(g: f64) -> MarkovChain {
        MarkovChain::new(&[vec![g, 1.0 - g], vec![1.0 - g, g]], None).unwrap()
    }

    #[test]
    fn full_space_has_unit_mass_exactly() {
        let c = MarkovChain::new(&[vec![0.1, 0.2, 0.7], vec![0.3, 0.3, 0.4], vec![0.6, 0.1, 0.3]], None).unwrap();
        assert_eq!(VertexSet::full(&c).mass(), 1.0);
        assert_eq!(VertexSet::from_mask(&c, 0b111).unwrap().mass(), 1.0);
    }

    #[test]
    fn two_point_is_uniform() {
        let c = two_point(0.3);
        assert!((c.pi()[0] - 0.5).abs() < 1e-15);
        assert!(c.is_reversible());
    }

    #[test]
    fn identity_is_reducible() {
        let err = MarkovChain::new(&[vec![1.0, 0.0], vec![0.0, 1.0]], None).unwrap_err();
        assert_eq!(err, Error::Reducible);
    }

    #[test]
    fn rejects_bad_rows() {
        let err = MarkovChain::new(&[vec![0.5, 0.4], vec![0.5, 0.5]], None).unwrap_err();
        assert!(matches!(err, Error::NonStochastic { row: 0, .. }));
        let err = MarkovChain::new(&[vec![1.5, -0.5], vec![0.5, 0.5]], None).unwrap_err();
        assert!(matches!(err, Error::InvalidEntry { .. }));
        let err = MarkovChain::new(&[vec![1.0]], None).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn pi_hint_checked() {
        let rows = [vec![0.5, 0.5], vec![0.25, 0.75]];
        let c = MarkovChain::new(&rows, Some(&[1.0 / 3.0, 2.0 / 3.0])).unwrap();
        assert!((c.pi()[1] - 2.0 / 3.0).abs() < 1e-15);
        let err = MarkovChain::new(&rows, Some(&[0.5, 0.5])).unwrap_err();
        assert!(matches!(err, Error::BadPiHint(_)));
    }

    #[test]
    fn periodic_chains_accepted() {
        let c = MarkovChain::new(&[vec![0.0, 1.0], vec![1.0, 0.0]], None).unwrap();
        assert_eq!(c.min_holding(), 0.0);
    }

    #[test]
    fn three_cycle_reversal_runs_backwards() {
        let rows = [vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]];
        let c = MarkovChain::new(&rows, None).unwrap();
        let r = c.time_reversal();
        for x in 0..3 {
            assert!((r.p(x, (x + 2) % 3) - 1.0).abs() < 1e-15);
        }
        let pps = c.multiplicative_reversibilization();
        assert!(!pps.is_irreducible());
        for x in 0..3 {
            assert!((pps.p(x, x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn speedup_of_two_point() {
        let c = two_point(0.75);
        let fast = c.holding_speedup(0.75).unwrap();
        assert!((fast.p(0, 0) - 0.5).abs() < 1e-15);
        assert!((fast.p(0, 1) - 0.5).abs() < 1e-15);
        let same = c.holding_speedup(0.5).unwrap();
        assert!((same.p(0, 0) - 0.75).abs() < 1e-15);
        assert!(matches!(c.holding_speedup(0.4), Err(Error::GammaTooSmall(_))));
        assert!(matches!(c.holding_speedup(0.8), Err(Error::GammaNotHeld { .. })));
    }

    #[test]
    fn vertex_set_basics() {
        let c = two_point(0.2);
        let a = VertexSet::singleton(&c, 1).unwrap();
        assert_eq!(a.mask(), Some(2));
        assert_eq!(a.complement(&c).mask(), Some(1));
        assert!((a.mass() - 0.5).abs() < 1e-15);
        assert_eq!(a.to_hex(), "2");
        assert!(VertexSet::full(&c).is_full());
        assert!(VertexSet::from_mask(&c, 4).is_err());
        let full = VertexSet::full(&c);
        assert!((c.ergodic_flow(&full, &full) - 1.0).abs() < 1e-15);
    }
}

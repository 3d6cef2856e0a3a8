//! Example chains with known closed-form quantities, random test chains and
//! the vertex-expansion check for Eulerian walks.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::geometry::{Normalization, SetMeasures};
use crate::oracle::{self, Metric};
use crate::subsets;
use crate::suite::CheckResult;
use crate::{CongestionKernel, Error, MarkovChain, Result, VertexSet};

/// Which sets an expectation ranges over.
#[derive(Clone, Debug)]
pub enum Scope {
    Set(VertexSet),
    /// Every proper nonempty subset.
    All,
    /// Proper subsets with `pi(A) <= r`.
    MassAtMost(f64),
    /// Proper subsets with `pi(A) <= r`, other than the given one.
    MassAtMostExcept(f64, VertexSet),
    /// A property of the chain rather than of a set.
    Chain,
}

/// How values over a scope are combined before comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Aggregate {
    Each,
    Min,
    Max,
}

#[derive(Clone, Debug)]
pub enum Quantity {
    Congestion(CongestionKernel),
    OneMinusCongestion(CongestionKernel),
    Conductance(Normalization),
    ModifiedConductance(Normalization),
    Psi,
    PsiPlus,
    /// Distance from `1/2` to the crossing interval (zero when it contains `1/2`).
    WpHalfGap,
    WorstDistance { metric: Metric, n: usize },
    MinHolding,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Expect {
    Equal { value: f64, tol: f64 },
    AtLeast { value: f64, tol: f64 },
    AtMost { value: f64, tol: f64 },
    /// `|x - value| <= rel |value|`
    WithinRelative { value: f64, rel: f64 },
}

impl Expect {
    /// Signed margin; the expectation holds when this is non-negative.
    fn margin(self, x: f64) -> f64 {
        let m = match self {
            Expect::Equal { value, tol } => tol - (x - value).abs(),
            Expect::AtLeast { value, tol } => x - value + tol,
            Expect::AtMost { value, tol } => value - x + tol,
            Expect::WithinRelative { value, rel } => rel * value.abs() - (x - value).abs(),
        };
        if m.is_nan() {
            f64::NEG_INFINITY
        } else {
            m
        }
    }
}

/// A machine-checkable statement about an example chain.
#[derive(Clone, Debug)]
pub struct Expectation {
    pub label: String,
    pub quantity: Quantity,
    pub scope: Scope,
    pub aggregate: Aggregate,
    pub expect: Expect,
}

const EXACT: f64 = 1e-12;

fn eq(value: f64) -> Expect {
    Expect::Equal { value, tol: EXACT }
}

fn at_least(value: f64) -> Expect {
    Expect::AtLeast { value, tol: EXACT }
}

fn at_most(value: f64) -> Expect {
    Expect::AtMost { value, tol: EXACT }
}

impl Expectation {
    pub fn new(label: impl Into<String>, quantity: Quantity, scope: Scope, aggregate: Aggregate, expect: Expect) -> Self {
        Expectation { label: label.into(), quantity, scope, aggregate, expect }
    }

    fn sets(&self, chain: &MarkovChain) -> Result<Vec<VertexSet>> {
        let filtered = |limit: f64, skip: Option<&VertexSet>| -> Result<Vec<VertexSet>> {
            subsets::check_enumerable(chain.n())?;
            let mut out = Vec::new();
            for mask in subsets::proper_subsets(chain.n()) {
                let a = VertexSet::from_mask(chain, mask)?;
                if a.mass() <= limit + EXACT && skip != Some(&a) {
                    out.push(a);
                }
            }
            Ok(out)
        };
        match &self.scope {
            Scope::Set(a) => Ok(vec![a.clone()]),
            Scope::All => filtered(1.0, None),
            Scope::MassAtMost(r) => filtered(*r, None),
            Scope::MassAtMostExcept(r, a) => filtered(*r, Some(a)),
            Scope::Chain => Ok(Vec::new()),
        }
    }

    fn set_value(&self, chain: &MarkovChain, a: &VertexSet) -> Result<f64> {
        let m = SetMeasures::new(chain, a)?;
        Ok(match &self.quantity {
            Quantity::Congestion(k) => m.congestion(k)?,
            Quantity::OneMinusCongestion(k) => 1.0 - m.congestion(k)?,
            Quantity::Conductance(norm) => m.eval(&crate::geometry::SetQuantity::Conductance(*norm))?,
            Quantity::ModifiedConductance(norm) => {
                m.eval(&crate::geometry::SetQuantity::ModifiedConductance(*norm))?
            }
            Quantity::Psi => m.psi(),
            Quantity::PsiPlus => m.blocking().plus,
            Quantity::WpHalfGap => m.eval(&crate::geometry::SetQuantity::WpHalfGap)?,
            Quantity::WorstDistance { .. } | Quantity::MinHolding => {
                return Err(Error::BadArgument("chain quantity used with a set scope"));
            }
        })
    }

    /// Values the comparison is applied to (one per set for `Each`).
    pub fn evaluate(&self, chain: &MarkovChain) -> Result<Vec<f64>> {
        let raw = match (&self.quantity, &self.scope) {
            (Quantity::WorstDistance { metric, n }, Scope::Chain) => {
                vec![oracle::worst_start_distance(chain, *n, *metric)]
            }
            (Quantity::MinHolding, Scope::Chain) => vec![chain.min_holding()],
            (_, Scope::Chain) => return Err(Error::BadArgument("set quantity used with the chain scope")),
            _ => {
                let sets = self.sets(chain)?;
                let mut vals = Vec::with_capacity(sets.len());
                for a in &sets {
                    vals.push(self.set_value(chain, a)?);
                }
                vals
            }
        };
        Ok(match self.aggregate {
            Aggregate::Each => raw,
            Aggregate::Min => vec![raw.into_iter().fold(f64::INFINITY, f64::min)],
            Aggregate::Max => vec![raw.into_iter().fold(f64::NEG_INFINITY, f64::max)],
        })
    }

    pub fn check(&self, chain: &MarkovChain) -> Result<CheckResult> {
        let vals = self.evaluate(chain)?;
        let worst = vals.iter().map(|&x| self.expect.margin(x)).fold(f64::INFINITY, f64::min);
        Ok(CheckResult { name: self.label.clone(), worst_slack: worst, instances: vals.len(), passed: worst >= 0.0 })
    }
}

/// A generated chain together with statements it is known to satisfy.
#[derive(Clone, Debug)]
pub struct NamedExample {
    pub name: String,
    pub chain: MarkovChain,
    pub parameters: BTreeMap<String, f64>,
    pub expectations: Vec<Expectation>,
}

impl NamedExample {
    fn new(name: String, chain: MarkovChain) -> Self {
        NamedExample { name, chain, parameters: BTreeMap::new(), expectations: Vec::new() }
    }

    fn param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.into(), value);
        self
    }

    fn expect(mut self, e: Expectation) -> Self {
        self.expectations.push(e);
        self
    }

    pub fn verify(&self) -> Result<Vec<CheckResult>> {
        self.expectations.iter().map(|e| e.check(&self.chain)).collect()
    }
}

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// `P = [[gamma, 1-gamma], [1-gamma, gamma]]`.
pub fn two_point(gamma: f64) -> Result<NamedExample> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::BadArgument("gamma must lie in [0, 1)"));
    }
    let rows = [vec![gamma, 1.0 - gamma], vec![1.0 - gamma, gamma]];
    let chain = MarkovChain::new(&rows, Some(&uniform(2)))?;
    let a = VertexSet::singleton(&chain, 0)?;
    Ok(NamedExample::new(format!("two-point(gamma={gamma})"), chain)
        .param("gamma", gamma)
        .expect(Expectation::new(
            "1 - C_sqrtvar({0}) = 2 min(gamma, 1 - gamma)",
            Quantity::OneMinusCongestion(CongestionKernel::sqrt_variance()),
            Scope::Set(a.clone()),
            Aggregate::Each,
            eq(2.0 * gamma.min(1.0 - gamma)),
        ))
        .expect(Expectation::new(
            "Phi~({0}) = 2(1 - gamma)",
            Quantity::Conductance(Normalization::Product),
            Scope::Set(a),
            Aggregate::Each,
            eq(2.0 * (1.0 - gamma)),
        )))
}

/// `P = alpha I + (1 - alpha) J/m`: jump uniformly (possibly in place) with
/// probability `1 - alpha`.
pub fn complete_graph(m: usize, alpha: f64) -> Result<NamedExample> {
    if m < 2 {
        return Err(Error::BadArgument("complete graph needs m >= 2"));
    }
    let lo = -1.0 / (m as f64 - 1.0);
    if !(alpha >= lo - EXACT && alpha <= 1.0) {
        return Err(Error::BadAlpha(alpha));
    }
    let off = (1.0 - alpha) / m as f64;
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|x| (0..m).map(|y| if x == y { (alpha + off).max(0.0) } else { off }).collect())
        .collect();
    let chain = MarkovChain::new(&rows, Some(&uniform(m)))?;
    let mf = m as f64;
    let abs = alpha.abs();
    let mut ex = NamedExample::new(format!("complete(m={m}, alpha={alpha})"), chain)
        .param("m", mf)
        .param("alpha", alpha)
        .expect(Expectation::new(
            "C_var(A) = |alpha| for every A",
            Quantity::Congestion(CongestionKernel::variance()),
            Scope::All,
            Aggregate::Each,
            eq(abs),
        ))
        .expect(Expectation::new(
            "C_sqrtvar(A) = |alpha| for every A",
            Quantity::Congestion(CongestionKernel::sqrt_variance()),
            Scope::All,
            Aggregate::Each,
            eq(abs),
        ))
        .expect(Expectation::new(
            "min holding = alpha + (1 - alpha)/m",
            Quantity::MinHolding,
            Scope::Chain,
            Aggregate::Each,
            eq(alpha + off),
        ));
    if alpha >= 0.0 {
        ex = ex.expect(Expectation::new(
            "C_ent(A) = alpha for every A",
            Quantity::Congestion(CongestionKernel::entropy()),
            Scope::All,
            Aggregate::Each,
            eq(alpha),
        ));
    }
    for n in 0..=6usize {
        let decay = libm::pow(abs, n as f64);
        ex = ex
            .expect(Expectation::new(
                format!("TV at n={n} is |alpha|^n (1 - 1/m)"),
                Quantity::WorstDistance { metric: Metric::TotalVariation, n },
                Scope::Chain,
                Aggregate::Each,
                eq(decay * (1.0 - 1.0 / mf)),
            ))
            .expect(Expectation::new(
                format!("L2 at n={n} is |alpha|^n sqrt(m - 1)"),
                Quantity::WorstDistance { metric: Metric::L2, n },
                Scope::Chain,
                Aggregate::Each,
                eq(decay * libm::sqrt(mf - 1.0)),
            ));
    }
    Ok(ex)
}

/// Simple random walk on the cycle `Z_m`.
pub fn cycle(m: usize) -> Result<NamedExample> {
    if m < 3 {
        return Err(Error::BadArgument("cycle needs m >= 3"));
    }
    let mut rows = vec![vec![0.0; m]; m];
    for (x, row) in rows.iter_mut().enumerate() {
        row[(x + 1) % m] += 0.5;
        row[(x + m - 1) % m] += 0.5;
    }
    let chain = MarkovChain::new(&rows, Some(&uniform(m)))?;
    let mf = m as f64;
    let mut ex = NamedExample::new(format!("cycle(m={m})"), chain).param("m", mf);
    if m.is_multiple_of(2) {
        ex = ex.expect(Expectation::new(
            "min phi~ = 0 (bipartite)",
            Quantity::ModifiedConductance(Normalization::Product),
            Scope::All,
            Aggregate::Min,
            eq(0.0),
        ));
    } else {
        let lam = libm::cos(core::f64::consts::PI / mf);
        ex = ex
            .expect(Expectation::new("min Psi(A) = 1/(2m)", Quantity::Psi, Scope::All, Aggregate::Min, eq(0.5 / mf)))
            .expect(Expectation::new(
                "crossing interval contains 1/2 for every A",
                Quantity::WpHalfGap,
                Scope::All,
                Aggregate::Max,
                at_most(0.0),
            ));
        for n in [0usize, 1, 5, 10, 25] {
            let c = libm::pow(lam, n as f64);
            ex = ex
                .expect(Expectation::new(
                    format!("TV at n={n} <= (1 - 1/m) cos^n(pi/m)"),
                    Quantity::WorstDistance { metric: Metric::TotalVariation, n },
                    Scope::Chain,
                    Aggregate::Each,
                    at_most((1.0 - 1.0 / mf) * c),
                ))
                .expect(Expectation::new(
                    format!("TV at n={n} >= cos^n(pi/m)/2"),
                    Quantity::WorstDistance { metric: Metric::TotalVariation, n },
                    Scope::Chain,
                    Aggregate::Each,
                    at_least(0.5 * c),
                ));
        }
    }
    Ok(ex)
}

/// Simple random walk on `K_{m,m}`; states `0..m` form one side.
pub fn complete_bipartite(m: usize) -> Result<NamedExample> {
    if m < 1 {
        return Err(Error::BadArgument("complete bipartite graph needs m >= 1"));
    }
    let n = 2 * m;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|x| (0..n).map(|y| if (x < m) != (y < m) { 1.0 / m as f64 } else { 0.0 }).collect())
        .collect();
    let chain = MarkovChain::new(&rows, Some(&uniform(n)))?;
    let side = VertexSet::from_states(&chain, 0..m)?;
    Ok(NamedExample::new(format!("bipartite(m={m})"), chain)
        .param("m", m as f64)
        .expect(Expectation::new("Psi(side) = 0", Quantity::Psi, Scope::Set(side.clone()), Aggregate::Each, eq(0.0)))
        .expect(Expectation::new(
            "Phi~(side) = 2",
            Quantity::Conductance(Normalization::Product),
            Scope::Set(side),
            Aggregate::Each,
            eq(2.0),
        )))
}

/// Largest dimension accepted by [`lazy_hypercube`].
pub const MAX_CUBE_DIM: usize = 12;

/// Lazy walk on `{0,1}^d`: hold with probability 1/2, else flip a uniform
/// coordinate.
pub fn lazy_hypercube(d: usize) -> Result<NamedExample> {
    if d == 0 {
        return Err(Error::BadArgument("dimension must be positive"));
    }
    if d > MAX_CUBE_DIM {
        return Err(Error::TooLarge(d));
    }
    let n = 1usize << d;
    let mut p = vec![0.0; n * n];
    let step = 0.5 / d as f64;
    for x in 0..n {
        p[x * n + x] = 0.5;
        for i in 0..d {
            p[x * n + (x ^ (1 << i))] = step;
        }
    }
    let chain = MarkovChain::from_row_major(n, p, Some(&uniform(n)))?;
    let a = VertexSet::singleton(&chain, 0)?;
    let df = d as f64;
    let nf = n as f64;
    // A_u is {0} plus its neighbours up to 1/(2d), {0} up to 1/2, then empty.
    let g = |x: f64| x * (1.0 - x);
    let c_var = (step * g((df + 1.0) / nf) + (0.5 - step) * g(1.0 / nf)) / g(1.0 / nf);
    Ok(NamedExample::new(format!("lazy-hypercube(d={d})"), chain)
        .param("d", df)
        .expect(Expectation::new(
            "1 - C_sqrtvar({x}) within 20% of 1/2 - 1/(2 sqrt(d))",
            Quantity::OneMinusCongestion(CongestionKernel::sqrt_variance()),
            Scope::Set(a.clone()),
            Aggregate::Each,
            Expect::WithinRelative { value: 0.5 - 0.5 / libm::sqrt(df), rel: 0.2 },
        ))
        .expect(Expectation::new(
            "1 - C_var({x}) matches the three-level closed form",
            Quantity::OneMinusCongestion(CongestionKernel::variance()),
            Scope::Set(a),
            Aggregate::Each,
            eq(1.0 - c_var),
        )))
}

/// `K_m` with one extra vertex `v = m` attached to vertex 0, under the lazy
/// max-degree walk (each neighbour with probability `1/(2m)`).
pub fn pendant_complete(m: usize) -> Result<NamedExample> {
    if m < 3 {
        return Err(Error::BadArgument("pendant example needs m >= 3"));
    }
    let n = m + 1;
    let step = 0.5 / m as f64;
    let mut rows = vec![vec![0.0; n]; n];
    let link = |rows: &mut Vec<Vec<f64>>, x: usize, y: usize| {
        rows[x][y] = step;
        rows[y][x] = step;
    };
    for x in 0..m {
        for y in x + 1..m {
            link(&mut rows, x, y);
        }
    }
    link(&mut rows, 0, m);
    for (x, row) in rows.iter_mut().enumerate() {
        let out: f64 = row.iter().sum();
        row[x] = 1.0 - out;
    }
    let chain = MarkovChain::new(&rows, Some(&uniform(n)))?;
    let v = VertexSet::singleton(&chain, m)?;
    Ok(NamedExample::new(format!("pendant-complete(m={m})"), chain)
        .param("m", m as f64)
        .expect(Expectation::new(
            "psi+({v}) >= 1/(2m)",
            Quantity::PsiPlus,
            Scope::Set(v.clone()),
            Aggregate::Each,
            at_least(step),
        ))
        .expect(Expectation::new(
            "Phi(A) >= 1/8 for pi(A) <= 1/2, A != {v}",
            Quantity::Conductance(Normalization::Min),
            Scope::MassAtMostExcept(0.5, v),
            Aggregate::Min,
            at_least(0.125),
        )))
}

/// Outcome of the vertex-expansion check.
#[derive(Clone, Debug, PartialEq)]
pub enum Expansion {
    Holds,
    /// First `(A, v)` with `pi(A) <= 1/2`, `v` in `N(A)` and `pi(N(A) \ v) < pi(A)`.
    Fails { set: VertexSet, vertex: usize },
}

/// Checks `pi(N(A) \ v) >= pi(A)` for every `A` with `pi(A) <= 1/2` and every
/// `v` in the out-neighbourhood `N(A) = {x : Q(A,x) > 0}`.
pub fn expansion_condition(chain: &MarkovChain) -> Result<Expansion> {
    let n = chain.n();
    subsets::check_enumerable(n)?;
    let out: Vec<u64> = (0..n)
        .map(|x| (0..n).filter(|&y| chain.p(x, y) > 0.0).fold(0u64, |m, y| m | (1 << y)))
        .collect();
    let pi = chain.pi();
    let mass = |mask: u64| (0..n).filter(|&y| mask >> y & 1 == 1).map(|y| pi[y]).sum::<f64>();
    for mask in subsets::proper_subsets(n) {
        let a = VertexSet::from_mask(chain, mask)?;
        if a.mass() > 0.5 + EXACT {
            continue;
        }
        let nb = a.iter().fold(0u64, |m, x| m | out[x]);
        let total = mass(nb);
        for v in (0..n).filter(|&v| nb >> v & 1 == 1) {
            if total - pi[v] < a.mass() - EXACT {
                return Ok(Expansion::Fails { set: a, vertex: v });
            }
        }
    }
    Ok(Expansion::Holds)
}

/// Simple random walk on a directed multigraph with in-degree equal to
/// out-degree everywhere: `P(x,y) = mult(x,y)/deg(x)`, `pi(x) = deg(x)/m`.
/// The lazy variant holds with probability 1/2.
pub fn eulerian_walk(vertices: usize, edges: &[(usize, usize)], lazy: bool) -> Result<NamedExample> {
    if vertices < 2 {
        return Err(Error::BadArgument("need at least two vertices"));
    }
    let mut out_deg = vec![0usize; vertices];
    let mut in_deg = vec![0usize; vertices];
    let mut mult = vec![0usize; vertices * vertices];
    for &(x, y) in edges {
        if x >= vertices || y >= vertices {
            return Err(Error::StateOutOfRange(x.max(y)));
        }
        out_deg[x] += 1;
        in_deg[y] += 1;
        mult[x * vertices + y] += 1;
    }
    if let Some(v) = (0..vertices).find(|&v| out_deg[v] != in_deg[v]) {
        return Err(Error::NotBalanced { vertex: v });
    }
    if out_deg.contains(&0) {
        return Err(Error::NotConnected);
    }
    let m = edges.len();
    let mut p = vec![0.0; vertices * vertices];
    for x in 0..vertices {
        for y in 0..vertices {
            let w = mult[x * vertices + y] as f64 / out_deg[x] as f64;
            p[x * vertices + y] = if lazy { 0.5 * w } else { w };
        }
        if lazy {
            p[x * vertices + x] += 0.5;
        }
    }
    let pi: Vec<f64> = out_deg.iter().map(|&d| d as f64 / m as f64).collect();
    let chain = match MarkovChain::from_row_major(vertices, p, Some(&pi)) {
        Err(Error::Reducible) => return Err(Error::NotConnected),
        other => other?,
    };
    let mf = m as f64;
    let name = format!("eulerian(vertices={vertices}, edges={m}, lazy={lazy})");
    let mut ex = NamedExample::new(name, chain).param("edges", mf).param("lazy", if lazy { 1.0 } else { 0.0 });
    if vertices <= crate::MAX_ENUM_STATES {
        if lazy {
            ex = ex.expect(Expectation::new(
                "min Psi(A) >= 1/(2m) over pi(A) <= 1/2",
                Quantity::Psi,
                Scope::MassAtMost(0.5),
                Aggregate::Min,
                at_least(0.5 / mf),
            ));
        } else if expansion_condition(&ex.chain)? == Expansion::Holds {
            ex = ex.expect(Expectation::new(
                "min Psi(A) >= 1/m over pi(A) <= 1/2",
                Quantity::Psi,
                Scope::MassAtMost(0.5),
                Aggregate::Min,
                at_least(1.0 / mf),
            ));
        }
    }
    Ok(ex)
}

/// Each undirected edge `{x,y}` as the two arcs `x -> y`, `y -> x`.
pub fn undirected(edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    edges.iter().flat_map(|&(x, y)| [(x, y), (y, x)]).collect()
}

/// Uniform draw from `[0, 1)` with 53 random bits.
pub(crate) fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Shapes of random test chains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomKind {
    /// Every entry positive.
    Dense,
    /// About half the entries zero, plus the arcs `x -> x+1` for irreducibility.
    Sparse,
    /// A sparse chain made lazy: `(I + P)/2`.
    Lazy,
}

/// A reproducible random chain on `n` states.
pub fn random_chain(n: usize, seed: u64, kind: RandomKind) -> Result<MarkovChain> {
    if n < 2 {
        return Err(Error::Shape("need at least two states"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![vec![0.0; n]; n];
    for (x, row) in rows.iter_mut().enumerate() {
        for (y, v) in row.iter_mut().enumerate() {
            let w = 1.0 - unit(&mut rng);
            let keep = kind == RandomKind::Dense || y == (x + 1) % n || unit(&mut rng) < 0.5;
            *v = if keep { w } else { 0.0 };
        }
        let total: f64 = row.iter().sum();
        for v in row.iter_mut() {
            *v /= total;
        }
        if kind == RandomKind::Lazy {
            for v in row.iter_mut() {
                *v *= 0.5;
            }
            row[x] += 0.5;
        }
    }
    MarkovChain::new(&rows, None)
}

/// Union of `cycles` random Hamiltonian cycles on `n` vertices: balanced and
/// strongly connected, possibly with repeated arcs.
pub fn random_balanced_digraph(n: usize, cycles: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n * cycles);
    for _ in 0..cycles {
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            order.swap(i, j);
        }
        for i in 0..n {
            edges.push((order[i], order[(i + 1) % n]));
        }
    }
    edges
}

/// Every named example at a default size, for suite runs and the CLI.
pub fn catalog() -> Result<Vec<NamedExample>> {
    let cycle5: Vec<(usize, usize)> = undirected(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
    Ok(vec![
        two_point(0.25)?,
        two_point(0.75)?,
        complete_graph(5, 0.3)?,
        complete_graph(5, -0.25)?,
        cycle(5)?,
        cycle(6)?,
        complete_bipartite(3)?,
        lazy_hypercube(3)?,
        pendant_complete(6)?,
        eulerian_walk(5, &cycle5, false)?,
        eulerian_walk(5, &cycle5, true)?,
    ])
}

/// Builds a named example from a generator name and parameter list, as used
/// by the `generate` command.
pub fn by_name(name: &str, params: &[f64]) -> Result<NamedExample> {
    let int = |i: usize| -> Result<usize> {
        let v = *params.get(i).ok_or(Error::BadArgument("missing parameter"))?;
        if v < 0.0 || libm::trunc(v) != v {
            return Err(Error::BadArgument("expected a non-negative integer parameter"));
        }
        Ok(v as usize)
    };
    let real = |i: usize| params.get(i).copied().ok_or(Error::BadArgument("missing parameter"));
    match name {
        "two-point" => two_point(real(0)?),
        "complete" => complete_graph(int(0)?, real(1)?),
        "cycle" => cycle(int(0)?),
        "bipartite" => complete_bipartite(int(0)?),
        "hypercube" => lazy_hypercube(int(0)?),
        "pendant" => pendant_complete(int(0)?),
        "eulerian" => {
            // vertices, cycles, seed, lazy
            let n = int(0)?;
            let edges = random_balanced_digraph(n, int(1)?, int(2)? as u64);
            eulerian_walk(n, &edges, params.get(3).is_some_and(|&l| l != 0.0))
        }
        _ => Err(Error::BadArgument("unknown generator")),
    }
}

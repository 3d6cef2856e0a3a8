//! Conductance, the flow function `Psi(A,t)`, modified conductance and their
//! profiles.

use alloc::vec::Vec;
use core::cell::OnceCell;

use crate::congestion::{self, BlockingPsis};
use crate::levels::LevelProfile;
use crate::subsets::{self, Direction, ProfileAccumulator, ProfileTable};
use crate::{CongestionKernel, Error, MarkovChain, Result, VertexSet};

/// How a boundary quantity is normalized by set size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Normalization {
    /// Divide by `min{pi(A), pi(A^c)}`.
    Min,
    /// Divide by `pi(A) pi(A^c)`.
    Product,
    /// Divide by `pi(A)`.
    Mass,
}

impl Normalization {
    fn denominator(self, mass: f64) -> f64 {
        let comp = 1.0 - mass;
        match self {
            Normalization::Min => mass.min(comp),
            Normalization::Product => mass * comp,
            Normalization::Mass => mass,
        }
    }
}

fn require_proper(a: &VertexSet) -> Result<()> {
    if a.is_proper() {
        Ok(())
    } else {
        Err(Error::TrivialSet)
    }
}

/// `Q(A, A^c)`.
pub fn boundary_flow(chain: &MarkovChain, a: &VertexSet) -> f64 {
    let q = chain.flow_from(a);
    (0..chain.n()).filter(|&y| !a.contains(y)).map(|y| q[y]).sum()
}

/// `Q(A,A^c)` normalized as requested: `Phi(A)` for `Min`, `Phi~(A)` for `Product`.
pub fn conductance(chain: &MarkovChain, a: &VertexSet, norm: Normalization) -> Result<f64> {
    require_proper(a)?;
    Ok(boundary_flow(chain, a) / norm.denominator(a.mass()))
}

/// Greedy evaluation of `Psi` from per-state ratios `Q(A,v)/pi(v)`: fill mass
/// `t` with the lowest-ratio states first, splitting the pivot state.
fn psi_greedy(pi: &[f64], ratios: &[f64], t: f64) -> f64 {
    let mut order: Vec<usize> = (0..pi.len()).collect();
    order.sort_by(|&x, &y| ratios[x].total_cmp(&ratios[y]).then(x.cmp(&y)));
    let mut filled = 0.0;
    let mut value = 0.0;
    for v in order {
        if filled + pi[v] <= t {
            filled += pi[v];
            value += pi[v] * ratios[v];
        } else {
            value += (t - filled).max(0.0) * ratios[v];
            break;
        }
    }
    value
}

fn raw_ratios(chain: &MarkovChain, a: &VertexSet) -> Vec<f64> {
    chain.flow_from(a).iter().zip(chain.pi()).map(|(q, p)| q / p).collect()
}

/// `Psi(A,t)`: the least flow from `A` into a (fractionally completed) set of
/// mass exactly `t`.
pub fn psi_flow(chain: &MarkovChain, a: &VertexSet, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::BadT(t));
    }
    Ok(psi_greedy(chain.pi(), &raw_ratios(chain, a), t))
}

/// `Psi(A,t)` with the blocking convention `Psi(A,t) = Psi(A^c, 1-t)` for
/// `t > 1 - pi(A)`.
pub fn psi_flow_blocking(chain: &MarkovChain, a: &VertexSet, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::BadT(t));
    }
    if t <= 1.0 - a.mass() {
        psi_flow(chain, a, t)
    } else {
        psi_flow(chain, &a.complement(chain), 1.0 - t)
    }
}

/// `Psi(A) = Psi(A, pi(A^c))`.
pub fn psi(chain: &MarkovChain, a: &VertexSet) -> Result<f64> {
    require_proper(a)?;
    psi_flow(chain, a, 1.0 - a.mass())
}

/// `Psi(A)` as `1/2 int_0^1 |pi(A) - pi(A_u)| du`.
pub fn psi_via_levels(chain: &MarkovChain, a: &VertexSet) -> Result<f64> {
    require_proper(a)?;
    let profile = LevelProfile::new(chain, a)?;
    Ok(psi_from_levels(&profile))
}

pub(crate) fn psi_from_levels(profile: &LevelProfile) -> f64 {
    let base = profile.base_mass();
    0.5 * profile.integrate(|level| (base - level).abs())
}

/// `Psi(A)` normalized: `phi~(A)` for `Product`, `phi(A)` for `Mass`.
pub fn modified_conductance(chain: &MarkovChain, a: &VertexSet, norm: Normalization) -> Result<f64> {
    Ok(psi(chain, a)? / norm.denominator(a.mass()))
}

/// Both sides of `Phi~(A) >= phi~(A) >= min{1, gamma/(1-gamma)} Phi~(A)`.
#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConductanceSandwich {
    pub upper: f64,
    pub modified: f64,
    pub lower: f64,
    pub gamma: f64,
}

impl ConductanceSandwich {
    /// Smallest of the two gaps; negative means a violation.
    pub fn slack(&self) -> f64 {
        (self.upper - self.modified).min(self.modified - self.lower)
    }
}

pub fn nonlazy_conductance_sandwich(chain: &MarkovChain, a: &VertexSet) -> Result<ConductanceSandwich> {
    let upper = conductance(chain, a, Normalization::Product)?;
    let modified = modified_conductance(chain, a, Normalization::Product)?;
    let gamma = chain.min_holding();
    let factor = if gamma >= 0.5 { 1.0 } else { gamma / (1.0 - gamma) };
    Ok(ConductanceSandwich { upper, modified, lower: factor * upper, gamma })
}

/// Everything about one set that profile quantities are computed from.
pub struct SetMeasures<'a> {
    chain: &'a MarkovChain,
    set: &'a VertexSet,
    profile: LevelProfile,
    psi: OnceCell<f64>,
    blocking: OnceCell<BlockingPsis>,
}

impl<'a> SetMeasures<'a> {
    pub fn new(chain: &'a MarkovChain, set: &'a VertexSet) -> Result<Self> {
        require_proper(set)?;
        Ok(SetMeasures {
            chain,
            set,
            profile: LevelProfile::new(chain, set)?,
            psi: OnceCell::new(),
            blocking: OnceCell::new(),
        })
    }

    pub fn set(&self) -> &VertexSet {
        self.set
    }

    pub fn mass(&self) -> f64 {
        self.set.mass()
    }

    pub fn profile(&self) -> &LevelProfile {
        &self.profile
    }

    /// `Q(A, A^c)`.
    pub fn boundary(&self) -> f64 {
        let r = self.profile.ratios();
        let pi = self.chain.pi();
        (0..self.chain.n()).filter(|&y| !self.set.contains(y)).map(|y| r[y] * pi[y]).sum()
    }

    /// `Q_{PP*}(A, A^c) = sum_y pi(y) r_y (1 - r_y)` with `r_y = Q(A,y)/pi(y)`.
    pub fn pp_star_boundary(&self) -> f64 {
        let r = self.profile.ratios();
        self.chain.pi().iter().zip(r).map(|(p, r)| p * r * (1.0 - r)).sum()
    }

    pub fn psi(&self) -> f64 {
        *self
            .psi
            .get_or_init(|| psi_greedy(self.chain.pi(), self.profile.ratios(), 1.0 - self.mass()))
    }

    pub fn blocking(&self) -> &BlockingPsis {
        self.blocking.get_or_init(|| BlockingPsis::from_profile(&self.profile))
    }

    pub fn congestion(&self, kernel: &CongestionKernel) -> Result<f64> {
        congestion::congestion_from_profile(&self.profile, kernel)
    }

    pub fn eval(&self, q: &SetQuantity) -> Result<f64> {
        let mass = self.mass();
        Ok(match q {
            SetQuantity::Conductance(norm) => self.boundary() / norm.denominator(mass),
            SetQuantity::ModifiedConductance(norm) => self.psi() / norm.denominator(mass),
            SetQuantity::PpStarConductance => self.pp_star_boundary() / (mass * (1.0 - mass)),
            SetQuantity::Congestion(k) => self.congestion(k)?,
            SetQuantity::Blocking(which) => which.pick(self.blocking()),
            SetQuantity::InvMassPsiGl => 1.0 / (mass * self.blocking().gl),
            SetQuantity::PsiModPerLog => self.blocking().modified / libm::log(1.0 / mass),
            SetQuantity::Psi => self.psi(),
            SetQuantity::WpHalfGap => {
                let (lo, hi) = self.profile.wp_interval();
                (lo - 0.5).max(0.5 - hi).max(0.0)
            }
        })
    }
}

/// Selects one of the blocking-style `psi` integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockingPsi {
    Gl,
    GlTilde,
    Mod,
    Plus,
    PlusTilde,
}

impl BlockingPsi {
    pub fn pick(self, b: &BlockingPsis) -> f64 {
        match self {
            BlockingPsi::Gl => b.gl,
            BlockingPsi::GlTilde => b.gl_tilde,
            BlockingPsi::Mod => b.modified,
            BlockingPsi::Plus => b.plus,
            BlockingPsi::PlusTilde => b.plus_tilde,
        }
    }
}

/// A per-set quantity that can be profiled over subsets.
#[derive(Clone, Debug)]
pub enum SetQuantity {
    Conductance(Normalization),
    ModifiedConductance(Normalization),
    /// `Phi~` of the multiplicative reversibilization `P P*`.
    PpStarConductance,
    Congestion(CongestionKernel),
    Blocking(BlockingPsi),
    /// `1 / (pi(A) psi_gl(A))`.
    InvMassPsiGl,
    /// `psi_mod(A) / log(1/pi(A))`.
    PsiModPerLog,
    /// `Psi(A)` itself.
    Psi,
    /// Distance from `1/2` to the crossing interval of `A` (zero when it
    /// contains `1/2`).
    WpHalfGap,
}

impl SetQuantity {
    /// The direction the defining profile takes: congestion and the `1/psi`
    /// quantities are maximized, conductances and `psi`s minimized.
    pub fn natural_direction(&self) -> Direction {
        match self {
            SetQuantity::Congestion(_) | SetQuantity::InvMassPsiGl | SetQuantity::WpHalfGap => Direction::Max,
            _ => Direction::Min,
        }
    }
}

/// Several profiles accumulated in one pass over subsets.
#[derive(Clone, Debug)]
pub struct Census {
    quantities: Vec<SetQuantity>,
    accumulators: Vec<ProfileAccumulator>,
}

impl Census {
    pub fn new(quantities: &[(SetQuantity, Direction)]) -> Self {
        Census {
            quantities: quantities.iter().map(|(q, _)| q.clone()).collect(),
            accumulators: quantities.iter().map(|(_, d)| ProfileAccumulator::new(*d)).collect(),
        }
    }

    pub fn visit(&mut self, chain: &MarkovChain, mask: u64) -> Result<()> {
        let set = VertexSet::from_mask(chain, mask)?;
        let m = SetMeasures::new(chain, &set)?;
        for (q, acc) in self.quantities.iter().zip(&mut self.accumulators) {
            acc.add(set.mass(), m.eval(q)?, mask);
        }
        Ok(())
    }

    pub fn merge(&mut self, other: Census) {
        for (a, b) in self.accumulators.iter_mut().zip(other.accumulators) {
            a.merge(b);
        }
    }

    pub fn finish(self, chain: &MarkovChain) -> Vec<ProfileTable> {
        self.accumulators.into_iter().map(|a| a.finish(chain)).collect()
    }
}

/// Profiles of several quantities over all proper nonempty subsets.
pub fn profiles(chain: &MarkovChain, quantities: &[(SetQuantity, Direction)]) -> Result<Vec<ProfileTable>> {
    subsets::check_enumerable(chain.n())?;
    let mut census = Census::new(quantities);
    for mask in subsets::proper_subsets(chain.n()) {
        census.visit(chain, mask)?;
    }
    Ok(census.finish(chain))
}

/// Profile of one quantity: for each achievable mass `r`, the extremum over
/// `{A : pi(A) <= r}` with the first witness in enumeration order.
pub fn profile(chain: &MarkovChain, quantity: &SetQuantity, direction: Direction) -> Result<ProfileTable> {
    Ok(profiles(chain, &[(quantity.clone(), direction)])?.remove(0))
}

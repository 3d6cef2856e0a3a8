//! Mixing-time and distance bounds built from congestion, conductance and
//! blocking-style profiles.
//!
//! All profile integrals are evaluated exactly: every profile is a step
//! function of the mass bound `r`, so each integral is a finite sum of closed
//! forms over the steps.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::generators::{self, Expansion};
use crate::geometry::{BlockingPsi, Census, Normalization, SetQuantity};
use crate::kernel::Decay;
use crate::levels::{self, DEFAULT_NODE_BUDGET};
use crate::oracle::{self, Metric, MixingTime};
use crate::subsets::{self, Direction, ProfileTable};
use crate::{CongestionKernel, Error, MarkovChain, Result, VertexSet};

/// Contraction rates this close to 1 are treated as no contraction.
pub const CONTRACTION_TOL: f64 = 1e-12;

/// Tolerance of the numerical convexity check.
pub const CONVEXITY_TOL: f64 = 1e-9;

/// Largest edge count tried when recognising a chain as an Eulerian walk.
pub const MAX_EULERIAN_EDGES: usize = 4096;

/// Which formula produced a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Method {
    /// `log(f(pi_*)/eps) / (1 - C_{af(a)})`
    Basic,
    /// Profile integral over `[pi_*, f^{-1}(eps)]`, valid under convexity.
    ProfileConvex,
    /// Doubled profile integral over `[f^{-1}(f(pi_*)/2), f^{-1}(eps/2)]`.
    ProfileGeneral,
    /// `log(1/(eps sqrt(pi_*))) / (1 - C_{sqrt(a(1-a))})`
    L2Pessimistic,
    /// `int_{pi_*}^{1/eps^2} dx / (2x(1 - C(x)))`, valid under convexity.
    L2IntegralConvex,
    /// `int_{4 pi_*}^{4/eps^2} dx / (x(1 - C(x)))`
    L2IntegralGeneral,
    /// `(2/phi~^2) log(1/(eps sqrt(pi_*)))`
    ModifiedConstant,
    /// `int_{4 pi_*}^{4/eps^2} 2 dr / (r phi~(r)^2)`
    ModifiedProfile,
    /// `(8/Phi~_{PP*}^2) log(1/(eps sqrt(pi_*)))`
    PpStarConstant,
    /// `int_{4 pi_*}^{4/eps^2} 8 dr / (r Phi~_{PP*}(r)^2)`
    PpStarProfile,
    /// Conductance with holding probability `gamma`, constant form.
    HoldingConstant,
    /// Conductance with holding probability `gamma`, profile form.
    HoldingProfile,
    /// `(2/Phi~^2) log(1/(eps sqrt(pi_*)))` for lazy chains.
    LazyConductance,
    /// `h_gl` form for total variation.
    BlockingTv,
    /// `h_mod` form for relative entropy.
    BlockingEntropy,
    /// `h+` form for `L^2`.
    BlockingL2,
    /// `(1 - pi_*) C_{sin(pi a)}^n` inverted at `eps`.
    Sine,
    /// `m^2/12 + (m^2/8) log(1/eps)` for Eulerian walks with expansion.
    Eulerian,
    /// `m^2/3 + (m^2/2) log(1/eps)` for lazy Eulerian walks.
    EulerianLazy,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Basic => "basic",
            Method::ProfileConvex => "profile-convex",
            Method::ProfileGeneral => "profile-general",
            Method::L2Pessimistic => "l2-pessimistic",
            Method::L2IntegralConvex => "l2-integral-convex",
            Method::L2IntegralGeneral => "l2-integral-general",
            Method::ModifiedConstant => "modified-constant",
            Method::ModifiedProfile => "modified-profile",
            Method::PpStarConstant => "pp-star-constant",
            Method::PpStarProfile => "pp-star-profile",
            Method::HoldingConstant => "holding-constant",
            Method::HoldingProfile => "holding-profile",
            Method::LazyConductance => "lazy-conductance",
            Method::BlockingTv => "blocking-tv",
            Method::BlockingEntropy => "blocking-entropy",
            Method::BlockingL2 => "blocking-l2",
            Method::Sine => "sine",
            Method::Eulerian => "eulerian",
            Method::EulerianLazy => "eulerian-lazy",
        }
    }
}

/// A mixing-time bound in steps, or no bound at all.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum BoundValue {
    Steps(u64),
    Unbounded,
}

impl BoundValue {
    /// Ceiling of a raw bound, at least 1; non-finite or absurd values are
    /// unbounded.
    pub fn from_raw(raw: f64) -> Self {
        if !raw.is_finite() || raw > 1e18 {
            BoundValue::Unbounded
        } else {
            BoundValue::Steps(libm::ceil(raw).max(1.0) as u64)
        }
    }

    pub fn steps(self) -> Option<u64> {
        match self {
            BoundValue::Steps(n) => Some(n),
            BoundValue::Unbounded => None,
        }
    }
}

/// One evaluated bound.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundReport {
    pub method: Method,
    pub metric: Metric,
    pub eps: f64,
    pub value: BoundValue,
    /// The bound before the ceiling (infinite when unbounded).
    pub raw: f64,
    /// Every quantity entering the formula.
    pub parameters: BTreeMap<String, f64>,
    /// `Some(passed)` when a convexity hypothesis was checked.
    pub convexity: Option<bool>,
    /// An integration limit fell beyond the largest achievable mass; the
    /// profile was extended by its last value there.
    pub clamped: bool,
    /// The set attaining the profile extremum the bound rests on.
    pub witness: Option<VertexSet>,
}

impl BoundReport {
    fn new(method: Method, metric: Metric, eps: f64, raw: f64) -> Self {
        BoundReport {
            method,
            metric,
            eps,
            value: BoundValue::from_raw(raw),
            raw: if raw.is_finite() { raw } else { f64::INFINITY },
            parameters: BTreeMap::new(),
            convexity: None,
            clamped: false,
            witness: None,
        }
    }

    fn param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.into(), value);
        self
    }

    fn witness(mut self, w: Option<&VertexSet>) -> Self {
        self.witness = w.cloned();
        self
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::BadArgument("eps must be positive and finite"))
    }
}

/// The decay function whose bound controls `metric`, if any.
pub fn decay_for(metric: Metric) -> Option<Decay> {
    match metric {
        Metric::TotalVariation => Some(Decay::TotalVariation),
        Metric::RelativeEntropy => Some(Decay::RelativeEntropy),
        Metric::L2 => Some(Decay::L2),
        Metric::Hellinger => Some(Decay::Hellinger),
        Metric::Separation | Metric::LInfinity => None,
    }
}

pub fn metric_for(decay: Decay) -> Metric {
    match decay {
        Decay::TotalVariation => Metric::TotalVariation,
        Decay::RelativeEntropy => Metric::RelativeEntropy,
        Decay::L2 => Metric::L2,
        Decay::Hellinger => Metric::Hellinger,
    }
}

/// The evolving-set right-hand side `E^_n dist(pi_{S_n}, pi)` for start `x`.
pub fn distance_bound_at_n(chain: &MarkovChain, x: usize, n: usize, metric: Metric) -> Result<f64> {
    let s0 = VertexSet::singleton(chain, x)?;
    let law = levels::evolve_exact(chain, &s0, n, true, DEFAULT_NODE_BUDGET)?;
    Ok(distance_bound_from_law(chain, &law, metric))
}

fn distance_bound_from_law(chain: &MarkovChain, law: &levels::SetDistribution, metric: Metric) -> f64 {
    let not_full = law.expect(|s| if s.is_full() { 0.0 } else { 1.0 });
    match metric {
        Metric::Separation => not_full,
        Metric::TotalVariation => law.expect(|s| 1.0 - s.mass()),
        Metric::RelativeEntropy => law.expect(|s| -libm::log(s.mass())),
        Metric::L2 => law.expect(|s| libm::sqrt((1.0 - s.mass()).max(0.0) / s.mass())),
        Metric::LInfinity => {
            let p = chain.pi_min();
            ((1.0 - p) / p).max(1.0) * not_full
        }
        Metric::Hellinger => law.expect(|s| 2.0 * (1.0 - libm::sqrt(s.mass()))),
    }
}

/// [`distance_bound_at_n`] for `n = 0..=n_max`, sharing the tree expansion.
pub fn distance_bound_series(chain: &MarkovChain, x: usize, n_max: usize, metric: Metric) -> Result<Vec<f64>> {
    let s0 = VertexSet::singleton(chain, x)?;
    let mut law = levels::evolve_exact(chain, &s0, 0, true, DEFAULT_NODE_BUDGET)?;
    let mut out = vec![distance_bound_from_law(chain, &law, metric)];
    let mut nodes = 1usize;
    for _ in 0..n_max {
        let mut next: BTreeMap<VertexSet, f64> = BTreeMap::new();
        for (set, w) in law.outcomes() {
            if set.is_full() {
                *next.entry(set.clone()).or_insert(0.0) += w;
                continue;
            }
            for (s, p) in levels::doob_kernel(chain, set)?.outcomes() {
                *next.entry(s.clone()).or_insert(0.0) += w * p;
            }
        }
        nodes += next.len();
        if nodes > DEFAULT_NODE_BUDGET {
            return Err(Error::BudgetExceeded { nodes });
        }
        law = levels::SetDistribution::from_outcomes(next.into_iter().collect());
        out.push(distance_bound_from_law(chain, &law, metric));
    }
    Ok(out)
}

/// Every profile the bounds draw on, computed in one pass over subsets.
#[derive(Clone, Debug)]
pub struct ChainProfiles {
    /// `C_{af(a)}(r)` for each decay, in [`Decay::ALL`] order.
    pub congestion: Vec<ProfileTable>,
    /// `phi~(r)`.
    pub modified: ProfileTable,
    /// `Phi~(r)`.
    pub conductance: ProfileTable,
    /// `Phi~_{PP*}(r)`.
    pub pp_star: ProfileTable,
    /// `max 1/(pi(A) psi_gl(A))`.
    pub inv_mass_psi_gl: ProfileTable,
    /// `min psi_mod(A)`.
    pub psi_mod: ProfileTable,
    /// `min psi+(A)`.
    pub psi_plus: ProfileTable,
    /// `min psi_mod(A)/log(1/pi(A))`.
    pub psi_mod_per_log: ProfileTable,
    /// `min Psi(A)`.
    pub psi: ProfileTable,
    /// `C_{sin(pi a)}(r)`.
    pub sine: ProfileTable,
    /// Largest distance from `1/2` to a crossing interval.
    pub wp_half_gap: ProfileTable,
}

impl ChainProfiles {
    /// The census entries, in the order [`ChainProfiles::from_tables`] expects.
    pub fn quantities() -> Vec<(SetQuantity, Direction)> {
        let mut q: Vec<(SetQuantity, Direction)> =
            Decay::ALL.iter().map(|d| (SetQuantity::Congestion(d.congestion_kernel()), Direction::Max)).collect();
        q.extend([
            (SetQuantity::ModifiedConductance(Normalization::Product), Direction::Min),
            (SetQuantity::Conductance(Normalization::Product), Direction::Min),
            (SetQuantity::PpStarConductance, Direction::Min),
            (SetQuantity::InvMassPsiGl, Direction::Max),
            (SetQuantity::Blocking(BlockingPsi::Mod), Direction::Min),
            (SetQuantity::Blocking(BlockingPsi::Plus), Direction::Min),
            (SetQuantity::PsiModPerLog, Direction::Min),
            (SetQuantity::Psi, Direction::Min),
            (SetQuantity::Congestion(CongestionKernel::sine()), Direction::Max),
            (SetQuantity::WpHalfGap, Direction::Max),
        ]);
        q
    }

    pub fn from_tables(tables: Vec<ProfileTable>) -> Result<Self> {
        if tables.len() != Self::quantities().len() {
            return Err(Error::DimensionMismatch { expected: Self::quantities().len(), found: tables.len() });
        }
        let mut it = tables.into_iter();
        let mut next = || it.next().expect("length checked");
        let congestion = (0..Decay::ALL.len()).map(|_| next()).collect();
        Ok(ChainProfiles {
            congestion,
            modified: next(),
            conductance: next(),
            pp_star: next(),
            inv_mass_psi_gl: next(),
            psi_mod: next(),
            psi_plus: next(),
            psi_mod_per_log: next(),
            psi: next(),
            sine: next(),
            wp_half_gap: next(),
        })
    }

    /// Single-threaded census over every proper subset.
    pub fn compute(chain: &MarkovChain) -> Result<Self> {
        subsets::check_enumerable(chain.n())?;
        let mut census = Census::new(&Self::quantities());
        for mask in subsets::proper_subsets(chain.n()) {
            census.visit(chain, mask)?;
        }
        Self::from_tables(census.finish(chain))
    }

    pub fn congestion_for(&self, decay: Decay) -> &ProfileTable {
        let i = Decay::ALL.iter().position(|d| *d == decay).expect("decay listed");
        &self.congestion[i]
    }
}

/// Integral of a step-function profile: `sum over steps of seg(a, b, value)`
/// for `[lo, hi]` cut at the profile masses. Below the first mass the first
/// value is used, beyond the last mass the last value. Returns the sum and
/// whether `hi` went past the last achievable mass.
fn integrate_steps<F: Fn(f64, f64, f64) -> f64>(table: &ProfileTable, lo: f64, hi: f64, seg: F) -> (f64, bool) {
    let rows = table.rows();
    if rows.is_empty() || hi <= lo {
        return (0.0, false);
    }
    let clamped = hi > rows[rows.len() - 1].r + subsets::MASS_MERGE_TOL;
    let mut total = 0.0;
    for (i, row) in rows.iter().enumerate() {
        let start = if i == 0 { f64::NEG_INFINITY } else { row.r };
        let end = rows.get(i + 1).map_or(f64::INFINITY, |next| next.r);
        let a = lo.max(start);
        let b = hi.min(end);
        if b > a {
            total += seg(a, b, row.value);
        }
    }
    (total, clamped)
}

/// Value of a profile at `x`, extended below the first mass by the first value.
fn profile_value(table: &ProfileTable, x: f64) -> f64 {
    table.value_at(x).or_else(|| table.rows().first().map(|r| r.value)).unwrap_or(f64::NAN)
}

fn contraction_gap(c: f64) -> f64 {
    let gap = 1.0 - c;
    if gap <= CONTRACTION_TOL {
        0.0
    } else {
        gap
    }
}

/// `log(f(a)/f(b)) / (1 - C)`, infinite when `C` is at 1.
fn log_ratio_over_gap(fa: f64, fb: f64, c: f64) -> f64 {
    let gap = contraction_gap(c);
    let num = libm::log(fa) - libm::log(fb);
    if num <= 0.0 {
        0.0
    } else if gap == 0.0 {
        f64::INFINITY
    } else {
        num / gap
    }
}

/// Basic contraction bound `ceil(log(f(pi_*)/eps) / (1 - C_{af(a)}))`.
pub fn mixing_bound_basic(chain: &MarkovChain, profiles: &ChainProfiles, decay: Decay, eps: f64) -> Result<BoundReport> {
    check_eps(eps)?;
    let table = profiles.congestion_for(decay);
    let c = table.overall().unwrap_or(f64::NAN);
    let fp = decay.eval(chain.pi_min());
    let raw = log_ratio_over_gap(fp, eps, c);
    Ok(BoundReport::new(Method::Basic, metric_for(decay), eps, raw)
        .param("C", c)
        .param("f(pi_min)", fp)
        .param("pi_min", chain.pi_min())
        .witness(table.overall_witness()))
}

/// Numerical convexity check of `x (1 - C(f^{-1}(x)))` at the points
/// `x = f(r)` for every achievable mass `r`.
pub fn convexity_check(table: &ProfileTable, decay: Decay) -> bool {
    let mut pts: Vec<(f64, f64)> = table
        .rows()
        .iter()
        .map(|row| {
            let x = decay.eval(row.r);
            (x, x * (1.0 - row.value))
        })
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-15);
    let slopes: Vec<f64> = pts.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    slopes.windows(2).all(|s| s[1] - s[0] >= -CONVEXITY_TOL)
}

/// Form of the profile mixing bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileMode {
    /// Requires the convexity hypothesis; falls back to `General` if it fails.
    Convex,
    General,
}

/// Profile mixing bound: the integral of `-f'(x) / (f(x)(1 - C_{af(a)}(x)))`,
/// summed exactly over profile steps.
pub fn mixing_bound_profile(
    chain: &MarkovChain,
    profiles: &ChainProfiles,
    decay: Decay,
    eps: f64,
    mode: ProfileMode,
) -> Result<BoundReport> {
    check_eps(eps)?;
    let table = profiles.congestion_for(decay);
    let convex = convexity_check(table, decay);
    let pmin = chain.pi_min();
    let use_convex = mode == ProfileMode::Convex && convex;
    let (lo, hi, factor, method) = if use_convex {
        (pmin, decay.inverse(eps), 1.0, Method::ProfileConvex)
    } else {
        (decay.inverse(decay.eval(pmin) / 2.0), decay.inverse(eps / 2.0), 2.0, Method::ProfileGeneral)
    };
    let (integral, clamped) =
        integrate_steps(table, lo, hi, |a, b, c| log_ratio_over_gap(decay.eval(a), decay.eval(b), c));
    let mut rep = BoundReport::new(method, metric_for(decay), eps, factor * integral)
        .param("lower", lo)
        .param("upper", hi)
        .param("integral", integral)
        .param("C", table.overall().unwrap_or(f64::NAN))
        .witness(table.overall_witness());
    rep.convexity = Some(convex);
    rep.clamped = clamped;
    Ok(rep)
}

/// The `L^2` forms `log(1/(eps sqrt(pi_*)))/(1-C)` and the two integrals in
/// the variable `x`.
pub fn l2_congestion_bounds(chain: &MarkovChain, profiles: &ChainProfiles, eps: f64) -> Result<Vec<BoundReport>> {
    check_eps(eps)?;
    let table = profiles.congestion_for(Decay::L2);
    let c = table.overall().unwrap_or(f64::NAN);
    let pmin = chain.pi_min();
    let log_term = libm::log(1.0 / (eps * libm::sqrt(pmin)));
    let gap = contraction_gap(c);
    let pess = if log_term <= 0.0 { 0.0 } else if gap == 0.0 { f64::INFINITY } else { log_term / gap };
    let mut out = vec![BoundReport::new(Method::L2Pessimistic, Metric::L2, eps, pess)
        .param("C", c)
        .param("pi_min", pmin)
        .witness(table.overall_witness())];
    let seg = |a: f64, b: f64, c: f64| log_ratio_over_gap(b, a, c);
    let convex = convexity_check(table, Decay::L2);
    if convex {
        let (i, clamped) = integrate_steps(table, pmin, 1.0 / (eps * eps), seg);
        let mut r = BoundReport::new(Method::L2IntegralConvex, Metric::L2, eps, 0.5 * i).param("integral", 0.5 * i);
        r.convexity = Some(true);
        r.clamped = clamped;
        out.push(r);
    }
    let (i, clamped) = integrate_steps(table, 4.0 * pmin, 4.0 / (eps * eps), seg);
    let mut r = BoundReport::new(Method::L2IntegralGeneral, Metric::L2, eps, i).param("integral", i);
    r.convexity = Some(convex);
    r.clamped = clamped;
    out.push(r);
    Ok(out)
}

/// Conductance-type families of `L^2` bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConductanceFamily {
    /// Modified conductance `phi~`.
    Modified,
    /// Conductance of the multiplicative reversibilization.
    PpStar,
    /// Conductance with a holding probability `gamma`.
    Holding,
    /// Conductance of a lazy chain.
    Lazy,
}

/// `c/Phi^2 * log(1/(eps sqrt(pi_*)))` and `int_{4pi_*}^{4/eps^2} c dr/(r Phi(r)^2)`
/// for the chosen family (the lazy family has only the constant form).
pub fn l2_conductance_bounds(
    chain: &MarkovChain,
    profiles: &ChainProfiles,
    eps: f64,
    family: ConductanceFamily,
) -> Result<Vec<BoundReport>> {
    check_eps(eps)?;
    let gamma = chain.min_holding();
    let (table, coef, constant, integral) = match family {
        ConductanceFamily::Modified => (&profiles.modified, 2.0, Method::ModifiedConstant, Some(Method::ModifiedProfile)),
        ConductanceFamily::PpStar => (&profiles.pp_star, 8.0, Method::PpStarConstant, Some(Method::PpStarProfile)),
        ConductanceFamily::Holding => {
            let coef = if gamma > 0.0 {
                4.0 * gamma.max(1.0 - gamma) / (gamma / (1.0 - gamma))
            } else {
                f64::INFINITY
            };
            (&profiles.conductance, coef, Method::HoldingConstant, Some(Method::HoldingProfile))
        }
        ConductanceFamily::Lazy => {
            if !chain.is_lazy() {
                return Err(Error::NotLazy { holding: gamma });
            }
            (&profiles.conductance, 2.0, Method::LazyConductance, None)
        }
    };
    let pmin = chain.pi_min();
    let phi = table.overall().unwrap_or(f64::NAN);
    let log_term = libm::log(1.0 / (eps * libm::sqrt(pmin))).max(0.0);
    let over_sq = |v: f64| if v > 0.0 { coef / (v * v) } else { f64::INFINITY };
    let raw = if log_term == 0.0 { 0.0 } else { over_sq(phi) * log_term };
    let mut out = vec![BoundReport::new(constant, Metric::L2, eps, raw)
        .param("conductance", phi)
        .param("coefficient", coef)
        .param("gamma", gamma)
        .param("pi_min", pmin)
        .witness(table.overall_witness())];
    if let Some(method) = integral {
        let (i, clamped) = integrate_steps(table, 4.0 * pmin, 4.0 / (eps * eps), |a, b, v| {
            over_sq(v) * libm::log(b / a)
        });
        let mut r = BoundReport::new(method, Metric::L2, eps, i)
            .param("integral", i)
            .param("coefficient", coef)
            .param("gamma", gamma)
            .witness(table.overall_witness());
        r.clamped = clamped;
        out.push(r);
    }
    Ok(out)
}

/// Optimal constant `C >= 1` relating `min psi_mod/log(1/r)` to
/// `min psi_mod/log(1/pi(A))` over `r in [pi_*, 1/2]`.
pub fn blocking_entropy_constant(profiles: &ChainProfiles) -> f64 {
    let rows = profiles.psi_mod.rows();
    let mut c: f64 = 1.0;
    for (i, row) in rows.iter().enumerate() {
        if row.r > 0.5 {
            break;
        }
        // the ratio increases in r within a step, so use the right end
        let end = rows.get(i + 1).map_or(0.5, |n| n.r).min(0.5);
        let numer = row.value / libm::log(1.0 / end);
        let denom = profile_value(&profiles.psi_mod_per_log, row.r);
        if denom > 0.0 && numer.is_finite() {
            c = c.max(numer / denom);
        } else if denom == 0.0 && numer > 0.0 {
            return f64::INFINITY;
        }
    }
    c
}

/// The three bounds in terms of `h_gl`, `h_mod` and `h+`.
pub fn blocking_style_bounds(chain: &MarkovChain, profiles: &ChainProfiles, eps: f64) -> Result<Vec<BoundReport>> {
    check_eps(eps)?;
    let pmin = chain.pi_min();
    let inv = |v: f64| if v > 0.0 { 1.0 / v } else { f64::INFINITY };

    let h_gl = profile_value(&profiles.inv_mass_psi_gl, 0.5);
    let tv_log = libm::log((1.0 - pmin) / eps).max(0.0);
    let tv = if tv_log == 0.0 { 0.0 } else { 0.5 * h_gl * tv_log };
    let tv = BoundReport::new(Method::BlockingTv, Metric::TotalVariation, eps, tv)
        .param("h_gl(1/2)", h_gl)
        .witness(profiles.inv_mass_psi_gl.rows().iter().take_while(|r| r.r <= 0.5 + 1e-12).last().map(|r| &r.witness));

    let c = blocking_entropy_constant(profiles);
    let h_mod_half = 2.0 * inv(profile_value(&profiles.psi_mod, 0.5));
    let (int_mod, _) = integrate_steps(&profiles.psi_mod, libm::sqrt(pmin), 0.5, |a, b, v| inv(v) * libm::log(b / a));
    let ent = 2.0 * c * int_mod + c * h_mod_half * libm::log(2.0 / eps).max(0.0);
    let ent = BoundReport::new(Method::BlockingEntropy, Metric::RelativeEntropy, eps, ent)
        .param("C", c)
        .param("h_mod(1/2)", h_mod_half)
        .param("integral", int_mod);

    let h_plus_half = 2.0 * inv(profile_value(&profiles.psi_plus, 0.5));
    let (int_plus, _) = integrate_steps(&profiles.psi_plus, 4.0 * pmin, 0.5, |a, b, v| inv(v) * libm::log(b / a));
    let l2 = 4.0 * int_plus + h_plus_half * libm::log(2.0 * core::f64::consts::SQRT_2 / eps).max(0.0);
    let l2 = BoundReport::new(Method::BlockingL2, Metric::L2, eps, l2)
        .param("h+(1/2)", h_plus_half)
        .param("integral", int_plus);
    Ok(vec![tv, ent, l2])
}

/// `(1 - pi_*) C_{sin(pi a)}^n`, valid when every crossing interval contains 1/2.
pub fn cycle_sin_bound(chain: &MarkovChain, n: u32) -> Result<f64> {
    let profiles = ChainProfiles::compute(chain)?;
    cycle_sin_from_profiles(chain, &profiles, n)
}

fn sine_contraction(chain: &MarkovChain, profiles: &ChainProfiles) -> Result<f64> {
    let gap = profiles.wp_half_gap.overall().unwrap_or(0.0);
    if gap > chain.tol() {
        return Err(Error::WpNotHalf);
    }
    Ok(profiles.sine.overall().unwrap_or(f64::NAN))
}

pub fn cycle_sin_from_profiles(chain: &MarkovChain, profiles: &ChainProfiles, n: u32) -> Result<f64> {
    let c = sine_contraction(chain, profiles)?;
    Ok((1.0 - chain.pi_min()) * libm::pow(c, n as f64))
}

/// Smallest `n` with `(1 - pi_*) C_{sin(pi a)}^n <= eps`.
pub fn sine_mixing_bound(chain: &MarkovChain, profiles: &ChainProfiles, eps: f64) -> Result<BoundReport> {
    check_eps(eps)?;
    let c = sine_contraction(chain, profiles)?;
    let start = 1.0 - chain.pi_min();
    let raw = if start <= eps {
        0.0
    } else if c >= 1.0 - CONTRACTION_TOL {
        f64::INFINITY
    } else if c <= 0.0 {
        1.0
    } else {
        libm::log(start / eps) / -libm::log(c)
    };
    Ok(BoundReport::new(Method::Sine, Metric::TotalVariation, eps, raw)
        .param("C_sin", c)
        .witness(profiles.sine.overall_witness()))
}

/// Smallest `m <= MAX_EULERIAN_EDGES` with `m Q(x,y)` integral for all pairs:
/// the edge count of the multigraph whose simple walk is `p`.
fn edge_count_of(n: usize, pi: &[f64], p: impl Fn(usize, usize) -> f64) -> Option<usize> {
    let ok = |m: usize| {
        let mf = m as f64;
        (0..n).all(|x| {
            (0..n).all(|y| {
                let w = mf * pi[x] * p(x, y);
                w > -1e-9 && (w - libm::round(w)).abs() <= 1e-9 * mf.max(1.0)
            })
        })
    };
    (1..=MAX_EULERIAN_EDGES).find(|&m| ok(m))
}

/// Closed-form `L^2` bounds for walks on Eulerian multigraphs with `m` edges:
/// `m^2/12 + (m^2/8) log(1/eps)` when the expansion condition holds and
/// `Psi(A) >= 1/m` for `pi(A) <= 1/2`, and `m^2/3 + (m^2/2) log(1/eps)` for
/// the lazy walk. Returns `None` when the hypotheses fail.
pub fn eulerian_bound(
    chain: &MarkovChain,
    profiles: &ChainProfiles,
    edges: usize,
    lazy: bool,
    eps: f64,
) -> Result<Option<BoundReport>> {
    check_eps(eps)?;
    let m = edges as f64;
    let min_psi = profile_value(&profiles.psi, 0.5);
    let log_term = libm::log(1.0 / eps);
    let (raw, method) = if lazy {
        if !chain.is_lazy() || min_psi < 0.5 / m - chain.tol() {
            return Ok(None);
        }
        (m * m / 3.0 + m * m / 2.0 * log_term, Method::EulerianLazy)
    } else {
        if generators::expansion_condition(chain)? != Expansion::Holds || min_psi < 1.0 / m - chain.tol() {
            return Ok(None);
        }
        (m * m / 12.0 + m * m / 8.0 * log_term, Method::Eulerian)
    };
    Ok(Some(BoundReport::new(method, Metric::L2, eps, raw).param("edges", m).param("min Psi", min_psi)))
}

/// Eulerian reports for every way the chain can be read as a (lazy) simple
/// walk on a multigraph with at most [`MAX_EULERIAN_EDGES`] edges.
pub fn eulerian_bounds(chain: &MarkovChain, profiles: &ChainProfiles, eps: f64) -> Result<Vec<BoundReport>> {
    let n = chain.n();
    let mut out = Vec::new();
    if let Some(m) = edge_count_of(n, chain.pi(), |x, y| chain.p(x, y)) {
        out.extend(eulerian_bound(chain, profiles, m, false, eps)?);
    }
    if chain.is_lazy() {
        let base = |x: usize, y: usize| 2.0 * chain.p(x, y) - if x == y { 1.0 } else { 0.0 };
        if let Some(m) = edge_count_of(n, chain.pi(), base) {
            out.extend(eulerian_bound(chain, profiles, m, true, eps)?);
        }
    }
    Ok(out)
}

/// Every applicable bound for each `(metric, eps)` pair. Metrics without a
/// decay-function form (separation, `L^infinity`) are skipped.
pub fn all_bounds(
    chain: &MarkovChain,
    profiles: &ChainProfiles,
    metrics: &[Metric],
    eps_list: &[f64],
) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for &metric in metrics {
        let Some(decay) = decay_for(metric) else { continue };
        for &eps in eps_list {
            out.push(mixing_bound_basic(chain, profiles, decay, eps)?);
            let convex = mixing_bound_profile(chain, profiles, decay, eps, ProfileMode::Convex)?;
            let passed = convex.method == Method::ProfileConvex;
            out.push(convex);
            if passed {
                out.push(mixing_bound_profile(chain, profiles, decay, eps, ProfileMode::General)?);
            }
            match metric {
                Metric::L2 => {
                    out.extend(l2_congestion_bounds(chain, profiles, eps)?);
                    for family in [ConductanceFamily::Modified, ConductanceFamily::PpStar, ConductanceFamily::Holding] {
                        out.extend(l2_conductance_bounds(chain, profiles, eps, family)?);
                    }
                    if chain.is_lazy() {
                        out.extend(l2_conductance_bounds(chain, profiles, eps, ConductanceFamily::Lazy)?);
                    }
                    out.extend(blocking_style_bounds(chain, profiles, eps)?.into_iter().filter(|r| r.metric == metric));
                    out.extend(eulerian_bounds(chain, profiles, eps)?);
                }
                Metric::TotalVariation => {
                    out.extend(blocking_style_bounds(chain, profiles, eps)?.into_iter().filter(|r| r.metric == metric));
                    match sine_mixing_bound(chain, profiles, eps) {
                        Ok(r) => out.push(r),
                        Err(Error::WpNotHalf) => {}
                        Err(e) => return Err(e),
                    }
                }
                Metric::RelativeEntropy => {
                    out.extend(blocking_style_bounds(chain, profiles, eps)?.into_iter().filter(|r| r.metric == metric));
                }
                _ => {}
            }
        }
    }
    Ok(out)
}

/// Smallest finite bound among reports for `(metric, eps)`.
pub fn best_bound(reports: &[BoundReport], metric: Metric, eps: f64) -> BoundValue {
    reports
        .iter()
        .filter(|r| r.metric == metric && r.eps == eps)
        .map(|r| r.value)
        .min()
        .unwrap_or(BoundValue::Unbounded)
}

/// One row of a bound-versus-truth table.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Comparison {
    pub method: Method,
    pub metric: Metric,
    pub eps: f64,
    pub bound: BoundValue,
    /// Exact worst-start mixing time, `None` if it exceeds the search cap.
    pub exact: Option<usize>,
    /// `bound / exact`, `None` if either side is missing or `exact` is 0.
    pub ratio: Option<f64>,
}

impl Comparison {
    /// Whether the bound is at least the exact mixing time. An unbounded
    /// report always dominates; a finite one fails if the exact time was not
    /// reached within the cap.
    pub fn dominates(&self) -> bool {
        match (self.bound, self.exact) {
            (BoundValue::Unbounded, _) => true,
            (BoundValue::Steps(b), Some(t)) => b as usize >= t,
            (BoundValue::Steps(_), None) => false,
        }
    }
}

/// Pairs every report with the exact mixing time for its `(metric, eps)`.
/// The search cap is the largest finite bound (so any failure to mix within
/// it is a violation), at most `cap`.
pub fn compare(chain: &MarkovChain, reports: &[BoundReport], cap: usize) -> Result<Vec<Comparison>> {
    let search = reports.iter().filter_map(|r| r.value.steps()).max().unwrap_or(0).min(cap as u64) as usize;
    let mut cache: BTreeMap<(Metric, u64), Option<usize>> = BTreeMap::new();
    let mut out = Vec::with_capacity(reports.len());
    for r in reports {
        let key = (r.metric, r.eps.to_bits());
        let exact = match cache.get(&key) {
            Some(e) => *e,
            None => {
                let e = match oracle::exact_mixing_time(chain, r.metric, r.eps, search)? {
                    MixingTime::Mixed(t) => Some(t),
                    MixingTime::Unmixed => None,
                };
                cache.insert(key, e);
                e
            }
        };
        let ratio = match (r.value, exact) {
            (BoundValue::Steps(b), Some(t)) if t > 0 => Some(b as f64 / t as f64),
            _ => None,
        };
        out.push(Comparison { method: r.method, metric: r.metric, eps: r.eps, bound: r.value, exact, ratio });
    }
    Ok(out)
}

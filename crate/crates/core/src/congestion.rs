//! f-congestion, the envelopes that bound it through `Psi(A)`, the sandwich
//! inequalities against (modified) conductance, and the blocking-style `psi`
//! integrals.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{self, Normalization, SetMeasures, SetQuantity};
use crate::levels::LevelProfile;
use crate::subsets::{Direction, ProfileTable};
use crate::suite::{Check, CheckResult, SuiteAccumulator};
use crate::{CongestionKernel, Error, MarkovChain, Result, VertexSet};

fn require_proper(a: &VertexSet) -> Result<()> {
    if a.is_proper() {
        Ok(())
    } else {
        Err(Error::TrivialSet)
    }
}

/// `int_0^1 f(pi(A_u)) du / f(pi(A))` from a level profile.
pub fn congestion_from_profile(profile: &LevelProfile, kernel: &CongestionKernel) -> Result<f64> {
    let denom = kernel.eval(profile.base_mass());
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::KernelVanishes);
    }
    Ok(profile.integrate(|level| kernel.eval(level)) / denom)
}

/// `C_f(A)`.
pub fn f_congestion(chain: &MarkovChain, a: &VertexSet, kernel: &CongestionKernel) -> Result<f64> {
    require_proper(a)?;
    congestion_from_profile(&LevelProfile::new(chain, a)?, kernel)
}

/// `r -> max_{pi(A) <= r} C_f(A)` over all proper subsets.
pub fn f_congestion_profile(chain: &MarkovChain, kernel: &CongestionKernel) -> Result<ProfileTable> {
    geometry::profile(chain, &SetQuantity::Congestion(kernel.clone()), Direction::Max)
}

/// `C_f(r)`; `None` if `r` is below every achievable mass.
pub fn f_congestion_at(chain: &MarkovChain, kernel: &CongestionKernel, r: f64) -> Result<Option<f64>> {
    Ok(f_congestion_profile(chain, kernel)?.value_at(r))
}

/// Upper bound on `C_f(A)` for lazy chains and concave `f`:
/// `[f(pi(A) + 2Q(A,A^c)) + f(pi(A) - 2Q(A,A^c))] / (2 f(pi(A)))`.
pub fn lazy_concave_bound(chain: &MarkovChain, a: &VertexSet, kernel: &CongestionKernel) -> Result<f64> {
    if !chain.is_lazy() {
        return Err(Error::NotLazy { holding: chain.min_holding() });
    }
    kernel.require_concave()?;
    require_proper(a)?;
    Ok(lazy_bound_value(a.mass(), geometry::boundary_flow(chain, a), kernel))
}

fn lazy_bound_value(mass: f64, q: f64, kernel: &CongestionKernel) -> f64 {
    (kernel.eval(mass + 2.0 * q) + kernel.eval(mass - 2.0 * q)) / (2.0 * kernel.eval(mass))
}

/// `int f(M(u)) du / f(pi(A))` for the extremal profile `M` with levels
/// `1, pi(A), 0`. A lower bound on `C_f(A)`.
pub fn envelope_upper(chain: &MarkovChain, a: &VertexSet, kernel: &CongestionKernel) -> Result<f64> {
    kernel.require_concave()?;
    let psi = geometry::psi(chain, a)?;
    Ok(upper_envelope_value(a.mass(), psi, kernel))
}

fn upper_envelope_value(mass: f64, psi: f64, kernel: &CongestionKernel) -> f64 {
    let comp = 1.0 - mass;
    let w_full = psi / comp;
    let w_empty = psi / mass;
    let w_mid = 1.0 - psi / (mass * comp);
    (w_full * kernel.eval(1.0) + w_mid * kernel.eval(mass) + w_empty * kernel.eval(0.0)) / kernel.eval(mass)
}

/// `int f(m(u)) du / f(pi(A))` for the two-level profile
/// `pi(A) + Psi/wp` on `u < wp`, `pi(A) - Psi/(1-wp)` above. An upper bound
/// on `C_f(A)` for any `wp` in the crossing interval.
pub fn envelope_lower(chain: &MarkovChain, a: &VertexSet, kernel: &CongestionKernel, wp: f64) -> Result<f64> {
    kernel.require_concave()?;
    require_proper(a)?;
    let (lo, hi) = LevelProfile::new(chain, a)?.wp_interval();
    let slack = chain.tol();
    if wp < lo - slack || wp > hi + slack {
        return Err(Error::BadArgument("wp is outside the crossing interval"));
    }
    let psi = geometry::psi(chain, a)?;
    Ok(lower_envelope_value(a.mass(), psi, wp, kernel))
}

fn lower_envelope_value(mass: f64, psi: f64, wp: f64, kernel: &CongestionKernel) -> f64 {
    let up = if wp > 0.0 { wp * kernel.eval(mass + psi / wp) } else { 0.0 };
    let down = if wp < 1.0 { (1.0 - wp) * kernel.eval(mass - psi / (1.0 - wp)) } else { 0.0 };
    (up + down) / kernel.eval(mass)
}

/// [`envelope_lower`] at both ends and the middle of the crossing interval,
/// keeping the smallest (tightest) value.
pub fn envelope_lower_best(chain: &MarkovChain, a: &VertexSet, kernel: &CongestionKernel) -> Result<f64> {
    kernel.require_concave()?;
    require_proper(a)?;
    let m = SetMeasures::new(chain, a)?;
    Ok(best_lower_envelope(&m, kernel))
}

fn best_lower_envelope(m: &SetMeasures<'_>, kernel: &CongestionKernel) -> f64 {
    let (lo, hi) = m.profile().wp_interval();
    [lo, 0.5 * (lo + hi), hi]
        .iter()
        .map(|&wp| lower_envelope_value(m.mass(), m.psi(), wp, kernel))
        .fold(f64::INFINITY, f64::min)
}

/// The five blocking-style integrals of `t -> Psi(A^c, t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BlockingPsis {
    /// `int_0^1 Psi(A^c,t) dt / pi(A)^2`
    pub gl: f64,
    /// `int_0^1 Psi(A^c,t) dt / (pi(A)^2 pi(A^c)^2)`
    pub gl_tilde: f64,
    /// `int_0^1 Psi(A^c,t) / (t pi(A)) dt`
    pub modified: f64,
    /// `int_0^{pi(A)} Psi(A^c,t) dt / pi(A)^2`
    pub plus: f64,
    /// `int_0^{pi(A)} Psi(A^c,t) dt / (pi(A)^2 pi(A^c)^2)`
    pub plus_tilde: f64,
}

impl BlockingPsis {
    /// Integrates the piecewise-linear `Psi(A^c, t)` segment by segment.
    ///
    /// For `t <= pi(A)` the greedy set for `A^c` takes states by decreasing
    /// `Q(A,y)/pi(y)`, each with slope `1 - Q(A,y)/pi(y)`; above `pi(A)` the
    /// blocking convention subtracts `t - pi(A)`.
    pub fn from_profile(profile: &LevelProfile) -> Self {
        let pa = profile.base_mass();
        let pc = 1.0 - pa;
        let mut pieces: Vec<(f64, f64, f64, f64)> = Vec::new(); // (a, b, value at a, slope)
        let mut start = 0.0;
        let mut value = 0.0;
        for g in profile.groups() {
            let slope = 1.0 - g.threshold;
            let end = start + g.mass;
            if start < pa && pa < end {
                pieces.push((start, pa, value, slope));
                pieces.push((pa, end, value + slope * (pa - start), slope));
            } else {
                pieces.push((start, end, value, slope));
            }
            value += slope * g.mass;
            start = end;
        }

        let (mut total, mut below, mut inv_t) = (0.0, 0.0, 0.0);
        for (a, b, v0, slope) in pieces {
            if b <= a {
                continue;
            }
            let above = a >= pa;
            let alpha = v0 - slope * a + if above { pa } else { 0.0 };
            let beta = slope - if above { 1.0 } else { 0.0 };
            let area = alpha * (b - a) + beta * (b * b - a * a) / 2.0;
            total += area;
            if !above {
                below += area;
            }
            // value at t = 0 is zero, so the first piece has no log term
            inv_t += if a > 0.0 { alpha * libm::log(b / a) } else { 0.0 } + beta * (b - a);
        }
        let pa2 = pa * pa;
        let pc2 = pc * pc;
        BlockingPsis {
            gl: total / pa2,
            gl_tilde: total / (pa2 * pc2),
            modified: inv_t / pa,
            plus: below / pa2,
            plus_tilde: below / (pa2 * pc2),
        }
    }
}

pub fn blocking_psis(chain: &MarkovChain, a: &VertexSet) -> Result<BlockingPsis> {
    require_proper(a)?;
    Ok(BlockingPsis::from_profile(&LevelProfile::new(chain, a)?))
}

fn primary_kernels() -> [CongestionKernel; 3] {
    [CongestionKernel::variance(), CongestionKernel::entropy(), CongestionKernel::sqrt_variance()]
}

/// The modified-conductance sandwich for the three primary kernels plus
/// the envelope bounds on each.
pub fn sandwich_from_measures(m: &SetMeasures<'_>) -> Result<Vec<Check>> {
    let pa = m.mass();
    let pc = 1.0 - pa;
    let psi = m.psi();
    let phit = psi / (pa * pc);
    let phi = psi / pa;
    let [var, ent, sv] = primary_kernels();
    let c_var = m.congestion(&var)?;
    let c_ent = m.congestion(&ent)?;
    let c_sv = m.congestion(&sv)?;
    let root = 1.0 - libm::sqrt((1.0 - phit * phit).max(0.0));
    let mut out = vec![
        Check::ge("modified sandwich: phi~ >= 1 - C_sqrtvar", phit, 1.0 - c_sv),
        Check::ge("modified sandwich: 1 - C_sqrtvar >= 1 - sqrt(1 - phi~^2)", 1.0 - c_sv, root),
        Check::ge("modified sandwich: 1 - sqrt(1 - phi~^2) >= phi~^2/2", root, phit * phit / 2.0),
        Check::ge("modified sandwich: phi~ >= 1 - C_ent", phit, 1.0 - c_ent),
        Check::ge(
            "modified sandwich: 1 - C_ent >= 2 phi^2 / log(1/pi(A))",
            1.0 - c_ent,
            2.0 * phi * phi / libm::log(1.0 / pa),
        ),
        Check::ge("modified sandwich: phi~ >= 1 - C_var", phit, 1.0 - c_var),
        Check::ge("modified sandwich: 1 - C_var >= 4 phi~^2 pi(A) pi(A^c)", 1.0 - c_var, 4.0 * phit * phit * pa * pc),
    ];
    const UPPER: [&str; 3] = ["envelope: C_var >= upper envelope", "envelope: C_ent >= upper envelope", "envelope: C_sqrtvar >= upper envelope"];
    const LOWER: [&str; 3] = ["envelope: C_var <= lower envelope", "envelope: C_ent <= lower envelope", "envelope: C_sqrtvar <= lower envelope"];
    for (i, (k, c)) in [(&var, c_var), (&ent, c_ent), (&sv, c_sv)].into_iter().enumerate() {
        out.push(Check::ge(UPPER[i], c, upper_envelope_value(pa, psi, k)));
        out.push(Check::le(LOWER[i], c, best_lower_envelope(m, k)));
    }
    Ok(out)
}

/// `sqrt(Phi~_PP*) >= phi~ >= 1 - sqrt(1 - Phi~_PP*) >= Phi~_PP* / 2`.
pub fn pp_star_from_measures(m: &SetMeasures<'_>) -> Vec<Check> {
    let pa = m.mass();
    let prod = pa * (1.0 - pa);
    let phit = m.psi() / prod;
    let pp = m.pp_star_boundary() / prod;
    let mid = 1.0 - libm::sqrt((1.0 - pp).max(0.0));
    vec![
        Check::ge("reversibilization: sqrt(Phi~_PP*) >= phi~", libm::sqrt(pp.max(0.0)), phit),
        Check::ge("reversibilization: phi~ >= 1 - sqrt(1 - Phi~_PP*)", phit, mid),
        Check::ge("reversibilization: 1 - sqrt(1 - Phi~_PP*) >= Phi~_PP*/2", mid, pp / 2.0),
    ]
}

/// `Phi~(A) >= phi~(A) >= min{1, gamma/(1-gamma)} Phi~(A)`, plus the lazy
/// concave bound when the chain is lazy.
pub fn conductance_sandwich_from_measures(chain: &MarkovChain, m: &SetMeasures<'_>) -> Vec<Check> {
    let pa = m.mass();
    let prod = pa * (1.0 - pa);
    let big = m.boundary() / prod;
    let small = m.psi() / prod;
    let gamma = chain.min_holding();
    let factor = if gamma >= 0.5 { 1.0 } else { gamma / (1.0 - gamma) };
    let mut out = vec![
        Check::ge("nonlazy conductance: Phi~ >= phi~", big, small),
        Check::ge("nonlazy conductance: phi~ >= min(1, gamma/(1-gamma)) Phi~", small, factor * big),
    ];
    if chain.is_lazy() {
        const NAMES: [&str; 3] = ["lazy concave: C_var <= bound", "lazy concave: C_ent <= bound", "lazy concave: C_sqrtvar <= bound"];
        for (i, k) in primary_kernels().iter().enumerate() {
            if let Ok(c) = m.congestion(k) {
                out.push(Check::le(NAMES[i], c, lazy_bound_value(pa, m.boundary(), k)));
            }
        }
    }
    out
}

/// Holding-probability bounds on `1 - C_f(A)` for the three primary
/// kernels, and the speed-up identity when `gamma >= 1/2`.
///
/// The entropy row uses `Phi(A) = Q(A,A^c)/pi(A)`.
pub fn holding_from_measures(chain: &MarkovChain, m: &SetMeasures<'_>) -> Result<Vec<Check>> {
    let gamma = chain.min_holding();
    if gamma <= 0.0 {
        return Err(Error::ZeroHolding);
    }
    let pa = m.mass();
    let pc = 1.0 - pa;
    let q = m.boundary();
    let big = q / (pa * pc);
    let phi_mass = q / pa;
    let c = gamma.min(1.0 - gamma) / ((1.0 - gamma) * (1.0 - gamma));
    let [var, ent, sv] = primary_kernels();
    let gap_var = 1.0 - m.congestion(&var)?;
    let gap_ent = 1.0 - m.congestion(&ent)?;
    let gap_sv = 1.0 - m.congestion(&sv)?;
    let mut out = vec![
        Check::ge("holding: Phi~ >= 1 - C_var", big, gap_var),
        Check::ge("holding: 1 - C_var >= 2c Phi~^2 pi(A) pi(A^c)", gap_var, 2.0 * c * big * big * pa * pc),
        Check::ge("holding: Phi~ >= 1 - C_ent", big, gap_ent),
        Check::ge("holding: 1 - C_ent >= c Phi^2 / log(1/pi(A))", gap_ent, c * phi_mass * phi_mass / libm::log(1.0 / pa)),
        Check::ge("holding: Phi~ >= 1 - C_sqrtvar", big, gap_sv),
        Check::ge("holding: 1 - C_sqrtvar >= c Phi~^2 / 4", gap_sv, c * big * big / 4.0),
    ];
    if gamma >= 0.5 {
        let fast = chain.holding_speedup(gamma)?;
        let profile = LevelProfile::new(&fast, &VertexSet::from_states(&fast, m.set().iter())?)?;
        const NAMES: [&str; 3] = [
            "holding rescale: 1 - C_var = 2(1-gamma)(1 - C'_var)",
            "holding rescale: 1 - C_ent = 2(1-gamma)(1 - C'_ent)",
            "holding rescale: 1 - C_sqrtvar = 2(1-gamma)(1 - C'_sqrtvar)",
        ];
        for (i, (k, gap)) in [(&var, gap_var), (&ent, gap_ent), (&sv, gap_sv)].into_iter().enumerate() {
            let fast_gap = 1.0 - congestion_from_profile(&profile, k)?;
            out.push(Check::eq(NAMES[i], gap, 2.0 * (1.0 - gamma) * fast_gap));
        }
    }
    Ok(out)
}

/// Identities and inequalities linking `1 - C_f` to the blocking `psi`s.
pub fn blocking_checks_from_measures(m: &SetMeasures<'_>) -> Result<Vec<Check>> {
    let pa = m.mass();
    let pc = 1.0 - pa;
    let b = *m.blocking();
    let [var, ent, sv] = primary_kernels();
    let gap_var = 1.0 - m.congestion(&var)?;
    let gap_ent = 1.0 - m.congestion(&ent)?;
    let gap_sv = 1.0 - m.congestion(&sv)?;
    let gap_sqrt = 1.0 - m.congestion(&CongestionKernel::sqrt())?;
    let phi = m.psi() / pa;
    Ok(vec![
        Check::eq("blocking identity: 1 - C_var = 2 pi(A) pi(A^c) psi~_gl", gap_var, 2.0 * pa * pc * b.gl_tilde),
        Check::eq("blocking identity: 1 - C_ent = psi_mod / log(1/pi(A))", gap_ent, b.modified / libm::log(1.0 / pa)),
        Check::ge("blocking: 1 - C_sqrtvar >= psi~+/4", gap_sv, b.plus_tilde / 4.0),
        Check::ge("blocking chain: psi_gl >= psi_mod/2", b.gl, b.modified / 2.0),
        Check::ge("blocking chain: psi_mod/2 >= 1 - C_sqrt", b.modified / 2.0, gap_sqrt),
        Check::ge("blocking chain: 1 - C_sqrt >= psi+/4", gap_sqrt, b.plus / 4.0),
        Check::ge("blocking chain: psi+/4 >= phi^2/4", b.plus / 4.0, phi * phi / 4.0),
    ])
}

/// Chain-level comparisons between kernels.
pub fn appendix_checks_from_measures(m: &SetMeasures<'_>) -> Result<Vec<Check>> {
    let c_var = m.congestion(&CongestionKernel::variance())?;
    let c_ent = m.congestion(&CongestionKernel::entropy())?;
    let c_sv = m.congestion(&CongestionKernel::sqrt_variance())?;
    let c_sqrt = m.congestion(&CongestionKernel::sqrt())?;
    Ok(vec![
        Check::le("kernel comparison: C_ent <= (1 + C_var)/2", c_ent, 0.5 * (1.0 + c_var)),
        Check::le("kernel comparison: C_sqrtvar <= sqrt(C_var)", c_sv, libm::sqrt(c_var.max(0.0))),
        Check::le("kernel comparison: C_sqrtvar <= C_sqrt", c_sv, c_sqrt),
    ])
}

/// `int_0^1 pi(A_u) du = pi(A)`.
pub fn martingale_check(m: &SetMeasures<'_>) -> Check {
    Check::eq("martingale: int pi(A_u) du = pi(A)", m.profile().integrate(|x| x), m.mass())
}

fn measures_checks<F>(chain: &MarkovChain, a: &VertexSet, f: F) -> Result<Vec<Check>>
where
    F: FnOnce(&SetMeasures<'_>) -> Result<Vec<Check>>,
{
    let m = SetMeasures::new(chain, a)?;
    f(&m)
}

/// The modified-conductance sandwich rows for one set.
pub fn profile_sandwich(chain: &MarkovChain, a: &VertexSet) -> Result<Vec<Check>> {
    measures_checks(chain, a, sandwich_from_measures)
}

/// Holding-probability rows for one set; `ZeroHolding` when `gamma = 0`.
pub fn holding_congestion_bounds(chain: &MarkovChain, a: &VertexSet) -> Result<Vec<Check>> {
    measures_checks(chain, a, |m| holding_from_measures(chain, m))
}

/// Reversibilization sandwich for one set.
pub fn pp_star_sandwich(chain: &MarkovChain, a: &VertexSet) -> Result<Vec<Check>> {
    measures_checks(chain, a, |m| Ok(pp_star_from_measures(m)))
}

/// Blocking identities and the `psi` ordering for one set.
pub fn blocking_checks(chain: &MarkovChain, a: &VertexSet) -> Result<Vec<Check>> {
    measures_checks(chain, a, blocking_checks_from_measures)
}

/// `Phi~_PP*(A)` computed on the explicit `P P*` chain.
pub fn pp_star_conductance(chain: &MarkovChain, a: &VertexSet) -> Result<f64> {
    let pp = chain.multiplicative_reversibilization();
    geometry::conductance(&pp, a, Normalization::Product)
}

/// Grid checks of the two scalar inequalities behind the sandwich bounds.
///
/// `grid` points per axis; `g(x,y) >= 2y^2` uses `x = (i + 1/2)/grid` and
/// `y = (1 - x) j / grid`, the square-root inequality uses `X, Y = i/grid, j/grid`.
pub fn scalar_inequality_suite(grid: usize) -> Vec<CheckResult> {
    let mut acc = SuiteAccumulator::new();
    let xlogx = |z: f64, w: f64| if z > 0.0 { z * libm::log(z / w) } else { 0.0 };
    for i in 0..grid {
        let x = (i as f64 + 0.5) / grid as f64;
        for j in 0..grid {
            let y = (1.0 - x) * j as f64 / grid as f64;
            let g = xlogx(x + y, x) + xlogx(1.0 - x - y, 1.0 - x);
            acc.add(&Check::ge("scalar: g(x,y) >= 2y^2", g, 2.0 * y * y));
        }
    }
    for i in 0..=grid {
        let xx = i as f64 / grid as f64;
        for j in 0..=grid {
            let yy = j as f64 / grid as f64;
            let lhs = libm::sqrt(xx * yy) + libm::sqrt((1.0 - xx) * (1.0 - yy));
            let rhs = libm::sqrt((1.0 - (xx - yy) * (xx - yy)).max(0.0));
            acc.add(&Check::le("scalar: sqrt(XY) + sqrt((1-X)(1-Y)) <= sqrt(1-(X-Y)^2)", lhs, rhs));
        }
    }
    acc.finish(1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::subsets;

    fn every_set(c: &MarkovChain) -> impl Iterator<Item = VertexSet> + '_ {
        subsets::proper_subsets(c.n()).map(move |m| VertexSet::from_mask(c, m).unwrap())
    }

    #[test]
    fn complete_graph_congestion_is_alpha() {
        for &(m, alpha) in &[(5usize, 0.3f64), (4, -0.2), (6, 0.0)] {
            let c = generators::complete_graph(m, alpha).unwrap().chain;
            for a in every_set(&c) {
                let v = f_congestion(&c, &a, &CongestionKernel::variance()).unwrap();
                let s = f_congestion(&c, &a, &CongestionKernel::sqrt_variance()).unwrap();
                assert!((v - alpha.abs()).abs() < 1e-12);
                assert!((s - alpha.abs()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kernel_vanishing_and_trivial_sets() {
        let c = generators::cycle(5).unwrap().chain;
        let full = VertexSet::full(&c);
        assert_eq!(f_congestion(&c, &full, &CongestionKernel::variance()).unwrap_err(), Error::TrivialSet);
        let a = VertexSet::singleton(&c, 0).unwrap();
        let zero = CongestionKernel::custom("zero", |_| 0.0);
        assert_eq!(f_congestion(&c, &a, &zero).unwrap_err(), Error::KernelVanishes);
    }

    #[test]
    fn lazy_bound_requires_laziness() {
        let c = generators::cycle(5).unwrap().chain;
        let a = VertexSet::singleton(&c, 0).unwrap();
        assert!(matches!(lazy_concave_bound(&c, &a, &CongestionKernel::variance()), Err(Error::NotLazy { .. })));
        let two = generators::two_point(0.75).unwrap().chain;
        let a = VertexSet::singleton(&two, 0).unwrap();
        let k = CongestionKernel::sqrt_variance();
        let bound = lazy_concave_bound(&two, &a, &k).unwrap();
        // pi(A) = 1/2, Q = 1/8: the bound is f(3/4)/f(1/2) = sqrt(3)/2
        assert!((bound - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(f_congestion(&two, &a, &k).unwrap() <= bound + 1e-12);
        let convex = CongestionKernel::custom("a^2", |a| a * a);
        assert_eq!(lazy_concave_bound(&two, &a, &convex).unwrap_err(), Error::NotConcave);
    }

    #[test]
    fn upper_envelope_is_one_minus_phi() {
        let c = generators::random_chain(5, 11, generators::RandomKind::Sparse).unwrap();
        for a in every_set(&c) {
            for k in [CongestionKernel::variance(), CongestionKernel::sqrt_variance(), CongestionKernel::sine()] {
                let env = envelope_upper(&c, &a, &k).unwrap();
                let phit = geometry::modified_conductance(&c, &a, Normalization::Product).unwrap();
                assert!((env - (1.0 - phit)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cycle_sine_envelope() {
        let c = generators::cycle(7).unwrap().chain;
        let k = CongestionKernel::sine();
        for a in every_set(&c) {
            let psi = geometry::psi(&c, &a).unwrap();
            let at_half = envelope_lower(&c, &a, &k, 0.5).unwrap();
            let cf = f_congestion(&c, &a, &k).unwrap();
            assert!(cf <= at_half + 1e-12);
            // with wp = 1/2 the two-level profile is pi(A) +- 2 Psi
            let closed = (libm::sin(core::f64::consts::PI * (a.mass() + 2.0 * psi))
                + libm::sin(core::f64::consts::PI * (a.mass() - 2.0 * psi)))
                / (2.0 * libm::sin(core::f64::consts::PI * a.mass()));
            assert!((at_half - closed).abs() < 1e-12);
            assert!((closed - libm::cos(2.0 * core::f64::consts::PI * psi)).abs() < 1e-12);
        }
    }

    #[test]
    fn envelope_rejects_bad_wp() {
        let c = generators::complete_graph(5, 0.3).unwrap().chain;
        let a = VertexSet::from_states(&c, [0, 1]).unwrap();
        assert!(envelope_lower(&c, &a, &CongestionKernel::variance(), 0.01).is_err());
    }

    /// Midpoint-rule integral of the blocking `Psi(A^c, t)` as an oracle.
    fn quadrature(c: &MarkovChain, a: &VertexSet, lo: f64, hi: f64, weight: impl Fn(f64) -> f64) -> f64 {
        let ac = a.complement(c);
        let steps = 20_000;
        let h = (hi - lo) / steps as f64;
        (0..steps)
            .map(|i| {
                let t = lo + (i as f64 + 0.5) * h;
                geometry::psi_flow_blocking(c, &ac, t).unwrap() * weight(t) * h
            })
            .sum()
    }

    #[test]
    fn blocking_psis_match_quadrature() {
        let c = generators::random_chain(4, 5, generators::RandomKind::Dense).unwrap();
        for a in every_set(&c) {
            let b = blocking_psis(&c, &a).unwrap();
            let pa = a.mass();
            let gl = quadrature(&c, &a, 0.0, 1.0, |_| 1.0) / (pa * pa);
            let plus = quadrature(&c, &a, 0.0, pa, |_| 1.0) / (pa * pa);
            let md = quadrature(&c, &a, 0.0, 1.0, |t| 1.0 / (t * pa));
            assert!((b.gl - gl).abs() < 1e-6, "{} {}", b.gl, gl);
            assert!((b.plus - plus).abs() < 1e-6);
            assert!((b.modified - md).abs() < 1e-4, "{} {}", b.modified, md);
        }
    }

    #[test]
    fn blocking_identities_hold_exactly() {
        let c = generators::random_chain(6, 21, generators::RandomKind::Sparse).unwrap();
        for a in every_set(&c) {
            for chk in blocking_checks(&c, &a).unwrap().iter().take(2) {
                assert!(chk.holds(1e-10), "{chk:?}");
            }
        }
    }

    #[test]
    fn two_point_holding_rows() {
        for gamma in [0.25, 0.6, 0.9] {
            let c = generators::two_point(gamma).unwrap().chain;
            let a = VertexSet::singleton(&c, 0).unwrap();
            let gap = 1.0 - f_congestion(&c, &a, &CongestionKernel::sqrt_variance()).unwrap();
            assert!(2.0 * (1.0 - gamma) >= gap - 1e-12);
            assert!(gap >= 2.0 * f64::min(gamma, 1.0 - gamma) - 1e-12);
            for chk in holding_congestion_bounds(&c, &a).unwrap() {
                assert!(chk.holds(1e-10), "{chk:?}");
            }
        }
        let c = generators::cycle(5).unwrap().chain;
        let a = VertexSet::singleton(&c, 0).unwrap();
        assert_eq!(holding_congestion_bounds(&c, &a).unwrap_err(), Error::ZeroHolding);
    }

    #[test]
    fn pp_star_flow_identity_matches_explicit_chain() {
        let c = generators::random_chain(5, 2, generators::RandomKind::Sparse).unwrap();
        for a in every_set(&c) {
            let m = SetMeasures::new(&c, &a).unwrap();
            let via_identity = m.pp_star_boundary() / (a.mass() * (1.0 - a.mass()));
            let explicit = pp_star_conductance(&c, &a).unwrap();
            assert!((via_identity - explicit).abs() < 1e-12);
        }
    }

    #[test]
    fn directed_triangle_is_strictly_inside() {
        let rows = [vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]];
        let c = MarkovChain::new(&rows, None).unwrap();
        // PP* = I here, so the sandwich degenerates; use a drifting walk instead
        let rows = [vec![0.2, 0.7, 0.1], vec![0.1, 0.2, 0.7], vec![0.7, 0.1, 0.2]];
        let d = MarkovChain::new(&rows, None).unwrap();
        let a = VertexSet::singleton(&d, 0).unwrap();
        let checks = pp_star_sandwich(&d, &a).unwrap();
        assert!(checks.iter().all(|c| c.slack() > 1e-6), "{checks:?}");
        assert!(!c.multiplicative_reversibilization().is_irreducible());
    }

    #[test]
    fn scalar_grids_pass() {
        for r in scalar_inequality_suite(100) {
            assert!(r.passed, "{r:?}");
        }
    }
}

use mixbound_core::bounds::BoundValue;
use mixbound_core::generators::{self, RandomKind};
use mixbound_core::geometry::{self, Normalization};
use mixbound_core::levels::{self, LevelProfile};
use mixbound_core::mc;
use mixbound_core::oracle;
use mixbound_core::{congestion, CongestionKernel, Decay, MarkovChain, VertexSet};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = RandomKind> {
    prop_oneof![Just(RandomKind::Dense), Just(RandomKind::Sparse), Just(RandomKind::Lazy)]
}

/// A random chain on 2..=7 states and a mask selecting a proper subset.
fn chain_and_set() -> impl Strategy<Value = (MarkovChain, u64)> {
    (2usize..=7, any::<u64>(), kind(), any::<u64>()).prop_map(|(n, seed, k, raw)| {
        let c = generators::random_chain(n, seed, k).unwrap();
        let full = (1u64 << n) - 1;
        let mask = 1 + raw % (full - 1);
        (c, mask)
    })
}

fn kernels() -> [CongestionKernel; 4] {
    [CongestionKernel::variance(), CongestionKernel::entropy(), CongestionKernel::sqrt_variance(), CongestionKernel::sine()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn level_masses_average_to_base_mass((c, mask) in chain_and_set()) {
        let a = VertexSet::from_mask(&c, mask).unwrap();
        let p = LevelProfile::new(&c, &a).unwrap();
        prop_assert!((p.integrate(|m| m) - a.mass()).abs() < 1e-12);
    }

    #[test]
    fn kernels_are_probability_distributions((c, mask) in chain_and_set()) {
        let a = VertexSet::from_mask(&c, mask).unwrap();
        prop_assert!((levels::kernel_k(&c, &a).unwrap().total() - 1.0).abs() < 1e-12);
        let doob = levels::doob_kernel(&c, &a).unwrap();
        prop_assert!((doob.total() - 1.0).abs() < 1e-12);
        prop_assert!(doob.outcomes().iter().all(|(s, _)| !s.is_empty()));
    }

    #[test]
    fn concave_congestion_is_at_most_one((c, mask) in chain_and_set()) {
        let a = VertexSet::from_mask(&c, mask).unwrap();
        for k in kernels() {
            let v = congestion::f_congestion(&c, &a, &k).unwrap();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v), "{} = {v}", k.name());
        }
    }

    #[test]
    fn symmetric_kernels_see_complements_alike((c, mask) in chain_and_set()) {
        let a = VertexSet::from_mask(&c, mask).unwrap();
        let b = a.complement(&c);
        for k in kernels().into_iter().filter(|k| k.is_symmetric()) {
            let x = congestion::f_congestion(&c, &a, &k).unwrap();
            let y = congestion::f_congestion(&c, &b, &k).unwrap();
            prop_assert!((x - y).abs() < 1e-10, "{}: {x} vs {y}", k.name());
        }
    }

    #[test]
    fn psi_agrees_with_level_construction((c, mask) in chain_and_set()) {
        let a = VertexSet::from_mask(&c, mask).unwrap();
        let direct = geometry::psi(&c, &a).unwrap();
        let via = geometry::psi_via_levels(&c, &a).unwrap();
        prop_assert!((direct - via).abs() < 1e-12);
        prop_assert!(direct <= geometry::boundary_flow(&c, &a) + 1e-12);
    }

    #[test]
    fn modified_conductance_never_exceeds_conductance((c, mask) in chain_and_set()) {
        let a = VertexSet::from_mask(&c, mask).unwrap();
        let phi = geometry::modified_conductance(&c, &a, Normalization::Product).unwrap();
        let big = geometry::conductance(&c, &a, Normalization::Product).unwrap();
        prop_assert!(phi <= big + 1e-12);
        prop_assert!(phi >= -1e-12);
    }

    #[test]
    fn one_step_duality(n in 2usize..=6, seed in any::<u64>(), k in kind()) {
        let c = generators::random_chain(n, seed, k).unwrap();
        for x in 0..n {
            let s0 = VertexSet::singleton(&c, x).unwrap();
            let law = levels::doob_kernel(&c, &s0).unwrap();
            for y in 0..n {
                let dual = law.expect(|s| if s.contains(y) { c.pi()[y] / s.mass() } else { 0.0 });
                prop_assert!((c.p(x, y) - dual).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn decay_inverse_round_trips(a in 1e-6f64..1.0) {
        for d in Decay::ALL {
            let back = d.inverse(d.eval(a));
            prop_assert!((back - a).abs() < 1e-9 * a.max(1e-3), "{d:?}: {a} -> {back}");
        }
    }

    #[test]
    fn ceiling_never_undercuts(raw in 0.0f64..1e12) {
        match BoundValue::from_raw(raw) {
            BoundValue::Steps(s) => prop_assert!(s as f64 >= raw && s >= 1),
            BoundValue::Unbounded => prop_assert!(false),
        }
    }

    #[test]
    fn stationary_vector_is_fixed(n in 2usize..=8, seed in any::<u64>(), k in kind()) {
        let c = generators::random_chain(n, seed, k).unwrap();
        let moved = oracle::step_distribution(&c, 0, 0).unwrap();
        prop_assert_eq!(moved[0], 1.0);
        for y in 0..n {
            let v: f64 = (0..n).map(|x| c.pi()[x] * c.p(x, y)).sum();
            prop_assert!((v - c.pi()[y]).abs() < 1e-10);
        }
    }

    #[test]
    fn monte_carlo_split_points_do_not_matter(seed in any::<u64>(), cut in 0u64..200) {
        let c = generators::random_chain(4, 17, RandomKind::Sparse).unwrap();
        let s0 = VertexSet::singleton(&c, 1).unwrap();
        let g = |s: &VertexSet| 1.0 - s.mass();
        let whole = mc::weighted_samples(&c, &s0, 3, &g, seed, 0..200).unwrap();
        let mut parts = mc::weighted_samples(&c, &s0, 3, &g, seed, 0..cut).unwrap();
        parts.extend(mc::weighted_samples(&c, &s0, 3, &g, seed, cut..200).unwrap());
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn pairwise_sum_matches_naive(xs in proptest::collection::vec(-1e3f64..1e3, 0..200)) {
        let naive: f64 = xs.iter().sum();
        let scale: f64 = xs.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        prop_assert!((mc::pairwise_sum(&xs) - naive).abs() <= 1e-12 * scale);
    }
}

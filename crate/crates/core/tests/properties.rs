use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use matching_scheme::arith::{factorial, int_rational, odd_double_factorial, rational};
use matching_scheme::bounds::{stability_distance_bound, SpectralSummary};
use matching_scheme::characters::character;
use matching_scheme::families::{
    greedy_maximal_intersecting, inner_edge_count, project_restriction_form, random_family, restriction, Projector,
};
use matching_scheme::graphs::{GraphKind, MatchingGraph};
use matching_scheme::isoperimetry::{neighborhood, Adjacency};
use matching_scheme::matchings::{cycle_type, sphere_size, MatchingSpace, PerfectMatching};
use matching_scheme::partitions::{enumerate_partitions, Partition};
use matching_scheme::spherical::scheme_table;

fn arb_partition(max: usize) -> impl Strategy<Value = Partition> {
    (1..=max).prop_flat_map(|m| {
        let all = enumerate_partitions(m);
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dimension_is_character_at_identity(lambda in arb_partition(12)) {
        let identity = Partition::column(lambda.size());
        prop_assert_eq!(character(&lambda, &identity).unwrap(), lambda.dimension());
    }

    #[test]
    fn dimension_branches(lambda in arb_partition(10)) {
        let below: BigInt = lambda.branch_down().unwrap().iter().map(Partition::dimension).sum();
        if lambda.size() > 1 {
            prop_assert_eq!(below, lambda.dimension());
        }
    }

    #[test]
    fn unrank_gives_involutions(n in 1usize..=9, raw in any::<u64>()) {
        let total = (1..n).fold(1u64, |acc, k| acc * (2 * k as u64 + 1));
        let m = PerfectMatching::unrank(n, raw % total).unwrap();
        prop_assert!(m.is_valid());
        for v in 1..=2 * n {
            prop_assert_ne!(m.partner(v), v);
            prop_assert_eq!(m.partner(m.partner(v)), v);
        }
        prop_assert_eq!(m.rank(), raw % total);
    }

    #[test]
    fn stability_bound_is_monotone(n in 4usize..=6, num in 0u64..=100, ell in 0u64..50) {
        let summary = SpectralSummary::from_scheme(&scheme_table(n).unwrap()).unwrap();
        let alpha = rational(num, 100);
        let at = stability_distance_bound(&summary, &alpha, ell).unwrap();
        let next = stability_distance_bound(&summary, &alpha, ell + 1).unwrap();
        prop_assert!(at <= next);
        prop_assert!(stability_distance_bound(&summary, &Zero::zero(), 0).unwrap().is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn restriction_sums_count_fixed_points(n in 2usize..=5, seed in any::<u64>(), p in 0.01f64..0.7) {
        let s = MatchingSpace::new(n).unwrap();
        let f = random_family(&s, &mut rng(seed), p);
        let star = PerfectMatching::identity(n);
        let mut restricted = 0;
        for (i, j) in star.edges() {
            restricted += restriction(&s, &f, i, j).unwrap().len();
        }
        let fixed: usize = f
            .indices()
            .into_iter()
            .map(|k| cycle_type(&star, s.get(k)).unwrap().fixed_point_count())
            .sum();
        prop_assert_eq!(restricted, fixed);
    }

    #[test]
    fn top_two_projections_match_restriction_form(n in 3usize..=5, seed in any::<u64>(), p in 0.01f64..0.7, k in any::<usize>()) {
        let s = MatchingSpace::new(n).unwrap();
        let t = scheme_table(n).unwrap();
        let proj = Projector::new(&s, &t).unwrap();
        let f = random_family(&s, &mut rng(seed), p);
        let m = k % s.len();
        let lhs = project_restriction_form(&s, &f, s.get(m)).unwrap() + rational(f.len(), odd_double_factorial(n));
        let rhs = proj.project(&f, &Partition::row(n), m).unwrap()
            + proj.project(&f, &Partition::hook_n_minus_one(n).unwrap(), m).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn intersecting_families_respect_stability_bound(n in 4usize..=5, seed in any::<u64>()) {
        let s = MatchingSpace::new(n).unwrap();
        let t = scheme_table(n).unwrap();
        let proj = Projector::new(&s, &t).unwrap();
        let summary = SpectralSummary::from_scheme(&t).unwrap();
        let f = greedy_maximal_intersecting(&s, &mut rng(seed));
        let ell = inner_edge_count(&s, &f).unwrap();
        prop_assert_eq!(ell, 0);
        let alpha = rational(f.len(), odd_double_factorial(n));
        let bound = stability_distance_bound(&summary, &alpha, ell).unwrap();
        prop_assert!(proj.distance_to_u(&f).unwrap() <= bound);
    }

    #[test]
    fn neighborhoods_grow_to_everything(n in 2usize..=5, seed in any::<u64>(), p in 0.0f64..0.05) {
        let s = MatchingSpace::new(n).unwrap();
        let adj = Adjacency::new(&MatchingGraph::new(&s, GraphKind::Transposition));
        let mut x = random_family(&s, &mut rng(seed), p);
        x.insert((seed as usize) % s.len());
        let mut previous = x.clone();
        for h in 1..n as u32 {
            let ball = neighborhood(&adj, &s, &x, h).unwrap();
            prop_assert!(previous.is_subset(&ball));
            previous = ball;
        }
        prop_assert_eq!(previous.len(), s.len());
    }
}

#[test]
fn sphere_sizes_sum_to_matching_count() {
    for n in 1..=12 {
        let total: BigInt = enumerate_partitions(n).iter().map(|l| sphere_size(l).unwrap()).sum();
        assert_eq!(total, odd_double_factorial(n), "n = {n}");
    }
}

#[test]
fn squared_dimensions_sum_to_group_order() {
    for m in 1..=10 {
        let total: BigInt = enumerate_partitions(m).iter().map(|l| l.dimension().pow(2)).sum();
        assert_eq!(total, factorial(m), "m = {m}");
    }
}

#[test]
fn spherical_functions_are_one_at_identity() {
    for n in 2..=6 {
        let t = scheme_table(n).unwrap();
        let identity = Partition::column(n);
        for mu in t.partitions() {
            assert_eq!(t.phi(mu, &identity), Some(&int_rational(BigInt::one())), "μ = {mu}");
        }
    }
}

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use unimap::dist::DistTable;
use unimap::exact::lehman_walsh_count;
use unimap::oracle::{census, exact_root_degree_dist, exact_unfolded_dist, BallOutcome};
use unimap::sampler::{exact_quotients, UnicellularSampler};

fn ng() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=6).prop_flat_map(|n| (Just(n), 0..=n / 2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decorated_trees_cover_each_map_equally((n, g) in ng()) {
        let quotients = exact_quotients(n, g).unwrap();
        let count = census(n).unwrap().get(g);
        prop_assert_eq!(quotients.len() as u64 % count, 0);

        let sampled: DistTable<usize> = quotients.iter().map(|q| q.graph.root_degree()).collect();
        let exact = exact_root_degree_dist(n, g).unwrap();
        for (d, &c) in exact.counts() {
            prop_assert_eq!(sampled.count(d) as u128 * exact.total() as u128, c as u128 * sampled.total() as u128);
        }
        prop_assert_eq!(BigUint::from(count), lehman_walsh_count(n, g));
    }

    #[test]
    fn unfolded_balls_of_quotients_match_oracle((n, g) in ng(), r in 1usize..=2) {
        let mut sampled = DistTable::new();
        for q in exact_quotients(n, g).unwrap() {
            sampled.add(q.graph.unfolded_ball_code(r));
        }
        let exact = exact_unfolded_dist(n, g, r).unwrap();
        let mut oracle = DistTable::new();
        for (outcome, &c) in exact.counts() {
            let key = match outcome {
                BallOutcome::Tree(code) => Some(unimap::maps::PlaneTree::from_code(code).unwrap().unordered_code()),
                BallOutcome::NotTree => None,
            };
            oracle.add_count(key, c);
        }
        for key in sampled.counts().keys().chain(oracle.counts().keys()) {
            prop_assert_eq!(
                sampled.count(key) as u128 * oracle.total() as u128,
                oracle.count(key) as u128 * sampled.total() as u128
            );
        }
    }

    #[test]
    fn samples_have_the_right_shape(n in 1usize..400, frac in 0.0f64..0.5, seed: u64) {
        let g = ((n as f64) * frac) as usize;
        let g = g.min(n / 2);
        let sampler = UnicellularSampler::new(n, g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sampler.sample(&mut rng);
        prop_assert_eq!(s.graph.n_edges(), n);
        prop_assert_eq!(s.graph.n_vertices(), n + 1 - 2 * g);
        prop_assert_eq!(s.source.genus(), g);
        let degree_sum: usize = (0..s.graph.n_vertices()).map(|v| s.graph.degree(v)).sum();
        prop_assert_eq!(degree_sum, 2 * n);
    }
}

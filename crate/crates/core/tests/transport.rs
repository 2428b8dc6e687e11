mod common;

use curvlab::graph::{generate, load_graph_file, random_connected, Family, LoadOptions, RandomGraphParams, Weighting};
use curvlab::ollivier::{curvature, long_range_mass, Method};
use curvlab::{Rational, WeightedGraph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_graph(seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = RandomGraphParams {
        min_vertices: 2,
        max_vertices: 7,
        extra_edge_probability: 0.25,
        max_denominator: 6,
    };
    random_connected(&mut rng, params).unwrap()
}

#[test]
fn oracle_matches_hand_values() {
    let k2 = generate(&Family::Complete(2), Weighting::Unit).unwrap();
    assert_eq!(common::transport_oracle(&k2, 0, 1), Rational::from_integer(2));
    let p3 = generate(&Family::Path(3), Weighting::Unit).unwrap();
    assert_eq!(common::transport_oracle(&p3, 0, 2), Rational::from_integer(1));
    let c4 = generate(&Family::Cycle(4), Weighting::Unit).unwrap();
    assert_eq!(common::transport_oracle(&c4, 0, 1), Rational::from_integer(2));
}

#[test]
fn witness_files_load() {
    for name in ["be-negative.graph.json", "kappa-negative.graph.json"] {
        let g = load_graph_file(&common::golden(name), LoadOptions::default()).unwrap();
        assert!(g.is_connected());
        assert!(g.num_vertices() <= 7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn both_programs_match_vertex_enumeration(seed in any::<u64>()) {
        let g = small_graph(seed);
        for x in g.vertices() {
            for y in g.vertices().filter(|&y| y != x) {
                if (g.degree(x) + 1) * (g.degree(y) + 1) > 16 {
                    continue;
                }
                let oracle = common::transport_oracle(&g, x, y);
                let r = curvature::<Rational>(&g, x, y, Method::Both).unwrap();
                prop_assert_eq!(r.primal.as_ref().unwrap().kappa, oracle);
                prop_assert_eq!(r.dual.as_ref().unwrap().kappa, oracle);
            }
        }
    }

    #[test]
    fn long_range_mass_bound_below_q_min(seed in any::<u64>()) {
        let g = small_graph(seed);
        let q_min = g.q_min_as::<Rational>().unwrap();
        for x in g.vertices() {
            for y in g.vertices().filter(|&y| y != x) {
                let out = long_range_mass::<Rational>(&g, x, y, None).unwrap();
                if out.epsilon < q_min {
                    prop_assert!(out.holds, "({}, {}): {} < {}", x, y, out.mass_beyond, out.bound);
                }
            }
        }
    }
}

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use holant::approx::{approx_partition, ApproxCertificate, ApproxOptions, Mode};
use holant::graph::{count_induced, generate, GraphFamilySpec, Multigraph};
use holant::models::{perturbed_ones, EdgeColoringModel, VertexModel};
use holant::selftest::{random_bounded_multigraph, random_bounded_simple_graph};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_list_round_trip(n in 1usize..12, m in 0usize..20, seed: u64) {
        let g = random_bounded_multigraph(n, m, 6, &mut rng(seed));
        prop_assert_eq!(Multigraph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn model_json_round_trip(k in 1usize..4, degree in 0u32..5, r in 0.0f64..2.0, seed: u64) {
        let h = perturbed_ones(k, degree, r, seed).unwrap();
        prop_assert_eq!(EdgeColoringModel::from_json(&h.to_json()).unwrap(), h);
    }

    #[test]
    fn induced_subgraph_on_all_vertices_is_identity(n in 1usize..9, m in 0usize..14, seed: u64) {
        let g = random_bounded_multigraph(n, m, 6, &mut rng(seed));
        let all: Vec<usize> = (0..n).collect();
        let h = g.induced_subgraph(&all).unwrap();
        prop_assert_eq!(h.n(), g.n());
        let mut a = g.edges().to_vec();
        let mut b = h.edges().to_vec();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn complementary_edges_touching_cover(n in 1usize..9, m in 0usize..14, seed: u64, mask: u16) {
        let g = random_bounded_multigraph(n, m, 6, &mut rng(seed));
        let (u, rest): (Vec<usize>, Vec<usize>) = (0..n).partition(|v| mask >> v & 1 == 1);
        let mut union = g.edges_touching(&u).unwrap();
        union.extend(g.edges_touching(&rest).unwrap());
        union.sort_unstable();
        union.dedup();
        prop_assert_eq!(union, (0..g.m()).collect::<Vec<_>>());
    }

    #[test]
    fn induced_edge_count(n in 2usize..9, m in 0usize..14, seed: u64) {
        let g = random_bounded_simple_graph(n, m, 5, &mut rng(seed));
        let k2 = Multigraph::new(2, [(0, 1)]).unwrap();
        prop_assert_eq!(count_induced(&g, &k2).unwrap(), g.m() as u64);
    }

    #[test]
    fn generators_are_pure(n in 5usize..30, seed: u64) {
        let spec = GraphFamilySpec::RandomRegular { n: 2 * n, d: 3, seed };
        prop_assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }
}

#[test]
fn vertex_model_json_round_trip() {
    let text = r#"{"a":[{"re":1,"im":0},{"re":0.5,"im":0.25}],"B":[[{"re":0,"im":1},{"re":2,"im":0}],[{"re":2,"im":0},{"re":-1,"im":0}]]}"#;
    let vm = VertexModel::from_json(text).unwrap();
    assert_eq!(VertexModel::from_json(&vm.to_json()).unwrap(), vm);
    assert_eq!(vm.b()[(0, 0)], Complex64::new(0.0, 1.0));
    let asymmetric = r#"{"a":[{"re":1,"im":0},{"re":1,"im":0}],"B":[[{"re":0,"im":0},{"re":1,"im":0}],[{"re":2,"im":0},{"re":0,"im":0}]]}"#;
    assert!(VertexModel::from_json(asymmetric).is_err());
}

#[test]
fn certificate_json_round_trip() {
    let g = generate(&GraphFamilySpec::Torus2d { rows: 3, cols: 4 }).unwrap();
    let h = perturbed_ones(2, 4, 0.03, 5).unwrap();
    for mode in [Mode::Multiplicative, Mode::Additive] {
        let cert = approx_partition(&g, &h, 1e-3, mode, ApproxOptions::default()).unwrap();
        let json = cert.to_json();
        for key in ["\"value\"", "\"M\"", "\"q0\"", "\"n\"", "\"bound\"", "\"mode\""] {
            assert!(json.contains(key), "{key} missing from {json}");
        }
        assert_eq!(ApproxCertificate::from_json(&json).unwrap(), cert);
    }
}

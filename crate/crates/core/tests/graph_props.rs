mod oracles;

use cops_core::graph::{ball, closed_neighborhood, components, distances, set_ball, set_sphere, sphere};
use cops_core::random::{gnp, stream_rng};
use cops_core::{Graph, Vertex, VertexSet};
use oracles::{all_pairs, set_distance, INF};
use proptest::prelude::*;

fn arb_graph() -> impl Strategy<Value = Graph> {
    (1usize..24).prop_flat_map(|n| {
        let pair = (0..n as Vertex, 0..n as Vertex);
        proptest::collection::vec(pair, 0..n * 3)
            .prop_map(move |es| Graph::from_edges(n, es.into_iter().filter(|(u, v)| u != v)).unwrap())
    })
}

fn arb_graph_and_set() -> impl Strategy<Value = (Graph, VertexSet)> {
    arb_graph().prop_flat_map(|g| {
        let n = g.n();
        (Just(g), proptest::collection::vec(0..n as Vertex, 1..=n.min(5)))
            .prop_map(|(g, s)| (g, s.into_iter().collect()))
    })
}

proptest! {
    #[test]
    fn spheres_match_distance_matrix((g, s) in arb_graph_and_set(), r in 0u32..6) {
        let d = all_pairs(&g);
        let v = s.as_slice()[0];
        let expect: Vec<Vertex> = g.vertices().filter(|&x| d[v as usize][x as usize] == r).collect();
        prop_assert_eq!(sphere(&g, v, r).unwrap().into_vec(), expect);
        let expect: Vec<Vertex> = g.vertices().filter(|&x| d[v as usize][x as usize] <= r).collect();
        prop_assert_eq!(ball(&g, v, r).unwrap().into_vec(), expect);
        let members = s.as_slice();
        let expect: Vec<Vertex> = g.vertices().filter(|&x| set_distance(&d, members, x as usize) == r).collect();
        prop_assert_eq!(set_sphere(&g, &s, r).unwrap().into_vec(), expect);
        let expect: Vec<Vertex> = g.vertices().filter(|&x| set_distance(&d, members, x as usize) <= r).collect();
        prop_assert_eq!(set_ball(&g, &s, r).unwrap().into_vec(), expect);
    }

    #[test]
    fn closed_neighborhood_is_two_spheres((g, s) in arb_graph_and_set()) {
        let both = set_sphere(&g, &s, 0).unwrap().union(&set_sphere(&g, &s, 1).unwrap());
        prop_assert_eq!(closed_neighborhood(&g, &s).unwrap(), both);
    }

    #[test]
    fn components_partition_by_reachability(g in arb_graph()) {
        let d = all_pairs(&g);
        let comps = components(&g);
        let mut seen = vec![false; g.n()];
        let mut prev_min = None;
        for c in &comps {
            let lo = c.as_slice()[0];
            prop_assert!(prev_min.is_none_or(|p| p < lo));
            prev_min = Some(lo);
            for x in c.iter() {
                prop_assert!(!seen[x as usize]);
                seen[x as usize] = true;
                for y in g.vertices() {
                    prop_assert_eq!(c.contains(y), d[x as usize][y as usize] < INF);
                }
            }
        }
        prop_assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn edge_list_round_trip(g in arb_graph()) {
        let text = g.to_edge_list();
        prop_assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);
    }
}

#[test]
fn sphere_sizes_sum_to_component_size() {
    let g = gnp(50, 0.1, &mut stream_rng(7, 0)).unwrap();
    let comps = components(&g);
    for v in g.vertices() {
        let comp = comps.iter().find(|c| c.contains(v)).unwrap();
        let total: usize = (0..50).map(|r| sphere(&g, v, r).unwrap().len()).sum();
        assert_eq!(total, comp.len());
        let dist = distances(&g, &[v], None);
        assert_eq!(dist.iter().filter(|d| d.is_some()).count(), comp.len());
    }
}

#[test]
fn small_examples() {
    let p5 = Graph::path(5);
    assert_eq!(sphere(&p5, 2, 1).unwrap().as_slice(), &[1, 3]);
    assert_eq!(sphere(&Graph::cycle(6), 0, 3).unwrap().as_slice(), &[3]);
    assert_eq!(set_sphere(&p5, &[0, 4].into_iter().collect(), 1).unwrap().as_slice(), &[1, 3]);
    assert_eq!(ball(&Graph::star(5), 0, 1).unwrap().len(), 6);
    let all: VertexSet = p5.vertices().collect();
    assert!(set_sphere(&p5, &all, 1).unwrap().is_empty());
    assert_eq!(closed_neighborhood(&Graph::complete(4), &VertexSet::singleton(2)).unwrap().len(), 4);
    assert!(sphere(&p5, 5, 0).is_err());
    assert!(set_sphere(&p5, &VertexSet::new(), 0).is_err());
}

mod oracles;

use cops_core::matching::{assign_agents, assign_max, hall_deficiency, AssignmentProblem};
use cops_core::random::{gnp, stream_rng};
use cops_core::{Graph, Vertex, VertexSet};
use oracles::{all_pairs, brute_force_feasible, check_assignment_instance};

#[test]
fn agrees_with_exhaustive_search() {
    for seed in 0..400 {
        check_assignment_instance(seed).unwrap();
    }
}

#[test]
fn deficiency_and_partial_assignment() {
    for seed in 0..100u64 {
        let g = gnp(14, 0.15, &mut stream_rng(seed, 1)).unwrap();
        let left: VertexSet = (0..7).collect();
        let right: VertexSet = (7..14).collect();
        let p = AssignmentProblem::new(left.clone(), right.clone(), 1);
        let def = hall_deficiency(&g, &p).unwrap();
        let pairs = assign_max(&g, &p).unwrap();
        assert_eq!(pairs.len() + def, 7);
        let d = all_pairs(&g);
        // Largest feasible subset of destinations, by exhaustion.
        let best = (0u32..1 << 7)
            .filter(|mask| {
                let sub: Vec<Vertex> = (0..7).filter(|i| mask >> i & 1 == 1).collect();
                brute_force_feasible(&d, &sub, right.as_slice(), 1)
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap();
        assert_eq!(pairs.len(), best);
    }
}

#[test]
fn stacked_agents_are_distinct() {
    let g = Graph::path(6);
    let targets: VertexSet = [0, 1, 2].into_iter().collect();
    let pairs = assign_agents(&g, &targets, &[1, 1, 1], Some(1)).unwrap();
    assert_eq!(pairs.len(), 3);
    let mut agents: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    agents.sort_unstable();
    assert_eq!(agents, vec![0, 1, 2]);
    assert_eq!(assign_agents(&g, &targets, &[5, 5], Some(2)).unwrap().len(), 0);
    assert_eq!(assign_agents(&g, &targets, &[5, 5], None).unwrap().len(), 2);
}

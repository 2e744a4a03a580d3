mod oracles;

use cops_core::graph::is_connected;
use cops_core::solver::{cop_number, is_copwin_dismantlable, optimal_capture_time, solve_k, CopNumber, DEFAULT_BUDGET};
use cops_core::Graph;
use oracles::{check_against_minimax, dismantlable, dodecahedron, labeled_graph, random_planar};

#[test]
fn known_cop_numbers() {
    for k in 1..=12 {
        assert_eq!(cop_number(&Graph::path(k), 3, DEFAULT_BUDGET).unwrap(), CopNumber::Exact(1));
    }
    for k in 4..=10 {
        assert_eq!(cop_number(&Graph::cycle(k), 3, DEFAULT_BUDGET).unwrap(), CopNumber::Exact(2));
    }
    assert_eq!(cop_number(&Graph::petersen(), 4, DEFAULT_BUDGET).unwrap(), CopNumber::Exact(3));
    assert_eq!(cop_number(&Graph::petersen(), 2, DEFAULT_BUDGET).unwrap(), CopNumber::ExceedsMax(2));
    assert_eq!(cop_number(&Graph::grid(4, 4), 3, DEFAULT_BUDGET).unwrap(), CopNumber::Exact(2));
    assert_eq!(cop_number(&dodecahedron(), 3, DEFAULT_BUDGET).unwrap(), CopNumber::Exact(3));
}

#[test]
fn capture_times() {
    assert_eq!(optimal_capture_time(&Graph::path(2), 1, DEFAULT_BUDGET).unwrap(), 1);
    assert_eq!(optimal_capture_time(&Graph::complete(7), 1, DEFAULT_BUDGET).unwrap(), 1);
    assert_eq!(optimal_capture_time(&Graph::path(1), 1, DEFAULT_BUDGET).unwrap(), 0);
    assert!(optimal_capture_time(&Graph::cycle(4), 1, DEFAULT_BUDGET).is_err());
    assert!(!solve_k(&Graph::cycle(4), 1, DEFAULT_BUDGET).unwrap().is_cop_win());
}

#[test]
fn minimax_agreement() {
    check_against_minimax(&Graph::cycle(4), 2, 8).unwrap();
    check_against_minimax(&Graph::cycle(4), 1, 8).unwrap();
    check_against_minimax(&Graph::path(9), 1, 10).unwrap();
    check_against_minimax(&Graph::cycle(7), 2, 10).unwrap();
    check_against_minimax(&Graph::grid(3, 3), 1, 10).unwrap();
    check_against_minimax(&Graph::grid(3, 4), 2, 10).unwrap();
    check_against_minimax(&Graph::petersen(), 2, 6).unwrap();
}

#[test]
fn dismantlability_matches_solver_up_to_six() {
    let mut checked = 0;
    for n in 1..=6usize {
        for mask in 0..1u64 << (n * (n - 1) / 2) {
            let g = labeled_graph(n, mask);
            if !is_connected(&g) {
                continue;
            }
            let by_solver = solve_k(&g, 1, DEFAULT_BUDGET).unwrap().is_cop_win();
            assert_eq!(is_copwin_dismantlable(&g), by_solver, "n = {n}, mask = {mask:#x}");
            assert_eq!(dismantlable(&g), by_solver, "n = {n}, mask = {mask:#x}");
            checked += 1;
        }
    }
    // Connected labeled graphs on 1..=6 vertices.
    assert_eq!(checked, 1 + 1 + 4 + 38 + 728 + 26704);
}

#[test]
fn planar_graphs_need_at_most_three() {
    let mut rng = cops_core::random::stream_rng(3, 0);
    for i in 0..20 {
        let n = 4 + i % 7;
        let g = random_planar(n, i % 4, &mut rng);
        assert!(is_connected(&g));
        match cop_number(&g, 3, DEFAULT_BUDGET).unwrap() {
            CopNumber::Exact(k) => assert!(k <= 3),
            other => panic!("{other:?}"),
        }
    }
}

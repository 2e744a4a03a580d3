use std::collections::VecDeque;

use crate::game::{closed_neighbors, GameState, RobberStrategy};
use crate::graph::{Graph, Vertex};
use crate::random::SimRng;

pub const UNREACHABLE: u32 = u32::MAX;

/// Per vertex, the smallest and second-smallest distance to a cop, where
/// cops sharing a vertex count separately. Unreachable is
/// [`UNREACHABLE`].
pub fn two_nearest(g: &Graph, cops: &[Vertex]) -> (Vec<u32>, Vec<u32>) {
    let n = g.n();
    let mut mult = vec![0u32; n];
    for &c in cops {
        mult[c as usize] += 1;
    }
    // Up to two (source, distance) labels per vertex, distinct sources.
    let mut labels: Vec<[(Vertex, u32); 2]> = vec![[(Vertex::MAX, UNREACHABLE); 2]; n];
    let mut count = vec![0u8; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        if mult[v] > 0 {
            labels[v][0] = (v as Vertex, 0);
            count[v] = 1;
            queue.push_back((v as Vertex, v as Vertex, 0u32));
        }
    }
    while let Some((u, src, d)) = queue.pop_front() {
        for &w in g.neighbors(u) {
            let wi = w as usize;
            if count[wi] < 2 && (count[wi] == 0 || labels[wi][0].0 != src) {
                labels[wi][count[wi] as usize] = (src, d + 1);
                count[wi] += 1;
                queue.push_back((w, src, d + 1));
            }
        }
    }
    let mut first = vec![UNREACHABLE; n];
    let mut second = vec![UNREACHABLE; n];
    for v in 0..n {
        if count[v] == 0 {
            continue;
        }
        let (s0, d0) = labels[v][0];
        first[v] = d0;
        second[v] = if mult[s0 as usize] >= 2 { d0 } else { labels[v][1].1 };
    }
    (first, second)
}

fn best_of(candidates: impl Iterator<Item = Vertex>, first: &[u32], second: &[u32]) -> Option<Vertex> {
    // Larger (first, second) wins; on full ties the smaller id.
    candidates.max_by(|&a, &b| {
        (first[a as usize], second[a as usize])
            .cmp(&(first[b as usize], second[b as usize]))
            .then(b.cmp(&a))
    })
}

/// Moves (or stays) to maximise the distance to the nearest cop, then to
/// the second-nearest, then prefers the smaller vertex id. Places by the
/// same rule over all vertices. With no cops at all it stays put.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyRobber;

impl RobberStrategy for GreedyRobber {
    fn place(&mut self, g: &Graph, cops: &[Vertex], _: &mut SimRng) -> Vertex {
        let (first, second) = two_nearest(g, cops);
        best_of(g.vertices(), &first, &second).expect("graph is nonempty")
    }

    fn respond(&mut self, g: &Graph, state: &GameState, _: &mut SimRng) -> Vertex {
        let r = state.robber.expect("robber placed");
        if state.cops.is_empty() {
            return r;
        }
        let (first, second) = two_nearest(g, &state.cops);
        best_of(closed_neighbors(g, r).into_iter(), &first, &second).unwrap_or(r)
    }
}

/// Sits on a fixed vertex.
#[derive(Debug, Clone, Copy)]
pub struct StationaryRobber(pub Vertex);

impl RobberStrategy for StationaryRobber {
    fn place(&mut self, _: &Graph, _: &[Vertex], _: &mut SimRng) -> Vertex {
        self.0
    }

    fn respond(&mut self, _: &Graph, state: &GameState, _: &mut SimRng) -> Vertex {
        state.robber.expect("robber placed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::new_game;
    use crate::random::stream_rng;

    #[test]
    fn two_nearest_counts_stacked_cops() {
        let g = Graph::path(5);
        let (f, s) = two_nearest(&g, &[0, 0]);
        assert_eq!(f, vec![0, 1, 2, 3, 4]);
        assert_eq!(s, f);
        let (f, s) = two_nearest(&g, &[0, 4]);
        assert_eq!(f, vec![0, 1, 2, 1, 0]);
        assert_eq!(s, vec![4, 3, 2, 3, 4]);
        let (f, s) = two_nearest(&g, &[2]);
        assert_eq!(f, vec![2, 1, 0, 1, 2]);
        assert!(s.iter().all(|&x| x == UNREACHABLE));
    }

    #[test]
    fn greedy_examples() {
        let mut rng = stream_rng(0, 0);
        let p3 = Graph::path(3);
        let s = new_game(&p3, vec![0], 1).unwrap();
        assert_eq!(GreedyRobber.respond(&p3, &s, &mut rng), 2);
        let s = new_game(&p3, vec![], 1).unwrap();
        assert_eq!(GreedyRobber.respond(&p3, &s, &mut rng), 1);
        let c4 = Graph::cycle(4);
        assert_eq!(GreedyRobber.place(&c4, &[1], &mut rng), 3);
    }
}

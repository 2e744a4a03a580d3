//! Reference implementations that share no code with the library: dense
//! distance matrices, exhaustive assignment search, a depth-bounded game
//! tree search and small graph corpora.
#![allow(dead_code)]

use std::collections::HashMap;

use cops_core::{Graph, Vertex};
use rand::seq::SliceRandom;
use rand::Rng;

pub const INF: u32 = u32::MAX / 4;

/// Floyd–Warshall over the adjacency matrix.
pub fn all_pairs(g: &Graph) -> Vec<Vec<u32>> {
    let n = g.n();
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (u, v) in g.edges() {
        d[u as usize][v as usize] = 1;
        d[v as usize][u as usize] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == INF {
                continue;
            }
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Distances from `s` by a plain queue BFS over the adjacency lists.
pub fn bfs_row(g: &Graph, s: Vertex) -> Vec<u32> {
    let mut d = vec![INF; g.n()];
    d[s as usize] = 0;
    let mut queue = vec![s];
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        for &w in g.neighbors(u) {
            if d[w as usize] == INF {
                d[w as usize] = d[u as usize] + 1;
                queue.push(w);
            }
        }
    }
    d
}

pub fn set_distance(d: &[Vec<u32>], s: &[Vertex], x: usize) -> u32 {
    s.iter().map(|&v| d[v as usize][x]).min().unwrap_or(INF)
}

/// Whether every `left` vertex can get its own `right` vertex within
/// `radius`, by search over partial injections (memoised on the set of
/// used right vertices).
pub fn brute_force_feasible(d: &[Vec<u32>], left: &[Vertex], right: &[Vertex], radius: u32) -> bool {
    assert!(right.len() <= 20);
    let mut memo = HashMap::new();
    fn go(i: usize, used: u32, d: &[Vec<u32>], l: &[Vertex], r: &[Vertex], rad: u32, memo: &mut HashMap<(usize, u32), bool>) -> bool {
        if i == l.len() {
            return true;
        }
        if let Some(&b) = memo.get(&(i, used)) {
            return b;
        }
        let mut ok = false;
        for (j, &y) in r.iter().enumerate() {
            if used & (1 << j) == 0 && d[l[i] as usize][y as usize] <= rad && go(i + 1, used | (1 << j), d, l, r, rad, memo) {
                ok = true;
                break;
            }
        }
        memo.insert((i, used), ok);
        ok
    }
    go(0, 0, d, left, right, radius, &mut memo)
}

/// Depth-bounded minimax: can `k` cops force capture within `depth` cop
/// moves? Plain game-tree recursion with a memo on exact positions.
pub struct Minimax<'a> {
    g: &'a Graph,
    closed: Vec<Vec<Vertex>>,
    memo: HashMap<(Vec<Vertex>, Vertex, u32), bool>,
}

impl<'a> Minimax<'a> {
    pub fn new(g: &'a Graph) -> Self {
        let closed = g
            .vertices()
            .map(|v| {
                let mut c = vec![v];
                c.extend_from_slice(g.neighbors(v));
                c
            })
            .collect();
        Minimax {
            g,
            closed,
            memo: HashMap::new(),
        }
    }

    fn cop_moves(&self, cops: &[Vertex]) -> Vec<Vec<Vertex>> {
        let mut out = vec![Vec::new()];
        for &c in cops {
            let mut next = Vec::new();
            for partial in &out {
                for &x in &self.closed[c as usize] {
                    let mut p = partial.clone();
                    p.push(x);
                    next.push(p);
                }
            }
            out = next;
        }
        for m in &mut out {
            m.sort_unstable();
        }
        out.sort();
        out.dedup();
        out
    }

    /// Cops to move at `cops`, robber at `r`.
    pub fn wins_within(&mut self, cops: &[Vertex], r: Vertex, depth: u32) -> bool {
        if cops.contains(&r) {
            return true;
        }
        if depth == 0 {
            return false;
        }
        let key = (cops.to_vec(), r, depth);
        if let Some(&b) = self.memo.get(&key) {
            return b;
        }
        let mut win = false;
        for next in self.cop_moves(cops) {
            if next.contains(&r) {
                win = true;
                break;
            }
            let replies = self.closed[r as usize].clone();
            if replies.iter().all(|&y| next.contains(&y) || self.wins_within(&next, y, depth - 1)) {
                win = true;
                break;
            }
        }
        self.memo.insert(key, win);
        win
    }

    /// Some placement of `k` cops beats every robber placement within
    /// `depth` cop moves.
    pub fn placement_wins(&mut self, k: usize, depth: u32) -> bool {
        let n = self.g.n() as Vertex;
        multisets(n, k).into_iter().any(|cops| (0..n).all(|r| self.wins_within(&cops, r, depth)))
    }
}

/// Sorted `k`-multisets over `0..n`.
pub fn multisets(n: Vertex, k: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: Vertex, n: Vertex, k: usize, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            go(v, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Every labeled graph on `n` vertices, by edge mask over the pairs in
/// lexicographic order.
pub fn labeled_graph(n: usize, mask: u64) -> Graph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if mask >> bit & 1 == 1 {
                edges.push((u, v));
            }
            bit += 1;
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Corner-removal test written against the adjacency matrix.
pub fn dismantlable(g: &Graph) -> bool {
    let n = g.n();
    let mut adj = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        adj[u as usize][v as usize] = true;
        adj[v as usize][u as usize] = true;
    }
    for (i, row) in adj.iter_mut().enumerate() {
        row[i] = true;
    }
    let mut alive: Vec<usize> = (0..n).collect();
    loop {
        if alive.len() <= 1 {
            return true;
        }
        let corner = alive.iter().position(|&u| {
            alive
                .iter()
                .any(|&w| w != u && alive.iter().all(|&x| !adj[u][x] || adj[w][x]))
        });
        match corner {
            Some(i) => {
                alive.remove(i);
            }
            None => return false,
        }
    }
}

/// Stacked triangulation on `n >= 3` vertices (each new vertex goes into a
/// random face), then random edge deletions that keep it connected.
/// Planar by construction.
pub fn random_planar<R: Rng>(n: usize, deletions: usize, rng: &mut R) -> Graph {
    let mut edges = vec![(0u32, 1u32), (1, 2), (0, 2)];
    let mut faces = vec![[0u32, 1, 2], [0, 1, 2]];
    for v in 3..n as Vertex {
        let i = rng.random_range(0..faces.len());
        let [a, b, c] = faces.swap_remove(i);
        edges.extend([(a, v), (b, v), (c, v)]);
        faces.extend([[a, b, v], [b, c, v], [a, c, v]]);
    }
    let mut g = Graph::from_edges(n, edges.iter().copied()).unwrap();
    for _ in 0..deletions {
        let mut list: Vec<(Vertex, Vertex)> = g.edges().collect();
        list.shuffle(rng);
        for (k, _) in list.iter().enumerate() {
            let kept: Vec<_> = list.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &e)| e).collect();
            let h = Graph::from_edges(n, kept).unwrap();
            if cops_core::graph::is_connected(&h) {
                g = h;
                break;
            }
        }
    }
    g
}

/// The dodecahedron: planar, cubic, cop number 3.
pub fn dodecahedron() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5u32 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((i + 5, 10 + i));
        edges.push((i + 5, 10 + (i + 4) % 5));
        edges.push((i + 15, 10 + i));
        edges.push((i + 15, 15 + (i + 1) % 5));
    }
    Graph::from_edges(20, edges).unwrap()
}

/// One random assignment instance (`|left| <= 12`) checked against the
/// exhaustive search; `Err` describes any disagreement.
pub fn check_assignment_instance(seed: u64) -> Result<(), String> {
    use cops_core::matching::{assign_within_radius, AssignmentProblem, AssignmentResult};
    let mut rng = cops_core::random::stream_rng(seed, 0xA551);
    let n = rng.random_range(2..=18usize);
    let p = rng.random_range(0.05..0.4);
    let g = cops_core::random::gnp(n, p, &mut rng).unwrap();
    let pick = |rng: &mut cops_core::random::SimRng, max: usize| -> Vec<Vertex> {
        let mut all: Vec<Vertex> = (0..n as Vertex).collect();
        all.shuffle(rng);
        let k = rng.random_range(1..=max.min(n));
        let mut s = all[..k].to_vec();
        s.sort_unstable();
        s
    };
    let left = pick(&mut rng, 12);
    let right = pick(&mut rng, 14);
    let radius = rng.random_range(0..=3u32);
    let d = all_pairs(&g);
    let feasible = brute_force_feasible(&d, &left, &right, radius);
    let problem = AssignmentProblem::new(left.iter().copied().collect(), right.iter().copied().collect(), radius);
    match assign_within_radius(&g, &problem).map_err(|e| e.to_string())? {
        AssignmentResult::Assignment { pairs } => {
            if !feasible {
                return Err(format!("seed {seed}: assignment returned for infeasible instance"));
            }
            let mut dests: Vec<Vertex> = pairs.iter().map(|p| p.0).collect();
            let mut srcs: Vec<Vertex> = pairs.iter().map(|p| p.1).collect();
            dests.sort_unstable();
            srcs.sort_unstable();
            srcs.dedup();
            if dests != left || srcs.len() != pairs.len() {
                return Err(format!("seed {seed}: assignment not a perfect injection"));
            }
            if pairs.iter().any(|&(x, y)| !right.contains(&y) || d[x as usize][y as usize] > radius) {
                return Err(format!("seed {seed}: assignment pair out of radius"));
            }
        }
        AssignmentResult::Violation { set, reachable } => {
            if feasible {
                return Err(format!("seed {seed}: violation reported for feasible instance"));
            }
            let set = set.into_vec();
            if set.is_empty() || set.iter().any(|x| !left.contains(x)) {
                return Err(format!("seed {seed}: witness not a subset of destinations"));
            }
            let truly: Vec<Vertex> = right
                .iter()
                .copied()
                .filter(|&y| set.iter().any(|&x| d[x as usize][y as usize] <= radius))
                .collect();
            if reachable.into_vec() != truly || truly.len() >= set.len() {
                return Err(format!("seed {seed}: witness does not violate Hall's condition"));
            }
        }
    }
    Ok(())
}

/// Solver and [`Minimax`] agree, at every depth up to `depth`, on whether
/// `k` cops capture within that many moves from their best placement.
pub fn check_against_minimax(g: &Graph, k: usize, depth: u32) -> Result<(), String> {
    let table = cops_core::solver::solve_k(g, k, cops_core::solver::DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    table.check_fixpoint(g)?;
    let time = table.best_placement().map(|(_, t)| t);
    let mut mm = Minimax::new(g);
    for dd in 0..=depth {
        let solver_says = time.is_some_and(|t| t <= dd);
        if mm.placement_wins(k, dd) != solver_says {
            return Err(format!("k = {k}, depth {dd}: solver time {time:?} disagrees with minimax"));
        }
    }
    Ok(())
}

/// Literal re-check of an accessibility witness from the distance matrix:
/// members are exactly `u_set`, reservoirs are pairwise disjoint, lie in
/// `N(w, t)`, and reach `ceil(c1 min(d^t, c2 n / |U|))`.
pub fn witness_ok(g: &Graph, u_set: &[Vertex], w: &cops_core::expansion::AccessibilityWitness) -> bool {
    let members: Vec<Vertex> = w.family.iter().map(|(m, _)| *m).collect();
    if members != u_set {
        return false;
    }
    let n = g.n() as f64;
    let need = (w.c1 * w.d.powi(w.t as i32).min(w.c2 * n / u_set.len() as f64) - 1e-9).ceil().max(0.0) as usize;
    let mut owner = HashMap::new();
    for (m, set) in &w.family {
        if set.len() < need {
            return false;
        }
        let d = bfs_row(g, *m);
        for x in set.iter() {
            if d[x as usize] > w.t || owner.insert(x, *m).is_some() {
                return false;
            }
        }
    }
    true
}

//! Immutable simple undirected graphs and the breadth-first primitives
//! (spheres, balls, set spheres, components) everything else is built on.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vertex identifier, always in `0..n`.
pub type Vertex = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("source set is empty")]
    EmptySource,
    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A finite simple undirected graph on vertices `0..n`.
///
/// Adjacency lists are sorted ascending; the graph is never mutated after
/// construction, so it can be shared freely between threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    edge_count: usize,
}

impl Graph {
    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a simple graph from an edge iterator. Duplicate edges (in
    /// either orientation) collapse to one; self-loops are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            check_vertex(u, n)?;
            check_vertex(v, n)?;
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        let mut edge_count = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Ok(Graph {
            adj,
            edge_count: edge_count / 2,
        })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbours of `v`. Panics if `v` is out of range.
    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        (u as usize) < self.n() && self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        (v as usize) < self.n()
    }

    pub fn check(&self, v: Vertex) -> Result<(), GraphError> {
        check_vertex(v, self.n())
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.n() as Vertex
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let u = u as Vertex;
            list.iter().filter(move |&&v| v > u).map(move |&v| (u, v))
        })
    }

    pub fn average_degree(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            2.0 * self.edge_count as f64 / self.n() as f64
        }
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Canonical edge-list text: `n m` header, then one `u v` line per edge
    /// with `u < v`, sorted lexicographically.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 + self.edge_count * 12);
        let _ = writeln!(out, "{} {}", self.n(), self.edge_count);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parses the canonical edge-list format. Lines must be in canonical
    /// order with `u < v` and no repeats, and the header counts must match.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let (n, m) = parse_pair(hline, header)?;
        let n = n as usize;
        let mut edges = Vec::with_capacity(m as usize);
        let mut prev: Option<(Vertex, Vertex)> = None;
        for (line, l) in lines {
            let (u, v) = parse_pair(line, l)?;
            let (u, v) = (u as Vertex, v as Vertex);
            if u >= v {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("edge {u} {v} must satisfy u < v"),
                });
            }
            if (v as usize) >= n {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("vertex {v} out of range"),
                });
            }
            if prev.is_some_and(|p| p >= (u, v)) {
                return Err(GraphError::Parse {
                    line,
                    msg: "edges not in strictly increasing order".into(),
                });
            }
            prev = Some((u, v));
            edges.push((u, v));
        }
        if edges.len() as u64 != m {
            return Err(GraphError::Parse {
                line: hline,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Graph::from_edges(n, edges)
    }

    /// Named graphs used by tests and the CLI: `path-k`, `cycle-k`,
    /// `complete-k`, `star-k` (k leaves), `grid-RxC`, `petersen`.
    pub fn named(name: &str) -> Option<Self> {
        if name == "petersen" {
            return Some(Graph::petersen());
        }
        let (kind, arg) = name.split_once('-')?;
        match kind {
            "path" => Some(Graph::path(arg.parse().ok()?)),
            "cycle" => Some(Graph::cycle(arg.parse().ok()?)),
            "complete" => Some(Graph::complete(arg.parse().ok()?)),
            "star" => Some(Graph::star(arg.parse().ok()?)),
            "grid" => {
                let (r, c) = arg.split_once('x')?;
                Some(Graph::grid(r.parse().ok()?, c.parse().ok()?))
            }
            _ => None,
        }
    }

    pub fn path(k: usize) -> Self {
        let edges = (1..k as Vertex).map(|v| (v - 1, v));
        Graph::from_edges(k, edges).expect("path edges are valid")
    }

    pub fn cycle(k: usize) -> Self {
        if k < 3 {
            return Graph::path(k);
        }
        let edges = (0..k as Vertex).map(|v| (v, (v + 1) % k as Vertex));
        Graph::from_edges(k, edges).expect("cycle edges are valid")
    }

    pub fn complete(k: usize) -> Self {
        let k32 = k as Vertex;
        let edges = (0..k32).flat_map(|u| (u + 1..k32).map(move |v| (u, v)));
        Graph::from_edges(k, edges).expect("complete edges are valid")
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges = (1..=leaves as Vertex).map(|v| (0, v));
        Graph::from_edges(leaves + 1, edges).expect("star edges are valid")
    }

    pub fn grid(rows: usize, cols: usize) -> Self {
        let id = |r: usize, c: usize| (r * cols + c) as Vertex;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        Graph::from_edges(rows * cols, edges).expect("grid edges are valid")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, edges).expect("petersen edges are valid")
    }

    /// Subgraph induced by `keep`, relabelled to `0..keep.len()` in
    /// ascending order of the original ids.
    pub fn induced(&self, keep: &VertexSet) -> Graph {
        let mut index = vec![Vertex::MAX; self.n()];
        for (i, v) in keep.iter().enumerate() {
            index[v as usize] = i as Vertex;
        }
        let edges = self
            .edges()
            .filter(|&(u, v)| index[u as usize] != Vertex::MAX && index[v as usize] != Vertex::MAX)
            .map(|(u, v)| (index[u as usize], index[v as usize]));
        Graph::from_edges(keep.len(), edges).expect("induced edges are valid")
    }
}

fn check_vertex(v: Vertex, n: usize) -> Result<(), GraphError> {
    if (v as usize) < n {
        Ok(())
    } else {
        Err(GraphError::VertexOutOfRange { vertex: v, n })
    }
}

fn parse_pair(line: usize, l: &str) -> Result<(u64, u64), GraphError> {
    let mut it = l.split_whitespace();
    let mut next = || -> Result<u64, GraphError> {
        it.next()
            .ok_or_else(|| GraphError::Parse {
                line,
                msg: "expected two integers".into(),
            })?
            .parse()
            .map_err(|e| GraphError::Parse {
                line,
                msg: format!("{e}"),
            })
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(GraphError::Parse {
            line,
            msg: "trailing tokens".into(),
        });
    }
    Ok((a, b))
}

/// A set of vertex ids, stored sorted and deduplicated.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    pub fn singleton(v: Vertex) -> Self {
        VertexSet(vec![v])
    }

    /// Wraps a vector that is already sorted and free of duplicates.
    pub fn from_sorted(members: Vec<Vertex>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        VertexSet(members)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> std::iter::Copied<std::slice::Iter<'_, Vertex>> {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        VertexSet(out)
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| !other.contains(v)).collect())
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| other.contains(v)).collect())
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| !other.contains(v))
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        let mut v: Vec<Vertex> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = Vertex;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, Vertex>>;
    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// Multi-source BFS distances. `None` marks vertices not reachable from
/// the sources (or beyond `max_radius` when one is given).
pub fn distances(g: &Graph, sources: &[Vertex], max_radius: Option<u32>) -> Vec<Option<u32>> {
    let mut dist = vec![None; g.n()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s as usize].is_none() {
            dist[s as usize] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize].unwrap();
        if max_radius.is_some_and(|r| du >= r) {
            continue;
        }
        for &w in g.neighbors(u) {
            if dist[w as usize].is_none() {
                dist[w as usize] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// BFS layers from `sources` out to `radius`: `layers[i]` holds the
/// vertices at distance exactly `i`, each layer sorted ascending. Stops
/// early when a layer comes up empty, so the result may be shorter than
/// `radius + 1`.
pub fn layers(g: &Graph, sources: &[Vertex], radius: u32) -> Vec<Vec<Vertex>> {
    let mut seen = vec![false; g.n()];
    let mut current: Vec<Vertex> = Vec::new();
    for &s in sources {
        if !seen[s as usize] {
            seen[s as usize] = true;
            current.push(s);
        }
    }
    current.sort_unstable();
    let mut out = Vec::new();
    for _ in 0..radius {
        if current.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for &u in &current {
            for &w in g.neighbors(u) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    next.push(w);
                }
            }
        }
        next.sort_unstable();
        out.push(std::mem::replace(&mut current, next));
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// `S(v, r)`: vertices at distance exactly `r` from `v`.
pub fn sphere(g: &Graph, v: Vertex, r: u32) -> Result<VertexSet, GraphError> {
    g.check(v)?;
    Ok(layers(g, &[v], r)
        .into_iter()
        .nth(r as usize)
        .map(VertexSet::from_sorted)
        .unwrap_or_default())
}

/// `N(v, r)`: vertices at distance at most `r` from `v`.
pub fn ball(g: &Graph, v: Vertex, r: u32) -> Result<VertexSet, GraphError> {
    g.check(v)?;
    Ok(layers(g, &[v], r).into_iter().flatten().collect())
}

/// `S(V', r)`: vertices whose distance to the set is exactly `r`.
pub fn set_sphere(g: &Graph, s: &VertexSet, r: u32) -> Result<VertexSet, GraphError> {
    if s.is_empty() {
        return Err(GraphError::EmptySource);
    }
    for v in s {
        g.check(v)?;
    }
    Ok(layers(g, s.as_slice(), r)
        .into_iter()
        .nth(r as usize)
        .map(VertexSet::from_sorted)
        .unwrap_or_default())
}

/// `N(V', r)`: vertices within distance `r` of the set.
pub fn set_ball(g: &Graph, s: &VertexSet, r: u32) -> Result<VertexSet, GraphError> {
    for v in s {
        g.check(v)?;
    }
    Ok(layers(g, s.as_slice(), r).into_iter().flatten().collect())
}

/// `N[S]`: the set together with all its neighbours.
pub fn closed_neighborhood(g: &Graph, s: &VertexSet) -> Result<VertexSet, GraphError> {
    set_ball(g, s, 1)
}

/// Connected components, each sorted, ordered by smallest member.
pub fn components(g: &Graph) -> Vec<VertexSet> {
    let mut label = vec![usize::MAX; g.n()];
    let mut out = Vec::new();
    for start in g.vertices() {
        if label[start as usize] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![start];
        label[start as usize] = id;
        let mut head = 0;
        while head < members.len() {
            let u = members[head];
            head += 1;
            for &w in g.neighbors(u) {
                if label[w as usize] == usize::MAX {
                    label[w as usize] = id;
                    members.push(w);
                }
            }
        }
        members.sort_unstable();
        out.push(VertexSet::from_sorted(members));
    }
    out
}

pub fn is_connected(g: &Graph) -> bool {
    g.n() > 0 && components(g).len() == 1
}

/// Vertices along a shortest path from `from` to `to`, inclusive of both
/// ends, preferring the smallest-id predecessor at each layer. `None` when
/// `to` is unreachable or farther than `max_len` steps.
pub fn shortest_path(g: &Graph, from: Vertex, to: Vertex, max_len: Option<u32>) -> Option<Vec<Vertex>> {
    if from == to {
        return Some(vec![from]);
    }
    // Distances from the target; then walk downhill from the source.
    let dist = distances(g, &[to], max_len);
    let mut d = dist[from as usize]?;
    let mut path = Vec::with_capacity(d as usize + 1);
    let mut cur = from;
    path.push(cur);
    while d > 0 {
        cur = *g
            .neighbors(cur)
            .iter()
            .find(|&&w| dist[w as usize] == Some(d - 1))
            .expect("BFS layering guarantees a downhill neighbour");
        path.push(cur);
        d -= 1;
    }
    Some(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[Vertex]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn sphere_on_path_and_cycle() {
        let p5 = Graph::path(5);
        assert_eq!(sphere(&p5, 2, 1).unwrap(), set(&[1, 3]));
        assert_eq!(sphere(&p5, 2, 0).unwrap(), set(&[2]));
        assert_eq!(sphere(&p5, 0, 7).unwrap(), set(&[]));
        let c6 = Graph::cycle(6);
        assert_eq!(sphere(&c6, 0, 3).unwrap(), set(&[3]));
    }

    #[test]
    fn sphere_rejects_bad_vertex() {
        let g = Graph::path(3);
        assert_eq!(
            sphere(&g, 3, 1),
            Err(GraphError::VertexOutOfRange { vertex: 3, n: 3 })
        );
        assert!(ball(&g, 9, 0).is_err());
    }

    #[test]
    fn ball_basics() {
        let star = Graph::star(5);
        assert_eq!(ball(&star, 0, 1).unwrap().len(), 6);
        assert_eq!(ball(&star, 3, 0).unwrap(), set(&[3]));
    }

    #[test]
    fn set_sphere_cases() {
        let p5 = Graph::path(5);
        assert_eq!(set_sphere(&p5, &set(&[0, 4]), 1).unwrap(), set(&[1, 3]));
        assert_eq!(set_sphere(&p5, &set(&[0, 4]), 0).unwrap(), set(&[0, 4]));
        let all: VertexSet = p5.vertices().collect();
        assert!(set_sphere(&p5, &all, 1).unwrap().is_empty());
        assert_eq!(set_sphere(&p5, &VertexSet::new(), 1), Err(GraphError::EmptySource));
    }

    #[test]
    fn closed_neighborhood_cases() {
        let g = Graph::empty(4);
        assert_eq!(closed_neighborhood(&g, &set(&[1, 2])).unwrap(), set(&[1, 2]));
        let k4 = Graph::complete(4);
        assert_eq!(closed_neighborhood(&k4, &set(&[2])).unwrap().len(), 4);
    }

    #[test]
    fn components_cases() {
        assert_eq!(components(&Graph::empty(3)).len(), 3);
        assert_eq!(components(&Graph::cycle(5)).len(), 1);
        // P3 on {0,1,2} plus a triangle on {3,4,5}
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let comps = components(&g);
        assert_eq!(comps, vec![set(&[0, 1, 2]), set(&[3, 4, 5])]);
    }

    #[test]
    fn edge_list_roundtrip_is_canonical() {
        let g = Graph::from_edges(4, [(3, 1), (0, 2), (1, 0)]).unwrap();
        let text = g.to_edge_list();
        assert_eq!(text, "4 3\n0 1\n0 2\n1 3\n");
        assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn edge_list_rejects_noncanonical() {
        assert!(Graph::parse_edge_list("3 1\n1 0\n").is_err());
        assert!(Graph::parse_edge_list("3 2\n0 2\n0 1\n").is_err());
        assert!(Graph::parse_edge_list("3 2\n0 1\n").is_err());
        assert!(Graph::parse_edge_list("3 1\n0 3\n").is_err());
        assert!(Graph::parse_edge_list("").is_err());
    }

    #[test]
    fn from_edges_rejects_loops_and_dedups() {
        assert_eq!(Graph::from_edges(2, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        let g = Graph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn named_graphs() {
        let p = Graph::named("petersen").unwrap();
        assert_eq!((p.n(), p.edge_count()), (10, 15));
        assert!(p.vertices().all(|v| p.degree(v) == 3));
        let grid = Graph::named("grid-4x4").unwrap();
        assert_eq!((grid.n(), grid.edge_count()), (16, 24));
        assert_eq!(Graph::named("cycle-7").unwrap().edge_count(), 7);
        assert!(Graph::named("wheel-5").is_none());
    }

    #[test]
    fn shortest_path_walks_downhill() {
        let c6 = Graph::cycle(6);
        let path = shortest_path(&c6, 0, 3, None).unwrap();
        assert_eq!(path.len(), 4);
        assert_eq!(path, vec![0, 1, 2, 3]);
        assert!(shortest_path(&c6, 0, 3, Some(2)).is_none());
        let g = Graph::empty(2);
        assert!(shortest_path(&g, 0, 1, None).is_none());
    }

    #[test]
    fn distances_mark_unreachable() {
        let g = Graph::from_edges(4, [(0, 1)]).unwrap();
        let d = distances(&g, &[0], None);
        assert_eq!(d, vec![Some(0), Some(1), None, None]);
    }
}

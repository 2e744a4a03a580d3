//! Bipartite matching and Hall-condition witnesses, used to send cops to
//! destinations that are each within a given distance.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::graph::{distances, layers, Graph, GraphError, Vertex, VertexSet};

/// Bipartite incidence: `adj[l]` lists the right indices adjacent to left
/// index `l`, ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bipartite {
    pub right_len: usize,
    pub adj: Vec<Vec<usize>>,
}

impl Bipartite {
    pub fn new(right_len: usize, mut adj: Vec<Vec<usize>>) -> Self {
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Bipartite { right_len, adj }
    }

    pub fn left_len(&self) -> usize {
        self.adj.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub left_to_right: Vec<Option<usize>>,
    pub right_to_left: Vec<Option<usize>>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.left_to_right.iter().flatten().count()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.left_to_right
            .iter()
            .enumerate()
            .filter_map(|(l, r)| r.map(|r| (l, r)))
    }
}

const INF: usize = usize::MAX;

/// Maximum-cardinality matching by Hopcroft-Karp. Phases scan left
/// vertices and their neighbours in ascending order, so the result is a
/// pure function of the incidence lists.
pub fn max_matching(b: &Bipartite) -> Matching {
    let nl = b.left_len();
    let mut l2r = vec![None; nl];
    let mut r2l: Vec<Option<usize>> = vec![None; b.right_len];
    let mut dist = vec![INF; nl];
    let mut cursor = vec![0usize; nl];

    loop {
        // BFS layering from free left vertices.
        let mut queue = VecDeque::new();
        for l in 0..nl {
            if l2r[l].is_none() {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = INF;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &b.adj[l] {
                match r2l[r] {
                    None => found = true,
                    Some(l2) if dist[l2] == INF => {
                        dist[l2] = dist[l] + 1;
                        queue.push_back(l2);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        cursor.iter_mut().for_each(|c| *c = 0);
        for l in 0..nl {
            if l2r[l].is_none() {
                augment(b, l, &mut l2r, &mut r2l, &mut dist, &mut cursor);
            }
        }
    }
    Matching {
        left_to_right: l2r,
        right_to_left: r2l,
    }
}

fn augment(
    b: &Bipartite,
    l: usize,
    l2r: &mut [Option<usize>],
    r2l: &mut [Option<usize>],
    dist: &mut [usize],
    cursor: &mut [usize],
) -> bool {
    while cursor[l] < b.adj[l].len() {
        let r = b.adj[l][cursor[l]];
        cursor[l] += 1;
        let ok = match r2l[r] {
            None => true,
            Some(l2) => dist[l2] == dist[l] + 1 && augment(b, l2, l2r, r2l, dist, cursor),
        };
        if ok {
            l2r[l] = Some(r);
            r2l[r] = Some(l);
            return true;
        }
    }
    dist[l] = INF;
    false
}

/// Left vertices reachable from unmatched left vertices along alternating
/// paths. For a maximum matching this set `K` has `|N(K)| = |K| - (number
/// of unmatched vertices in K)`, the canonical Hall violation.
pub fn hall_witness(b: &Bipartite, m: &Matching) -> Vec<usize> {
    let mut in_k = vec![false; b.left_len()];
    let mut queue: VecDeque<usize> = (0..b.left_len())
        .filter(|&l| m.left_to_right[l].is_none())
        .collect();
    for &l in &queue {
        in_k[l] = true;
    }
    while let Some(l) = queue.pop_front() {
        for &r in &b.adj[l] {
            if let Some(l2) = m.right_to_left[r] {
                if !in_k[l2] {
                    in_k[l2] = true;
                    queue.push_back(l2);
                }
            }
        }
    }
    (0..b.left_len()).filter(|&l| in_k[l]).collect()
}

/// Send cops standing on `right` to the destinations `left`, each
/// destination within `radius` of its cop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentProblem {
    pub left: VertexSet,
    pub right: VertexSet,
    pub radius: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AssignmentResult {
    /// `(destination, cop location)` for every destination, injective.
    Assignment { pairs: Vec<(Vertex, Vertex)> },
    /// A destination set `K` with fewer than `|K|` cop locations within
    /// `radius` of it.
    Violation { set: VertexSet, reachable: VertexSet },
}

impl AssignmentProblem {
    pub fn new(left: VertexSet, right: VertexSet, radius: u32) -> Self {
        AssignmentProblem { left, right, radius }
    }

    /// Distance-`<= radius` incidence, built from one bounded BFS per
    /// destination; nothing of size `n x n` is materialised.
    pub fn incidence(&self, g: &Graph) -> Result<Bipartite, GraphError> {
        for v in self.left.iter().chain(self.right.iter()) {
            g.check(v)?;
        }
        let adj = self
            .left
            .iter()
            .map(|x| {
                layers(g, &[x], self.radius)
                    .into_iter()
                    .flatten()
                    .filter_map(|y| self.right.as_slice().binary_search(&y).ok())
                    .collect()
            })
            .collect();
        Ok(Bipartite::new(self.right.len(), adj))
    }
}

/// Perfect assignment of all destinations when Hall's condition holds,
/// otherwise a concrete violating destination set.
pub fn assign_within_radius(g: &Graph, p: &AssignmentProblem) -> Result<AssignmentResult, GraphError> {
    let b = p.incidence(g)?;
    let m = max_matching(&b);
    if m.size() == p.left.len() {
        let pairs = m
            .pairs()
            .map(|(l, r)| (p.left.as_slice()[l], p.right.as_slice()[r]))
            .collect();
        return Ok(AssignmentResult::Assignment { pairs });
    }
    let k = hall_witness(&b, &m);
    let reachable: VertexSet = k
        .iter()
        .flat_map(|&l| b.adj[l].iter().map(|&r| p.right.as_slice()[r]))
        .collect();
    Ok(AssignmentResult::Violation {
        set: k.iter().map(|&l| p.left.as_slice()[l]).collect(),
        reachable,
    })
}

/// Maximum partial assignment: as many `(destination, cop location)`
/// pairs as possible. Strategies use this when Hall fails and carry on
/// with whatever is covered.
pub fn assign_max(g: &Graph, p: &AssignmentProblem) -> Result<Vec<(Vertex, Vertex)>, GraphError> {
    let b = p.incidence(g)?;
    let m = max_matching(&b);
    Ok(m.pairs()
        .map(|(l, r)| (p.left.as_slice()[l], p.right.as_slice()[r]))
        .collect())
}

/// `max_{K subset of left} |K| - |N(K, radius) ∩ right|`, which by König
/// duality is `|left| - (maximum matching size)`.
pub fn hall_deficiency(g: &Graph, p: &AssignmentProblem) -> Result<usize, GraphError> {
    let b = p.incidence(g)?;
    Ok(p.left.len() - max_matching(&b).size())
}

/// Matches destinations to individual agents (several agents may share a
/// vertex) so that each matched agent is within `radius` of its
/// destination; `None` means any distance. Returns `(destination, agent)`
/// pairs of a maximum matching. BFS runs from whichever side is smaller.
pub fn assign_agents(
    g: &Graph,
    targets: &VertexSet,
    agents: &[Vertex],
    radius: Option<u32>,
) -> Result<Vec<(Vertex, usize)>, GraphError> {
    for v in targets.iter().chain(agents.iter().copied()) {
        g.check(v)?;
    }
    let reach = radius.unwrap_or(u32::MAX);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); targets.len()];
    if agents.len() < targets.len() {
        for (a, &at) in agents.iter().enumerate() {
            for (t, d) in distances(g, &[at], Some(reach)).into_iter().enumerate() {
                if d.is_some() {
                    if let Ok(l) = targets.as_slice().binary_search(&(t as Vertex)) {
                        adj[l].push(a);
                    }
                }
            }
        }
    } else {
        let mut at_vertex: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
        for (a, &at) in agents.iter().enumerate() {
            at_vertex[at as usize].push(a);
        }
        for (l, t) in targets.iter().enumerate() {
            for (v, d) in distances(g, &[t], Some(reach)).into_iter().enumerate() {
                if d.is_some() {
                    adj[l].extend_from_slice(&at_vertex[v]);
                }
            }
        }
    }
    let b = Bipartite::new(agents.len(), adj);
    let m = max_matching(&b);
    Ok(m.pairs().map(|(l, a)| (targets.as_slice()[l], a)).collect())
}

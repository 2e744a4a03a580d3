//! Exact cop numbers and capture times by retrograde analysis.
//!
//! A position is `(sorted cop multiset, robber vertex, side to move)`.
//! Labels spread backwards from capture positions with a 0-1 BFS: a
//! robber-to-move position is won once every robber reply is won (kept by
//! an out-degree counter) and costs nothing extra, a cop-to-move position
//! is won as soon as one cop move wins and costs one more cop move. The
//! deque pops positions in nondecreasing value, so the first label a cop
//! position gets is its minimum and the last counter decrement of a robber
//! position sees its maximum.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{closed_neighbors, cop_successors, Turn};
use crate::graph::{components, Graph, Vertex};

pub const DEFAULT_BUDGET: u64 = 50_000_000;

const ROBBER_WINS: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("{positions} positions exceed the budget of {budget}")]
    BudgetExceeded { positions: u64, budget: u64 },
    #[error("the graph has no vertices")]
    EmptyGraph,
    #[error("need at least one cop")]
    NoCops,
    #[error("{k} cops cannot force a capture")]
    TooFewCops { k: usize },
}

/// `C(n + k - 1, k) * n * 2`, saturating.
pub fn position_count(n: usize, k: usize) -> u64 {
    multiset_count(n, k).saturating_mul(n as u64).saturating_mul(2)
}

fn multiset_count(n: usize, k: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    binomial((n + k - 1) as u64, k as u64)
}

fn binomial(a: u64, b: u64) -> u64 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        acc = acc * (a - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Win/loss table and optimal capture times for `k` cops on one graph.
#[derive(Debug, Clone)]
pub struct PositionTable {
    pub k: usize,
    pub n: usize,
    /// Multisets in rank order, `k` entries each.
    multisets: Vec<Vertex>,
    /// `binom[i][j] = C(i, j)` for the colex ranking.
    binom: Vec<Vec<u64>>,
    succ: Vec<Vec<u32>>,
    steps: Vec<u32>,
}

impl PositionTable {
    pub fn multiset_count(&self) -> usize {
        self.multisets.len() / self.k
    }

    pub fn multiset(&self, idx: usize) -> &[Vertex] {
        &self.multisets[idx * self.k..(idx + 1) * self.k]
    }

    /// Colex rank of a sorted multiset through `b_i = c_i + i`.
    pub fn rank(&self, sorted: &[Vertex]) -> usize {
        debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
        sorted
            .iter()
            .enumerate()
            .map(|(i, &c)| self.binom[c as usize + i][i + 1])
            .sum::<u64>() as usize
    }

    fn index(&self, m: usize, r: Vertex, turn: Turn) -> usize {
        (m * self.n + r as usize) * 2 + usize::from(turn == Turn::Robber)
    }

    /// Optimal remaining capture time (cop moves), or `None` if the robber
    /// can evade forever. `cops` need not be sorted.
    pub fn value(&self, cops: &[Vertex], robber: Vertex, turn: Turn) -> Option<u32> {
        let mut m = cops.to_vec();
        m.sort_unstable();
        let s = self.steps[self.index(self.rank(&m), robber, turn)];
        (s != ROBBER_WINS).then_some(s)
    }

    fn value_at(&self, m: usize, r: Vertex, turn: Turn) -> Option<u32> {
        let s = self.steps[self.index(m, r, turn)];
        (s != ROBBER_WINS).then_some(s)
    }

    /// Sorted multisets reachable in one cop move from multiset `m`.
    pub fn successors(&self, m: usize) -> &[u32] {
        &self.succ[m]
    }

    /// Worst case over robber placements, `None` if some placement
    /// escapes.
    pub fn placement_value(&self, m: usize) -> Option<u32> {
        (0..self.n as Vertex).try_fold(0, |acc, r| self.value_at(m, r, Turn::Cops).map(|v| acc.max(v)))
    }

    /// The placement with the smallest worst-case capture time (lowest
    /// rank on ties), if any placement wins.
    pub fn best_placement(&self) -> Option<(Vec<Vertex>, u32)> {
        (0..self.multiset_count())
            .filter_map(|m| self.placement_value(m).map(|v| (v, m)))
            .min()
            .map(|(v, m)| (self.multiset(m).to_vec(), v))
    }

    pub fn is_cop_win(&self) -> bool {
        self.best_placement().is_some()
    }

    /// Re-derives every label from its successors: captures are 0, a
    /// cop-to-move position is won iff some successor is (value = 1 +
    /// best), a robber-to-move position iff all are (value = worst).
    pub fn check_fixpoint(&self, g: &Graph) -> Result<(), String> {
        for m in 0..self.multiset_count() {
            let cops = self.multiset(m);
            for r in 0..self.n as Vertex {
                let here_c = self.value_at(m, r, Turn::Cops);
                let here_r = self.value_at(m, r, Turn::Robber);
                if cops.contains(&r) {
                    if here_c != Some(0) || here_r != Some(0) {
                        return Err(format!("capture position {cops:?}/{r} not labelled 0"));
                    }
                    continue;
                }
                let best = self.succ[m]
                    .iter()
                    .filter_map(|&m2| self.value_at(m2 as usize, r, Turn::Robber))
                    .min()
                    .map(|v| v + 1);
                if best != here_c {
                    return Err(format!("cop-turn {cops:?}/{r}: stored {here_c:?}, derived {best:?}"));
                }
                let replies: Vec<Option<u32>> = closed_neighbors(g, r)
                    .into_iter()
                    .map(|r2| self.value_at(m, r2, Turn::Cops))
                    .collect();
                let worst = if replies.iter().all(Option::is_some) {
                    replies.into_iter().flatten().max()
                } else {
                    None
                };
                if worst != here_r {
                    return Err(format!("robber-turn {cops:?}/{r}: stored {here_r:?}, derived {worst:?}"));
                }
            }
        }
        Ok(())
    }

    /// One line per position: `cops robber turn steps`, steps `-` for a
    /// robber win.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for m in 0..self.multiset_count() {
            let cops: Vec<String> = self.multiset(m).iter().map(|c| c.to_string()).collect();
            let cops = cops.join(",");
            for r in 0..self.n as Vertex {
                for turn in [Turn::Cops, Turn::Robber] {
                    let v = self.value_at(m, r, turn).map_or("-".to_string(), |s| s.to_string());
                    let t = if turn == Turn::Cops { "cops" } else { "robber" };
                    out.push_str(&format!("{cops} {r} {t} {v}\n"));
                }
            }
        }
        out
    }
}

fn enumerate_multisets(n: usize, k: usize, out: &mut Vec<Vertex>, cur: &mut Vec<Vertex>, lo: Vertex) {
    if cur.len() == k {
        out.extend_from_slice(cur);
        return;
    }
    for c in lo..n as Vertex {
        cur.push(c);
        enumerate_multisets(n, k, out, cur, c);
        cur.pop();
    }
}

/// Solves the `k`-cop game on `g` exactly.
pub fn solve_k(g: &Graph, k: usize, budget: u64) -> Result<PositionTable, SolverError> {
    let n = g.n();
    if n == 0 {
        return Err(SolverError::EmptyGraph);
    }
    if k == 0 {
        return Err(SolverError::NoCops);
    }
    let positions = position_count(n, k);
    if positions > budget {
        return Err(SolverError::BudgetExceeded { positions, budget });
    }
    let binom: Vec<Vec<u64>> = (0..n + k)
        .map(|i| (0..=k).map(|j| binomial(i as u64, j as u64)).collect())
        .collect();
    let mut lex = Vec::new();
    enumerate_multisets(n, k, &mut lex, &mut Vec::with_capacity(k), 0);
    let count = lex.len() / k;
    let mut table = PositionTable {
        k,
        n,
        multisets: vec![0; lex.len()],
        binom,
        succ: Vec::new(),
        steps: vec![ROBBER_WINS; count * n * 2],
    };
    for chunk in lex.chunks_exact(k) {
        let at = table.rank(chunk);
        table.multisets[at * k..(at + 1) * k].copy_from_slice(chunk);
    }
    table.succ = (0..count)
        .map(|m| {
            let mut s: Vec<u32> = cop_successors(g, table.multiset(m))
                .iter()
                .map(|c| table.rank(c) as u32)
                .collect();
            s.sort_unstable();
            s
        })
        .collect();

    let mut counter: Vec<u32> = (0..n as Vertex).map(|r| g.degree(r) as u32 + 1).collect::<Vec<_>>().repeat(count);
    let mut deque = VecDeque::new();
    for m in 0..count {
        for c in table.multiset(m).to_vec() {
            for turn in [Turn::Cops, Turn::Robber] {
                let i = table.index(m, c, turn);
                if table.steps[i] == ROBBER_WINS {
                    table.steps[i] = 0;
                    deque.push_back((m, c, turn));
                }
            }
        }
    }
    while let Some((m, r, turn)) = deque.pop_front() {
        let s = table.steps[table.index(m, r, turn)];
        match turn {
            Turn::Cops => {
                // Robber-to-move predecessors: the robber came from N[r].
                for r0 in closed_neighbors(g, r) {
                    let i = table.index(m, r0, Turn::Robber);
                    if table.steps[i] != ROBBER_WINS {
                        continue;
                    }
                    let c = &mut counter[m * n + r0 as usize];
                    *c -= 1;
                    if *c == 0 {
                        table.steps[i] = s;
                        deque.push_front((m, r0, Turn::Robber));
                    }
                }
            }
            Turn::Robber => {
                // Cop moves are reversible, so predecessors = successors.
                for j in 0..table.succ[m].len() {
                    let m0 = table.succ[m][j] as usize;
                    let i = table.index(m0, r, Turn::Cops);
                    if table.steps[i] == ROBBER_WINS {
                        table.steps[i] = s + 1;
                        deque.push_back((m0, r, Turn::Cops));
                    }
                }
            }
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum CopNumber {
    Exact(usize),
    ExceedsMax(usize),
}

/// Least `k <= k_max` with a winning placement. A disconnected graph gets
/// the maximum over its components.
pub fn cop_number(g: &Graph, k_max: usize, budget: u64) -> Result<CopNumber, SolverError> {
    if g.n() == 0 {
        return Err(SolverError::EmptyGraph);
    }
    let mut worst = 1;
    for comp in components(g) {
        let h = g.induced(&comp);
        let mut found = None;
        for k in 1..=k_max {
            if solve_k(&h, k, budget)?.is_cop_win() {
                found = Some(k);
                break;
            }
        }
        match found {
            Some(k) => worst = worst.max(k),
            None => return Ok(CopNumber::ExceedsMax(k_max)),
        }
    }
    Ok(CopNumber::Exact(worst))
}

/// Capture time under optimal play from the best placement.
pub fn optimal_capture_time(g: &Graph, k: usize, budget: u64) -> Result<u32, SolverError> {
    solve_k(g, k, budget)?
        .best_placement()
        .map(|(_, t)| t)
        .ok_or(SolverError::TooFewCops { k })
}

/// Corner removal: delete any vertex `u` whose closed neighbourhood lies
/// inside that of another vertex, until none is left to delete. True iff
/// a single vertex remains.
pub fn is_copwin_dismantlable(g: &Graph) -> bool {
    let n = g.n();
    if n == 0 {
        return false;
    }
    let mut alive = vec![true; n];
    let mut left = n;
    let closed = |u: usize, alive: &[bool]| -> Vec<usize> {
        let mut s: Vec<usize> = g.neighbors(u as Vertex).iter().map(|&x| x as usize).filter(|&x| alive[x]).collect();
        s.push(u);
        s
    };
    'outer: while left > 1 {
        for u in 0..n {
            if !alive[u] {
                continue;
            }
            let nu = closed(u, &alive);
            let dominated = nu.iter().filter(|&&w| w != u).any(|&w| {
                let nw = closed(w, &alive);
                nu.iter().all(|x| nw.contains(x))
            });
            if dominated {
                alive[u] = false;
                left -= 1;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

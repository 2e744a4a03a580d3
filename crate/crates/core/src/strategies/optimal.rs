use std::sync::Arc;

use crate::game::{closed_neighbors, CopAction, CopStrategy, GameState, RobberStrategy, Turn};
use crate::graph::{Graph, Vertex};
use crate::matching::{max_matching, Bipartite};
use crate::random::SimRng;
use crate::solver::{solve_k, PositionTable, SolverError};

/// `None` (robber escapes) sorts above every finite capture time.
fn key(v: Option<u32>) -> u64 {
    v.map_or(u64::MAX, u64::from)
}

/// Robber playing the solver's value function: she picks the reply with
/// the longest optimal capture time, an escaping one if there is any.
#[derive(Clone)]
pub struct OptimalRobber {
    table: Arc<PositionTable>,
}

impl OptimalRobber {
    pub fn new(g: &Graph, k: usize, budget: u64) -> Result<Self, SolverError> {
        Ok(Self::from_table(Arc::new(solve_k(g, k, budget)?)))
    }

    pub fn from_table(table: Arc<PositionTable>) -> Self {
        OptimalRobber { table }
    }
}

impl RobberStrategy for OptimalRobber {
    fn place(&mut self, g: &Graph, cops: &[Vertex], _: &mut SimRng) -> Vertex {
        g.vertices()
            .max_by_key(|&r| (key(self.table.value(cops, r, Turn::Cops)), std::cmp::Reverse(r)))
            .expect("graph is nonempty")
    }

    fn respond(&mut self, g: &Graph, state: &GameState, _: &mut SimRng) -> Vertex {
        let r = state.robber.expect("robber placed");
        closed_neighbors(g, r)
            .into_iter()
            .max_by_key(|&x| (key(self.table.value(&state.cops, x, Turn::Cops)), std::cmp::Reverse(x)))
            .unwrap_or(r)
    }
}

/// Cops playing the solver's value function from its best placement.
#[derive(Clone)]
pub struct OptimalCops {
    table: Arc<PositionTable>,
}

impl OptimalCops {
    pub fn new(g: &Graph, k: usize, budget: u64) -> Result<Self, SolverError> {
        Ok(Self::from_table(Arc::new(solve_k(g, k, budget)?)))
    }

    pub fn from_table(table: Arc<PositionTable>) -> Self {
        OptimalCops { table }
    }
}

/// Gives each agent a slot of `target` one step away.
fn route(g: &Graph, agents: &[Vertex], target: &[Vertex]) -> Vec<Vertex> {
    let adj = agents
        .iter()
        .map(|&a| {
            (0..target.len())
                .filter(|&j| target[j] == a || g.has_edge(a, target[j]))
                .collect()
        })
        .collect();
    let m = max_matching(&Bipartite::new(target.len(), adj));
    m.left_to_right
        .iter()
        .map(|slot| target[slot.expect("successor multisets are one cop move away")])
        .collect()
}

impl CopStrategy for OptimalCops {
    fn place(&mut self, _: &Graph, _: &mut SimRng) -> Result<Vec<Vertex>, String> {
        self.table
            .best_placement()
            .map(|(cops, _)| cops)
            .ok_or_else(|| format!("{} cops cannot force a capture", self.table.k))
    }

    fn respond(&mut self, g: &Graph, state: &GameState, _: &mut SimRng) -> CopAction {
        let r = state.robber.expect("robber placed");
        let here = self.table.rank(&state.sorted_cops());
        let best = self
            .table
            .successors(here)
            .iter()
            .map(|&m| m as usize)
            .min_by_key(|&m| (key(self.table.value(self.table.multiset(m), r, Turn::Robber)), m))
            .expect("staying is always a successor");
        CopAction::Move(route(g, &state.cops, self.table.multiset(best)))
    }
}

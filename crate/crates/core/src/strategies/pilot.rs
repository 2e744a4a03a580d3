use std::collections::VecDeque;

use crate::game::{AssignmentRecord, GameState, StrategyAudit, TeamRecord};
use crate::graph::{shortest_path, Graph, Vertex};

/// Walks cops along shortest paths to their destinations and keeps the
/// assignment audit. Any cop next to (or on) the robber steps onto her,
/// overriding its plan: that move ends the game.
#[derive(Debug, Clone, Default)]
pub struct Pilot {
    paths: Vec<VecDeque<Vertex>>,
    pub audit: StrategyAudit,
}

impl Pilot {
    pub fn new(teams: &[(String, usize)]) -> Self {
        let k = teams.iter().map(|t| t.1).sum();
        Pilot {
            paths: vec![VecDeque::new(); k],
            audit: StrategyAudit {
                teams: teams
                    .iter()
                    .map(|(name, size)| TeamRecord {
                        name: name.clone(),
                        size: *size,
                    })
                    .collect(),
                assignments: Vec::new(),
            },
        }
    }

    /// Orders `agent`, standing at `from`, to walk to `to`. Returns false
    /// (and leaves the cop holding) when `to` is not within `allotted`.
    pub fn send(&mut self, g: &Graph, state: &GameState, agent: usize, to: Vertex, allotted: Option<u32>) -> bool {
        let from = state.cops[agent];
        let Some(path) = shortest_path(g, from, to, allotted) else {
            self.paths[agent].clear();
            return false;
        };
        self.paths[agent] = path.into_iter().skip(1).collect();
        self.audit.assignments.push(AssignmentRecord {
            agent,
            issued_at: state.cop_moves(),
            from,
            to,
            allotted,
        });
        true
    }

    pub fn hold(&mut self, agent: usize) {
        self.paths[agent].clear();
    }

    pub fn idle(&self) -> bool {
        self.paths.iter().all(VecDeque::is_empty)
    }

    pub fn next_move(&mut self, g: &Graph, state: &GameState) -> Vec<Vertex> {
        let mut next: Vec<Vertex> = state
            .cops
            .iter()
            .zip(&mut self.paths)
            .map(|(&c, p)| p.pop_front().unwrap_or(c))
            .collect();
        if let Some(r) = state.robber {
            if let Some(i) = state.cops.iter().position(|&c| c == r || g.has_edge(c, r)) {
                next[i] = r;
            }
        }
        next
    }
}

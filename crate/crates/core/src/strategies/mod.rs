//! Executable cop strategies and robber baselines.
//!
//! The cop strategies realise existence proofs, so whenever a cop the
//! argument relies on is missing from the sampled teams, the target is
//! recorded as uncovered and play continues. When a strategy runs out of
//! script without a capture it resigns, which scores as robber survival.

mod dense;
mod optimal;
mod pilot;
mod robber;
mod sparse;

pub use dense::{dense_radius, DenseCase, DenseConfig, DenseRecord, DenseStrategy};
pub use optimal::{OptimalCops, OptimalRobber};
pub use pilot::Pilot;
pub use robber::{two_nearest, GreedyRobber, StationaryRobber};
pub use sparse::{radius_schedule, RadiusSchedule, RoundState, SparseConfig, SparseRecord, SparseStrategy};

use thiserror::Error;

use crate::graph::Vertex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrategyError {
    #[error("density {0} must exceed 1")]
    DensityTooLow(f64),
    #[error("invalid parameter {name} = {value}")]
    Parameter { name: &'static str, value: f64 },
    #[error("no integer radius r_{index} fits the schedule band")]
    NoRadius { index: usize },
}

/// Agents `start..start + positions.len()` of one team.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Team {
    pub name: String,
    pub start: usize,
    pub positions: Vec<Vertex>,
}

impl Team {
    pub fn agents(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.positions.len()
    }
}

/// Lays teams out consecutively as agents.
pub(crate) fn build_teams(named: Vec<(&str, Vec<Vertex>)>) -> Vec<Team> {
    let mut start = 0;
    named
        .into_iter()
        .map(|(name, positions)| {
            let t = Team {
                name: name.to_string(),
                start,
                positions,
            };
            start += t.positions.len();
            t
        })
        .collect()
}

pub(crate) fn current(state_cops: &[Vertex], team: &Team) -> Vec<Vertex> {
    state_cops[team.agents()].to_vec()
}

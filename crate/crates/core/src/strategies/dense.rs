use serde::{Deserialize, Serialize};

use super::{build_teams, current, Pilot, StrategyError, Team};
use crate::expansion::build_disjoint_sphere_family;
use crate::game::{CopAction, CopStrategy, GameState, StrategyAudit};
use crate::graph::{ball, closed_neighborhood, sphere, Graph, Vertex, VertexSet};
use crate::matching::assign_agents;
use crate::random::{bernoulli_vertices, SimRng};

/// Smallest `r >= 0` with `d^(r+1) >= sqrt(n)`.
pub fn dense_radius(d: f64, n: usize) -> Result<u32, StrategyError> {
    if d.is_nan() || d <= 1.0 {
        return Err(StrategyError::DensityTooLow(d));
    }
    let root = (n as f64).sqrt();
    let mut r = 0u32;
    while d.powi(r as i32 + 1) < root {
        r += 1;
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenseConfig {
    /// Each team holds each vertex with probability `c / sqrt(n)`.
    pub c: f64,
    /// Relative slack on the `sqrt(n) log n` case threshold.
    pub tol: f64,
}

impl DenseConfig {
    pub fn new(c: f64) -> Self {
        DenseConfig { c, tol: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenseCase {
    /// `d^(r+1) >= sqrt(n) log n`: one team fills `N(v, r)`.
    Fill,
    /// `r >= 1` below the threshold: first, auxiliary, second and clean-up
    /// teams.
    Relay,
    /// `r = 0` below the threshold: the first team holds, the second
    /// covers what it does not dominate.
    Hold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseRecord {
    pub d: f64,
    pub r: u32,
    pub omega: f64,
    pub case: DenseCase,
    pub anchor: Option<Vertex>,
    /// Targets the strategy wanted covered and how many got a cop, per
    /// phase.
    pub phases: Vec<PhaseRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub team: String,
    pub issued_at: u32,
    pub targets: usize,
    pub covered: usize,
}

/// Executable dense-case strategy. One instance per game.
pub struct DenseStrategy {
    cfg: DenseConfig,
    teams: Vec<Team>,
    pilot: Pilot,
    record: DenseRecord,
    covered_first: VertexSet,
    done_second: bool,
    done_cleanup: bool,
}

impl DenseStrategy {
    pub fn new(g: &Graph, cfg: DenseConfig) -> Result<Self, StrategyError> {
        if !(cfg.c > 0.0) {
            return Err(StrategyError::Parameter { name: "C", value: cfg.c });
        }
        let n = g.n();
        let d = g.average_degree();
        let r = dense_radius(d, n)?;
        let root = (n as f64).sqrt();
        let reach = d.powi(r as i32 + 1);
        let case = if reach >= (1.0 - cfg.tol) * root * (n as f64).ln() {
            DenseCase::Fill
        } else if r >= 1 {
            DenseCase::Relay
        } else {
            DenseCase::Hold
        };
        Ok(DenseStrategy {
            cfg,
            teams: Vec::new(),
            pilot: Pilot::default(),
            record: DenseRecord {
                d,
                r,
                omega: reach / root,
                case,
                anchor: None,
                phases: Vec::new(),
            },
            covered_first: VertexSet::new(),
            done_second: false,
            done_cleanup: false,
        })
    }

    pub fn record(&self) -> &DenseRecord {
        &self.record
    }

    fn team(&self, name: &str) -> &Team {
        self.teams.iter().find(|t| t.name == name).expect("team exists")
    }

    /// Matches `targets` to cops of `team` within `radius` and sends them.
    fn cover(&mut self, g: &Graph, state: &GameState, team: &str, targets: &VertexSet, radius: Option<u32>) -> VertexSet {
        let t = self.team(team).clone();
        let at = current(&state.cops, &t);
        let pairs = assign_agents(g, targets, &at, radius).expect("targets are vertices");
        let mut covered = Vec::with_capacity(pairs.len());
        for (dest, a) in pairs {
            if self.pilot.send(g, state, t.start + a, dest, radius) {
                covered.push(dest);
            }
        }
        let covered: VertexSet = covered.into_iter().collect();
        self.record.phases.push(PhaseRecord {
            team: team.to_string(),
            issued_at: state.cop_moves(),
            targets: targets.len(),
            covered: covered.len(),
        });
        covered
    }

    fn open(&mut self, g: &Graph, state: &GameState, v: Vertex) {
        let r = self.record.r;
        match self.record.case {
            DenseCase::Fill => {
                let targets = ball(g, v, r).expect("robber on a vertex");
                self.cover(g, state, "main", &targets, Some(r + 1));
            }
            DenseCase::Relay => {
                // First team: the lowest cop inside each W(u) heads for u.
                let family = build_disjoint_sphere_family(g, v, r, self.record.d).expect("robber on a vertex");
                let first = self.team("first").clone();
                let mut owner = vec![usize::MAX; g.n()];
                for (a, &p) in first.positions.iter().enumerate() {
                    owner[p as usize] = first.start + a;
                }
                let mut covered = Vec::new();
                for (u, w) in &family.members {
                    if let Some(agent) = w.iter().map(|x| owner[x as usize]).find(|&a| a != usize::MAX) {
                        if self.pilot.send(g, state, agent, *u, Some(r + 1)) {
                            covered.push(*u);
                        }
                    }
                }
                self.covered_first = covered.into_iter().collect();
                self.record.phases.push(PhaseRecord {
                    team: "first".into(),
                    issued_at: 0,
                    targets: family.members.len(),
                    covered: self.covered_first.len(),
                });
                let inner = ball(g, v, r).expect("robber on a vertex");
                self.cover(g, state, "auxiliary", &inner, Some(r + 2));
            }
            DenseCase::Hold => {
                let first = self.team("first").clone();
                let dominated = if first.positions.is_empty() {
                    VertexSet::new()
                } else {
                    closed_neighborhood(g, &first.positions.iter().copied().collect()).expect("cops on vertices")
                };
                let open = sphere(g, v, 1).expect("robber on a vertex").difference(&dominated);
                let targets = open.union(&VertexSet::singleton(v));
                self.cover(g, state, "second", &targets, Some(2));
            }
        }
    }
}

impl CopStrategy for DenseStrategy {
    fn place(&mut self, g: &Graph, rng: &mut SimRng) -> Result<Vec<Vertex>, String> {
        let n = g.n();
        let q = (self.cfg.c / (n as f64).sqrt()).min(1.0);
        let names: &[&str] = match self.record.case {
            DenseCase::Fill => &["main"],
            DenseCase::Relay => &["first", "auxiliary", "second", "cleanup"],
            DenseCase::Hold => &["first", "second"],
        };
        let named = names.iter().map(|&name| (name, bernoulli_vertices(n, q, rng))).collect();
        self.teams = build_teams(named);
        self.pilot = Pilot::new(
            &self
                .teams
                .iter()
                .map(|t| (t.name.clone(), t.positions.len()))
                .collect::<Vec<_>>(),
        );
        Ok(self.teams.iter().flat_map(|t| t.positions.iter().copied()).collect())
    }

    fn respond(&mut self, g: &Graph, state: &GameState, _: &mut SimRng) -> CopAction {
        let t = state.cop_moves();
        let robber = state.robber.expect("robber placed");
        let r = self.record.r;
        if t == 0 {
            self.record.anchor = Some(robber);
            self.open(g, state, robber);
        }
        let mut script_over = match self.record.case {
            DenseCase::Fill => t > r,
            DenseCase::Hold => t >= 2,
            DenseCase::Relay => self.done_second && self.done_cleanup,
        };
        if self.record.case == DenseCase::Relay {
            let v = self.record.anchor.expect("set at t = 0");
            let half = r / 2;
            if t == half && !self.done_second {
                // Robber at z; she ends round one in S(z, ceil(r/2)) ∩ S(v, r).
                let ahead = sphere(g, robber, r - half).expect("robber on a vertex");
                let open = sphere(g, v, r).expect("anchor").intersection(&ahead).difference(&self.covered_first);
                let targets: VertexSet = open
                    .iter()
                    .flat_map(|s| sphere(g, s, half + 1).expect("vertex").into_vec())
                    .collect();
                self.cover(g, state, "second", &targets, Some(r + 2));
                self.done_second = true;
            }
            if t == r && !self.done_cleanup {
                let targets = ball(g, robber, half + 1).expect("robber on a vertex");
                self.cover(g, state, "cleanup", &targets, None);
                self.done_cleanup = true;
            }
            script_over = self.done_second && self.done_cleanup;
        }
        if script_over && self.pilot.idle() {
            // Everyone has arrived; one last look for an adjacent robber.
            let next = self.pilot.next_move(g, state);
            if next.contains(&robber) {
                return CopAction::Move(next);
            }
            return CopAction::Resign("dense script finished without capture".into());
        }
        CopAction::Move(self.pilot.next_move(g, state))
    }

    fn metadata(&self) -> serde_json::Value {
        serde_json::json!({ "strategy": "dense", "config": self.cfg, "record": self.record })
    }

    fn audit(&self) -> Option<StrategyAudit> {
        Some(self.pilot.audit.clone())
    }
}

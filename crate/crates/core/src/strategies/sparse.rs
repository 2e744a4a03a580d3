use serde::{Deserialize, Serialize};

use super::{build_teams, current, Pilot, StrategyError, Team};
use crate::bounds::EpsFunctions;
use crate::expansion::{ceil_count, grow_disjoint_family};
use crate::game::{CopAction, CopStrategy, GameState, StrategyAudit};
use crate::graph::{ball, distances, sphere, Graph, Vertex, VertexSet};
use crate::matching::assign_agents;
use crate::random::{bernoulli_vertices, SimRng};

/// Radii and team sizes for the sparse strategy. `radii[i - 1]` is `r_i`
/// for `i = 1..=teams + 1` (the extra radius serves the final round).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusSchedule {
    pub d: f64,
    pub n: usize,
    pub eps0: f64,
    pub f: f64,
    pub c: f64,
    pub teams: usize,
    pub radii: Vec<u32>,
    /// Expected team sizes `c_i = C e^-i sqrt(n)`, the last one `sqrt(n)`.
    pub team_sizes: Vec<f64>,
}

impl RadiusSchedule {
    pub fn r(&self, i: usize) -> u32 {
        self.radii[i - 1]
    }
}

/// `d^k <= x`, checked with a relative guard against rounding.
fn pow_le(d: f64, k: i64, x: f64) -> bool {
    d.powf(k as f64) <= x * (1.0 + 1e-12)
}

/// `r_1 = floor(log_d(eps0 n) / 4)`; for `i >= 2`, `r_i` is the unique
/// integer with `sqrt(eps0 n) / d < d^(r_{i-1} + r_i) / e^(2(i-1)) <=
/// sqrt(eps0 n)`. There are `ceil(F log log n)` teams.
pub fn radius_schedule(d: f64, n: usize, eps0: f64, f: f64, c: f64) -> Result<RadiusSchedule, StrategyError> {
    if !(d >= 2.0) {
        return Err(StrategyError::DensityTooLow(d));
    }
    if !(eps0 > 0.0 && eps0 <= 1.0) {
        return Err(StrategyError::Parameter { name: "eps0", value: eps0 });
    }
    if !(f > 0.0) {
        return Err(StrategyError::Parameter { name: "F", value: f });
    }
    if !(c > 0.0) {
        return Err(StrategyError::Parameter { name: "C", value: c });
    }
    let nf = n as f64;
    if !(nf.ln().ln() > 0.0) {
        return Err(StrategyError::Parameter { name: "n", value: nf });
    }
    let teams = ((f * nf.ln().ln()) - 1e-9).ceil().max(1.0) as usize;
    // Largest integer s with d^s <= x.
    let floor_log = |x: f64| -> i64 {
        let mut s = (x.ln() / d.ln()).floor() as i64;
        while pow_le(d, s + 1, x) {
            s += 1;
        }
        while !pow_le(d, s, x) {
            s -= 1;
        }
        s
    };
    let r1 = floor_log((eps0 * nf).powf(0.25));
    if r1 < 0 {
        return Err(StrategyError::NoRadius { index: 1 });
    }
    let mut radii = vec![r1 as u32];
    let root = (eps0 * nf).sqrt();
    for i in 2..=teams + 1 {
        let s = floor_log(root * (2.0 * (i as f64 - 1.0)).exp());
        let ri = s - *radii.last().unwrap() as i64;
        if ri < 0 {
            return Err(StrategyError::NoRadius { index: i });
        }
        radii.push(ri as u32);
    }
    let team_sizes = (1..=teams)
        .map(|i| {
            if i == teams {
                nf.sqrt()
            } else {
                c * (-(i as f64)).exp() * nf.sqrt()
            }
        })
        .collect();
    Ok(RadiusSchedule {
        d,
        n,
        eps0,
        f,
        c,
        teams,
        radii,
        team_sizes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparseConfig {
    /// Excluded low-degree set: degree at most `eps g(eps) d`.
    pub eps: f64,
    pub eps0: f64,
    pub f: f64,
    pub c: f64,
}

/// One round of the sparse strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundState {
    pub i: usize,
    pub anchor: Vertex,
    pub radius: u32,
    pub started_at: u32,
    /// `|S_{i-1}|`: vertices of `S(v_i, r_i)` not protected by team `i - 1`.
    pub uncovered: usize,
    pub sphere: usize,
    pub vulnerable: bool,
    /// Destinations team `i` was asked to cover and how many got a cop.
    pub targets: usize,
    pub covered: usize,
}

/// `|S_{i-1}| <= floor(e^(-5(i-1)) |S(v_i, r_i)|)`.
pub fn is_vulnerable(i: usize, uncovered: usize, sphere: usize) -> bool {
    let allowance = ((-5.0 * (i as f64 - 1.0)).exp() * sphere as f64 + 1e-9).floor();
    uncovered as f64 <= allowance
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseRecord {
    pub schedule: RadiusSchedule,
    pub excluded: usize,
    pub rounds: Vec<RoundState>,
    pub finished: bool,
}

/// Executable sparse-case strategy: stationed cops on the excluded set,
/// `ceil(F log log n)` teams released one per round, and a clean-up team
/// of `ceil(n^(1/3))` cops re-sent to `N(v_i, r_i)` at every round start.
pub struct SparseStrategy {
    cfg: SparseConfig,
    excluded: VertexSet,
    teams: Vec<Team>,
    pilot: Pilot,
    record: SparseRecord,
    /// Destinations of the most recently released team.
    protected: VertexSet,
    round: usize,
    anchor: Vertex,
    idle_moves: u32,
}

impl SparseStrategy {
    pub fn new(g: &Graph, cfg: SparseConfig) -> Result<Self, StrategyError> {
        let d = g.average_degree();
        let schedule = radius_schedule(d, g.n(), cfg.eps0, cfg.f, cfg.c)?;
        let ef = EpsFunctions::new(cfg.eps, 1e-12).map_err(|_| StrategyError::Parameter {
            name: "eps",
            value: cfg.eps,
        })?;
        let threshold = ef.degree_threshold(d);
        let excluded: VertexSet = g.vertices().filter(|&v| g.degree(v) as f64 <= threshold).collect();
        Ok(Self::with_schedule(schedule, excluded, cfg))
    }

    pub fn with_schedule(schedule: RadiusSchedule, excluded: VertexSet, cfg: SparseConfig) -> Self {
        SparseStrategy {
            cfg,
            record: SparseRecord {
                schedule,
                excluded: excluded.len(),
                rounds: Vec::new(),
                finished: false,
            },
            excluded,
            teams: Vec::new(),
            pilot: Pilot::default(),
            protected: VertexSet::new(),
            round: 0,
            anchor: 0,
            idle_moves: 0,
        }
    }

    pub fn record(&self) -> &SparseRecord {
        &self.record
    }

    fn sched(&self) -> &RadiusSchedule {
        &self.record.schedule
    }

    /// Starts round `i` with the robber at `v`.
    fn start_round(&mut self, g: &Graph, state: &GameState, i: usize, v: Vertex) {
        let s = self.sched().clone();
        let ri = s.r(i);
        let shell = sphere(g, v, ri).expect("robber on a vertex");
        let open = if i == 1 { shell.clone() } else { shell.difference(&self.protected) };
        let mut round = RoundState {
            i,
            anchor: v,
            radius: ri,
            started_at: state.cop_moves(),
            uncovered: open.len(),
            sphere: shell.len(),
            vulnerable: is_vulnerable(i, open.len(), shell.len()),
            targets: 0,
            covered: 0,
        };
        self.round = i;
        self.anchor = v;

        if i <= s.teams {
            let next_r = s.r(i + 1);
            let t = ri + next_r + 1;
            let targets: VertexSet = open
                .iter()
                .flat_map(|u| sphere(g, u, next_r).expect("vertex").into_vec())
                .collect();
            let team = self.teams[i].clone();
            let mut covered = Vec::new();
            if i < s.teams {
                // Disjoint reservoirs W(w); the lowest team cop inside one
                // claims its w.
                let cap = ceil_count((s.d.powi(t as i32)).min(g.n() as f64 / targets.len().max(1) as f64)).max(1);
                let mut owner = vec![usize::MAX; g.n()];
                for (a, &p) in team.positions.iter().enumerate() {
                    owner[p as usize] = team.start + a;
                }
                for (w, reservoir) in grow_disjoint_family(g, &targets, t, cap) {
                    if let Some(agent) = reservoir.iter().map(|&x| owner[x as usize]).filter(|&a| a != usize::MAX).min() {
                        if self.pilot.send(g, state, agent, w, Some(t)) {
                            covered.push(w);
                        }
                    }
                }
            } else {
                // Final team: a matching covers as much of U as it can.
                let at = current(&state.cops, &team);
                for (w, a) in assign_agents(g, &targets, &at, Some(t)).expect("vertices") {
                    if self.pilot.send(g, state, team.start + a, w, Some(t)) {
                        covered.push(w);
                    }
                }
            }
            round.targets = targets.len();
            round.covered = covered.len();
            self.protected = covered.into_iter().collect();
        } else {
            self.protected = VertexSet::new();
        }

        // Clean-up team sweeps the round's ball, excluded vertices aside.
        let cleanup = self.teams.last().expect("clean-up team").clone();
        let targets = ball(g, v, ri).expect("vertex").difference(&self.excluded);
        let at = current(&state.cops, &cleanup);
        for a in cleanup.agents() {
            self.pilot.hold(a);
        }
        for (w, a) in assign_agents(g, &targets, &at, None).expect("vertices") {
            self.pilot.send(g, state, cleanup.start + a, w, None);
        }
        self.record.rounds.push(round);
    }
}

impl CopStrategy for SparseStrategy {
    fn place(&mut self, g: &Graph, rng: &mut SimRng) -> Result<Vec<Vertex>, String> {
        let n = g.n();
        let s = self.sched().clone();
        let mut named: Vec<(String, Vec<Vertex>)> = vec![("stationed".into(), self.excluded.as_slice().to_vec())];
        for (i, &size) in s.team_sizes.iter().enumerate() {
            named.push((format!("team{}", i + 1), bernoulli_vertices(n, (size / n as f64).min(1.0), rng)));
        }
        let cleanup = ceil_count((n as f64).cbrt());
        named.push(("cleanup".into(), (0..cleanup).map(|_| rng.random_range(0..n as Vertex)).collect()));
        self.teams = build_teams(named.iter().map(|(a, b)| (a.as_str(), b.clone())).collect());
        self.pilot = Pilot::new(&self.teams.iter().map(|t| (t.name.clone(), t.positions.len())).collect::<Vec<_>>());
        Ok(self.teams.iter().flat_map(|t| t.positions.iter().copied()).collect())
    }

    fn respond(&mut self, g: &Graph, state: &GameState, _: &mut SimRng) -> CopAction {
        let robber = state.robber.expect("robber placed");
        let last_round = self.sched().teams + 1;
        if self.round == 0 {
            self.start_round(g, state, 1, robber);
        }
        // A round ends once the robber reaches its sphere; r = 0 rounds
        // end at once.
        while !self.record.finished {
            let ri = self.sched().r(self.round);
            let dist = distances(g, &[self.anchor], Some(ri))[robber as usize];
            if dist.is_some_and(|x| x < ri) {
                break;
            }
            if self.round == last_round {
                self.record.finished = true;
                break;
            }
            self.idle_moves = 0;
            self.start_round(g, state, self.round + 1, robber);
        }
        let next = self.pilot.next_move(g, state);
        if self.pilot.idle() && !next.contains(&robber) {
            self.idle_moves += 1;
            // Nothing left to walk: after the final round, or once a
            // round has stalled for n moves, the script is exhausted.
            if self.record.finished || self.idle_moves > g.n() as u32 {
                return CopAction::Resign("sparse script finished without capture".into());
            }
        } else {
            self.idle_moves = 0;
        }
        CopAction::Move(next)
    }

    fn metadata(&self) -> serde_json::Value {
        serde_json::json!({ "strategy": "sparse", "config": self.cfg, "record": self.record })
    }

    fn audit(&self) -> Option<StrategyAudit> {
        Some(self.pilot.audit.clone())
    }
}

use rand::Rng as _;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_example() {
        let s = radius_schedule(10.0, 1_000_000, 1.0, 2.0, 1.0).unwrap();
        assert_eq!(s.radii[0], 1);
        assert_eq!(s.radii[1], 2);
        assert_eq!(s.radii.len(), s.teams + 1);
        assert!(s.radii.iter().all(|&r| r >= s.radii[0]));
        assert_eq!(*s.team_sizes.last().unwrap(), 1000.0);
    }

    #[test]
    fn schedule_band_holds() {
        for &(d, n, eps0) in &[(8.8, 3000usize, 0.5), (10.0, 1_000_000, 0.1), (30.0, 100_000, 0.9)] {
            let s = radius_schedule(d, n, eps0, 3.0, 2.0).unwrap();
            let root = (eps0 * n as f64).sqrt();
            for i in 2..=s.teams + 1 {
                let x = d.powi((s.r(i - 1) + s.r(i)) as i32) / (2.0 * (i as f64 - 1.0)).exp();
                assert!(root / d < x && x <= root * (1.0 + 1e-12), "i = {i}");
            }
            assert_eq!(s, radius_schedule(d, n, eps0, 3.0, 2.0).unwrap());
        }
    }

    #[test]
    fn schedule_rejects_bad_input() {
        assert!(radius_schedule(1.5, 1000, 0.5, 1.0, 1.0).is_err());
        assert!(radius_schedule(4.0, 1000, 0.0, 1.0, 1.0).is_err());
        assert!(radius_schedule(4.0, 1000, 0.5, 0.0, 1.0).is_err());
        // eps0 n < 1 leaves no admissible r_1.
        assert_eq!(radius_schedule(4.0, 10, 0.01, 1.0, 1.0), Err(StrategyError::NoRadius { index: 1 }));
    }

    #[test]
    fn vulnerability_floor() {
        assert!(is_vulnerable(1, 10, 10));
        assert!(!is_vulnerable(2, 1, 100));
        assert!(is_vulnerable(2, 0, 100));
        assert!(is_vulnerable(2, 1, 149));
    }
}

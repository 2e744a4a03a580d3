//! Rules engine for the k-cop game.
//!
//! Cops place first, then the robber, who sees them. Cops move first and
//! all cops move at once; every player may stay put or cross one edge.
//! Capture time counts cop moves; a robber placed on a cop is caught at
//! time 0.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, Vertex};
use crate::random::{trial_rng, Purpose, SimRng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("the graph has no vertices")]
    EmptyGraph,
    #[error("robber has not been placed")]
    RobberUnplaced,
    #[error("cop strategy returned {got} positions for {expected} cops")]
    WrongCopCount { expected: usize, got: usize },
    #[error("illegal move by cop {agent} from {from} to {to} at step {step}")]
    IllegalCopMove { agent: usize, from: Vertex, to: Vertex, step: u32 },
    #[error("illegal robber move from {from} to {to} at step {step}")]
    IllegalRobberMove { from: Vertex, to: Vertex, step: u32 },
    #[error("cop strategy failed to place: {0}")]
    Placement(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Turn {
    Cops,
    Robber,
}

impl Turn {
    pub fn other(self) -> Turn {
        match self {
            Turn::Cops => Turn::Robber,
            Turn::Robber => Turn::Cops,
        }
    }
}

/// Positions after placement. `cops[i]` is agent `i`; strategies need to
/// know which cop is which, so the canonical multiset is derived on demand
/// by [`GameState::sorted_cops`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameState {
    pub cops: Vec<Vertex>,
    pub robber: Option<Vertex>,
    pub turn: Turn,
    /// Moves made since placement.
    pub step: u32,
}

impl GameState {
    pub fn sorted_cops(&self) -> Vec<Vertex> {
        let mut c = self.cops.clone();
        c.sort_unstable();
        c
    }

    /// Cop moves made so far.
    pub fn cop_moves(&self) -> u32 {
        self.step.div_ceil(2)
    }

    pub fn is_capture(&self) -> Result<bool, GameError> {
        let r = self.robber.ok_or(GameError::RobberUnplaced)?;
        Ok(self.cops.contains(&r))
    }
}

pub fn new_game(g: &Graph, cops: Vec<Vertex>, robber: Vertex) -> Result<GameState, GameError> {
    if g.n() == 0 {
        return Err(GameError::EmptyGraph);
    }
    for &c in &cops {
        g.check(c)?;
    }
    g.check(robber)?;
    Ok(GameState {
        cops,
        robber: Some(robber),
        turn: Turn::Cops,
        step: 0,
    })
}

/// Closed neighbourhood in ascending order.
pub fn closed_neighbors(g: &Graph, v: Vertex) -> Vec<Vertex> {
    let nb = g.neighbors(v);
    let at = nb.partition_point(|&x| x < v);
    let mut out = Vec::with_capacity(nb.len() + 1);
    out.extend_from_slice(&nb[..at]);
    out.push(v);
    out.extend_from_slice(&nb[at..]);
    out
}

/// Every sorted multiset reachable in one simultaneous cop move, sorted
/// and deduplicated.
pub fn cop_successors(g: &Graph, cops: &[Vertex]) -> Vec<Vec<Vertex>> {
    let options: Vec<Vec<Vertex>> = cops.iter().map(|&c| closed_neighbors(g, c)).collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; cops.len()];
    loop {
        let mut m: Vec<Vertex> = pick.iter().zip(&options).map(|(&i, o)| o[i]).collect();
        m.sort_unstable();
        out.push(m);
        // Odometer increment.
        let mut j = 0;
        loop {
            if j == pick.len() {
                out.sort_unstable();
                out.dedup();
                return out;
            }
            pick[j] += 1;
            if pick[j] < options[j].len() {
                break;
            }
            pick[j] = 0;
            j += 1;
        }
    }
}

/// Successor states: all cop multisets on the cops' turn (agent order is
/// replaced by sorted order), the robber's closed neighbourhood on hers.
pub fn legal_moves(g: &Graph, state: &GameState) -> Result<Vec<GameState>, GameError> {
    let next = |cops: Vec<Vertex>, robber: Option<Vertex>| GameState {
        cops,
        robber,
        turn: state.turn.other(),
        step: state.step + 1,
    };
    Ok(match state.turn {
        Turn::Cops => cop_successors(g, &state.sorted_cops())
            .into_iter()
            .map(|m| next(m, state.robber))
            .collect(),
        Turn::Robber => {
            let r = state.robber.ok_or(GameError::RobberUnplaced)?;
            closed_neighbors(g, r)
                .into_iter()
                .map(|x| next(state.sorted_cops(), Some(x)))
                .collect()
        }
    })
}

fn is_step(g: &Graph, from: Vertex, to: Vertex) -> bool {
    from == to || g.has_edge(from, to)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CopAction {
    Move(Vec<Vertex>),
    /// The strategy has no further plan; the game is scored as a robber
    /// survival.
    Resign(String),
}

pub trait CopStrategy {
    fn place(&mut self, g: &Graph, rng: &mut SimRng) -> Result<Vec<Vertex>, String>;
    fn respond(&mut self, g: &Graph, state: &GameState, rng: &mut SimRng) -> CopAction;
    /// Strategy-specific record embedded in the result.
    fn metadata(&self) -> serde_json::Value {
        serde_json::Value::Null
    }
    fn audit(&self) -> Option<StrategyAudit> {
        None
    }
}

pub trait RobberStrategy {
    fn place(&mut self, g: &Graph, cops: &[Vertex], rng: &mut SimRng) -> Vertex;
    fn respond(&mut self, g: &Graph, state: &GameState, rng: &mut SimRng) -> Vertex;
}

/// Cops are grouped into named teams; `size` agents per team, numbered
/// consecutively in team order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamRecord {
    pub name: String,
    pub size: usize,
}

/// A destination handed to one cop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentRecord {
    pub agent: usize,
    /// Cop moves already made when the order was issued.
    pub issued_at: u32,
    pub from: Vertex,
    pub to: Vertex,
    /// Steps the cop was allowed; `None` for open-ended sweeps.
    pub allotted: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StrategyAudit {
    pub teams: Vec<TeamRecord>,
    pub assignments: Vec<AssignmentRecord>,
}

impl StrategyAudit {
    pub fn total_cops(&self) -> usize {
        self.teams.iter().map(|t| t.size).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Cops,
    RobberSurvived,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Actor {
    Cop,
    Robber,
}

/// One line of a trace. Placements have `step = None` and `from = None`;
/// moves carry the index of the move (cop moves even, robber moves odd).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub actor: Actor,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub agent: Option<usize>,
    pub from: Option<Vertex>,
    pub to: Vertex,
    pub step: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    pub winner: Winner,
    pub capture_time: Option<u32>,
    pub horizon: u32,
    pub cop_count: usize,
    pub cop_moves: u32,
    pub resigned: Option<String>,
    pub trace: Vec<TraceEvent>,
    pub audit: Option<StrategyAudit>,
    pub metadata: serde_json::Value,
}

impl GameResult {
    pub fn captured(&self) -> bool {
        self.winner == Winner::Cops
    }

    /// Trace as JSON lines, with the strategy metadata on a final line.
    pub fn trace_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.trace {
            out.push_str(&serde_json::to_string(e).expect("trace events serialise"));
            out.push('\n');
        }
        let tail = serde_json::json!({ "metadata": self.metadata, "audit": self.audit });
        out.push_str(&tail.to_string());
        out.push('\n');
        out
    }
}

pub fn default_horizon(n: usize) -> u32 {
    (n as u64 * n as u64).min(u32::MAX as u64) as u32
}

/// Plays one game. Cop and robber draw from separate streams of `seed`,
/// so the result depends only on the strategies, the graph and the seed.
pub fn play(
    g: &Graph,
    cop: &mut dyn CopStrategy,
    robber: &mut dyn RobberStrategy,
    horizon: u32,
    seed: u64,
) -> Result<GameResult, GameError> {
    if g.n() == 0 {
        return Err(GameError::EmptyGraph);
    }
    let mut cop_rng = trial_rng(seed, 0, Purpose::Cops);
    let mut robber_rng = trial_rng(seed, 0, Purpose::Robber);
    let cops = cop.place(g, &mut cop_rng).map_err(GameError::Placement)?;
    for &c in &cops {
        g.check(c)?;
    }
    let mut trace: Vec<TraceEvent> = cops
        .iter()
        .enumerate()
        .map(|(i, &c)| TraceEvent {
            actor: Actor::Cop,
            agent: Some(i),
            from: None,
            to: c,
            step: None,
        })
        .collect();
    let r0 = robber.place(g, &cops, &mut robber_rng);
    g.check(r0)?;
    trace.push(TraceEvent {
        actor: Actor::Robber,
        agent: None,
        from: None,
        to: r0,
        step: None,
    });
    let mut state = new_game(g, cops, r0)?;
    let k = state.cops.len();
    let finish = |winner, capture_time, state: &GameState, resigned, trace, cop: &dyn CopStrategy| GameResult {
        winner,
        capture_time,
        horizon,
        cop_count: k,
        cop_moves: state.cop_moves(),
        resigned,
        trace,
        audit: cop.audit(),
        metadata: cop.metadata(),
    };
    if state.is_capture()? {
        return Ok(finish(Winner::Cops, Some(0), &state, None, trace, cop));
    }
    while state.cop_moves() < horizon {
        let next = match cop.respond(g, &state, &mut cop_rng) {
            CopAction::Move(next) => next,
            CopAction::Resign(reason) => {
                return Ok(finish(Winner::RobberSurvived, None, &state, Some(reason), trace, cop));
            }
        };
        if next.len() != k {
            return Err(GameError::WrongCopCount { expected: k, got: next.len() });
        }
        for (agent, (&from, &to)) in state.cops.iter().zip(&next).enumerate() {
            g.check(to)?;
            if !is_step(g, from, to) {
                return Err(GameError::IllegalCopMove {
                    agent,
                    from,
                    to,
                    step: state.step,
                });
            }
            trace.push(TraceEvent {
                actor: Actor::Cop,
                agent: Some(agent),
                from: Some(from),
                to,
                step: Some(state.step),
            });
        }
        state.cops = next;
        state.step += 1;
        state.turn = Turn::Robber;
        if state.is_capture()? {
            let t = state.cop_moves();
            return Ok(finish(Winner::Cops, Some(t), &state, None, trace, cop));
        }

        let from = state.robber.expect("placed");
        let to = robber.respond(g, &state, &mut robber_rng);
        g.check(to)?;
        if !is_step(g, from, to) {
            return Err(GameError::IllegalRobberMove { from, to, step: state.step });
        }
        trace.push(TraceEvent {
            actor: Actor::Robber,
            agent: None,
            from: Some(from),
            to,
            step: Some(state.step),
        });
        state.robber = Some(to);
        state.step += 1;
        state.turn = Turn::Cops;
        if state.is_capture()? {
            let t = state.cop_moves();
            return Ok(finish(Winner::Cops, Some(t), &state, None, trace, cop));
        }
    }
    Ok(finish(Winner::RobberSurvived, None, &state, None, trace, cop))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("trace line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("trace line {line}: move from {from} to {to} is not along an edge")]
    Illegal { line: usize, from: Vertex, to: Vertex },
    #[error("trace line {line}: expected {expected:?} at step {step}")]
    OutOfTurn { line: usize, expected: Actor, step: u32 },
    #[error("result disagrees with trace: {0}")]
    Outcome(String),
    #[error("audit: {0}")]
    Audit(String),
}

/// Cop positions after each cop move, as rebuilt from a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    /// `positions[t]` = cop positions after `t` cop moves.
    pub positions: Vec<Vec<Vertex>>,
    pub robber: Vec<Vertex>,
    pub capture_time: Option<u32>,
}

/// Replays `result.trace` from the placements: checks that every line
/// continues from where its mover stands, moves along an edge or stays,
/// that turns alternate (all cops at even steps, the robber at odd), and
/// that the recorded outcome matches the replayed one.
pub fn validate_trace(g: &Graph, result: &GameResult) -> Result<Replay, TraceError> {
    let k = result.cop_count;
    let malformed = |line: usize, msg: &str| TraceError::Malformed {
        line,
        msg: msg.to_string(),
    };
    let mut lines = result.trace.iter().enumerate().peekable();
    let mut cops = Vec::with_capacity(k);
    for i in 0..k {
        let (line, e) = lines.next().ok_or_else(|| malformed(i, "missing cop placement"))?;
        if e.actor != Actor::Cop || e.agent != Some(i) || e.step.is_some() || e.from.is_some() || !g.contains(e.to) {
            return Err(malformed(line, "bad cop placement"));
        }
        cops.push(e.to);
    }
    let (line, e) = lines.next().ok_or_else(|| malformed(k, "missing robber placement"))?;
    if e.actor != Actor::Robber || e.step.is_some() || !g.contains(e.to) {
        return Err(malformed(line, "bad robber placement"));
    }
    let mut robber = e.to;
    let mut replay = Replay {
        positions: vec![cops.clone()],
        robber: vec![robber],
        capture_time: None,
    };
    let mut captured = cops.contains(&robber).then_some(0);
    let mut step = 0u32;
    while let Some(&(line, e)) = lines.peek() {
        if captured.is_some() {
            return Err(malformed(line, "moves after capture"));
        }
        if step % 2 == 0 {
            for agent in 0..k {
                let (line, e) = lines.next().ok_or_else(|| malformed(line, "truncated cop move"))?;
                if e.actor != Actor::Cop || e.agent != Some(agent) || e.step != Some(step) {
                    return Err(TraceError::OutOfTurn {
                        line,
                        expected: Actor::Cop,
                        step,
                    });
                }
                if e.from != Some(cops[agent]) {
                    return Err(malformed(line, "cop move does not start at the cop"));
                }
                if !g.contains(e.to) || !is_step(g, cops[agent], e.to) {
                    return Err(TraceError::Illegal {
                        line,
                        from: cops[agent],
                        to: e.to,
                    });
                }
                cops[agent] = e.to;
            }
            replay.positions.push(cops.clone());
        } else {
            lines.next();
            if e.actor != Actor::Robber || e.step != Some(step) {
                return Err(TraceError::OutOfTurn {
                    line,
                    expected: Actor::Robber,
                    step,
                });
            }
            if e.from != Some(robber) {
                return Err(malformed(line, "robber move does not start at the robber"));
            }
            if !g.contains(e.to) || !is_step(g, robber, e.to) {
                return Err(TraceError::Illegal { line, from: robber, to: e.to });
            }
            robber = e.to;
            replay.robber.push(robber);
        }
        step += 1;
        if cops.contains(&robber) {
            captured = Some(step.div_ceil(2));
        }
    }
    replay.capture_time = captured;
    if captured != result.capture_time {
        return Err(TraceError::Outcome(format!(
            "trace gives capture time {captured:?}, result says {:?}",
            result.capture_time
        )));
    }
    if (result.winner == Winner::Cops) != captured.is_some() {
        return Err(TraceError::Outcome("winner does not match capture".into()));
    }
    if let Some(t) = captured {
        if t > result.horizon {
            return Err(TraceError::Outcome(format!("capture at {t} beyond horizon {}", result.horizon)));
        }
    }
    Ok(replay)
}

/// Budget and assignment audit: the teams account for exactly the cops
/// in play, and every issued destination was within the allotted number
/// of steps of the cop's replayed position when issued.
pub fn check_audit(g: &Graph, result: &GameResult, replay: &Replay) -> Result<(), TraceError> {
    let Some(audit) = &result.audit else {
        return Ok(());
    };
    if audit.total_cops() != result.cop_count {
        return Err(TraceError::Audit(format!(
            "teams account for {} cops, game used {}",
            audit.total_cops(),
            result.cop_count
        )));
    }
    for a in &audit.assignments {
        let at = replay
            .positions
            .get(a.issued_at as usize)
            .and_then(|p| p.get(a.agent))
            .ok_or_else(|| TraceError::Audit(format!("assignment {a:?} refers to an unknown cop or time")))?;
        if *at != a.from {
            return Err(TraceError::Audit(format!("cop {} was at {at}, not {}, when assigned", a.agent, a.from)));
        }
        if let Some(limit) = a.allotted {
            let dist = crate::graph::distances(g, &[a.from], Some(limit))[a.to as usize];
            if dist.is_none() {
                return Err(TraceError::Audit(format!(
                    "cop {} sent from {} to {} with only {limit} steps",
                    a.agent, a.from, a.to
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fixed(Vec<Vertex>);
    impl CopStrategy for Fixed {
        fn place(&mut self, _: &Graph, _: &mut SimRng) -> Result<Vec<Vertex>, String> {
            Ok(self.0.clone())
        }
        fn respond(&mut self, g: &Graph, s: &GameState, _: &mut SimRng) -> CopAction {
            // Step towards the robber along a shortest path.
            let r = s.robber.unwrap();
            CopAction::Move(
                s.cops
                    .iter()
                    .map(|&c| crate::graph::shortest_path(g, c, r, None).map_or(c, |p| p.get(1).copied().unwrap_or(c)))
                    .collect(),
            )
        }
    }

    struct Still(Vertex);
    impl RobberStrategy for Still {
        fn place(&mut self, _: &Graph, _: &[Vertex], _: &mut SimRng) -> Vertex {
            self.0
        }
        fn respond(&mut self, _: &Graph, s: &GameState, _: &mut SimRng) -> Vertex {
            s.robber.unwrap()
        }
    }

    struct Teleport;
    impl RobberStrategy for Teleport {
        fn place(&mut self, _: &Graph, _: &[Vertex], _: &mut SimRng) -> Vertex {
            4
        }
        fn respond(&mut self, _: &Graph, _: &GameState, _: &mut SimRng) -> Vertex {
            0
        }
    }

    #[test]
    fn new_game_checks() {
        let k2 = Graph::path(2);
        let s = new_game(&k2, vec![0], 1).unwrap();
        assert_eq!(s.turn, Turn::Cops);
        assert!(!s.is_capture().unwrap());
        assert!(new_game(&k2, vec![0], 0).unwrap().is_capture().unwrap());
        assert!(new_game(&k2, vec![0, 0], 1).is_ok());
        assert_eq!(new_game(&Graph::empty(0), vec![], 0), Err(GameError::EmptyGraph));
        assert!(new_game(&k2, vec![3], 1).is_err());
    }

    #[test]
    fn unplaced_robber_capture_is_error() {
        let s = GameState {
            cops: vec![0],
            robber: None,
            turn: Turn::Cops,
            step: 0,
        };
        assert_eq!(s.is_capture(), Err(GameError::RobberUnplaced));
    }

    #[test]
    fn move_generation() {
        let g = Graph::empty(1);
        let s = new_game(&g, vec![0], 0).unwrap();
        assert_eq!(legal_moves(&g, &s).unwrap().len(), 1);
        let c4 = Graph::cycle(4);
        let s = new_game(&c4, vec![0], 2).unwrap();
        assert_eq!(legal_moves(&c4, &s).unwrap().len(), 3);
        // {0,2} on P3: 2 x 2 choices, {1,1} reached twice.
        let p3 = Graph::path(3);
        let s = new_game(&p3, vec![0, 2], 1).unwrap();
        let cops: Vec<_> = legal_moves(&p3, &s).unwrap().into_iter().map(|s| s.cops).collect();
        assert_eq!(cops, vec![vec![0, 1], vec![0, 2], vec![1, 1], vec![1, 2]]);
    }

    #[test]
    fn chase_on_path() {
        let g = Graph::path(5);
        let res = play(&g, &mut Fixed(vec![0]), &mut Still(4), 100, 1).unwrap();
        assert_eq!(res.capture_time, Some(4));
        let replay = validate_trace(&g, &res).unwrap();
        assert_eq!(replay.positions.len(), 5);
        assert!(res.trace_jsonl().lines().count() == res.trace.len() + 1);
    }

    #[test]
    fn placement_on_cop_is_time_zero() {
        let g = Graph::path(3);
        let res = play(&g, &mut Fixed(vec![1]), &mut Still(1), 10, 0).unwrap();
        assert_eq!(res.capture_time, Some(0));
        validate_trace(&g, &res).unwrap();
    }

    #[test]
    fn illegal_robber_move_is_reported() {
        let g = Graph::path(5);
        let err = play(&g, &mut Fixed(vec![2]), &mut Teleport, 10, 0).unwrap_err();
        assert!(matches!(err, GameError::IllegalRobberMove { from: 4, to: 0, .. }));
    }

    #[test]
    fn tampered_trace_is_rejected() {
        let g = Graph::path(5);
        let mut res = play(&g, &mut Fixed(vec![0]), &mut Still(4), 100, 1).unwrap();
        res.trace[2].to = 3;
        assert!(validate_trace(&g, &res).is_err());
    }
}

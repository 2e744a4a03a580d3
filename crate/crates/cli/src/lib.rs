//! Experiment front end for `cops-core`.
//!
//! Every command reads an [`ExperimentSpec`], does its work deterministically
//! from the spec's seed and writes a self-describing artifact: CSV with a
//! `# meta {...}` comment line, or JSON shaped `{"meta", "results",
//! "summary"}` (see `schemas/`). Trials run on the rayon pool; trial `t`
//! draws everything from `trial_seed(seed, t)`, and results are kept in
//! trial order, so output never depends on scheduling.

pub mod output;
pub mod spec;

use std::path::Path;

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use cops_core::bounds::{self, BoundError};
use cops_core::expansion::{self, Accessibility, DenseExpansionParams, ExpansionError, SparseParams};
use cops_core::game::{self, check_audit, default_horizon, validate_trace, CopStrategy, GameError};
use cops_core::random::{trial_rng, trial_seed, Model, ModelError, ModelParams, Purpose};
use cops_core::solver::{self, CopNumber, SolverError};
use cops_core::strategies::{DenseConfig, DenseStrategy, GreedyRobber, SparseConfig, SparseStrategy, StrategyError};
use cops_core::{Graph, GraphError};

pub use output::Table;
pub use spec::{parse_args, CommandKind, ExperimentSpec, Format, ModelKind, SpecError, StrategyKind};

/// Runtime failure; `kind` is the machine-readable tag.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("unknown graph {0:?}: not a built-in name or readable edge-list file")]
    UnknownGraph(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Csv(_) => "csv",
            CliError::Json(_) => "json",
            CliError::Graph(_) => "graph",
            CliError::Model(_) => "model",
            CliError::Solver(_) => "solver",
            CliError::Strategy(_) => "strategy",
            CliError::Game(_) => "game",
            CliError::Expansion(_) => "expansion",
            CliError::Bound(_) => "bound",
            CliError::UnknownGraph(_) => "unknown-graph",
        }
    }

    /// One-line JSON error record for stderr.
    pub fn record(&self) -> Value {
        json!({ "error": self.kind(), "message": self.to_string() })
    }
}

/// Runs one command: computes its table, writes it to `--out` (or stdout)
/// and returns it. `exact` also prints `cop_number=...` lines on stdout.
pub fn run(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let table = match spec.command {
        CommandKind::Gen => return gen(spec),
        CommandKind::Exact => exact(spec)?,
        CommandKind::Simulate => simulate(spec)?,
        CommandKind::VerifyExpansion => verify_expansion(spec)?,
        CommandKind::Bounds => bounds_table(spec)?,
        CommandKind::Zigzag => zigzag(spec)?,
        CommandKind::Scaling => scaling_sweep(spec)?,
    };
    output::emit(spec, &output::render(spec, &table)?)?;
    Ok(table)
}

// ---------------------------------------------------------------------
// Graphs

pub fn model_params(spec: &ExperimentSpec, n: usize, seed: u64) -> ModelParams {
    let d = spec.degree_for(n);
    let model = match spec.model {
        ModelKind::Gnp => Model::Gnp {
            p: spec.p.unwrap_or_else(|| (d / (n - 1) as f64).clamp(0.0, 1.0)),
        },
        ModelKind::Gnm => Model::Gnm {
            m: spec.m.unwrap_or_else(|| (d * n as f64 / 2.0).round() as u64),
        },
        ModelKind::Regular => Model::Regular { d: d.round() as usize },
    };
    ModelParams { n, model, seed }
}

/// Graph of trial `t` at size `n`.
pub fn trial_graph(spec: &ExperimentSpec, n: usize, seed: u64) -> Result<Graph, CliError> {
    Ok(model_params(spec, n, seed).generate(Purpose::Graph as u64)?)
}

/// Built-in name or edge-list file.
pub fn load_graph(name: &str) -> Result<Graph, CliError> {
    if let Some(g) = Graph::named(name) {
        return Ok(g);
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(CliError::UnknownGraph(name.to_string()));
    }
    Ok(Graph::parse_edge_list(&std::fs::read_to_string(path)?)?)
}

fn gen(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let n = spec.n.expect("validated");
    let params = model_params(spec, n, trial_seed(spec.seed, 0));
    let g = params.generate(Purpose::Graph as u64)?;
    let mut table = Table::new(&["n", "edges", "average_degree", "expected_degree"]);
    table.push(vec![json!(n), json!(g.edge_count()), json!(g.average_degree()), json!(params.expected_degree())]);
    let bytes = match spec.format {
        Format::Csv => {
            let mut text = format!("# meta {}\n", output::meta(spec));
            text.push_str(&g.to_edge_list());
            text.into_bytes()
        }
        Format::Json => {
            let edges: Vec<[u32; 2]> = g.edges().map(|(u, v)| [u, v]).collect();
            let doc = json!({
                "meta": output::meta(spec),
                "results": { "n": n, "edges": edges },
                "summary": { "edges": g.edge_count(), "average_degree": g.average_degree() },
            });
            let mut out = serde_json::to_vec_pretty(&doc)?;
            out.push(b'\n');
            out
        }
    };
    output::emit(spec, &bytes)?;
    Ok(table)
}

// ---------------------------------------------------------------------
// Exact solver

fn exact(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let name = spec.graph.as_deref().expect("validated");
    let g = load_graph(name)?;
    let number = solver::cop_number(&g, spec.k_max, spec.budget)?;
    let mut table = Table::new(&["graph", "n", "edges", "cop_number", "exceeds_k_max", "capture_time"]);
    let (k, capture) = match number {
        CopNumber::Exact(k) => {
            let t = solver::solve_k(&g, k, spec.budget)?;
            if let Some(path) = &spec.dump_table {
                output::write_file(path, t.dump().as_bytes())?;
            }
            (Some(k), t.best_placement().map(|(_, time)| time))
        }
        CopNumber::ExceedsMax(_) => (None, None),
    };
    match k {
        Some(k) => println!("cop_number={k}"),
        None => println!("cop_number>{}", spec.k_max),
    }
    if let Some(t) = capture {
        println!("capture_time={t}");
    }
    table.push(vec![
        json!(name),
        json!(g.n()),
        json!(g.edge_count()),
        json!(k),
        json!(k.is_none()),
        json!(capture),
    ]);
    Ok(table)
}

// ---------------------------------------------------------------------
// Simulation

/// One seeded game of the dense or sparse strategy against the greedy robber.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: u64,
    pub n: usize,
    pub edges: usize,
    pub average_degree: f64,
    pub cops: usize,
    pub captured: bool,
    pub capture_time: Option<u32>,
    pub cop_moves: u32,
    pub resigned: bool,
    /// `None` when the trace and audit replay cleanly.
    pub trace_error: Option<String>,
    /// Sparse strategy only.
    pub round1_vulnerable: Option<bool>,
    pub rounds: Option<usize>,
    pub trace: String,
}

/// Plays trial `trial` on a fresh graph of size `n` with density constant
/// `c`. The seed of the trial fixes graph, teams and robber.
pub fn simulate_trial(spec: &ExperimentSpec, n: usize, c: f64, seed: u64, trial: u64) -> Result<TrialOutcome, CliError> {
    let g = trial_graph(spec, n, seed)?;
    let horizon = spec.horizon.unwrap_or_else(|| default_horizon(n));
    let mut sparse = None;
    let result = match spec.strategy_for() {
        StrategyKind::Dense => {
            let mut cops = DenseStrategy::new(&g, DenseConfig { c, tol: spec.case_tol })?;
            game::play(&g, &mut cops, &mut GreedyRobber, horizon, seed)?
        }
        StrategyKind::Sparse => {
            let cfg = SparseConfig {
                eps: spec.eps,
                eps0: spec.eps0,
                f: spec.f,
                c,
            };
            let mut cops = SparseStrategy::new(&g, cfg)?;
            let res = game::play(&g, &mut cops as &mut dyn CopStrategy, &mut GreedyRobber, horizon, seed)?;
            sparse = Some(cops.record().clone());
            res
        }
    };
    let trace_error = match validate_trace(&g, &result) {
        Ok(replay) => check_audit(&g, &result, &replay).err().map(|e| e.to_string()),
        Err(e) => Some(e.to_string()),
    };
    Ok(TrialOutcome {
        trial,
        n,
        edges: g.edge_count(),
        average_degree: g.average_degree(),
        cops: result.cop_count,
        captured: result.captured(),
        capture_time: result.capture_time,
        cop_moves: result.cop_moves,
        resigned: result.resigned.is_some(),
        trace_error,
        round1_vulnerable: sparse.as_ref().and_then(|s| s.rounds.first().map(|r| r.vulnerable)),
        rounds: sparse.as_ref().map(|s| s.rounds.len()),
        trace: if spec.traces.is_some() { result.trace_jsonl() } else { String::new() },
    })
}

/// All trials of one `(n, c)` cell, in trial order. `base` keys the
/// per-trial seeds so that different cells can share graphs.
pub fn run_trials(spec: &ExperimentSpec, n: usize, c: f64, base: u64) -> Result<Vec<TrialOutcome>, CliError> {
    (0..spec.trials)
        .into_par_iter()
        .map(|t| simulate_trial(spec, n, c, trial_seed(base, t), t))
        .collect()
}

fn rate(outcomes: &[TrialOutcome]) -> f64 {
    outcomes.iter().filter(|o| o.captured).count() as f64 / outcomes.len().max(1) as f64
}

fn simulate(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let n = spec.n.expect("validated");
    let outcomes = run_trials(spec, n, spec.c, spec.seed)?;
    if let Some(dir) = &spec.traces {
        std::fs::create_dir_all(dir)?;
        for o in &outcomes {
            output::write_file(&dir.join(format!("trial-{:05}.jsonl", o.trial)), o.trace.as_bytes())?;
        }
    }
    let mut table = Table::new(&[
        "trial",
        "n",
        "edges",
        "average_degree",
        "cops",
        "captured",
        "capture_time",
        "cop_moves",
        "resigned",
        "trace_valid",
        "trace_error",
        "round1_vulnerable",
        "rounds",
    ]);
    for o in &outcomes {
        table.push(vec![
            json!(o.trial),
            json!(o.n),
            json!(o.edges),
            json!(o.average_degree),
            json!(o.cops),
            json!(o.captured),
            json!(o.capture_time),
            json!(o.cop_moves),
            json!(o.resigned),
            json!(o.trace_error.is_none()),
            json!(o.trace_error),
            json!(o.round1_vulnerable),
            json!(o.rounds),
        ]);
    }
    table.summary = json!({
        "capture_rate": rate(&outcomes),
        "invalid_traces": outcomes.iter().filter(|o| o.trace_error.is_some()).count(),
        "mean_cops": outcomes.iter().map(|o| o.cops as f64).sum::<f64>() / outcomes.len() as f64,
    });
    Ok(table)
}

/// Per `n`: the first `C` in the sweep whose capture rate reaches the
/// target, and the mean number of cops it sampled. Graphs are shared
/// across the `C` values of one `n`.
pub fn scaling_sweep(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let mut table = Table::new(&["n", "c", "capture_rate", "budget", "budget_over_sqrt_n"]);
    for &n in &spec.n_grid {
        let base = trial_seed(spec.seed, n as u64);
        let mut hit = None;
        for &c in &spec.c_grid {
            let outcomes = run_trials(spec, n, c, base)?;
            let r = rate(&outcomes);
            if r >= spec.target {
                let budget = outcomes.iter().map(|o| o.cops as f64).sum::<f64>() / outcomes.len() as f64;
                hit = Some((c, r, budget));
                break;
            }
        }
        let root = (n as f64).sqrt();
        table.push(match hit {
            Some((c, r, budget)) => vec![json!(n), json!(c), json!(r), json!(budget), json!(budget / root)],
            None => vec![json!(n), Value::Null, Value::Null, Value::Null, Value::Null],
        });
    }
    let ratios: Vec<f64> = table.column("budget_over_sqrt_n").filter_map(Value::as_f64).collect();
    let spread = match (
        ratios.iter().cloned().reduce(f64::min),
        ratios.iter().cloned().reduce(f64::max),
    ) {
        (Some(lo), Some(hi)) if lo > 0.0 => Some(hi / lo),
        _ => None,
    };
    table.summary = json!({ "target": spec.target, "band": spread });
    Ok(table)
}

// ---------------------------------------------------------------------
// Expansion

fn verify_expansion(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let n = spec.n.expect("validated");
    let d = spec.degree_for(n);
    match spec.strategy_for() {
        StrategyKind::Dense => {
            let params = DenseExpansionParams {
                c: spec.expansion_c,
                d,
                tol: spec.tol,
            };
            let rows = (0..spec.trials)
                .into_par_iter()
                .map(|t| dense_expansion_row(spec, n, &params, t))
                .collect::<Result<Vec<_>, _>>()?;
            let mut table = Table::new(&["trial", "n", "edges", "probes", "passed", "failed", "worst_lower_ratio", "replay_exact"]);
            for r in rows {
                table.push(r);
            }
            let all = table.column("failed").filter(|v| v.as_u64() == Some(0)).count();
            table.summary = json!({ "seeds_all_pass": all, "trials": spec.trials });
            Ok(table)
        }
        StrategyKind::Sparse => {
            let params = SparseParams {
                eps: spec.eps,
                delta: spec.delta,
                d,
                probes: spec.probes,
            };
            let rows = (0..spec.trials)
                .into_par_iter()
                .map(|t| sparse_expansion_row(spec, n, &params, t))
                .collect::<Result<Vec<_>, _>>()?;
            let mut table = Table::new(&[
                "trial",
                "n",
                "edges",
                "low_degree",
                "low_degree_within_sqrt_n",
                "erratic",
                "q_set",
                "sphere_upper_checked",
                "sphere_upper_failed",
                "sphere_lower_pass",
                "set_sphere_lower_pass",
                "set_sphere_upper_failed",
                "accessibility_pass",
                "relaxed_probes",
                "witnesses",
                "invalid_witnesses",
            ]);
            for r in rows {
                table.push(r);
            }
            Ok(table)
        }
    }
}

fn dense_expansion_row(spec: &ExperimentSpec, n: usize, params: &DenseExpansionParams, t: u64) -> Result<Vec<Value>, CliError> {
    let seed = trial_seed(spec.seed, t);
    let g = trial_graph(spec, n, seed)?;
    let run = || -> Result<_, CliError> {
        let probes = expansion::dense_probes(&g, params.d, spec.probes, &mut trial_rng(seed, 0, Purpose::Probes));
        Ok(expansion::verify_dense_lower(&g, params, &probes)?)
    };
    let report = run()?;
    let replay = run()?;
    let worst = report.worst_lower.map(|i| report.outcomes[i].lower_ratio);
    Ok(vec![
        json!(t),
        json!(n),
        json!(g.edge_count()),
        json!(report.outcomes.len()),
        json!(report.passed),
        json!(report.failed),
        json!(worst),
        json!(report == replay),
    ])
}

fn sparse_expansion_row(spec: &ExperimentSpec, n: usize, params: &SparseParams, t: u64) -> Result<Vec<Value>, CliError> {
    let seed = trial_seed(spec.seed, t);
    let g = trial_graph(spec, n, seed)?;
    let report = expansion::sparse_report(&g, params, &mut trial_rng(seed, 0, Purpose::Probes))?;
    let mut witnesses = 0;
    let mut invalid = 0;
    for p in &report.accessibility_probes {
        if let Accessibility::Accessible(w) = &p.outcome {
            if w.family.is_empty() {
                continue;
            }
            witnesses += 1;
            let target = p.u_set.difference(&p.q.q);
            if expansion::verify_witness(&g, &target, w).is_err() {
                invalid += 1;
            }
        }
    }
    Ok(vec![
        json!(t),
        json!(n),
        json!(g.edge_count()),
        json!(report.low_degree_set.len()),
        json!(report.low_degree_within_sqrt_n),
        json!(report.erratic_set.len()),
        json!(report.q_set.len()),
        json!(report.sphere_upper.checked),
        json!(report.sphere_upper.failed()),
        json!(report.sphere_lower.pass_fraction()),
        json!(report.set_sphere_lower.pass_fraction()),
        json!(report.set_sphere_upper.failed()),
        json!(report.accessibility.pass_fraction()),
        json!(report.accessibility_probes.iter().filter(|p| p.relaxed).count()),
        json!(witnesses),
        json!(invalid),
    ])
}

// ---------------------------------------------------------------------
// Bounds and reference functions

/// Tail events matched to each bound for `X ~ Bin(n, p)` and deviation
/// `t`: `|X - np| >= t`, `|X - np| > t`, `X <= np - t`, `X >= np + t`.
fn tail_rows(n: u64, p: f64, t: f64) -> Vec<(&'static str, Result<f64, BoundError>, fn(f64, f64, f64) -> bool)> {
    let mean = n as f64 * p;
    vec![
        (
            "relative",
            bounds::chernoff_relative(mean, t / mean).map(|b| b.value),
            |x, m, t| (x - m).abs() >= t,
        ),
        (
            "additive",
            bounds::chernoff_additive(n, p, t).map(|b| b.value),
            |x, m, t| (x - m).abs() > t,
        ),
        ("lower", bounds::chernoff_lower(mean, t).map(|b| b.value), |x, m, t| x <= m - t),
        ("bernstein", bounds::bernstein_upper(mean, t).map(|b| b.value), |x, m, t| x >= m + t),
    ]
}

/// Bound values per deviation; with `--trials` above 1 also the Monte
/// Carlo frequency of the matching event and its standard error. Bounds
/// whose domain excludes the deviation are left out.
fn bounds_table(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let n = spec.n.expect("validated") as u64;
    let p = spec.p.expect("validated");
    let mean = n as f64 * p;
    let mut table = Table::new(&["form", "n", "p", "deviation", "bound", "draws", "frequency", "std_error"]);
    let draws = if spec.trials > 1 { spec.trials } else { 0 };
    let samples: Vec<Vec<f64>> = spec
        .dev
        .par_iter()
        .enumerate()
        .map(|(i, _)| {
            let bin = Binomial::new(n, p).expect("p validated");
            let mut rng = trial_rng(spec.seed, i as u64, Purpose::Aux);
            (0..draws).map(|_| bin.sample(&mut rng) as f64).collect()
        })
        .collect();
    for (i, &t) in spec.dev.iter().enumerate() {
        for (form, bound, event) in tail_rows(n, p, t) {
            let Ok(value) = bound else { continue };
            let (freq, se) = if draws > 0 {
                let hits = samples[i].iter().filter(|&&x| event(x, mean, t)).count() as f64;
                let f = hits / draws as f64;
                (Some(f), Some((f * (1.0 - f) / draws as f64).sqrt()))
            } else {
                (None, None)
            };
            table.push(vec![json!(form), json!(n), json!(p), json!(t), json!(value), json!(draws), json!(freq), json!(se)]);
        }
    }
    Ok(table)
}

/// `f(x)` at `x = k / m` for `k = 1..=m`, `m = round(1 / grid)`, so that
/// rational points such as `1/2` land exactly on the grid.
fn zigzag(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let m = (1.0 / spec.grid).round().max(1.0) as u64;
    let mut table = Table::new(&["x", "f"]);
    for k in 1..=m {
        let x = k as f64 / m as f64;
        table.push(vec![json!(x), json!(bounds::zigzag(x)?)]);
    }
    Ok(table)
}

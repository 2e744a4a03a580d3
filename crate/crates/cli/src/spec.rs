use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Gen,
    Exact,
    Simulate,
    VerifyExpansion,
    Bounds,
    Zigzag,
    Scaling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Gnp,
    Gnm,
    Regular,
}

/// Picks `d` from `n` when neither `--p` nor `--d` is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DMode {
    /// `d = log^3 n`
    Dense,
    /// `d = 1.1 log n`
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Dense,
    Sparse,
}

/// Command line. Every flag may also come from `--config FILE`, a
/// `key = value` file using the flag names; flags on the command line win.
#[derive(Debug, Clone, Parser)]
#[command(name = "cops", version, about = "Cops and robbers experiments on random graphs", args_override_self = true)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: CommandKind,
    /// key = value file with default flag values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    /// Edge count for `--model gnm`.
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long, value_enum)]
    pub d_mode: Option<DMode>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Edge-list file or built-in name (path-k, cycle-k, complete-k,
    /// star-k, grid-RxC, petersen).
    #[arg(long)]
    pub graph: Option<String>,
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Position budget for the exact solver.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Write the full win table of the cop number to this file.
    #[arg(long)]
    pub dump_table: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyKind>,
    /// Team density constant C.
    #[arg(long)]
    pub c: Option<f64>,
    /// Relative slack on the dense strategy's case threshold.
    #[arg(long)]
    pub case_tol: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub eps0: Option<f64>,
    #[arg(long)]
    pub f: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub probes: Option<usize>,
    /// Constant c of the dense lower expansion check.
    #[arg(long)]
    pub expansion_c: Option<f64>,
    /// Growth-law slack of the dense expansion check.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Deviations for `bounds`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub dev: Option<Vec<f64>>,
    #[arg(long)]
    pub grid: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub c_grid: Option<Vec<f64>>,
    /// Success rate the scaling sweep looks for.
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub horizon: Option<u32>,
    /// Directory for per-trial JSON-lines traces.
    #[arg(long)]
    pub traces: Option<PathBuf>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("invalid --{field}: {message}")]
    Field { field: &'static str, message: String },
    #[error("config file {path}: {message}")]
    Config { path: String, message: String },
}

fn bad(field: &'static str, message: impl Into<String>) -> SpecError {
    SpecError::Field {
        field,
        message: message.into(),
    }
}

/// Validated experiment description; embedded verbatim in every output
/// header. Output locations are left out so that reruns compare equal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub command: CommandKind,
    pub model: ModelKind,
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub d: Option<f64>,
    pub m: Option<u64>,
    pub d_mode: Option<DMode>,
    pub seed: u64,
    pub trials: u64,
    pub format: Format,
    pub graph: Option<String>,
    pub k_max: usize,
    pub budget: u64,
    pub strategy: Option<StrategyKind>,
    pub c: f64,
    pub case_tol: f64,
    pub eps: f64,
    pub eps0: f64,
    pub f: f64,
    pub delta: f64,
    pub probes: usize,
    pub expansion_c: f64,
    pub tol: f64,
    pub dev: Vec<f64>,
    pub grid: f64,
    pub n_grid: Vec<usize>,
    pub c_grid: Vec<f64>,
    pub target: f64,
    pub horizon: Option<u32>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub dump_table: Option<PathBuf>,
    #[serde(skip)]
    pub traces: Option<PathBuf>,
}

/// `2^(j/2)` for `j = -4..=8`: `0.25 .. 16`.
pub fn default_c_grid() -> Vec<f64> {
    (-4..=8).map(|j| 2f64.powf(j as f64 / 2.0)).collect()
}

impl ExperimentSpec {
    pub fn from_cli(cli: Cli) -> Result<Self, SpecError> {
        let spec = ExperimentSpec {
            command: cli.command,
            model: cli.model.unwrap_or(ModelKind::Gnp),
            n: cli.n,
            p: cli.p,
            d: cli.d,
            m: cli.m,
            d_mode: cli.d_mode,
            seed: cli.seed.unwrap_or(0),
            trials: cli.trials.unwrap_or(1),
            format: cli.format.unwrap_or(Format::Csv),
            graph: cli.graph,
            k_max: cli.k_max.unwrap_or(4),
            budget: cli.budget.unwrap_or(cops_core::solver::DEFAULT_BUDGET),
            strategy: cli.strategy,
            c: cli.c.unwrap_or(2.0),
            case_tol: cli.case_tol.unwrap_or(0.0),
            eps: cli.eps.unwrap_or(0.6),
            eps0: cli.eps0.unwrap_or(0.5),
            f: cli.f.unwrap_or(1.0),
            delta: cli.delta.unwrap_or(0.05),
            probes: cli.probes.unwrap_or(200),
            expansion_c: cli.expansion_c.unwrap_or(0.5),
            tol: cli.tol.unwrap_or(0.25),
            dev: cli.dev.unwrap_or_default(),
            grid: cli.grid.unwrap_or(0.01),
            n_grid: cli.n_grid.unwrap_or_default(),
            c_grid: cli.c_grid.unwrap_or_else(default_c_grid),
            target: cli.target.unwrap_or(0.9),
            horizon: cli.horizon,
            out: cli.out,
            dump_table: cli.dump_table,
            traces: cli.traces,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks every numeric field the command will use, before any work.
    pub fn validate(&self) -> Result<(), SpecError> {
        use CommandKind::*;
        let needs_model = matches!(self.command, Gen | Simulate | VerifyExpansion);
        if needs_model {
            let n = self.n.ok_or_else(|| bad("n", "required"))?;
            if n < 2 {
                return Err(bad("n", "must be at least 2"));
            }
            if self.p.is_none() && self.d.is_none() && self.m.is_none() && self.d_mode.is_none() {
                return Err(bad("d", "give one of --p, --d, --m or --d-mode"));
            }
        }
        if let Some(p) = self.p {
            if !(0.0..=1.0).contains(&p) {
                return Err(bad("p", format!("{p} outside [0, 1]")));
            }
        }
        if let Some(d) = self.d {
            if !(d > 0.0 && d.is_finite()) {
                return Err(bad("d", format!("{d} must be positive")));
            }
        }
        if self.trials == 0 {
            return Err(bad("trials", "must be at least 1"));
        }
        if self.k_max == 0 {
            return Err(bad("k-max", "must be at least 1"));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(bad("c", "must be positive"));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(bad("eps", "must lie in (0, 1)"));
        }
        if !(self.eps0 > 0.0 && self.eps0 <= 1.0) {
            return Err(bad("eps0", "must lie in (0, 1]"));
        }
        if !(self.f > 0.0) {
            return Err(bad("f", "must be positive"));
        }
        if self.command == VerifyExpansion && !(self.delta > 0.0 && self.delta < self.eps / 6.0) {
            return Err(bad("delta", "must lie in (0, eps/6)"));
        }
        if !(self.tol >= 0.0) || !(self.case_tol >= 0.0 && self.case_tol < 1.0) {
            return Err(bad("tol", "must be nonnegative"));
        }
        if !(self.grid > 0.0 && self.grid <= 1.0) {
            return Err(bad("grid", "must lie in (0, 1]"));
        }
        if !(self.target > 0.0 && self.target <= 1.0) {
            return Err(bad("target", "must lie in (0, 1]"));
        }
        match self.command {
            Exact if self.graph.is_none() => return Err(bad("graph", "required")),
            Bounds => {
                if self.n.is_none() || self.p.is_none() {
                    return Err(bad("n", "bounds needs --n and --p"));
                }
                if self.dev.is_empty() || self.dev.iter().any(|&a| !(a > 0.0)) {
                    return Err(bad("dev", "give positive deviations, comma separated"));
                }
            }
            Scaling => {
                if self.n_grid.is_empty() {
                    return Err(bad("n-grid", "required"));
                }
                if self.n_grid.windows(2).any(|w| w[0] >= w[1]) || self.n_grid[0] < 16 {
                    return Err(bad("n-grid", "must be ascending, starting at 16 or more"));
                }
                if self.c_grid.is_empty() || self.c_grid.iter().any(|&c| !(c > 0.0)) {
                    return Err(bad("c-grid", "must be positive"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Degree parameter for an `n`-vertex model: explicit `--d`, else
    /// from `--p`, `--m`, or the `--d-mode` rule.
    pub fn degree_for(&self, n: usize) -> f64 {
        let ln = (n as f64).ln();
        if let Some(d) = self.d {
            d
        } else if let Some(p) = self.p {
            p * (n - 1) as f64
        } else if let Some(m) = self.m {
            2.0 * m as f64 / n as f64
        } else {
            match self.d_mode.unwrap_or(DMode::Dense) {
                DMode::Dense => ln.powi(3),
                DMode::Sparse => 1.1 * ln,
            }
        }
    }

    pub fn strategy_for(&self) -> StrategyKind {
        self.strategy.unwrap_or(match self.d_mode {
            Some(DMode::Sparse) => StrategyKind::Sparse,
            _ => StrategyKind::Dense,
        })
    }
}

/// Turns `key = value` lines into flags: `value` `true` gives a bare
/// `--key`, blank lines and `#` comments are skipped, `_` in keys maps to
/// `-`.
pub fn config_args(path: &Path) -> Result<Vec<String>, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpecError::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| SpecError::Config {
            path: path.display().to_string(),
            message: format!("line {}: expected key = value", i + 1),
        })?;
        let key = key.trim().replace('_', "-");
        if key == "config" || key == "command" {
            return Err(SpecError::Config {
                path: path.display().to_string(),
                message: format!("line {}: {key} cannot be set from a config file", i + 1),
            });
        }
        out.push(format!("--{key}"));
        let value = value.trim();
        if value != "true" {
            out.push(value.to_string());
        }
    }
    Ok(out)
}

/// Parses `argv`, splicing in config-file flags ahead of the command-line
/// ones so that the latter override.
pub fn parse_args<I: IntoIterator<Item = String>>(argv: I) -> Result<Result<ExperimentSpec, SpecError>, clap::Error> {
    let argv: Vec<String> = argv.into_iter().collect();
    let first = Cli::try_parse_from(&argv)?;
    let Some(path) = first.config.clone() else {
        return Ok(ExperimentSpec::from_cli(first));
    };
    let extra = match config_args(&path) {
        Ok(extra) => extra,
        Err(e) => return Ok(Err(e)),
    };
    let mut merged = vec![argv[0].clone()];
    merged.extend(extra);
    merged.extend(argv.into_iter().skip(1));
    Ok(ExperimentSpec::from_cli(Cli::try_parse_from(merged)?))
}

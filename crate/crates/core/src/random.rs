//! Seeded generators for `G(n,p)`, `G(n,m)` and random `d`-regular graphs.
//!
//! All randomness comes from ChaCha8, a counter-based generator. A run is
//! keyed by a 64-bit seed; independent sub-streams are addressed by a
//! stream id, so trial `t` always draws the same numbers no matter which
//! worker thread runs it or in what order. Stream ids are laid out as
//! `(trial << 8) | purpose`, see [`Purpose`].

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Vertex};

pub type SimRng = ChaCha8Rng;

/// Which consumer inside a trial a sub-stream belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Graph = 0,
    Cops = 1,
    Robber = 2,
    Probes = 3,
    Play = 4,
    Aux = 5,
}

/// Generator for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generator for one consumer of one trial.
pub fn trial_rng(seed: u64, trial: u64, purpose: Purpose) -> SimRng {
    stream_rng(seed, (trial << 8) | purpose as u64)
}

/// Seed for trial `trial` of a run keyed by `seed` (SplitMix64 finaliser
/// over the pair), for consumers that take a whole seed rather than a
/// stream.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("edge probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("{m} edges requested but only {max} pairs exist")]
    TooManyEdges { m: u64, max: u64 },
    #[error("no simple {d}-regular graph on {n} vertices")]
    InfeasibleDegree { n: usize, d: usize },
    #[error("pairing model rejected {0} times in a row")]
    RejectionCap(usize),
}

/// Maximum pairing-model attempts before [`random_regular`] gives up.
pub const PAIRING_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Model {
    Gnp { p: f64 },
    Gnm { m: u64 },
    Regular { d: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    #[serde(flatten)]
    pub model: Model,
    pub seed: u64,
}

impl ModelParams {
    /// Binomial model with average degree `d = p (n - 1)`.
    pub fn gnp_with_degree(n: usize, d: f64, seed: u64) -> Self {
        let p = if n > 1 { (d / (n - 1) as f64).clamp(0.0, 1.0) } else { 0.0 };
        ModelParams {
            n,
            model: Model::Gnp { p },
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match self.model {
            Model::Gnp { p } if !(0.0..=1.0).contains(&p) => Err(ModelError::InvalidProbability(p)),
            Model::Gnm { m } if m > pair_count(self.n) => Err(ModelError::TooManyEdges {
                m,
                max: pair_count(self.n),
            }),
            Model::Regular { d } if d < 2 || d >= self.n.max(1) || (self.n * d) % 2 == 1 => {
                Err(ModelError::InfeasibleDegree { n: self.n, d })
            }
            _ => Ok(()),
        }
    }

    /// Samples on stream `stream` of this seed.
    pub fn generate(&self, stream: u64) -> Result<Graph, ModelError> {
        self.validate()?;
        let mut rng = stream_rng(self.seed, stream);
        match self.model {
            Model::Gnp { p } => gnp(self.n, p, &mut rng),
            Model::Gnm { m } => gnm(self.n, m, &mut rng),
            Model::Regular { d } => random_regular(self.n, d, &mut rng),
        }
    }

    pub fn expected_degree(&self) -> f64 {
        match self.model {
            Model::Gnp { p } => p * (self.n.saturating_sub(1)) as f64,
            Model::Gnm { m } => 2.0 * m as f64 / self.n.max(1) as f64,
            Model::Regular { d } => d as f64,
        }
    }
}

pub fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// `G(n,p)` by geometric skipping over the pairs `(u, v)`, `u < v`, in
/// lexicographic order: expected work `O(n + p n^2)`.
pub fn gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph, ModelError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ModelError::InvalidProbability(p));
    }
    if p == 0.0 || n < 2 {
        return Ok(Graph::empty(n));
    }
    let skip = Geometric::new(p).expect("p in (0, 1]");
    let mut edges = Vec::new();
    // Current row u and column offset within the row (v = u + 1 + col).
    let mut u: usize = 0;
    let mut col: u64 = 0;
    let mut first = true;
    loop {
        let mut advance = skip.sample(rng);
        if !first {
            advance += 1;
        }
        first = false;
        col += advance;
        while u < n - 1 && col >= (n - 1 - u) as u64 {
            col -= (n - 1 - u) as u64;
            u += 1;
        }
        if u >= n - 1 {
            break;
        }
        edges.push((u as Vertex, (u + 1) as Vertex + col as Vertex));
    }
    Ok(Graph::from_edges(n, edges).expect("generated pairs are valid"))
}

/// Uniform `G(n,m)` via a partial Fisher-Yates shuffle over pair indices.
/// Swaps are kept in a hash map so memory is `O(m)`, not `O(n^2)`.
pub fn gnm<R: Rng + ?Sized>(n: usize, m: u64, rng: &mut R) -> Result<Graph, ModelError> {
    let total = pair_count(n);
    if m > total {
        return Err(ModelError::TooManyEdges { m, max: total });
    }
    let mut swapped: HashMap<u64, u64> = HashMap::new();
    let mut edges = Vec::with_capacity(m as usize);
    for i in 0..m {
        let j = rng.random_range(i..total);
        let at_j = *swapped.get(&j).unwrap_or(&j);
        let at_i = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, at_i);
        edges.push(decode_pair(at_j));
    }
    Ok(Graph::from_edges(n, edges).expect("generated pairs are valid"))
}

/// Pair index `k = v(v-1)/2 + u` with `u < v`.
fn decode_pair(k: u64) -> (Vertex, Vertex) {
    let mut v = ((1.0 + (1.0 + 8.0 * k as f64).sqrt()) / 2.0) as u64;
    while v * (v - 1) / 2 > k {
        v -= 1;
    }
    while (v + 1) * v / 2 <= k {
        v += 1;
    }
    let u = k - v * (v - 1) / 2;
    (u as Vertex, v as Vertex)
}

/// Random simple `d`-regular graph from the pairing (configuration) model,
/// rejecting pairings with loops or repeated pairs. Uniform over labelled
/// simple `d`-regular graphs; practical for small fixed `d`.
pub fn random_regular<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Graph, ModelError> {
    if d < 2 || d >= n.max(1) || (n * d) % 2 == 1 {
        return Err(ModelError::InfeasibleDegree { n, d });
    }
    let mut points: Vec<Vertex> = (0..n as Vertex).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::with_capacity(d); n];
    'attempt: for _ in 0..PAIRING_ATTEMPTS {
        for list in &mut adj {
            list.clear();
        }
        // Uniform perfect matching: Fisher-Yates, then pair neighbours.
        for i in (1..points.len()).rev() {
            let j = rng.random_range(0..=i);
            points.swap(i, j);
        }
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || adj[u as usize].contains(&v) {
                continue 'attempt;
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        let edges = adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&v| v as usize > u).map(move |&v| (u as Vertex, v)));
        return Ok(Graph::from_edges(n, edges).expect("pairing edges are valid"));
    }
    Err(ModelError::RejectionCap(PAIRING_ATTEMPTS))
}

/// Bernoulli vertex sample: each vertex independently with probability `q`.
pub fn bernoulli_vertices<R: Rng + ?Sized>(n: usize, q: f64, rng: &mut R) -> Vec<Vertex> {
    let q = q.clamp(0.0, 1.0);
    if q == 0.0 {
        return Vec::new();
    }
    let skip = Geometric::new(q).expect("q in (0, 1]");
    let mut out = Vec::new();
    let mut pos: u64 = 0;
    loop {
        pos += skip.sample(rng);
        if pos >= n as u64 {
            break;
        }
        out.push(pos as Vertex);
        pos += 1;
    }
    out
}

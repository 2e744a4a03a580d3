//! Constructive checks of the expansion hypotheses behind the dense and
//! sparse cop strategies.
//!
//! Nothing here tries to certify a property for every vertex subset; each
//! check runs on seeded probes and keeps the probe that produced the most
//! extreme ratio, so a report can be replayed exactly. Families of disjoint
//! reservoirs (`W(w)` sets) are built greedily on the realised graph and
//! then checked by [`verify_witness`], which shares no code with the
//! builder.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{BoundError, EpsFunctions};
use crate::graph::{ball, distances, layers, set_ball, set_sphere, sphere, Graph, GraphError, Vertex, VertexSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpansionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("delta = {delta} must lie in (0, eps/6) with eps = {eps}")]
    DeltaConstraint { delta: f64, eps: f64 },
}

/// Smallest integer `>= x`, forgiving float noise just above an integer.
pub(crate) fn ceil_count(x: f64) -> usize {
    if x <= 0.0 {
        0
    } else {
        (x - 1e-9).ceil().max(0.0) as usize
    }
}

// ---------------------------------------------------------------------
// Dense lower expansion
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenseExpansionParams {
    /// Constant `c` in `|N(S, r)| >= c min(s d^r, n)`.
    pub c: f64,
    /// Density parameter `d`.
    pub d: f64,
    /// Allowed relative slack for `|N(S, r)| = (1 + o(1)) s d^r`.
    pub tol: f64,
}

impl DenseExpansionParams {
    pub fn new(c: f64, d: f64) -> Self {
        DenseExpansionParams { c, d, tol: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseProbe {
    pub set: VertexSet,
    pub radius: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseProbeOutcome {
    pub probe: DenseProbe,
    pub union_size: usize,
    /// `union / min(s d^r, n)`.
    pub lower_ratio: f64,
    pub lower_ok: bool,
    /// `union / (s d^r)` when `s d^r < n / log n`.
    pub growth_ratio: Option<f64>,
    pub growth_ok: Option<bool>,
}

impl DenseProbeOutcome {
    pub fn passed(&self) -> bool {
        self.lower_ok && self.growth_ok.unwrap_or(true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLowerReport {
    pub params: DenseExpansionParams,
    pub outcomes: Vec<DenseProbeOutcome>,
    pub passed: usize,
    pub failed: usize,
    /// Index into `outcomes` of the smallest `lower_ratio`.
    pub worst_lower: Option<usize>,
    /// Index into `outcomes` of the growth ratio farthest from 1.
    pub worst_growth: Option<usize>,
}

impl DenseLowerReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

/// Seeded probes: set sizes cycle through `1, 2, 4, ...` (capped at `n`),
/// radius uniform in `0..=R` where `R` is the first radius with
/// `s d^R >= n`.
pub fn dense_probes<R: Rng + ?Sized>(g: &Graph, d: f64, count: usize, rng: &mut R) -> Vec<DenseProbe> {
    let n = g.n();
    if n == 0 {
        return Vec::new();
    }
    let mut sizes = Vec::new();
    let mut s = 1usize;
    while s <= n {
        sizes.push(s);
        s *= 2;
    }
    (0..count)
        .map(|i| {
            let s = sizes[i % sizes.len()];
            let mut r_max = 0u32;
            while (s as f64) * d.powi(r_max as i32) < n as f64 && r_max < 64 && d > 1.0 {
                r_max += 1;
            }
            let radius = rng.random_range(0..=r_max.max(1));
            let set: VertexSet = sample(rng, n, s).into_iter().map(|v| v as Vertex).collect();
            DenseProbe { set, radius }
        })
        .collect()
}

/// Evaluates one probe. Deterministic in `(g, params, probe)`.
pub fn dense_probe(g: &Graph, params: &DenseExpansionParams, probe: &DenseProbe) -> Result<DenseProbeOutcome, GraphError> {
    let n = g.n() as f64;
    let s = probe.set.len() as f64;
    let union_size = set_ball(g, &probe.set, probe.radius)?.len();
    let sdr = s * params.d.powi(probe.radius as i32);
    let lower_ratio = union_size as f64 / sdr.min(n);
    let lower_ok = union_size as f64 >= params.c * sdr.min(n);
    let (growth_ratio, growth_ok) = if sdr < n / n.ln() {
        let ratio = union_size as f64 / sdr;
        (Some(ratio), Some((ratio - 1.0).abs() <= params.tol))
    } else {
        (None, None)
    };
    Ok(DenseProbeOutcome {
        probe: probe.clone(),
        union_size,
        lower_ratio,
        lower_ok,
        growth_ratio,
        growth_ok,
    })
}

/// Checks `|N(S, r)| >= c min(s d^r, n)` on every probe, plus the
/// `(1 +- tol) s d^r` growth law where `s d^r < n / log n`.
pub fn verify_dense_lower(
    g: &Graph,
    params: &DenseExpansionParams,
    probes: &[DenseProbe],
) -> Result<DenseLowerReport, GraphError> {
    let outcomes = probes
        .iter()
        .map(|p| dense_probe(g, params, p))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    let worst_lower = (0..outcomes.len()).min_by(|&a, &b| outcomes[a].lower_ratio.total_cmp(&outcomes[b].lower_ratio));
    let worst_growth = (0..outcomes.len())
        .filter(|&i| outcomes[i].growth_ratio.is_some())
        .max_by(|&a, &b| {
            let dev = |i: usize| (outcomes[i].growth_ratio.unwrap() - 1.0).abs();
            dev(a).total_cmp(&dev(b))
        });
    Ok(DenseLowerReport {
        params: *params,
        failed: outcomes.len() - passed,
        passed,
        outcomes,
        worst_lower,
        worst_growth,
    })
}

// ---------------------------------------------------------------------
// Disjoint sphere families
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereFamily {
    pub anchor: Vertex,
    pub radius: u32,
    /// `(u, W(u))` for each `u` in `S(anchor, radius)`, ascending `u`.
    pub members: Vec<(Vertex, VertexSet)>,
    pub min_size: usize,
    pub max_size: usize,
    /// `min |W(u)| / d^(r+1)`.
    pub min_ratio: f64,
}

/// Greedy disjoint family `{W(u) ⊆ S(u, r+1) : u ∈ S(v, r)}`: members in
/// ascending id claim every vertex of their sphere that is still free and
/// lies outside `N(v, r)`.
pub fn build_disjoint_sphere_family(g: &Graph, v: Vertex, r: u32, d: f64) -> Result<SphereFamily, GraphError> {
    g.check(v)?;
    let inner = layers(g, &[v], r);
    let mut blocked = vec![false; g.n()];
    for &x in inner.iter().flatten() {
        blocked[x as usize] = true;
    }
    let shell = inner.get(r as usize).cloned().unwrap_or_default();
    let mut members = Vec::with_capacity(shell.len());
    for &u in &shell {
        let mut w: Vec<Vertex> = layers(g, &[u], r + 1)
            .into_iter()
            .nth(r as usize + 1)
            .unwrap_or_default()
            .into_iter()
            .filter(|&x| !blocked[x as usize])
            .collect();
        w.sort_unstable();
        for &x in &w {
            blocked[x as usize] = true;
        }
        members.push((u, VertexSet::from_sorted(w)));
    }
    let min_size = members.iter().map(|(_, w)| w.len()).min().unwrap_or(0);
    let max_size = members.iter().map(|(_, w)| w.len()).max().unwrap_or(0);
    Ok(SphereFamily {
        anchor: v,
        radius: r,
        min_ratio: min_size as f64 / d.powi(r as i32 + 1),
        members,
        min_size,
        max_size,
    })
}

// ---------------------------------------------------------------------
// Accessibility
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccessibilityWitness {
    pub t: u32,
    pub c1: f64,
    pub c2: f64,
    pub d: f64,
    /// Minimum size every `W(w)` must reach.
    pub required: usize,
    /// `(w, W(w))` for each `w` in the certified set, ascending `w`.
    pub family: Vec<(Vertex, VertexSet)>,
}

impl AccessibilityWitness {
    pub fn certified_set(&self) -> VertexSet {
        self.family.iter().map(|(w, _)| *w).collect()
    }

    pub fn min_size(&self) -> usize {
        self.family.iter().map(|(_, s)| s.len()).min().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Accessibility {
    Accessible(AccessibilityWitness),
    /// The first member (ascending) whose reservoir stayed too small, with
    /// the partial family for inspection.
    Blocked {
        vertex: Vertex,
        size: usize,
        partial: AccessibilityWitness,
    },
}

/// `ceil(c1 min(d^t, c2 n / |U|))`.
pub fn accessibility_required(n: usize, set_size: usize, t: u32, c1: f64, c2: f64, d: f64) -> usize {
    if set_size == 0 {
        return 0;
    }
    let share = c2 * n as f64 / set_size as f64;
    ceil_count(c1 * d.powi(t as i32).min(share))
}

/// Grows pairwise disjoint trees rooted at the members, one BFS layer per
/// member per round (members in ascending order), for `t` rounds. A tree
/// stops growing once it holds `cap` vertices. Every member owns at least
/// its own vertex; vertices are claimed by the first tree that reaches
/// them.
pub fn grow_disjoint_family(g: &Graph, members: &VertexSet, t: u32, cap: usize) -> Vec<(Vertex, Vec<Vertex>)> {
    let mut owner = vec![u32::MAX; g.n()];
    let mut trees: Vec<Vec<Vertex>> = Vec::with_capacity(members.len());
    let mut frontiers: Vec<Vec<Vertex>> = Vec::with_capacity(members.len());
    for (i, w) in members.iter().enumerate() {
        owner[w as usize] = i as u32;
        trees.push(vec![w]);
        frontiers.push(vec![w]);
    }
    for _ in 0..t {
        for i in 0..trees.len() {
            if trees[i].len() >= cap || frontiers[i].is_empty() {
                frontiers[i].clear();
                continue;
            }
            let mut next = Vec::new();
            'grow: for &x in &frontiers[i] {
                for &y in g.neighbors(x) {
                    if owner[y as usize] == u32::MAX {
                        owner[y as usize] = i as u32;
                        trees[i].push(y);
                        next.push(y);
                        if trees[i].len() >= cap {
                            break 'grow;
                        }
                    }
                }
            }
            frontiers[i] = next;
        }
    }
    members
        .iter()
        .zip(trees)
        .map(|(w, mut tree)| {
            tree.sort_unstable();
            (w, tree)
        })
        .collect()
}

/// Tries to certify that `u_set` is `(t, c1, c2)`-accessible by growing
/// disjoint trees capped at the required size.
pub fn accessibility_check(
    g: &Graph,
    u_set: &VertexSet,
    t: u32,
    c1: f64,
    c2: f64,
    d: f64,
) -> Result<Accessibility, GraphError> {
    if u_set.is_empty() {
        return Err(GraphError::EmptySource);
    }
    for w in u_set {
        g.check(w)?;
    }
    let required = accessibility_required(g.n(), u_set.len(), t, c1, c2, d);
    let grown = grow_disjoint_family(g, u_set, t, required.max(1));
    let witness = AccessibilityWitness {
        t,
        c1,
        c2,
        d,
        required,
        family: grown
            .into_iter()
            .map(|(w, tree)| (w, VertexSet::from_sorted(tree)))
            .collect(),
    };
    let short = witness.family.iter().find(|(_, s)| s.len() < required);
    Ok(match short {
        None => Accessibility::Accessible(witness),
        Some((w, s)) => Accessibility::Blocked {
            vertex: *w,
            size: s.len(),
            partial: witness.clone(),
        },
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessDefect {
    #[error("family members {found:?} differ from the certified set")]
    WrongMembers { found: Vec<Vertex> },
    #[error("vertex {vertex} claimed by both {first} and {second}")]
    Overlap { vertex: Vertex, first: Vertex, second: Vertex },
    #[error("vertex {vertex} in W({owner}) lies farther than {t} from it")]
    OutOfRadius { vertex: Vertex, owner: Vertex, t: u32 },
    #[error("W({owner}) has {size} vertices, needs {required}")]
    TooSmall { owner: Vertex, size: usize, required: usize },
    #[error("vertex {0} out of range")]
    BadVertex(Vertex),
}

/// Independent re-check of an accessibility witness for `u_set`: member
/// set, pairwise disjointness, radius containment by fresh BFS, and size
/// against a freshly computed requirement.
pub fn verify_witness(g: &Graph, u_set: &VertexSet, w: &AccessibilityWitness) -> Result<(), WitnessDefect> {
    let members: Vec<Vertex> = w.family.iter().map(|(m, _)| *m).collect();
    if members.as_slice() != u_set.as_slice() {
        return Err(WitnessDefect::WrongMembers { found: members });
    }
    let mut claimed: Vec<Option<Vertex>> = vec![None; g.n()];
    let share = w.c2 * g.n() as f64 / u_set.len().max(1) as f64;
    let needed = w.c1 * w.d.powf(w.t as f64).min(share);
    for (owner, set) in &w.family {
        let reach = ball(g, *owner, w.t).map_err(|_| WitnessDefect::BadVertex(*owner))?;
        for x in set {
            if x as usize >= g.n() {
                return Err(WitnessDefect::BadVertex(x));
            }
            if let Some(first) = claimed[x as usize] {
                return Err(WitnessDefect::Overlap {
                    vertex: x,
                    first,
                    second: *owner,
                });
            }
            claimed[x as usize] = Some(*owner);
            if !reach.contains(x) {
                return Err(WitnessDefect::OutOfRadius {
                    vertex: x,
                    owner: *owner,
                    t: w.t,
                });
            }
        }
        if (set.len() as f64) < needed - 1e-9 {
            return Err(WitnessDefect::TooSmall {
                owner: *owner,
                size: set.len(),
                required: needed.ceil() as usize,
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------
// The Q set
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QSetReport {
    pub anchor: Vertex,
    pub r: u32,
    pub r_prime: u32,
    pub q: VertexSet,
    /// `max_{a in S(v,r)} |S(a, r') ∩ Q|`.
    pub max_hits: usize,
    /// `2 * 9 d^{r'} n^{-1/54}`.
    pub bound: f64,
    /// `max_hits / (d^{r'} n^{-1/54})`.
    pub measured_constant: f64,
    pub within_bound: bool,
}

/// Builds `Q` from a BFS tree rooted at `v` (queue order, neighbours in
/// ascending id, each vertex's parent is its first discoverer): `Q` holds
/// the vertices within distance `r + r'` of `v` that have fewer than
/// `2d/3` children in that tree. Also measures `|S(a, r') ∩ Q|` over
/// `a ∈ S(v, r)`.
pub fn q_set_construction(g: &Graph, v: Vertex, r: u32, r_prime: u32, d: f64) -> Result<QSetReport, GraphError> {
    g.check(v)?;
    let depth = r + r_prime;
    let n = g.n();
    let mut dist: Vec<Option<u32>> = vec![None; n];
    let mut children = vec![0usize; n];
    let mut order = vec![v];
    dist[v as usize] = Some(0);
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        let du = dist[u as usize].unwrap();
        if du > depth {
            continue;
        }
        for &w in g.neighbors(u) {
            if dist[w as usize].is_none() {
                dist[w as usize] = Some(du + 1);
                children[u as usize] += 1;
                order.push(w);
            }
        }
    }
    let threshold = 2.0 * d / 3.0;
    let q: VertexSet = order
        .iter()
        .copied()
        .filter(|&w| dist[w as usize].is_some_and(|dw| dw <= depth) && (children[w as usize] as f64) < threshold)
        .collect();
    let shell = sphere(g, v, r)?;
    let max_hits = shell
        .iter()
        .map(|a| {
            layers(g, &[a], r_prime)
                .get(r_prime as usize)
                .map_or(0, |layer| layer.iter().filter(|&&x| q.contains(x)).count())
        })
        .max()
        .unwrap_or(0);
    let scale = d.powi(r_prime as i32) * (n as f64).powf(-1.0 / 54.0);
    let bound = 2.0 * 9.0 * scale;
    Ok(QSetReport {
        anchor: v,
        r,
        r_prime,
        q,
        max_hits,
        bound,
        measured_constant: max_hits as f64 / scale,
        within_bound: max_hits as f64 <= bound,
    })
}

// ---------------------------------------------------------------------
// Sparse report
// ---------------------------------------------------------------------

/// Constants of the sparse strategy's hypotheses. Defaults follow the
/// mapping `a1 = eps g(eps) / 4`, `a2 = 9`, `a3 = 1/9`, `a4 = 1/50`,
/// `a5 = 1/9`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparseConstants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
}

impl SparseConstants {
    pub fn from_eps(f: &EpsFunctions) -> Self {
        SparseConstants {
            a1: f.set_sphere_lower(),
            a2: 9.0,
            a3: 1.0 / 9.0,
            a4: 1.0 / 50.0,
            a5: 1.0 / 9.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparseParams {
    pub eps: f64,
    pub delta: f64,
    pub d: f64,
    pub probes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extreme {
    pub v: Vertex,
    pub r: u32,
    pub r_prime: Option<u32>,
    pub subset: Option<VertexSet>,
    pub measured: usize,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConditionStats {
    pub checked: usize,
    pub passed: usize,
    pub skipped: usize,
    pub worst: Option<Extreme>,
}

impl ConditionStats {
    pub fn failed(&self) -> usize {
        self.checked - self.passed
    }

    pub fn pass_fraction(&self) -> f64 {
        if self.checked == 0 {
            1.0
        } else {
            self.passed as f64 / self.checked as f64
        }
    }

    /// Records one check; `ratio` is measured / bound, and the extreme kept
    /// is the minimum ratio for lower bounds or the maximum for upper ones.
    fn record(&mut self, ok: bool, extreme: Extreme, upper: bool) {
        self.checked += 1;
        if ok {
            self.passed += 1;
        }
        let replace = match &self.worst {
            None => true,
            Some(w) if upper => extreme.ratio > w.ratio,
            Some(w) => extreme.ratio < w.ratio,
        };
        if replace {
            self.worst = Some(extreme);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccessibilityProbe {
    pub v: Vertex,
    pub r: u32,
    pub r_prime: u32,
    /// Radii chosen outside the strict `(d+1) d^r` window because no
    /// radius fits it at this `n`.
    pub relaxed: bool,
    pub a_set: VertexSet,
    pub u_set: VertexSet,
    pub q: QSetReport,
    pub outcome: Accessibility,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseExpansionReport {
    pub params: SparseParams,
    pub eps_functions: EpsFunctions,
    pub constants: SparseConstants,
    pub n: usize,
    /// Vertices of degree at most `eps g(eps) d`.
    pub low_degree_set: VertexSet,
    pub low_degree_within_sqrt_n: bool,
    /// Vertices breaking the `9 d^r` sphere upper bound at some radius.
    pub erratic_set: VertexSet,
    /// Union of the `Q` sets built for accessibility probes.
    pub q_set: VertexSet,
    pub sphere_upper: ConditionStats,
    pub sphere_lower: ConditionStats,
    pub accessibility: ConditionStats,
    pub set_sphere_lower: ConditionStats,
    pub set_sphere_upper: ConditionStats,
    pub accessibility_probes: Vec<AccessibilityProbe>,
    pub warnings: Vec<String>,
}

fn radii_below(d: f64, limit: f64) -> Vec<u32> {
    let mut out = Vec::new();
    let mut r = 1u32;
    while d > 1.0 && d.powi(r as i32) < limit && r < 64 {
        out.push(r);
        r += 1;
    }
    out
}

/// Runs the sparse expansion checks:
///
/// * sphere upper bound `|S(v,r)| <= 9 d^r` for every vertex and every
///   `r >= 1` with `d^r < n / log n`;
/// * sphere lower bound `|S(v,r)| > (eps/e)^2 d^r` for probed `v ∉ D`;
/// * set-sphere bounds `a1 k d^{r'} <= |S(V',r')| <= 9 k d^{r'}` for probed
///   `V' ⊆ N(v,r) \ D`;
/// * accessibility of `U \ Q` with constants `(1/50, 1/9)` for probed
///   `A ⊆ S(v,r)`.
pub fn sparse_report<R: Rng + ?Sized>(g: &Graph, params: &SparseParams, rng: &mut R) -> Result<SparseExpansionReport, ExpansionError> {
    let SparseParams { eps, delta, d, probes } = *params;
    if !(delta > 0.0 && delta < eps / 6.0) {
        return Err(ExpansionError::DeltaConstraint { delta, eps });
    }
    let ef = EpsFunctions::new(eps, 1e-12)?;
    let constants = SparseConstants::from_eps(&ef);
    let n = g.n();
    let nf = n as f64;
    let ln_n = nf.ln();
    let mut warnings = Vec::new();
    if d < (0.5 + eps) * ln_n || d > ln_n.powi(3) {
        warnings.push(format!(
            "d = {d:.3} outside [(1/2 + eps) log n, log^3 n] = [{:.3}, {:.3}]",
            (0.5 + eps) * ln_n,
            ln_n.powi(3)
        ));
    }

    let threshold = ef.degree_threshold(d);
    let low_degree_set: VertexSet = g.vertices().filter(|&v| (g.degree(v) as f64) <= threshold).collect();
    let outside_d: Vec<Vertex> = g.vertices().filter(|&v| !low_degree_set.contains(v)).collect();

    // Sphere upper bound, exhaustively over vertices.
    let upper_radii = radii_below(d, nf / ln_n);
    let r_top = upper_radii.last().copied().unwrap_or(0);
    let mut sphere_upper = ConditionStats::default();
    let mut erratic = Vec::new();
    for v in g.vertices() {
        let ls = layers(g, &[v], r_top);
        let mut bad = false;
        for &r in &upper_radii {
            let size = ls.get(r as usize).map_or(0, Vec::len);
            let bound = 9.0 * d.powi(r as i32);
            let ok = size as f64 <= bound;
            bad |= !ok;
            sphere_upper.record(
                ok,
                Extreme {
                    v,
                    r,
                    r_prime: None,
                    subset: None,
                    measured: size,
                    bound,
                    ratio: size as f64 / bound,
                },
                true,
            );
        }
        if bad {
            erratic.push(v);
        }
    }

    // Sphere lower bound on probed vertices outside D.
    let mut sphere_lower = ConditionStats::default();
    if outside_d.is_empty() {
        sphere_lower.skipped += probes;
    }
    for _ in 0..probes {
        if outside_d.is_empty() {
            break;
        }
        let v = outside_d[rng.random_range(0..outside_d.len())];
        let ls = layers(g, &[v], r_top);
        for &r in &upper_radii {
            let size = ls.get(r as usize).map_or(0, Vec::len);
            let bound = ef.sphere_lower() * d.powi(r as i32);
            sphere_lower.record(
                size as f64 > bound,
                Extreme {
                    v,
                    r,
                    r_prime: None,
                    subset: None,
                    measured: size,
                    bound,
                    ratio: size as f64 / bound,
                },
                false,
            );
        }
    }

    // Set-sphere bounds.
    let near_radii = radii_below(d, nf.powf(0.5 + delta));
    let mut set_lower = ConditionStats::default();
    let mut set_upper = ConditionStats::default();
    for _ in 0..probes {
        if outside_d.is_empty() || near_radii.is_empty() {
            set_lower.skipped += 1;
            set_upper.skipped += 1;
            continue;
        }
        let v = outside_d[rng.random_range(0..outside_d.len())];
        let r = near_radii[rng.random_range(0..near_radii.len())];
        let r_prime = near_radii[rng.random_range(0..near_radii.len())];
        let pool: Vec<Vertex> = ball(g, v, r)?.iter().filter(|&x| !low_degree_set.contains(x)).collect();
        let k_cap = ((nf / ln_n) / d.powi(r_prime as i32)).floor() as usize;
        let k_max = k_cap.min(pool.len());
        if k_max == 0 {
            set_lower.skipped += 1;
            set_upper.skipped += 1;
            continue;
        }
        let k = rng.random_range(1..=k_max);
        let subset: VertexSet = sample(rng, pool.len(), k).into_iter().map(|i| pool[i]).collect();
        let size = set_sphere(g, &subset, r_prime)?.len();
        let scale = k as f64 * d.powi(r_prime as i32);
        let lo = constants.a1 * scale;
        let hi = constants.a2 * scale;
        let extreme = |bound: f64| Extreme {
            v,
            r,
            r_prime: Some(r_prime),
            subset: Some(subset.clone()),
            measured: size,
            bound,
            ratio: size as f64 / bound,
        };
        set_lower.record(size as f64 >= lo, extreme(lo), false);
        set_upper.record(size as f64 <= hi, extreme(hi), true);
    }

    // Accessibility of U \ Q.
    let mut accessibility = ConditionStats::default();
    let mut access_probes = Vec::new();
    let mut q_union = VertexSet::new();
    let a_floor = nf.powf(0.25 - delta);
    let window = |r: u32| {
        let x = (d + 1.0) * d.powi(r as i32);
        x > a_floor && x < nf.powf(0.25 + delta)
    };
    let strict: Vec<u32> = (0..16).filter(|&r| window(r)).collect();
    // `A ⊆ S(v, r)` must exceed the floor, which rules out `r = 0`.
    let strict_r: Vec<u32> = strict.iter().copied().filter(|&r| r >= 1).collect();
    for _ in 0..probes {
        if outside_d.is_empty() {
            accessibility.skipped += 1;
            continue;
        }
        let v = outside_d[rng.random_range(0..outside_d.len())];
        let probe = if strict_r.is_empty() {
            relaxed_access_probe(g, v, d, rng)?
        } else {
            let r = strict_r[rng.random_range(0..strict_r.len())];
            let r_prime = strict[rng.random_range(0..strict.len())];
            strict_access_probe(g, v, r, r_prime, d, a_floor, rng)?
        };
        let Some((r, r_prime, relaxed, a_set, u_set)) = probe else {
            accessibility.skipped += 1;
            continue;
        };
        let q = q_set_construction(g, v, r, r_prime, d)?;
        q_union = q_union.union(&q.q);
        let target = u_set.difference(&q.q);
        let t = r + r_prime + 1;
        let outcome = if target.is_empty() {
            // Nothing left to certify; an empty family is trivially valid.
            Accessibility::Accessible(AccessibilityWitness {
                t,
                c1: constants.a4,
                c2: constants.a5,
                d,
                required: 0,
                family: Vec::new(),
            })
        } else {
            accessibility_check(g, &target, t, constants.a4, constants.a5, d)?
        };
        let (ok, measured, required) = match &outcome {
            Accessibility::Accessible(w) => (true, w.min_size(), w.required),
            Accessibility::Blocked { size, partial, .. } => (false, *size, partial.required),
        };
        let ok = ok && q.within_bound;
        accessibility.record(
            ok,
            Extreme {
                v,
                r,
                r_prime: Some(r_prime),
                subset: Some(a_set.clone()),
                measured,
                bound: required as f64,
                ratio: if required == 0 { f64::INFINITY } else { measured as f64 / required as f64 },
            },
            false,
        );
        access_probes.push(AccessibilityProbe {
            v,
            r,
            r_prime,
            relaxed,
            a_set,
            u_set,
            q,
            outcome,
        });
    }
    if strict_r.is_empty() && probes > 0 {
        warnings.push(format!(
            "no radius r has n^(1/4-delta) < (d+1) d^r < n^(1/4+delta) at n = {n}; accessibility probes use relaxed radii"
        ));
    }

    Ok(SparseExpansionReport {
        params: *params,
        eps_functions: ef,
        constants,
        n,
        low_degree_within_sqrt_n: low_degree_set.len() as f64 <= nf.sqrt(),
        low_degree_set,
        erratic_set: VertexSet::from_sorted(erratic),
        q_set: q_union,
        sphere_upper,
        sphere_lower,
        accessibility,
        set_sphere_lower: set_lower,
        set_sphere_upper: set_upper,
        accessibility_probes: access_probes,
        warnings,
    })
}

type ProbeShape = Option<(u32, u32, bool, VertexSet, VertexSet)>;

/// `U = ∪_{a ∈ A} S(a, r')`.
fn sphere_union(g: &Graph, a_set: &VertexSet, r_prime: u32) -> VertexSet {
    a_set
        .iter()
        .flat_map(|a| layers(g, &[a], r_prime).into_iter().nth(r_prime as usize).unwrap_or_default())
        .collect()
}

/// Shrinks `A` (dropping its largest ids) until `d^{r+r'} < n / (9 |U|)`;
/// gives up below `min_len`.
fn fit_a_set(g: &Graph, mut a: Vec<Vertex>, r_prime: u32, scale: f64, min_len: usize) -> Option<(VertexSet, VertexSet)> {
    let n = g.n() as f64;
    while a.len() >= min_len.max(1) {
        let a_set = VertexSet::from_sorted(a.clone());
        let u = sphere_union(g, &a_set, r_prime);
        if !u.is_empty() && scale < n / (9.0 * u.len() as f64) {
            return Some((a_set, u));
        }
        a.pop();
    }
    None
}

fn strict_access_probe<R: Rng + ?Sized>(
    g: &Graph,
    v: Vertex,
    r: u32,
    r_prime: u32,
    d: f64,
    a_floor: f64,
    rng: &mut R,
) -> Result<ProbeShape, GraphError> {
    let shell = sphere(g, v, r)?;
    let min_len = a_floor.floor() as usize + 1;
    if shell.len() < min_len {
        return Ok(None);
    }
    let size = rng.random_range(min_len..=shell.len());
    let mut a: Vec<Vertex> = sample(rng, shell.len(), size).into_iter().map(|i| shell.as_slice()[i]).collect();
    a.sort_unstable();
    Ok(fit_a_set(g, a, r_prime, d.powi((r + r_prime) as i32), min_len).map(|(a, u)| (r, r_prime, false, a, u)))
}

/// Fallback when no radius `r >= 1` fits the strict window: `r = 1` and the
/// largest `r'` in `{1, 0}` for which some nonempty `A ⊆ S(v, 1)` meets
/// `d^{r+r'} < n / (9|U|)`.
fn relaxed_access_probe<R: Rng + ?Sized>(g: &Graph, v: Vertex, d: f64, rng: &mut R) -> Result<ProbeShape, GraphError> {
    let shell = sphere(g, v, 1)?;
    if shell.is_empty() {
        return Ok(None);
    }
    let size = rng.random_range(1..=shell.len());
    let mut a: Vec<Vertex> = sample(rng, shell.len(), size).into_iter().map(|i| shell.as_slice()[i]).collect();
    a.sort_unstable();
    for r_prime in [1u32, 0] {
        if let Some((a_set, u)) = fit_a_set(g, a.clone(), r_prime, d.powi(1 + r_prime as i32), 1) {
            return Ok(Some((1, r_prime, true, a_set, u)));
        }
    }
    Ok(None)
}

/// Distances from `v`, used by tests to recount probe results by a route
/// independent of the layered BFS.
pub fn distance_profile(g: &Graph, v: Vertex) -> Vec<Option<u32>> {
    distances(g, &[v], None)
}

//! Random SMCM ensembles and exact witness scans.
//!
//! Graphs are drawn over a causal ordering `v_0 .. v_{p-1}`: the directed edge
//! `v_i -> v_j` (i < j) appears with probability 0.5 for early targets and
//! `d / j` afterwards, so late nodes have expected in-degree `d`; each pair
//! gains a bidirected edge with probability `q / p`. The outcome is the last
//! node, the treatment is a uniformly random non-parent ancestor of the
//! outcome (optionally also excluding grandparents), and a treatment-outcome
//! bidirected edge is forced.
//!
//! [`scan_graph`] then searches for a witness `(Z, Z_i, Z_o)` certifying the
//! generalized front-door conditions via exact m-separation:
//! `B ⊥ Y | T ∪ Z`, `Z_i ⊥ T`, and `Z_o ⊥ T | B ∪ Z_i`.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, NodeId, NodeSet, Smcm};
use crate::rng::stream;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnsembleError {
    #[error("no eligible treatment found in {0} consecutive draws")]
    ResampleExhausted(usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Which ancestors of the outcome are eligible as treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Treatment may not be a parent or a grandparent of the outcome.
    NoGrandparent,
    /// Treatment may not be a parent of the outcome.
    NoParent,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::NoGrandparent => write!(f, "no-grandparent"),
            Variant::NoParent => write!(f, "no-parent"),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "no-grandparent" => Ok(Variant::NoGrandparent),
            "no-parent" => Ok(Variant::NoParent),
            other => Err(format!("unknown variant `{other}`")),
        }
    }
}

/// Parameters of the random ensemble.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnsembleParams {
    /// Observed node count (>= 4).
    pub p: usize,
    /// Expected in-degree of late nodes (d <= p/2).
    pub d: usize,
    /// Bidirected intensity; each pair gets a bidirected edge w.p. q/p.
    pub q: f64,
    pub variant: Variant,
    /// Size cap used for the bounded scan (default 5).
    pub max_subset_size: Option<usize>,
    pub seed: u64,
}

impl EnsembleParams {
    pub fn validate(&self) -> Result<(), EnsembleError> {
        if self.p < 4 {
            return Err(EnsembleError::InvalidParams("p must be >= 4".into()));
        }
        if 2 * self.d > self.p {
            return Err(EnsembleError::InvalidParams("d must be <= p/2".into()));
        }
        if !(0.0..=self.p as f64).contains(&self.q) {
            return Err(EnsembleError::InvalidParams("q must be in [0, p]".into()));
        }
        Ok(())
    }
}

/// A sampled graph together with the number of rejected draws before it.
#[derive(Debug, Clone)]
pub struct SampledGraph {
    pub graph: Smcm,
    pub redraws: usize,
}

const RESAMPLE_LIMIT: usize = 1000;

/// Draws one graph with roles, redrawing (up to 1000 times) whenever no
/// eligible treatment exists.
pub fn sample_smcm(
    params: &EnsembleParams,
    rng: &mut impl Rng,
) -> Result<SampledGraph, EnsembleError> {
    params.validate()?;
    for attempt in 0..RESAMPLE_LIMIT {
        if let Some(graph) = try_draw(params, rng)? {
            return Ok(SampledGraph {
                graph,
                redraws: attempt,
            });
        }
    }
    Err(EnsembleError::ResampleExhausted(RESAMPLE_LIMIT))
}

type EdgeList = Vec<(NodeId, NodeId)>;

fn draw_edges(params: &EnsembleParams, rng: &mut impl Rng) -> (EdgeList, EdgeList) {
    let p = params.p;
    let d = params.d;
    let mut directed = Vec::new();
    for j in 1..p {
        // 0-based: node j is the (j+1)-th in the causal order.
        let prob = if j < 2 * d { 0.5 } else { d as f64 / j as f64 };
        for i in 0..j {
            if rng.gen::<f64>() < prob {
                directed.push((i, j));
            }
        }
    }
    let mut bidirected = Vec::new();
    let q_pair = params.q / p as f64;
    for i in 0..p {
        for j in (i + 1)..p {
            if rng.gen::<f64>() < q_pair {
                bidirected.push((i, j));
            }
        }
    }
    (directed, bidirected)
}

fn try_draw(params: &EnsembleParams, rng: &mut impl Rng) -> Result<Option<Smcm>, EnsembleError> {
    let p = params.p;
    let (directed, mut bidirected) = draw_edges(params, rng);
    let g = Smcm::new(p, directed.clone(), bidirected.clone())?;
    let y = p - 1;
    let parents_y = g.parents(y);
    let mut excluded = parents_y;
    if params.variant == Variant::NoGrandparent {
        for w in parents_y.iter() {
            excluded = excluded.union(g.parents(w));
        }
    }
    let eligible: Vec<NodeId> = g
        .ancestors(y)?
        .difference(excluded)
        .iter()
        .collect();
    if eligible.is_empty() {
        return Ok(None);
    }
    let t = eligible[rng.gen_range(0..eligible.len())];
    if !g.has_bidirected(t, y) {
        bidirected.push((t.min(y), t.max(y)));
    }
    let g = Smcm::new(p, directed, bidirected)?.with_roles(t, y)?;
    Ok(Some(g))
}

#[cfg(test)]
fn raw_in_degree(params: &EnsembleParams, node: NodeId, rng: &mut impl Rng) -> usize {
    let (directed, _) = draw_edges(params, rng);
    directed.iter().filter(|&&(_, j)| j == node).count()
}

/// A certified witness: `z` splits into `z_i` and `z_o`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    pub z: NodeSet,
    pub z_i: NodeSet,
    pub z_o: NodeSet,
}

/// Result of a witness scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOutcome {
    pub success: bool,
    pub witness: Option<Witness>,
}

/// Candidate sets for a graph with roles: every node except T, Y, and B.
pub fn candidate_pool(g: &Smcm) -> Result<Vec<NodeId>, GraphError> {
    let roles = g.roles().ok_or(GraphError::MissingRoles)?;
    Ok((0..g.n_nodes())
        .filter(|&v| v != roles.treatment && v != roles.outcome && !roles.children.contains(v))
        .collect())
}

/// Scans subsets of the candidate pool (size <= `max_size`, increasing size
/// then lexicographic; partitions by Z_o subset rank) and returns the first
/// witness in that order, if any.
pub fn scan_graph(g: &Smcm, max_size: Option<usize>) -> Result<ScanOutcome, GraphError> {
    let mut first = None;
    scan_impl(g, max_size, &mut |w| {
        first = Some(w);
        false // stop at the first witness
    })?;
    Ok(ScanOutcome {
        success: first.is_some(),
        witness: first,
    })
}

/// Like [`scan_graph`] but collects every witness in canonical order.
pub fn scan_graph_all(g: &Smcm, max_size: Option<usize>) -> Result<Vec<Witness>, GraphError> {
    let mut all = Vec::new();
    scan_impl(g, max_size, &mut |w| {
        all.push(w);
        true
    })?;
    Ok(all)
}

fn scan_impl(
    g: &Smcm,
    max_size: Option<usize>,
    on_witness: &mut dyn FnMut(Witness) -> bool,
) -> Result<(), GraphError> {
    let roles = *g.roles().ok_or(GraphError::MissingRoles)?;
    let pool = candidate_pool(g)?;
    let cap = max_size.unwrap_or(pool.len()).min(pool.len());
    let t_set = NodeSet::singleton(roles.treatment);
    let y_set = NodeSet::singleton(roles.outcome);
    let b_set = roles.children;

    // Nodes marginally m-separated from T; Z_i must be a subset of these.
    let marginal_indep = {
        let reach = g.reachable_given(t_set, NodeSet::EMPTY);
        NodeSet::from_iter(pool.iter().copied()).difference(reach)
    };
    // Reachable-from-T sets keyed by conditioning mask, shared across Z.
    let mut reach_cache: HashMap<u64, NodeSet> = HashMap::new();

    let mut combo = Vec::new();
    for size in 0..=cap {
        if !combinations(&pool, size, 0, &mut combo, &mut |z_nodes| {
            let z = NodeSet::from_iter(z_nodes.iter().copied());
            // B _|_ Y | {T} u Z
            let cond = t_set.union(z);
            if !g.reachable_given(y_set, cond).is_disjoint(b_set) {
                return true;
            }
            for rank in 0..(1u64 << z_nodes.len()) {
                let mut z_o = NodeSet::EMPTY;
                for (bit, &v) in z_nodes.iter().enumerate() {
                    if rank >> bit & 1 == 1 {
                        z_o.insert(v);
                    }
                }
                let z_i = z.difference(z_o);
                if !z_i.is_subset(marginal_indep) {
                    continue; // Z_i _|_ T fails
                }
                // Z_o _|_ T | B u Z_i
                let cond = b_set.union(z_i);
                let reach = *reach_cache
                    .entry(cond.bits())
                    .or_insert_with(|| g.reachable_given(t_set, cond));
                if z_o.is_disjoint(reach) {
                    let keep_going = on_witness(Witness { z, z_i, z_o });
                    if !keep_going {
                        return false;
                    }
                }
            }
            true
        }) {
            break;
        }
    }
    Ok(())
}

/// Lexicographic k-combinations of `pool[start..]`; `f` returns false to abort.
fn combinations(
    pool: &[NodeId],
    k: usize,
    start: usize,
    acc: &mut Vec<NodeId>,
    f: &mut impl FnMut(&[NodeId]) -> bool,
) -> bool {
    if k == 0 {
        return f(acc);
    }
    for i in start..=pool.len().saturating_sub(k) {
        acc.push(pool[i]);
        let keep_going = combinations(pool, k - 1, i + 1, acc, f);
        acc.pop();
        if !keep_going {
            return false;
        }
    }
    true
}

/// Counts from a seeded ensemble run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnsembleCounts {
    pub n_graphs: usize,
    pub successes_exhaustive: usize,
    pub successes_bounded: usize,
    /// Graphs redrawn because no eligible treatment existed.
    pub redraws: usize,
}

/// Samples `n_graphs` graphs and counts witness-scan successes, exhaustively
/// and with the bounded size cap (default 5). Graphs run in parallel on
/// independent RNG streams; results are deterministic for a fixed seed.
pub fn run_ensemble(params: &EnsembleParams, n_graphs: usize) -> Result<EnsembleCounts, EnsembleError> {
    params.validate()?;
    let cap = params.max_subset_size.unwrap_or(5);
    let per_graph: Vec<(bool, bool, usize)> = (0..n_graphs)
        .into_par_iter()
        .map(|idx| {
            let mut rng = stream(params.seed, idx as u64);
            let sampled = sample_smcm(params, &mut rng)?;
            // The exhaustive scan enumerates by increasing size, so its first
            // witness is minimal and decides the bounded scan too.
            let outcome = scan_graph(&sampled.graph, None)?;
            let bounded = outcome.witness.is_some_and(|w| w.z.len() <= cap);
            Ok((outcome.success, bounded, sampled.redraws))
        })
        .collect::<Result<_, EnsembleError>>()?;
    let mut counts = EnsembleCounts {
        n_graphs,
        successes_exhaustive: 0,
        successes_bounded: 0,
        redraws: 0,
    };
    for (exh, bnd, redraws) in per_graph {
        counts.successes_exhaustive += exh as usize;
        counts.successes_bounded += bnd as usize;
        counts.redraws += redraws;
    }
    Ok(counts)
}

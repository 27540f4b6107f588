//! Linear structural equation models over an SMCM, with analytic ground truth.
//!
//! Every bidirected edge is realized by one latent variable drawn from
//! Unif[1,2] that enters both endpoints' equations. Each observed non-treatment
//! node is a linear combination of its observed and latent parents (weights
//! drawn from Unif[1,2]) plus `noise_scale * N(0,1)`. The binary treatment
//! applies a logistic link: `T ~ Bernoulli(sigmoid(w . parents))`.
//!
//! Interventions clamp the treatment column and sever its dependence on
//! parents, which leaves all other equations untouched; because those are
//! linear, the average treatment effect is the sum over directed treatment ->
//! outcome paths of the products of edge weights, computed exactly by
//! [`SemModel::true_ate`].

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::DataTable;
use crate::graph::{GraphError, NodeId, Smcm};

#[derive(Debug, Error)]
pub enum SemError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("data table: {0}")]
    Data(#[from] crate::data::DataError),
}

/// Sampling regime for [`SemModel::generate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Observational,
    DoZero,
    DoOne,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Observational => write!(f, "observational"),
            Regime::DoZero => write!(f, "do(t=0)"),
            Regime::DoOne => write!(f, "do(t=1)"),
        }
    }
}

#[derive(Debug, Clone)]
struct NodeEquation {
    parents: Vec<NodeId>,
    parent_coefs: Vec<f64>,
    latents: Vec<usize>,
    latent_coefs: Vec<f64>,
}

/// A drawn structural model; coefficients are fixed at construction.
#[derive(Debug, Clone)]
pub struct SemModel {
    graph: Smcm,
    equations: Vec<NodeEquation>,
    /// Bidirected edges, one latent per edge, in sorted edge order.
    latent_edges: Vec<(NodeId, NodeId)>,
    noise_scale: f64,
    topo: Vec<NodeId>,
}

/// Samples from one regime.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub table: DataTable,
    pub regime: Regime,
}

pub const DEFAULT_NOISE_SCALE: f64 = 0.1;

/// Draws fresh Unif[1,2] weights for every observed and latent parent slot.
pub fn draw_model(g: &Smcm, rng: &mut impl Rng) -> Result<SemModel, SemError> {
    g.roles().ok_or(GraphError::MissingRoles)?;
    let n = g.n_nodes();
    let latent_edges: Vec<(NodeId, NodeId)> = g.bidirected_edges().to_vec();
    let mut equations = Vec::with_capacity(n);
    for v in 0..n {
        let parents: Vec<NodeId> = g.parents(v).iter().collect();
        let parent_coefs = (0..parents.len()).map(|_| rng.gen_range(1.0..2.0)).collect();
        let latents: Vec<usize> = latent_edges
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a == v || b == v)
            .map(|(k, _)| k)
            .collect();
        let latent_coefs = (0..latents.len()).map(|_| rng.gen_range(1.0..2.0)).collect();
        equations.push(NodeEquation {
            parents,
            parent_coefs,
            latents,
            latent_coefs,
        });
    }
    let topo = topological_order(g);
    Ok(SemModel {
        graph: g.clone(),
        equations,
        latent_edges,
        noise_scale: DEFAULT_NOISE_SCALE,
        topo,
    })
}

fn topological_order(g: &Smcm) -> Vec<NodeId> {
    let n = g.n_nodes();
    let mut indeg: Vec<usize> = (0..n).map(|v| g.parents(v).len()).collect();
    // Min-index-first queue keeps the order canonical.
    let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<NodeId>> = (0..n)
        .filter(|&v| indeg[v] == 0)
        .map(std::cmp::Reverse)
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(std::cmp::Reverse(v)) = ready.pop() {
        order.push(v);
        for c in g.children(v).iter() {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.push(std::cmp::Reverse(c));
            }
        }
    }
    debug_assert_eq!(order.len(), n);
    order
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl SemModel {
    pub fn with_noise_scale(mut self, noise_scale: f64) -> Self {
        assert!(noise_scale > 0.0, "noise scale must be positive");
        self.noise_scale = noise_scale;
        self
    }

    pub fn graph(&self) -> &Smcm {
        &self.graph
    }

    pub fn noise_scale(&self) -> f64 {
        self.noise_scale
    }

    /// Weight of `parent` in `child`'s equation.
    pub fn coefficient(&self, child: NodeId, parent: NodeId) -> Option<f64> {
        let eq = self.equations.get(child)?;
        eq.parents
            .iter()
            .position(|&p| p == parent)
            .map(|i| eq.parent_coefs[i])
    }

    /// Simulates `n` rows under the given regime.
    pub fn generate(&self, n: usize, regime: Regime, rng: &mut impl Rng) -> SampleBatch {
        assert!(n >= 1, "need at least one row");
        let t_node = self.graph.roles().expect("model graph has roles").treatment;
        let n_nodes = self.graph.n_nodes();
        let mut cols = vec![vec![0.0f64; n]; n_nodes];
        let n_lat = self.latent_edges.len();
        let mut latents = vec![0.0f64; n_lat];
        for row in 0..n {
            for u in latents.iter_mut() {
                *u = rng.gen_range(1.0..2.0);
            }
            for &v in &self.topo {
                let eq = &self.equations[v];
                let mut lin = 0.0;
                for (p, w) in eq.parents.iter().zip(&eq.parent_coefs) {
                    lin += w * cols[*p][row];
                }
                for (k, w) in eq.latents.iter().zip(&eq.latent_coefs) {
                    lin += w * latents[*k];
                }
                cols[v][row] = if v == t_node {
                    match regime {
                        Regime::Observational => (rng.gen::<f64>() < sigmoid(lin)) as u8 as f64,
                        Regime::DoZero => 0.0,
                        Regime::DoOne => 1.0,
                    }
                } else {
                    lin + self.noise_scale * rng.sample::<f64, _>(StandardNormal)
                };
            }
        }
        let names = (0..n_nodes).map(|v| format!("v{v}")).collect();
        let table = DataTable::from_columns(names, cols).expect("rectangular by construction");
        SampleBatch { table, regime }
    }

    /// Exact average treatment effect: the sum over directed paths from the
    /// treatment to the outcome of the products of edge weights.
    pub fn true_ate(&self) -> f64 {
        let roles = self.graph.roles().expect("model graph has roles");
        let n = self.graph.n_nodes();
        // delta[v] = d E[outcome] / d v along paths that avoid re-entering T.
        let mut delta = vec![0.0f64; n];
        delta[roles.outcome] = 1.0;
        for &v in self.topo.iter().rev() {
            if v == roles.outcome {
                continue;
            }
            let mut acc = 0.0;
            for c in self.graph.children(v).iter() {
                if c == roles.treatment {
                    continue;
                }
                if let Some(w) = self.coefficient(c, v) {
                    acc += w * delta[c];
                }
            }
            delta[v] = acc;
        }
        delta[roles.treatment]
    }
}

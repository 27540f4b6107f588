//! Semi-Markovian causal models: mixed graphs with directed and bidirected
//! edges over observed nodes, plus exact m-separation queries.
//!
//! Unobserved confounders are never materialized; a bidirected edge `i <-> j`
//! stands for a latent common parent and contributes an arrowhead at both
//! endpoints when deciding collider status on a path.
//!
//! Graphs are immutable after construction. Mutilations ([`Smcm::remove_incoming`],
//! [`Smcm::remove_outgoing`]) and regime-node augmentation
//! ([`Smcm::add_regime_node`]) return new graphs.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Dense node index, unique within a graph.
pub type NodeId = usize;

/// Maximum node count; node sets are packed into a single `u64`.
pub const MAX_NODES: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node id {0} out of range for graph with {1} nodes")]
    InvalidNode(NodeId, usize),
    #[error("graph has {0} nodes; at most {MAX_NODES} supported")]
    TooManyNodes(usize),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {0} {1} {2}")]
    DuplicateEdge(&'static str, NodeId, NodeId),
    #[error("directed part contains a cycle")]
    DirectedCycle,
    #[error("query sets must be pairwise disjoint")]
    OverlappingQuerySets,
    #[error("roles: treatment and outcome must differ")]
    TreatmentIsOutcome,
    #[error("roles: declared children set {{{declared}}} differs from actual children {{{actual}}} of the treatment")]
    ChildrenMismatch { declared: String, actual: String },
    #[error("graph has no roles")]
    MissingRoles,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Set of nodes packed as a bitmask. Cheap to copy, iterate, and intersect.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct NodeSet(u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn singleton(v: NodeId) -> Self {
        debug_assert!(v < MAX_NODES);
        NodeSet(1 << v)
    }

    pub fn insert(&mut self, v: NodeId) {
        debug_assert!(v < MAX_NODES);
        self.0 |= 1 << v;
    }

    pub fn remove(&mut self, v: NodeId) {
        self.0 &= !(1 << v);
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v < MAX_NODES && self.0 & (1 << v) != 0
    }

    pub fn union(&self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 | other.0)
    }

    pub fn intersection(&self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & other.0)
    }

    pub fn difference(&self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & !other.0)
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_disjoint(&self, other: NodeSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(&self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        let bits = self.0;
        (0..MAX_NODES).filter(move |v| bits & (1 << v) != 0)
    }

    pub fn bits(&self) -> u64 {
        self.0
    }

    pub fn from_bits(bits: u64) -> Self {
        NodeSet(bits)
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        let mut s = NodeSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Role labels: treatment `T`, outcome `Y`, and the complete children set `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Roles {
    pub treatment: NodeId,
    pub outcome: NodeId,
    /// Exactly the nodes `v` with a directed edge `treatment -> v`.
    pub children: NodeSet,
}

/// An m-separation query: is every path between `x` and `y` blocked given `given`?
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparationQuery {
    pub x: NodeSet,
    pub y: NodeSet,
    pub given: NodeSet,
}

impl SeparationQuery {
    pub fn new(x: NodeSet, y: NodeSet, given: NodeSet) -> Self {
        SeparationQuery { x, y, given }
    }
}

/// Semi-Markovian causal model over `n` observed nodes.
///
/// The directed part must be acyclic; a pair of nodes may carry at most one
/// directed and one bidirected edge (both may coexist).
#[derive(Clone, PartialEq, Eq)]
pub struct Smcm {
    n: usize,
    directed: Vec<(NodeId, NodeId)>,   // sorted (parent, child)
    bidirected: Vec<(NodeId, NodeId)>, // sorted (min, max)
    parents: Vec<NodeSet>,
    children: Vec<NodeSet>,
    spouses: Vec<NodeSet>,
    roles: Option<Roles>,
}

impl Smcm {
    /// Builds a graph, checking node bounds, self-loops, duplicates, and acyclicity.
    pub fn new(
        n: usize,
        directed: impl IntoIterator<Item = (NodeId, NodeId)>,
        bidirected: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, GraphError> {
        if n > MAX_NODES {
            return Err(GraphError::TooManyNodes(n));
        }
        let mut dir: Vec<(NodeId, NodeId)> = Vec::new();
        let mut bid: Vec<(NodeId, NodeId)> = Vec::new();
        let mut parents = vec![NodeSet::EMPTY; n];
        let mut children = vec![NodeSet::EMPTY; n];
        let mut spouses = vec![NodeSet::EMPTY; n];
        for (a, b) in directed {
            if a >= n || b >= n {
                return Err(GraphError::InvalidNode(a.max(b), n));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if children[a].contains(b) {
                return Err(GraphError::DuplicateEdge("d", a, b));
            }
            children[a].insert(b);
            parents[b].insert(a);
            dir.push((a, b));
        }
        for (a, b) in bidirected {
            let (a, b) = (a.min(b), a.max(b));
            if b >= n {
                return Err(GraphError::InvalidNode(b, n));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if spouses[a].contains(b) {
                return Err(GraphError::DuplicateEdge("b", a, b));
            }
            spouses[a].insert(b);
            spouses[b].insert(a);
            bid.push((a, b));
        }
        dir.sort_unstable();
        bid.sort_unstable();
        let g = Smcm {
            n,
            directed: dir,
            bidirected: bid,
            parents,
            children,
            spouses,
            roles: None,
        };
        if g.has_directed_cycle() {
            return Err(GraphError::DirectedCycle);
        }
        Ok(g)
    }

    fn has_directed_cycle(&self) -> bool {
        // Kahn's algorithm; a cycle leaves nodes unprocessed.
        let mut indeg: Vec<usize> = (0..self.n).map(|v| self.parents[v].len()).collect();
        let mut queue: Vec<NodeId> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop() {
            seen += 1;
            for c in self.children[v].iter() {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push(c);
                }
            }
        }
        seen != self.n
    }

    /// Attaches roles, deriving `B` as the exact children set of the treatment.
    pub fn with_roles(mut self, treatment: NodeId, outcome: NodeId) -> Result<Self, GraphError> {
        self.check_node(treatment)?;
        self.check_node(outcome)?;
        if treatment == outcome {
            return Err(GraphError::TreatmentIsOutcome);
        }
        self.roles = Some(Roles {
            treatment,
            outcome,
            children: self.children[treatment],
        });
        Ok(self)
    }

    /// Attaches roles with an explicitly declared children set, which must equal
    /// the actual children of the treatment.
    pub fn with_declared_roles(
        self,
        treatment: NodeId,
        outcome: NodeId,
        declared_children: NodeSet,
    ) -> Result<Self, GraphError> {
        let actual = *self
            .children
            .get(treatment)
            .ok_or(GraphError::InvalidNode(treatment, self.n))?;
        if declared_children != actual {
            let fmt_set = |s: NodeSet| {
                s.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            return Err(GraphError::ChildrenMismatch {
                declared: fmt_set(declared_children),
                actual: fmt_set(actual),
            });
        }
        self.with_roles(treatment, outcome)
    }

    fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::InvalidNode(v, self.n))
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn roles(&self) -> Option<&Roles> {
        self.roles.as_ref()
    }

    pub fn directed_edges(&self) -> &[(NodeId, NodeId)] {
        &self.directed
    }

    pub fn bidirected_edges(&self) -> &[(NodeId, NodeId)] {
        &self.bidirected
    }

    pub fn parents(&self, v: NodeId) -> NodeSet {
        self.parents[v]
    }

    pub fn children(&self, v: NodeId) -> NodeSet {
        self.children[v]
    }

    pub fn spouses(&self, v: NodeId) -> NodeSet {
        self.spouses[v]
    }

    pub fn has_directed(&self, a: NodeId, b: NodeId) -> bool {
        a < self.n && self.children[a].contains(b)
    }

    pub fn has_bidirected(&self, a: NodeId, b: NodeId) -> bool {
        a < self.n && self.spouses[a].contains(b)
    }

    /// All nodes with a directed path to `v`, excluding `v` itself.
    pub fn ancestors(&self, v: NodeId) -> Result<NodeSet, GraphError> {
        self.check_node(v)?;
        Ok(self.ancestors_of_set(NodeSet::singleton(v)).difference(NodeSet::singleton(v)))
    }

    /// All nodes with a directed path from `v`, excluding `v` itself.
    pub fn descendants(&self, v: NodeId) -> Result<NodeSet, GraphError> {
        self.check_node(v)?;
        let mut reach = NodeSet::singleton(v);
        let mut frontier = vec![v];
        while let Some(w) = frontier.pop() {
            for c in self.children[w].iter() {
                if !reach.contains(c) {
                    reach.insert(c);
                    frontier.push(c);
                }
            }
        }
        Ok(reach.difference(NodeSet::singleton(v)))
    }

    /// Union of `s` and all ancestors of nodes in `s`.
    pub fn ancestors_of_set(&self, s: NodeSet) -> NodeSet {
        let mut reach = s;
        let mut frontier: Vec<NodeId> = s.iter().collect();
        while let Some(w) = frontier.pop() {
            for p in self.parents[w].iter() {
                if !reach.contains(p) {
                    reach.insert(p);
                    frontier.push(p);
                }
            }
        }
        reach
    }

    /// Exact m-separation decision for `q`.
    ///
    /// A node on a path is a collider iff both incident path edges point into
    /// it (a bidirected endpoint counts as an arrowhead). Non-colliders block
    /// when conditioned on; colliders block unless the collider or one of its
    /// descendants is conditioned on. Empty `x` or `y` is vacuously separated.
    pub fn m_separated(&self, q: &SeparationQuery) -> Result<bool, GraphError> {
        for s in [q.x, q.y, q.given] {
            for v in s.iter() {
                self.check_node(v)?;
            }
        }
        if !(q.x.is_disjoint(q.y) && q.x.is_disjoint(q.given) && q.y.is_disjoint(q.given)) {
            return Err(GraphError::OverlappingQuerySets);
        }
        if q.x.is_empty() || q.y.is_empty() {
            return Ok(true);
        }
        Ok(self.reachable_given(q.x, q.given).is_disjoint(q.y))
    }

    /// Convenience wrapper over [`Smcm::m_separated`].
    pub fn m_separated_sets(
        &self,
        x: NodeSet,
        y: NodeSet,
        given: NodeSet,
    ) -> Result<bool, GraphError> {
        self.m_separated(&SeparationQuery::new(x, y, given))
    }

    /// Nodes m-connected to `from` given `given`, via reachability over
    /// (node, entry-mark) states. Linear in edges per mark.
    pub fn reachable_given(&self, from: NodeSet, given: NodeSet) -> NodeSet {
        // Colliders are open iff they have a descendant in `given`.
        let open_collider = self.ancestors_of_set(given);
        // Entry mark at a node: arrowhead (edge points into it) or tail.
        let mut seen_arrow = NodeSet::EMPTY;
        let mut seen_tail = NodeSet::EMPTY;
        let mut reached = NodeSet::EMPTY;
        let mut stack: Vec<(NodeId, bool)> = Vec::new(); // (node, entered_by_arrowhead)

        // Leaving a source node has no collider constraint at the source.
        for x in from.iter() {
            for c in self.children[x].iter() {
                stack.push((c, true));
            }
            for s in self.spouses[x].iter() {
                stack.push((s, true));
            }
            for p in self.parents[x].iter() {
                stack.push((p, false));
            }
        }

        while let Some((w, by_arrow)) = stack.pop() {
            let seen = if by_arrow {
                &mut seen_arrow
            } else {
                &mut seen_tail
            };
            if seen.contains(w) {
                continue;
            }
            seen.insert(w);
            if from.contains(w) {
                continue; // walks may touch sources; nothing new to reach from them
            }
            reached.insert(w);

            let in_given = given.contains(w);
            // Leave via a tail at w (w -> u): w is a non-collider on the walk.
            if !in_given {
                for u in self.children[w].iter() {
                    stack.push((u, true));
                }
            }
            // Leave via an arrowhead at w (u -> w traversed backwards, or w <-> u):
            // collider iff we also entered through an arrowhead.
            let passable = if by_arrow {
                in_given || open_collider.contains(w)
            } else {
                !in_given
            };
            if passable {
                for u in self.parents[w].iter() {
                    stack.push((u, false));
                }
                for u in self.spouses[w].iter() {
                    stack.push((u, true));
                }
            }
        }
        reached
    }

    /// Copy with every directed edge into `s` and every bidirected edge
    /// touching `s` removed. Roles are dropped.
    pub fn remove_incoming(&self, s: NodeSet) -> Smcm {
        let directed = self
            .directed
            .iter()
            .copied()
            .filter(|&(_, b)| !s.contains(b))
            .collect::<Vec<_>>();
        let bidirected = self
            .bidirected
            .iter()
            .copied()
            .filter(|&(a, b)| !s.contains(a) && !s.contains(b))
            .collect::<Vec<_>>();
        Smcm::new(self.n, directed, bidirected).expect("mutilation preserves validity")
    }

    /// Copy with every directed edge out of `s` removed; bidirected edges are
    /// untouched. Roles are dropped.
    pub fn remove_outgoing(&self, s: NodeSet) -> Smcm {
        let directed = self
            .directed
            .iter()
            .copied()
            .filter(|&(a, _)| !s.contains(a))
            .collect::<Vec<_>>();
        Smcm::new(self.n, directed, self.bidirected.clone()).expect("mutilation preserves validity")
    }

    /// Copy with one extra node `F` and directed edges `F -> v` for each `v` in
    /// `s`. Returns the new graph and the id of `F`. Roles are dropped.
    pub fn add_regime_node(&self, s: NodeSet) -> Result<(Smcm, NodeId), GraphError> {
        let f = self.n;
        if f + 1 > MAX_NODES {
            return Err(GraphError::TooManyNodes(f + 1));
        }
        let mut directed = self.directed.clone();
        for v in s.iter() {
            directed.push((f, v));
        }
        let g = Smcm::new(f + 1, directed, self.bidirected.clone())?;
        Ok((g, f))
    }
}

impl fmt::Debug for Smcm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Smcm(n={}, d={:?}, b={:?}", self.n, self.directed, self.bidirected)?;
        if let Some(r) = &self.roles {
            write!(f, ", t={}, y={}, b_set={:?}", r.treatment, r.outcome, r.children)?;
        }
        write!(f, ")")
    }
}

/// Which of the three structural assumptions hold for a graph with roles.
///
/// 1. the treatment is an ancestor of the outcome;
/// 2. treatment and outcome share an unobserved confounder (bidirected edge);
/// 3. the labeled children set is complete (enforced by construction).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssumptionReport {
    pub treatment_is_ancestor: bool,
    pub confounded: bool,
    pub children_complete: bool,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.treatment_is_ancestor && self.confounded && self.children_complete
    }
}

/// Checks the structural assumptions on a graph with roles.
pub fn check_assumptions(g: &Smcm) -> Result<AssumptionReport, GraphError> {
    let roles = g.roles().ok_or(GraphError::MissingRoles)?;
    let anc = g.ancestors(roles.outcome)?;
    Ok(AssumptionReport {
        treatment_is_ancestor: anc.contains(roles.treatment),
        confounded: g.has_bidirected(roles.treatment, roles.outcome),
        children_complete: roles.children == g.children(roles.treatment),
    })
}

// ---------------------------------------------------------------------------
// Text format
//
//   # comment
//   smcm <n_nodes>
//   d <i> <j>        one line per directed edge i -> j
//   b <i> <j>        one line per bidirected edge i <-> j
//   role t <i>
//   role y <i>
//   role b <i> ...
// ---------------------------------------------------------------------------

impl fmt::Display for Smcm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "smcm {}", self.n)?;
        for (a, b) in &self.directed {
            writeln!(f, "d {a} {b}")?;
        }
        for (a, b) in &self.bidirected {
            writeln!(f, "b {a} {b}")?;
        }
        if let Some(r) = &self.roles {
            writeln!(f, "role t {}", r.treatment)?;
            writeln!(f, "role y {}", r.outcome)?;
            write!(f, "role b")?;
            for v in r.children.iter() {
                write!(f, " {v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for Smcm {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut n: Option<usize> = None;
        let mut directed = Vec::new();
        let mut bidirected = Vec::new();
        let mut role_t: Option<NodeId> = None;
        let mut role_y: Option<NodeId> = None;
        let mut role_b: Option<NodeSet> = None;
        let err = |line: usize, msg: &str| GraphError::Parse {
            line,
            msg: msg.to_string(),
        };
        for (idx, raw) in s.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tok = line.split_whitespace();
            let head = tok.next().unwrap();
            let next_id = |tok: &mut dyn Iterator<Item = &str>| -> Result<usize, GraphError> {
                tok.next()
                    .ok_or_else(|| err(line_no, "missing node id"))?
                    .parse::<usize>()
                    .map_err(|_| err(line_no, "bad node id"))
            };
            match head {
                "smcm" => {
                    if n.is_some() {
                        return Err(err(line_no, "duplicate smcm header"));
                    }
                    n = Some(next_id(&mut tok)?);
                }
                "d" => {
                    let a = next_id(&mut tok)?;
                    let b = next_id(&mut tok)?;
                    directed.push((a, b));
                }
                "b" => {
                    let a = next_id(&mut tok)?;
                    let b = next_id(&mut tok)?;
                    bidirected.push((a, b));
                }
                "role" => match tok.next() {
                    Some("t") => role_t = Some(next_id(&mut tok)?),
                    Some("y") => role_y = Some(next_id(&mut tok)?),
                    Some("b") => {
                        let mut set = NodeSet::EMPTY;
                        for t in tok.by_ref() {
                            set.insert(
                                t.parse::<usize>().map_err(|_| err(line_no, "bad node id"))?,
                            );
                        }
                        role_b = Some(set);
                        continue;
                    }
                    _ => return Err(err(line_no, "unknown role")),
                },
                other => {
                    return Err(err(line_no, &format!("unknown directive `{other}`")));
                }
            }
            if tok.next().is_some() {
                return Err(err(line_no, "trailing tokens"));
            }
        }
        let n = n.ok_or_else(|| err(0, "missing `smcm <n>` header"))?;
        let g = Smcm::new(n, directed, bidirected)?;
        match (role_t, role_y) {
            (Some(t), Some(y)) => match role_b {
                Some(b) => g.with_declared_roles(t, y, b),
                None => g.with_roles(t, y),
            },
            (None, None) => Ok(g),
            _ => Err(err(0, "roles t and y must be given together")),
        }
    }
}

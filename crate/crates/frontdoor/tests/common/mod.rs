//! Shared test oracles, kept independent of the library's algorithmic paths.
//!
//! - m-separation by literal enumeration of simple paths with the blocking
//!   rule applied per path;
//! - interventional distributions of discrete models by enumerating latent
//!   and observed configurations and clamping the intervened node.

#![allow(dead_code)]

use frontdoor::graph::{NodeId, NodeSet, Smcm};

/// Edge mark at a node on a path: does the incident edge point into it?
#[derive(Clone, Copy, PartialEq)]
enum End {
    Arrow,
    Tail,
}

/// One step along a path: (neighbor, mark at current node, mark at neighbor).
fn steps(g: &Smcm, v: NodeId) -> Vec<(NodeId, End, End)> {
    let mut out = Vec::new();
    for c in g.children(v).iter() {
        out.push((c, End::Tail, End::Arrow));
    }
    for p in g.parents(v).iter() {
        out.push((p, End::Arrow, End::Tail));
    }
    for s in g.spouses(v).iter() {
        out.push((s, End::Arrow, End::Arrow));
    }
    out
}

/// Is some simple path between `x` and `y` m-connecting given `cond`?
///
/// Depth-first over simple paths; a path connects iff every intermediate
/// non-collider avoids `cond` and every intermediate collider has itself or a
/// descendant in `cond`.
fn has_connecting_path(g: &Smcm, x: NodeId, y: NodeId, cond: NodeSet) -> bool {
    let cond_closure = g.ancestors_of_set(cond); // nodes with a descendant in cond
    fn dfs(
        g: &Smcm,
        current: NodeId,
        incoming: Option<End>,
        y: NodeId,
        cond: NodeSet,
        cond_closure: NodeSet,
        visited: &mut Vec<NodeId>,
    ) -> bool {
        for (next, mark_here, mark_next) in steps(g, current) {
            if visited.contains(&next) {
                continue;
            }
            if let Some(inc) = incoming {
                let collider = inc == End::Arrow && mark_here == End::Arrow;
                let open = if collider {
                    cond_closure.contains(current)
                } else {
                    !cond.contains(current)
                };
                if !open {
                    continue;
                }
            }
            if next == y {
                return true;
            }
            visited.push(next);
            if dfs(g, next, Some(mark_next), y, cond, cond_closure, visited) {
                return true;
            }
            visited.pop();
        }
        false
    }
    if x == y {
        return true;
    }
    let mut visited = vec![x];
    // The first hop out of x has no blocking constraint at x itself; model it
    // by treating x as having no incoming mark and dispatching manually.
    for (next, _, mark_next) in steps(g, x) {
        if next == y {
            return true;
        }
        visited.push(next);
        if dfs(g, next, Some(mark_next), y, cond, cond_closure, &mut visited) {
            return true;
        }
        visited.pop();
    }
    false
}

/// Brute-force m-separation of node sets: no pair (x, y) has a connecting path.
pub fn oracle_m_separated(g: &Smcm, x: NodeSet, y: NodeSet, cond: NodeSet) -> bool {
    for a in x.iter() {
        for b in y.iter() {
            if has_connecting_path(g, a, b, cond) {
                return false;
            }
        }
    }
    true
}

/// All mixed graphs on `n` nodes: each unordered pair independently carries
/// one of {none, i->j, j->i, i<->j, i->j & i<->j, j->i & i<->j}. Graphs whose
/// directed part is cyclic are skipped by the caller via the Result.
pub fn enumerate_mixed_graphs(n: usize) -> Vec<Smcm> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    let total = 6usize.pow(pairs.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut directed = Vec::new();
        let mut bidirected = Vec::new();
        for &(i, j) in &pairs {
            match c % 6 {
                0 => {}
                1 => directed.push((i, j)),
                2 => directed.push((j, i)),
                3 => bidirected.push((i, j)),
                4 => {
                    directed.push((i, j));
                    bidirected.push((i, j));
                }
                _ => {
                    directed.push((j, i));
                    bidirected.push((i, j));
                }
            }
            c /= 6;
        }
        if let Ok(g) = Smcm::new(n, directed, bidirected) {
            out.push(g);
        }
    }
    out
}

/// A random mixed graph with at most `max_edges` edges in total.
pub fn random_mixed_graph(n: usize, max_edges: usize, rng: &mut impl rand::Rng) -> Smcm {
    loop {
        let n_edges = rng.gen_range(0..=max_edges);
        let mut directed = Vec::new();
        let mut bidirected = Vec::new();
        for _ in 0..n_edges {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i == j {
                continue;
            }
            if rng.gen_bool(0.5) {
                let e = (i.min(j), i.max(j));
                if !bidirected.contains(&e) {
                    bidirected.push(e);
                }
            } else {
                // Orient low -> high so the directed part stays acyclic.
                let e = (i.min(j), i.max(j));
                if !directed.contains(&e) {
                    directed.push(e);
                }
            }
        }
        if let Ok(g) = Smcm::new(n, directed, bidirected) {
            return g;
        }
    }
}

/// All singleton m-separation queries on `g`: every ordered (x, y) pair and
/// every conditioning subset of the remaining nodes.
pub fn check_against_oracle(g: &Smcm) -> Result<(), String> {
    let n = g.n_nodes();
    for x in 0..n {
        for y in (x + 1)..n {
            let rest: Vec<NodeId> = (0..n).filter(|&v| v != x && v != y).collect();
            for mask in 0..(1u64 << rest.len()) {
                let cond: NodeSet = rest
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| mask >> bit & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                let xs = NodeSet::singleton(x);
                let ys = NodeSet::singleton(y);
                let fast = g.m_separated_sets(xs, ys, cond).unwrap();
                let slow = oracle_m_separated(g, xs, ys, cond);
                if fast != slow {
                    return Err(format!(
                        "disagreement on {g:?}: x={x} y={y} cond={cond:?}: fast={fast} oracle={slow}"
                    ));
                }
            }
        }
    }
    Ok(())
}

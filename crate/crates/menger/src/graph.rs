//! Graphs and Steiner trees over metric-space indices.
//!
//! Graphs here are purely combinatorial: vertices are point indices and an
//! edge `{a, b}` costs `d(a, b)` regardless of whether the ambient space
//! contains an arc between the points. A Steiner tree on a terminal set `P`
//! is a tree whose vertex set contains `P`; the other vertices are Steiner
//! points. Proper trees have Steiner degrees >= 2; reduced trees contract
//! every maximal chain to a single edge so Steiner degrees reach >= 3.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::metric::{ExtLength, IndexSet, Metric};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// An undirected simple graph on point indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedGraph {
    vertices: IndexSet,
    /// Normalized: each edge stored as `(min, max)`, sorted, duplicate-free.
    edges: Vec<(usize, usize)>,
}

impl IndexedGraph {
    pub fn new(vertices: IndexSet, edges: Vec<(usize, usize)>) -> Result<IndexedGraph> {
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph {
                    expected: "simple graph",
                    reason: format!("self-loop at vertex {a}"),
                });
            }
            if !vertices.contains(a) || !vertices.contains(b) {
                return Err(Error::InvalidGraph {
                    expected: "simple graph",
                    reason: format!("edge ({a},{b}) has an endpoint outside the vertex set"),
                });
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        let before = norm.len();
        norm.dedup();
        if norm.len() != before {
            return Err(Error::InvalidGraph {
                expected: "simple graph",
                reason: "duplicate edges".into(),
            });
        }
        Ok(IndexedGraph {
            vertices,
            edges: norm,
        })
    }

    pub fn vertices(&self) -> &IndexSet {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    /// Adjacency lists keyed by vertex, neighbor lists sorted.
    pub fn adjacency(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut adj: BTreeMap<usize, Vec<usize>> =
            self.vertices.iter().map(|v| (v, Vec::new())).collect();
        for &(a, b) in &self.edges {
            adj.get_mut(&a).unwrap().push(b);
            adj.get_mut(&b).unwrap().push(a);
        }
        for neighbors in adj.values_mut() {
            neighbors.sort_unstable();
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let Some(start) = self.vertices.iter().next() else {
            return true;
        };
        let adj = self.adjacency();
        let mut stack = vec![start];
        let mut seen_v: Vec<usize> = Vec::new();
        while let Some(v) = stack.pop() {
            if seen_v.contains(&v) {
                continue;
            }
            seen_v.push(v);
            for &u in &adj[&v] {
                if !seen_v.contains(&u) {
                    stack.push(u);
                }
            }
        }
        IndexSet::new(seen_v).len() == self.vertices.len()
    }
}

/// A tree over point indices with a designated terminal subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerTree {
    graph: IndexedGraph,
    terminals: IndexSet,
}

impl SteinerTree {
    /// Validates tree-ness (`|E| = |V| - 1` and connected) and terminal
    /// containment.
    pub fn new(graph: IndexedGraph, terminals: IndexSet) -> Result<SteinerTree> {
        if graph.vertices().is_empty() {
            return Err(Error::InvalidGraph {
                expected: "tree",
                reason: "empty vertex set".into(),
            });
        }
        if graph.edges().len() + 1 != graph.vertices().len() {
            return Err(Error::InvalidGraph {
                expected: "tree",
                reason: format!(
                    "{} edges on {} vertices",
                    graph.edges().len(),
                    graph.vertices().len()
                ),
            });
        }
        if !graph.is_connected() {
            return Err(Error::InvalidGraph {
                expected: "tree",
                reason: "not connected".into(),
            });
        }
        if !terminals.is_subset_of(graph.vertices()) {
            return Err(Error::InvalidGraph {
                expected: "Steiner tree",
                reason: "terminal outside the vertex set".into(),
            });
        }
        Ok(SteinerTree { graph, terminals })
    }

    pub fn graph(&self) -> &IndexedGraph {
        &self.graph
    }

    pub fn vertices(&self) -> &IndexSet {
        self.graph.vertices()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        self.graph.edges()
    }

    pub fn terminals(&self) -> &IndexSet {
        &self.terminals
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.terminals.contains(v)
    }

    /// Steiner points: vertices that are not terminals.
    pub fn steiner_points(&self) -> IndexSet {
        self.graph.vertices().difference(&self.terminals)
    }
}

/// A path in a Steiner tree whose interior vertices are degree-2 Steiner
/// points of that tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    path: Vec<usize>,
}

impl Chain {
    pub fn new(path: Vec<usize>) -> Chain {
        debug_assert!(!path.is_empty());
        Chain { path }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.path
    }

    pub fn edge_iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.path.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self, space: &impl Metric) -> f64 {
        self.edge_iter().map(|(a, b)| space.dist_ix(a, b)).sum()
    }
}

// ---------------------------------------------------------------------------
// Lengths and MST
// ---------------------------------------------------------------------------

/// Total edge length of a graph; `0` for an edgeless graph.
pub fn graph_length(space: &impl Metric, g: &IndexedGraph) -> ExtLength {
    ExtLength::new(g.edges().iter().map(|&(a, b)| space.dist_ix(a, b)).sum())
}

pub fn tree_length(space: &impl Metric, t: &SteinerTree) -> ExtLength {
    graph_length(space, t.graph())
}

/// Minimum spanning tree of the complete metric graph on `p`.
///
/// Dense Prim with deterministic tie-breaking (first improvement in index
/// order wins). Returns the tree (terminals = `p`, no Steiner points) and
/// its length; a single point gives length 0.
pub fn mst(space: &impl Metric, p: &IndexSet) -> Result<(SteinerTree, ExtLength)> {
    if p.is_empty() {
        return Err(Error::EmptySet {
            context: "mst needs a non-empty point set",
        });
    }
    let items = p.as_slice();
    let k = items.len();
    let mut in_tree = vec![false; k];
    let mut key = vec![f64::INFINITY; k];
    let mut parent = vec![usize::MAX; k];
    key[0] = 0.0;
    let mut edges = Vec::with_capacity(k.saturating_sub(1));
    let mut total = 0.0;
    for _ in 0..k {
        let mut next = usize::MAX;
        let mut best = f64::INFINITY;
        for i in 0..k {
            if !in_tree[i] && key[i] < best {
                best = key[i];
                next = i;
            }
        }
        in_tree[next] = true;
        if parent[next] != usize::MAX {
            edges.push((items[parent[next]], items[next]));
            total += best;
        }
        for i in 0..k {
            if !in_tree[i] {
                let d = space.dist_ix(items[next], items[i]);
                if d < key[i] {
                    key[i] = d;
                    parent[i] = next;
                }
            }
        }
    }
    let graph = IndexedGraph::new(p.clone(), edges)?;
    let tree = SteinerTree::new(graph, p.clone())?;
    Ok((tree, ExtLength::new(total)))
}

// ---------------------------------------------------------------------------
// Proper and reduced trees
// ---------------------------------------------------------------------------

/// True iff every Steiner point has degree at least 2.
pub fn is_proper(tree: &SteinerTree) -> bool {
    tree.steiner_points()
        .iter()
        .all(|v| tree.graph().degree(v) >= 2)
}

/// Repeatedly deletes degree <= 1 Steiner points (and their edges). The
/// result is proper, keeps the terminals, and is never longer.
pub fn make_proper(tree: &SteinerTree) -> SteinerTree {
    let mut vertices: Vec<usize> = tree.vertices().iter().collect();
    let mut edges: Vec<(usize, usize)> = tree.edges().to_vec();
    loop {
        let mut degree: BTreeMap<usize, usize> = vertices.iter().map(|&v| (v, 0)).collect();
        for &(a, b) in &edges {
            *degree.get_mut(&a).unwrap() += 1;
            *degree.get_mut(&b).unwrap() += 1;
        }
        let prune: Vec<usize> = vertices
            .iter()
            .copied()
            .filter(|&v| !tree.is_terminal(v) && degree[&v] <= 1)
            .collect();
        if prune.is_empty() {
            break;
        }
        vertices.retain(|v| !prune.contains(v));
        edges.retain(|&(a, b)| !prune.contains(&a) && !prune.contains(&b));
    }
    let graph = IndexedGraph::new(IndexSet::new(vertices), edges)
        .expect("pruning a tree keeps a valid graph");
    SteinerTree::new(graph, tree.terminals().clone()).expect("pruning a tree keeps a tree")
}

/// Decomposes a proper tree into its maximal chains.
///
/// Every edge lies in exactly one returned chain; chains are edge-disjoint
/// and meet only at shared endpoints that are not degree-2 Steiner points.
/// Requires a proper tree with at least two terminals.
pub fn maximal_chains(tree: &SteinerTree) -> Result<Vec<Chain>> {
    ensure_proper(tree)?;
    if tree.terminals().len() < 2 {
        return Err(Error::ParamOutOfRange {
            what: "maximal_chains needs at least 2 terminals".into(),
        });
    }
    let adj = tree.graph().adjacency();
    let is_interior =
        |v: usize| -> bool { !tree.is_terminal(v) && adj[&v].len() == 2 };
    let mut chains = Vec::new();
    let mut visited: Vec<(usize, usize)> = Vec::new();
    let mark = |a: usize, b: usize, visited: &mut Vec<(usize, usize)>| {
        visited.push((a.min(b), a.max(b)));
    };
    let seen = |a: usize, b: usize, visited: &[(usize, usize)]| {
        visited.contains(&(a.min(b), a.max(b)))
    };
    for joint in tree.vertices().iter().filter(|&v| !is_interior(v)) {
        for &first in &adj[&joint] {
            if seen(joint, first, &visited) {
                continue;
            }
            let mut path = vec![joint, first];
            mark(joint, first, &mut visited);
            let (mut prev, mut cur) = (joint, first);
            while is_interior(cur) {
                let &next = adj[&cur]
                    .iter()
                    .find(|&&u| u != prev)
                    .expect("degree-2 vertex has a second neighbor");
                mark(cur, next, &mut visited);
                path.push(next);
                prev = cur;
                cur = next;
            }
            chains.push(Chain::new(path));
        }
    }
    Ok(chains)
}

fn ensure_proper(tree: &SteinerTree) -> Result<()> {
    for v in tree.steiner_points().iter() {
        let d = tree.graph().degree(v);
        if d < 2 {
            return Err(Error::NotProper { vertex: v, degree: d });
        }
    }
    Ok(())
}

/// Replaces each maximal chain by a single edge joining its endpoints.
///
/// The result has no degree-2 Steiner points and, by the triangle
/// inequality, is never longer than the input.
pub fn reduce_tree(tree: &SteinerTree) -> Result<SteinerTree> {
    if tree.terminals().len() < 2 {
        // Nothing to contract for a degenerate tree.
        return Ok(tree.clone());
    }
    let chains = maximal_chains(tree)?;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for c in &chains {
        let path = c.vertices();
        let (a, b) = (path[0], path[path.len() - 1]);
        vertices.push(a);
        vertices.push(b);
        edges.push((a, b));
    }
    let graph = IndexedGraph::new(IndexSet::new(vertices), edges)?;
    SteinerTree::new(graph, tree.terminals().clone())
}

// ---------------------------------------------------------------------------
// Chain cutting (online bin packing)
// ---------------------------------------------------------------------------

/// Cuts a chain at vertices into subchains of length <= `t`, walking once
/// from end to end and keeping each piece as long as possible.
///
/// Edges longer than `t` are excluded ("outsize") and reported separately;
/// the vertex between two adjacent outsize edges becomes a singleton
/// (length-0) subchain. The subchain vertex sets partition the chain's
/// vertices, and the number of pieces `k` satisfies `k < 1 + 2 len / t`
/// whenever the chain has positive length.
pub fn cut_chain(
    space: &impl Metric,
    chain: &Chain,
    t: f64,
) -> Result<(Vec<Chain>, Vec<(usize, usize)>)> {
    if !(t > 0.0) {
        return Err(Error::ParamOutOfRange {
            what: format!("cut threshold must be positive, got {t}"),
        });
    }
    let path = chain.vertices();
    let mut pieces = Vec::new();
    let mut excluded = Vec::new();
    let mut current = vec![path[0]];
    let mut cur_len = 0.0f64;
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        let d = space.dist_ix(a, b);
        if d > t {
            pieces.push(Chain::new(std::mem::take(&mut current)));
            excluded.push((a, b));
            current = vec![b];
            cur_len = 0.0;
        } else if cur_len + d <= t {
            current.push(b);
            cur_len += d;
        } else {
            pieces.push(Chain::new(std::mem::take(&mut current)));
            current = vec![b];
            cur_len = 0.0;
        }
    }
    pieces.push(Chain::new(current));
    Ok((pieces, excluded))
}

// ---------------------------------------------------------------------------
// Tree to cycle (doubling / detachment)
// ---------------------------------------------------------------------------

/// Builds a cycle through exactly the terminal set with length at most
/// twice the tree length.
///
/// Follows the detachment induction on the reduced tree (repeatedly detach
/// a Steiner point adjacent to two pendant terminals) and falls back to
/// doubling-and-shortcutting a depth-first traversal when the induction
/// premise is absent. Both routes carry the `2 l(T)` certificate via the
/// triangle inequality. Requires at least 3 terminals.
pub fn tree_to_cycle(space: &impl Metric, tree: &SteinerTree) -> Result<IndexedGraph> {
    if tree.terminals().len() < 3 {
        return Err(Error::ParamOutOfRange {
            what: format!(
                "tree_to_cycle needs at least 3 terminals, got {}",
                tree.terminals().len()
            ),
        });
    }
    let mut work = reduce_tree(&make_proper(tree))?;
    let mut detachments: Vec<(usize, usize, usize)> = Vec::new();

    while work.terminals().len() > 3 {
        match find_detachable(&work) {
            Some((v, p1, p2)) => {
                let vertices: Vec<usize> = work
                    .vertices()
                    .iter()
                    .filter(|&u| u != p1 && u != p2)
                    .collect();
                let edges: Vec<(usize, usize)> = work
                    .edges()
                    .iter()
                    .copied()
                    .filter(|&(a, b)| a != p1 && a != p2 && b != p1 && b != p2)
                    .collect();
                let terminals: IndexSet = work
                    .terminals()
                    .iter()
                    .filter(|&u| u != p1 && u != p2)
                    .chain(std::iter::once(v))
                    .collect();
                let graph = IndexedGraph::new(IndexSet::new(vertices), edges)?;
                work = SteinerTree::new(graph, terminals)?;
                detachments.push((v, p1, p2));
            }
            None => break,
        }
    }

    let mut sequence: Vec<usize> = if work.terminals().len() == 3 {
        work.terminals().iter().collect()
    } else {
        dfs_terminal_order(&work)
    };

    // Unwind the detachments: drop the Steiner point v from the cycle and
    // insert the two terminals it was joined to in its place.
    for &(v, p1, p2) in detachments.iter().rev() {
        let pos = sequence
            .iter()
            .position(|&u| u == v)
            .expect("detached vertex is in the cycle");
        sequence.splice(pos..=pos, [p1, p2]);
    }

    debug_assert_eq!(
        IndexSet::new(sequence.clone()),
        tree.terminals().clone(),
        "cycle must visit exactly the terminal set"
    );
    let mut edges: Vec<(usize, usize)> = sequence.windows(2).map(|w| (w[0], w[1])).collect();
    edges.push((sequence[sequence.len() - 1], sequence[0]));
    let cycle = IndexedGraph::new(tree.terminals().clone(), edges)?;
    debug_assert!(
        graph_length(space, &cycle).value()
            <= 2.0 * tree_length(space, tree).value() + 1e-9
    );
    Ok(cycle)
}

/// Finds a Steiner point whose neighbors are (all but at most one) pendant
/// terminals, together with its two lowest pendant-terminal neighbors.
fn find_detachable(tree: &SteinerTree) -> Option<(usize, usize, usize)> {
    let adj = tree.graph().adjacency();
    for v in tree.steiner_points().iter() {
        let pendants: Vec<usize> = adj[&v]
            .iter()
            .copied()
            .filter(|&u| tree.is_terminal(u) && adj[&u].len() == 1)
            .collect();
        if pendants.len() >= 2 && adj[&v].len() - pendants.len() <= 1 {
            return Some((v, pendants[0], pendants[1]));
        }
    }
    None
}

/// Terminals in first-visit order of a depth-first traversal from the
/// lowest terminal, neighbors visited in ascending index order.
fn dfs_terminal_order(tree: &SteinerTree) -> Vec<usize> {
    let adj = tree.graph().adjacency();
    let start = tree.terminals().iter().next().expect("non-empty terminals");
    let mut order = Vec::new();
    let mut visited = Vec::new();
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        if visited.contains(&v) {
            continue;
        }
        visited.push(v);
        if tree.is_terminal(v) {
            order.push(v);
        }
        for &u in adj[&v].iter().rev() {
            if !visited.contains(&u) {
                stack.push(u);
            }
        }
    }
    order
}

// ---------------------------------------------------------------------------
// Cycle edge removal
// ---------------------------------------------------------------------------

/// Removes the longest edge of a cycle (ties break toward the first edge in
/// normalized order), yielding a Hamiltonian path on the same vertices.
pub fn cycle_longest_edge_removal(
    space: &impl Metric,
    cycle: &IndexedGraph,
) -> Result<IndexedGraph> {
    let n = cycle.vertices().len();
    if n < 3
        || cycle.edges().len() != n
        || cycle.vertices().iter().any(|v| cycle.degree(v) != 2)
        || !cycle.is_connected()
    {
        return Err(Error::InvalidGraph {
            expected: "cycle",
            reason: "input must be a single cycle on >= 3 vertices".into(),
        });
    }
    let (mut worst_edge, mut worst) = (0usize, f64::NEG_INFINITY);
    for (k, &(a, b)) in cycle.edges().iter().enumerate() {
        let d = space.dist_ix(a, b);
        if d > worst {
            worst = d;
            worst_edge = k;
        }
    }
    let edges: Vec<(usize, usize)> = cycle
        .edges()
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != worst_edge)
        .map(|(_, &e)| e)
        .collect();
    IndexedGraph::new(cycle.vertices().clone(), edges)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

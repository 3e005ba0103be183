//! Steiner tree solvers and certified bounds.
//!
//! Three engines with different scopes:
//!
//! - [`smt_restricted`]: exact minimum tree with Steiner points restricted
//!   to a finite candidate set, by Dreyfus-Wagner dynamic programming over
//!   the metric closure. Capped at [`TERMINAL_CAP`] terminals.
//! - [`smt_euclidean_small`]: exact unrestricted Steiner minimal tree for
//!   up to 4 terminals in the euclidean plane, by enumerating Steiner
//!   topologies and optimizing free Steiner positions to stationarity with
//!   damped geometric-median iterations.
//! - [`smt_bounds`]: certificate interval from the spanning-tree upper
//!   bound and the cycle-doubling lower bound
//!   `mst(P) <= 2(|P|-1)/|P| * smt(P)` rearranged.
//!
//! [`augment_tree`] turns a tree on `Q` into a tree on `P` by attaching
//! each missing terminal to its nearest point of `Q`, which realizes the
//! continuity estimate `smt(P) <= smt(Q) + |P| e(P, Q)`.

use crate::error::{Error, Result};
use crate::graph::{mst, tree_length, IndexedGraph, SteinerTree};
use crate::metric::{ExtLength, IndexSet, Metric, MetricSpace};

/// Hard cap on terminal count for the exact dynamic program (3^k subset
/// sweep); larger inputs are a hard error.
pub const TERMINAL_CAP: usize = 12;

/// Which engine produced an [`SmtResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmtMethod {
    DpExact,
    TopologyExact,
    MstUpper,
    MooreLower,
}

impl SmtMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SmtMethod::DpExact => "dp_exact",
            SmtMethod::TopologyExact => "topology_exact",
            SmtMethod::MstUpper => "mst_upper",
            SmtMethod::MooreLower => "moore_lower",
        }
    }
}

/// A Steiner tree computation: witness tree, its length, the engine, and a
/// certificate interval `[lower, upper]` with `lower <= length <= upper`.
///
/// Trees from the euclidean engine may use free Steiner points that are not
/// sample points; those get virtual indices `space.len()..` and their
/// coordinates live in `steiner_coords`.
#[derive(Debug, Clone)]
pub struct SmtResult {
    pub tree: SteinerTree,
    pub steiner_coords: Vec<[f64; 2]>,
    pub length: ExtLength,
    pub method: SmtMethod,
    pub lower: f64,
    pub upper: f64,
}

/// A euclidean space extended with free Steiner coordinates at virtual
/// indices `base.len()..`.
pub struct ExtendedSpace<'a> {
    base: &'a MetricSpace,
    extra: Vec<[f64; 2]>,
}

impl<'a> ExtendedSpace<'a> {
    pub fn new(base: &'a MetricSpace, extra: Vec<[f64; 2]>) -> ExtendedSpace<'a> {
        ExtendedSpace { base, extra }
    }

    fn coords(&self, i: usize) -> [f64; 2] {
        if i < self.base.len() {
            let c = self.base.coords(i).expect("euclidean base");
            [c[0], c[1]]
        } else {
            self.extra[i - self.base.len()]
        }
    }
}

impl Metric for ExtendedSpace<'_> {
    fn point_count(&self) -> usize {
        self.base.len() + self.extra.len()
    }

    fn dist_ix(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.coords(i), self.coords(j));
        (a[0] - b[0]).hypot(a[1] - b[1])
    }
}

// ---------------------------------------------------------------------------
// Dreyfus-Wagner dynamic programming
// ---------------------------------------------------------------------------

/// Exact minimum-length tree with vertex set between `p` and
/// `p  + candidates`, over the metric closure of the sample.
///
/// `p` must be non-empty and at most [`TERMINAL_CAP`] terminals.
pub fn smt_restricted(
    space: &impl Metric,
    p: &IndexSet,
    candidates: &IndexSet,
) -> Result<SmtResult> {
    smt_restricted_at(space, p, candidates, None)
}

/// [`smt_restricted`] with an eps annotation for cap errors raised inside a
/// net-level sweep.
pub fn smt_restricted_at(
    space: &impl Metric,
    p: &IndexSet,
    candidates: &IndexSet,
    eps: Option<f64>,
) -> Result<SmtResult> {
    if p.is_empty() {
        return Err(Error::EmptySet {
            context: "smt_restricted needs a non-empty terminal set",
        });
    }
    if p.len() > TERMINAL_CAP {
        return Err(Error::TerminalCapExceeded {
            got: p.len(),
            cap: TERMINAL_CAP,
            eps,
        });
    }
    for &i in p.as_slice().iter().chain(candidates.as_slice()) {
        if i >= space.point_count() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: space.point_count(),
            });
        }
    }

    if p.len() == 1 {
        let g = IndexedGraph::new(p.clone(), vec![])?;
        let tree = SteinerTree::new(g, p.clone())?;
        return Ok(SmtResult {
            tree,
            steiner_coords: vec![],
            length: ExtLength::ZERO,
            method: SmtMethod::DpExact,
            lower: 0.0,
            upper: 0.0,
        });
    }

    // Vertex universe: terminals first, then candidates not already in p.
    let mut verts: Vec<usize> = p.iter().collect();
    verts.extend(candidates.iter().filter(|&c| !p.contains(c)));
    let n = verts.len();
    let k = p.len();
    let d = |a: usize, b: usize| space.dist_ix(verts[a], verts[b]);

    // Masks range over terminals 1..k; terminal 0 is the root.
    let bits = k - 1;
    let full: usize = (1 << bits) - 1;
    let mut cost = vec![vec![f64::INFINITY; n]; full + 1];
    // grow[mask][v] = u realizing cost[mask][v] = d(v,u) + merge[mask][u]
    let mut grow = vec![vec![usize::MAX; n]; full + 1];
    // split[mask][u] = submask E realizing the merge at u
    let mut split = vec![vec![0usize; n]; full + 1];

    for t in 0..bits {
        let mask = 1usize << t;
        let term = t + 1; // position in verts
        for v in 0..n {
            cost[mask][v] = d(v, term);
            grow[mask][v] = term;
        }
    }

    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        // merge step: best split of `mask` at each vertex
        let low = mask & mask.wrapping_neg();
        let mut merged = vec![f64::INFINITY; n];
        let mut sub = (mask - 1) & mask;
        while sub != 0 {
            if sub & low != 0 {
                let rest = mask ^ sub;
                for v in 0..n {
                    let c = cost[sub][v] + cost[rest][v];
                    if c < merged[v] {
                        merged[v] = c;
                        split[mask][v] = sub;
                    }
                }
            }
            sub = (sub - 1) & mask;
        }
        // grow step: one metric hop is enough because d is already the
        // shortest path in the metric closure
        for v in 0..n {
            for u in 0..n {
                let c = d(v, u) + merged[u];
                if c < cost[mask][v] {
                    cost[mask][v] = c;
                    grow[mask][v] = u;
                }
            }
        }
    }

    // Reconstruct edges.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut stack = vec![(full, 0usize)];
    while let Some((mask, v)) = stack.pop() {
        if mask.count_ones() == 1 {
            let t = grow[mask][v];
            if t != v {
                edges.push((verts[v], verts[t]));
            }
            continue;
        }
        let u = grow[mask][v];
        if u != v {
            edges.push((verts[v], verts[u]));
        }
        let e = split[mask][u];
        stack.push((e, u));
        stack.push((mask ^ e, u));
    }
    edges.sort_unstable();
    edges.dedup();

    let length = cost[full][0];
    let tree = spanning_tree_of(space, p, edges, length)?;
    debug_assert!((tree_length(space, &tree).value() - length).abs() <= 1e-9 * (1.0 + length));
    Ok(SmtResult {
        tree,
        steiner_coords: vec![],
        length: ExtLength::new(length),
        method: SmtMethod::DpExact,
        lower: length,
        upper: length,
    })
}

/// Assembles the reconstructed edge set into a tree on `p`, discarding
/// redundant zero-length cycle edges that degenerate reconstructions can
/// produce.
fn spanning_tree_of(
    space: &impl Metric,
    p: &IndexSet,
    edges: Vec<(usize, usize)>,
    expected_length: f64,
) -> Result<SteinerTree> {
    let mut vertices: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    vertices.extend(p.iter());
    let vertices = IndexSet::new(vertices);
    // union-find over positions in `vertices`
    let pos = |v: usize| vertices.as_slice().binary_search(&v).unwrap();
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut kept = Vec::with_capacity(edges.len());
    let mut dropped = 0.0f64;
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, pos(a)), find(&mut parent, pos(b)));
        if ra == rb {
            dropped += space.dist_ix(a, b);
            continue;
        }
        parent[ra] = rb;
        kept.push((a, b));
    }
    debug_assert!(
        dropped <= 1e-9 * (1.0 + expected_length),
        "reconstruction dropped positive-length edges"
    );
    let graph = IndexedGraph::new(vertices, kept)?;
    SteinerTree::new(graph, p.clone())
}

// ---------------------------------------------------------------------------
// Exact planar Steiner trees by topology enumeration
// ---------------------------------------------------------------------------

/// Convergence tolerance on Steiner-point movement.
const MOVE_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 10_000;
/// Steiner points closer than this to a terminal are merged into it.
const COLLAPSE_TOLERANCE: f64 = 1e-9;

/// Exact euclidean Steiner minimal tree for up to 4 terminals in the
/// plane.
///
/// Enumerates every labeled tree on the terminals plus `m = 0..=|P|-2`
/// free Steiner points (Steiner degree >= 3), optimizes each topology's
/// Steiner positions by cyclic geometric-median iteration (the length is
/// convex per topology), and returns the shortest. Certificate is
/// `[length - 1e-8, length]`.
pub fn smt_euclidean_small(space: &MetricSpace, p: &IndexSet) -> Result<SmtResult> {
    if !space.is_euclidean() || space.dim() != Some(2) {
        return Err(Error::NonPlanar {
            got: match space.dim() {
                Some(d) => format!("euclidean dim {d}"),
                None => "matrix mode".into(),
            },
        });
    }
    if p.is_empty() {
        return Err(Error::EmptySet {
            context: "smt_euclidean_small needs a non-empty terminal set",
        });
    }
    if p.len() > 4 {
        return Err(Error::ParamOutOfRange {
            what: format!(
                "smt_euclidean_small handles at most 4 terminals, got {}",
                p.len()
            ),
        });
    }
    p.validate_for(space)?;

    let terminals: Vec<[f64; 2]> = p
        .iter()
        .map(|i| {
            let c = space.coords(i).unwrap();
            [c[0], c[1]]
        })
        .collect();
    let k = terminals.len();

    if k == 1 {
        let g = IndexedGraph::new(p.clone(), vec![])?;
        return Ok(finish_topology(
            space,
            SteinerTree::new(g, p.clone())?,
            vec![],
            0.0,
        ));
    }

    let mut best_len = f64::INFINITY;
    let mut best: Option<(Vec<(usize, usize)>, Vec<[f64; 2]>)> = None;

    for m in 0..=(k.saturating_sub(2)) {
        let n = k + m;
        for edges in labeled_trees(n) {
            // Steiner vertices are k..n and must have degree >= 3.
            let mut deg = vec![0usize; n];
            for &(a, b) in &edges {
                deg[a] += 1;
                deg[b] += 1;
            }
            if (k..n).any(|s| deg[s] < 3) {
                continue;
            }
            let (len, positions) = optimize_topology(&terminals, m, &edges);
            if len < best_len {
                best_len = len;
                best = Some((edges, positions));
            }
        }
    }

    let (edges, positions) = best.expect("at least the spanning trees were enumerated");
    let (tree, coords) = realize_topology(space, p, &edges, &positions)?;
    Ok(finish_topology(space, tree, coords, best_len))
}

fn finish_topology(
    space: &MetricSpace,
    tree: SteinerTree,
    coords: Vec<[f64; 2]>,
    length: f64,
) -> SmtResult {
    let ext = ExtendedSpace::new(space, coords.clone());
    let realized = tree_length(&ext, &tree).value();
    debug_assert!((realized - length).abs() <= 1e-7 * (1.0 + length));
    SmtResult {
        tree,
        steiner_coords: coords,
        length: ExtLength::new(realized),
        method: SmtMethod::TopologyExact,
        lower: (realized - 1e-8).max(0.0),
        upper: realized,
    }
}

/// All labeled trees on vertices `0..n` via Pruefer sequences.
fn labeled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 1 {
        return vec![vec![]];
    }
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let len = n - 2;
    let total = n.pow(len as u32);
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut seq = Vec::with_capacity(len);
        let mut c = code;
        for _ in 0..len {
            seq.push(c % n);
            c /= n;
        }
        out.push(pruefer_decode(n, &seq));
    }
    out
}

fn pruefer_decode(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Optimizes the free Steiner positions of one topology; returns the
/// converged length and positions. Vertices `0..k` are terminals, `k..k+m`
/// Steiner points.
fn optimize_topology(
    terminals: &[[f64; 2]],
    m: usize,
    edges: &[(usize, usize)],
) -> (f64, Vec<[f64; 2]>) {
    let k = terminals.len();
    let pos_of = |positions: &[[f64; 2]], v: usize| -> [f64; 2] {
        if v < k {
            terminals[v]
        } else {
            positions[v - k]
        }
    };

    // Initialize Steiner points by a few rounds of neighbor averaging.
    let centroid = {
        let mut c = [0.0f64; 2];
        for t in terminals {
            c[0] += t[0];
            c[1] += t[1];
        }
        [c[0] / k as f64, c[1] / k as f64]
    };
    let mut positions = vec![centroid; m];
    for round in 0..(8 + m) {
        for s in 0..m {
            let v = k + s;
            let mut acc = [0.0f64; 2];
            let mut cnt = 0.0;
            for &(a, b) in edges {
                let other = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                let q = pos_of(&positions, other);
                acc[0] += q[0];
                acc[1] += q[1];
                cnt += 1.0;
            }
            if cnt > 0.0 {
                // tiny index-keyed offset breaks exact coincidences
                let jitter = 1e-7 * (1.0 + (s + round) as f64);
                positions[s] = [acc[0] / cnt + jitter, acc[1] / cnt - jitter];
            }
        }
    }

    // Cyclic damped Weiszfeld sweeps.
    for _ in 0..MAX_SWEEPS {
        let mut movement = 0.0f64;
        for s in 0..m {
            let v = k + s;
            let cur = positions[s];
            let mut num = [0.0f64; 2];
            let mut den = 0.0f64;
            let mut pinned: Option<[f64; 2]> = None;
            for &(a, b) in edges {
                let other = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                let q = pos_of(&positions, other);
                let d = (cur[0] - q[0]).hypot(cur[1] - q[1]);
                if d < 1e-15 {
                    pinned = Some(q);
                    continue;
                }
                num[0] += q[0] / d;
                num[1] += q[1] / d;
                den += 1.0 / d;
            }
            let target = if den > 0.0 {
                [num[0] / den, num[1] / den]
            } else if let Some(q) = pinned {
                q
            } else {
                cur
            };
            let next = [
                0.5 * cur[0] + 0.5 * target[0],
                0.5 * cur[1] + 0.5 * target[1],
            ];
            movement = movement.max((next[0] - cur[0]).hypot(next[1] - cur[1]));
            positions[s] = next;
        }
        if movement < MOVE_TOLERANCE {
            break;
        }
    }

    let mut len = 0.0;
    for &(a, b) in edges {
        let (pa, pb) = (pos_of(&positions, a), pos_of(&positions, b));
        len += (pa[0] - pb[0]).hypot(pa[1] - pb[1]);
    }
    (len, positions)
}

/// Converts an optimized topology into a [`SteinerTree`] over the sample
/// indices plus virtual indices for surviving Steiner points. Steiner
/// points within [`COLLAPSE_TOLERANCE`] of a terminal are merged into it.
fn realize_topology(
    space: &MetricSpace,
    p: &IndexSet,
    edges: &[(usize, usize)],
    positions: &[[f64; 2]],
) -> Result<(SteinerTree, Vec<[f64; 2]>)> {
    let term_ix: Vec<usize> = p.iter().collect();
    let k = term_ix.len();
    let terminals: Vec<[f64; 2]> = term_ix
        .iter()
        .map(|&i| {
            let c = space.coords(i).unwrap();
            [c[0], c[1]]
        })
        .collect();

    // Map topology vertex -> final index (sample index or virtual index).
    let mut coords: Vec<[f64; 2]> = Vec::new();
    let mut map: Vec<usize> = Vec::with_capacity(k + positions.len());
    map.extend(term_ix.iter().copied());
    for &pos in positions {
        let collapse = (0..k).find(|&t| {
            (pos[0] - terminals[t][0]).hypot(pos[1] - terminals[t][1]) < COLLAPSE_TOLERANCE
        });
        match collapse {
            Some(t) => map.push(term_ix[t]),
            None => {
                coords.push(pos);
                map.push(space.len() + coords.len() - 1);
            }
        }
    }

    let mut final_edges: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in edges {
        let (fa, fb) = (map[a], map[b]);
        if fa != fb {
            final_edges.push((fa.min(fb), fa.max(fb)));
        }
    }
    final_edges.sort_unstable();
    final_edges.dedup();
    let mut vertices: Vec<usize> = final_edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    vertices.extend(term_ix.iter().copied());
    let graph = IndexedGraph::new(IndexSet::new(vertices), final_edges)?;
    Ok((SteinerTree::new(graph, p.clone())?, coords))
}

// ---------------------------------------------------------------------------
// Certified bounds without solving
// ---------------------------------------------------------------------------

/// Certificate interval `[mst |P| / (2(|P|-1)), mst]` around `smt(P)`,
/// with the minimum spanning tree as witness. `|P| = 1` gives `[0, 0]`.
pub fn smt_bounds(space: &impl Metric, p: &IndexSet) -> Result<SmtResult> {
    if p.is_empty() {
        return Err(Error::EmptySet {
            context: "smt_bounds needs a non-empty point set",
        });
    }
    let (tree, len) = mst(space, p)?;
    let len = len.value();
    let kf = p.len() as f64;
    let lower = if p.len() == 1 {
        0.0
    } else {
        len * kf / (2.0 * (kf - 1.0))
    };
    Ok(SmtResult {
        tree,
        steiner_coords: vec![],
        length: ExtLength::new(len),
        method: SmtMethod::MstUpper,
        lower,
        upper: len,
    })
}

// ---------------------------------------------------------------------------
// Tree augmentation (continuity of smt)
// ---------------------------------------------------------------------------

/// Extends a Steiner tree on `Q` to a Steiner tree on `p` by joining each
/// terminal of `p` outside the tree to its nearest point of `Q` (ties
/// toward the lower index).
///
/// The result's length is at most
/// `l(tree_q) + sum_p d(p, Q) <= l(tree_q) + |p| e(p, Q)`.
pub fn augment_tree(
    space: &impl Metric,
    tree_q: &SteinerTree,
    p: &IndexSet,
) -> Result<SteinerTree> {
    if p.is_empty() {
        return Err(Error::EmptySet {
            context: "augment_tree needs a non-empty terminal set",
        });
    }
    let q = tree_q.terminals();
    let mut edges: Vec<(usize, usize)> = tree_q.edges().to_vec();
    let mut vertices: Vec<usize> = tree_q.vertices().iter().collect();
    for v in p.iter() {
        if tree_q.vertices().contains(v) {
            continue;
        }
        let mut best = f64::INFINITY;
        let mut nearest = usize::MAX;
        for u in q.iter() {
            let d = space.dist_ix(v, u);
            if d < best {
                best = d;
                nearest = u;
            }
        }
        if nearest == usize::MAX {
            return Err(Error::EmptySet {
                context: "augment_tree needs a tree with at least one terminal",
            });
        }
        edges.push((v, nearest));
        vertices.push(v);
    }
    let graph = IndexedGraph::new(IndexSet::new(vertices), edges)?;
    SteinerTree::new(graph, p.clone())
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

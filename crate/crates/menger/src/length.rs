//! Length functionals on finite samples.
//!
//! The three functionals are suprema over finite subsets and can only be
//! approached, never certified exactly, from a finite sample:
//!
//! - Menger length `L_M(A) = sup mst(P)`,
//! - Menger-Choquet length `L_MC(A) = sup smt(P)` (free Steiner points),
//! - intrinsic Menger length `L_IM(A) = sup smt_A(P)` (Steiner points
//!   from `A` itself).
//!
//! Estimators sweep a decreasing eps schedule of farthest-point nets and
//! evaluate the best available tree engine per net; every reported value
//! carries its direction and the resolution parameters that produced it,
//! including a certified interval per net level. Complementing the
//! net-based lower estimates, [`proof_cover`] emits a delta-cover of the
//! sample whose total diameter certifies an upper bound on the
//! delta-resolution outer linear measure, and [`cover_join_tree`] runs the
//! converse construction from a cover to a Steiner tree.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{
    cut_chain, make_proper, maximal_chains, mst, tree_length, Chain, IndexedGraph, SteinerTree,
};
use crate::metric::{
    diam, farthest_point_net, max_eps_separated, max_eps_separated_containing,
    min_pairwise_distance, ExtLength, IndexSet, Metric, MetricSpace,
};
use crate::steiner::{
    smt_euclidean_small, smt_restricted, smt_restricted_at, ExtendedSpace, SmtMethod,
    TERMINAL_CAP,
};

/// Default eps schedule for net sweeps.
pub const DEFAULT_EPS_SCHEDULE: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// Cap on Steiner candidates handed to the dynamic program per net level.
const DP_CANDIDATE_CAP: usize = 128;

// ---------------------------------------------------------------------------
// Estimate types
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[allow(clippy::enum_variant_names)]
pub enum Functional {
    #[serde(rename = "L_M")]
    Menger,
    #[serde(rename = "L_MC")]
    MengerChoquet,
    #[serde(rename = "L_IM")]
    IntrinsicMenger,
    #[serde(rename = "Lstar_delta_upper")]
    CoverUpper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Lower,
    Upper,
    Exact,
}

/// Where the Steiner-candidate pool for `L_MC` levels comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CandidateSource {
    /// Candidates subsampled from the sample itself.
    Sample,
    /// Candidates on a square grid of the given pitch over the bounding
    /// box (euclidean planar spaces only).
    Grid { pitch: f64 },
}

/// One net level of an estimator sweep.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateLevel {
    pub eps: f64,
    pub net_size: usize,
    pub engine: &'static str,
    /// The engine's tree length for this net.
    pub value: f64,
    /// Certified interval around the true smt of this net:
    /// `moore_lower <= smt(net) <= upper`.
    pub moore_lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateParams {
    pub eps_schedule: Vec<f64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_pitch: Option<f64>,
    /// Best fully certified lower bound across levels (exact planar smt
    /// values, or the spanning-tree lower bound `mst k / (2(k-1))`).
    pub certified_lower: f64,
    pub levels: Vec<EstimateLevel>,
}

/// A functional estimate: headline value, bound direction, and the
/// resolution parameters that produced it. Net-based suprema are reported
/// as lower estimates; cover sums as upper bounds.
#[derive(Debug, Clone)]
pub struct LengthEstimate {
    pub functional: Functional,
    pub value: ExtLength,
    pub direction: Direction,
    pub params: EstimateParams,
    /// Net of the best level (the witness subset realizing the headline).
    pub witness_net: IndexSet,
}

// ---------------------------------------------------------------------------
// Net-level engine
// ---------------------------------------------------------------------------

struct LevelOutcome {
    level: EstimateLevel,
    net: IndexSet,
}

/// Evaluates one net with the best engine available for its size:
/// exact planar topology solve (<= 4 terminals), restricted-candidate
/// dynamic program (<= [`TERMINAL_CAP`]), spanning tree beyond that.
fn evaluate_net(
    space: &MetricSpace,
    a: &IndexSet,
    net: IndexSet,
    eps: f64,
    source: CandidateSource,
) -> Result<LevelOutcome> {
    let k = net.len();
    let (_, mst_len) = mst(space, &net)?;
    let mst_len = mst_len.value();
    let moore = if k <= 1 {
        0.0
    } else {
        mst_len * k as f64 / (2.0 * (k as f64 - 1.0))
    };

    let planar = space.is_euclidean() && space.dim() == Some(2);
    let (engine, value) = if k <= 4 && planar {
        let r = smt_euclidean_small(space, &net)?;
        (SmtMethod::TopologyExact, r.length.value())
    } else if k <= TERMINAL_CAP {
        let value = match source {
            CandidateSource::Sample => {
                let cands = subsample(&a.difference(&net), DP_CANDIDATE_CAP);
                smt_restricted(space, &net, &cands)?.length.value()
            }
            CandidateSource::Grid { pitch } => {
                if !planar {
                    return Err(Error::NonPlanar {
                        got: "matrix mode (grid candidates need a planar space)".into(),
                    });
                }
                let grid = grid_coords(space, a, pitch)?;
                let ext = ExtendedSpace::new(space, grid.clone());
                let cands: IndexSet =
                    (space.len()..space.len() + grid.len()).collect();
                smt_restricted(&ext, &net, &cands)?.length.value()
            }
        };
        (SmtMethod::DpExact, value.min(mst_len))
    } else {
        (SmtMethod::MstUpper, mst_len)
    };

    Ok(LevelOutcome {
        level: EstimateLevel {
            eps,
            net_size: k,
            engine: engine.as_str(),
            value,
            moore_lower: moore,
            upper: mst_len,
        },
        net,
    })
}

/// Deterministic even subsample of at most `cap` indices.
fn subsample(set: &IndexSet, cap: usize) -> IndexSet {
    if set.len() <= cap {
        return set.clone();
    }
    let items = set.as_slice();
    (0..cap)
        .map(|i| items[i * items.len() / cap])
        .collect()
}

/// Square grid of pitch `pitch` over the bounding box of `a`, capped to a
/// workable candidate count by coarsening evenly.
fn grid_coords(space: &MetricSpace, a: &IndexSet, pitch: f64) -> Result<Vec<[f64; 2]>> {
    if !(pitch > 0.0) {
        return Err(Error::ParamOutOfRange {
            what: format!("grid pitch must be positive, got {pitch}"),
        });
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for i in a.iter() {
        let c = space.coords(i).expect("planar space");
        for d in 0..2 {
            lo[d] = lo[d].min(c[d]);
            hi[d] = hi[d].max(c[d]);
        }
    }
    let counts = |p: f64| -> (usize, usize) {
        (
            ((hi[0] - lo[0]) / p).floor() as usize + 1,
            ((hi[1] - lo[1]) / p).floor() as usize + 1,
        )
    };
    let mut p = pitch;
    let (mut nx, mut ny) = counts(p);
    while nx * ny > 192 {
        p *= 1.5;
        let c = counts(p);
        nx = c.0;
        ny = c.1;
    }
    let mut out = Vec::with_capacity(nx * ny);
    for ix in 0..nx {
        for iy in 0..ny {
            out.push([lo[0] + ix as f64 * p, lo[1] + iy as f64 * p]);
        }
    }
    Ok(out)
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() || schedule.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::ParamOutOfRange {
            what: "eps schedule must be non-empty and positive".into(),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// The three estimators
// ---------------------------------------------------------------------------

/// Lower estimate of the Menger length `L_M(A) = sup mst(P)`.
///
/// Every level's `mst(net)` is a true lower bound of the supremum, so the
/// headline (their maximum) is certified. The supremum itself is only
/// approached: mst is not monotone under adding points, so no finite sweep
/// can certify it from above.
pub fn menger_estimate(
    space: &MetricSpace,
    a: &IndexSet,
    eps_schedule: &[f64],
    seed: u64,
) -> Result<LengthEstimate> {
    check_schedule(eps_schedule)?;
    if a.is_empty() {
        return Err(Error::EmptySet {
            context: "menger_estimate needs a non-empty set",
        });
    }
    let mut levels = Vec::new();
    let mut best_value = 0.0f64;
    let mut witness = IndexSet::new(vec![a.as_slice()[0]]);
    for &eps in eps_schedule {
        let net = farthest_point_net(space, a, eps, seed)?;
        let (_, len) = mst(space, &net)?;
        let len = len.value();
        levels.push(EstimateLevel {
            eps,
            net_size: net.len(),
            engine: SmtMethod::MstUpper.as_str(),
            value: len,
            moore_lower: len,
            upper: len,
        });
        if len > best_value {
            best_value = len;
            witness = net;
        }
    }
    Ok(LengthEstimate {
        functional: Functional::Menger,
        value: ExtLength::new(best_value),
        direction: Direction::Lower,
        params: EstimateParams {
            eps_schedule: eps_schedule.to_vec(),
            seed,
            grid_pitch: None,
            certified_lower: best_value,
            levels,
        },
        witness_net: witness,
    })
}

/// Lower estimate of the Menger-Choquet length `L_MC(A) = sup smt(P)`.
///
/// Since `smt` is monotone under terminal containment, values along nested
/// nets are non-decreasing and the sweep approaches the supremum from
/// below. Exact planar solves certify their levels; dynamic-program and
/// spanning-tree levels carry the `[moore_lower, upper]` bracket instead,
/// and `params.certified_lower` keeps the best fully certified bound.
pub fn menger_choquet_estimate(
    space: &MetricSpace,
    a: &IndexSet,
    eps_schedule: &[f64],
    source: CandidateSource,
    seed: u64,
) -> Result<LengthEstimate> {
    check_schedule(eps_schedule)?;
    if a.is_empty() {
        return Err(Error::EmptySet {
            context: "menger_choquet_estimate needs a non-empty set",
        });
    }
    let mut levels = Vec::new();
    let mut best_value = 0.0f64;
    let mut certified = 0.0f64;
    let mut witness = IndexSet::new(vec![a.as_slice()[0]]);
    for &eps in eps_schedule {
        let net = farthest_point_net(space, a, eps, seed)?;
        let out = evaluate_net(space, a, net, eps, source)?;
        certified = certified.max(if out.level.engine == SmtMethod::TopologyExact.as_str() {
            out.level.value
        } else {
            out.level.moore_lower
        });
        if out.level.value > best_value {
            best_value = out.level.value;
            witness = out.net.clone();
        }
        levels.push(out.level);
    }
    Ok(LengthEstimate {
        functional: Functional::MengerChoquet,
        value: ExtLength::new(best_value),
        direction: Direction::Lower,
        params: EstimateParams {
            eps_schedule: eps_schedule.to_vec(),
            seed,
            grid_pitch: match source {
                CandidateSource::Grid { pitch } => Some(pitch),
                CandidateSource::Sample => None,
            },
            certified_lower: certified,
            levels,
        },
        witness_net: witness,
    })
}

/// Lower estimate of the intrinsic Menger length
/// `L_IM(A) = sup smt_A(P)`: like the Menger-Choquet sweep but with
/// Steiner candidates restricted to `A` itself, solved exactly per level.
///
/// Errors with the offending level's eps if a net exceeds the terminal
/// cap.
pub fn intrinsic_menger_estimate(
    space: &MetricSpace,
    a: &IndexSet,
    eps_schedule: &[f64],
    seed: u64,
) -> Result<LengthEstimate> {
    check_schedule(eps_schedule)?;
    if a.is_empty() {
        return Err(Error::EmptySet {
            context: "intrinsic_menger_estimate needs a non-empty set",
        });
    }
    let mut levels = Vec::new();
    let mut best_value = 0.0f64;
    let mut witness = IndexSet::new(vec![a.as_slice()[0]]);
    for &eps in eps_schedule {
        let net = farthest_point_net(space, a, eps, seed)?;
        let k = net.len();
        let r = smt_restricted_at(space, &net, &a.difference(&net), Some(eps))?;
        let (_, mst_len) = mst(space, &net)?;
        let mst_len = mst_len.value();
        let value = r.length.value().min(mst_len);
        levels.push(EstimateLevel {
            eps,
            net_size: k,
            engine: SmtMethod::DpExact.as_str(),
            value,
            moore_lower: if k <= 1 {
                0.0
            } else {
                mst_len * k as f64 / (2.0 * (k as f64 - 1.0))
            },
            upper: mst_len,
        });
        if value > best_value {
            best_value = value;
            witness = net;
        }
    }
    let certified = levels.iter().map(|l| l.moore_lower).fold(0.0, f64::max);
    Ok(LengthEstimate {
        functional: Functional::IntrinsicMenger,
        value: ExtLength::new(best_value),
        direction: Direction::Lower,
        params: EstimateParams {
            eps_schedule: eps_schedule.to_vec(),
            seed,
            grid_pitch: None,
            certified_lower: certified,
            levels,
        },
        witness_net: witness,
    })
}

// ---------------------------------------------------------------------------
// Cardinality bound check
// ---------------------------------------------------------------------------

/// Tests the totally-bounded cardinality bound: every maximal
/// eps-separated subset found across seeds 0..=99 (plus the
/// farthest-point net) has at most `max(2 lmc_upper / eps, 1)` points.
pub fn separated_bound_check(
    space: &MetricSpace,
    a: &IndexSet,
    eps: f64,
    lmc_upper: ExtLength,
) -> Result<bool> {
    if !(eps > 0.0) {
        return Err(Error::ParamOutOfRange {
            what: format!("eps must be positive, got {eps}"),
        });
    }
    let bound = (2.0 * lmc_upper.value() / eps).max(1.0) + 1e-9;
    for seed in 0..100u64 {
        let net = max_eps_separated(space, a, eps, seed)?;
        if net.len() as f64 > bound {
            return Ok(false);
        }
    }
    let net = farthest_point_net(space, a, eps, 0)?;
    Ok(net.len() as f64 <= bound)
}

// ---------------------------------------------------------------------------
// Covers
// ---------------------------------------------------------------------------

/// A finite delta-cover of a recorded index set: every element has
/// diameter at most `delta` and the union contains `covered`.
#[derive(Debug, Clone)]
pub struct Cover {
    pub elements: Vec<IndexSet>,
    pub delta: f64,
    pub covered: IndexSet,
}

impl Cover {
    /// Checks the two delta-cover conditions against the space.
    pub fn validate(&self, space: &MetricSpace) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(Error::InvalidCover {
                reason: format!("delta must be positive, got {}", self.delta),
            });
        }
        let mut union = IndexSet::empty();
        for (k, el) in self.elements.iter().enumerate() {
            let d = diam(space, el)?.value();
            if d > self.delta + 1e-12 {
                return Err(Error::InvalidCover {
                    reason: format!(
                        "element {k} has diameter {d} exceeding delta = {}",
                        self.delta
                    ),
                });
            }
            union = union.union(el);
        }
        if !self.covered.is_subset_of(&union) {
            return Err(Error::InvalidCover {
                reason: "union of elements does not contain the covered set".into(),
            });
        }
        Ok(())
    }
}

/// Validates the cover and returns the sum of element diameters: a
/// certified upper bound for the delta-resolution outer measure of the
/// covered set.
pub fn cover_sum(space: &MetricSpace, cover: &Cover) -> Result<ExtLength> {
    cover.validate(space)?;
    let mut total = 0.0;
    for el in &cover.elements {
        total += diam(space, el)?.value();
    }
    Ok(ExtLength::new(total))
}

// ---------------------------------------------------------------------------
// The delta-cover construction (first half of the equality proof)
// ---------------------------------------------------------------------------

/// Result of the delta-cover pipeline.
#[derive(Debug, Clone)]
pub struct ProofCover {
    pub cover: Cover,
    /// Exact total diameter of the emitted elements. On a finite sample
    /// this can sit below the continuum length: element diameters are
    /// chords and lose a little at curve corners.
    pub sum: ExtLength,
    /// The length-based certificate the bound chain manipulates:
    /// `sum_pieces (l + 4 eps) + sum_large (l(T_v) + 2 eps)`. It dominates
    /// `sum` (each element's diameter is at most its piece length plus
    /// fattening) and the core tree length, so it upper-ends the sandwich
    /// around the true length.
    pub length_upper: f64,
    /// The guaranteed ceiling `(1 + 16 delta)(lmc_estimate + delta/4) + 9 delta`.
    pub bound: f64,
    pub lmc_estimate: f64,
    pub eps: f64,
    pub p_size: usize,
    pub spanning_length: f64,
    pub core_length: f64,
    pub large_components: usize,
}

/// Builds a delta-cover of the sample by cutting a near-optimal Steiner
/// tree into chain pieces, following the constructive proof pipeline:
/// choose a witness subset `P`, extend it to a fine eps-net, span the net
/// with a tree, split off the components hanging away from the `P`-core,
/// cut the core's maximal chains to threshold `delta/2`, and fatten the
/// pieces into cover elements.
///
/// The cover always validates, and its sum satisfies
/// `sum <= (1 + 16 delta)(lmc_estimate + delta/4) + 9 delta`.
/// Requires `0 < delta < 1/8`.
pub fn proof_cover(space: &MetricSpace, a: &IndexSet, delta: f64) -> Result<ProofCover> {
    if !(delta > 0.0 && delta < 0.125) {
        return Err(Error::ParamOutOfRange {
            what: format!("proof_cover needs delta in (0, 1/8), got {delta}"),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptySet {
            context: "proof_cover needs a non-empty set",
        });
    }
    let a_diam = diam(space, a)?.value();
    if a_diam == 0.0 {
        // All points coincide: one element of diameter zero covers A.
        let cover = Cover {
            elements: vec![a.clone()],
            delta,
            covered: a.clone(),
        };
        cover.validate(space)?;
        return Ok(ProofCover {
            cover,
            sum: ExtLength::ZERO,
            length_upper: 0.0,
            bound: (1.0 + 16.0 * delta) * (delta / 4.0) + 9.0 * delta,
            lmc_estimate: 0.0,
            eps: delta * delta,
            p_size: a.len().min(1),
            spanning_length: 0.0,
            core_length: 0.0,
            large_components: 0,
        });
    }

    // Candidate witness subsets: farthest-point nets from coarse to fine,
    // then the full sample. Level values follow the estimator engines, so
    // the full-sample level value is mst(A) and lmc_est >= l(T').
    let mut candidates: Vec<IndexSet> = Vec::new();
    let mut eps_level = a_diam / 2.0;
    let eps_floor = (delta / 8.0).min(a_diam / 256.0);
    while eps_level > eps_floor {
        candidates.push(farthest_point_net(space, a, eps_level, 0)?);
        eps_level /= 2.0;
    }
    candidates.push(a.clone());
    let values: Vec<f64> = candidates
        .iter()
        .map(|net| -> Result<f64> {
            let k = net.len();
            if k <= 4 && space.is_euclidean() && space.dim() == Some(2) {
                Ok(smt_euclidean_small(space, net)?.length.value())
            } else if k <= TERMINAL_CAP {
                let cands = subsample(&a.difference(net), DP_CANDIDATE_CAP);
                let v = smt_restricted(space, net, &cands)?.length.value();
                Ok(v.min(mst(space, net)?.1.value()))
            } else {
                Ok(mst(space, net)?.1.value())
            }
        })
        .collect::<Result<_>>()?;
    let lmc_est = values.iter().fold(0.0f64, |m, &v| m.max(v));

    // Coarsest witness within delta/4 of the estimate.
    let pick = (0..candidates.len())
        .find(|&i| values[i] > lmc_est - delta / 4.0 && candidates[i].len() >= 2)
        .unwrap_or(candidates.len() - 1);

    let mut attempt = build_cover(space, a, delta, &candidates[pick], lmc_est)?;
    if attempt.is_none() && pick != candidates.len() - 1 {
        // A long component hung off the core; the full sample as witness
        // leaves no components at all.
        attempt = build_cover(space, a, delta, a, lmc_est)?;
    }
    let result = attempt.ok_or_else(|| Error::InvalidCover {
        reason: "could not assemble a valid delta-cover".into(),
    })?;
    result.cover.validate(space)?;
    debug_assert!(result.sum.value() <= result.bound);
    debug_assert!(result.length_upper <= result.bound);
    Ok(result)
}

/// One pass of the cover pipeline for a fixed witness subset; returns
/// `None` when a hanging component is too long for its fattened hull to
/// fit in a delta-ball (the caller then retries with the full sample).
fn build_cover(
    space: &MetricSpace,
    a: &IndexSet,
    delta: f64,
    p: &IndexSet,
    lmc_est: f64,
) -> Result<Option<ProofCover>> {
    let min_p = min_pairwise_distance(space, p);
    let eps = {
        let mut e = (delta * delta)
            .min(delta / p.len() as f64)
            .min(delta * delta * delta);
        if min_p.is_finite() && min_p > 0.0 {
            e = e.min(min_p);
        }
        e / 16.0
    };

    // Extend P to a maximal eps-separated net and span it.
    let net = max_eps_separated_containing(space, a, eps, 0, p)?;
    let (t_prime, t_prime_len) = mst(space, &net)?;

    // Core subtree spanning P: strip non-P leaves.
    let core = make_proper(&SteinerTree::new(t_prime.graph().clone(), p.clone())?);
    let core_len = tree_length(space, &core).value();

    // Components hanging off the core: connected pieces of T' minus the
    // core's edges, each anchored at exactly one core vertex.
    let mut hanging: Vec<(usize, Vec<usize>, f64)> = Vec::new(); // (anchor, vertices, length)
    {
        let core_edges: Vec<(usize, usize)> = core.edges().to_vec();
        let rest: Vec<(usize, usize)> = t_prime
            .edges()
            .iter()
            .copied()
            .filter(|e| !core_edges.contains(e))
            .collect();
        let mut adj: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
        for &(x, y) in &rest {
            adj.entry(x).or_default().push(y);
            adj.entry(y).or_default().push(x);
        }
        let mut seen: std::collections::BTreeSet<usize> = std::collections::BTreeSet::new();
        for v in core.vertices().iter() {
            if seen.contains(&v) || !adj.contains_key(&v) {
                continue;
            }
            // flood the component containing the anchor v
            let mut comp = vec![v];
            let mut stack = vec![v];
            let mut len = 0.0;
            seen.insert(v);
            while let Some(x) = stack.pop() {
                for &y in adj.get(&x).into_iter().flatten() {
                    if seen.insert(y) {
                        comp.push(y);
                        stack.push(y);
                    }
                }
            }
            for &(x, y) in &rest {
                if comp.contains(&x) && comp.contains(&y) {
                    len += space.dist_ix(x, y);
                }
            }
            hanging.push((v, comp, len));
        }
    }

    // Every hanging component must fit inside a delta-ball once fattened.
    if hanging
        .iter()
        .any(|(_, _, len)| *len + 2.0 * eps > delta * (1.0 - 1e-9))
    {
        return Ok(None);
    }

    // Cut the core's chains; the threshold leaves room to extend each
    // piece across its break edge so no chain length escapes the cover
    // sum, keeping the sum an upper estimate of the core length.
    let t = delta / 2.0 - 4.0 * eps;
    let chains: Vec<Chain> = if p.len() >= 2 {
        maximal_chains(&core)?
    } else {
        vec![]
    };
    let mut pieces: Vec<Vec<usize>> = Vec::new();
    let mut piece_lengths: Vec<f64> = Vec::new();
    for chain in &chains {
        let (cut, _outsize) = cut_chain(space, chain, t)?;
        for (k, piece) in cut.iter().enumerate() {
            let mut verts = piece.vertices().to_vec();
            let mut len = piece.length(space);
            if k + 1 < cut.len() {
                let last = *verts.last().unwrap();
                let next = cut[k + 1].vertices()[0];
                let d = space.dist_ix(last, next);
                if d <= t {
                    verts.push(next);
                    len += d;
                }
            }
            pieces.push(verts);
            piece_lengths.push(len);
        }
    }
    if pieces.is_empty() {
        pieces.push(core.vertices().iter().collect());
        piece_lengths.push(0.0);
    }

    // Fatten pieces by 2 eps and large components by eps into elements.
    let mut elements: Vec<IndexSet> = Vec::new();
    for piece in &pieces {
        let mut el = Vec::new();
        for x in a.iter() {
            if piece.iter().any(|&v| space.dist_ix(x, v) < 2.0 * eps) {
                el.push(x);
            }
        }
        elements.push(IndexSet::new(el));
    }
    let mut large = 0usize;
    for (_, comp, len) in &hanging {
        if *len >= eps {
            large += 1;
            let mut el = Vec::new();
            for x in a.iter() {
                if comp.iter().any(|&v| space.dist_ix(x, v) < eps) {
                    el.push(x);
                }
            }
            elements.push(IndexSet::new(el));
        }
    }

    let cover = Cover {
        elements,
        delta,
        covered: a.clone(),
    };
    if cover.validate(space).is_err() {
        return Ok(None);
    }
    let sum = cover_sum(space, &cover)?;
    let length_upper = piece_lengths
        .iter()
        .map(|l| l + 4.0 * eps)
        .chain(
            hanging
                .iter()
                .filter(|(_, _, l)| *l >= eps)
                .map(|(_, _, l)| l + 2.0 * eps),
        )
        .sum::<f64>();
    let bound = (1.0 + 16.0 * delta) * (lmc_est + delta / 4.0) + 9.0 * delta;
    debug_assert!(sum.value() <= length_upper + 1e-9);
    Ok(Some(ProofCover {
        cover,
        sum,
        length_upper,
        bound,
        lmc_estimate: lmc_est,
        eps,
        p_size: p.len(),
        spanning_length: t_prime_len.value(),
        core_length: core_len,
        large_components: large,
    }))
}

// ---------------------------------------------------------------------------
// Cover-to-tree construction (second half of the equality proof)
// ---------------------------------------------------------------------------

/// Builds a Steiner tree on `p` from a connected cover: spans the cover's
/// intersection graph, picks junction points in pairwise intersections
/// away from `p`, links each element's points by a path, and takes a
/// spanning tree.
///
/// The tree length is at most `sum_i (|V_i| - 1) diam(U_i)`, which is at
/// most `sum_i diam(U_i) + delta (|p| - 2)` when each element holds at
/// most one point of `p`.
pub fn cover_join_tree(
    space: &MetricSpace,
    cover: &Cover,
    p: &IndexSet,
) -> Result<SteinerTree> {
    if p.len() < 2 {
        return Err(Error::ParamOutOfRange {
            what: "cover_join_tree needs at least 2 terminals".into(),
        });
    }
    cover.validate(space)?;
    for q in p.iter() {
        if !cover.elements.iter().any(|el| el.contains(q)) {
            return Err(Error::InvalidCover {
                reason: format!("terminal {q} is not covered by any element"),
            });
        }
    }

    // Intersection graph over the elements.
    let m = cover.elements.len();
    let mut meets = vec![Vec::new(); m];
    for i in 0..m {
        for j in (i + 1)..m {
            let shares = cover.elements[i]
                .iter()
                .any(|x| cover.elements[j].contains(x));
            if shares {
                meets[i].push(j);
                meets[j].push(i);
            }
        }
    }
    // BFS spanning tree of the intersection graph from element 0.
    let mut parent = vec![usize::MAX; m];
    let mut order = vec![0usize];
    parent[0] = 0;
    let mut head = 0;
    while head < order.len() {
        let i = order[head];
        head += 1;
        for &j in &meets[i] {
            if parent[j] == usize::MAX {
                parent[j] = i;
                order.push(j);
            }
        }
    }
    if order.len() != m {
        return Err(Error::DisconnectedCover);
    }
    // Strip leaves that contain no terminal.
    let mut tree_edges: Vec<(usize, usize)> = (1..m).map(|j| (j, parent[j])).collect();
    let mut alive = vec![true; m];
    let has_terminal: Vec<bool> = cover
        .elements
        .iter()
        .map(|el| el.iter().any(|q| p.contains(q)))
        .collect();
    loop {
        let mut deg = vec![0usize; m];
        for &(i, j) in &tree_edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        let prune: Vec<usize> = (0..m)
            .filter(|&i| alive[i] && !has_terminal[i] && deg[i] <= 1)
            .collect();
        if prune.is_empty() {
            break;
        }
        for &i in &prune {
            alive[i] = false;
        }
        tree_edges.retain(|&(i, j)| alive[i] && alive[j]);
    }

    // Junction points: x_e in (U_i n U_j) \ P, lowest index.
    let mut junction = std::collections::BTreeMap::new();
    for &(i, j) in &tree_edges {
        let x = cover.elements[i]
            .iter()
            .find(|&x| cover.elements[j].contains(x) && !p.contains(x));
        match x {
            Some(x) => {
                junction.insert((i.min(j), i.max(j)), x);
            }
            None => return Err(Error::JunctionUnavailable { a: i.min(j), b: i.max(j) }),
        }
    }

    // V_i = (P n U_i) u { junctions incident to i }, linked by a path.
    let mut graph_edges: Vec<(usize, usize)> = Vec::new();
    let mut vertices: Vec<usize> = p.iter().collect();
    for i in (0..m).filter(|&i| alive[i]) {
        let mut vi: Vec<usize> = cover.elements[i]
            .iter()
            .filter(|&x| p.contains(x))
            .collect();
        for (&(e1, e2), &x) in &junction {
            if e1 == i || e2 == i {
                vi.push(x);
            }
        }
        vi.sort_unstable();
        vi.dedup();
        vertices.extend_from_slice(&vi);
        for w in vi.windows(2) {
            graph_edges.push((w[0], w[1]));
        }
    }
    graph_edges.sort_unstable();
    graph_edges.dedup();
    let g = IndexedGraph::new(IndexSet::new(vertices), graph_edges)?;

    // Spanning tree of G by BFS over its adjacency.
    let adj = g.adjacency();
    let root = g.vertices().iter().next().unwrap();
    let mut seen = vec![root];
    let mut queue = vec![root];
    let mut span_edges = Vec::new();
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for &u in &adj[&v] {
            if !seen.contains(&u) {
                seen.push(u);
                queue.push(u);
                span_edges.push((v, u));
            }
        }
    }
    if seen.len() != g.vertices().len() {
        return Err(Error::DisconnectedCover);
    }
    let tree = SteinerTree::new(
        IndexedGraph::new(g.vertices().clone(), span_edges)?,
        p.clone(),
    )?;
    Ok(tree)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

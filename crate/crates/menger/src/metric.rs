//! Finite metric-space substrate.
//!
//! A [`MetricSpace`] is either a list of euclidean coordinate vectors or an
//! explicit distance matrix (symmetric, zero diagonal, triangle inequality
//! within `1e-9`, validated at load). All sets are index subsets of the
//! space. On top of it live the elementary set functionals: diameter,
//! distance-to-set, excess, Hausdorff distance, eps-separated subsets /
//! eps-nets, and a discrete lower limit of set sequences.
//!
//! Conventions for the empty set: `sup {} = 0` and `inf {} = +inf`, so
//! `diam({}) = 0`, `d(a, {}) = inf`, `e({}, B) = 0` and `D(A, {}) = inf`
//! for non-empty `A`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Validation tolerance for loaded distance matrices.
pub const MATRIX_TOLERANCE: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Extended lengths
// ---------------------------------------------------------------------------

/// A non-negative length that may be `+inf` (the empty-set conventions are
/// the only source of infinities).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtLength(f64);

impl ExtLength {
    pub const ZERO: ExtLength = ExtLength(0.0);
    pub const INFINITY: ExtLength = ExtLength(f64::INFINITY);

    /// Wraps a finite non-negative value (or `+inf`).
    pub fn new(v: f64) -> ExtLength {
        debug_assert!(v >= 0.0 && !v.is_nan(), "length must be >= 0, got {v}");
        ExtLength(v.max(0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl From<f64> for ExtLength {
    fn from(v: f64) -> Self {
        ExtLength::new(v)
    }
}

impl std::fmt::Display for ExtLength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

// ---------------------------------------------------------------------------
// Distance oracle
// ---------------------------------------------------------------------------

/// Anything that can answer point-pair distances by index.
///
/// [`MetricSpace`] implements this; the Steiner solvers also implement it
/// for spaces extended with free (non-sample) Steiner coordinates.
pub trait Metric {
    fn point_count(&self) -> usize;

    /// Distance between points `i` and `j`; both must be `< point_count()`.
    fn dist_ix(&self, i: usize, j: usize) -> f64;
}

// ---------------------------------------------------------------------------
// Metric space
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum SpaceData {
    Euclidean { dim: usize, points: Vec<Vec<f64>> },
    Matrix { matrix: Vec<Vec<f64>> },
}

/// A finite metric space: euclidean point list or explicit distance matrix.
#[derive(Debug, Clone)]
pub struct MetricSpace {
    data: SpaceData,
}

impl MetricSpace {
    /// Builds a euclidean space from coordinate vectors.
    ///
    /// Requires `dim >= 1`, at least one point, every vector of length
    /// `dim`, and finite coordinates.
    pub fn euclidean(dim: usize, points: Vec<Vec<f64>>) -> Result<MetricSpace> {
        if dim == 0 {
            return Err(Error::PointValidation {
                reason: "dim must be positive".into(),
            });
        }
        if points.is_empty() {
            return Err(Error::PointValidation {
                reason: "space needs at least one point".into(),
            });
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::PointValidation {
                    reason: format!("point {i} has {} coordinates, expected {dim}", p.len()),
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::PointValidation {
                    reason: format!("point {i} has a non-finite coordinate"),
                });
            }
        }
        Ok(MetricSpace {
            data: SpaceData::Euclidean { dim, points },
        })
    }

    /// Convenience constructor for planar point sets.
    pub fn plane(points: Vec<[f64; 2]>) -> Result<MetricSpace> {
        MetricSpace::euclidean(2, points.into_iter().map(|p| p.to_vec()).collect())
    }

    /// Builds a matrix-mode space. The matrix must be square, non-negative,
    /// symmetric and zero on the diagonal within [`MATRIX_TOLERANCE`], and
    /// satisfy the triangle inequality within the same tolerance. Invalid
    /// input is rejected, never repaired.
    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<MetricSpace> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::MatrixValidation {
                reason: "matrix must have at least one row".into(),
            });
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::MatrixValidation {
                    reason: format!("row {i} has length {} in a {n}x{n} matrix", row.len()),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::MatrixValidation {
                        reason: format!("entry ({i},{j}) = {v} is not a non-negative real"),
                    });
                }
            }
        }
        for i in 0..n {
            if matrix[i][i].abs() > MATRIX_TOLERANCE {
                return Err(Error::MatrixValidation {
                    reason: format!("diagonal entry ({i},{i}) = {} is not zero", matrix[i][i]),
                });
            }
            for j in (i + 1)..n {
                if (matrix[i][j] - matrix[j][i]).abs() > MATRIX_TOLERANCE {
                    return Err(Error::MatrixValidation {
                        reason: format!(
                            "asymmetric entries ({i},{j}) = {} vs ({j},{i}) = {}",
                            matrix[i][j], matrix[j][i]
                        ),
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if matrix[i][k] > matrix[i][j] + matrix[j][k] + MATRIX_TOLERANCE {
                        return Err(Error::MatrixValidation {
                            reason: format!(
                                "triangle inequality violated on ({i},{j},{k}): {} > {} + {}",
                                matrix[i][k], matrix[i][j], matrix[j][k]
                            ),
                        });
                    }
                }
            }
        }
        Ok(MetricSpace {
            data: SpaceData::Matrix { matrix },
        })
    }

    pub fn len(&self) -> usize {
        match &self.data {
            SpaceData::Euclidean { points, .. } => points.len(),
            SpaceData::Matrix { matrix } => matrix.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 1 is enforced at construction
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.data, SpaceData::Euclidean { .. })
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.data {
            SpaceData::Euclidean { dim, .. } => Some(*dim),
            SpaceData::Matrix { .. } => None,
        }
    }

    /// Coordinates of point `i` in euclidean mode.
    pub fn coords(&self, i: usize) -> Option<&[f64]> {
        match &self.data {
            SpaceData::Euclidean { points, .. } => points.get(i).map(|p| p.as_slice()),
            SpaceData::Matrix { .. } => None,
        }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            })
        } else {
            Ok(())
        }
    }
}

impl Metric for MetricSpace {
    fn point_count(&self) -> usize {
        self.len()
    }

    fn dist_ix(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        match &self.data {
            SpaceData::Euclidean { points, .. } => {
                let (a, b) = (&points[i], &points[j]);
                a.iter()
                    .zip(b.iter())
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt()
            }
            // Read the upper triangle so reported distances are exactly
            // symmetric even when the input was only symmetric within
            // tolerance.
            SpaceData::Matrix { matrix } => matrix[i.min(j)][i.max(j)],
        }
    }
}

// ---------------------------------------------------------------------------
// Index sets
// ---------------------------------------------------------------------------

/// A sorted, duplicate-free set of point indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexSet {
    indices: Vec<usize>,
}

impl IndexSet {
    /// Normalizes (sorts and deduplicates) the given indices.
    pub fn new(mut indices: Vec<usize>) -> IndexSet {
        indices.sort_unstable();
        indices.dedup();
        IndexSet { indices }
    }

    pub fn empty() -> IndexSet {
        IndexSet {
            indices: Vec::new(),
        }
    }

    /// All indices of `space`, in order.
    pub fn full(space: &MetricSpace) -> IndexSet {
        IndexSet {
            indices: (0..space.len()).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut v = self.indices.clone();
        v.extend(other.iter());
        IndexSet::new(v)
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet {
            indices: self.iter().filter(|&i| !other.contains(i)).collect(),
        }
    }

    /// Ensures all members are valid indices of `space`.
    pub fn validate_for(&self, space: &MetricSpace) -> Result<()> {
        match self.indices.last() {
            Some(&max) if max >= space.len() => Err(Error::IndexOutOfRange {
                index: max,
                len: space.len(),
            }),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        IndexSet::new(iter.into_iter().collect())
    }
}

// ---------------------------------------------------------------------------
// Elementary functionals
// ---------------------------------------------------------------------------

/// Distance between two points.
pub fn dist(space: &MetricSpace, i: usize, j: usize) -> Result<ExtLength> {
    space.check_index(i)?;
    space.check_index(j)?;
    Ok(ExtLength::new(space.dist_ix(i, j)))
}

/// Diameter of a set: `sup` of pairwise distances, `0` for the empty set
/// and singletons.
pub fn diam(space: &MetricSpace, set: &IndexSet) -> Result<ExtLength> {
    set.validate_for(space)?;
    let s = set.as_slice();
    let mut best = 0.0f64;
    for (k, &i) in s.iter().enumerate() {
        for &j in &s[k + 1..] {
            best = best.max(space.dist_ix(i, j));
        }
    }
    Ok(ExtLength::new(best))
}

/// Distance from point `i` to the set `b`; `inf` when `b` is empty.
pub fn dist_to_set(space: &MetricSpace, i: usize, b: &IndexSet) -> Result<ExtLength> {
    space.check_index(i)?;
    b.validate_for(space)?;
    Ok(ExtLength::new(dist_to_set_ix(space, i, b.as_slice())))
}

fn dist_to_set_ix(space: &impl Metric, i: usize, b: &[usize]) -> f64 {
    b.iter()
        .map(|&j| space.dist_ix(i, j))
        .fold(f64::INFINITY, f64::min)
}

/// Excess (Hausdorff hemimetric) of `a` over `b`:
/// `sup_{x in a} d(x, b)`. Empty `a` gives `0`; empty `b` with non-empty
/// `a` gives `inf`.
pub fn excess(space: &MetricSpace, a: &IndexSet, b: &IndexSet) -> Result<ExtLength> {
    a.validate_for(space)?;
    b.validate_for(space)?;
    let mut worst = 0.0f64;
    for i in a.iter() {
        worst = worst.max(dist_to_set_ix(space, i, b.as_slice()));
    }
    Ok(ExtLength::new(worst))
}

/// Hausdorff distance: the larger of the two excesses.
pub fn hausdorff(space: &MetricSpace, a: &IndexSet, b: &IndexSet) -> Result<ExtLength> {
    let e_ab = excess(space, a, b)?;
    let e_ba = excess(space, b, a)?;
    Ok(if e_ab >= e_ba { e_ab } else { e_ba })
}

// ---------------------------------------------------------------------------
// eps-separated subsets and eps-nets
// ---------------------------------------------------------------------------

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed-keyed permutation of `items`: the identity for seed 0, otherwise a
/// deterministic Fisher-Yates shuffle.
fn seeded_order(items: &[usize], seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = items.to_vec();
    if seed != 0 {
        let mut state = seed;
        for i in (1..order.len()).rev() {
            let j = (splitmix64(&mut state) % (i as u64 + 1)) as usize;
            order.swap(i, j);
        }
    }
    order
}

/// Greedy maximal eps-separated subset of `a`.
///
/// Iterates `a` in a seed-keyed order (ascending for seed 0) and accepts a
/// point iff it is at distance `>= eps` from everything accepted so far.
/// The result is eps-separated and, being maximal, an eps-net of `a`.
pub fn max_eps_separated(
    space: &MetricSpace,
    a: &IndexSet,
    eps: f64,
    seed: u64,
) -> Result<IndexSet> {
    max_eps_separated_containing(space, a, eps, seed, &IndexSet::empty())
}

/// Like [`max_eps_separated`] but seeds the accepted set with `base` (which
/// must itself be eps-separated) before scanning the rest of `a`. Used by
/// the delta-cover pipeline, which extends a chosen subset to a maximal
/// eps-separated net containing it.
pub fn max_eps_separated_containing(
    space: &MetricSpace,
    a: &IndexSet,
    eps: f64,
    seed: u64,
    base: &IndexSet,
) -> Result<IndexSet> {
    if !(eps > 0.0) {
        return Err(Error::ParamOutOfRange {
            what: format!("eps must be positive, got {eps}"),
        });
    }
    a.validate_for(space)?;
    base.validate_for(space)?;
    let mut accepted: Vec<usize> = base.iter().collect();
    for i in seeded_order(a.as_slice(), seed) {
        if accepted
            .iter()
            .all(|&j| j != i && space.dist_ix(i, j) >= eps)
            && !base.contains(i)
        {
            accepted.push(i);
        }
    }
    Ok(IndexSet::new(accepted))
}

/// Farthest-point-sampling net: a maximal eps-separated subset of `a` built
/// by repeatedly adding the point farthest from the current set.
///
/// Starts from `a[seed mod |a|]`; distance ties break toward the lower
/// index. Unlike the scan-order greedy this picks up extreme points first,
/// which is what the length estimators need to chase their suprema.
pub fn farthest_point_net(
    space: &MetricSpace,
    a: &IndexSet,
    eps: f64,
    seed: u64,
) -> Result<IndexSet> {
    if !(eps > 0.0) {
        return Err(Error::ParamOutOfRange {
            what: format!("eps must be positive, got {eps}"),
        });
    }
    a.validate_for(space)?;
    if a.is_empty() {
        return Ok(IndexSet::empty());
    }
    let items = a.as_slice();
    let start = items[(seed % items.len() as u64) as usize];
    let mut chosen = vec![start];
    // min distance from each member of `a` to the chosen set
    let mut min_dist: Vec<f64> = items.iter().map(|&i| space.dist_ix(i, start)).collect();
    loop {
        let mut best_pos = None;
        let mut best = f64::NEG_INFINITY;
        for (pos, &d) in min_dist.iter().enumerate() {
            if d > best {
                best = d;
                best_pos = Some(pos);
            }
        }
        let pos = match best_pos {
            Some(p) if best >= eps => p,
            _ => break,
        };
        let next = items[pos];
        chosen.push(next);
        for (pos, &i) in items.iter().enumerate() {
            let d = space.dist_ix(i, next);
            if d < min_dist[pos] {
                min_dist[pos] = d;
            }
        }
    }
    Ok(IndexSet::new(chosen))
}

/// Smallest pairwise distance within `set`; `inf` for sets with fewer than
/// two points.
pub fn min_pairwise_distance(space: &impl Metric, set: &IndexSet) -> f64 {
    let s = set.as_slice();
    let mut best = f64::INFINITY;
    for (k, &i) in s.iter().enumerate() {
        for &j in &s[k + 1..] {
            best = best.min(space.dist_ix(i, j));
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Discrete lower limit
// ---------------------------------------------------------------------------

/// Desk-scale lower limit of a finite sequence of sets, restricted to
/// `probe` candidates.
///
/// A probe point `x` survives iff for every radius `r` in the (strictly
/// decreasing) schedule, every set in the second half of the sequence meets
/// the open ball `B(x, r)`. The second half stands in for the infinite
/// tail's "all but finitely many"; limit points outside `probe` are
/// undiscoverable and must be supplied by the caller.
pub fn discrete_lower_limit(
    space: &MetricSpace,
    sequence: &[IndexSet],
    radii: &[f64],
    probe: &IndexSet,
) -> Result<IndexSet> {
    if sequence.is_empty() {
        return Err(Error::EmptySet {
            context: "discrete_lower_limit needs a non-empty sequence",
        });
    }
    if probe.is_empty() {
        return Err(Error::EmptySet {
            context: "discrete_lower_limit needs a non-empty probe set",
        });
    }
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::ParamOutOfRange {
            what: "radii schedule must be non-empty and positive".into(),
        });
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::ParamOutOfRange {
            what: "radii schedule must be strictly decreasing".into(),
        });
    }
    for s in sequence {
        s.validate_for(space)?;
    }
    probe.validate_for(space)?;

    let tail = &sequence[sequence.len() / 2..];
    let survives = |x: usize| -> bool {
        radii.iter().all(|&r| {
            tail.iter()
                .all(|set| set.iter().any(|i| space.dist_ix(x, i) < r))
        })
    };
    Ok(probe.iter().filter(|&x| survives(x)).collect())
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line_space(points: &[f64]) -> MetricSpace {
        MetricSpace::euclidean(1, points.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    #[test]
    fn euclidean_dist_pythagorean() {
        let s = MetricSpace::plane(vec![[0.0, 0.0], [3.0, 4.0]]).unwrap();
        assert_eq!(dist(&s, 0, 1).unwrap().value(), 5.0);
        assert_eq!(dist(&s, 0, 0).unwrap().value(), 0.0);
    }

    #[test]
    fn matrix_dist_read_through() {
        let s = MetricSpace::from_matrix(vec![vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(dist(&s, 0, 1).unwrap().value(), 2.0);
        assert_eq!(dist(&s, 1, 1).unwrap().value(), 0.0);
    }

    #[test]
    fn dist_index_out_of_range() {
        let s = line_space(&[0.0, 1.0]);
        assert!(matches!(
            dist(&s, 0, 2),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn matrix_rejects_triangle_violation() {
        // d(0,2) = 10 > d(0,1) + d(1,2) = 2
        let m = vec![
            vec![0.0, 1.0, 10.0],
            vec![1.0, 0.0, 1.0],
            vec![10.0, 1.0, 0.0],
        ];
        assert!(matches!(
            MetricSpace::from_matrix(m),
            Err(Error::MatrixValidation { .. })
        ));
    }

    #[test]
    fn matrix_rejects_asymmetry_and_diagonal() {
        let m = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(MetricSpace::from_matrix(m).is_err());
        let m = vec![vec![0.5, 1.0], vec![1.0, 0.0]];
        assert!(MetricSpace::from_matrix(m).is_err());
    }

    #[test]
    fn diam_conventions() {
        let s = MetricSpace::plane(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let corners = IndexSet::new(vec![0, 1, 2, 3]);
        assert!((diam(&s, &corners).unwrap().value() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(diam(&s, &IndexSet::empty()).unwrap().value(), 0.0);
        assert_eq!(diam(&s, &IndexSet::new(vec![2])).unwrap().value(), 0.0);
    }

    #[test]
    fn dist_to_set_conventions() {
        let s = line_space(&[0.0, 1.0, 0.4]);
        let b = IndexSet::new(vec![0, 1]);
        assert!((dist_to_set(&s, 2, &b).unwrap().value() - 0.4).abs() < 1e-12);
        assert_eq!(dist_to_set(&s, 0, &b).unwrap().value(), 0.0);
        assert!(dist_to_set(&s, 0, &IndexSet::empty())
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn excess_conventions() {
        let s = line_space(&[0.0, 0.5, 1.0]);
        let a = IndexSet::new(vec![0, 1, 2]);
        let b = IndexSet::new(vec![0, 2]);
        assert!((excess(&s, &a, &b).unwrap().value() - 0.5).abs() < 1e-12);
        assert_eq!(excess(&s, &b, &a).unwrap().value(), 0.0); // containment
        assert_eq!(excess(&s, &IndexSet::empty(), &b).unwrap().value(), 0.0);
        assert!(excess(&s, &a, &IndexSet::empty()).unwrap().is_infinite());
    }

    #[test]
    fn hausdorff_conventions() {
        let s = line_space(&[0.0, 1.0]);
        let a = IndexSet::new(vec![0]);
        let ab = IndexSet::new(vec![0, 1]);
        assert_eq!(hausdorff(&s, &ab, &ab).unwrap().value(), 0.0);
        assert!((hausdorff(&s, &a, &ab).unwrap().value() - 1.0).abs() < 1e-12);
        assert!(hausdorff(&s, &a, &IndexSet::empty())
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn greedy_net_ascending_trace() {
        // 1-D grid 0, 0.1, ..., 1.0 with eps = 0.25 in ascending order.
        let pts: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let s = line_space(&pts);
        let net = max_eps_separated(&s, &IndexSet::full(&s), 0.25, 0).unwrap();
        let got: Vec<f64> = net.iter().map(|i| pts[i]).collect();
        assert_eq!(got, vec![0.0, 0.3, 0.6, 0.9]);
    }

    #[test]
    fn greedy_net_singleton() {
        let s = line_space(&[7.0]);
        let net = max_eps_separated(&s, &IndexSet::full(&s), 0.5, 3).unwrap();
        assert_eq!(net.as_slice(), &[0]);
    }

    #[test]
    fn farthest_point_net_grabs_extremes() {
        let pts: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let s = line_space(&pts);
        let net = farthest_point_net(&s, &IndexSet::full(&s), 0.3, 0).unwrap();
        assert!(net.contains(0) && net.contains(100));
    }

    #[test]
    fn lower_limit_constant_sequence() {
        let s = line_space(&[0.0, 0.5, 1.0]);
        let a = IndexSet::new(vec![0, 1, 2]);
        let seq = vec![a.clone(), a.clone(), a.clone()];
        let out = discrete_lower_limit(&s, &seq, &[0.5, 0.25], &a).unwrap();
        assert_eq!(out, a);
    }

    #[test]
    fn lower_limit_dense_grids() {
        // A_n = { k/n : k = 1..n } converging to [0,1]; probe 0.5 survives.
        let mut pts = vec![0.5];
        let mut seq = Vec::new();
        for n in 1..=12usize {
            let mut set = Vec::new();
            for k in 1..=n {
                pts.push(k as f64 / n as f64);
                set.push(pts.len() - 1);
            }
            seq.push(IndexSet::new(set));
        }
        let s = line_space(&pts);
        let out = discrete_lower_limit(&s, &seq, &[0.2, 0.1], &IndexSet::new(vec![0])).unwrap();
        assert_eq!(out.as_slice(), &[0]);
    }

    #[test]
    fn lower_limit_alternating_is_empty() {
        let s = line_space(&[0.0, 1.0]);
        let even = IndexSet::new(vec![0]);
        let odd = IndexSet::new(vec![1]);
        let seq = vec![even.clone(), odd.clone(), even, odd];
        let probe = IndexSet::new(vec![0, 1]);
        let out = discrete_lower_limit(&s, &seq, &[0.5, 0.25], &probe).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn lower_limit_rejects_bad_input() {
        let s = line_space(&[0.0]);
        let a = IndexSet::new(vec![0]);
        assert!(discrete_lower_limit(&s, &[], &[0.5], &a).is_err());
        assert!(discrete_lower_limit(&s, std::slice::from_ref(&a), &[0.5, 0.5], &a).is_err());
        assert!(
            discrete_lower_limit(&s, std::slice::from_ref(&a), &[0.5], &IndexSet::empty())
                .is_err()
        );
    }

    // ------------------------------------------------------------------
    // Property tests
    // ------------------------------------------------------------------

    fn arb_points(max_n: usize) -> impl Strategy<Value = Vec<[f64; 2]>> {
        prop::collection::vec(
            (-50.0..50.0f64).prop_flat_map(|x| (Just(x), -50.0..50.0f64)),
            1..max_n,
        )
        .prop_map(|v| v.into_iter().map(|(x, y)| [x, y]).collect())
    }

    proptest! {
        #[test]
        fn excess_monotone_in_first_argument(pts in arb_points(12), split in 0usize..12, sub in 0usize..12) {
            let s = MetricSpace::plane(pts.clone()).unwrap();
            let n = pts.len();
            let b = IndexSet::new((0..n).filter(|i| i % 3 == split % 3).collect());
            let a_big = IndexSet::new((0..n).filter(|i| i % 2 == 0).collect());
            let a_small = IndexSet::new(a_big.iter().filter(|i| i % 5 != sub % 5).collect());
            let e_small = excess(&s, &a_small, &b).unwrap().value();
            let e_big = excess(&s, &a_big, &b).unwrap().value();
            prop_assert!(e_small <= e_big + 1e-12);
        }

        #[test]
        fn hausdorff_triangle_inequality(pts in arb_points(10)) {
            let s = MetricSpace::plane(pts.clone()).unwrap();
            let n = pts.len();
            let a = IndexSet::new((0..n).step_by(3).collect());
            let b = IndexSet::new((0..n).skip(1).step_by(3).collect());
            let c = IndexSet::new((0..n).skip(2).step_by(3).collect());
            if a.is_empty() || b.is_empty() || c.is_empty() {
                return Ok(());
            }
            let dab = hausdorff(&s, &a, &b).unwrap().value();
            let dbc = hausdorff(&s, &b, &c).unwrap().value();
            let dac = hausdorff(&s, &a, &c).unwrap().value();
            prop_assert!(dac <= dab + dbc + 1e-9);
        }

        #[test]
        fn nets_are_separated_and_cover(pts in arb_points(24), eps in 0.5..20.0f64, seed in 0u64..5) {
            let s = MetricSpace::plane(pts).unwrap();
            let a = IndexSet::full(&s);
            for net in [
                max_eps_separated(&s, &a, eps, seed).unwrap(),
                farthest_point_net(&s, &a, eps, seed).unwrap(),
            ] {
                // eps-separated
                let members: Vec<usize> = net.iter().collect();
                for (k, &i) in members.iter().enumerate() {
                    for &j in &members[k + 1..] {
                        prop_assert!(s.dist_ix(i, j) >= eps);
                    }
                }
                // eps-net of a
                let e = excess(&s, &a, &net).unwrap().value();
                prop_assert!(e < eps);
            }
        }

        #[test]
        fn matrix_from_random_points_validates(pts in arb_points(8)) {
            let s = MetricSpace::plane(pts.clone()).unwrap();
            let n = pts.len();
            let m: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| s.dist_ix(i, j)).collect())
                .collect();
            prop_assert!(MetricSpace::from_matrix(m).is_ok());
        }
    }
}

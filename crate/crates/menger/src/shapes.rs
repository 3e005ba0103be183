//! Generators for the classic planar example families, each emitted as a
//! finite sample with its analytic length.
//!
//! - `segment`: the unit segment.
//! - `polyline`: arbitrary vertex chain with per-edge subdivision.
//! - `semicircle_chain(n)`: `2^(n-1)` semicircular arcs of radius
//!   `2^(1-n)` strung between (-1,0) and (1,0); every member has length
//!   pi while the chain converges to a segment of length 2.
//! - `koch(n)`: the n-th Koch polygonal iterate, length `(4/3)^n` at base
//!   length 1.
//! - `shrunk_koch(n)`: the Koch iterate on base 2 shrunk by `(4/5)^(n-1)`
//!   with straight extensions keeping the endpoints at (-1,0) and (1,0);
//!   lengths stay above `(16/15)^n` while the curves converge to the
//!   segment.
//! - `square_diagonals`: both diagonals of the unit square, total length
//!   `2 sqrt(2)`.

use crate::error::{Error, Result};
use crate::metric::{ExtLength, Metric, MetricSpace};

/// Maximum supported Koch iteration depth (`4^n` segments).
pub const KOCH_DEPTH_CAP: usize = 10;

/// Parametric description of a generated figure family.
#[derive(Debug, Clone, PartialEq)]
pub enum ShapeSpec {
    Segment {
        samples: usize,
    },
    Polyline {
        vertices: Vec<[f64; 2]>,
        samples_per_edge: usize,
    },
    SemicircleChain {
        n: usize,
        samples_per_arc: usize,
    },
    Koch {
        n: usize,
        base_length: f64,
        samples_per_edge: usize,
    },
    ShrunkKoch {
        n: usize,
        samples_per_edge: usize,
    },
    SquareDiagonals {
        samples_per_diagonal: usize,
    },
}

/// A generated planar sample: the point set, the polyline components as
/// index sequences, and the analytic length of the underlying figure.
#[derive(Debug, Clone)]
pub struct SampledShape {
    pub space: MetricSpace,
    pub components: Vec<Vec<usize>>,
    pub true_length: f64,
    /// Largest gap between consecutive sample points along any component.
    pub pitch: f64,
}

impl SampledShape {
    fn from_components(components_pts: Vec<Vec<[f64; 2]>>, true_length: f64) -> Result<SampledShape> {
        // Deduplicate exactly-equal points across components (shared
        // endpoints like the diagonal crossing) while keeping index order.
        let mut points: Vec<[f64; 2]> = Vec::new();
        let mut components = Vec::with_capacity(components_pts.len());
        let find = |p: [f64; 2], points: &mut Vec<[f64; 2]>| -> usize {
            match points.iter().position(|q| q[0] == p[0] && q[1] == p[1]) {
                Some(ix) => ix,
                None => {
                    points.push(p);
                    points.len() - 1
                }
            }
        };
        for comp in components_pts {
            let ixs: Vec<usize> = comp.into_iter().map(|p| find(p, &mut points)).collect();
            components.push(ixs);
        }
        let space = MetricSpace::plane(points)?;
        let mut pitch = 0.0f64;
        for comp in &components {
            for w in comp.windows(2) {
                pitch = pitch.max(space.dist_ix(w[0], w[1]));
            }
        }
        Ok(SampledShape {
            space,
            components,
            true_length,
            pitch,
        })
    }
}

/// Generates the sample for a shape description.
pub fn generate(spec: &ShapeSpec) -> Result<SampledShape> {
    match spec {
        ShapeSpec::Segment { samples } => {
            let pts = subdivide([0.0, 0.0], [1.0, 0.0], require_samples(*samples)?);
            SampledShape::from_components(vec![pts], 1.0)
        }
        ShapeSpec::Polyline {
            vertices,
            samples_per_edge,
        } => {
            if vertices.len() < 2 {
                return Err(Error::ParamOutOfRange {
                    what: "polyline needs at least 2 vertices".into(),
                });
            }
            let k = (*samples_per_edge).max(1);
            let mut pts = vec![vertices[0]];
            let mut true_length = 0.0;
            for w in vertices.windows(2) {
                true_length += dist2(w[0], w[1]);
                let seg = subdivide(w[0], w[1], k + 1);
                pts.extend_from_slice(&seg[1..]);
            }
            SampledShape::from_components(vec![pts], true_length)
        }
        ShapeSpec::SemicircleChain { n, samples_per_arc } => {
            if *n == 0 {
                return Err(Error::ParamOutOfRange {
                    what: "semicircle_chain needs n >= 1".into(),
                });
            }
            let spa = require_samples(*samples_per_arc)?;
            let arcs = 1usize << (n - 1);
            let r = 2.0f64.powi(1 - *n as i32);
            let mut pts: Vec<[f64; 2]> = Vec::with_capacity(arcs * (spa - 1) + 1);
            for arc in 0..arcs {
                let cx = -1.0 + r * (2 * arc + 1) as f64;
                let first = if arc == 0 { 0 } else { 1 };
                for s in first..spa {
                    // theta runs from pi to 0 so the chain goes left to right
                    let theta = std::f64::consts::PI * (1.0 - s as f64 / (spa - 1) as f64);
                    pts.push([cx + r * theta.cos(), r * theta.sin()]);
                }
            }
            SampledShape::from_components(vec![pts], std::f64::consts::PI)
        }
        ShapeSpec::Koch {
            n,
            base_length,
            samples_per_edge,
        } => {
            check_koch_depth(*n)?;
            if !(*base_length > 0.0) {
                return Err(Error::ParamOutOfRange {
                    what: "koch base length must be positive".into(),
                });
            }
            let verts = koch_vertices(*n, [0.0, 0.0], [*base_length, 0.0]);
            let pts = densify(&verts, (*samples_per_edge).max(1));
            let true_length = base_length * (4.0f64 / 3.0).powi(*n as i32);
            SampledShape::from_components(vec![pts], true_length)
        }
        ShapeSpec::ShrunkKoch { n, samples_per_edge } => {
            if *n == 0 {
                return Err(Error::ParamOutOfRange {
                    what: "shrunk_koch needs n >= 1".into(),
                });
            }
            check_koch_depth(*n)?;
            let k = (*samples_per_edge).max(1);
            let f = (4.0f64 / 5.0).powi(*n as i32 - 1);
            let koch = koch_vertices(*n, [-f, 0.0], [f, 0.0]);
            let mut verts = Vec::with_capacity(koch.len() + 2);
            if f < 1.0 {
                verts.push([-1.0, 0.0]);
            }
            verts.extend_from_slice(&koch);
            if f < 1.0 {
                verts.push([1.0, 0.0]);
            }
            let pts = densify(&verts, k);
            // koch on base 2f has length 2f (4/3)^n; the two straight
            // extensions contribute 2(1 - f)
            let true_length = 2.0 * f * (4.0f64 / 3.0).powi(*n as i32) + 2.0 * (1.0 - f);
            SampledShape::from_components(vec![pts], true_length)
        }
        ShapeSpec::SquareDiagonals { samples_per_diagonal } => {
            let m = {
                let m = require_samples(*samples_per_diagonal)?;
                if m % 2 == 0 {
                    m + 1 // keep the crossing point in the sample
                } else {
                    m
                }
            };
            let d1 = subdivide([0.0, 0.0], [1.0, 1.0], m);
            let d2 = subdivide([1.0, 0.0], [0.0, 1.0], m);
            SampledShape::from_components(vec![d1, d2], 2.0 * 2.0f64.sqrt())
        }
    }
}

fn require_samples(samples: usize) -> Result<usize> {
    if samples < 2 {
        Err(Error::ParamOutOfRange {
            what: "sample count must be at least 2".into(),
        })
    } else {
        Ok(samples)
    }
}

fn check_koch_depth(n: usize) -> Result<()> {
    if n > KOCH_DEPTH_CAP {
        Err(Error::ParamOutOfRange {
            what: format!("koch depth {n} exceeds the cap {KOCH_DEPTH_CAP}"),
        })
    } else {
        Ok(())
    }
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// `count >= 2` evenly spaced points from `a` to `b`, inclusive.
fn subdivide(a: [f64; 2], b: [f64; 2], count: usize) -> Vec<[f64; 2]> {
    (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
        })
        .collect()
}

/// Splits every edge of the vertex chain into `k` equal parts.
fn densify(verts: &[[f64; 2]], k: usize) -> Vec<[f64; 2]> {
    if k <= 1 {
        return verts.to_vec();
    }
    let mut out = vec![verts[0]];
    for w in verts.windows(2) {
        let seg = subdivide(w[0], w[1], k + 1);
        out.extend_from_slice(&seg[1..]);
    }
    out
}

/// Vertices of the n-th Koch iterate from `a` to `b`, bump on the left of
/// the direction of travel.
pub fn koch_vertices(n: usize, a: [f64; 2], b: [f64; 2]) -> Vec<[f64; 2]> {
    let mut verts = vec![a, b];
    let (sin60, cos60) = (3.0f64.sqrt() / 2.0, 0.5);
    for _ in 0..n {
        let mut next = Vec::with_capacity(verts.len() * 4);
        next.push(verts[0]);
        for w in verts.windows(2) {
            let (p, q) = (w[0], w[1]);
            let dx = (q[0] - p[0]) / 3.0;
            let dy = (q[1] - p[1]) / 3.0;
            let m1 = [p[0] + dx, p[1] + dy];
            let m2 = [p[0] + 2.0 * dx, p[1] + 2.0 * dy];
            let peak = [
                m1[0] + dx * cos60 - dy * sin60,
                m1[1] + dx * sin60 + dy * cos60,
            ];
            next.push(m1);
            next.push(peak);
            next.push(m2);
            next.push(q);
        }
        verts = next;
    }
    verts
}

/// Sum of consecutive sample distances over all components. Exact for
/// polygonal shapes; an inscribed-polygon lower estimate for arcs, tending
/// to the true length as sampling refines.
pub fn polyline_length(shape: &SampledShape) -> ExtLength {
    let mut total = 0.0;
    for comp in &shape.components {
        for w in comp.windows(2) {
            total += shape.space.dist_ix(w[0], w[1]);
        }
    }
    ExtLength::new(total)
}

/// True iff every vertex of `koch(n)` appears among the vertices of
/// `koch(m)` within `1e-12`. This monotone vertex persistence is what
/// makes the Koch lengths a growing chain of polygonal lower bounds.
pub fn koch_vertex_persistence(n: usize, m: usize) -> Result<bool> {
    if n >= m {
        return Err(Error::ParamOutOfRange {
            what: format!("koch_vertex_persistence needs n < m, got n = {n}, m = {m}"),
        });
    }
    check_koch_depth(m)?;
    let coarse = koch_vertices(n, [0.0, 0.0], [1.0, 0.0]);
    let fine = koch_vertices(m, [0.0, 0.0], [1.0, 0.0]);
    Ok(vertices_subset_of(&coarse, &fine, 1e-12))
}

/// Every point of `subset` matches some point of `superset` within `tol`.
pub fn vertices_subset_of(subset: &[[f64; 2]], superset: &[[f64; 2]], tol: f64) -> bool {
    let mut sorted: Vec<[f64; 2]> = superset.to_vec();
    sorted.sort_by(|p, q| p[0].partial_cmp(&q[0]).unwrap());
    subset.iter().all(|&p| {
        let lo = sorted.partition_point(|q| q[0] < p[0] - tol);
        sorted[lo..]
            .iter()
            .take_while(|q| q[0] <= p[0] + tol)
            .any(|q| (q[0] - p[0]).hypot(q[1] - p[1]) <= tol)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_and_polyline() {
        let s = generate(&ShapeSpec::Segment { samples: 11 }).unwrap();
        assert_eq!(s.space.len(), 11);
        assert!((polyline_length(&s).value() - 1.0).abs() < 1e-12);
        assert_eq!(s.true_length, 1.0);

        let two = generate(&ShapeSpec::Segment { samples: 2 }).unwrap();
        assert!((polyline_length(&two).value() - 1.0).abs() < 1e-12);

        let p = generate(&ShapeSpec::Polyline {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 2.0]],
            samples_per_edge: 4,
        })
        .unwrap();
        assert!((p.true_length - 3.0).abs() < 1e-12);
        assert!((polyline_length(&p).value() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn semicircle_lengths() {
        let one = generate(&ShapeSpec::SemicircleChain {
            n: 1,
            samples_per_arc: 10_000,
        })
        .unwrap();
        assert_eq!(one.true_length, std::f64::consts::PI);
        assert!((polyline_length(&one).value() - std::f64::consts::PI).abs() < 1e-6);
        // endpoints
        let first = one.space.coords(0).unwrap();
        let last = one.space.coords(one.space.len() - 1).unwrap();
        assert!((first[0] + 1.0).abs() < 1e-12 && first[1].abs() < 1e-12);
        assert!((last[0] - 1.0).abs() < 1e-12 && last[1].abs() < 1e-12);

        // heights shrink with n; odd samples per arc hit the apex exactly
        for n in 2..=8 {
            let c = generate(&ShapeSpec::SemicircleChain {
                n,
                samples_per_arc: 65,
            })
            .unwrap();
            let max_y = (0..c.space.len())
                .map(|i| c.space.coords(i).unwrap()[1])
                .fold(0.0f64, f64::max);
            assert!((max_y - 2.0f64.powi(1 - n as i32)).abs() < 1e-9);
        }
    }

    #[test]
    fn koch_lengths_exact() {
        let k0 = generate(&ShapeSpec::Koch {
            n: 0,
            base_length: 1.0,
            samples_per_edge: 1,
        })
        .unwrap();
        assert!((polyline_length(&k0).value() - 1.0).abs() < 1e-12);

        for n in 1..=6 {
            let k = generate(&ShapeSpec::Koch {
                n,
                base_length: 1.0,
                samples_per_edge: 1,
            })
            .unwrap();
            let expect = (4.0f64 / 3.0).powi(n as i32);
            assert!(
                (polyline_length(&k).value() - expect).abs() < 1e-9,
                "n = {n}"
            );
            assert_eq!(k.space.len(), 4usize.pow(n as u32) + 1);
        }

        // base 2 scales the length
        let k2 = generate(&ShapeSpec::Koch {
            n: 3,
            base_length: 2.0,
            samples_per_edge: 1,
        })
        .unwrap();
        assert!((k2.true_length - 2.0 * (4.0f64 / 3.0).powi(3)).abs() < 1e-12);
    }

    #[test]
    fn koch_persistence() {
        assert!(koch_vertex_persistence(0, 1).unwrap());
        assert!(koch_vertex_persistence(2, 4).unwrap());
        for n in 0..3 {
            for m in (n + 1)..=4 {
                assert!(koch_vertex_persistence(n, m).unwrap());
            }
        }
        // negative control: a perturbed vertex set is not contained
        let coarse = koch_vertices(1, [0.0, 0.0], [1.0, 0.0]);
        let mut fine = koch_vertices(3, [0.0, 0.0], [1.0, 0.0]);
        for p in fine.iter_mut() {
            p[1] += 1e-6;
        }
        assert!(!vertices_subset_of(&coarse, &fine, 1e-12));
        assert!(koch_vertex_persistence(3, 3).is_err());
    }

    #[test]
    fn shrunk_koch_growth() {
        for n in 1..=8 {
            let d = generate(&ShapeSpec::ShrunkKoch {
                n,
                samples_per_edge: 1,
            })
            .unwrap();
            let bound = (16.0f64 / 15.0).powi(n as i32);
            assert!(
                d.true_length > bound,
                "n = {n}: {} <= {bound}",
                d.true_length
            );
            assert!((polyline_length(&d).value() - d.true_length).abs() < 1e-9);
            // endpoints pinned at (-1, 0) and (1, 0)
            let comp = &d.components[0];
            let first = d.space.coords(comp[0]).unwrap();
            let last = d.space.coords(*comp.last().unwrap()).unwrap();
            assert!((first[0] + 1.0).abs() < 1e-12);
            assert!((last[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn square_diagonals_shape() {
        let d = generate(&ShapeSpec::SquareDiagonals {
            samples_per_diagonal: 21,
        })
        .unwrap();
        assert_eq!(d.components.len(), 2);
        assert!((d.true_length - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((polyline_length(&d).value() - d.true_length).abs() < 1e-12);
        // the crossing point is shared, not duplicated
        assert_eq!(d.space.len(), 2 * 21 - 1);
        let center_hits = (0..d.space.len())
            .filter(|&i| {
                let c = d.space.coords(i).unwrap();
                (c[0] - 0.5).abs() < 1e-12 && (c[1] - 0.5).abs() < 1e-12
            })
            .count();
        assert_eq!(center_hits, 1);

        // even sample counts still include the crossing
        let d2 = generate(&ShapeSpec::SquareDiagonals {
            samples_per_diagonal: 20,
        })
        .unwrap();
        assert_eq!(d2.space.len(), 2 * 21 - 1);
    }

    #[test]
    fn finer_iterates_dominate_coarser_lengths() {
        // vertex persistence makes the estimate of a fine iterate at
        // least the polygonal length of every coarser one
        use crate::length::{menger_choquet_estimate, CandidateSource};
        use crate::metric::IndexSet;
        let fine = generate(&ShapeSpec::Koch {
            n: 4,
            base_length: 1.0,
            samples_per_edge: 1,
        })
        .unwrap();
        let est = menger_choquet_estimate(
            &fine.space,
            &IndexSet::full(&fine.space),
            &[0.2, 0.05, 0.005],
            CandidateSource::Sample,
            0,
        )
        .unwrap();
        for n in 0..4 {
            let coarse = generate(&ShapeSpec::Koch {
                n,
                base_length: 1.0,
                samples_per_edge: 1,
            })
            .unwrap();
            assert!(
                est.value.value() >= polyline_length(&coarse).value() - 1e-6,
                "koch(4) estimate below koch({n}) length"
            );
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(generate(&ShapeSpec::Segment { samples: 1 }).is_err());
        assert!(generate(&ShapeSpec::SemicircleChain {
            n: 0,
            samples_per_arc: 8
        })
        .is_err());
        assert!(generate(&ShapeSpec::Koch {
            n: 99,
            base_length: 1.0,
            samples_per_edge: 1
        })
        .is_err());
        assert!(generate(&ShapeSpec::Koch {
            n: 1,
            base_length: 0.0,
            samples_per_edge: 1
        })
        .is_err());
        assert!(generate(&ShapeSpec::Polyline {
            vertices: vec![[0.0, 0.0]],
            samples_per_edge: 1
        })
        .is_err());
    }
}

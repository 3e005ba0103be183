//! File formats and report serialization.
//!
//! Point-set files are JSON objects, either
//! `{"dim": d, "points": [[x1, ..., xd], ...]}` or
//! `{"matrix": [[...], ...]}`. Index sets serialize as sorted integer
//! arrays. All lengths are emitted as decimals rounded to 12 significant
//! digits; `+inf` becomes the string `"inf"`.

use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::golab::{ClosureReport, ConvergenceReport, HitCollection};
use crate::graph::SteinerTree;
use crate::length::{Cover, LengthEstimate, ProofCover};
use crate::metric::{ExtLength, IndexSet, MetricSpace};
use crate::shapes::SampledShape;
use crate::steiner::SmtResult;

/// Significant digits for every emitted length.
pub const OUTPUT_DIGITS: i32 = 12;

/// Rounds to [`OUTPUT_DIGITS`] significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let magnitude = v.abs().log10().floor() as i32;
    let factor = 10f64.powi(OUTPUT_DIGITS - 1 - magnitude);
    (v * factor).round() / factor
}

/// A length as a JSON value: a rounded number, or the string `"inf"`.
pub fn length_value(v: f64) -> Value {
    if v.is_infinite() {
        Value::String("inf".into())
    } else {
        serde_json::Number::from_f64(round_sig(v)).map_or(Value::Null, Value::Number)
    }
}

/// A length as CSV text (shortest decimal of the rounded value).
pub fn length_text(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{}", round_sig(v))
    }
}

// ---------------------------------------------------------------------------
// Point-set files
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct PointSetFile {
    #[serde(default)]
    dim: Option<usize>,
    #[serde(default)]
    points: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    matrix: Option<Vec<Vec<f64>>>,
}

/// Parses a point-set JSON document into a validated space.
pub fn space_from_json(text: &str) -> Result<MetricSpace> {
    let file: PointSetFile = serde_json::from_str(text)?;
    match (file.points, file.matrix) {
        (Some(points), None) => {
            let dim = file
                .dim
                .or_else(|| points.first().map(|p| p.len()))
                .ok_or_else(|| Error::Parse("point set needs a dim or points".into()))?;
            MetricSpace::euclidean(dim, points)
        }
        (None, Some(matrix)) => MetricSpace::from_matrix(matrix),
        (Some(_), Some(_)) => Err(Error::Parse(
            "point set must have either points or matrix, not both".into(),
        )),
        (None, None) => Err(Error::Parse(
            "point set needs a points or matrix field".into(),
        )),
    }
}

/// Serializes a space back to the point-set JSON layout.
pub fn space_to_json(space: &MetricSpace) -> Value {
    if space.is_euclidean() {
        let points: Vec<Value> = (0..space.len())
            .map(|i| {
                Value::Array(
                    space
                        .coords(i)
                        .unwrap()
                        .iter()
                        .map(|&c| length_value(c))
                        .collect(),
                )
            })
            .collect();
        json!({"dim": space.dim().unwrap(), "points": points})
    } else {
        use crate::metric::Metric;
        let matrix: Vec<Value> = (0..space.len())
            .map(|i| {
                Value::Array(
                    (0..space.len())
                        .map(|j| length_value(space.dist_ix(i, j)))
                        .collect(),
                )
            })
            .collect();
        json!({"matrix": matrix})
    }
}

// ---------------------------------------------------------------------------
// Graphs, trees, results
// ---------------------------------------------------------------------------

pub fn index_set_json(set: &IndexSet) -> Value {
    Value::Array(set.iter().map(|i| json!(i)).collect())
}

/// `{"vertices": [...], "edges": [[i, j], ...], "terminals": [...]}` plus
/// coordinates for any free Steiner points at virtual indices.
pub fn tree_json(tree: &SteinerTree, steiner_coords: &[[f64; 2]], base_len: usize) -> Value {
    let edges: Vec<Value> = tree.edges().iter().map(|&(a, b)| json!([a, b])).collect();
    let mut out = json!({
        "vertices": index_set_json(tree.vertices()),
        "edges": edges,
        "terminals": index_set_json(tree.terminals()),
    });
    if !steiner_coords.is_empty() {
        let coords: Vec<Value> = steiner_coords
            .iter()
            .map(|c| json!([length_value(c[0]), length_value(c[1])]))
            .collect();
        out["steiner_points"] = json!({ "first_index": base_len, "coords": coords });
    }
    out
}

/// `{"length": ..., "lower": ..., "upper": ..., "method": ..., "tree": ...}`.
pub fn smt_result_json(r: &SmtResult, base_len: usize) -> Value {
    json!({
        "length": length_value(r.length.value()),
        "lower": length_value(r.lower),
        "upper": length_value(r.upper),
        "method": r.method.as_str(),
        "tree": tree_json(&r.tree, &r.steiner_coords, base_len),
    })
}

pub fn mst_result_json(tree: &SteinerTree, length: ExtLength) -> Value {
    json!({
        "length": length_value(length.value()),
        "tree": tree_json(tree, &[], usize::MAX),
    })
}

/// `{"functional": ..., "value": ..., "direction": ..., "params": {...},
/// "witness": ...}`.
pub fn estimate_json(est: &LengthEstimate) -> Value {
    let levels: Vec<Value> = est
        .params
        .levels
        .iter()
        .map(|l| {
            json!({
                "eps": length_value(l.eps),
                "net_size": l.net_size,
                "engine": l.engine,
                "value": length_value(l.value),
                "moore_lower": length_value(l.moore_lower),
                "upper": length_value(l.upper),
            })
        })
        .collect();
    let mut params = json!({
        "eps_schedule": est.params.eps_schedule.iter().map(|&e| length_value(e)).collect::<Vec<_>>(),
        "seed": est.params.seed,
        "certified_lower": length_value(est.params.certified_lower),
        "levels": levels,
    });
    if let Some(p) = est.params.grid_pitch {
        params["grid_pitch"] = length_value(p);
    }
    json!({
        "functional": serde_json::to_value(est.functional).unwrap(),
        "value": length_value(est.value.value()),
        "direction": serde_json::to_value(est.direction).unwrap(),
        "params": params,
        "witness": json!({"net": index_set_json(&est.witness_net)}),
    })
}

pub fn cover_json(cover: &Cover) -> Value {
    json!({
        "delta": length_value(cover.delta),
        "elements": cover.elements.iter().map(index_set_json).collect::<Vec<_>>(),
        "covered": index_set_json(&cover.covered),
    })
}

pub fn proof_cover_json(pc: &ProofCover) -> Value {
    json!({
        "functional": "Lstar_delta_upper",
        "value": length_value(pc.sum.value()),
        "direction": "upper",
        "upper_estimate": length_value(pc.length_upper),
        "bound": length_value(pc.bound),
        "params": {
            "delta": length_value(pc.cover.delta),
            "eps": length_value(pc.eps),
            "lmc_estimate": length_value(pc.lmc_estimate),
            "p_size": pc.p_size,
            "spanning_length": length_value(pc.spanning_length),
            "core_length": length_value(pc.core_length),
            "large_components": pc.large_components,
        },
        "witness": cover_json(&pc.cover),
    })
}

pub fn hit_collection_json(hc: &HitCollection) -> Value {
    json!({
        "centers": index_set_json(&hc.centers),
        "radius": length_value(hc.radius),
        "eps": length_value(hc.eps),
    })
}

pub fn closure_report_json(r: &ClosureReport) -> Value {
    json!({
        "base_lmc_lower": length_value(r.base_lmc_lower),
        "extended_lmc_lower": length_value(r.extended_lmc_lower),
        "difference": length_value(r.difference),
        "slack": length_value(r.slack),
        "consistent": r.consistent,
    })
}

// ---------------------------------------------------------------------------
// Convergence reports (CSV and JSON mirror)
// ---------------------------------------------------------------------------

pub fn convergence_json(r: &ConvergenceReport) -> Value {
    let steps: Vec<Value> = r
        .steps
        .iter()
        .map(|s| {
            let mut v = json!({
                "step": s.step,
                "excess": length_value(s.excess_to_limit),
                "lmc_lower": length_value(s.lmc_lower),
                "params_eps": length_value(s.eps_finest),
            });
            if let Some(p) = s.polyline_lower {
                v["polyline_lower"] = length_value(p);
            }
            if let Some(l) = s.lstar_exact {
                v["lstar_exact"] = length_value(l);
            }
            v
        })
        .collect();
    let mut out = json!({
        "steps": steps,
        "limit_lmc_lower": length_value(r.limit_lmc_lower),
        "liminf_estimate": length_value(r.liminf_estimate),
        "semicontinuity_gap": length_value(r.semicontinuity_gap),
        "verdict": r.verdict,
    });
    if let Some(note) = &r.note {
        out["note"] = json!(note);
    }
    out
}

/// CSV: `step, excess, lmc_lower, params_eps, verdict`, one row per step.
pub fn convergence_csv(r: &ConvergenceReport) -> String {
    let mut out = String::from("step,excess,lmc_lower,params_eps,verdict\n");
    for s in &r.steps {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.step,
            length_text(s.excess_to_limit),
            length_text(s.lmc_lower),
            length_text(s.eps_finest),
            r.verdict,
        ));
    }
    out
}

/// Shape output: the point-set JSON and the sidecar record.
pub fn shape_files(shape: &SampledShape) -> (Value, Value) {
    let points = space_to_json(&shape.space);
    let sidecar = json!({
        "true_length": length_value(shape.true_length),
        "pitch": length_value(shape.pitch),
        "components": shape.components.iter()
            .map(|c| Value::Array(c.iter().map(|&i| json!(i)).collect()))
            .collect::<Vec<_>>(),
    });
    (points, sidecar)
}

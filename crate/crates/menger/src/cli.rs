//! Command-line surface.
//!
//! One command per process; all numeric output is rounded to 12
//! significant digits and identical invocations (same seed) produce
//! byte-identical output. Validation failures exit with status 2 and a
//! diagnostic naming the violated precondition. `MENGER_LOG` set to
//! `info` or `debug` enables progress notes on stderr.

use std::io::Write;
use std::path::PathBuf;
use std::sync::OnceLock;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::golab::{
    check_hits, convergence_experiment, counterexample_disconnected, hit_collection,
    ExperimentConfig, SmtEngine,
};
use crate::graph::mst;
use crate::length::{
    intrinsic_menger_estimate, menger_choquet_estimate, menger_estimate, proof_cover,
    CandidateSource, LengthEstimate,
};
use crate::metric::{IndexSet, MetricSpace};
use crate::report;
use crate::shapes::{generate, SampledShape, ShapeSpec};
use crate::steiner::{smt_bounds, smt_euclidean_small, smt_restricted};

#[derive(Parser)]
#[command(
    name = "menger",
    version,
    about = "Steiner-tree length functionals of finite metric samples"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Accepted for interface compatibility; computations are sequential
    /// and deterministic regardless.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum spanning tree of a terminal set.
    Mst(MstArgs),
    /// Steiner minimal tree (exact planar, restricted DP, or bounds).
    Smt(SmtArgs),
    /// Menger-Choquet length estimate over an eps-net sweep.
    Lmc(EstimateArgs),
    /// Intrinsic Menger length estimate (Steiner points from the set).
    Lim(EstimateArgs),
    /// Menger length estimate (spanning trees only).
    Lm(EstimateArgs),
    /// Delta-cover construction certifying an upper length bound.
    Cover(CoverArgs),
    /// Generate an example shape as a point-set file plus sidecar.
    Shape(ShapeArgs),
    /// Lower-semicontinuity experiment over a shape family.
    Golab(GolabArgs),
    /// Hit collection for the semicontinuity contract.
    Hits(HitsArgs),
}

#[derive(Args)]
struct MstArgs {
    /// Point-set JSON file.
    #[arg(long)]
    points: PathBuf,
    /// Comma-separated indices; defaults to all points.
    #[arg(long)]
    terminals: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SmtArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    terminals: Option<String>,
    /// Steiner candidate indices for dp mode; defaults to every
    /// non-terminal point.
    #[arg(long)]
    candidates: Option<String>,
    #[arg(long, value_enum, default_value_t = SmtMode::Auto)]
    mode: SmtMode,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SmtMode {
    /// Exact planar solve when possible, otherwise the dynamic program.
    Auto,
    /// Topology enumeration (up to 4 terminals, planar).
    EuclideanSmall,
    /// Dreyfus-Wagner over the candidate set.
    Dp,
    /// Certificate interval from spanning-tree and cycle-doubling bounds.
    Bounds,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    points: PathBuf,
    /// Comma-separated indices of the set A; defaults to all points.
    #[arg(long)]
    set: Option<String>,
    /// Decreasing comma-separated eps schedule.
    #[arg(long, default_value = "0.2,0.1,0.05,0.025")]
    eps_schedule: String,
    /// Steiner candidate source for lmc: "sample" or "grid".
    #[arg(long, default_value = "sample")]
    candidate_source: String,
    /// Grid pitch when --candidate-source grid.
    #[arg(long)]
    grid_pitch: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoverArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    set: Option<String>,
    /// Cover resolution, in (0, 1/8).
    #[arg(long)]
    delta: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ShapeArgs {
    /// segment | polyline | semicircle-chain | koch | shrunk-koch |
    /// square-diagonals
    #[arg(long)]
    kind: String,
    /// Iteration depth (koch, shrunk-koch, semicircle-chain).
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    base_length: f64,
    #[arg(long, default_value_t = 64)]
    samples_per_arc: usize,
    #[arg(long, default_value_t = 1)]
    samples_per_edge: usize,
    #[arg(long, default_value_t = 101)]
    samples_per_diagonal: usize,
    #[arg(long, default_value_t = 101)]
    samples: usize,
    /// Polyline vertices as "x,y;x,y;...".
    #[arg(long)]
    vertices: Option<String>,
    /// Output file; the sidecar record lands next to it with extension
    /// .meta.json. Without --out both documents go to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GolabArgs {
    /// semicircle | shrunk-koch | grid | constant
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 6)]
    steps: usize,
    #[arg(long, default_value = "0.1,0.05,0.02")]
    eps_schedule: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    samples_per_arc: usize,
    #[arg(long, default_value_t = 3)]
    samples_per_edge: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HitsArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    set: Option<String>,
    /// Accuracy target of the collection.
    #[arg(long)]
    eps: f64,
    /// auto | mst
    #[arg(long, default_value = "auto")]
    engine: String,
    /// Indices of a candidate hitting set B to check against the balls.
    #[arg(long)]
    check: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

// ---------------------------------------------------------------------------
// Logging
// ---------------------------------------------------------------------------

fn log_level() -> u8 {
    static LEVEL: OnceLock<u8> = OnceLock::new();
    *LEVEL.get_or_init(|| match std::env::var("MENGER_LOG").as_deref() {
        Ok("debug") => 2,
        Ok("info") => 1,
        _ => 0,
    })
}

fn log_info(msg: &str) {
    if log_level() >= 1 {
        eprintln!("menger: {msg}");
    }
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Parses and runs a command line; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    if cli.threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return 2;
    }
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Mst(args) => run_mst(args),
        Command::Smt(args) => run_smt(args),
        Command::Lmc(args) => run_estimate(args, Estimator::MengerChoquet),
        Command::Lim(args) => run_estimate(args, Estimator::IntrinsicMenger),
        Command::Lm(args) => run_estimate(args, Estimator::Menger),
        Command::Cover(args) => run_cover(args),
        Command::Shape(args) => run_shape(args),
        Command::Golab(args) => run_golab(args),
        Command::Hits(args) => run_hits(args),
    }
}

// ---------------------------------------------------------------------------
// Shared parsing helpers
// ---------------------------------------------------------------------------

fn parse_indices(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("index list entry '{s}' is not an integer")))
        })
        .collect()
}

fn parse_schedule(text: &str) -> Result<Vec<f64>> {
    let schedule: Vec<f64> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim().parse::<f64>().map_err(|_| {
                Error::Parse(format!("eps schedule entry '{s}' is not a number"))
            })
        })
        .collect::<Result<_>>()?;
    if schedule.is_empty() {
        return Err(Error::Parse("eps schedule is empty".into()));
    }
    Ok(schedule)
}

fn load_space(path: &PathBuf) -> Result<MetricSpace> {
    let text = std::fs::read_to_string(path)?;
    report::space_from_json(&text)
}

fn set_or_all(space: &MetricSpace, arg: &Option<String>) -> Result<IndexSet> {
    let set = match arg {
        Some(text) => IndexSet::new(parse_indices(text)?),
        None => IndexSet::full(space),
    };
    set.validate_for(space)?;
    if set.is_empty() {
        return Err(Error::EmptySet {
            context: "selected index set",
        });
    }
    Ok(set)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                f.write_all(b"\n")?;
            }
        }
        None => {
            if text.ends_with('\n') {
                print!("{text}");
            } else {
                println!("{text}");
            }
        }
    }
    Ok(())
}

fn emit_value(out: &Option<PathBuf>, value: &Value) -> Result<()> {
    emit(out, &serde_json::to_string(value).expect("serializable"))
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn run_mst(args: MstArgs) -> Result<()> {
    let space = load_space(&args.points)?;
    let p = set_or_all(&space, &args.terminals)?;
    let (tree, length) = mst(&space, &p)?;
    log_info(&format!("mst over {} terminals: {}", p.len(), length));
    match args.format {
        Format::Json => emit_value(&args.out, &report::mst_result_json(&tree, length)),
        Format::Csv => emit(
            &args.out,
            &format!("length\n{}\n", report::length_text(length.value())),
        ),
    }
}

fn run_smt(args: SmtArgs) -> Result<()> {
    let space = load_space(&args.points)?;
    let p = set_or_all(&space, &args.terminals)?;
    let candidates = match &args.candidates {
        Some(text) => {
            let c = IndexSet::new(parse_indices(text)?);
            c.validate_for(&space)?;
            c
        }
        None => IndexSet::full(&space).difference(&p),
    };
    let result = match args.mode {
        SmtMode::EuclideanSmall => smt_euclidean_small(&space, &p)?,
        SmtMode::Dp => smt_restricted(&space, &p, &candidates)?,
        SmtMode::Bounds => smt_bounds(&space, &p)?,
        SmtMode::Auto => {
            if p.len() <= 4 && space.is_euclidean() && space.dim() == Some(2) {
                smt_euclidean_small(&space, &p)?
            } else {
                smt_restricted(&space, &p, &candidates)?
            }
        }
    };
    log_info(&format!(
        "smt ({}) over {} terminals: {}",
        result.method.as_str(),
        p.len(),
        result.length
    ));
    match args.format {
        Format::Json => emit_value(&args.out, &report::smt_result_json(&result, space.len())),
        Format::Csv => emit(
            &args.out,
            &format!(
                "length,lower,upper,method\n{},{},{},{}\n",
                report::length_text(result.length.value()),
                report::length_text(result.lower),
                report::length_text(result.upper),
                result.method.as_str()
            ),
        ),
    }
}

enum Estimator {
    Menger,
    MengerChoquet,
    IntrinsicMenger,
}

fn run_estimate(args: EstimateArgs, which: Estimator) -> Result<()> {
    let space = load_space(&args.points)?;
    let a = set_or_all(&space, &args.set)?;
    let schedule = parse_schedule(&args.eps_schedule)?;
    let est: LengthEstimate = match which {
        Estimator::Menger => menger_estimate(&space, &a, &schedule, args.seed)?,
        Estimator::IntrinsicMenger => {
            intrinsic_menger_estimate(&space, &a, &schedule, args.seed)?
        }
        Estimator::MengerChoquet => {
            let source = match args.candidate_source.as_str() {
                "sample" => CandidateSource::Sample,
                "grid" => CandidateSource::Grid {
                    pitch: args.grid_pitch.ok_or_else(|| Error::ParamOutOfRange {
                        what: "--candidate-source grid needs --grid-pitch".into(),
                    })?,
                },
                other => {
                    return Err(Error::Parse(format!(
                        "unknown candidate source '{other}' (use sample or grid)"
                    )))
                }
            };
            menger_choquet_estimate(&space, &a, &schedule, source, args.seed)?
        }
    };
    log_info(&format!("estimate value {}", est.value));
    match args.format {
        Format::Json => emit_value(&args.out, &report::estimate_json(&est)),
        Format::Csv => {
            let mut text = String::from("eps,net_size,engine,value,moore_lower,upper\n");
            for l in &est.params.levels {
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    report::length_text(l.eps),
                    l.net_size,
                    l.engine,
                    report::length_text(l.value),
                    report::length_text(l.moore_lower),
                    report::length_text(l.upper),
                ));
            }
            emit(&args.out, &text)
        }
    }
}

fn run_cover(args: CoverArgs) -> Result<()> {
    let space = load_space(&args.points)?;
    let a = set_or_all(&space, &args.set)?;
    let pc = proof_cover(&space, &a, args.delta)?;
    log_info(&format!(
        "cover of {} elements, sum {} <= bound {}",
        pc.cover.elements.len(),
        pc.sum,
        report::length_text(pc.bound)
    ));
    match args.format {
        Format::Json => emit_value(&args.out, &report::proof_cover_json(&pc)),
        Format::Csv => emit(
            &args.out,
            &format!(
                "sum,bound,delta,elements\n{},{},{},{}\n",
                report::length_text(pc.sum.value()),
                report::length_text(pc.bound),
                report::length_text(pc.cover.delta),
                pc.cover.elements.len()
            ),
        ),
    }
}

fn parse_vertices(text: &str) -> Result<Vec<[f64; 2]>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let nums: Vec<&str> = pair.split(',').collect();
            if nums.len() != 2 {
                return Err(Error::Parse(format!(
                    "vertex '{pair}' must be two comma-separated numbers"
                )));
            }
            let x = nums[0].trim().parse::<f64>();
            let y = nums[1].trim().parse::<f64>();
            match (x, y) {
                (Ok(x), Ok(y)) => Ok([x, y]),
                _ => Err(Error::Parse(format!("vertex '{pair}' is not numeric"))),
            }
        })
        .collect()
}

fn run_shape(args: ShapeArgs) -> Result<()> {
    let spec = match args.kind.as_str() {
        "segment" => ShapeSpec::Segment {
            samples: args.samples,
        },
        "polyline" => ShapeSpec::Polyline {
            vertices: parse_vertices(args.vertices.as_deref().ok_or_else(|| {
                Error::ParamOutOfRange {
                    what: "--kind polyline needs --vertices".into(),
                }
            })?)?,
            samples_per_edge: args.samples_per_edge,
        },
        "semicircle-chain" => ShapeSpec::SemicircleChain {
            n: args.n,
            samples_per_arc: args.samples_per_arc,
        },
        "koch" => ShapeSpec::Koch {
            n: args.n,
            base_length: args.base_length,
            samples_per_edge: args.samples_per_edge,
        },
        "shrunk-koch" => ShapeSpec::ShrunkKoch {
            n: args.n,
            samples_per_edge: args.samples_per_edge,
        },
        "square-diagonals" => ShapeSpec::SquareDiagonals {
            samples_per_diagonal: args.samples_per_diagonal,
        },
        other => {
            return Err(Error::Parse(format!("unknown shape kind '{other}'")));
        }
    };
    let shape = generate(&spec)?;
    let (points, sidecar) = report::shape_files(&shape);
    log_info(&format!(
        "generated {} points, true length {}",
        shape.space.len(),
        report::length_text(shape.true_length)
    ));
    match &args.out {
        Some(path) => {
            emit(&Some(path.clone()), &serde_json::to_string(&points).unwrap())?;
            let sidecar_path = path.with_extension("meta.json");
            emit(
                &Some(sidecar_path),
                &serde_json::to_string(&sidecar).unwrap(),
            )
        }
        None => {
            emit(&None, &serde_json::to_string(&points).unwrap())?;
            emit(&None, &serde_json::to_string(&sidecar).unwrap())
        }
    }
}

fn run_golab(args: GolabArgs) -> Result<()> {
    let schedule = parse_schedule(&args.eps_schedule)?;
    let config = ExperimentConfig {
        eps_schedule: schedule,
        seed: args.seed,
    };
    if args.steps == 0 {
        return Err(Error::ParamOutOfRange {
            what: "--steps must be at least 1".into(),
        });
    }
    let report = match args.family.as_str() {
        "semicircle" => {
            let limit = generate(&ShapeSpec::Polyline {
                vertices: vec![[-1.0, 0.0], [1.0, 0.0]],
                samples_per_edge: 400,
            })?;
            let sequence: Vec<SampledShape> = (1..=args.steps)
                .map(|n| {
                    generate(&ShapeSpec::SemicircleChain {
                        n,
                        samples_per_arc: args.samples_per_arc,
                    })
                })
                .collect::<Result<_>>()?;
            convergence_experiment(&limit, &sequence, &config)?
        }
        "shrunk-koch" => {
            let limit = generate(&ShapeSpec::Polyline {
                vertices: vec![[-1.0, 0.0], [1.0, 0.0]],
                samples_per_edge: 400,
            })?;
            let sequence: Vec<SampledShape> = (1..=args.steps)
                .map(|n| {
                    generate(&ShapeSpec::ShrunkKoch {
                        n,
                        samples_per_edge: args.samples_per_edge,
                    })
                })
                .collect::<Result<_>>()?;
            convergence_experiment(&limit, &sequence, &config)?
        }
        "constant" => {
            let limit = generate(&ShapeSpec::Segment { samples: 201 })?;
            let sequence: Vec<SampledShape> = (0..args.steps)
                .map(|_| generate(&ShapeSpec::Segment { samples: 201 }))
                .collect::<Result<_>>()?;
            convergence_experiment(&limit, &sequence, &config)?
        }
        "grid" => counterexample_disconnected(args.steps)?,
        other => {
            return Err(Error::Parse(format!(
                "unknown family '{other}' (semicircle, shrunk-koch, grid, constant)"
            )));
        }
    };
    log_info(&format!(
        "{} steps, verdict {}",
        report.steps.len(),
        report.verdict
    ));
    match args.format {
        Format::Csv => emit(&args.out, &report::convergence_csv(&report)),
        Format::Json => emit_value(&args.out, &report::convergence_json(&report)),
    }
}

fn run_hits(args: HitsArgs) -> Result<()> {
    let space = load_space(&args.points)?;
    let a = set_or_all(&space, &args.set)?;
    let engine = match args.engine.as_str() {
        "auto" => SmtEngine::Auto,
        "mst" => SmtEngine::MstOnly,
        other => {
            return Err(Error::Parse(format!(
                "unknown engine '{other}' (auto or mst)"
            )));
        }
    };
    let hc = hit_collection(&space, &a, args.eps, engine)?;
    let mut value = report::hit_collection_json(&hc);
    if let Some(check) = &args.check {
        let b = IndexSet::new(parse_indices(check)?);
        b.validate_for(&space)?;
        value["hits"] = Value::Bool(check_hits(&space, &b, &hc)?);
    }
    match args.format {
        Format::Json => emit_value(&args.out, &value),
        Format::Csv => {
            let mut text = String::from("center,radius\n");
            for c in hc.centers.iter() {
                text.push_str(&format!("{},{}\n", c, report::length_text(hc.radius)));
            }
            emit(&args.out, &text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_and_schedule_parsing() {
        assert_eq!(parse_indices("0, 2,5").unwrap(), vec![0, 2, 5]);
        assert!(parse_indices("1,x").is_err());
        assert_eq!(parse_schedule("0.2,0.1").unwrap(), vec![0.2, 0.1]);
        assert!(parse_schedule("").is_err());
        assert_eq!(
            parse_vertices("0,0; 1,0 ;1,2").unwrap(),
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 2.0]]
        );
        assert!(parse_vertices("0,0;1").is_err());
    }
}

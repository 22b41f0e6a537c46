use std::io::Write;

use super::analyze::{analyze_graph, AnalyzeOptions};
use super::{load_input, sci, sweep_svg, AnalyzeArgs, CliError, CountArgs, GraphInput, SweepArgs, ZerosArgs};
use crate::gallery::{make_example, ExampleSpec};
use crate::graph::{
    coupling_delta, coupling_delta_prime, coupling_robin, flatten, scale_to_unweighted, MetricGraph,
};
use crate::zeros::{
    counting_function, locate_zeros, sweep_parameter, CountingTable, EvalMode, Rect, SecularEvaluator,
    SweepTrajectory, ZeroError, ZeroRecord, ZerosConfig,
};

/// Secular-function evaluator of a graph. Weighted graphs are rescaled when
/// possible and evaluated in their own variables otherwise.
pub fn evaluator_for(graph: &MetricGraph, mode: EvalMode) -> Result<SecularEvaluator, CliError> {
    if graph.is_weighted() {
        match scale_to_unweighted(graph) {
            Ok(g) => Ok(SecularEvaluator::new(&flatten(&g)?, mode)?),
            Err(_) => Ok(SecularEvaluator::weighted_direct(graph)?),
        }
    } else {
        Ok(SecularEvaluator::new(&flatten(graph)?, mode)?)
    }
}

/// Counting function on `samples` equally spaced radii up to `rmax`.
pub fn count_table(eval: &SecularEvaluator, rmax: f64, samples: usize) -> Result<CountingTable, CliError> {
    if !(rmax > 0.0) || samples < 2 {
        return Err(CliError::Parse(format!(
            "need rmax > 0 and at least two samples (got rmax {rmax}, samples {samples})"
        )));
    }
    let radii: Vec<f64> = (1..=samples).map(|j| rmax * j as f64 / samples as f64).collect();
    Ok(counting_function(eval, &radii, &ZerosConfig::default())?)
}

/// Zeros of one tile of the region, or the reason it could not be resolved.
#[derive(Clone, Debug)]
pub enum TileResult {
    Resolved(Vec<ZeroRecord>),
    Unresolved { rect: Rect, reason: String },
}

const TILE_DEPTH: usize = 2;

/// Locates zeros in `rect`; a region whose contour cannot be resolved is
/// split into quarters (twice at most) so the rest is still reported.
pub fn zeros_by_tiles(eval: &SecularEvaluator, rect: &Rect, tol: f64) -> Result<Vec<TileResult>, CliError> {
    if !(tol > 0.0) {
        return Err(CliError::Parse(format!("tolerance {tol} must be positive")));
    }
    let mut out = Vec::new();
    tiles(eval, rect, tol, 0, &mut out)?;
    Ok(out)
}

fn tiles(eval: &SecularEvaluator, rect: &Rect, tol: f64, depth: usize, out: &mut Vec<TileResult>) -> Result<(), CliError> {
    match locate_zeros(eval, rect, tol, &ZerosConfig::default()) {
        Ok(z) => out.push(TileResult::Resolved(z)),
        Err(e @ (ZeroError::ContourUnresolved { .. } | ZeroError::OnZero { .. })) => {
            if depth == TILE_DEPTH {
                out.push(TileResult::Unresolved {
                    rect: *rect,
                    reason: e.to_string(),
                });
            } else {
                for r in rect.split(0.5, 0.5) {
                    tiles(eval, &r, tol, depth + 1, out)?;
                }
            }
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn echo(out: &mut dyn Write, command: &str, input: &GraphInput, seed: u64, extra: &[(&str, String)]) -> std::io::Result<()> {
    writeln!(out, "# qgr {command}")?;
    writeln!(out, "# source: {}", input.source)?;
    writeln!(out, "# seed: {seed}")?;
    for (k, v) in extra {
        writeln!(out, "# {k}: {v}")?;
    }
    Ok(())
}

fn region_echo(r: &Rect) -> String {
    format!("[{}, {}] x [{}, {}]", sci(r.re_min), sci(r.re_max), sci(r.im_min), sci(r.im_max))
}

/// CSV `re,im,multiplicity,residual,status`, one row per zero and one
/// `unresolved` row (tile centre, empty multiplicity and residual) per failed tile.
pub fn write_zeros_csv(out: &mut dyn Write, tiles: &[TileResult]) -> std::io::Result<bool> {
    let mut rows: Vec<(f64, f64, String)> = Vec::new();
    let mut complete = true;
    for t in tiles {
        match t {
            TileResult::Resolved(zs) => {
                for z in zs {
                    let line = format!(
                        "{},{},{},{},{}",
                        sci(z.k.re),
                        sci(z.k.im),
                        z.multiplicity,
                        sci(z.residual),
                        z.status
                    );
                    rows.push((z.k.re, z.k.im, line));
                }
            }
            TileResult::Unresolved { rect, .. } => {
                complete = false;
                let c = rect.center();
                rows.push((c.re, c.im, format!("{},{},,,unresolved", sci(c.re), sci(c.im))));
            }
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    for t in tiles {
        if let TileResult::Unresolved { rect, reason } = t {
            writeln!(out, "# unresolved tile {}: {reason}", region_echo(rect))?;
        }
    }
    writeln!(out, "re,im,multiplicity,residual,status")?;
    for (_, _, line) in rows {
        writeln!(out, "{line}")?;
    }
    Ok(complete)
}

/// CSV `R,N` (N is `unresolved` when the contour failed) followed by the
/// footer row `fit,<slope>,<W_est>,<half_width>`.
pub fn write_count_csv(out: &mut dyn Write, table: &CountingTable) -> std::io::Result<()> {
    writeln!(out, "R,N")?;
    for s in &table.samples {
        match s.count {
            Some(n) => writeln!(out, "{},{n}", sci(s.used_radius))?,
            None => writeln!(out, "{},unresolved", sci(s.radius))?,
        }
    }
    writeln!(out, "# footer: fit,slope,W_est,half_width")?;
    writeln!(
        out,
        "fit,{},{},{}",
        sci(table.slope),
        sci(table.w_est),
        sci(table.half_width)
    )
}

/// CSV `param,track_id,re,im`, ordered by step then track.
pub fn write_sweep_csv(out: &mut dyn Write, traj: &SweepTrajectory) -> std::io::Result<()> {
    writeln!(out, "param,track_id,re,im")?;
    for step in &traj.steps {
        let mut zs = step.zeros.clone();
        zs.sort_by_key(|z| z.track_id);
        for z in zs {
            writeln!(out, "{},{},{},{}", sci(step.value), z.track_id, sci(z.k.re), sci(z.k.im))?;
        }
    }
    Ok(())
}

/// `steps` values from `from` to `to`, equally or geometrically spaced.
pub fn sweep_schedule(from: f64, to: f64, steps: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if steps < 2 || !from.is_finite() || !to.is_finite() {
        return Err(CliError::Parse("a sweep needs finite end points and at least two steps".into()));
    }
    if log && !(from * to > 0.0) {
        return Err(CliError::Parse("--log needs end points of the same sign, both nonzero".into()));
    }
    let n = (steps - 1) as f64;
    Ok((0..steps)
        .map(|j| {
            let t = j as f64 / n;
            if j == steps - 1 {
                to
            } else if log {
                from * (to / from).powf(t)
            } else {
                from + (to - from) * t
            }
        })
        .collect())
}

/// What a sweep varies.
#[derive(Clone, Debug)]
pub enum SweepFamily {
    /// A real parameter of a gallery example.
    Example { spec: ExampleSpec, key: String },
    /// The strength of a delta, delta-prime or Robin coupling at one vertex.
    Vertex {
        graph: MetricGraph,
        vertex: String,
        kind: String,
    },
}

impl SweepFamily {
    pub fn new(input: &GraphInput, param: &str) -> Result<Self, CliError> {
        if let Some(spec) = &input.example {
            let known = spec.parameters().iter().any(|(k, _)| *k == param);
            if !known {
                return Err(CliError::Parse(format!(
                    "`{}` has no parameter `{param}`",
                    spec.name()
                )));
            }
            return Ok(SweepFamily::Example {
                spec: spec.clone(),
                key: param.to_string(),
            });
        }
        let (vertex, kind) = param.rsplit_once('.').ok_or_else(|| {
            CliError::Parse(format!("`{param}`: expected <vertex>.delta, <vertex>.deltaprime or <vertex>.robin"))
        })?;
        if !matches!(kind, "delta" | "deltaprime" | "robin") {
            return Err(CliError::Parse(format!("`{kind}` is not a sweepable coupling")));
        }
        if input.graph.vertex_index(vertex).is_none() {
            return Err(CliError::Parse(format!("unknown vertex `{vertex}`")));
        }
        Ok(SweepFamily::Vertex {
            graph: input.graph.clone(),
            vertex: vertex.to_string(),
            kind: kind.to_string(),
        })
    }

    pub fn graph_at(&self, value: f64) -> Result<MetricGraph, CliError> {
        match self {
            SweepFamily::Example { spec, key } => Ok(make_example(&spec.with_real(key, value)?)?),
            SweepFamily::Vertex { graph, vertex, kind } => {
                let d = graph.coupling(vertex).map(|c| c.degree()).unwrap_or(0);
                let c = match kind.as_str() {
                    "delta" => coupling_delta(d, value)?,
                    "deltaprime" => coupling_delta_prime(d, value)?,
                    _ => coupling_robin(value)?,
                };
                Ok(graph.with_coupling(vertex, c)?)
            }
        }
    }

    pub fn run(&self, schedule: &[f64], region: &Rect, tol: f64, mode: EvalMode) -> Result<SweepTrajectory, CliError> {
        let name = match self {
            SweepFamily::Example { key, .. } => key.clone(),
            SweepFamily::Vertex { vertex, kind, .. } => format!("{vertex}.{kind}"),
        };
        let failure = std::sync::Mutex::new(None);
        let traj = sweep_parameter(
            &name,
            |v| match self.graph_at(v).and_then(|g| evaluator_for(&g, mode)) {
                Ok(e) => Ok(e),
                Err(e) => {
                    let msg = e.to_string();
                    *failure.lock().unwrap() = Some(e);
                    Err(ZeroError::InvalidInput(msg))
                }
            },
            schedule,
            region,
            tol,
            &ZerosConfig::default(),
        );
        match (traj, failure.into_inner().unwrap()) {
            (Ok(t), _) => Ok(t),
            (Err(_), Some(e)) => Err(e),
            (Err(e), None) => Err(e.into()),
        }
    }
}

pub(super) fn analyze(args: &AnalyzeArgs, seed: u64, out: &mut dyn Write) -> Result<i32, CliError> {
    let input = load_input(&args.graph)?;
    let opts = AnalyzeOptions {
        cap: args.cap,
        numeric: args.numeric.then_some((args.rmax, args.samples)),
        zeros: if args.zeros {
            Some((args.region.rect()?, args.tol))
        } else {
            None
        },
        mode: args.mode.into(),
        seed,
    };
    let report = analyze_graph(&input, &opts)?;
    if args.json {
        let text = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Io(std::io::Error::other(e)))?;
        writeln!(out, "{text}")?;
    } else {
        out.write_all(report.to_text().as_bytes())?;
    }
    Ok(if report.degenerate {
        3
    } else if !report.disagreements.is_empty() {
        4
    } else {
        0
    })
}

pub(super) fn zeros(args: &ZerosArgs, seed: u64, out: &mut dyn Write) -> Result<i32, CliError> {
    let input = load_input(&args.graph)?;
    let rect = args.region.rect()?;
    let mode: EvalMode = args.mode.into();
    let eval = evaluator_for(&input.graph, mode)?;
    let tiles = zeros_by_tiles(&eval, &rect, args.tol)?;
    echo(
        out,
        "zeros",
        &input,
        seed,
        &[
            ("region", region_echo(&rect)),
            ("tol", sci(args.tol)),
            ("evaluator", eval.description().to_string()),
        ],
    )?;
    let complete = write_zeros_csv(out, &tiles)?;
    Ok(if complete { 0 } else { 4 })
}

pub(super) fn count(args: &CountArgs, seed: u64, out: &mut dyn Write) -> Result<i32, CliError> {
    let input = load_input(&args.graph)?;
    let eval = evaluator_for(&input.graph, args.mode.into())?;
    let table = count_table(&eval, args.rmax, args.samples)?;
    echo(
        out,
        "count",
        &input,
        seed,
        &[
            ("rmax", sci(args.rmax)),
            ("samples", args.samples.to_string()),
            ("evaluator", eval.description().to_string()),
        ],
    )?;
    write_count_csv(out, &table)?;
    Ok(if table.partial { 4 } else { 0 })
}

pub(super) fn sweep(args: &SweepArgs, seed: u64, out: &mut dyn Write) -> Result<i32, CliError> {
    let input = load_input(&args.graph)?;
    let rect = args.region.rect()?;
    let schedule = sweep_schedule(args.from, args.to, args.steps, args.log)?;
    let family = SweepFamily::new(&input, &args.param)?;
    let traj = family.run(&schedule, &rect, args.tol, args.mode.into())?;
    echo(
        out,
        "sweep",
        &input,
        seed,
        &[
            ("param", args.param.clone()),
            ("schedule", format!("{} -> {} in {} {} steps", sci(args.from), sci(args.to), args.steps, if args.log { "log" } else { "linear" })),
            ("region", region_echo(&rect)),
            ("tol", sci(args.tol)),
        ],
    )?;
    write_sweep_csv(out, &traj)?;
    if let Some(path) = &args.svg {
        std::fs::write(path, sweep_svg(&traj, &rect))?;
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules() {
        let s = sweep_schedule(1.0, 1e-3, 4, true).unwrap();
        assert_eq!(s.len(), 4);
        assert!((s[1] - 0.1).abs() < 1e-15 && s[3] == 1e-3);
        assert_eq!(sweep_schedule(0.0, 1.0, 3, false).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(sweep_schedule(-1.0, 1.0, 3, true).is_err());
    }

    #[test]
    fn vertex_family_replaces_coupling() {
        let text = "vertex v\nedge e v v length 1\nlead f1 v\nlead f2 v\ncouple v delta 1\n";
        let input = GraphInput::from_qgf(text, "t").unwrap();
        let fam = SweepFamily::new(&input, "v.delta").unwrap();
        let g = fam.graph_at(0.25).unwrap();
        assert_eq!(
            g.coupling("v").unwrap().kind,
            crate::graph::CouplingKind::Delta { alpha: 0.25 }
        );
        assert!(SweepFamily::new(&input, "w.delta").is_err());
        assert!(SweepFamily::new(&input, "v.kirchhoff").is_err());
    }
}

//! Command-line front end: construct a system from a config, print
//! feasibility interval tables, render curve samples (CSV + optional SVG),
//! and verify the configured shape guarantees empirically.
//!
//! Exit codes: 1 IO failure, 2 validation failure, 3 empty feasibility
//! interval, 4 failed verification check.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use zipfif::config::{load_config, LoadedRun};
use zipfif::error::{ConfigError, ShapeError};
use zipfif::model::ContractionMode;
use zipfif::render::{refine_orbit, CurveSample};
use zipfif::shape::{
    check_family, compute_slope_aux, positivity_intervals, rectangle_intervals, slope_intervals,
    Extremes, FeasibleInterval, ShapeMode, ShapeSpec, SlopeOptions, Stage,
};
use zipfif::system::ZipperSystem;
use zipfif::verify::{
    check_interpolation, check_lines, check_positive, check_rectangle, l1_error, weierstrass,
    LineSide, VerificationReport,
};

const EXIT_IO: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_EMPTY_INTERVAL: u8 = 3;
const EXIT_FAILED_CHECK: u8 = 4;

#[derive(Parser)]
#[command(name = "zipfif", version, about = "Hidden-variable fractal interpolation over zipper interval maps")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the mixing parameter used by the tilde-stage bounds.
    #[arg(long)]
    omega: Option<f64>,
    /// Accept factor families whose norm sums reach 1 (no envelope or
    /// contraction constants are derived).
    #[arg(long)]
    relaxed_contraction: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StageArg {
    P,
    Q,
    PTilde,
    QTilde,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotComponent {
    F1,
    F2,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the system and print its derived constants.
    Construct {
        #[command(flatten)]
        common: Common,
    },
    /// Print feasibility intervals for the configured shape constraint.
    Feasible {
        #[command(flatten)]
        common: Common,
        /// Which factor stage to bound (later stages consume the given
        /// values of earlier ones).
        #[arg(long, value_enum, default_value = "all")]
        stage: StageArg,
        /// Fixed value for an earlier stage, e.g. `--given p=0.5`; applied
        /// uniformly across subintervals. Defaults to the config's factors.
        #[arg(long = "given", value_parser = parse_given)]
        given: Vec<(String, f64)>,
    },
    /// Render the attractor graph to a curve CSV (and optional SVG).
    Render {
        #[command(flatten)]
        common: Common,
        /// Refinement depth (overrides the config).
        #[arg(long)]
        depth: Option<u32>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also emit an SVG polyline plot of the chosen component.
        #[arg(long, value_enum)]
        plot: Option<PlotComponent>,
    },
    /// Check the guarantees on a rendered sample and report pass/fail.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        depth: Option<u32>,
        /// Compare f1 against the truncated cosine series with this many
        /// terms and report the mean absolute error.
        #[arg(long, value_name = "TERMS")]
        against_weierstrass: Option<usize>,
        /// Verify a previously rendered curve CSV instead of re-rendering.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
}

fn parse_given(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let name = name.trim();
    if !matches!(name, "p" | "q" | "p_tilde" | "q_tilde") {
        return Err(format!("unknown factor {name:?} (p, q, p_tilde, q_tilde)"));
    }
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("bad value in {s:?}: {e}"))?;
    Ok((name.to_string(), value))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Construct { common } => cmd_construct(&common),
        Cmd::Feasible { common, stage, given } => cmd_feasible(&common, stage, &given),
        Cmd::Render { common, depth, out, plot } => cmd_render(&common, depth, &out, plot),
        Cmd::Verify { common, depth, against_weierstrass, curve } => {
            cmd_verify(&common, depth, against_weierstrass, curve.as_deref())
        }
    };
    match code {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}

fn load(common: &Common) -> Result<LoadedRun, u8> {
    let mut run = load_config(&common.config).map_err(|e| {
        eprintln!("error: {e}");
        match e {
            ConfigError::Io { .. } => EXIT_IO,
            _ => EXIT_VALIDATION,
        }
    })?;
    if let Some(w) = common.omega {
        run.omega = w;
        if let Some(shape) = &mut run.shape {
            shape.omega = w;
        }
    }
    if common.relaxed_contraction {
        run.mode = ContractionMode::Relaxed;
    }
    Ok(run)
}

fn build(run: &LoadedRun) -> Result<ZipperSystem, u8> {
    ZipperSystem::new(
        run.data.clone(),
        run.sig.clone(),
        run.fam.clone(),
        run.mode,
    )
    .map_err(|e| {
        eprintln!("error: {e}");
        EXIT_VALIDATION
    })
}

fn cmd_construct(common: &Common) -> Result<(), u8> {
    let run = load(common)?;
    let sys = build(&run)?;
    println!("run: {}", run.name);
    println!("subintervals: {}", sys.n());
    println!("domain: [{}, {}]", run.data.x0(), run.data.xn());
    println!("A (max |a_i|): {:.6}", sys.big_a());
    println!("S_bar: {:.6}", sys.sbar());
    match sys.envelope() {
        Some(env) => {
            println!("envelope U: {:.6}", env.u);
            println!("envelope U_tilde: {:.6}", env.u_tilde);
        }
        None => println!("envelope: not available (relaxed contraction)"),
    }
    match sys.contraction() {
        Some(c) => {
            println!("theta: {:.6e}", c.theta);
            println!("kappa: {:.6}", c.kappa);
        }
        None => println!("contraction constants: not available"),
    }
    Ok(())
}

fn shape_error_code(e: &ShapeError) -> u8 {
    let _ = e;
    EXIT_VALIDATION
}

fn cmd_feasible(common: &Common, stage: StageArg, given: &[(String, f64)]) -> Result<(), u8> {
    let run = load(common)?;
    let Some(spec) = run.shape.clone() else {
        eprintln!("error: config {} has no [shape] section", run.name);
        return Err(EXIT_VALIDATION);
    };
    spec.validate(&run.data).map_err(|e| {
        eprintln!("error: {e}");
        shape_error_code(&e)
    })?;

    if stage == StageArg::All && given.is_empty() {
        // Full staged table from the config's own factors.
        let report = check_family(&run.data, &run.sig, &run.fam, &spec).map_err(|e| {
            eprintln!("error: {e}");
            shape_error_code(&e)
        })?;
        let mut any_empty = false;
        println!("run: {}  (staged bounds from configured factors)", run.name);
        println!("{:<9} {:>3}  {:>24}  {:>10}  result", "factor", "i", "feasible interval", "value");
        for row in &report.rows {
            any_empty |= row.bound.is_empty();
            println!(
                "{:<9} {:>3}  {:>24}  {:>10.4}  {}",
                row.factor,
                row.interval,
                format_interval(&row.bound),
                row.value_min,
                if row.pass { "ok" } else { "outside" }
            );
        }
        if any_empty {
            return Err(EXIT_EMPTY_INTERVAL);
        }
        return Ok(());
    }

    let n = run.data.n();
    let extremes = |name: &str| -> Vec<Extremes> {
        if let Some((_, v)) = given.iter().find(|(g, _)| g == name) {
            return vec![Extremes::at(*v); n];
        }
        let list = match name {
            "p" => &run.fam.p,
            "q" => &run.fam.q,
            "p_tilde" => &run.fam.p_tilde,
            _ => &run.fam.q_tilde,
        };
        (1..=n)
            .map(|i| {
                let (lo, hi) = run.data.interval(i);
                let (min, max) = list[i - 1].range(lo, hi);
                Extremes { min, max }
            })
            .collect()
    };
    let stages: Vec<Stage> = match stage {
        StageArg::P => vec![Stage::P],
        StageArg::Q => vec![Stage::Q { p: extremes("p") }],
        StageArg::PTilde => vec![Stage::PTilde { p: extremes("p") }],
        StageArg::QTilde => vec![Stage::QTilde {
            q: extremes("q"),
            p_tilde: extremes("p_tilde"),
        }],
        StageArg::All => vec![
            Stage::P,
            Stage::Q { p: extremes("p") },
            Stage::PTilde { p: extremes("p") },
            Stage::QTilde {
                q: extremes("q"),
                p_tilde: extremes("p_tilde"),
            },
        ],
    };

    let intervals_for = |st: &Stage| -> Result<Vec<FeasibleInterval>, u8> {
        stage_intervals(&run, &spec, st).map_err(|e| {
            eprintln!("error: {e}");
            shape_error_code(&e)
        })
    };
    println!("run: {}", run.name);
    let mut any_empty = false;
    for st in &stages {
        let intervals = intervals_for(st)?;
        for (i, itv) in intervals.iter().enumerate() {
            any_empty |= itv.is_empty();
            println!(
                "{:<9} {:>3}  {}{}",
                st.name(),
                i + 1,
                format_interval(itv),
                if itv.is_empty() { "  EMPTY" } else { "" }
            );
        }
    }
    if any_empty {
        Err(EXIT_EMPTY_INTERVAL)
    } else {
        Ok(())
    }
}

fn stage_intervals(
    run: &LoadedRun,
    spec: &ShapeSpec,
    stage: &Stage,
) -> Result<Vec<FeasibleInterval>, ShapeError> {
    match &spec.mode {
        ShapeMode::Rectangle { .. } => rectangle_intervals(&run.data, spec, stage),
        ShapeMode::Positivity => {
            let norms: Vec<_> = (1..=run.data.n()).map(|i| run.fam.norms(&run.data, i)).collect();
            let aux = compute_slope_aux(&run.data, Some(&norms), None, spec)?;
            positivity_intervals(&run.data, spec, stage, &aux)
        }
        _ => {
            let norms: Vec<_> = (1..=run.data.n()).map(|i| run.fam.norms(&run.data, i)).collect();
            let u = ZipperSystem::new(
                run.data.clone(),
                run.sig.clone(),
                run.fam.clone(),
                ContractionMode::Strict,
            )
            .ok()
            .and_then(|s| s.envelope())
            .map(|e| e.u);
            let aux = compute_slope_aux(&run.data, Some(&norms), u, spec)?;
            slope_intervals(&run.data, spec, stage, &aux, SlopeOptions::default())
        }
    }
}

fn format_interval(itv: &FeasibleInterval) -> String {
    format!(
        "{}{:.4}, {:.4}{}",
        if itv.lo_strict { "(" } else { "[" },
        itv.lo,
        itv.hi,
        if itv.hi_strict { ")" } else { "]" }
    )
}

fn cmd_render(
    common: &Common,
    depth: Option<u32>,
    out: &Path,
    plot: Option<PlotComponent>,
) -> Result<(), u8> {
    let run = load(common)?;
    let sys = build(&run)?;
    let depth = depth.unwrap_or(run.render.depth);
    let sample = refine_orbit(&sys, depth).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_VALIDATION
    })?;
    std::fs::create_dir_all(out).map_err(|e| {
        eprintln!("error: cannot create {}: {e}", out.display());
        EXIT_IO
    })?;
    let csv_path = out.join(format!("{}-curve.csv", run.name));
    let mut text = String::from("x,f1,f2\n");
    for p in sample.points() {
        // 17 significant digits round-trip f64 exactly.
        text.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", p[0], p[1], p[2]));
    }
    std::fs::write(&csv_path, text).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", csv_path.display());
        EXIT_IO
    })?;
    println!("wrote {} ({} points, depth {depth})", csv_path.display(), sample.len());
    if let Some(component) = plot {
        let svg_path = out.join(format!("{}.svg", run.name));
        let svg = render_svg(&run, &sample, component);
        std::fs::write(&svg_path, svg).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", svg_path.display());
            EXIT_IO
        })?;
        println!("wrote {}", svg_path.display());
    }
    Ok(())
}

/// Minimal SVG 1.1: one polyline over the chosen component, with the
/// configured constraint geometry (rectangle walls or lines) underneath.
fn render_svg(run: &LoadedRun, sample: &CurveSample, component: PlotComponent) -> String {
    let (w, h, pad) = (900.0_f64, 600.0_f64, 40.0_f64);
    let idx = match component {
        PlotComponent::F1 => 1,
        PlotComponent::F2 => 2,
    };
    let (x0, xn) = (run.data.x0(), run.data.xn());
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in sample.points() {
        lo = lo.min(p[idx]);
        hi = hi.max(p[idx]);
    }
    // Include the constraint geometry in the value range.
    let mut geometry: Vec<((f64, f64), (f64, f64))> = Vec::new();
    match run.shape.as_ref().map(|s| &s.mode) {
        Some(ShapeMode::Rectangle { k1, k2, k1_tilde, k2_tilde }) => {
            let (a, b) = match component {
                PlotComponent::F1 => (*k1, *k2),
                PlotComponent::F2 => (*k1_tilde, *k2_tilde),
            };
            geometry.push(((x0, a), (xn, a)));
            geometry.push(((x0, b), (xn, b)));
        }
        Some(ShapeMode::Positivity) => geometry.push(((x0, 0.0), (xn, 0.0))),
        Some(ShapeMode::LinesBelow { lines }) | Some(ShapeMode::LinesAbove { lines }) => {
            if matches!(component, PlotComponent::F1) {
                for (i, l) in lines.iter().enumerate() {
                    let (a, b) = run.data.interval(i + 1);
                    geometry.push(((a, l.eval(a)), (b, l.eval(b))));
                }
            }
        }
        Some(ShapeMode::LinesBetween { lower, upper }) => {
            if matches!(component, PlotComponent::F1) {
                for (i, l) in lower.iter().chain(upper).enumerate() {
                    let (a, b) = run.data.interval(i % run.data.n() + 1);
                    geometry.push(((a, l.eval(a)), (b, l.eval(b))));
                }
            }
        }
        None => {}
    }
    for ((_, a), (_, b)) in &geometry {
        lo = lo.min(a.min(*b));
        hi = hi.max(a.max(*b));
    }
    if hi <= lo {
        hi = lo + 1.0;
    }
    let sx = |x: f64| pad + (x - x0) / (xn - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - lo) / (hi - lo) * (h - 2.0 * pad);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    for ((xa, ya), (xb, yb)) in &geometry {
        svg.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#c33\" stroke-width=\"1\"/>\n",
            sx(*xa), sy(*ya), sx(*xb), sy(*yb)
        ));
    }
    // Thin the polyline to at most ~4000 vertices; more adds nothing at
    // this raster size.
    let step = (sample.len() / 4000).max(1);
    let mut pts = String::new();
    for p in sample.points().iter().step_by(step) {
        pts.push_str(&format!("{:.2},{:.2} ", sx(p[0]), sy(p[idx])));
    }
    let last = sample.points()[sample.len() - 1];
    pts.push_str(&format!("{:.2},{:.2}", sx(last[0]), sy(last[idx])));
    svg.push_str(&format!(
        "  <polyline points=\"{pts}\" fill=\"none\" stroke=\"#226\" stroke-width=\"1\"/>\n"
    ));
    svg.push_str("</svg>\n");
    svg
}

fn cmd_verify(
    common: &Common,
    depth: Option<u32>,
    weierstrass_terms: Option<usize>,
    curve: Option<&Path>,
) -> Result<(), u8> {
    let run = load(common)?;
    let sys = build(&run)?;
    let depth = depth.unwrap_or(run.render.depth);
    let sample = match curve {
        Some(path) => read_curve_csv(path)?,
        None => refine_orbit(&sys, depth).map_err(|e| {
            eprintln!("error: {e}");
            EXIT_VALIDATION
        })?,
    };

    let mut reports: Vec<VerificationReport> = Vec::new();
    let ver = |r: Result<VerificationReport, zipfif::error::VerifyError>| {
        r.map_err(|e| {
            eprintln!("error: {e}");
            EXIT_VALIDATION
        })
    };
    reports.push(ver(check_interpolation(&sample, &run.data, 1e-9))?);
    if let Some(env) = sys.envelope() {
        reports.push(ver(check_rectangle(
            &sample, -env.u, env.u, -env.u_tilde, env.u_tilde,
        ))?);
    }
    match run.shape.as_ref().map(|s| &s.mode) {
        Some(ShapeMode::Rectangle { k1, k2, k1_tilde, k2_tilde }) => {
            reports.push(ver(check_rectangle(&sample, *k1, *k2, *k1_tilde, *k2_tilde))?);
        }
        Some(ShapeMode::Positivity) => reports.push(ver(check_positive(&sample))?),
        Some(ShapeMode::LinesBelow { lines }) => {
            reports.push(ver(check_lines(&sample, &run.data, lines, LineSide::Above))?);
        }
        Some(ShapeMode::LinesAbove { lines }) => {
            reports.push(ver(check_lines(&sample, &run.data, lines, LineSide::Below))?);
        }
        Some(ShapeMode::LinesBetween { lower, upper }) => {
            reports.push(ver(check_lines(&sample, &run.data, lower, LineSide::Above))?);
            reports.push(ver(check_lines(&sample, &run.data, upper, LineSide::Below))?);
        }
        None => {}
    }

    println!("run: {}", run.name);
    let mut failed = false;
    for r in &reports {
        failed |= !r.pass;
        println!(
            "{}: {}  worst_violation={:.3e}{}  samples={}  slack={:.3e}",
            r.property,
            if r.pass { "PASS" } else { "FAIL" },
            r.worst_violation,
            r.worst_x.map_or(String::new(), |x| format!("  at x={x:.6}")),
            r.samples_checked,
            r.slack,
        );
    }

    if let Some(terms) = weierstrass_terms {
        let m = run.render.samples;
        let err = l1_error(
            |x| sample.interpolate(x).0,
            |x| weierstrass(x, terms),
            run.data.x0(),
            run.data.xn(),
            m,
        )
        .map_err(|e| {
            eprintln!("error: {e}");
            EXIT_VALIDATION
        })?;
        println!("mean |f1 - cosine series ({terms} terms)| over {m} cells: {err:.6}");
    }

    if failed {
        Err(EXIT_FAILED_CHECK)
    } else {
        Ok(())
    }
}

fn read_curve_csv(path: &Path) -> Result<CurveSample, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_IO
    })?;
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || (idx == 0 && line.starts_with('x')) {
            continue;
        }
        let mut it = line.split(',').map(str::trim);
        let mut next = || -> Result<f64, u8> {
            it.next()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| {
                    eprintln!("error: {}:{}: bad curve row", path.display(), idx + 1);
                    EXIT_VALIDATION
                })
        };
        points.push([next()?, next()?, next()?]);
    }
    Ok(CurveSample::from_points(points))
}

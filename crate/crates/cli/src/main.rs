//! Experiment driver: curvature checks, quotients, bend certification,
//! homotopy sweeps, reduced minimization, surgery derivation chains, and
//! continuity sweeps, with deterministic CSV/JSON artifacts.
//!
//! Exit codes: 0 all assertions pass, 1 usage/configuration error,
//! 2 certification or assertion failure (report written).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use yamabe_core::curvature::scalar_report;
use yamabe_core::field::ScalarField;
use yamabe_core::invariants::{
    disjoint_union_yamabe, hebey_vaugon_bound, kobayashi_interval, lambda_n,
    section4_examples, surgery_lower_bound, OrbitBound,
};
use yamabe_core::io::{columns_csv, fnv1a64, metric_csv};
use yamabe_core::models;
use yamabe_core::neck::assembly::{assemble_surgered_metric, outer_tube_region, AssemblyOptions};
use yamabe_core::neck::bend::{build_bend_curve, certify_bend, shrink_curve, BendParams};
use yamabe_core::neck::homotopy::{certify_homotopy, HomotopySpec, PerturbationSpec};
use yamabe_core::quotient::{volume, yamabe_quotient};
use yamabe_core::reduce::{
    continuity_experiment, minimize_reduced_with, reduce_cohomogeneity_one, MinimizeOptions,
    ModelFiber, OrbitProfile, WarpedModel,
};
use yamabe_core::MetricField;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "yamabe", version, about = "Numerical scalar-curvature surgery experiments")]
struct Cli {
    /// TOML (or JSON) configuration file; command-line flags override file
    /// values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (default: $YAMABE_OUT or ./yamabe-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scalar-curvature report for a model metric.
    Curvature(CurvatureArgs),
    /// Yamabe quotient of a test function on a model metric.
    Quotient(QuotientArgs),
    /// Build and certify a bending curve.
    Bend(BendArgs),
    /// Boundary-homotopy curvature sweep.
    Homotopy(HomotopyArgs),
    /// Cohomogeneity-one reduction and minimization.
    Reduce(ReduceArgs),
    /// Derivation chain for invariants of surgered sphere products.
    SurgeryDemo(SurgeryDemoArgs),
    /// Closed-form constants and combination formulas.
    Invariants(InvariantsArgs),
    /// Quotient continuity under a converging family of metrics.
    Continuity(ContinuityArgs),
}

#[derive(Args, Serialize, Clone)]
struct CurvatureArgs {
    /// Model: s2 | s3 | s4 | torus3 | cylinder3 | s2xs2.
    #[arg(long)]
    model: Option<String>,
    /// Leading-axis resolution.
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    /// Pole exclusion band (radians) for sphere charts.
    #[arg(long)]
    band: Option<f64>,
    /// Expected constant scalar curvature; deviations beyond --tolerance are
    /// listed as violations and exit with status 2.
    #[arg(long, allow_negative_numbers = true)]
    expected: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Also write the sampled metric as CSV.
    #[arg(long, default_value_t = false)]
    #[serde(skip)]
    emit_metric: bool,
}

#[derive(Args, Serialize, Clone)]
struct QuotientArgs {
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    band: Option<f64>,
    /// Test function: const | cos.
    #[arg(long)]
    phi: Option<String>,
}

#[derive(Args, Serialize, Clone)]
struct BendArgs {
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    theta0: Option<f64>,
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long)]
    eps2: Option<f64>,
    #[arg(long)]
    r1p_ratio: Option<f64>,
    #[arg(long)]
    safety: Option<f64>,
    /// Homothetic shrink factor applied to the tail.
    #[arg(long)]
    mu: Option<f64>,
    /// Ambient scalar-curvature lower bound the certificate is stated
    /// against.
    #[arg(long, allow_negative_numbers = true)]
    s_lower: Option<f64>,
}

#[derive(Args, Serialize, Clone)]
struct HomotopyArgs {
    #[arg(long)]
    q: Option<usize>,
    /// Decreasing sphere radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    /// Convex-combination weights, comma separated.
    #[arg(long, value_delimiter = ',')]
    nu_grid: Option<Vec<f64>>,
    /// Cross-section radius used by the collar sweep.
    #[arg(long)]
    r3: Option<f64>,
    #[arg(long)]
    collar_length: Option<f64>,
    /// Include the standard desk perturbation (W-block O(r), mixed O(r^2)).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    #[serde(skip)]
    perturbed: bool,
}

#[derive(Args, Serialize, Clone)]
struct ReduceArgs {
    /// Model: s3 | s3-warped | cylinder3.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Warp amplitude for s3-warped.
    #[arg(long)]
    amplitude: Option<f64>,
    /// Subcritical safeguard epsilon (0 disables).
    #[arg(long)]
    subcritical: Option<f64>,
}

#[derive(Args, Serialize, Clone)]
struct SurgeryDemoArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Also assemble the desk-model surgered metric (certified bend + collar
    /// + outer tube) and report region volumes and interfaces.
    #[arg(long, default_value_t = false)]
    #[serde(skip)]
    assemble: bool,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    theta0: Option<f64>,
    #[arg(long)]
    r0: Option<f64>,
}

#[derive(Args, Serialize, Clone)]
struct InvariantsArgs {
    #[command(subcommand)]
    formula: Formula,
}

#[derive(Subcommand, Serialize, Clone)]
enum Formula {
    /// Round-sphere constant lambda_n.
    Lambda {
        #[arg(long)]
        n: usize,
    },
    /// Orbit-counting upper bound lambda_n k^{2/n}.
    OrbitBound {
        #[arg(long)]
        n: usize,
        /// Minimal orbit cardinality, or "inf".
        #[arg(long)]
        orbit: String,
    },
    /// Two-sided interval s_min/max * vol^{2/n}.
    Interval {
        #[arg(long, allow_negative_numbers = true)]
        s_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        s_max: f64,
        #[arg(long)]
        vol: f64,
        #[arg(long)]
        n: usize,
    },
    /// Disjoint-union combination formula.
    DisjointUnion {
        #[arg(long, allow_negative_numbers = true)]
        y1: f64,
        #[arg(long, allow_negative_numbers = true)]
        y2: f64,
        #[arg(long)]
        n: usize,
    },
    /// Surgery lower bound with hypothesis flags.
    SurgeryBound {
        #[arg(long, allow_negative_numbers = true)]
        y0: f64,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args, Serialize, Clone)]
struct ContinuityArgs {
    /// Number of family members (amplitudes 0.8 * 2^{-k}, k = 0..count).
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

/// Values loaded from the optional config file, keyed per command.
struct FileConfig {
    table: toml::Table,
}

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig { table: toml::Table::new() });
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let table: toml::Table = if path.extension().is_some_and(|e| e == "json") {
            let v: serde_json::Value = serde_json::from_str(&text).context("invalid JSON config")?;
            toml::Table::try_from(v).context("JSON config is not a table")?
        } else {
            text.parse().context("invalid TOML config")?
        };
        Ok(FileConfig { table })
    }

    fn get<T: serde::de::DeserializeOwned>(&self, section: &str, key: &str) -> Option<T> {
        self.table
            .get(section)
            .and_then(|s| s.as_table())
            .and_then(|s| s.get(key))
            .and_then(|v| v.clone().try_into().ok())
    }
}

macro_rules! setting {
    ($cli:expr, $file:expr, $section:literal, $key:literal, $default:expr) => {
        $cli.clone()
            .or_else(|| $file.get($section, $key))
            .unwrap_or($default)
    };
}

struct Emitter {
    dir: PathBuf,
    files: Vec<(String, u64)>,
}

impl Emitter {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Emitter { dir: dir.to_path_buf(), files: Vec::new() })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents)
            .with_context(|| format!("cannot write {}", path.display()))?;
        self.files.push((name.to_string(), fnv1a64(contents.as_bytes())));
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    fn manifest(&mut self, command: &str, params: serde_json::Value, wall: Instant) -> Result<()> {
        let manifest = json!({
            "schema_version": SCHEMA_VERSION,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "parameters": params,
            "wall_ms": wall.elapsed().as_millis() as u64,
            "files": self.files.iter().map(|(name, hash)| {
                json!({ "path": name, "fnv1a64": format!("{hash:016x}") })
            }).collect::<Vec<_>>(),
        });
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, text)
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(())
    }
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    eprintln!("error: {msg}");
    std::process::exit(1);
}

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    let out_dir = cli
        .out
        .clone()
        .or_else(|| std::env::var_os("YAMABE_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("yamabe-out"));
    let file = match FileConfig::load(cli.config.as_deref()) {
        Ok(f) => f,
        Err(e) => usage_error(e),
    };
    let mut emitter = match Emitter::new(&out_dir) {
        Ok(e) => e,
        Err(e) => usage_error(e),
    };

    let outcome = match &cli.command {
        Command::Curvature(args) => run_curvature(args, &file, &mut emitter),
        Command::Quotient(args) => run_quotient(args, &file, &mut emitter),
        Command::Bend(args) => run_bend(args, &file, &mut emitter),
        Command::Homotopy(args) => run_homotopy(args, &file, &mut emitter),
        Command::Reduce(args) => run_reduce(args, &file, &mut emitter),
        Command::SurgeryDemo(args) => run_surgery_demo(args, &file, &mut emitter),
        Command::Invariants(args) => run_invariants(args, &mut emitter),
        Command::Continuity(args) => run_continuity(args, &file, &mut emitter),
    };

    match outcome {
        Ok(run) => {
            if let Err(e) = emitter.manifest(run.command, run.parameters, start) {
                usage_error(e);
            }
            if run.certified {
                std::process::exit(0);
            } else {
                eprintln!(
                    "certification failed; report under {}",
                    out_dir.display()
                );
                std::process::exit(2);
            }
        }
        Err(e) => usage_error(format!("{e:#}")),
    }
}

struct RunOutcome {
    command: &'static str,
    parameters: serde_json::Value,
    certified: bool,
}

fn build_model(
    name: &str,
    resolution: usize,
    radius: f64,
    band: f64,
) -> Result<MetricField> {
    let res_ang = (resolution / 2).max(8);
    Ok(match name {
        "s2" => models::round_sphere(2, radius, &[resolution, 8], band)?,
        "s3" => models::round_sphere(3, radius, &[resolution, res_ang, 8], band)?,
        "s4" => models::round_sphere(4, radius, &[resolution, res_ang / 2, res_ang / 2, 8], band)?,
        "torus3" => models::flat_torus(&[1.0, 1.0, 1.0], &[resolution, resolution, resolution])?,
        "cylinder3" => {
            let cross = models::round_sphere(2, radius, &[res_ang, 8], band)?;
            models::cylinder(&cross, 4.0, resolution)?
        }
        "s2xs2" => {
            let a = models::round_sphere(2, 1.0, &[resolution, 8], band)?;
            let b = models::round_sphere(2, radius, &[resolution, 8], band)?;
            models::product(&a, &b)?
        }
        other => bail!("unknown model '{other}' (s2, s3, s4, torus3, cylinder3, s2xs2)"),
    })
}

fn run_curvature(args: &CurvatureArgs, file: &FileConfig, em: &mut Emitter) -> Result<RunOutcome> {
    let model = setting!(args.model, file, "curvature", "model", "s3".to_string());
    let resolution = setting!(args.resolution, file, "curvature", "resolution", 96);
    let radius = setting!(args.radius, file, "curvature", "radius", 1.0);
    let band = setting!(args.band, file, "curvature", "band", 0.5);
    let tolerance = setting!(args.tolerance, file, "curvature", "tolerance", 0.05);
    let expected = args.expected.or_else(|| file.get("curvature", "expected"));
    if !(0.0..1.0).contains(&tolerance) {
        bail!("tolerance must lie in (0, 1)");
    }

    let g = build_model(&model, resolution, radius, band)?;
    let report = scalar_report(&g, expected, tolerance)?;
    em.write_json("curvature.json", &report)?;
    if args.emit_metric {
        em.write("metric.csv", &metric_csv(&g))?;
        em.write("chart.json", &yamabe_core::io::chart_header_json(g.chart())?)?;
    }
    let certified = report.violations.is_empty();
    println!(
        "scalar curvature of {model}: min {:.6} max {:.6} mean {:.6} over {} points",
        report.scalar_min, report.scalar_max, report.scalar_mean, report.points_evaluated
    );
    Ok(RunOutcome {
        command: "curvature",
        parameters: json!({
            "model": model, "resolution": resolution, "radius": radius,
            "band": band, "expected": expected, "tolerance": tolerance,
        }),
        certified,
    })
}

fn run_quotient(args: &QuotientArgs, file: &FileConfig, em: &mut Emitter) -> Result<RunOutcome> {
    let model = setting!(args.model, file, "quotient", "model", "s3".to_string());
    let resolution = setting!(args.resolution, file, "quotient", "resolution", 96);
    let radius = setting!(args.radius, file, "quotient", "radius", 1.0);
    let band = setting!(args.band, file, "quotient", "band", 0.3);
    let phi_kind = setting!(args.phi, file, "quotient", "phi", "const".to_string());

    let g = build_model(&model, resolution, radius, band)?;
    let phi = match phi_kind.as_str() {
        "const" => ScalarField::constant(g.chart().clone(), 1.0),
        "cos" => ScalarField::from_fn(g.chart().clone(), |p| 1.0 + 0.3 * p[0].cos()),
        other => bail!("unknown test function '{other}' (const, cos)"),
    };
    let value = yamabe_quotient(&g, &phi)?;
    let vol = volume(&g)?;
    em.write_json(
        "quotient.json",
        &json!({
            "model": model, "phi": phi_kind, "quotient": value, "volume": vol,
        }),
    )?;
    println!("Q({model}, {phi_kind}) = {value:.9}");
    Ok(RunOutcome {
        command: "quotient",
        parameters: json!({
            "model": model, "resolution": resolution, "radius": radius,
            "band": band, "phi": phi_kind,
        }),
        certified: true,
    })
}

fn run_bend(args: &BendArgs, file: &FileConfig, em: &mut Emitter) -> Result<RunOutcome> {
    let params = BendParams {
        q: setting!(args.q, file, "bend", "q", 3),
        theta0: setting!(args.theta0, file, "bend", "theta0", 0.1),
        r0: setting!(args.r0, file, "bend", "r0", 50.0),
        eps2: setting!(args.eps2, file, "bend", "eps2", 1e-3),
        r1p_ratio: setting!(args.r1p_ratio, file, "bend", "r1p_ratio", 0.05),
        safety: setting!(args.safety, file, "bend", "safety", 1.2),
    };
    let mu = setting!(args.mu, file, "bend", "mu", 1.0);
    let s_lower = setting!(args.s_lower, file, "bend", "s_lower", 0.0);

    let curve = build_bend_curve(params).map_err(|e| anyhow::anyhow!(e))?;
    let curve = if mu < 1.0 { shrink_curve(&curve, mu).map_err(|e| anyhow::anyhow!(e))? } else { curve };

    // Curve CSV with the certification defect column.
    let defects = curve.defects();
    let cols: Vec<Vec<f64>> = vec![
        curve.samples.iter().map(|s| s.l).collect(),
        curve.samples.iter().map(|s| s.t).collect(),
        curve.samples.iter().map(|s| s.r).collect(),
        curve.samples.iter().map(|s| s.theta).collect(),
        curve.samples.iter().map(|s| s.k).collect(),
        defects,
    ];
    em.write(
        "curve.csv",
        &columns_csv(&[
            ("L", &cols[0]),
            ("t", &cols[1]),
            ("r", &cols[2]),
            ("theta", &cols[3]),
            ("k", &cols[4]),
            ("defect", &cols[5]),
        ]),
    )?;

    let (certified, report) = match certify_bend(&curve, s_lower) {
        Ok(cert) => (cert.pass, serde_json::to_value(&cert)?),
        Err(e) => (false, json!({ "error": e.to_string() })),
    };
    em.write_json("certificate.json", &report)?;
    println!(
        "bend q={} theta0={} -> r1 {:.4}, r2 {:.3e}, r3 {:.3e}, {} bumps, certified: {certified}",
        curve.q, curve.theta0, curve.r1, curve.r2, curve.r3, curve.bump_count
    );
    Ok(RunOutcome {
        command: "bend",
        parameters: serde_json::to_value(json!({
            "q": params.q, "theta0": params.theta0, "r0": params.r0,
            "eps2": params.eps2, "r1p_ratio": params.r1p_ratio,
            "safety": params.safety, "mu": mu, "s_lower": s_lower,
        }))?,
        certified,
    })
}

fn desk_perturbation() -> PerturbationSpec {
    PerturbationSpec::scaled(
        |p: &[f64], out: &mut [f64]| {
            out[0] = 0.35 + 0.25 * p[0].cos() * p[1].cos();
        },
        |p: &[f64], out: &mut [f64]| {
            out[0] = 0.15 * p[0].sin();
            out[1] = 0.1 * p[0].cos() * p[1].sin().powi(2);
        },
    )
}

fn circle() -> MetricField {
    let chart = yamabe_core::GridChart::new(vec![yamabe_core::Axis::periodic(
        0.0,
        std::f64::consts::TAU,
        12,
    )])
    .expect("static chart");
    MetricField::from_fn(chart, "s1", |_p, out| out[0] = 1.0)
}

fn run_homotopy(args: &HomotopyArgs, file: &FileConfig, em: &mut Emitter) -> Result<RunOutcome> {
    let q = setting!(args.q, file, "homotopy", "q", 3);
    let radii = setting!(args.radii, file, "homotopy", "radii", vec![0.2, 0.1, 0.05]);
    let nu_grid =
        setting!(args.nu_grid, file, "homotopy", "nu_grid", vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    let r3 = setting!(args.r3, file, "homotopy", "r3", 0.05);
    let d = setting!(args.collar_length, file, "homotopy", "collar_length", 1.0);
    if q != 3 {
        bail!("the packaged homotopy sweep covers q = 3 (S^1 x S^2 cross-sections)");
    }

    let spec = HomotopySpec {
        g_w: circle(),
        q,
        r: r3,
        nu_grid,
        d,
        mu: 1.0,
        perturbation: args.perturbed.then(desk_perturbation),
        sphere_res: vec![40, 8],
        sphere_band: 0.5,
        collar_res: 16,
    };
    let report = certify_homotopy(&spec, &radii).map_err(|e| anyhow::anyhow!(e))?;
    em.write_json("homotopy.json", &report)?;
    println!(
        "homotopy sweep: fitted constant {:.4}, stability factor {:.3}, pass: {}",
        report.fitted_constant, report.stability_factor, report.pass
    );
    Ok(RunOutcome {
        command: "homotopy",
        parameters: json!({ "q": q, "radii": radii, "r3": r3, "collar_length": d }),
        certified: report.pass,
    })
}

fn reduce_model(name: &str, amplitude: f64) -> Result<WarpedModel> {
    Ok(match name {
        "s3" => WarpedModel::round_sphere(3),
        "s3-warped" => WarpedModel {
            t_min: 0.0,
            t_max: std::f64::consts::PI,
            fibers: vec![ModelFiber {
                dim: 2,
                scalar: 2.0,
                volume: 4.0 * std::f64::consts::PI,
                warp: models::Warp::new(move |t| t.sin() * (1.0 + amplitude * t.sin().powi(2))),
            }],
        },
        "cylinder3" => WarpedModel::cylinder(3, 4.0),
        other => bail!("unknown reduce model '{other}' (s3, s3-warped, cylinder3)"),
    })
}

fn run_reduce(args: &ReduceArgs, file: &FileConfig, em: &mut Emitter) -> Result<RunOutcome> {
    let model_name = setting!(args.model, file, "reduce", "model", "s3".to_string());
    let resolution = setting!(args.resolution, file, "reduce", "resolution", 400);
    let tol = setting!(args.tol, file, "reduce", "tol", 1e-8);
    let amplitude = setting!(args.amplitude, file, "reduce", "amplitude", 0.4);
    let subcritical = setting!(args.subcritical, file, "reduce", "subcritical", 0.0);

    let model = reduce_model(&model_name, amplitude)?;
    let profile = reduce_cohomogeneity_one(&model, resolution).map_err(|e| anyhow::anyhow!(e))?;
    em.write(
        "profile.csv",
        &columns_csv(&[("t", &profile.t), ("w", &profile.w), ("s", &profile.s)]),
    )?;
    let init = vec![1.0; resolution];
    let opts = MinimizeOptions { subcritical_epsilon: subcritical, ..Default::default() };
    let est = minimize_reduced_with(&profile, &init, tol, opts)
        .map_err(|e| anyhow::anyhow!(e))?;
    em.write(
        "minimizer.csv",
        &columns_csv(&[("t", &profile.t), ("phi", &est.minimizer)]),
    )?;
    em.write_json(
        "estimate.json",
        &json!({
            "value": est.value,
            "iterations": est.iterations,
            "residual": est.residual,
            "history_len": est.history.len(),
        }),
    )?;
    println!(
        "reduced estimate on {model_name}: {:.9} ({} iterations, residual {:.2e})",
        est.value, est.iterations, est.residual
    );
    Ok(RunOutcome {
        command: "reduce",
        parameters: json!({
            "model": model_name, "resolution": resolution, "tol": tol,
            "amplitude": amplitude, "subcritical": subcritical,
        }),
        certified: true,
    })
}

fn run_surgery_demo(
    args: &SurgeryDemoArgs,
    file: &FileConfig,
    em: &mut Emitter,
) -> Result<RunOutcome> {
    let n = setting!(args.n, file, "surgery-demo", "n", 5);
    let q = setting!(args.q, file, "surgery-demo", "q", 3);
    let l = setting!(args.l, file, "surgery-demo", "l", 0);
    let m = setting!(args.m, file, "surgery-demo", "m", 0);
    let chain = section4_examples(n, q, l, m).map_err(|e| anyhow::anyhow!(e))?;
    em.write_json("chain.json", &chain)?;
    println!("{}", chain.description);
    for step in &chain.steps {
        println!(
            "  [{}] {} -> {:.9} ({})",
            if step.valid { "ok" } else { "INVALID" },
            step.operation,
            step.output,
            step.justification
        );
    }
    println!("value: {:.9} (all hypotheses valid: {})", chain.value, chain.all_valid);

    let assemble = args.assemble || file.get("surgery-demo", "assemble").unwrap_or(false);
    let mut certified = true;
    if assemble {
        if q != 3 {
            bail!("the packaged desk assembly covers q = 3");
        }
        let delta = setting!(args.delta, file, "surgery-demo", "delta", 0.5);
        let epsilon = setting!(args.epsilon, file, "surgery-demo", "epsilon", 1.0);
        let params = BendParams {
            q,
            theta0: setting!(args.theta0, file, "surgery-demo", "theta0", 0.1),
            r0: setting!(args.r0, file, "surgery-demo", "r0", 50.0),
            eps2: 1e-3,
            ..Default::default()
        };
        let curve = build_bend_curve(params).map_err(|e| anyhow::anyhow!(e))?;
        let spec = HomotopySpec {
            g_w: circle(),
            q,
            r: curve.r3,
            nu_grid: vec![0.0, 1.0],
            d: 1.0,
            mu: 1.0,
            perturbation: None,
            sphere_res: vec![16, 8],
            sphere_band: 0.5,
            collar_res: 12,
        };
        let outer =
            outer_tube_region(&circle(), q, curve.r0, 2.0 * curve.r0, 12, &[16, 8], 0.5)
                .map_err(|e| anyhow::anyhow!(e))?;
        let opts = AssemblyOptions { compute_scalar: false, ..Default::default() };
        let assembly =
            assemble_surgered_metric(&outer, &curve, &spec, delta, epsilon, 0.0, opts)
                .map_err(|e| anyhow::anyhow!(e))?;
        em.write_json("assembly.json", &assembly)?;
        certified = assembly
            .interfaces
            .iter()
            .all(|i| i.relative_mismatch <= i.tolerance);
        println!(
            "assembly at (delta, epsilon) = ({delta}, {epsilon}): vol(S) = {:.4e}, vol(T) = {:.4e}, vol(N) = {:.4e}, certified floor {:.4}",
            assembly.s_volume, assembly.t_volume, assembly.n_volume, assembly.certified_min_scalar
        );
    }

    Ok(RunOutcome {
        command: "surgery-demo",
        parameters: json!({ "n": n, "q": q, "l": l, "m": m, "assemble": assemble }),
        certified,
    })
}

fn run_invariants(args: &InvariantsArgs, em: &mut Emitter) -> Result<RunOutcome> {
    let (name, value): (&str, serde_json::Value) = match &args.formula {
        Formula::Lambda { n } => {
            let v = lambda_n(*n).map_err(|e| anyhow::anyhow!(e))?;
            println!("lambda_{n} = {v:.9}");
            ("lambda", json!({ "n": n, "value": v }))
        }
        Formula::OrbitBound { n, orbit } => {
            let bound = if orbit == "inf" {
                OrbitBound::Infinite
            } else {
                OrbitBound::Finite(orbit.parse().context("orbit must be an integer or 'inf'")?)
            };
            let v = hebey_vaugon_bound(*n, bound).map_err(|e| anyhow::anyhow!(e))?;
            println!("upper bound = {}", v.value);
            ("orbit-bound", serde_json::to_value(v)?)
        }
        Formula::Interval { s_min, s_max, vol, n } => {
            let (lo, hi) =
                kobayashi_interval(*s_min, *s_max, *vol, *n).map_err(|e| anyhow::anyhow!(e))?;
            println!("interval = [{lo:.9}, {hi:.9}]");
            ("interval", json!({ "lo": lo, "hi": hi }))
        }
        Formula::DisjointUnion { y1, y2, n } => {
            let v = disjoint_union_yamabe(*y1, *y2, *n).map_err(|e| anyhow::anyhow!(e))?;
            println!("disjoint union value = {v:.12}");
            ("disjoint-union", json!({ "y1": y1, "y2": y2, "n": n, "value": v }))
        }
        Formula::SurgeryBound { y0, q, n } => {
            let v = surgery_lower_bound(*y0, *q, *n);
            println!("bound = {} (valid: {}, {})", v.value, v.valid, v.reason);
            ("surgery-bound", serde_json::to_value(v)?)
        }
    };
    em.write_json("invariants.json", &json!({ "formula": name, "result": value }))?;
    Ok(RunOutcome {
        command: "invariants",
        parameters: json!({ "formula": name }),
        certified: true,
    })
}

fn run_continuity(args: &ContinuityArgs, file: &FileConfig, em: &mut Emitter) -> Result<RunOutcome> {
    let count = setting!(args.count, file, "continuity", "count", 5);
    let resolution = setting!(args.resolution, file, "continuity", "resolution", 400);
    let tol = setting!(args.tol, file, "continuity", "tol", 1e-6);
    if count < 2 {
        bail!("need at least two family members");
    }

    let family: Vec<OrbitProfile> = (0..count)
        .map(|k| {
            let model = reduce_model("s3-warped", 0.8 * 2.0f64.powi(-(k as i32)))?;
            reduce_cohomogeneity_one(&model, resolution).map_err(|e| anyhow::anyhow!(e))
        })
        .collect::<Result<_>>()?;
    let limit = reduce_cohomogeneity_one(&WarpedModel::round_sphere(3), resolution)
        .map_err(|e| anyhow::anyhow!(e))?;
    let report =
        continuity_experiment(&family, &limit, tol).map_err(|e| anyhow::anyhow!(e))?;
    em.write_json("continuity.json", &report)?;

    let mut table = BTreeMap::new();
    for (k, v) in report.values.iter().enumerate() {
        table.insert(k, (v, report.gaps[k]));
    }
    for (k, (v, gap)) in &table {
        println!("k = {k}: value {v:.9}, gap {gap:.3e}");
    }
    let ratios_ok = report.gap_ratios.iter().all(|r| *r >= 1.5);
    let pass = report.monotone && ratios_ok;
    println!("monotone: {}, gap ratios {:?}", report.monotone, report.gap_ratios);
    Ok(RunOutcome {
        command: "continuity",
        parameters: json!({ "count": count, "resolution": resolution, "tol": tol }),
        certified: pass,
    })
}

//! Command-line front end: one subcommand per task, JSON/CSV artifacts in
//! the output directory and a one-line summary per task on stdout.
//!
//! Exit status: 2 for malformed arguments or configuration, 1 if any check
//! with a guaranteed sign fails, 0 otherwise. Numerical failures are
//! reported per task and do not change the status by themselves.

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use plap::capacity::{capacity, radial_capacity, CapacityRecord, CondenserProblem};
use plap::eigen::{solve_principal, Init, SolverConfig};
use plap::geometry::{
    boundary_components, check_covering, generate_domain, hayman_cover, inradius, inradius_error_bound,
    parse_length, subset_budget, Ball, DomainSpec, GridDomain,
};
use plap::harness::{
    estimate_constant, hayman_experiment, named_family, run_sweep, BoundReport, DomainCase, Feature, Theorem,
};
use plap::io::{self, EigenRecord, SweepFile};
use plap::variational::{P_MAX, P_MIN};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser, Debug)]
#[command(name = "plap", version, about = "Principal p-Laplacian eigenvalues, inradii and p-capacities on grid domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Output directory for artifacts.
    #[arg(long, global = true, env = "PLAP_OUT_DIR", default_value = ".")]
    out: PathBuf,
    /// Artifact formats.
    #[arg(long, global = true, value_delimiter = ',', default_value = "json,csv")]
    format: Vec<Format>,
    /// Worker threads for sweeps; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(flatten)]
    solver: SolverOverrides,
}

#[derive(Args, Clone, Debug)]
struct SolverOverrides {
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true)]
    grad_tol: Option<f64>,
    #[arg(long, global = true)]
    stagnation_tol: Option<f64>,
    #[arg(long, global = true)]
    residual_tol: Option<f64>,
    /// Starting field of the descent.
    #[arg(long, global = true)]
    init: Option<InitArg>,
    /// Disable the warm start from the p = 2 eigenfunction.
    #[arg(long, global = true)]
    no_continuation: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InitArg {
    Distance,
    Random,
}

#[derive(Args, Debug)]
struct DomainArgs {
    /// Domain descriptor such as `ball:1`, `rectangle:2,1` or `spiked-ball:1,8,1/16`.
    #[arg(long, conflicts_with = "mask", required_unless_present = "mask")]
    domain: Option<String>,
    /// PLAP-MASK file; its own spacing replaces `--h`.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Dimension of round shapes.
    #[arg(long = "N", default_value_t = 2)]
    dim: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Principal eigenpair for every `(p, h)`.
    Solve {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1/64")]
        h: Vec<String>,
        /// Skip the PLAP-FIELD eigenfunction files.
        #[arg(long)]
        no_fields: bool,
    },
    /// Condenser capacity of an inner set in a ball centered at the origin.
    Capacity {
        /// `ball:a`, `point` or `segment:L` (centered, along the first axis).
        #[arg(long)]
        inner: String,
        #[arg(long, default_value = "1")]
        outer: String,
        #[arg(long = "N", default_value_t = 2)]
        dim: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1/64")]
        h: Vec<String>,
    },
    /// Discrete inradius and boundary structure.
    Inradius {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, value_delimiter = ',', default_value = "1/64")]
        h: Vec<String>,
        /// Also write the rasterized PLAP-MASK files.
        #[arg(long)]
        write_mask: bool,
    },
    /// Boundary-ball covering and its invariants.
    Cover {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, value_delimiter = ',', default_value = "1/64")]
        h: Vec<String>,
    },
    /// Bound checks over a named family or a single domain.
    Verify {
        /// `adversarial` or `thin-rectangles`.
        #[arg(long, conflicts_with = "domain", required_unless_present = "domain")]
        sweep: Option<String>,
        #[arg(long)]
        domain: Option<String>,
        #[arg(long = "N", default_value_t = 2)]
        dim: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, default_value = "1/64")]
        h: String,
    },
    /// Eigenvalue gap of the unit ball with thin features removed, across refinement.
    Hayman {
        /// `punctures:n` or `spikes:n`.
        #[arg(long)]
        feature: String,
        #[arg(long = "N", default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, value_delimiter = ',', default_value = "1/16,1/32,1/64")]
        h: Vec<String>,
    },
    /// Every sweep of a TOML sweep file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Malformed arguments or configuration.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(Usage(msg.into()).into())
}

fn lib_usage<T>(r: plap::Result<T>) -> anyhow::Result<T> {
    r.map_err(|e| Usage(e.to_string()).into())
}

struct Ctx {
    out: PathBuf,
    formats: Vec<Format>,
    overrides: SolverOverrides,
    solver: SolverConfig,
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn emit<T: Serialize>(&self, stem: &str, rows: &[T]) -> anyhow::Result<()> {
        if self.formats.contains(&Format::Json) {
            write(&self.path(&format!("{stem}.json")), &io::to_json(rows)?)?;
        }
        if self.formats.contains(&Format::Csv) {
            write(&self.path(&format!("{stem}.csv")), &io::to_csv(rows)?)?;
        }
        Ok(())
    }
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn solver_config(o: &SolverOverrides, base: SolverConfig) -> anyhow::Result<SolverConfig> {
    let mut c = base;
    if let Some(v) = o.seed {
        c.seed = v;
    }
    if let Some(v) = o.max_iter {
        c.max_iter = v;
    }
    if let Some(v) = o.grad_tol {
        c.grad_tol = v;
    }
    if let Some(v) = o.stagnation_tol {
        c.stagnation_tol = v;
    }
    if let Some(v) = o.residual_tol {
        c.residual_tol = v;
    }
    if let Some(v) = o.init {
        c.init = match v {
            InitArg::Distance => Init::Distance,
            InitArg::Random => Init::Random,
        };
    }
    if o.no_continuation {
        c.continuation = false;
    }
    lib_usage(c.validate())?;
    Ok(c)
}

fn spacings(hs: &[String]) -> anyhow::Result<Vec<f64>> {
    hs.iter()
        .map(|s| match parse_length(s) {
            Ok(h) if h > 0.0 => Ok(h),
            _ => usage(format!("grid spacing `{s}` is not a positive number")),
        })
        .collect()
}

fn exponents(ps: &[f64]) -> anyhow::Result<Vec<f64>> {
    for &p in ps {
        if !(P_MIN..=P_MAX).contains(&p) {
            return usage(format!("p = {p} outside [{P_MIN}, {P_MAX}]"));
        }
    }
    Ok(ps.to_vec())
}

/// File-name friendly form of a label.
fn slug(s: &str) -> String {
    let mut out: String = s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '-' }).collect();
    while out.contains("--") {
        out = out.replace("--", "-");
    }
    out.trim_matches('-').to_string()
}

/// `1/h` when it is an integer, else `h`.
fn h_tag(h: f64) -> String {
    let n = 1.0 / h;
    if (n - n.round()).abs() < 1e-9 {
        format!("{}", n.round() as u64)
    } else {
        format!("{h}")
    }
}

/// Rasterized domains, one per spacing; a mask file yields a single domain.
fn domains(args: &DomainArgs, hs: &[String]) -> anyhow::Result<Vec<(String, Arc<GridDomain>)>> {
    if let Some(path) = &args.mask {
        let d = io::read_mask(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
        let label = if d.label().is_empty() {
            path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
        } else {
            d.label().to_string()
        };
        return Ok(vec![(label.clone(), Arc::new(d.with_label(label)))]);
    }
    let text = args.domain.as_deref().unwrap_or_default();
    let spec = lib_usage(DomainSpec::parse(text, args.dim))?;
    spacings(hs)?
        .into_iter()
        .map(|h| {
            let d = lib_usage(generate_domain(&spec, h))?;
            Ok((text.to_string(), Arc::new(d.with_label(text))))
        })
        .collect()
}

/// Returns whether any guaranteed-sign check failed.
fn run(command: Command, ctx: &Ctx) -> anyhow::Result<bool> {
    match command {
        Command::Solve { domain, p, h, no_fields } => {
            let ps = exponents(&p)?;
            let mut records = Vec::new();
            for (label, d) in domains(&domain, &h)? {
                for &p in &ps {
                    match solve_principal(&d, p, &ctx.solver) {
                        Ok(r) => {
                            println!(
                                "solve {label} N={} p={p} h={} lambda={:.10} iterations={} converged={}",
                                d.dim(),
                                d.h(),
                                r.lambda,
                                r.iterations,
                                r.converged
                            );
                            if !no_fields {
                                let name = format!("{}-p{p}-h{}.field", slug(&label), h_tag(d.h()));
                                io::write_field(&ctx.path(&name), &r.eigenfunction)?;
                            }
                            records.push(EigenRecord::new(label.clone(), &r));
                        }
                        Err(e) => println!("solve {label} N={} p={p} h={} failed: {e}", d.dim(), d.h()),
                    }
                }
            }
            ctx.emit("solve", &records)?;
            Ok(false)
        }
        Command::Capacity { inner, outer, dim, p, h } => {
            let ps = exponents(&p)?;
            let hs = spacings(&h)?;
            let b = lib_usage(parse_length(&outer))?;
            let ball = lib_usage(Ball::new([0.0; 3], b))?;
            let (kind, arg) = inner.split_once(':').unwrap_or((inner.as_str(), ""));
            let mut records = Vec::new();
            for &h in &hs {
                for &p in &ps {
                    let problem = match kind {
                        "ball" => {
                            let a = lib_usage(parse_length(arg))?;
                            CondenserProblem::concentric(dim, a, b, p, h)
                        }
                        "point" => CondenserProblem::point(dim, [0.0; 3], ball.clone(), p, h),
                        "segment" => {
                            let l = lib_usage(parse_length(arg))?;
                            CondenserProblem::segment(dim, [-l / 2.0, 0.0, 0.0], [l / 2.0, 0.0, 0.0], ball.clone(), p, h)
                        }
                        _ => return usage(format!("unknown inner set `{inner}`; expected ball:a, point or segment:L")),
                    };
                    let problem = lib_usage(problem)?;
                    match capacity(&problem, &ctx.solver) {
                        Ok(c) => {
                            let mut line = format!(
                                "capacity {} N={dim} p={p} h={h} outer={b} capacity={:.10} converged={}",
                                problem.label(),
                                c.value,
                                c.converged
                            );
                            if kind == "ball" {
                                if let Ok(exact) = radial_capacity(parse_length(arg)?, b, p, dim) {
                                    line.push_str(&format!(" radial={exact:.10}"));
                                }
                            }
                            println!("{line}");
                            records.push(CapacityRecord::new(&problem, &c));
                        }
                        Err(e) => println!("capacity {} N={dim} p={p} h={h} failed: {e}", problem.label()),
                    }
                }
            }
            ctx.emit("capacity", &records)?;
            Ok(false)
        }
        Command::Inradius { domain, h, write_mask } => {
            #[derive(Serialize)]
            struct Row {
                label: String,
                #[serde(rename = "N")]
                dim: usize,
                h: f64,
                inradius: f64,
                error_bound: f64,
                cells: usize,
                volume: f64,
                boundary_components: usize,
            }
            let mut rows = Vec::new();
            for (label, d) in domains(&domain, &h)? {
                let row = Row {
                    label: label.clone(),
                    dim: d.dim(),
                    h: d.h(),
                    inradius: inradius(&d),
                    error_bound: inradius_error_bound(&d),
                    cells: d.cell_count(),
                    volume: d.volume(),
                    boundary_components: boundary_components(&d),
                };
                println!(
                    "inradius {label} N={} h={} inradius={} error_bound={} cells={} boundary_components={}",
                    row.dim, row.h, row.inradius, row.error_bound, row.cells, row.boundary_components
                );
                if write_mask {
                    io::write_mask(&ctx.path(&format!("{}-h{}.mask", slug(&label), h_tag(d.h()))), &d)?;
                }
                rows.push(row);
            }
            ctx.emit("inradius", &rows)?;
            Ok(false)
        }
        Command::Cover { domain, h } => {
            #[derive(Serialize)]
            struct Row {
                label: String,
                #[serde(rename = "N")]
                dim: usize,
                h: f64,
                inradius: f64,
                radius: f64,
                balls: usize,
                subset_count: usize,
                budget: usize,
                valid: bool,
                notes: String,
            }
            let mut rows = Vec::new();
            let mut failed = false;
            for (label, d) in domains(&domain, &h)? {
                let budget = subset_budget(d.dim());
                let row = match hayman_cover(&d) {
                    Ok(c) => {
                        let check = check_covering(&d, &c);
                        Row {
                            label: label.clone(),
                            dim: d.dim(),
                            h: d.h(),
                            inradius: c.inradius,
                            radius: c.radius(),
                            balls: c.balls.len(),
                            subset_count: c.subset_count,
                            budget,
                            valid: check.is_ok(),
                            notes: check.err().unwrap_or_default(),
                        }
                    }
                    Err(e) => Row {
                        label: label.clone(),
                        dim: d.dim(),
                        h: d.h(),
                        inradius: inradius(&d),
                        radius: f64::NAN,
                        balls: 0,
                        subset_count: 0,
                        budget,
                        valid: false,
                        notes: e.to_string(),
                    },
                };
                failed |= !row.valid;
                println!(
                    "cover {label} N={} h={} balls={} subsets={} budget={} valid={}",
                    row.dim, row.h, row.balls, row.subset_count, row.budget, row.valid
                );
                rows.push(row);
            }
            ctx.emit("cover", &rows)?;
            Ok(failed)
        }
        Command::Verify { sweep, domain, dim, p, h } => {
            let ps = exponents(&p)?;
            let h = spacings(&[h])?[0];
            let (name, cases) = match (sweep, domain) {
                (Some(name), _) => match named_family(&name, dim) {
                    Some(cases) => (name, cases),
                    None => return usage(format!("no family `{name}` in dimension {dim}")),
                },
                (None, Some(text)) => {
                    let spec = lib_usage(DomainSpec::parse(&text, dim))?;
                    ("verify".to_string(), vec![DomainCase::new(text, spec)])
                }
                (None, None) => return usage("give --sweep or --domain"),
            };
            let reports = run_sweep(&cases, &ps, h, &ctx.solver)?;
            let failed = report_sweep(ctx, "verify", &name, &reports)?;
            Ok(failed)
        }
        Command::Hayman { feature, dim, p, h } => {
            let p = exponents(&[p])?[0];
            let hs = spacings(&h)?;
            let (kind, n) = feature.split_once(':').unwrap_or((feature.as_str(), "1"));
            let count: usize = match n.parse() {
                Ok(c) if c > 0 => c,
                _ => return usage(format!("bad feature count in `{feature}`")),
            };
            let feature = match kind {
                "punctures" => Feature::Punctures { count },
                "spikes" => Feature::Spikes { count },
                _ => return usage(format!("unknown feature `{feature}`; expected punctures:n or spikes:n")),
            };
            let report = match hayman_experiment(dim, feature, p, &hs, &ctx.solver) {
                Ok(r) => r,
                Err(e @ plap::Error::TrendUndecidable(_)) => return usage(e.to_string()),
                Err(e) => {
                    println!("hayman {feature} N={dim} p={p} failed: {e}");
                    return Ok(false);
                }
            };
            for l in &report.levels {
                println!(
                    "hayman {feature} N={dim} p={p} h={} lambda_base={:.8} lambda_featured={:.8} gap={:.8}",
                    l.h, l.lambda_base, l.lambda_featured, l.gap
                );
            }
            println!(
                "hayman {feature} N={dim} p={p} trend={} stable={} exponents={:?}",
                report.trend.class, report.trend.stable, report.trend.exponents
            );
            if ctx.formats.contains(&Format::Json) {
                write(&ctx.path("hayman.json"), &io::to_json(&report)?)?;
            }
            if ctx.formats.contains(&Format::Csv) {
                write(&ctx.path("hayman.csv"), &io::to_csv(&report.levels)?)?;
                write(&ctx.path("hayman_trend.csv"), &io::trend_csv(&report.trend)?)?;
            }
            Ok(false)
        }
        Command::Sweep { config } => {
            let text = std::fs::read_to_string(&config).map_err(|e| Usage(format!("{}: {e}", config.display())))?;
            let file = lib_usage(SweepFile::parse(&text))?;
            // flags take precedence over the file
            let solver = solver_config(&ctx.overrides, file.solver.clone())?;
            let ctx = Ctx { solver, out: ctx.out.clone(), formats: ctx.formats.clone(), overrides: ctx.overrides.clone() };
            let mut failed = false;
            for s in &file.sweeps {
                let ps = exponents(&s.p)?;
                let cases = match &s.family {
                    Some(f) => match named_family(f, s.dim) {
                        Some(c) => c,
                        None => return usage(format!("sweep `{}`: no family `{f}` in dimension {}", s.name, s.dim)),
                    },
                    None => s
                        .domains
                        .iter()
                        .map(|t| lib_usage(DomainSpec::parse(t, s.dim)).map(|spec| DomainCase::new(t.clone(), spec)))
                        .collect::<anyhow::Result<_>>()?,
                };
                let mut all = Vec::new();
                for h in &s.h {
                    let h = lib_usage(h.value())?;
                    all.extend(run_sweep(&cases, &ps, h, &ctx.solver)?);
                }
                failed |= report_sweep(&ctx, &slug(&s.name), &s.name, &all)?;
            }
            Ok(failed)
        }
    }
}

/// Prints and writes a sweep, with constant estimates per `(h, p)`; returns
/// whether any guaranteed-sign check failed.
fn report_sweep(ctx: &Ctx, stem: &str, name: &str, reports: &[BoundReport]) -> anyhow::Result<bool> {
    for r in reports {
        let show = |m: Option<f64>| m.map_or("-".to_string(), |v| format!("{v:+.4}"));
        println!(
            "{name} {} N={} p={} h={} lambda={:.8} inradius={} product={:.6} upper={} faber_krahn={} planar={}{}",
            r.label,
            r.dim,
            r.p,
            r.h,
            r.lambda,
            r.inradius,
            r.product,
            show(r.upper_margin),
            show(r.faber_krahn_margin),
            show(r.planar_margin),
            if r.notes.is_empty() { String::new() } else { format!(" notes={}", r.notes) }
        );
    }
    ctx.emit(stem, reports)?;
    let mut keys: Vec<(u64, u64)> = reports.iter().map(|r| (r.h.to_bits(), r.p.to_bits())).collect();
    keys.sort_unstable();
    keys.dedup();
    let mut estimates = Vec::new();
    for (hb, pb) in keys {
        let group: Vec<BoundReport> =
            reports.iter().filter(|r| (r.h.to_bits(), r.p.to_bits()) == (hb, pb)).cloned().collect();
        for theorem in [Theorem::LargeExponent, Theorem::ConnectedBoundary] {
            if let Ok(e) = estimate_constant(&group, theorem) {
                println!(
                    "{name} constant {theorem:?} N={} p={} h={} min_product={:.6} argmin={}",
                    e.dim,
                    e.p,
                    f64::from_bits(hb),
                    e.min_product,
                    e.argmin
                );
                estimates.push((f64::from_bits(hb), e));
            }
        }
    }
    if ctx.formats.contains(&Format::Json) && !estimates.is_empty() {
        #[derive(Serialize)]
        struct Entry<'a> {
            h: f64,
            #[serde(flatten)]
            estimate: &'a plap::harness::ConstantEstimate,
        }
        let entries: Vec<Entry> = estimates.iter().map(|(h, e)| Entry { h: *h, estimate: e }).collect();
        write(&ctx.path(&format!("{stem}_constants.json")), &io::to_json(&entries)?)?;
    }
    let failed = reports.iter().any(BoundReport::sign_failure);
    if failed {
        println!("{name}: guaranteed-sign check failed");
    }
    Ok(failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| -> anyhow::Result<bool> {
        if cli.common.threads > 0 {
            rayon::ThreadPoolBuilder::new().num_threads(cli.common.threads).build_global()?;
        }
        let solver = solver_config(&cli.common.solver, SolverConfig::default())?;
        std::fs::create_dir_all(&cli.common.out)
            .with_context(|| format!("creating output directory {}", cli.common.out.display()))?;
        let ctx = Ctx {
            out: cli.common.out.clone(),
            formats: cli.common.format.clone(),
            overrides: cli.common.solver.clone(),
            solver,
        };
        if ctx.formats.is_empty() {
            bail!(Usage("no output format selected".into()));
        }
        run(cli.command, &ctx)
    })();
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

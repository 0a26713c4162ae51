//! `bergtube`: batch experiments on Bergman and Szegő kernels of tube domains.

mod config;
mod output;
mod runner;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use bergtube_core::asymptotics::predict;
use bergtube_core::blowup::{to_polar, BlowupChart, Branch, PolarPoint, from_polar};
use bergtube_core::domain::{tail_modify, BoundaryRelativePoint, DefiningFunction};
use bergtube_core::experiments::{
    admissible_coefficient_sweep, admissible_taus, config_hash, hormander_check, localization_experiment, run_path,
    ApproachMode, ApproachPath, FitResult, WindowPolicy,
};
use bergtube_core::quadrature::{kernel_direct, KernelKind, QuadratureConfig};
use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use output::{status_of, Row};
use runner::Threads;
use spec::DomainSpec;

#[derive(Debug, Parser)]
#[command(name = "bergtube", version, about = "Bergman and Szegő kernel experiments on tube domains Im z2 > f(Im z1)")]
struct Cli {
    /// TOML run configuration; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Validate the configuration and print the plan without evaluating integrals.
    #[arg(long, global = true)]
    dry_run: bool,
    /// Worker threads for point evaluations.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct Common {
    /// Domain spec, e.g. `model:m=2,g0=1` or `table:path=g.txt,m=2`.
    #[arg(long)]
    domain: Option<String>,
    /// `bergman` or `szego`.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Write per-point rows here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write a plotting script for the CSV here.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
struct PathArgs {
    /// `fixed-tau`, `fixed-x` or `normal-cone`.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    rho0: Option<f64>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Trailing points used by the fit.
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One kernel value at (x, y) or (tau, rho).
    #[command(allow_negative_numbers = true)]
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        y: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Exponent fit (and boundary limit on fixed-tau paths) along an approach path.
    #[command(allow_negative_numbers = true)]
    Fit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        path: PathArgs,
        #[arg(long)]
        slope_tol: Option<f64>,
        #[arg(long)]
        c0_tol: Option<f64>,
    },
    /// Boundary limits over the admissible region tau in [1/alpha + margin, 1].
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        margin: Option<f64>,
        /// Number of tau values.
        #[arg(long)]
        taus: Option<usize>,
        #[arg(long)]
        rho0: Option<f64>,
        #[arg(long)]
        ratio: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Largest allowed max/min of c0 tau^3.
        #[arg(long)]
        max_spread: Option<f64>,
        #[arg(long)]
        c0_tol: Option<f64>,
    },
    /// Exponent and leading coefficient from the tangent model.
    Predict {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Compares the kernel with that of a tail modification agreeing on |x| < delta.
    Localize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        path: PathArgs,
        #[arg(long)]
        delta: Option<f64>,
        /// Smallest trailing slope of ln|K1 - K2| counted as bounded.
        #[arg(long, allow_negative_numbers = true)]
        bounded_slope: Option<f64>,
        #[arg(long)]
        slope_tol: Option<f64>,
    },
    /// K d^3 limit at a strictly pseudoconvex boundary point against the Levi determinant.
    #[command(allow_negative_numbers = true)]
    Hormander {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        x0: Option<f64>,
        /// Largest normal offset; the grid halves from here.
        #[arg(long)]
        eps0: Option<f64>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        ratio_tol: Option<f64>,
    },
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Assertion,
    Error(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Error(e)
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<bergtube_core::Error>()) {
        Some(core) if core.is_numeric() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Assertion) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn common_flags(c: &Common, cfg: &mut RunConfig) {
    cfg.domain.spec = c.domain.clone();
    cfg.kernel.kind = c.kind.clone();
    cfg.quadrature.rel_tol = c.rel_tol;
    cfg.output.csv = c.csv.clone();
    cfg.output.plot = c.plot.clone();
}

fn path_flags(p: &PathArgs, cfg: &mut RunConfig) {
    let s = &mut cfg.path;
    s.mode = p.mode.clone();
    s.tau = p.tau;
    s.x = p.x;
    s.kappa = p.kappa;
    s.rho0 = p.rho0;
    s.ratio = p.ratio;
    s.points = p.points;
    s.window = p.window;
}

/// Collects flags into a config layer laid over the file.
fn flag_layer(cli: &Cli) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.run.workers = cli.workers;
    match &cli.command {
        Command::Eval { common, x, y, tau, rho } => {
            common_flags(common, &mut cfg);
            cfg.point.x = *x;
            cfg.point.y = *y;
            cfg.point.tau = *tau;
            cfg.point.rho = *rho;
        }
        Command::Fit { common, path, slope_tol, c0_tol } => {
            common_flags(common, &mut cfg);
            path_flags(path, &mut cfg);
            cfg.experiment.slope_tol = *slope_tol;
            cfg.experiment.c0_tol = *c0_tol;
        }
        Command::Sweep { common, alpha, margin, taus, rho0, ratio, points, max_spread, c0_tol } => {
            common_flags(common, &mut cfg);
            cfg.experiment.alpha = *alpha;
            cfg.experiment.margin = *margin;
            cfg.experiment.taus = *taus;
            cfg.path.rho0 = *rho0;
            cfg.path.ratio = *ratio;
            cfg.path.points = *points;
            cfg.experiment.max_spread = *max_spread;
            cfg.experiment.c0_tol = *c0_tol;
        }
        Command::Predict { common, tau } => {
            common_flags(common, &mut cfg);
            cfg.point.tau = *tau;
        }
        Command::Localize { common, path, delta, bounded_slope, slope_tol } => {
            common_flags(common, &mut cfg);
            path_flags(path, &mut cfg);
            cfg.experiment.delta = *delta;
            cfg.experiment.bounded_slope = *bounded_slope;
            cfg.experiment.slope_tol = *slope_tol;
        }
        Command::Hormander { common, x0, eps0, levels, ratio_tol } => {
            common_flags(common, &mut cfg);
            cfg.experiment.x0 = *x0;
            cfg.experiment.eps0 = *eps0;
            cfg.experiment.levels = *levels;
            cfg.experiment.ratio_tol = *ratio_tol;
        }
    }
    cfg
}

/// Everything a command needs, resolved from the merged config.
struct Ctx {
    cfg: RunConfig,
    spec: DomainSpec,
    f: DefiningFunction,
    chart: BlowupChart,
    kind: KernelKind,
    quad: QuadratureConfig,
    runner: Threads,
    dry_run: bool,
}

fn require<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    v.clone().ok_or_else(|| anyhow!("missing setting: {name} (flag or config entry)"))
}

impl Ctx {
    fn new(cli: &Cli) -> Result<Self> {
        let mut cfg = match &cli.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        cfg.overlay(&flag_layer(cli));
        let spec: DomainSpec = require(&cfg.domain.spec, "domain.spec / --domain")?.parse()?;
        let f = spec.build().with_context(|| format!("building domain {spec}"))?;
        let chart = BlowupChart::new(f.m())?;
        let kind: KernelKind = cfg.kernel.kind.as_deref().unwrap_or("bergman").parse()?;
        let q = &cfg.quadrature;
        let d = QuadratureConfig::default();
        let quad = QuadratureConfig {
            rel_tol: q.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: q.abs_tol.unwrap_or(d.abs_tol),
            max_depth: q.max_depth.unwrap_or(d.max_depth),
            truncation_drop: q.truncation_drop.unwrap_or(d.truncation_drop),
            scaling: d.scaling,
        };
        quad.validate()?;
        let workers = cfg.run.workers.unwrap_or(1);
        if workers == 0 {
            bail!("workers must be at least 1");
        }
        Ok(Ctx { cfg, spec, f, chart, kind, quad, runner: Threads::new(workers), dry_run: cli.dry_run })
    }

    fn header(&self, command: &str) {
        println!("command={command} domain={} kind={} chart={}", self.spec, self.kind.name(), self.chart.id());
    }

    fn hash(&self, extra: &str) -> u64 {
        config_hash(&self.quad, &format!("{}|{}|{extra}", self.spec, self.kind.name()))
    }

    fn path(&self) -> Result<ApproachPath> {
        let p = &self.cfg.path;
        let mode = match p.mode.as_deref().unwrap_or("fixed-tau") {
            "fixed-tau" => ApproachMode::FixedTau(p.tau.unwrap_or(1.0)),
            "fixed-x" => ApproachMode::FixedX(require(&p.x, "path.x / --x")?),
            "normal-cone" => ApproachMode::NormalCone(p.kappa.unwrap_or(0.0)),
            other => bail!("unknown path mode {other:?} (fixed-tau, fixed-x, normal-cone)"),
        };
        Ok(ApproachPath::geometric(mode, p.rho0.unwrap_or(1.0), p.ratio.unwrap_or(0.5), p.points.unwrap_or(15))?)
    }

    fn window(&self) -> WindowPolicy {
        WindowPolicy::Trailing(self.cfg.path.window.unwrap_or(6))
    }

    fn tau_of(&self, p: &BoundaryRelativePoint) -> f64 {
        to_polar(&self.f, &self.chart, p).map(|q| q.tau).unwrap_or(f64::NAN)
    }

    fn emit(&self, rows: &[Row], title: &str) -> Result<()> {
        if let Some(csv) = &self.cfg.output.csv {
            output::write_csv(csv, rows)?;
            if let Some(plot) = &self.cfg.output.plot {
                output::write_plot(plot, csv, title)?;
            }
        } else if self.cfg.output.plot.is_some() {
            bail!("a plot script needs a CSV path (output.csv / --csv)");
        }
        Ok(())
    }

    fn print_points(&self, pts: &[BoundaryRelativePoint], rho: &[f64]) {
        for (i, (p, r)) in pts.iter().zip(rho).enumerate() {
            println!("point {i}: x={} y={} tau={} rho={r}", p.x, p.y, self.tau_of(p));
        }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn kernel_row(ctx: &Ctx, label: &str, tau: f64, rho: f64, p: &BoundaryRelativePoint, v: &bergtube_core::Result<bergtube_core::quadrature::KernelValue>) -> Row {
    match v {
        Ok(v) => Row {
            kind: label.into(),
            m: ctx.f.m(),
            tau,
            rho,
            x: p.x,
            y: p.y,
            log_value: v.log_value,
            value: v.value,
            err_estimate: v.err_estimate,
            evaluations: v.evaluations,
            status: "ok".into(),
        },
        Err(e) => Row::failed(label.into(), ctx.f.m(), tau, rho, p.x, p.y, e),
    }
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    let ctx = Ctx::new(&cli)?;
    let passed = match &cli.command {
        Command::Eval { .. } => cmd_eval(&ctx)?,
        Command::Fit { .. } => cmd_fit(&ctx)?,
        Command::Sweep { .. } => cmd_sweep(&ctx)?,
        Command::Predict { .. } => cmd_predict(&ctx)?,
        Command::Localize { .. } => cmd_localize(&ctx)?,
        Command::Hormander { .. } => cmd_hormander(&ctx)?,
    };
    if passed {
        Ok(())
    } else {
        Err(Failure::Assertion)
    }
}

fn cmd_eval(ctx: &Ctx) -> Result<bool> {
    let pt = &ctx.cfg.point;
    let p = match (pt.x, pt.y, pt.tau, pt.rho) {
        (Some(x), Some(y), None, None) => BoundaryRelativePoint::new(&ctx.f, x, y)?,
        (None, None, Some(tau), Some(rho)) => from_polar(&ctx.f, &ctx.chart, &PolarPoint::new(tau, rho, Branch::Plus)?)?,
        _ => bail!("eval needs either x and y or tau and rho"),
    };
    let gap = p.gap(&ctx.f);
    let polar = to_polar(&ctx.f, &ctx.chart, &p)?;
    ctx.header("eval");
    if ctx.dry_run {
        println!("point: x={} y={} tau={} rho={} gap={gap}", p.x, p.y, polar.tau, polar.rho);
        println!("config_hash={:016x}", ctx.hash(&format!("{}|{}", p.x, p.y)));
        return Ok(true);
    }
    let v = kernel_direct(&ctx.f, &p, ctx.kind, &ctx.quad);
    let row = kernel_row(ctx, ctx.kind.name(), polar.tau, polar.rho, &p, &v);
    ctx.emit(std::slice::from_ref(&row), "eval")?;
    let v = v?;
    println!(
        "kind={} x={} y={} tau={} rho={} log_value={} value={} err={:.3e}",
        ctx.kind.name(),
        p.x,
        p.y,
        polar.tau,
        polar.rho,
        v.log_value,
        v.value,
        v.err_estimate
    );
    Ok(true)
}

fn slope_pm(fit: &FitResult, rho: &[f64]) -> f64 {
    let (a, b) = fit.window;
    fit.max_residual / (rho[a] / rho[b - 1]).ln()
}

fn cmd_fit(ctx: &Ctx) -> Result<bool> {
    let path = ctx.path()?;
    ctx.header("fit");
    let pts = path.points(&ctx.f, &ctx.chart)?;
    if ctx.dry_run {
        ctx.print_points(&pts, &path.rho_grid);
        println!("window={:?}", ctx.window());
        println!("config_hash={:016x}", ctx.hash(&format!("{path:?}")));
        return Ok(true);
    }
    let slope_tol = ctx.cfg.experiment.slope_tol.unwrap_or(0.01);
    let c0_tol = ctx.cfg.experiment.c0_tol.unwrap_or(0.02);
    let report = run_path(&ctx.f, &ctx.chart, &path, ctx.kind, ctx.window(), c0_tol, &ctx.quad, &ctx.runner)?;
    let rows: Vec<Row> = report
        .points
        .iter()
        .zip(&pts)
        .map(|(pp, p)| kernel_row(ctx, ctx.kind.name(), pp.tau, pp.rho, p, &pp.value))
        .collect();
    ctx.emit(&rows, "fit")?;
    println!("config_hash={:016x}", report.config_hash);
    for pp in report.points.iter().filter(|p| p.value.is_err()) {
        println!("point {} failed: {}", pp.index, pp.value.as_ref().err().map(status_of).unwrap_or_default());
    }
    let e = report.expected_exponent;
    let ok = report.slope_ok(slope_tol);
    match &report.fit {
        Ok(fit) => {
            let ok_rho: Vec<f64> = report.points.iter().filter(|p| p.value.is_ok()).map(|p| p.rho).collect();
            println!("slope={:.6}±{:.1e}, expected=-{e}, {}", fit.slope, slope_pm(fit, &ok_rho), verdict(ok));
        }
        Err(err) => println!("slope=unavailable ({err}), expected=-{e}, FAIL"),
    }
    if let Some(c0) = &report.c0 {
        match c0 {
            Ok(c) => println!(
                "c0={:.8e} indicator={:.2e} {}",
                c.estimate,
                c.indicator,
                if c.converged { "converged" } else { "not converged" }
            ),
            Err(err) => println!("c0=unavailable ({err})"),
        }
    }
    Ok(ok)
}

fn cmd_sweep(ctx: &Ctx) -> Result<bool> {
    let ex = &ctx.cfg.experiment;
    let alpha = ex.alpha.unwrap_or(2.0);
    let taus = admissible_taus(alpha, ex.margin.unwrap_or(0.05), ex.taus.unwrap_or(5))?;
    let p = &ctx.cfg.path;
    let grid = ApproachPath::geometric(ApproachMode::FixedTau(1.0), p.rho0.unwrap_or(1.0), p.ratio.unwrap_or(0.5), p.points.unwrap_or(10))?;
    let max_spread = ex.max_spread.unwrap_or(100.0);
    ctx.header("sweep");
    if ctx.dry_run {
        println!("alpha={alpha} taus={taus:?}");
        println!("rho_grid={:?}", grid.rho_grid);
        println!("config_hash={:016x}", ctx.hash(&format!("{alpha}|{taus:?}|{:?}", grid.rho_grid)));
        return Ok(true);
    }
    let c0_tol = ex.c0_tol.unwrap_or(0.02);
    let report = admissible_coefficient_sweep(&ctx.f, &ctx.chart, alpha, &taus, &grid.rho_grid, ctx.kind, c0_tol, &ctx.quad, &ctx.runner)?;
    let mut rows = Vec::new();
    // per-point values live inside each c0 sequence: K rho^e
    let e = bergtube_core::asymptotics::blowup_exponent(ctx.f.m(), ctx.kind);
    let ef = *e.numer() as f64 / *e.denom() as f64;
    for row in &report.rows {
        let path = ApproachPath { mode: ApproachMode::FixedTau(row.tau), rho_grid: grid.rho_grid.clone() };
        let pts = path.points(&ctx.f, &ctx.chart)?;
        match &row.c0 {
            Ok(c) => {
                for ((p, &rho), s) in pts.iter().zip(&grid.rho_grid).zip(&c.sequence) {
                    let log_value = s.ln() - ef * rho.ln();
                    rows.push(Row {
                        kind: ctx.kind.name().into(),
                        m: ctx.f.m(),
                        tau: row.tau,
                        rho,
                        x: p.x,
                        y: p.y,
                        log_value,
                        value: log_value.exp(),
                        err_estimate: f64::NAN,
                        evaluations: 0,
                        status: "ok".into(),
                    });
                }
            }
            Err(err) => {
                for (p, &rho) in pts.iter().zip(&grid.rho_grid) {
                    rows.push(Row::failed(ctx.kind.name().into(), ctx.f.m(), row.tau, rho, p.x, p.y, err));
                }
            }
        }
    }
    ctx.emit(&rows, "sweep")?;
    println!("config_hash={:016x}", report.config_hash);
    for row in &report.rows {
        match &row.c0 {
            Ok(c) => println!("tau={} c0={:.8e} c0*tau^3={:.8e} indicator={:.2e}", row.tau, c.estimate, row.scaled, c.indicator),
            Err(err) => println!("tau={} failed: {err}", row.tau),
        }
    }
    println!("all estimates finite: {}", verdict(report.all_finite));
    let ok = report.bounded(max_spread);
    println!("c0*tau^3 spread={:.4} (max {max_spread}): {}", report.scaled_spread, verdict(ok));
    Ok(ok)
}

fn cmd_predict(ctx: &Ctx) -> Result<bool> {
    let tau = ctx.cfg.point.tau.unwrap_or(1.0);
    ctx.header("predict");
    if ctx.dry_run {
        println!("tau={tau}");
        println!("config_hash={:016x}", ctx.hash(&format!("{tau}")));
        return Ok(true);
    }
    let p = predict(&ctx.f, ctx.kind, tau, &ctx.chart, &ctx.quad)?;
    println!(
        "exponent={}, c0={:.10e}, c0_err={:.1e}, tau={}, log_term={}, full_class={}",
        p.exponent,
        p.c0_tau,
        p.c0_err,
        p.tau,
        if p.log_term_expected { "expected" } else { "absent" },
        p.full_theorem_class
    );
    Ok(true)
}

fn cmd_localize(ctx: &Ctx) -> Result<bool> {
    let delta = ctx.cfg.experiment.delta.unwrap_or(0.5);
    let path = ctx.path()?;
    let f2 = tail_modify(&ctx.f, delta, 2.0 * delta)?;
    ctx.header("localize");
    println!("second domain: {}", f2.describe());
    if ctx.dry_run {
        let pts = path.points(&ctx.f, &ctx.chart)?;
        ctx.print_points(&pts, &path.rho_grid);
        println!("config_hash={:016x}", ctx.hash(&format!("{delta}|{path:?}")));
        return Ok(true);
    }
    let report = localization_experiment(&ctx.f, &f2, delta, &ctx.chart, &path, ctx.kind, ctx.window(), &ctx.quad, &ctx.runner)?;
    let mut rows = Vec::new();
    let name = ctx.kind.name();
    for r in &report.rows {
        let p = BoundaryRelativePoint { x: r.x, y: r.y };
        let tau = ctx.tau_of(&p);
        rows.push(kernel_row(ctx, &format!("{name}:f1"), tau, r.rho, &p, &r.k1));
        rows.push(kernel_row(ctx, &format!("{name}:f2"), tau, r.rho, &p, &r.k2));
        rows.push(match &r.difference {
            Ok(d) => Row {
                kind: format!("{name}:difference"),
                m: ctx.f.m(),
                tau,
                rho: r.rho,
                x: r.x,
                y: r.y,
                log_value: d.log_abs,
                value: d.value,
                err_estimate: d.err_estimate,
                evaluations: d.evaluations,
                status: "ok".into(),
            },
            Err(e) => Row::failed(format!("{name}:difference"), ctx.f.m(), tau, r.rho, r.x, r.y, e),
        });
    }
    ctx.emit(&rows, "localize")?;
    println!("config_hash={:016x}", report.config_hash);
    if !report.failures.is_empty() {
        println!("failed points (excluded): {:?}", report.failures);
    }
    let slope = |r: &std::result::Result<FitResult, bergtube_core::Error>| match r {
        Ok(f) => format!("{:.6}", f.slope),
        Err(e) => format!("unavailable ({e})"),
    };
    let bounded = report.difference_bounded();
    let tol = ctx.cfg.experiment.slope_tol.unwrap_or(0.01);
    let threshold = ctx.cfg.experiment.bounded_slope.unwrap_or(report.bounded_threshold);
    let bounded = match (&report.difference_fit, ctx.cfg.experiment.bounded_slope) {
        (Ok(f), Some(t)) => f.slope >= t,
        _ => bounded,
    };
    println!("difference slope={} (threshold {threshold}): difference bounded: {}", slope(&report.difference_fit), verdict(bounded));
    let blow = report.kernels_blow_up(tol);
    println!(
        "kernel slopes={}, {} expected=-{}: {}",
        slope(&report.k1_fit),
        slope(&report.k2_fit),
        report.expected_exponent,
        verdict(blow)
    );
    Ok(bounded && blow)
}

fn cmd_hormander(ctx: &Ctx) -> Result<bool> {
    let ex = &ctx.cfg.experiment;
    let x0 = ex.x0.unwrap_or(1.0);
    let eps0 = ex.eps0.unwrap_or(0.02);
    let levels = ex.levels.unwrap_or(8);
    let eps: Vec<f64> = (0..levels).map(|k| eps0 * 0.5f64.powi(k as i32)).collect();
    let tol = ex.ratio_tol.unwrap_or(0.05);
    if ctx.kind != KernelKind::Bergman {
        bail!("the boundary limit check is for the Bergman kernel");
    }
    ctx.header("hormander");
    if ctx.dry_run {
        println!("x0={x0} eps={eps:?}");
        println!("config_hash={:016x}", ctx.hash(&format!("{x0}|{eps:?}")));
        return Ok(true);
    }
    let report = hormander_check(&ctx.f, x0, &eps, &ctx.quad, &ctx.runner)?;
    let rows: Vec<Row> = report
        .samples
        .iter()
        .map(|s| {
            let p = BoundaryRelativePoint { x: s.x, y: s.y };
            let (tau, rho) = to_polar(&ctx.f, &ctx.chart, &p).map(|q| (q.tau, q.rho)).unwrap_or((f64::NAN, p.y));
            kernel_row(ctx, "bergman", tau, rho, &p, &Ok(s.value))
        })
        .collect();
    ctx.emit(&rows, "hormander")?;
    println!("config_hash={:016x}", report.config_hash);
    println!("levi_determinant={:.10e}", report.levi_determinant);
    let ok = (report.ratio - 1.0).abs() <= tol;
    println!(
        "measured={:.8e} predicted={:.8e} ratio={:.6} indicator={:.2e}: {}",
        report.measured_limit,
        report.predicted_limit,
        report.ratio,
        report.indicator,
        verdict(ok)
    );
    Ok(ok)
}

//! The `lvphase` command line.
//!
//! Every subcommand writes one CSV (to `--out`, or stdout) and, when `--out`
//! is given, a `<stem>.meta.json` manifest next to it. `replay` re-runs a
//! manifest.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ensembles::EnsembleKind;
use crate::equilibrium::{AlphaRule, GuardPolicy};
use crate::error::{Error, Result};
use crate::evt::{alpha_star, empirical_gumbel_check_with, ExtremeKind, ExtremeSampler};
use crate::experiments::{
    critical_scan_with, feasibility_curve, fmt_num, nh_feasibility_curve, parse_dimensions, parse_grid,
    relaxation_campaign, stability_campaign, uniform13_threshold_limits, write_csv, CampaignConfig, Curve,
    thread_pool, GrowthSpec, RelaxationConfig, ScanOptions, Smoothing, StabilityConfig,
};
use crate::plot::{curves_svg, figure_svg, spectrum_svg, Overlay, VerticalRule};
use crate::seed::derive_stream;
use crate::stability::DEFAULT_MAX_EIGEN_DIM;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "lvphase", version, about = "Feasibility and stability of large random Lotka-Volterra systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Subcommand)]
enum Command {
    /// Feasible proportion against κ, with α = κ√(log n).
    FeasibilityCurve(CurveArgs),
    /// Feasible proportion at α = √(2 log n) against n, with the H1/H2 heuristics.
    CriticalScan(ScanArgs),
    /// Feasibility curve for a non-homogeneous growth vector, with thresholds t1, t2.
    NhCurve(CurveArgs),
    /// Jacobian spectra at the equilibrium.
    Stability(StabilityArgs),
    /// Kolmogorov-Smirnov distance of normalized Gaussian extremes to the Gumbel law.
    EvtCheck(EvtArgs),
    /// Lotka-Volterra trajectories from perturbed equilibria.
    LvSim(LvSimArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "gaussian", value_parser = parse_via::<EnsembleKind>)]
    ensemble: EnsembleKind,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "LVPHASE_WORKERS", default_value_t = 0)]
    workers: usize,
    /// CSV destination; a `.meta.json` manifest is written beside it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct SmoothArgs {
    #[arg(long, default_value_t = 11)]
    sg_window: usize,
    #[arg(long, default_value_t = 3)]
    sg_degree: usize,
    /// Emit raw proportions in the smoothed column.
    #[arg(long)]
    no_smooth: bool,
}

impl SmoothArgs {
    fn smoothing(&self) -> Option<Smoothing> {
        (!self.no_smooth).then_some(Smoothing {
            window: self.sg_window,
            degree: self.sg_degree,
        })
    }
}

#[derive(Debug, Clone, Args)]
struct CurveArgs {
    /// Dimensions: list `500,2000` or range `start:stop:step`.
    #[arg(long, default_value = "500,2000,5000")]
    n: String,
    /// Grid `start:stop:step` (inclusive) or list.
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    /// `ones`, `uniform13` or `file:<path>`.
    #[arg(long)]
    growth: Option<String>,
    /// Which scaling the grid sets: `kappa`, `absolute` or `critical-multiple`.
    #[arg(long, default_value = "kappa")]
    alpha_rule: String,
    /// Reuse one matrix per (n, trial) across the grid.
    #[arg(long)]
    coupled: bool,
    #[arg(long, default_value = "certificate", value_parser = parse_via::<GuardPolicy>)]
    guard: GuardPolicy,
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    smooth: SmoothArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args)]
struct ScanArgs {
    #[arg(long, default_value = "50:14050:200")]
    n: String,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value = "certificate", value_parser = parse_via::<GuardPolicy>)]
    guard: GuardPolicy,
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    smooth: SmoothArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args)]
struct StabilityArgs {
    #[arg(long, default_value = "1000")]
    n: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value = "critical-multiple:2", value_parser = parse_via::<AlphaRule>)]
    alpha_rule: AlphaRule,
    #[arg(long, default_value = "ones")]
    growth: String,
    /// Also estimate ‖diag(x)A/(α√n)‖ per trial (printed in the manifest summary).
    #[arg(long)]
    bauer_fike: bool,
    /// Largest n handed to the dense eigensolver.
    #[arg(long, default_value_t = DEFAULT_MAX_EIGEN_DIM)]
    max_dim: usize,
    /// Directory for per-trial eigenvalue files (`.csv` and `.svg`).
    #[arg(long)]
    eigen_dir: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SamplerArg {
    OrderStatistic,
    Direct,
}

#[derive(Debug, Clone, Args)]
struct EvtArgs {
    #[arg(long, default_value = "100,10000,1000000")]
    n: String,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    #[arg(long, default_value = "max", value_parser = parse_via::<ExtremeKind>)]
    which: ExtremeKind,
    #[arg(long, value_enum, default_value = "order-statistic")]
    sampler: SamplerArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args)]
struct LvSimArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value = "critical-multiple:2", value_parser = parse_via::<AlphaRule>)]
    alpha_rule: AlphaRule,
    #[arg(long, default_value = "ones")]
    growth: String,
    #[arg(long, default_value_t = 0.1)]
    perturbation: f64,
    #[arg(long, default_value_t = 50.0)]
    t_end: f64,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 100)]
    stride: usize,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args)]
struct ReplayArgs {
    manifest: PathBuf,
    /// New CSV destination (default: `<original stem>.replay.csv`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fail unless the replayed CSV is byte-identical to the recorded one.
    #[arg(long)]
    check: bool,
}

fn parse_via<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Reproducibility record stored beside every CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Arguments after the program name.
    pub argv: Vec<String>,
    pub config: Value,
    pub master_seed: u64,
    pub workers: usize,
    pub version: String,
    pub outputs: Vec<PathBuf>,
    pub thresholds: Value,
    pub summary: Value,
    pub wall_time_seconds: f64,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Path of the manifest that accompanies `csv`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

struct Outcome {
    csv: String,
    config: Value,
    thresholds: Value,
    summary: Value,
    extra_outputs: Vec<PathBuf>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::FeasibilityCurve(_) => "feasibility-curve",
            Command::CriticalScan(_) => "critical-scan",
            Command::NhCurve(_) => "nh-curve",
            Command::Stability(_) => "stability",
            Command::EvtCheck(_) => "evt-check",
            Command::LvSim(_) => "lv-sim",
            Command::Replay(_) => "replay",
        }
    }

    fn common(&self) -> Option<&Common> {
        match self {
            Command::FeasibilityCurve(a) | Command::NhCurve(a) => Some(&a.common),
            Command::CriticalScan(a) => Some(&a.common),
            Command::Stability(a) => Some(&a.common),
            Command::EvtCheck(a) => Some(&a.common),
            Command::LvSim(a) => Some(&a.common),
            Command::Replay(_) => None,
        }
    }

    /// Points the CSV at `out` and moves any plot or eigenvalue output beside it.
    fn redirect(&mut self, out: PathBuf) {
        let stem = out.with_extension("");
        match self {
            Command::FeasibilityCurve(a) | Command::NhCurve(a) => {
                a.plot = a.plot.as_ref().map(|_| out.with_extension("svg"));
                a.common.out = Some(out);
            }
            Command::CriticalScan(a) => {
                a.plot = a.plot.as_ref().map(|_| out.with_extension("svg"));
                a.common.out = Some(out);
            }
            Command::Stability(a) => {
                a.eigen_dir = a.eigen_dir.as_ref().map(|_| PathBuf::from(format!("{}.eigen", stem.display())));
                a.common.out = Some(out);
            }
            Command::EvtCheck(a) => a.common.out = Some(out),
            Command::LvSim(a) => a.common.out = Some(out),
            Command::Replay(_) => {}
        }
    }
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 2 for usage or configuration errors, 1 for runtime failures.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let args: Vec<String> = argv.iter().skip(1).map(|s| s.to_string_lossy().into_owned()).collect();
    match dispatch(cli.command, args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Domain(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(command: Command, args: Vec<String>) -> Result<()> {
    match command {
        Command::Replay(r) => replay(&r),
        command => execute(command, args).map(|_| ()),
    }
}

/// Runs one subcommand, writes its outputs and returns the CSV body.
fn execute(command: Command, args: Vec<String>) -> Result<String> {
    let started = Instant::now();
    let common = command.common().cloned().expect("replay handled by dispatch");
    let outcome = match &command {
        Command::FeasibilityCurve(a) => curve_command(a, false)?,
        Command::NhCurve(a) => curve_command(a, true)?,
        Command::CriticalScan(a) => scan_command(a)?,
        Command::Stability(a) => stability_command(a)?,
        Command::EvtCheck(a) => evt_command(a)?,
        Command::LvSim(a) => lv_sim_command(a)?,
        Command::Replay(_) => unreachable!(),
    };
    match &common.out {
        None => print!("{}", outcome.csv),
        Some(out) => {
            write_csv(out, &outcome.csv)?;
            let mut outputs = vec![out.clone()];
            outputs.extend(outcome.extra_outputs);
            let manifest = RunManifest {
                subcommand: command.name().to_string(),
                argv: args,
                config: outcome.config,
                master_seed: common.seed,
                workers: effective_workers(common.workers),
                version: VERSION.to_string(),
                outputs,
                thresholds: outcome.thresholds,
                summary: outcome.summary,
                wall_time_seconds: started.elapsed().as_secs_f64(),
            };
            let path = manifest_path(out);
            let text = serde_json::to_string_pretty(&manifest)?;
            std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(outcome.csv)
}

fn effective_workers(requested: usize) -> usize {
    if requested > 0 {
        requested
    } else {
        std::thread::available_parallelism().map_or(1, usize::from)
    }
}

fn replay(r: &ReplayArgs) -> Result<()> {
    let manifest = RunManifest::read(&r.manifest)?;
    let original = manifest.outputs.first().cloned();
    let out = match (&r.out, &original) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => o.with_extension("replay.csv"),
        (None, None) => return Err(Error::Config("manifest lists no outputs; pass --out".into())),
    };
    let argv = std::iter::once("lvphase".to_string()).chain(manifest.argv.iter().cloned());
    let mut command = Cli::try_parse_from(argv)
        .map_err(|e| Error::Config(format!("manifest arguments no longer parse: {e}")))?
        .command;
    if matches!(command, Command::Replay(_)) {
        return Err(Error::Config("cannot replay a replay".into()));
    }
    command.redirect(out.clone());
    let mut args = manifest.argv.clone();
    set_flag(&mut args, "--out", &out.to_string_lossy());
    let body = execute(command, args)?;
    if r.check {
        let original = original.ok_or_else(|| Error::Config("manifest lists no outputs".into()))?;
        let recorded = std::fs::read_to_string(&original).map_err(|e| Error::io(&original, e))?;
        if recorded != body {
            return Err(Error::Config(format!(
                "replayed CSV {} differs from {}",
                out.display(),
                original.display()
            )));
        }
        eprintln!("replay identical: {}", out.display());
    }
    Ok(())
}

fn set_flag(args: &mut Vec<String>, flag: &str, value: &str) {
    let eq = format!("{flag}=");
    if let Some(i) = args.iter().position(|a| a == flag) {
        if i + 1 < args.len() {
            args[i + 1] = value.to_string();
            return;
        }
    }
    if let Some(a) = args.iter_mut().find(|a| a.starts_with(&eq)) {
        *a = format!("{eq}{value}");
        return;
    }
    args.push(flag.to_string());
    args.push(value.to_string());
}

fn rule_template(s: &str) -> Result<AlphaRule> {
    match s.trim() {
        "kappa" => Ok(AlphaRule::KappaSqrtLog(1.0)),
        "absolute" => Ok(AlphaRule::Absolute(1.0)),
        "critical-multiple" => Ok(AlphaRule::MultipleOfCritical(1.0)),
        other => match other.parse::<AlphaRule>()? {
            AlphaRule::Critical => Err(Error::Config(
                "'critical' fixes α and has no grid; use critical-scan".into(),
            )),
            rule => Ok(rule),
        },
    }
}

fn curve_command(a: &CurveArgs, nh: bool) -> Result<Outcome> {
    let default_growth = if nh { "uniform13" } else { "ones" };
    let default_grid = if nh { "0.5:3.5:0.05" } else { "0.5:2.5:0.05" };
    let cfg = CampaignConfig {
        ensemble: a.common.ensemble,
        n_list: parse_dimensions(&a.n)?,
        kappa_grid: parse_grid(a.kappa.as_deref().unwrap_or(default_grid))?,
        trials: a.trials,
        alpha_rule: rule_template(&a.alpha_rule)?,
        growth: a.growth.as_deref().unwrap_or(default_growth).parse()?,
        master_seed: a.common.seed,
        smoothing: a.smooth.smoothing(),
        coupled: a.coupled,
        guard: a.guard,
        workers: a.common.workers,
    };
    let kappa_rule = matches!(cfg.alpha_rule, AlphaRule::KappaSqrtLog(_));

    let (curves, table, thresholds, mut rules) = if nh {
        let out = nh_feasibility_curve(&cfg)?;
        let mut thresholds = json!({
            "per_n": out.thresholds.iter().map(|t| json!({"n": t.n, "t1": t.t1, "t2": t.t2})).collect::<Vec<_>>(),
        });
        if cfg.growth == GrowthSpec::Uniform13 {
            let (t1, t2) = uniform13_threshold_limits();
            thresholds["limit"] = json!({"t1": t1, "t2": t2});
        }
        let mut rules = Vec::new();
        if let (true, Some(last)) = (kappa_rule, out.thresholds.last()) {
            thresholds["t1"] = json!(last.t1);
            thresholds["t2"] = json!(last.t2);
            rules.push(VerticalRule::new(last.t1, format!("t1 = {:.2}", last.t1)));
            rules.push(VerticalRule::new(last.t2, format!("t2 = {:.2}", last.t2)));
        }
        (out.curves.clone(), out.table(), thresholds, rules)
    } else {
        let out = feasibility_curve(&cfg)?;
        (out.curves.clone(), out.table(), json!({}), Vec::new())
    };
    let mut thresholds = thresholds;
    match cfg.alpha_rule {
        AlphaRule::KappaSqrtLog(_) if !nh => {
            thresholds["kappa_critical"] = json!(std::f64::consts::SQRT_2);
            rules.push(VerticalRule::new(std::f64::consts::SQRT_2, "κ = √2"));
        }
        AlphaRule::Absolute(_) => {
            thresholds["alpha_star"] = json!(cfg
                .n_list
                .iter()
                .map(|&n| json!({"n": n, "alpha_star": alpha_star(n)}))
                .collect::<Vec<_>>());
            rules.extend(cfg.n_list.iter().map(|&n| VerticalRule::new(alpha_star(n), format!("α*({n})"))));
        }
        AlphaRule::MultipleOfCritical(_) => {
            thresholds["multiple_critical"] = json!(1.0);
            rules.push(VerticalRule::new(1.0, "α = α*"));
        }
        _ => {}
    }
    let mut extra = Vec::new();
    if let Some(plot) = &a.plot {
        let x_label = match cfg.alpha_rule {
            AlphaRule::Absolute(_) => "α",
            AlphaRule::MultipleOfCritical(_) => "α / α*",
            _ => "κ = α / √(log n)",
        };
        let title = if nh { "Feasibility, non-homogeneous growth" } else { "Transition toward feasibility" };
        write_csv(plot, &curves_svg(&curves, &rules, title, x_label))?;
        extra.push(plot.clone());
    }
    Ok(Outcome {
        csv: table.render(),
        config: serde_json::to_value(&cfg)?,
        thresholds,
        summary: curve_summary(&curves),
        extra_outputs: extra,
    })
}

fn curve_summary(curves: &[Curve]) -> Value {
    json!(curves
        .iter()
        .map(|c| json!({
            "n": c.n,
            "degenerate": c.degenerate(),
            "band_10_90": c.band_width(0.1, 0.9),
        }))
        .collect::<Vec<_>>())
}

fn scan_command(a: &ScanArgs) -> Result<Outcome> {
    let n_list = parse_dimensions(&a.n)?;
    let opts = ScanOptions {
        workers: a.common.workers,
        smoothing: a.smooth.smoothing(),
        guard: a.guard,
    };
    let scan = critical_scan_with(&n_list, a.trials, a.common.ensemble, a.common.seed, &opts)?;
    let (raw1, raw2) = scan.mean_abs_deviation();
    let (sm1, sm2) = scan.smoothed_mean_abs_deviation();
    let mut extra = Vec::new();
    if let Some(plot) = &a.plot {
        let line = |label: &str, ys: &[f64]| Overlay {
            label: label.to_string(),
            points: n_list.iter().map(|&n| n as f64).zip(ys.iter().copied()).collect(),
        };
        let svg = figure_svg(
            std::slice::from_ref(&scan.curve),
            &[line("H1", &scan.h1), line("H2", &scan.h2)],
            &[],
            "Probability of feasibility at critical scaling",
            "n",
        );
        write_csv(plot, &svg)?;
        extra.push(plot.clone());
    }
    Ok(Outcome {
        csv: scan.table().render(),
        config: json!({
            "n_list": n_list,
            "trials": a.trials,
            "ensemble": a.common.ensemble,
            "alpha_rule": AlphaRule::Critical,
            "master_seed": a.common.seed,
            "smoothing": opts.smoothing,
            "guard": a.guard,
        }),
        thresholds: json!({}),
        summary: json!({
            "mean_abs_deviation": {"h1": raw1, "h2": raw2},
            "smoothed_mean_abs_deviation": {"h1": sm1, "h2": sm2},
            "degenerate": scan.curve.degenerate(),
        }),
        extra_outputs: extra,
    })
}

fn stability_command(a: &StabilityArgs) -> Result<Outcome> {
    let growth: GrowthSpec = a.growth.parse()?;
    let mut csv = String::from("trial,n,alpha,max_re,match_dist,rho_plus,stable\n");
    let mut summary = Vec::new();
    let mut configs = Vec::new();
    let mut extra = Vec::new();
    for n in parse_dimensions(&a.n)? {
        let cfg = StabilityConfig {
            ensemble: a.common.ensemble,
            n,
            trials: a.trials,
            alpha_rule: a.alpha_rule,
            growth: growth.clone(),
            master_seed: a.common.seed,
            bauer_fike: a.bauer_fike,
            max_dim: a.max_dim,
            workers: a.common.workers,
        };
        let out = stability_campaign(&cfg)?;
        let mut bf_violations = 0;
        for t in &out.trials {
            let rep = &t.report;
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                t.trial,
                t.n,
                fmt_num(t.alpha),
                fmt_num(rep.max_re),
                fmt_num(rep.match_dist),
                fmt_num(rep.rho_plus),
                rep.stable
            );
            if t.bauer_fike_radius.is_some_and(|b| rep.match_dist > b) {
                bf_violations += 1;
            }
            if let Some(dir) = &a.eigen_dir {
                let stem = dir.join(format!("eigenvalues_n{}_trial{}", t.n, t.trial));
                let mut body = String::from("re,im\n");
                for l in &rep.eigenvalues {
                    let _ = writeln!(body, "{},{}", fmt_num(l.re), fmt_num(l.im));
                }
                let csv_path = stem.with_extension("csv");
                let svg_path = stem.with_extension("svg");
                write_csv(&csv_path, &body)?;
                write_csv(
                    &svg_path,
                    &spectrum_svg(&rep.eigenvalues, &format!("Jacobian spectrum, n = {}, trial {}", t.n, t.trial)),
                )?;
                extra.extend([csv_path, svg_path]);
            }
        }
        let mut md: Vec<f64> = out.trials.iter().map(|t| t.report.match_dist).collect();
        md.sort_by(f64::total_cmp);
        summary.push(json!({
            "n": n,
            "solved": out.trials.len(),
            "degenerate": out.degenerate,
            "stable": out.trials.iter().filter(|t| t.report.stable).count(),
            "feasible": out.trials.iter().filter(|t| t.feasible).count(),
            "median_match_dist": md.get(md.len() / 2),
            "bauer_fike_violations": a.bauer_fike.then_some(bf_violations),
        }));
        configs.push(serde_json::to_value(&cfg)?);
    }
    Ok(Outcome {
        csv,
        config: json!(configs),
        thresholds: json!({
            "stable_fraction_required": 0.95,
            "median_match_dist_max": 0.5,
        }),
        summary: json!(summary),
        extra_outputs: extra,
    })
}

fn evt_command(a: &EvtArgs) -> Result<Outcome> {
    let sampler = match a.sampler {
        SamplerArg::OrderStatistic => ExtremeSampler::OrderStatistic,
        SamplerArg::Direct => ExtremeSampler::Direct,
    };
    let n_list = parse_dimensions(&a.n)?;
    let mut csv = String::from("n,trials,which,ks_distance\n");
    let pool = thread_pool(a.common.workers)?;
    for &n in &n_list {
        let seed = derive_stream(a.common.seed, &[n as u64]);
        let d = pool.install(|| empirical_gumbel_check_with(n, a.trials, a.which, sampler, seed))?;
        let _ = writeln!(csv, "{n},{},{},{}", a.trials, a.which.as_str(), fmt_num(d));
    }
    Ok(Outcome {
        csv,
        config: json!({
            "n_list": n_list,
            "trials": a.trials,
            "which": a.which.as_str(),
            "sampler": format!("{sampler:?}"),
            "master_seed": a.common.seed,
        }),
        thresholds: json!({}),
        summary: json!({}),
        extra_outputs: Vec::new(),
    })
}

fn lv_sim_command(a: &LvSimArgs) -> Result<Outcome> {
    let cfg = RelaxationConfig {
        ensemble: a.common.ensemble,
        n: a.n,
        alpha_rule: a.alpha_rule,
        growth: a.growth.parse()?,
        master_seed: a.common.seed,
        trials: a.trials,
        perturbation: a.perturbation,
        t_end: a.t_end,
        dt: a.dt,
        stride: a.stride,
        tolerance: a.tolerance,
        workers: a.common.workers,
    };
    let out = relaxation_campaign(&cfg)?;
    let mut csv = String::from("trial,time,min_x,max_x,distance\n");
    for t in &out {
        for &(time, lo, hi, d) in &t.samples {
            let _ = writeln!(csv, "{},{},{},{},{}", t.trial, fmt_num(time), fmt_num(lo), fmt_num(hi), fmt_num(d));
        }
    }
    let failures: Vec<Value> = out
        .iter()
        .filter_map(|t| t.failure.as_ref().map(|f| json!({"trial": t.trial, "failure": f})))
        .collect();
    Ok(Outcome {
        csv,
        config: serde_json::to_value(&cfg)?,
        thresholds: json!({"tolerance": a.tolerance}),
        summary: json!({
            "feasible": out.iter().filter(|t| t.feasible).count(),
            "returned": out.iter().filter(|t| t.returned).count(),
            "failures": failures,
        }),
        extra_outputs: Vec::new(),
    })
}

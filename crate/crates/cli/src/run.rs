//! Executes a resolved [`RunConfig`] and persists its artifacts.

use std::path::PathBuf;

use logsob::experiments::{
    counterexample_suite, embedding_constant, frac_embedding_constant, gradient_log_bound, immersion_monotonicity,
    indicator_scaling, interpolation_constant, local_diff_decay, truncated_immersion_check, weak_embedding_constant,
    ExperimentOptions, ExperimentReport, Inputs, Measured, PlotTable, SCHEMA_VERSION,
};
use logsob::grid::{sample, SampledFunction};
use logsob::maximal::{
    hajlasz_check, hl_maximal, lusin_functional, lusin_pair_ratio_with, phi_star, PairRatio, PairSample,
    PointFunctional,
};
use logsob::quadrature::{MOMENT_RADIUS, SEMINORM_RADIUS};
use logsob::seminorms::{truncated_q_seminorm, w_seminorm, x_norm, x_seminorm};
use logsob::spectral::{compute_spectrum_padded, equivalence_ratio, kernel_moment, moment_scheme, spectral_x_norm_padded};
use logsob::verify::{run_all, CriterionOutcome, Status, VerifyOptions};
use serde::Serialize;
use serde_json::json;

use crate::config::{ExperimentName, RunConfig, SeminormKind, Subcommand};
use crate::error::CliError;
use crate::output::{self, table_csv, table_svg, text_csv, write_atomic};

/// Everything a run produced.
pub struct Outcome {
    /// Human-readable summary for stdout.
    pub lines: Vec<String>,
    /// Files written.
    pub files: Vec<PathBuf>,
    /// False when `verify-all` saw a failing criterion.
    pub success: bool,
}

/// On-disk report: the resolved config plus the result.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    generator: String,
    config: &'a RunConfig,
    result: T,
}

/// Output directory: `--out`, then `$LOGSOB_OUT_DIR`, then the config.
pub fn out_dir(cli: Option<PathBuf>, config: &RunConfig) -> PathBuf {
    cli.or_else(|| std::env::var_os(output::OUT_DIR_ENV).map(PathBuf::from))
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(output::DEFAULT_OUT_DIR))
}

fn options(cfg: &RunConfig) -> ExperimentOptions {
    ExperimentOptions {
        scheme: cfg.scheme,
        refine: cfg.knobs.refine.unwrap_or(true),
        seed: cfg.seed,
        pair_count: cfg.knobs.pair_count.unwrap_or(logsob::maximal::DEFAULT_PAIR_COUNT),
    }
}

fn new_report(name: &str, cfg: &RunConfig, settings: &[(&str, f64)]) -> Result<ExperimentReport, CliError> {
    let inputs = Inputs {
        functions: cfg
            .functions
            .iter()
            .map(|f| serde_json::to_value(f).expect("functions serialize"))
            .collect(),
        domain: cfg.domain()?,
        scheme: cfg.scheme,
        settings: settings
            .iter()
            .map(|&(label, value)| Measured {
                label: label.to_string(),
                value,
            })
            .collect(),
    };
    Ok(ExperimentReport::new(name, cfg.seminorm_params(), inputs))
}

/// `x, f(x), functional(x)` along the first axis of a 1-D grid.
fn profile_table(name: &str, f: &SampledFunction, g: &PointFunctional, column: &str) -> Option<PlotTable> {
    let dom = f.domain();
    if dom.dim != 1 {
        return None;
    }
    let mut t = PlotTable::new(name, &["x", "f", column]);
    for k in 0..dom.len() {
        let x = dom.node(k)[0];
        t.rows.push(vec![x, f.values()[k], g.value_at(&[x])]);
    }
    Some(t)
}

fn push_ratio(rep: &mut ExperimentReport, prefix: &str, r: &PairRatio) {
    rep.push(format!("{prefix}ratio"), r.ratio);
    rep.push(format!("{prefix}used"), r.used as f64);
    rep.push(format!("{prefix}skipped"), r.skipped as f64);
    rep.push(format!("{prefix}violations"), r.violations as f64);
    rep.push(format!("{prefix}clamped"), r.clamped as f64);
}

fn seminorm(cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let dom = cfg.domain()?;
    let kind = cfg.knobs.seminorm.unwrap_or(SeminormKind::X);
    let params = cfg.seminorm_params();
    let mut rep = new_report("seminorm", cfg, &[])?;
    let mut table = PlotTable::new("seminorm", &["index", "value"]);
    for (i, g) in cfg.functions.iter().enumerate() {
        let f = sample(g, &dom)?;
        let value = match kind {
            SeminormKind::X => {
                let scheme = cfg.scheme.log_scheme(&dom, SEMINORM_RADIUS)?;
                let v = x_seminorm(&f, &params, &scheme)?;
                rep.push(format!("norm[{i}]"), x_norm(&f, &params, &scheme)?);
                if i == 0 {
                    rep.tables
                        .extend(profile_table("profile", &f, &lusin_functional(&f, &params, &scheme)?, "L"));
                }
                v
            }
            SeminormKind::W => {
                let scheme = cfg.scheme.frac_scheme(&dom)?;
                let w = w_seminorm(&f, &params, &scheme)?;
                rep.push(format!("near[{i}]"), w.near_value());
                rep.push(format!("tail_bound[{i}]"), w.tail);
                w.value()
            }
            SeminormKind::Truncated => {
                let scheme = cfg.scheme.log_scheme(&dom, SEMINORM_RADIUS)?;
                truncated_q_seminorm(&f, &params, &scheme)?
            }
        };
        rep.push(format!("seminorm[{i}]"), value);
        table.rows.push(vec![i as f64, value]);
    }
    rep.tables.insert(0, table);
    Ok(rep)
}

fn spectral(cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let dom = cfg.domain()?;
    let padding = cfg.knobs.padding.unwrap_or(logsob::spectral::DEFAULT_PADDING);
    let gamma = cfg.gamma();
    let mut rep = new_report("spectral", cfg, &[("padding", padding as f64)])?;
    let scheme = cfg.scheme.log_scheme(&dom, SEMINORM_RADIUS)?;
    for (i, g) in cfg.functions.iter().enumerate() {
        let f = sample(g, &dom)?;
        rep.push(format!("spectral_norm_sq[{i}]"), spectral_x_norm_padded(&f, gamma, padding)?);
        if !f.is_zero() {
            rep.push(format!("equivalence_ratio[{i}]"), equivalence_ratio(&f, gamma, &scheme)?);
        }
        if i == 0 && dom.dim == 1 {
            let sp = compute_spectrum_padded(&f, padding)?;
            let mut t = PlotTable::new("spectrum", &["xi", "power"]);
            for k in 0..sp.len() {
                if sp.frequencies[k] >= 0.0 {
                    t.rows.push(vec![sp.frequencies[k], sp.power[k]]);
                }
            }
            rep.tables.push(t);
        }
    }
    Ok(rep)
}

fn kernel_moment_curve(cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let dim = cfg.domain.dim.unwrap_or(1);
    let gamma = cfg.gamma();
    let xis = cfg.knobs.frequencies.clone().unwrap_or_default();
    let xi_max = xis.iter().copied().fold(0.0, f64::max);
    let mut rep = new_report("kernel_moment", cfg, &[("dim", dim as f64)])?;
    let scheme = moment_scheme(dim, MOMENT_RADIUS, xi_max)?;
    let mut t = PlotTable::new("moment", &["xi", "moment", "over_xi_sq", "over_log_pow"]);
    for &xi in &xis {
        let v = kernel_moment(&[xi, 0.0][..dim], gamma, &scheme)?;
        rep.push(format!("I({xi})"), v);
        let log_pow = if xi > 1.0 { v / xi.ln().powf(2.0 * gamma) } else { f64::NAN };
        t.rows.push(vec![xi, v, v / (xi * xi), log_pow]);
    }
    rep.tables.push(t);
    Ok(rep)
}

fn lusin(cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let dom = cfg.domain()?;
    let params = cfg.seminorm_params();
    let scheme = cfg.scheme.log_scheme(&dom, SEMINORM_RADIUS)?;
    let pairs = PairSample::generate(&dom, cfg.knobs.pair_count.unwrap_or(10_000), cfg.seed)?;
    let mut rep = new_report("lusin", cfg, &[])?;
    rep.seed = Some(cfg.seed);
    for (i, g) in cfg.functions.iter().enumerate() {
        let f = sample(g, &dom)?;
        let l = lusin_functional(&f, &params, &scheme)?;
        let r = lusin_pair_ratio_with(&f, &l, params.gamma, &pairs)?;
        push_ratio(&mut rep, &format!("[{i}]."), &r);
        rep.push(format!("[{i}].l_norm"), l.lp_norm(params.p));
        if i == 0 {
            rep.tables.extend(profile_table("profile", &f, &l, "L"));
        }
    }
    Ok(rep)
}

fn phistar(cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let dom = cfg.domain()?;
    let (s, q) = (cfg.s(), cfg.q());
    let mut rep = new_report("phistar", cfg, &[])?;
    for (i, g) in cfg.functions.iter().enumerate() {
        let f = sample(g, &dom)?;
        let phi = phi_star(&f, s, q)?;
        let m = hl_maximal(&f);
        rep.push(format!("phi_star_l1[{i}]"), phi.lp_norm(1.0));
        rep.push(format!("phi_star_max[{i}]"), phi.max());
        rep.push(format!("maximal_lp[{i}]"), m.lp_norm(cfg.p()));
        if i == 0 && dom.dim == 1 {
            let mut t = PlotTable::new("profile", &["x", "f", "phi_star", "maximal"]);
            for k in 0..dom.len() {
                t.rows.push(vec![dom.node(k)[0], f.values()[k], phi.values[k], m.values[k]]);
            }
            rep.tables.push(t);
        }
    }
    Ok(rep)
}

fn hajlasz(cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let dom = cfg.domain()?;
    let recipe = cfg.knobs.witness.unwrap_or(logsob::experiments::WitnessRecipe::Lipschitz);
    let pairs = PairSample::generate(&dom, cfg.knobs.pair_count.unwrap_or(10_000), cfg.seed)?;
    let mut rep = new_report("hajlasz", cfg, &[])?;
    rep.seed = Some(cfg.seed);
    for (i, g) in cfg.functions.iter().enumerate() {
        let f = sample(g, &dom)?;
        let w = recipe.build(&f)?;
        let r = hajlasz_check(&f, &w, cfg.s(), &pairs)?;
        push_ratio(&mut rep, &format!("[{i}]."), &r);
        rep.push(format!("[{i}].witness_lp"), w.g.lp_norm(cfg.p())?);
        if r.ratio > 1.0 {
            rep.flags.push(format!("function {i}: witness not certified (ratio {:.4} > 1)", r.ratio));
        }
    }
    Ok(rep)
}

fn experiment(cfg: &RunConfig, which: ExperimentName) -> Result<ExperimentReport, CliError> {
    use ExperimentName as E;
    let dom = cfg.domain()?;
    let opts = options(cfg);
    let (gamma, p, s, q) = (cfg.gamma(), cfg.p(), cfg.s(), cfg.q());
    let f = &cfg.functions;
    let k = &cfg.knobs;
    let radii = k.radii.clone().unwrap_or_default();
    let smooth = k.smooth.unwrap_or(logsob::experiments::SmoothFunction::Gaussian { sigma: 0.2 });
    let mut rep = match which {
        E::IndicatorScaling => indicator_scaling(gamma, p, &radii, &dom, &opts)?,
        E::Embedding => embedding_constant(f, &dom, gamma, p, &opts)?,
        E::WeakEmbedding => weak_embedding_constant(f, &dom, gamma, p, &opts)?,
        E::FracEmbedding => frac_embedding_constant(f, &dom, s, p, &opts)?,
        E::Interpolation => interpolation_constant(f, &dom, gamma, s, p, &opts)?,
        E::Immersion => immersion_monotonicity(f, &dom, k.gammas.as_deref().unwrap_or(&[]), s, p, &opts)?,
        E::TruncatedImmersion => {
            let recipe = k.witness.unwrap_or(logsob::experiments::WitnessRecipe::Lipschitz);
            let g = f.first().ok_or_else(|| CliError::Config("`functions` is empty".into()))?;
            truncated_immersion_check(g, &recipe, &dom, s, p, q, &opts)?
        }
        E::GradientBound => gradient_log_bound(&smooth, &dom, p, &opts)?,
        E::LocalDiff => local_diff_decay(&smooth, &dom, p, &radii, k.points.unwrap_or(10), &opts)?,
        E::Counterexample => counterexample_suite(k.steps.as_deref().unwrap_or(&[]), p, &dom, &opts)?,
    };
    rep.seed.get_or_insert(cfg.seed);
    Ok(rep)
}

/// Seminorm-valued outputs must be nonnegative and not NaN.
fn check_nonnegative(rep: &ExperimentReport) -> Result<(), CliError> {
    match rep.values.iter().find(|m| m.value.is_nan() || m.value < 0.0) {
        Some(m) => Err(CliError::Invariant(format!("{} = {} in {}", m.label, m.value, rep.name))),
        None => Ok(()),
    }
}

fn summarize(rep: &ExperimentReport) -> Vec<String> {
    let mut lines = vec![format!("{}:", rep.name)];
    lines.extend(rep.values.iter().take(24).map(|m| format!("  {} = {:.6e}", m.label, m.value)));
    if rep.values.len() > 24 {
        lines.push(format!("  ... {} more values in the report", rep.values.len() - 24));
    }
    for fit in &rep.fits {
        let c: Vec<String> = fit.coefficients.iter().map(|m| format!("{}={:.4}", m.label, m.value)).collect();
        lines.push(format!("  fit {}: {} (rms {:.2e})", fit.label, c.join(", "), fit.residual_rms));
    }
    if let Some(b) = rep.band {
        lines.push(format!("  band [{:.4e}, {:.4e}], C/c = {:.4}", b.lower, b.upper, b.ratio()));
    }
    lines.extend(rep.flags.iter().map(|f| format!("  flag: {f}")));
    lines
}

fn envelope<T: Serialize>(cfg: &RunConfig, result: T) -> Vec<u8> {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        generator: format!("logsob {}", env!("CARGO_PKG_VERSION")),
        config: cfg,
        result,
    };
    let mut bytes = serde_json::to_vec_pretty(&env).expect("reports serialize");
    bytes.push(b'\n');
    bytes
}

fn write_tables(cfg: &RunConfig, dir: &std::path::Path, stem: &str, tables: &[PlotTable]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    let meta = serde_json::to_string(cfg).expect("configs serialize");
    for t in tables {
        files.push(write_atomic(dir, &format!("{stem}.{}.csv", t.name), &table_csv(t))?);
        if cfg.svg {
            files.push(write_atomic(dir, &format!("{stem}.{}.svg", t.name), &table_svg(t, &meta))?);
        }
    }
    Ok(files)
}

fn verify_all(cfg: &RunConfig, dir: &std::path::Path) -> Result<Outcome, CliError> {
    let opts = VerifyOptions {
        n: cfg.knobs.verify_n,
        seed: cfg.seed,
    };
    let outcomes: Vec<CriterionOutcome> = run_all(&opts);
    let mut lines: Vec<String> = outcomes.iter().map(|o| o.line()).collect();
    let count = |s: Status| outcomes.iter().filter(|o| o.status == s).count();
    let (pass, fail, skip) = (count(Status::Pass), count(Status::Fail), count(Status::SkippedTooCoarse));
    lines.push(String::new());
    lines.push(format!("{:<4} {:<28} {:<18} {:>6}", "id", "criterion", "status", "n"));
    for o in &outcomes {
        let status = serde_json::to_value(o.status).expect("status serializes");
        let n = o.n.map_or("-".to_string(), |n| n.to_string());
        lines.push(format!("{:<4} {:<28} {:<18} {:>6}", o.id, o.title, status.as_str().unwrap_or(""), n));
    }
    lines.push(format!("{pass} passed, {fail} failed, {skip} skipped as too coarse"));
    let rows: Vec<Vec<String>> = outcomes
        .iter()
        .map(|o| {
            vec![
                o.id.to_string(),
                o.title.clone(),
                serde_json::to_value(o.status).expect("status serializes").as_str().unwrap_or("").to_string(),
                o.n.map_or(String::new(), |n| n.to_string()),
                o.detail.clone(),
            ]
        })
        .collect();
    let files = vec![
        write_atomic(dir, "verify-all.json", &envelope(cfg, json!({ "outcomes": outcomes })))?,
        write_atomic(dir, "verify-all.summary.csv", &text_csv(&["id", "criterion", "status", "n", "detail"], &rows))?,
    ];
    Ok(Outcome {
        lines,
        files,
        success: fail == 0,
    })
}

/// Runs a resolved config, writing artifacts under `dir`.
pub fn run(cfg: &RunConfig, dir: &std::path::Path) -> Result<Outcome, CliError> {
    if let Some(t) = cfg.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let rep = match cfg.subcommand {
        Subcommand::VerifyAll => return verify_all(cfg, dir),
        Subcommand::Seminorm => seminorm(cfg)?,
        Subcommand::Spectral => spectral(cfg)?,
        Subcommand::KernelMoment => kernel_moment_curve(cfg)?,
        Subcommand::Lusin => lusin(cfg)?,
        Subcommand::Phistar => phistar(cfg)?,
        Subcommand::Hajlasz => hajlasz(cfg)?,
        Subcommand::Experiment => {
            let which = cfg
                .experiment
                .ok_or_else(|| CliError::Config("missing experiment name".into()))?;
            experiment(cfg, which)?
        }
    };
    if matches!(cfg.subcommand, Subcommand::Seminorm | Subcommand::Spectral | Subcommand::KernelMoment | Subcommand::Phistar) {
        check_nonnegative(&rep)?;
    }
    let stem = cfg.stem();
    let mut files = vec![write_atomic(dir, &format!("{stem}.json"), &envelope(cfg, &rep))?];
    files.extend(write_tables(cfg, dir, &stem, &rep.tables)?);
    Ok(Outcome {
        lines: summarize(&rep),
        files,
        success: true,
    })
}

mod config;
mod error;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand as ClapSubcommand};
use logsob::experiments::{SmoothFunction, WitnessRecipe};
use logsob::grid::AnalyticFunction;

use config::{parse_function, parse_smooth, parse_witness, ExperimentName, RunConfig, SeminormKind, Subcommand};
use error::CliError;

/// Numerical experiments on Sobolev spaces of logarithmic order.
#[derive(Debug, Parser)]
#[command(name = "logsob", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// TOML or JSON config, or a JSON report whose embedded config is replayed.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [env: LOGSOB_OUT_DIR] [default: logsob-out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write SVG plots of every CSV table.
    #[arg(long, global = true)]
    svg: bool,
    /// Print the resolved config as TOML and exit.
    #[arg(long, global = true)]
    print_config: bool,

    /// Test function, repeatable: gaussian:SIGMA, indicator:R[,CX,CY],
    /// step:M, trig:SEED,DEGREE, constant:C, power:EXP,CAP, or JSON.
    #[arg(long = "function", short = 'f', global = true, value_parser = parse_function)]
    functions: Vec<AnalyticFunction>,
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Points per axis.
    #[arg(long, short = 'n', global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    half_width: Option<f64>,

    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, short = 'p', global = true, allow_hyphen_values = true)]
    p: Option<f64>,
    #[arg(long, short = 's', global = true, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long, short = 'q', global = true, allow_hyphen_values = true)]
    q: Option<f64>,

    /// Innermost quadrature radius [default: one grid spacing].
    #[arg(long, global = true)]
    r_min: Option<f64>,
    #[arg(long, global = true)]
    n_r: Option<usize>,
    #[arg(long, global = true)]
    n_theta: Option<usize>,
    /// Number of seeded point pairs.
    #[arg(long, global = true)]
    pairs: Option<usize>,
    /// Skip the recomputation at twice the resolution.
    #[arg(long, global = true)]
    no_refine: bool,
}

#[derive(Debug, ClapSubcommand)]
enum Command {
    /// X^{γ,p}, W^{s,p} or truncated seminorm of each function.
    Seminorm {
        #[arg(long, value_enum)]
        kind: Option<SeminormKind>,
    },
    /// Fourier-side norm and the equivalence ratio.
    Spectral {
        #[arg(long)]
        padding: Option<usize>,
    },
    /// Kernel moment I(ξ) on a list of frequencies.
    KernelMoment {
        #[arg(long = "xi", value_delimiter = ',')]
        xi: Vec<f64>,
    },
    /// Lusin pair ratio against the pointwise functional L.
    Lusin,
    /// Φ* and the Hardy–Littlewood maximal function.
    Phistar,
    /// Hajłasz-type pair check with an explicit witness.
    Hajlasz {
        /// lipschitz, jump or constant:C.
        #[arg(long, value_parser = parse_witness)]
        witness: Option<WitnessRecipe>,
    },
    /// Named experiment with its own defaults.
    Experiment {
        #[command(subcommand)]
        which: ExperimentCommand,
    },
    /// Run the acceptance suite; `-n` overrides every grid size.
    VerifyAll,
    /// Run the subcommand named in a config file or report.
    Run {
        file: PathBuf,
    },
}

#[derive(Debug, ClapSubcommand)]
enum ExperimentCommand {
    /// Fit log of the indicator seminorm against log r and log log(1/r).
    IndicatorScaling {
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
    },
    /// Log-Sobolev embedding ratios, pointwise and integrated.
    Embedding,
    /// Log-Sobolev embedding with the weak L^p quasinorm.
    WeakEmbedding,
    /// Fractional Sobolev embedding into L^{p*}.
    FracEmbedding,
    /// X^{γ,p} seminorm against L^p and W^{s,p} interpolation.
    Interpolation,
    /// Monotonicity of the X^{γ,p} seminorm in γ and the W^{s,p} immersion.
    Immersion {
        #[arg(long, value_delimiter = ',')]
        gammas: Vec<f64>,
    },
    /// Truncated seminorm against a pair witness.
    TruncatedImmersion {
        #[arg(long, value_parser = parse_witness)]
        witness: Option<WitnessRecipe>,
    },
    /// Gradient bound and its decay for a smooth function.
    GradientBound {
        /// gaussian:SIGMA, affine:AX,AY,B, trig:SEED,DEGREE or abs.
        #[arg(long, value_parser = parse_smooth)]
        smooth: Option<SmoothFunction>,
    },
    /// Local differentiability remainder over shrinking radii.
    LocalDiff {
        #[arg(long, value_parser = parse_smooth)]
        smooth: Option<SmoothFunction>,
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Growth of Φ* on alternating step functions.
    Counterexample {
        #[arg(long, value_delimiter = ',')]
        steps: Vec<usize>,
    },
}

fn nonempty<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

/// Applies the experiment subcommand and its flags to `cfg`.
fn apply_experiment(cfg: &mut RunConfig, which: ExperimentCommand) {
    use ExperimentCommand as C;
    use ExperimentName as E;
    let k = &mut cfg.knobs;
    let name = match which {
        C::IndicatorScaling { radii } => {
            k.radii = nonempty(radii).or(k.radii.take());
            E::IndicatorScaling
        }
        C::Embedding => E::Embedding,
        C::WeakEmbedding => E::WeakEmbedding,
        C::FracEmbedding => E::FracEmbedding,
        C::Interpolation => E::Interpolation,
        C::Immersion { gammas } => {
            k.gammas = nonempty(gammas).or(k.gammas.take());
            E::Immersion
        }
        C::TruncatedImmersion { witness } => {
            k.witness = witness.or(k.witness);
            E::TruncatedImmersion
        }
        C::GradientBound { smooth } => {
            k.smooth = smooth.or(k.smooth);
            E::GradientBound
        }
        C::LocalDiff { smooth, radii, points } => {
            k.smooth = smooth.or(k.smooth);
            k.radii = nonempty(radii).or(k.radii.take());
            k.points = points.or(k.points);
            E::LocalDiff
        }
        C::Counterexample { steps } => {
            k.steps = nonempty(steps).or(k.steps.take());
            E::Counterexample
        }
    };
    cfg.subcommand = Subcommand::Experiment;
    cfg.experiment = Some(name);
}

/// Config file (if any) overlaid with the command line, then resolved.
fn build_config(cli: Cli) -> Result<(RunConfig, bool, Option<PathBuf>), CliError> {
    let g = cli.global;
    let file = match &cli.command {
        Command::Run { file } => Some(file.clone()),
        _ => g.config.clone(),
    };
    let mut cfg = match &file {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let k = &mut cfg.knobs;
    match cli.command {
        Command::Run { .. } => {}
        Command::Seminorm { kind } => {
            k.seminorm = kind.or(k.seminorm);
            cfg.subcommand = Subcommand::Seminorm;
        }
        Command::Spectral { padding } => {
            k.padding = padding.or(k.padding);
            cfg.subcommand = Subcommand::Spectral;
        }
        Command::KernelMoment { xi } => {
            k.frequencies = nonempty(xi).or(k.frequencies.take());
            cfg.subcommand = Subcommand::KernelMoment;
        }
        Command::Lusin => cfg.subcommand = Subcommand::Lusin,
        Command::Phistar => cfg.subcommand = Subcommand::Phistar,
        Command::Hajlasz { witness } => {
            k.witness = witness.or(k.witness);
            cfg.subcommand = Subcommand::Hajlasz;
        }
        Command::Experiment { which } => apply_experiment(&mut cfg, which),
        Command::VerifyAll => cfg.subcommand = Subcommand::VerifyAll,
    }
    if cfg.subcommand != Subcommand::Experiment {
        cfg.experiment = None;
    }
    if !g.functions.is_empty() {
        cfg.functions = g.functions;
    }
    if cfg.subcommand == Subcommand::VerifyAll {
        cfg.knobs.verify_n = g.n.or(cfg.knobs.verify_n);
    } else {
        cfg.domain.n = g.n.or(cfg.domain.n);
    }
    cfg.domain.dim = g.dim.or(cfg.domain.dim);
    cfg.domain.half_width = g.half_width.or(cfg.domain.half_width);
    cfg.params.gamma = g.gamma.or(cfg.params.gamma);
    cfg.params.p = g.p.or(cfg.params.p);
    cfg.params.s = g.s.or(cfg.params.s);
    cfg.params.q = g.q.or(cfg.params.q);
    cfg.scheme.r_min = g.r_min.or(cfg.scheme.r_min);
    cfg.scheme.n_r = g.n_r.unwrap_or(cfg.scheme.n_r);
    cfg.scheme.n_theta = g.n_theta.unwrap_or(cfg.scheme.n_theta);
    cfg.knobs.pair_count = g.pairs.or(cfg.knobs.pair_count);
    if g.no_refine {
        cfg.knobs.refine = Some(false);
    }
    cfg.seed = g.seed.unwrap_or(cfg.seed);
    cfg.threads = g.threads.or(cfg.threads);
    cfg.svg |= g.svg;
    Ok((cfg.resolve()?, g.print_config, g.out))
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.render().to_string().trim().to_string())),
    };
    let (cfg, print_config, out) = match build_config(cli) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if print_config {
        return match cfg.to_toml() {
            Ok(t) => {
                print!("{t}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        };
    }
    let dir = run::out_dir(out, &cfg);
    match run::run(&cfg, &dir) {
        Ok(outcome) => {
            for l in &outcome.lines {
                println!("{l}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(&e),
    }
}

//! Run configuration: every field may be left out and is filled from the
//! defaults of the chosen subcommand by [`RunConfig::resolve`]. Reports embed
//! the resolved config, so feeding one back reproduces the run.

use std::path::{Path, PathBuf};

use logsob::experiments::{SmoothFunction, WitnessRecipe};
use logsob::grid::{AnalyticFunction, Domain};
use logsob::quadrature::SchemeOptions;
use logsob::seminorms::SeminormParams;
use logsob::verify::{HIGH_FREQUENCIES, INTERPOLATION_DEGREES, LOW_FREQUENCIES, SCALING_RADII, STEP_COUNTS};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    #[default]
    Seminorm,
    Spectral,
    KernelMoment,
    Lusin,
    Phistar,
    Hajlasz,
    Experiment,
    VerifyAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    IndicatorScaling,
    Embedding,
    WeakEmbedding,
    FracEmbedding,
    Interpolation,
    Immersion,
    TruncatedImmersion,
    GradientBound,
    LocalDiff,
    Counterexample,
}

/// Which seminorm `seminorm` evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SeminormKind {
    /// Logarithmic `X^{γ,p}`.
    X,
    /// Fractional `W^{s,p}`.
    W,
    /// Truncated logarithmic seminorm with exponents `(p, q)`.
    Truncated,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Seminorm => "seminorm",
            Subcommand::Spectral => "spectral",
            Subcommand::KernelMoment => "kernel-moment",
            Subcommand::Lusin => "lusin",
            Subcommand::Phistar => "phistar",
            Subcommand::Hajlasz => "hajlasz",
            Subcommand::Experiment => "experiment",
            Subcommand::VerifyAll => "verify-all",
        }
    }
}

impl ExperimentName {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentName::IndicatorScaling => "indicator-scaling",
            ExperimentName::Embedding => "embedding",
            ExperimentName::WeakEmbedding => "weak-embedding",
            ExperimentName::FracEmbedding => "frac-embedding",
            ExperimentName::Interpolation => "interpolation",
            ExperimentName::Immersion => "immersion",
            ExperimentName::TruncatedImmersion => "truncated-immersion",
            ExperimentName::GradientBound => "gradient-bound",
            ExperimentName::LocalDiff => "local-diff",
            ExperimentName::Counterexample => "counterexample",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainSpec {
    pub dim: Option<usize>,
    pub half_width: Option<f64>,
    /// Points per axis.
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamSpec {
    pub gamma: Option<f64>,
    pub p: Option<f64>,
    pub s: Option<f64>,
    pub q: Option<f64>,
}

/// Subcommand-specific settings.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Knobs {
    pub seminorm: Option<SeminormKind>,
    /// Ball radii of the scaling law, or radii of the local-difference decay.
    pub radii: Option<Vec<f64>>,
    pub gammas: Option<Vec<f64>>,
    pub frequencies: Option<Vec<f64>>,
    pub steps: Option<Vec<usize>>,
    pub pair_count: Option<usize>,
    pub witness: Option<WitnessRecipe>,
    pub smooth: Option<SmoothFunction>,
    /// Evaluation points of the local-difference decay.
    pub points: Option<usize>,
    /// Recompute headline quantities at twice the resolution.
    pub refine: Option<bool>,
    /// Zero-padding factor of the spectral transform.
    pub padding: Option<usize>,
    /// Grid override of `verify-all`; `None` keeps each criterion's default.
    pub verify_n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub experiment: Option<ExperimentName>,
    pub functions: Vec<AnalyticFunction>,
    pub domain: DomainSpec,
    pub scheme: SchemeOptions,
    pub params: ParamSpec,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    /// Worker threads; `None` lets the runtime decide.
    pub threads: Option<usize>,
    /// Also emit SVG line plots next to the CSV tables.
    pub svg: bool,
    pub knobs: Knobs,
}

/// Default `(n, γ, p, s, q)` of a subcommand.
fn defaults(cmd: Subcommand, exp: Option<ExperimentName>) -> (usize, f64, f64, f64, f64) {
    use ExperimentName as E;
    match (cmd, exp) {
        (Subcommand::Seminorm | Subcommand::Spectral | Subcommand::Lusin, _) => (1024, 0.5, 2.0, 0.5, 1.0),
        (Subcommand::KernelMoment, _) => (1024, 0.5, 2.0, 0.5, 1.0),
        (Subcommand::Phistar, _) => (1024, 0.5, 1.0, 1.0, 1.0),
        (Subcommand::Hajlasz, _) => (1024, 0.5, 1.0, 1.0, 1.0),
        (Subcommand::VerifyAll, _) => (1024, 0.5, 2.0, 0.5, 1.0),
        (Subcommand::Experiment, Some(e)) => match e {
            E::IndicatorScaling => (4096, 0.5, 1.0, 0.5, 1.0),
            E::Embedding | E::WeakEmbedding => (2048, 0.5, 1.0, 0.5, 1.0),
            E::FracEmbedding => (1024, 0.5, 1.0, 0.5, 1.0),
            E::Interpolation => (2048, 0.5, 2.0, 0.5, 1.0),
            E::Immersion => (512, 0.5, 2.0, 0.5, 1.0),
            E::TruncatedImmersion => (1024, 1.0, 1.0, 1.0, 1.0),
            E::GradientBound => (1024, 0.5, 2.0, 0.5, 1.0),
            E::LocalDiff => (1024, 0.5, 1.0, 0.5, 1.0),
            E::Counterexample => (2048, 0.5, 1.0, 1.0, 1.0),
        },
        (Subcommand::Experiment, None) => unreachable!("checked in resolve"),
    }
}

fn default_functions(cmd: Subcommand, exp: Option<ExperimentName>, seed: u64) -> Vec<AnalyticFunction> {
    use ExperimentName as E;
    match (cmd, exp) {
        (Subcommand::Lusin, _) => vec![AnalyticFunction::gaussian(0.1), AnalyticFunction::indicator_ball(0.125)],
        (Subcommand::Phistar, _) => vec![AnalyticFunction::step_sum(8)],
        (Subcommand::Experiment, Some(E::Embedding | E::WeakEmbedding)) => {
            SCALING_RADII.iter().map(|&r| AnalyticFunction::indicator_ball(r)).collect()
        }
        (Subcommand::Experiment, Some(E::FracEmbedding)) => {
            [0.05, 0.1, 0.2].iter().map(|&s| AnalyticFunction::gaussian(s)).collect()
        }
        (Subcommand::Experiment, Some(E::Interpolation)) => INTERPOLATION_DEGREES
            .iter()
            .map(|&k| AnalyticFunction::trig_poly(seed, k))
            .collect(),
        (Subcommand::Experiment, Some(E::Immersion)) => {
            vec![AnalyticFunction::gaussian(0.2), AnalyticFunction::indicator_ball(0.125)]
        }
        _ => vec![AnalyticFunction::gaussian(0.1)],
    }
}

impl RunConfig {
    #[cfg(test)]
    pub fn new(subcommand: Subcommand, experiment: Option<ExperimentName>) -> Self {
        RunConfig {
            subcommand,
            experiment,
            ..Default::default()
        }
    }

    /// Fills every unset field from the subcommand defaults.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        use ExperimentName as E;
        let cmd = self.subcommand;
        let exp = match (cmd, self.experiment) {
            (Subcommand::Experiment, None) => {
                return Err(CliError::Config("subcommand `experiment` needs an `experiment` name".into()))
            }
            (Subcommand::Experiment, e) => e,
            (_, Some(e)) => {
                return Err(CliError::Config(format!(
                    "`experiment = {}` is only valid with subcommand `experiment`",
                    e.name()
                )))
            }
            (_, None) => None,
        };
        // TOML integers are signed 64-bit
        let seeds = self.functions.iter().filter_map(|f| match f {
            AnalyticFunction::TrigPoly { seed, .. } => Some(*seed),
            _ => None,
        });
        if let Some(big) = std::iter::once(self.seed).chain(seeds).find(|&s| s > i64::MAX as u64) {
            return Err(CliError::Config(format!("seed {big} exceeds the largest config integer {}", i64::MAX)));
        }
        let (n, gamma, p, s, q) = defaults(cmd, exp);
        let d = &mut self.domain;
        d.dim.get_or_insert(1);
        d.half_width.get_or_insert(1.0);
        d.n.get_or_insert(n);
        let pr = &mut self.params;
        pr.gamma.get_or_insert(gamma);
        pr.p.get_or_insert(p);
        pr.s.get_or_insert(s);
        pr.q.get_or_insert(q);
        if self.functions.is_empty() && !matches!(cmd, Subcommand::KernelMoment | Subcommand::VerifyAll) {
            self.functions = default_functions(cmd, exp, self.seed);
        }
        let k = &mut self.knobs;
        match (cmd, exp) {
            (Subcommand::Seminorm, _) => {
                k.seminorm.get_or_insert(SeminormKind::X);
            }
            (Subcommand::Spectral, _) => {
                k.padding.get_or_insert(logsob::spectral::DEFAULT_PADDING);
            }
            (Subcommand::KernelMoment, _) => {
                k.frequencies
                    .get_or_insert_with(|| LOW_FREQUENCIES.iter().chain(&HIGH_FREQUENCIES).copied().collect());
            }
            (Subcommand::Lusin, _) => {
                k.pair_count.get_or_insert(logsob::maximal::DEFAULT_PAIR_COUNT);
            }
            (Subcommand::Hajlasz, _) => {
                k.pair_count.get_or_insert(logsob::maximal::DEFAULT_PAIR_COUNT);
                k.witness.get_or_insert(WitnessRecipe::Lipschitz);
            }
            (Subcommand::Experiment, Some(e)) => {
                k.refine.get_or_insert(true);
                k.pair_count.get_or_insert(logsob::maximal::DEFAULT_PAIR_COUNT);
                match e {
                    E::IndicatorScaling => {
                        k.radii.get_or_insert_with(|| SCALING_RADII.to_vec());
                    }
                    E::Immersion => {
                        k.gammas.get_or_insert_with(|| vec![0.25, 0.5, 1.0]);
                    }
                    E::TruncatedImmersion => {
                        k.witness.get_or_insert(WitnessRecipe::Lipschitz);
                    }
                    E::GradientBound => {
                        k.smooth.get_or_insert(SmoothFunction::Gaussian { sigma: 0.2 });
                    }
                    E::LocalDiff => {
                        k.smooth.get_or_insert(SmoothFunction::Gaussian { sigma: 0.2 });
                        k.radii.get_or_insert_with(|| (2..=6).map(|j| 0.5f64.powi(j)).collect());
                        k.points.get_or_insert(10);
                    }
                    E::Counterexample => {
                        k.steps.get_or_insert_with(|| STEP_COUNTS.to_vec());
                    }
                    _ => {}
                }
            }
            _ => {}
        }
        Ok(self)
    }

    /// Resolved domain; call after [`resolve`](Self::resolve).
    pub fn domain(&self) -> Result<Domain, CliError> {
        let d = self.domain;
        Ok(Domain::new(d.dim.unwrap_or(1), d.half_width.unwrap_or(1.0), d.n.unwrap_or(1024))?)
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma.unwrap_or(0.5)
    }

    pub fn p(&self) -> f64 {
        self.params.p.unwrap_or(1.0)
    }

    pub fn s(&self) -> f64 {
        self.params.s.unwrap_or(0.5)
    }

    pub fn q(&self) -> f64 {
        self.params.q.unwrap_or(1.0)
    }

    pub fn seminorm_params(&self) -> SeminormParams {
        SeminormParams {
            gamma: self.gamma(),
            p: self.p(),
            s: self.s(),
            q: self.q(),
            allow_zero_gamma: false,
        }
    }

    /// `seminorm`, `experiment-indicator-scaling`, ... used for file names.
    pub fn stem(&self) -> String {
        match self.experiment {
            Some(e) => format!("experiment-{}", e.name()),
            None => self.subcommand.name().to_string(),
        }
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_toml(s: &str) -> Result<Self, CliError> {
        toml::from_str(s).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads a TOML or JSON config, or the config embedded in a report.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        if !is_json {
            return Self::from_toml(&text);
        }
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
        let inner = match value.get("config") {
            Some(c) if value.get("schema_version").is_some() => c.clone(),
            _ => value,
        };
        serde_json::from_value(inner).map_err(|e| CliError::Config(e.to_string()))
    }
}

fn numbers(args: &str) -> Result<Vec<f64>, String> {
    if args.is_empty() {
        return Ok(Vec::new());
    }
    args.split(',')
        .map(|a| a.trim().parse::<f64>().map_err(|e| format!("`{a}`: {e}")))
        .collect()
}

fn split(s: &str) -> (&str, &str) {
    s.split_once(':').unwrap_or((s, ""))
}

fn arity(name: &str, v: &[f64], allowed: &[usize]) -> Result<(), String> {
    if allowed.contains(&v.len()) {
        Ok(())
    } else {
        Err(format!("`{name}` takes {allowed:?} arguments, got {}", v.len()))
    }
}

fn as_count(x: f64) -> Result<usize, String> {
    if x >= 0.0 && x.fract() == 0.0 {
        Ok(x as usize)
    } else {
        Err(format!("expected a nonnegative integer, got {x}"))
    }
}

/// `gaussian:0.1`, `indicator:0.125[,cx,cy]`, `step:4`, `trig:seed,degree`,
/// `constant:c`, `power:exponent,cap`, or a JSON object.
pub fn parse_function(s: &str) -> Result<AnalyticFunction, String> {
    if s.trim_start().starts_with('{') {
        return serde_json::from_str(s).map_err(|e| e.to_string());
    }
    let (name, args) = split(s);
    let v = numbers(args)?;
    Ok(match name {
        "gaussian" => {
            arity(name, &v, &[1])?;
            AnalyticFunction::gaussian(v[0])
        }
        "indicator" => {
            arity(name, &v, &[1, 2, 3])?;
            AnalyticFunction::IndicatorBall {
                radius: v[0],
                center: [v.get(1).copied().unwrap_or(0.0), v.get(2).copied().unwrap_or(0.0)],
            }
        }
        "step" => {
            arity(name, &v, &[1])?;
            AnalyticFunction::step_sum(as_count(v[0])?)
        }
        "trig" => {
            arity(name, &v, &[2])?;
            AnalyticFunction::trig_poly(as_count(v[0])? as u64, as_count(v[1])?)
        }
        "constant" => {
            arity(name, &v, &[1])?;
            AnalyticFunction::constant(v[0])
        }
        "power" => {
            arity(name, &v, &[2])?;
            AnalyticFunction::TruncatedPower {
                exponent: v[0],
                cap: v[1],
            }
        }
        _ => return Err(format!("unknown function `{name}`")),
    })
}

/// `gaussian:0.2`, `affine:ax,ay,offset`, `trig:seed,degree`, `abs`.
pub fn parse_smooth(s: &str) -> Result<SmoothFunction, String> {
    if s.trim_start().starts_with('{') {
        return serde_json::from_str(s).map_err(|e| e.to_string());
    }
    let (name, args) = split(s);
    let v = numbers(args)?;
    Ok(match name {
        "gaussian" => {
            arity(name, &v, &[1])?;
            SmoothFunction::Gaussian { sigma: v[0] }
        }
        "affine" => {
            arity(name, &v, &[3])?;
            SmoothFunction::Affine {
                slope: [v[0], v[1]],
                offset: v[2],
            }
        }
        "trig" => {
            arity(name, &v, &[2])?;
            SmoothFunction::TrigPoly {
                seed: as_count(v[0])? as u64,
                degree: as_count(v[1])?,
            }
        }
        "abs" => {
            arity(name, &v, &[0])?;
            SmoothFunction::Abs
        }
        _ => return Err(format!("unknown smooth function `{name}`")),
    })
}

/// `lipschitz`, `jump`, or `constant:c`.
pub fn parse_witness(s: &str) -> Result<WitnessRecipe, String> {
    let (name, args) = split(s);
    let v = numbers(args)?;
    Ok(match name {
        "lipschitz" => {
            arity(name, &v, &[0])?;
            WitnessRecipe::Lipschitz
        }
        "jump" => {
            arity(name, &v, &[0])?;
            WitnessRecipe::Jump
        }
        "constant" => {
            arity(name, &v, &[1])?;
            WitnessRecipe::Constant { c: v[0] }
        }
        _ => return Err(format!("unknown witness `{name}`")),
    })
}

//! TOML run configuration.

use std::path::Path;

use anyhow::{bail, ensure, Context};
use serde::Deserialize;

use scwd_core::speed::{Th2Options, Th2Subtrahend, Th2Variant, DEFAULT_T_MAX};
use scwd_core::window::{Evaluation, Quantity, Settle, Statistic, DEFAULT_SUCCESS_THRESHOLD};
use scwd_core::{
    DegreePolynomial, RecordPolicy, RunOptions, ScheduleVariant, SuccessPolicy, UncoupledEnsemble,
};

pub const THRESHOLD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// `"x^3"`, `"0.5x^2 + 0.5x^3"` or `[[degree, coefficient], ...]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PolySpec {
    Text(String),
    Pairs(Vec<(usize, f64)>),
}

impl PolySpec {
    fn build(&self) -> scwd_core::Result<DegreePolynomial> {
        match self {
            PolySpec::Text(s) => s.parse(),
            PolySpec::Pairs(p) => DegreePolynomial::from_pairs(p),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub name: Option<String>,
    #[serde(rename = "L")]
    pub l: PolySpec,
    #[serde(rename = "R")]
    pub r: PolySpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StopSpec {
    Value(f64),
    /// `"map"`: up to, but excluding, the ensemble's MAP threshold.
    Named(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum EpsilonSpec {
    Value(f64),
    List(Vec<f64>),
    Grid {
        start: f64,
        stop: StopSpec,
        step: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum IterSpec {
    Fixed(usize),
    /// `"auto"`: scan `T = 1 ..= T_max`.
    Named(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum StatisticConfig {
    #[default]
    Average,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum QuantityConfig {
    #[default]
    Message,
    Bit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EvaluationConfig {
    #[default]
    Final,
    Decision,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuccessConfig {
    pub statistic: StatisticConfig,
    pub quantity: QuantityConfig,
    pub evaluation: EvaluationConfig,
    pub threshold: f64,
}

impl Default for SuccessConfig {
    fn default() -> Self {
        Self {
            statistic: StatisticConfig::Average,
            quantity: QuantityConfig::Message,
            evaluation: EvaluationConfig::Final,
            threshold: DEFAULT_SUCCESS_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum VariantConfig {
    #[default]
    Literal,
    Extended,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleConfig {
    pub variant: VariantConfig,
    pub warm_start: bool,
    pub flush: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RecordConfig {
    /// `"all"`, `"none"` or `"final"`.
    Named(String),
    /// Inclusive range of window configurations.
    Range([usize; 2]),
}

impl Default for RecordConfig {
    fn default() -> Self {
        RecordConfig::Named("all".into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Th2VariantConfig {
    #[default]
    Stated,
    Derivation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SubtrahendConfig {
    #[default]
    None,
    #[serde(rename = "x_e")]
    XE,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsConfig {
    pub enabled: bool,
    pub th2_variant: Th2VariantConfig,
    pub th2_subtrahend: SubtrahendConfig,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            th2_variant: Th2VariantConfig::Stated,
            th2_subtrahend: SubtrahendConfig::None,
        }
    }
}

fn default_t_max() -> usize {
    DEFAULT_T_MAX
}
fn default_alpha() -> f64 {
    1.0
}
fn default_grid_n() -> usize {
    scwd_core::scalar::DEFAULT_GRID_N
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub ensemble: OneOrMany<EnsembleConfig>,
    #[serde(rename = "N", default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub w: Option<usize>,
    #[serde(default)]
    pub epsilon: Option<EpsilonSpec>,
    #[serde(rename = "W", default)]
    pub window: Option<OneOrMany<usize>>,
    #[serde(rename = "T", default)]
    pub iterations: Option<IterSpec>,
    #[serde(rename = "T_max", default = "default_t_max")]
    pub t_max: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default)]
    pub success: SuccessConfig,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub record: RecordConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
}

/// An ensemble with the label used in output file names.
#[derive(Debug, Clone)]
pub struct NamedEnsemble {
    pub name: String,
    pub ensemble: UncoupledEnsemble,
}

/// Number of iterations per window configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Iterations {
    Fixed(usize),
    Auto,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = toml::from_str(text).context("cannot parse configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    fn validate(&self) -> anyhow::Result<()> {
        ensure!(self.t_max >= 1, "T_max must be at least 1");
        ensure!(
            (1.0..=2.0).contains(&self.alpha),
            "alpha must lie in [1, 2], got {}",
            self.alpha
        );
        ensure!(
            self.grid_n >= 1000,
            "grid_n must be at least 1000, got {}",
            self.grid_n
        );
        ensure!(
            self.success.threshold > 0.0 && self.success.threshold.is_finite(),
            "success threshold must be positive"
        );
        if let Some(n) = self.n {
            ensure!(n >= 1, "N must be at least 1");
            for w in self.windows() {
                ensure!(
                    w >= 1 && w <= n,
                    "window size W = {w} must lie in [1, N = {n}]"
                );
            }
        }
        if let Some(w) = self.w {
            ensure!(w >= 1, "w must be at least 1");
        }
        let ws = self.windows();
        ensure!(
            ws.windows(2).all(|p| p[0] < p[1]),
            "W values must be strictly ascending"
        );
        self.iterations()?;
        self.record_policy()?;
        match &self.epsilon {
            Some(EpsilonSpec::Value(e)) => check_epsilon(*e)?,
            Some(EpsilonSpec::List(l)) => {
                ensure!(!l.is_empty(), "epsilon list is empty");
                l.iter().try_for_each(|&e| check_epsilon(e))?;
                ensure!(
                    l.windows(2).all(|p| p[0] < p[1]),
                    "epsilon values must be strictly ascending"
                );
            }
            Some(EpsilonSpec::Grid { start, stop, step }) => {
                check_epsilon(*start)?;
                ensure!(
                    *step > 0.0 && step.is_finite(),
                    "epsilon step must be positive"
                );
                match stop {
                    StopSpec::Value(s) => {
                        check_epsilon(*s)?;
                        ensure!(s >= start, "epsilon stop {s} is below start {start}");
                    }
                    StopSpec::Named(s) if s == "map" => {}
                    StopSpec::Named(s) => {
                        bail!("unknown epsilon stop {s:?}, expected a number or \"map\"")
                    }
                }
            }
            None => {}
        }
        self.ensembles()?;
        Ok(())
    }

    pub fn ensembles(&self) -> anyhow::Result<Vec<NamedEnsemble>> {
        self.ensemble
            .to_vec()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let l = e.l.build().context("invalid variable-node distribution L")?;
                let r = e.r.build().context("invalid check-node distribution R")?;
                let ensemble = UncoupledEnsemble::new(l, r)?;
                let name = e.name.clone().unwrap_or_else(|| format!("ens{}", i + 1));
                ensure!(
                    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'),
                    "ensemble name {name:?} must be non-empty and use only letters, digits, '-' and '_'"
                );
                Ok(NamedEnsemble { name, ensemble })
            })
            .collect()
    }

    pub fn windows(&self) -> Vec<usize> {
        self.window
            .as_ref()
            .map(OneOrMany::to_vec)
            .unwrap_or_default()
    }

    pub fn iterations(&self) -> anyhow::Result<Option<Iterations>> {
        match &self.iterations {
            None => Ok(None),
            Some(IterSpec::Fixed(0)) => bail!("T must be at least 1"),
            Some(IterSpec::Fixed(t)) => Ok(Some(Iterations::Fixed(*t))),
            Some(IterSpec::Named(s)) if s == "auto" => Ok(Some(Iterations::Auto)),
            Some(IterSpec::Named(s)) => bail!("unknown T {s:?}, expected an integer or \"auto\""),
        }
    }

    pub fn record_policy(&self) -> anyhow::Result<RecordPolicy> {
        Ok(match &self.record {
            RecordConfig::Named(s) => match s.as_str() {
                "all" => RecordPolicy::AllWindows,
                "none" => RecordPolicy::None,
                "final" => RecordPolicy::FinalOnly,
                other => bail!("unknown record policy {other:?}, expected \"all\", \"none\", \"final\" or [from, to]"),
            },
            RecordConfig::Range([a, b]) => {
                ensure!(a <= b && *a >= 1, "record range [{a}, {b}] is invalid");
                RecordPolicy::Windows(*a..=*b)
            }
        })
    }

    /// ε values for one ensemble; a `"map"` stop is resolved against that
    /// ensemble's MAP threshold and excluded from the grid.
    pub fn epsilons(&self, ens: &UncoupledEnsemble) -> anyhow::Result<Vec<f64>> {
        match &self.epsilon {
            None => bail!("the configuration has no epsilon"),
            Some(EpsilonSpec::Value(e)) => Ok(vec![*e]),
            Some(EpsilonSpec::List(l)) => Ok(l.clone()),
            Some(EpsilonSpec::Grid { start, stop, step }) => {
                let (stop, inclusive) = match stop {
                    StopSpec::Value(s) => (*s, true),
                    StopSpec::Named(_) => (ens.map_threshold(THRESHOLD_TOL)?, false),
                };
                let mut out = Vec::new();
                for i in 0usize.. {
                    // round away accumulated binary noise, e.g. 0.40000000000000002
                    let e: f64 = format!("{:.12}", start + i as f64 * step).parse()?;
                    let inside = if inclusive {
                        e <= stop + 1e-12
                    } else {
                        e < stop
                    };
                    if !inside {
                        break;
                    }
                    out.push(e.min(1.0));
                }
                ensure!(!out.is_empty(), "epsilon grid is empty");
                Ok(out)
            }
        }
    }

    pub fn require_chain(&self) -> anyhow::Result<(usize, usize)> {
        match (self.n, self.w) {
            (Some(n), Some(w)) => Ok((n, w)),
            _ => bail!("this command needs both N and w"),
        }
    }

    pub fn success_policy(&self) -> SuccessPolicy {
        SuccessPolicy {
            statistic: match self.success.statistic {
                StatisticConfig::Average => Statistic::Average,
                StatisticConfig::Max => Statistic::Max,
            },
            quantity: match self.success.quantity {
                QuantityConfig::Message => Quantity::Message,
                QuantityConfig::Bit => Quantity::Bit,
            },
            evaluation: match self.success.evaluation {
                EvaluationConfig::Final => Evaluation::Final,
                EvaluationConfig::Decision => Evaluation::Decision,
            },
            threshold: self.success.threshold,
        }
    }

    pub fn run_options(&self) -> anyhow::Result<RunOptions> {
        Ok(RunOptions {
            variant: match self.schedule.variant {
                VariantConfig::Literal => ScheduleVariant::Literal,
                VariantConfig::Extended => ScheduleVariant::Extended,
            },
            warm_start: self.schedule.warm_start,
            flush: self.schedule.flush,
            settle: Settle::default(),
            record: self.record_policy()?,
        })
    }

    pub fn th2_options(&self) -> Th2Options {
        Th2Options {
            variant: match self.bounds.th2_variant {
                Th2VariantConfig::Stated => Th2Variant::Stated,
                Th2VariantConfig::Derivation => Th2Variant::Derivation,
            },
            subtrahend: match self.bounds.th2_subtrahend {
                SubtrahendConfig::None => Th2Subtrahend::None,
                SubtrahendConfig::XE => Th2Subtrahend::XE,
            },
        }
    }
}

fn check_epsilon(e: f64) -> anyhow::Result<()> {
    ensure!(
        e.is_finite() && (0.0..=1.0).contains(&e),
        "epsilon {e} is outside [0, 1]"
    );
    Ok(())
}

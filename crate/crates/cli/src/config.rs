//! JSON schemas for experiment configs and solver instances.
//!
//! Unknown keys are rejected everywhere; serde reports the offending path
//! and position, which is surfaced verbatim with exit code 2.

use serde::Deserialize;

use msb_core::bonus::{ArmStats, BonusFamily, BonusSpec, NormOrder, ScaleFn};
use msb_core::{ConstraintMode, Matroid};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Implied and rejected when `means` is a preset.
    #[serde(default)]
    pub matroid: Option<MatroidConfig>,
    #[serde(default)]
    pub mode: Option<ModeConfig>,
    pub means: MeansConfig,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
    pub horizon: u64,
    pub runs: u32,
    pub algorithms: Vec<AlgorithmConfig>,
    pub seed: u64,
    #[serde(default)]
    pub checkpoints: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatroidConfig {
    Uniform {
        n: usize,
        k: usize,
    },
    Partition {
        blocks: Vec<Vec<usize>>,
        caps: Vec<usize>,
    },
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
}

impl MatroidConfig {
    pub fn build(&self) -> CliResult<Matroid> {
        let m = match self {
            MatroidConfig::Uniform { n, k } => Matroid::uniform(*n, *k),
            MatroidConfig::Partition { blocks, caps } => {
                Matroid::partition(blocks.clone(), caps.clone())
            }
            MatroidConfig::Graphic { vertices, edges } => {
                Matroid::graphic(*vertices, edges.clone())
            }
        };
        m.map_err(|e| CliError::config(format!("matroid: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeConfig {
    Bases,
    IndependentSets,
}

impl From<ModeConfig> for ConstraintMode {
    fn from(m: ModeConfig) -> Self {
        match m {
            ModeConfig::Bases => ConstraintMode::Bases,
            ModeConfig::IndependentSets => ConstraintMode::IndependentSets,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MeansConfig {
    Preset(String),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub sigma: SigmaConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SigmaConfig {
    Scalar(f64),
    PerArm(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub name: AlgorithmName,
    #[serde(default)]
    pub bonus: Option<BonusConfig>,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum AlgorithmName {
    #[serde(rename = "cucb")]
    Cucb,
    #[serde(rename = "escb_greedy")]
    EscbGreedy,
    #[serde(rename = "escb_localsearch")]
    EscbLocalSearch,
    #[serde(rename = "escb_kl_greedy")]
    EscbKlGreedy,
}

impl AlgorithmName {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmName::Cucb => "cucb",
            AlgorithmName::EscbGreedy => "escb_greedy",
            AlgorithmName::EscbLocalSearch => "escb_localsearch",
            AlgorithmName::EscbKlGreedy => "escb_kl_greedy",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BonusConfig {
    #[serde(default)]
    pub p: Option<PConfig>,
    #[serde(default)]
    pub family: Option<FamilyConfig>,
    #[serde(default)]
    pub r: Option<RadiusConfig>,
    #[serde(default)]
    pub scale: Option<ScaleConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub enum PConfig {
    #[serde(rename = "one")]
    One,
    #[serde(rename = "inf")]
    Inf,
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub enum FamilyConfig {
    #[serde(rename = "cucb")]
    Cucb,
    #[serde(rename = "escb")]
    Escb,
    #[serde(rename = "escb_kl")]
    EscbKl,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RadiusConfig {
    Number(f64),
    Word(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleConfig {
    pub kind: ScaleKind,
    #[serde(default)]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleKind {
    LogPlusM,
    CLog,
    Const,
}

/// Applies a bonus override on top of a default spec, field by field.
pub fn resolve_bonus(
    cfg: Option<&BonusConfig>,
    default: BonusSpec<f64>,
) -> CliResult<BonusSpec<f64>> {
    let Some(cfg) = cfg else { return Ok(default) };
    let p = match cfg.p {
        None => default.p(),
        Some(PConfig::One) => NormOrder::One,
        Some(PConfig::Inf) => NormOrder::Infinity,
    };
    let family = match cfg.family {
        None => default.family(),
        Some(FamilyConfig::Cucb) => BonusFamily::QuadraticCucb,
        Some(FamilyConfig::Escb) => BonusFamily::QuadraticEscb,
        Some(FamilyConfig::EscbKl) => BonusFamily::Kl,
    };
    let r = match &cfg.r {
        None => default.radius(),
        Some(RadiusConfig::Number(x)) => *x,
        Some(RadiusConfig::Word(w)) if w == "inf" => f64::INFINITY,
        Some(RadiusConfig::Word(w)) => {
            return Err(CliError::config(format!(
                "bonus.r must be a number or \"inf\", got \"{w}\""
            )))
        }
    };
    let scale = match &cfg.scale {
        None => default.scale_fn(),
        Some(s) => match s.kind {
            ScaleKind::LogPlusM => ScaleFn::LogPlusM {
                c: s.c.unwrap_or(1.0),
            },
            ScaleKind::CLog => {
                let c =
                    s.c.ok_or_else(|| CliError::config("scale kind c_log requires c"))?;
                ScaleFn::CLog { c }
            }
            ScaleKind::Const => {
                let c =
                    s.c.ok_or_else(|| CliError::config("scale kind const requires c"))?;
                ScaleFn::Const { c }
            }
        },
    };
    BonusSpec::new(p, family, r, scale, default.max_cardinality())
        .map_err(|e| CliError::config(format!("bonus: {e}")))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearConfig {
    pub weights: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsConfig {
    pub t: u64,
    pub counts: Vec<u64>,
    pub means: Vec<f64>,
}

impl StatsConfig {
    pub fn build(&self) -> CliResult<ArmStats<f64>> {
        ArmStats::from_state(self.t, self.counts.clone(), self.means.clone())
            .map_err(|e| CliError::config(format!("stats: {e}")))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BonusWithStats {
    pub spec: BonusConfig,
    pub stats: StatsConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveAlgo {
    Greedy,
    Localsearch,
    Brute,
    Ratio,
}

impl SolveAlgo {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "greedy" => Ok(SolveAlgo::Greedy),
            "localsearch" => Ok(SolveAlgo::Localsearch),
            "brute" => Ok(SolveAlgo::Brute),
            "ratio" => Ok(SolveAlgo::Ratio),
            other => Err(CliError::config(format!(
                "unknown algo \"{other}\"; expected greedy, localsearch, brute, or ratio"
            ))),
        }
    }
}

/// Offline solver instance.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub matroid: MatroidConfig,
    pub mode: ModeConfig,
    #[serde(default)]
    pub algo: Option<SolveAlgo>,
    #[serde(default)]
    pub linear: Option<LinearConfig>,
    #[serde(default)]
    pub bonus: Option<BonusWithStats>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub cost: Option<LinearConfig>,
    #[serde(default)]
    pub reward: Option<LinearConfig>,
    #[serde(default)]
    pub cost_bonus: Option<BonusWithStats>,
    #[serde(default)]
    pub reward_bonus: Option<BonusWithStats>,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub eta: Option<f64>,
}

/// Parses a JSON document into a config type, reporting serde's path and
/// line/column diagnostics.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::config(format!("{what}: {e}")))
}

//! JSON experiment configs.
//!
//! Documents are parsed into raw structs with every key optional except the
//! frame description, defaults are filled, and the result is fully validated
//! before it is returned. Unknown keys are rejected.

use serde::Deserialize;

use crate::decoder::{DecodePolicy, PolicyError};
use crate::gamp::{GampParams, GridSpec, PosteriorMethod};
use crate::modem::{ConstellationKind, FrameConfig, ModemError};
use crate::nonlinearity::{PiecewiseLinear, Profile, ProfileError};
use crate::simulate::papr::PaprError;
use crate::simulate::sweep::SweepError;
use crate::simulate::{PaprConfig, PaprMode, StopRule, SweepConfig};
use crate::transforms::{TransformError, TransformKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

impl ConfigError {
    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Invalid { field, .. } => Some(field),
            ConfigError::Parse { .. } => None,
        }
    }
}

fn invalid(field: impl Into<String>, reason: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        reason: reason.to_string(),
    }
}

impl From<serde_json::Error> for ConfigError {
    fn from(e: serde_json::Error) -> Self {
        ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

impl From<ProfileError> for ConfigError {
    fn from(e: ProfileError) -> Self {
        match &e {
            ProfileError::Invalid { field, .. } => invalid(*field, &e),
            _ => invalid("profile", &e),
        }
    }
}

impl From<ModemError> for ConfigError {
    fn from(e: ModemError) -> Self {
        let field = match &e {
            ModemError::Transform(TransformError::NotPowerOfTwo(_)) => "N",
            ModemError::Incompatible { .. } => "constellation",
            ModemError::NoPayload { .. } => "N",
            ModemError::NonPositivePower(_) => "profile",
            _ => "frame",
        };
        invalid(field, &e)
    }
}

impl From<PolicyError> for ConfigError {
    fn from(e: PolicyError) -> Self {
        let field = match &e {
            PolicyError::TMax(_) => "t_max",
            PolicyError::Params { phase: 1, .. } => "phase1",
            PolicyError::Params { .. } => "phase2",
        };
        invalid(field, &e)
    }
}

impl From<SweepError> for ConfigError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Invalid { field, reason } => invalid(field, reason),
            SweepError::Modem(m) => m.into(),
            SweepError::Policy(p) => p.into(),
        }
    }
}

impl From<PaprError> for ConfigError {
    fn from(e: PaprError) -> Self {
        match e {
            PaprError::Invalid { field, reason } => invalid(field, reason),
            PaprError::Transform(t) => invalid("N", t),
        }
    }
}

/// A built-in profile name or an inline tabulated profile.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ProfileSpec {
    Name(String),
    Inline(PiecewiseLinear),
}

impl ProfileSpec {
    fn resolve(self) -> Result<Profile, ConfigError> {
        match self {
            ProfileSpec::Name(name) => Ok(Profile::by_name(&name)?),
            ProfileSpec::Inline(p) => {
                p.validate()?;
                Ok(Profile::PiecewiseLinear(p))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum PosteriorSpec {
    ClosedForm,
    Grid,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBer {
    #[serde(rename = "N")]
    n: usize,
    transform: TransformKind,
    profile: ProfileSpec,
    constellation: ConstellationKind,
    ebn0_grid: Vec<f64>,
    t_max: Option<usize>,
    phase1: Option<GampParams>,
    phase2: Option<GampParams>,
    min_frame_errors: Option<u64>,
    max_frames: Option<u64>,
    max_bits: Option<u64>,
    seed: Option<u64>,
    posterior: Option<PosteriorSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPapr {
    #[serde(rename = "N")]
    n: usize,
    oversampling: Option<usize>,
    mode: PaprMode,
    profile: Option<ProfileSpec>,
    precoder: Option<TransformKind>,
    frames: Option<usize>,
    seed: Option<u64>,
}

/// Parse and validate a BER sweep config.
pub fn parse_ber_config(doc: &str) -> Result<SweepConfig, ConfigError> {
    let raw: RawBer = serde_json::from_str(doc)?;
    let frame = FrameConfig {
        n: raw.n,
        transform: raw.transform,
        profile: raw.profile.resolve()?,
        constellation: raw.constellation,
    };
    let defaults = DecodePolicy::default();
    let stop = StopRule::default();
    let cfg = SweepConfig {
        frame,
        policy: DecodePolicy {
            phase1: raw.phase1.unwrap_or(defaults.phase1),
            phase2: raw.phase2.unwrap_or(defaults.phase2),
            t_max: raw.t_max.unwrap_or(defaults.t_max),
        },
        ebn0_grid: raw.ebn0_grid,
        stop: StopRule {
            min_frame_errors: raw.min_frame_errors.unwrap_or(stop.min_frame_errors),
            max_frames: raw.max_frames.unwrap_or(stop.max_frames),
            max_bits: raw.max_bits.unwrap_or(stop.max_bits),
        },
        master_seed: raw.seed.unwrap_or(0),
        posterior: match raw.posterior {
            Some(PosteriorSpec::Grid) => PosteriorMethod::Grid(GridSpec::default()),
            _ => PosteriorMethod::ClosedForm,
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Parse and validate a PAPR experiment config.
pub fn parse_papr_config(doc: &str) -> Result<PaprConfig, ConfigError> {
    let raw: RawPapr = serde_json::from_str(doc)?;
    let profile = match raw.profile {
        Some(p) => p.resolve()?,
        None => Profile::by_name("table1_1")?,
    };
    let mut cfg = PaprConfig::new(raw.n, raw.oversampling.unwrap_or(1), raw.mode, profile);
    if let Some(p) = raw.precoder {
        cfg.precoder = p;
    }
    if let Some(f) = raw.frames {
        cfg.frames = f;
    }
    cfg.master_seed = raw.seed.unwrap_or(0);
    cfg.validate()?;
    Ok(cfg)
}

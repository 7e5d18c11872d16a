//! Run configuration: a flat TOML table, validated field by field.

use std::path::{Path, PathBuf};

use heckeforge::field::{is_prime, prime_power};
use heckeforge::rootdata::{CartanType, Isogeny, RootDatum};
use heckeforge::suites::{SuiteConfig, SUITES};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest characteristic the field dispatch covers.
pub const MAX_PRIME: u64 = 31;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("malformed config: {0}")]
    Syntax(String),
    #[error("field `{field}`: {message}")]
    Field { field: &'static str, message: String },
}

fn field_err(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field, message: message.into() }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(rename = "type")]
    cartan: Option<String>,
    isogeny: Option<String>,
    central_rank: Option<usize>,
    q: Option<u64>,
    field: Option<String>,
    n_max: Option<usize>,
    c_max: Option<usize>,
    suites: Option<Vec<String>>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

/// A validated configuration. `characteristic` is 0 for `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    #[serde(rename = "type")]
    pub cartan: CartanType,
    pub isogeny: Isogeny,
    pub q: u64,
    pub field: String,
    #[serde(skip)]
    pub characteristic: u64,
    pub n_max: usize,
    pub c_max: usize,
    pub suites: Vec<String>,
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.to_path_buf(), message: e.to_string() })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.message().to_string()))?;
        let cartan = CartanType::parse(raw.cartan.as_deref().ok_or_else(|| field_err("type", "missing"))?)
            .map_err(|e| field_err("type", e.to_string()))?;
        let iso_name = raw.isogeny.as_deref().unwrap_or("simply_connected");
        let central = raw.central_rank.unwrap_or(0);
        let isogeny = Isogeny::parse(iso_name, central).map_err(|e| field_err("isogeny", e.to_string()))?;
        if central > 0 && !matches!(isogeny, Isogeny::GlStyle(_)) {
            return Err(field_err("central_rank", "only gl_style data have a central part"));
        }
        RootDatum::new(cartan, isogeny).map_err(|e| field_err("central_rank", e.to_string()))?;

        let q = raw.q.ok_or_else(|| field_err("q", "missing"))?;
        if prime_power(q).is_none() {
            return Err(field_err("q", format!("{q} is not a prime power")));
        }
        let field = raw.field.unwrap_or_else(|| "Q".into());
        let characteristic = parse_field(&field)?;

        let suites = raw.suites.unwrap_or_else(|| SUITES.iter().map(|s| s.to_string()).collect());
        check_suites(&suites)?;
        Ok(RunConfig {
            cartan,
            isogeny,
            q,
            field,
            characteristic,
            n_max: raw.n_max.unwrap_or(4),
            c_max: raw.c_max.unwrap_or(4),
            suites,
            seed: raw.seed.unwrap_or(0),
            out: raw.out,
        })
    }

    pub fn suite_config(&self) -> SuiteConfig {
        SuiteConfig {
            cartan: self.cartan,
            isogeny: self.isogeny,
            q: self.q,
            n_max: self.n_max,
            c_max: self.c_max,
            seed: self.seed,
        }
    }
}

fn parse_field(s: &str) -> Result<u64, ConfigError> {
    if s == "Q" {
        return Ok(0);
    }
    let p: u64 = s
        .strip_prefix("Fp:")
        .and_then(|p| p.trim().parse().ok())
        .ok_or_else(|| field_err("field", format!("expected \"Q\" or \"Fp:<p>\", got {s:?}")))?;
    if !is_prime(p) {
        return Err(field_err("field", format!("{p} is not prime")));
    }
    if p > MAX_PRIME {
        return Err(field_err("field", format!("primes above {MAX_PRIME} are not supported")));
    }
    Ok(p)
}

/// Checks suite names against the known list, rejecting duplicates.
pub fn check_suites(suites: &[String]) -> Result<(), ConfigError> {
    for (i, s) in suites.iter().enumerate() {
        if !SUITES.contains(&s.as_str()) {
            return Err(field_err("suites", format!("unknown suite {s:?}; known: {}", SUITES.join(", "))));
        }
        if suites[..i].contains(s) {
            return Err(field_err("suites", format!("{s:?} listed twice")));
        }
    }
    Ok(())
}

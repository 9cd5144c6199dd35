//! Flag and config-file handling shared by every subcommand.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;
use thiserror::Error;
use tunnelkit::analysis::{scan_digits, triple_well_digits, ScanFamily};
use tunnelkit::instanton::ACombination;
use tunnelkit::potentials::{Boundary, PotentialSpec};
use tunnelkit::{BigReal, Precision, TunnelError};

pub const DIGITS_ENV: &str = "TUNNELKIT_DIGITS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(TunnelError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<TunnelError> for CliError {
    fn from(e: TunnelError) -> Self {
        match e {
            TunnelError::InvalidInput(msg) | TunnelError::Unsupported(msg) => CliError::Config(msg),
            other => CliError::Solver(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

pub fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Anharmonic,
    DoubleWell,
    Cosine,
    TripleWell,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::Anharmonic => "anharmonic",
            Family::DoubleWell => "double-well",
            Family::Cosine => "cosine",
            Family::TripleWell => "triple-well",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// How the two asymptotic constants of an asymmetric pair are combined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combination {
    End,
    Start,
}

impl From<Combination> for ACombination {
    fn from(c: Combination) -> Self {
        match c {
            Combination::End => ACombination::EndWeighted,
            Combination::Start => ACombination::StartWeighted,
        }
    }
}

/// Accepts a JSON string or number and keeps its decimal text.
pub fn text_opt<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    Ok(match Option::<Value>::deserialize(d)? {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s),
        Some(Value::Number(n)) => Some(n.to_string()),
        Some(other) => return Err(serde::de::Error::custom(format!("expected a number, got {other}"))),
    })
}

pub fn text_list_opt<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<String>>, D::Error> {
    let items = match Option::<Value>::deserialize(d)? {
        None | Some(Value::Null) => return Ok(None),
        Some(Value::Array(items)) => items,
        Some(Value::String(s)) => return Ok(Some(s.split(',').map(|x| x.trim().to_string()).collect())),
        Some(other) => vec![other],
    };
    items
        .into_iter()
        .map(|v| match v {
            Value::String(s) => Ok(s),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(serde::de::Error::custom(format!("expected a number, got {other}"))),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

/// Potential, discretisation and output flags.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct Common {
    /// Potential family.
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Coupling g (decimal text, parsed at working precision).
    #[arg(long)]
    #[serde(default, deserialize_with = "text_opt")]
    pub g: Option<String>,
    /// Quadratic coefficient of the anharmonic oscillator [default: 1].
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "text_opt")]
    pub eps: Option<String>,
    /// Constant shift of the anharmonic oscillator [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "text_opt")]
    pub c: Option<String>,
    /// Triple-well deformation δ [default: 0].
    #[arg(long)]
    #[serde(default, deserialize_with = "text_opt")]
    pub delta: Option<String>,
    /// Number of minima on a periodic cosine ring; omit for the infinite line.
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub sectors: Option<usize>,
    /// Basis cutoff: Fock truncation M, or plane-wave cutoff for the cosine family.
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub cutoff: Option<usize>,
    /// Working decimal digits (>= 20); overrides TUNNELKIT_DIGITS and the policy.
    #[arg(long)]
    pub digits: Option<u32>,
    /// Output file, written atomically; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Output format [default: csv].
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; affects wall time only.
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Overlays explicit flags on the config file and decodes the result.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: Option<&Value>) -> CliResult<T> {
    let mut base = match file {
        Some(Value::Object(map)) => map.clone(),
        Some(_) => return Err(config_err("config file must hold a JSON object")),
        None => serde_json::Map::new(),
    };
    match serde_json::to_value(flags).map_err(|e| config_err(e.to_string()))? {
        Value::Object(set) => {
            for (k, v) in set {
                if !v.is_null() {
                    base.insert(k, v);
                }
            }
        }
        _ => unreachable!("argument structs serialize to objects"),
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| config_err(format!("config: {e}")))
}

pub fn read_config(path: &Path) -> CliResult<Value> {
    let raw = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&raw).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

pub fn parse_real(text: &str, prec: Precision, what: &str) -> CliResult<BigReal> {
    BigReal::parse(text, prec).map_err(|_| config_err(format!("{what} {text:?} is not a decimal number")))
}

pub fn rough(text: &str, what: &str) -> CliResult<f64> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| config_err(format!("{what} {text:?} is not a decimal number")))
}

pub fn check_digits(d: u32) -> CliResult<u32> {
    if d < 20 {
        return Err(config_err(format!("digits must be at least 20, got {d}")));
    }
    Ok(d)
}

impl Common {
    pub fn family(&self) -> CliResult<Family> {
        self.family.ok_or_else(|| config_err("--family is required"))
    }

    pub fn g_text(&self) -> CliResult<&str> {
        self.g.as_deref().ok_or_else(|| config_err("--g is required"))
    }

    /// Coupling as f64, positive for the multi-well families.
    pub fn g_rough(&self) -> CliResult<f64> {
        let g = rough(self.g_text()?, "coupling")?;
        let ok = match self.family()? {
            Family::Anharmonic => g >= 0.0,
            _ => g > 0.0,
        };
        if !ok {
            return Err(config_err(format!("coupling {g} out of range for {}", self.family()?.label())));
        }
        Ok(g)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    /// Digits from the flag, the config file or the environment.
    pub fn explicit_digits(&self) -> CliResult<Option<u32>> {
        if let Some(d) = self.digits {
            return check_digits(d).map(Some);
        }
        match std::env::var(DIGITS_ENV) {
            Ok(s) => {
                let d = s.trim().parse().map_err(|_| config_err(format!("{DIGITS_ENV}={s:?} is not an integer")))?;
                check_digits(d).map(Some)
            }
            Err(_) => Ok(None),
        }
    }

    pub fn digits_or(&self, policy: u32) -> CliResult<u32> {
        Ok(self.explicit_digits()?.unwrap_or(policy))
    }

    /// Policy digits for the family at this coupling.
    pub fn policy_digits(&self) -> CliResult<u32> {
        let g = self.g_rough()?;
        Ok(match self.family()? {
            Family::Anharmonic => 30,
            Family::DoubleWell => scan_digits(&ScanFamily::DoubleWell, g),
            Family::Cosine => scan_digits(&ScanFamily::CosineRing(self.sectors.unwrap_or(2)), g),
            Family::TripleWell => triple_well_digits(g, true),
        })
    }

    pub fn precision(&self) -> CliResult<Precision> {
        let d = self.digits_or(self.policy_digits()?)?;
        Ok(Precision::new(d)?)
    }

    pub fn spec(&self, prec: Precision) -> CliResult<PotentialSpec> {
        self.g_rough()?;
        let g = parse_real(self.g_text()?, prec, "coupling")?;
        Ok(match self.family()? {
            Family::Anharmonic => PotentialSpec::AnharmonicQuartic {
                eps: parse_real(self.eps.as_deref().unwrap_or("1"), prec, "eps")?,
                g,
                c: parse_real(self.c.as_deref().unwrap_or("0"), prec, "c")?,
            },
            Family::DoubleWell => PotentialSpec::double_well(g),
            Family::TripleWell => {
                PotentialSpec::triple_well(g, parse_real(self.delta.as_deref().unwrap_or("0"), prec, "delta")?)
            }
            Family::Cosine => {
                let boundary = match self.sectors {
                    Some(k) if k < 2 => return Err(config_err(format!("--K must be at least 2, got {k}"))),
                    Some(k) => Boundary::Periodic(k),
                    None => Boundary::InfiniteLine,
                };
                PotentialSpec::cosine(g, boundary)
            }
        })
    }

    pub fn ring(&self) -> CliResult<usize> {
        match self.sectors {
            Some(k) if k >= 2 => Ok(k),
            Some(k) => Err(config_err(format!("--K must be at least 2, got {k}"))),
            None => Err(config_err("the cosine family needs --K here")),
        }
    }

    /// Effective physical parameters for the provenance line.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        if let Some(f) = self.family {
            out.push(("family".into(), f.label().into()));
            if let Some(g) = &self.g {
                out.push(("g".into(), g.clone()));
            }
            match f {
                Family::Anharmonic => {
                    out.push(("eps".into(), self.eps.clone().unwrap_or_else(|| "1".into())));
                    out.push(("c".into(), self.c.clone().unwrap_or_else(|| "0".into())));
                }
                Family::TripleWell => out.push(("delta".into(), self.delta.clone().unwrap_or_else(|| "0".into()))),
                Family::Cosine => {
                    out.push(("K".into(), self.sectors.map_or_else(|| "inf".into(), |k| k.to_string())))
                }
                Family::DoubleWell => {}
            }
        }
        out
    }
}

//! Line-oriented `key = value` configuration files.
//!
//! ```text
//! # Fixture C with a constant sixth root of unity
//! n = 5
//! k = 2
//! self = [-1, -4]
//! family = const unity 1/6
//! resolution = [0, 0]
//! ```
//!
//! Keys: `n`, `k`, `self` (one half of a real cycle, conjugates mirrored),
//! `selfints` (a whole non-real cycle), `family`, `resolution` and `base`
//! (`cycle` or `elliptic`). A cycle base needs exactly one of `self` and
//! `selfints`; an elliptic base takes neither and reads its normal bundle
//! from `family`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

use crate::cycles::{CycleConfig, RealStructure};
use crate::pic0::{PicZeroElement, PicZeroFamily};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    File(String),
}

fn line_err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Line {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseSpec {
    Cycle(CycleConfig),
    /// Smooth elliptic base curve; only `n` is recorded.
    Elliptic {
        n: i64,
    },
}

/// Parsed contents of a configuration file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigFile {
    pub base: BaseSpec,
    pub family: Option<PicZeroFamily>,
    pub resolution: Option<Vec<bool>>,
}

const KEYS: [&str; 7] = ["n", "k", "self", "selfints", "family", "resolution", "base"];

impl ConfigFile {
    pub fn cycle(c: CycleConfig) -> Self {
        Self {
            base: BaseSpec::Cycle(c),
            family: None,
            resolution: None,
        }
    }

    pub fn cycle_config(&self) -> Option<&CycleConfig> {
        match &self.base {
            BaseSpec::Cycle(c) => Some(c),
            BaseSpec::Elliptic { .. } => None,
        }
    }

    pub fn n(&self) -> Option<i64> {
        match &self.base {
            BaseSpec::Cycle(c) => c.stored_n(),
            BaseSpec::Elliptic { n } => Some(*n),
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut seen: Vec<(&str, usize, &str)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(line_err(line, format!("expected `key = value`, found `{content}`")));
            };
            let key = key.trim();
            let value = value.trim();
            let Some(&key) = KEYS.iter().find(|k| **k == key) else {
                return Err(line_err(line, format!("unknown key `{key}`")));
            };
            if let Some((_, first, _)) = seen.iter().find(|(k, _, _)| *k == key) {
                return Err(line_err(
                    line,
                    format!("duplicate key `{key}` (first set on line {first})"),
                ));
            }
            seen.push((key, line, value));
        }
        let get = |key: &str| seen.iter().find(|(k, _, _)| *k == key).map(|&(_, l, v)| (l, v));

        let n = get("n").map(|(l, v)| parse_int(l, v)).transpose()?;
        let k = get("k").map(|(l, v)| parse_int(l, v)).transpose()?;
        let family = get("family").map(|(l, v)| parse_family(l, v)).transpose()?;
        let resolution = get("resolution").map(|(l, v)| parse_bits(l, v)).transpose()?;
        let elliptic = match get("base") {
            None => false,
            Some((_, "cycle")) => false,
            Some((_, "elliptic")) => true,
            Some((l, other)) => {
                return Err(line_err(
                    l,
                    format!("base must be `cycle` or `elliptic`, found `{other}`"),
                ))
            }
        };

        let base = if elliptic {
            for key in ["self", "selfints", "k", "resolution"] {
                if let Some((l, _)) = get(key) {
                    return Err(line_err(l, format!("`{key}` is not allowed with an elliptic base")));
                }
            }
            let n = n.ok_or_else(|| ConfigError::File("elliptic base needs `n`".into()))?;
            BaseSpec::Elliptic { n }
        } else {
            match (get("self"), get("selfints")) {
                (Some(_), Some((l, _))) => return Err(line_err(l, "`self` and `selfints` are mutually exclusive")),
                (None, None) => return Err(ConfigError::File("cycle base needs `self` or `selfints`".into())),
                (Some((l, v)), None) => {
                    let half = parse_list(l, v)?;
                    if let (Some(k), Some((kl, _))) = (k, get("k")) {
                        if k != half.len() as i64 {
                            return Err(line_err(kl, format!("k = {k} but `self` lists {} values", half.len())));
                        }
                    }
                    let mut selfs = half.clone();
                    selfs.extend(&half);
                    BaseSpec::Cycle(CycleConfig::from_parts(selfs, Some(RealStructure { k: half.len() }), n))
                }
                (None, Some((l, v))) => {
                    if let Some((kl, _)) = get("k") {
                        return Err(line_err(kl, "`k` is only meaningful with `self`"));
                    }
                    BaseSpec::Cycle(CycleConfig::from_parts(parse_list(l, v)?, None, n))
                }
            }
        };
        Ok(Self {
            base,
            family,
            resolution,
        })
    }

    /// Canonical text; `parse(render(c)) == c`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        match &self.base {
            BaseSpec::Cycle(c) => {
                if let Some(n) = c.stored_n() {
                    out.push_str(&format!("n = {n}\n"));
                }
                match c.real_structure() {
                    Some(real) => {
                        out.push_str(&format!("k = {}\n", real.k));
                        out.push_str(&format!(
                            "self = {}\n",
                            render_list(&c.self_ints()[..real.k.min(c.m())])
                        ));
                    }
                    None => out.push_str(&format!("selfints = {}\n", render_list(c.self_ints()))),
                }
            }
            BaseSpec::Elliptic { n } => {
                out.push_str(&format!("n = {n}\n"));
                out.push_str("base = elliptic\n");
            }
        }
        if let Some(f) = &self.family {
            out.push_str(&format!("family = {}\n", render_family(f)));
        }
        if let Some(bits) = &self.resolution {
            let v: Vec<i64> = bits.iter().map(|&b| b as i64).collect();
            out.push_str(&format!("resolution = {}\n", render_list(&v)));
        }
        out
    }
}

impl FromStr for ConfigFile {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for ConfigFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn parse_int(line: usize, v: &str) -> Result<i64, ConfigError> {
    v.parse()
        .map_err(|_| line_err(line, format!("expected an integer, found `{v}`")))
}

fn parse_list(line: usize, v: &str) -> Result<Vec<i64>, ConfigError> {
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| line_err(line, format!("expected a bracketed list, found `{v}`")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|x| parse_int(line, x.trim())).collect()
}

fn parse_bits(line: usize, v: &str) -> Result<Vec<bool>, ConfigError> {
    parse_list(line, v)?
        .into_iter()
        .map(|b| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(line_err(line, format!("resolution bits must be 0 or 1, found {other}"))),
        })
        .collect()
}

fn parse_rational(line: usize, v: &str) -> Result<Rational, ConfigError> {
    let bad = || line_err(line, format!("expected a rational p/q, found `{v}`"));
    let (num, den) = match v.split_once('/') {
        Some((a, b)) => (
            a.parse::<BigInt>().map_err(|_| bad())?,
            b.parse::<BigInt>().map_err(|_| bad())?,
        ),
        None => (v.parse::<BigInt>().map_err(|_| bad())?, BigInt::from(1)),
    };
    if den == BigInt::from(0) {
        return Err(line_err(line, "zero denominator"));
    }
    Ok(Rational::new(num, den))
}

fn parse_family(line: usize, v: &str) -> Result<PicZeroFamily, ConfigError> {
    let words: Vec<&str> = v.split_whitespace().collect();
    match words.as_slice() {
        ["nonconstant"] => Ok(PicZeroFamily::nonconstant()),
        ["const", "unity", angle] => Ok(PicZeroFamily::Constant(PicZeroElement::unity(parse_rational(
            line, angle,
        )?))),
        ["const", "modulus", modulus, "angle", angle] => {
            let e = PicZeroElement::new(parse_rational(line, modulus)?, parse_rational(line, angle)?)
                .map_err(|e| line_err(line, e.to_string()))?;
            Ok(PicZeroFamily::Constant(e))
        }
        _ => Err(line_err(
            line,
            format!("family must be `const unity p/q`, `const modulus a/b angle p/q` or `nonconstant`, found `{v}`"),
        )),
    }
}

fn render_list(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn render_family(f: &PicZeroFamily) -> String {
    match f {
        PicZeroFamily::Nonconstant { .. } => "nonconstant".to_string(),
        PicZeroFamily::Constant(e) if e.modulus() == &Rational::from_integer(1.into()) => {
            format!("const unity {}", e.angle())
        }
        PicZeroFamily::Constant(e) => format!("const modulus {} angle {}", e.modulus(), e.angle()),
    }
}

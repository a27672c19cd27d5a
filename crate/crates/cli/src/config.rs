//! `key = value` experiment configs.
//!
//! Keys before the first `scheme = <name>` line are global; scheme keys given
//! there act as defaults for every scheme block. A config without any
//! `scheme` line describes a single scheme named after its variant.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use sha2::{Digest, Sha256};
use spm_core::combinatorics::LabelVector;
use spm_core::selection::Algorithm;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn at(line: usize, message: impl Into<String>) -> Self {
        Self { line: Some(line), message: message.into() }
    }

    pub fn general(message: impl Into<String>) -> Self {
        Self { line: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

type Res<T> = std::result::Result<T, ConfigError>;

const GLOBAL_KEYS: &[&str] = &[
    "seed",
    "snr_start",
    "snr_stop",
    "snr_step",
    "snr",
    "min_errors",
    "max_blocks",
    "draws",
    "output",
    "algorithms",
    "budget",
    "exact_time_ms",
    "n_min",
    "n_max",
    "bound",
    "bound_samples",
    "graph",
];

const SCHEME_KEYS: &[&str] = &[
    "variant",
    "N",
    "K",
    "M",
    "constellation",
    "rotation_slots",
    "qam_parent",
    "selection",
    "pad_to",
    "patterns",
    "active",
    "d",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantName {
    Ofdm,
    Spm,
    Ospm,
    Fspm,
    Ofspm,
    OfdmIm,
    DmOfdmIm,
    MmOfdmIm,
    GdmOfdmIm,
}

impl VariantName {
    fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_lowercase().as_str() {
            "ofdm" => Self::Ofdm,
            "spm" => Self::Spm,
            "ospm" => Self::Ospm,
            "fspm" => Self::Fspm,
            "ofspm" => Self::Ofspm,
            "ofdm-im" => Self::OfdmIm,
            "dm-ofdm-im" => Self::DmOfdmIm,
            "mm-ofdm-im" => Self::MmOfdmIm,
            "gdm-ofdm-im" => Self::GdmOfdmIm,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ofdm => "ofdm",
            Self::Spm => "spm",
            Self::Ospm => "ospm",
            Self::Fspm => "fspm",
            Self::Ofspm => "ofspm",
            Self::OfdmIm => "ofdm-im",
            Self::DmOfdmIm => "dm-ofdm-im",
            Self::MmOfdmIm => "mm-ofdm-im",
            Self::GdmOfdmIm => "gdm-ofdm-im",
        }
    }
}

/// Number of constellations for SPM/OSPM: fixed, or the count maximising
/// the pattern total at each N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KSpec {
    Fixed(usize),
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstellationKind {
    Psk,
    Qam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    None,
    Alg1,
    Alg2,
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec {
    pub name: String,
    pub variant: VariantName,
    /// Not needed by the `rate` table, which sweeps N.
    pub n: Option<usize>,
    pub k: Option<KSpec>,
    pub m: usize,
    pub constellation: ConstellationKind,
    pub rotation_slots: Option<usize>,
    pub qam_parent: usize,
    pub selection: Selection,
    pub pad_to: Option<usize>,
    pub patterns: Option<Vec<LabelVector>>,
    pub active: Option<usize>,
    pub d: Option<usize>,
    /// Line of the `scheme` key (or of `variant` for implicit schemes).
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// SHA-256 of the normalised key/value lines.
    pub hash: String,
    pub seed: u64,
    pub snr_db: Vec<f64>,
    pub min_errors: u64,
    pub max_blocks: u64,
    pub draws: u64,
    pub output: Option<PathBuf>,
    pub algorithms: Vec<Algorithm>,
    pub budget: Option<u64>,
    pub exact_time_ms: u64,
    pub n_min: usize,
    pub n_max: usize,
    pub bound: bool,
    pub bound_samples: u64,
    pub graph: Option<PathBuf>,
    pub schemes: Vec<SchemeSpec>,
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

type Section = BTreeMap<String, Entry>;

fn parse_num<T: std::str::FromStr>(e: &Entry, key: &str) -> Res<T>
where
    T::Err: fmt::Display,
{
    e.value.parse::<T>().map_err(|err| ConfigError::at(e.line, format!("{key}: cannot parse '{}': {err}", e.value)))
}

fn parse_bool(e: &Entry, key: &str) -> Res<bool> {
    match e.value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(ConfigError::at(e.line, format!("{key}: expected true or false, got '{}'", e.value))),
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Parses config text. `seed_override` (from `SPM_SEED`) replaces the seed.
pub fn parse(text: &str, seed_override: Option<u64>) -> Res<Config> {
    let mut global: Section = BTreeMap::new();
    let mut blocks: Vec<(String, usize, Section)> = Vec::new();
    let mut normalised = String::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::at(line, format!("expected key = value, got '{content}'")));
        };
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(ConfigError::at(line, format!("{key}: missing value")));
        }
        normalised.push_str(&format!("{key}={value}\n"));
        if key == "scheme" {
            if !valid_name(value) {
                return Err(ConfigError::at(line, format!("scheme name '{value}' may only use letters, digits, '_', '-', '.'")));
            }
            if blocks.iter().any(|(n, _, _)| n == value) {
                return Err(ConfigError::at(line, format!("duplicate scheme name '{value}'")));
            }
            blocks.push((value.to_string(), line, BTreeMap::new()));
            continue;
        }
        let is_global = GLOBAL_KEYS.contains(&key);
        if !is_global && !SCHEME_KEYS.contains(&key) {
            return Err(ConfigError::at(line, format!("unknown key '{key}'")));
        }
        let section = match blocks.last_mut() {
            Some(_) if is_global => {
                return Err(ConfigError::at(line, format!("'{key}' is a global key and must come before the first scheme")));
            }
            Some((_, _, s)) => s,
            None => &mut global,
        };
        if let Some(prev) = section.get(key) {
            return Err(ConfigError::at(line, format!("'{key}' already set on line {}", prev.line)));
        }
        section.insert(key.to_string(), Entry { line, value: value.to_string() });
    }

    let hash = hex::encode(Sha256::digest(normalised.as_bytes()));
    let get = |k: &str| global.get(k);

    let seed = match (seed_override, get("seed")) {
        (Some(s), _) => s,
        (None, Some(e)) => parse_num(e, "seed")?,
        (None, None) => 1,
    };
    let snr_db = parse_snr(&global)?;
    let min_errors = get("min_errors").map(|e| parse_num(e, "min_errors")).transpose()?.unwrap_or(200);
    let max_blocks: u64 = get("max_blocks").map(|e| parse_num(e, "max_blocks")).transpose()?.unwrap_or(10_000_000);
    if max_blocks == 0 {
        return Err(ConfigError::at(get("max_blocks").unwrap().line, "max_blocks must be positive"));
    }
    let draws: u64 = get("draws").map(|e| parse_num(e, "draws")).transpose()?.unwrap_or(10_000);
    if draws < 2 {
        return Err(ConfigError::at(get("draws").unwrap().line, "draws must be at least 2"));
    }
    let algorithms = match get("algorithms") {
        None => vec![Algorithm::BruteForce, Algorithm::VertexExclusion, Algorithm::Exact],
        Some(e) => e
            .value
            .split(',')
            .map(|a| match a.trim() {
                "alg1" => Ok(Algorithm::BruteForce),
                "alg2" => Ok(Algorithm::VertexExclusion),
                "exact" => Ok(Algorithm::Exact),
                other => Err(ConfigError::at(e.line, format!("algorithms: unknown algorithm '{other}'"))),
            })
            .collect::<Res<Vec<_>>>()?,
    };
    let budget = match get("budget") {
        None => Some(10_000_000),
        Some(e) if e.value == "none" => None,
        Some(e) => Some(parse_num(e, "budget")?),
    };
    let exact_time_ms = get("exact_time_ms").map(|e| parse_num(e, "exact_time_ms")).transpose()?.unwrap_or(60_000);
    let n_min: usize = get("n_min").map(|e| parse_num(e, "n_min")).transpose()?.unwrap_or(2);
    let n_max: usize = get("n_max").map(|e| parse_num(e, "n_max")).transpose()?.unwrap_or(16);
    if n_min == 0 || n_min > n_max {
        return Err(ConfigError::general(format!("need 1 <= n_min <= n_max, got {n_min} and {n_max}")));
    }
    let bound = get("bound").map(|e| parse_bool(e, "bound")).transpose()?.unwrap_or(false);
    let bound_samples: u64 = get("bound_samples").map(|e| parse_num(e, "bound_samples")).transpose()?.unwrap_or(1_000_000);
    let output = get("output").map(|e| PathBuf::from(&e.value));
    let graph = get("graph").map(|e| PathBuf::from(&e.value));

    let schemes = if blocks.is_empty() {
        if SCHEME_KEYS.iter().any(|k| global.contains_key(*k)) {
            let line = global.get("variant").map_or(1, |e| e.line);
            let mut spec = scheme_spec("", line, &global, &BTreeMap::new())?;
            spec.name = spec.variant.as_str().to_string();
            vec![spec]
        } else {
            Vec::new()
        }
    } else {
        blocks
            .iter()
            .map(|(name, line, block)| scheme_spec(name, *line, &global, block))
            .collect::<Res<Vec<_>>>()?
    };

    Ok(Config {
        hash,
        seed,
        snr_db,
        min_errors,
        max_blocks,
        draws,
        output,
        algorithms,
        budget,
        exact_time_ms,
        n_min,
        n_max,
        bound,
        bound_samples,
        graph,
        schemes,
    })
}

fn parse_snr(global: &Section) -> Res<Vec<f64>> {
    if let Some(e) = global.get("snr") {
        let list = e
            .value
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|err| ConfigError::at(e.line, format!("snr: {err}"))))
            .collect::<Res<Vec<f64>>>()?;
        if list.iter().any(|v| !v.is_finite()) {
            return Err(ConfigError::at(e.line, "snr values must be finite"));
        }
        return Ok(list);
    }
    let num = |k: &str, default: f64| -> Res<f64> {
        match global.get(k) {
            Some(e) => {
                let v: f64 = parse_num(e, k)?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(ConfigError::at(e.line, format!("{k} must be finite")))
                }
            }
            None => Ok(default),
        }
    };
    let (start, stop, step) = (num("snr_start", 0.0)?, num("snr_stop", 40.0)?, num("snr_step", 5.0)?);
    if step <= 0.0 {
        let line = global.get("snr_step").map_or(0, |e| e.line);
        return Err(ConfigError::at(line, "snr_step must be positive"));
    }
    if stop < start {
        return Err(ConfigError::general("snr_stop is below snr_start"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn scheme_spec(name: &str, line: usize, global: &Section, block: &Section) -> Res<SchemeSpec> {
    let get = |k: &str| block.get(k).or_else(|| global.get(k));
    let variant_entry =
        get("variant").ok_or_else(|| ConfigError::at(line, format!("scheme '{name}' has no variant")))?;
    let variant = VariantName::parse(&variant_entry.value)
        .ok_or_else(|| ConfigError::at(variant_entry.line, format!("unknown variant '{}'", variant_entry.value)))?;
    let n: Option<usize> = get("N").map(|e| parse_num(e, "N")).transpose()?;
    if n == Some(0) {
        return Err(ConfigError::at(get("N").unwrap().line, "N must be at least 1"));
    }
    let k = match get("K") {
        None => None,
        Some(e) if e.value == "opt" => Some(KSpec::Optimal),
        Some(e) => Some(KSpec::Fixed(parse_num(e, "K")?)),
    };
    if matches!(variant, VariantName::Spm | VariantName::Ospm) && k.is_none() {
        return Err(ConfigError::at(line, format!("scheme '{name}': {} needs K", variant.as_str())));
    }
    let m: usize = get("M").map(|e| parse_num(e, "M")).transpose()?.unwrap_or(2);
    if m < 2 || !m.is_power_of_two() {
        return Err(ConfigError::at(get("M").map_or(line, |e| e.line), format!("M = {m} is not a power of two >= 2")));
    }
    let constellation = match get("constellation") {
        None => ConstellationKind::Psk,
        Some(e) => match e.value.as_str() {
            "psk" => ConstellationKind::Psk,
            "qam" => ConstellationKind::Qam,
            other => return Err(ConfigError::at(e.line, format!("constellation must be psk or qam, got '{other}'"))),
        },
    };
    let rotation_slots = get("rotation_slots").map(|e| parse_num(e, "rotation_slots")).transpose()?;
    let qam_parent = get("qam_parent").map(|e| parse_num(e, "qam_parent")).transpose()?.unwrap_or(16);
    let selection = match get("selection") {
        None => Selection::None,
        Some(e) => match e.value.as_str() {
            "none" => Selection::None,
            "alg1" => Selection::Alg1,
            "alg2" => Selection::Alg2,
            "exact" => Selection::Exact,
            other => {
                return Err(ConfigError::at(e.line, format!("selection must be none, alg1, alg2 or exact, got '{other}'")))
            }
        },
    };
    let pad_to = get("pad_to").map(|e| parse_num(e, "pad_to")).transpose()?;
    let patterns = match get("patterns") {
        None => None,
        Some(e) => Some(
            e.value
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<LabelVector>()
                        .map_err(|err| ConfigError::at(e.line, format!("patterns: '{}': {err}", p.trim())))
                })
                .collect::<Res<Vec<_>>>()?,
        ),
    };
    if patterns.is_some() && selection != Selection::None {
        return Err(ConfigError::at(line, format!("scheme '{name}': explicit patterns cannot be combined with selection")));
    }
    let active = get("active").map(|e| parse_num(e, "active")).transpose()?;
    if variant == VariantName::OfdmIm && active.is_none() {
        return Err(ConfigError::at(line, format!("scheme '{name}': ofdm-im needs active")));
    }
    let d = get("d").map(|e| parse_num(e, "d")).transpose()?;
    Ok(SchemeSpec {
        name: name.to_string(),
        variant,
        n,
        k,
        m,
        constellation,
        rotation_slots,
        qam_parent,
        selection,
        pad_to,
        patterns,
        active,
        d,
        line,
    })
}

//! Run configuration: JSON file merged with command-line flags
//! (flag > file > default) into a fully resolved [`RunConfig`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use gfp_core::criteria::{CriterionKind, Runtime};
use gfp_core::kernels::{builtin, ModelDescriptor};
use gfp_core::oracles::Proposal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A model given by built-in name or by full descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelRef {
    Name(String),
    Descriptor(ModelDescriptor),
}

impl ModelRef {
    pub fn resolve(&self) -> Result<ModelDescriptor, CliError> {
        match self {
            ModelRef::Name(n) => builtin(n).map_err(|e| CliError::Config(format!("model: {e}"))),
            ModelRef::Descriptor(d) => Ok(d.clone()),
        }
    }
}

/// A grid as written in a file: a number, a list of numbers, or grid text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    One(f64),
    List(Vec<f64>),
    Text(String),
}

impl GridSpec {
    fn text(&self) -> String {
        match self {
            GridSpec::One(x) => x.to_string(),
            GridSpec::List(v) => v.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
            GridSpec::Text(s) => s.clone(),
        }
    }
}

/// Configuration file contents; every field optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<ModelRef>,
    pub criteria: Option<Vec<String>>,
    pub q: Option<GridSpec>,
    pub m: Option<GridSpec>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub usq_order: Option<u64>,
    pub ld_degree: Option<usize>,
    pub ld_samples: Option<u64>,
    /// Monte Carlo sample count for the kernel oracles.
    pub samples: Option<u64>,
    pub proposal: Option<Proposal>,
    pub scenario: Option<String>,
    /// Overrides for scenario constants.
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
    /// Random models in the check suite.
    pub harness_cases: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }
}

/// Command-line values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub criteria: Option<String>,
    pub q: Option<String>,
    pub m: Option<String>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub scenario: Option<String>,
}

/// Defaults that differ between commands.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub criteria: &'static str,
    pub q: &'static str,
    pub m: &'static str,
}

pub const POINT_DEFAULTS: Defaults = Defaults {
    criteria: "gfp",
    q: "4",
    m: "4",
};

pub const SWEEP_DEFAULTS: Defaults = Defaults {
    criteria: "gfp",
    q: "2:1024:10",
    m: "1:1000:10",
};

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub model: Option<ModelDescriptor>,
    pub criteria: Vec<CriterionKind>,
    pub q: Vec<Runtime>,
    pub m: Vec<u64>,
    pub epsilon: f64,
    pub seed: u64,
    pub usq_order: u64,
    pub ld_degree: Option<usize>,
    pub ld_samples: Option<u64>,
    pub samples: u64,
    pub proposal: Option<Proposal>,
    pub scenario: Option<String>,
    pub constants: BTreeMap<String, f64>,
    pub harness_cases: u64,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(file: FileConfig, cli: Overrides, defaults: Defaults) -> Result<Self, CliError> {
        let model = match (cli.model, file.model) {
            (Some(name), _) => Some(ModelRef::Name(name).resolve()?),
            (None, Some(r)) => Some(r.resolve()?),
            (None, None) => None,
        };
        let criteria_text = cli.criteria.or_else(|| file.criteria.map(|v| v.join(",")));
        let criteria = parse_criteria(criteria_text.as_deref().unwrap_or(defaults.criteria))?;
        let q_text = cli.q.or_else(|| file.q.map(|g| g.text()));
        let q = parse_q_grid(q_text.as_deref().unwrap_or(defaults.q))?;
        let m_text = cli.m.or_else(|| file.m.map(|g| g.text()));
        let m = parse_m_grid(m_text.as_deref().unwrap_or(defaults.m))?;
        let epsilon = cli.epsilon.or(file.epsilon).unwrap_or(0.1);
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(CliError::Config(format!("epsilon must be finite and nonnegative, got {epsilon}")));
        }
        let usq_order = file.usq_order.unwrap_or(2);
        if usq_order == 0 || usq_order % 2 == 1 {
            return Err(CliError::Config(format!("usq_order must be positive and even, got {usq_order}")));
        }
        let samples = file.samples.unwrap_or(1_000_000);
        if samples == 0 {
            return Err(CliError::Config("samples must be positive".into()));
        }
        Ok(RunConfig {
            model,
            criteria,
            q,
            m,
            epsilon,
            seed: cli.seed.or(file.seed).unwrap_or(0),
            usq_order,
            ld_degree: file.ld_degree,
            ld_samples: file.ld_samples,
            samples,
            proposal: file.proposal,
            scenario: cli.scenario.or(file.scenario),
            constants: file.constants,
            harness_cases: file.harness_cases.unwrap_or(100),
            format: cli.format.or(file.format).unwrap_or_default(),
            out: cli.out.or(file.out),
        })
    }

    pub fn require_model(&self) -> Result<&ModelDescriptor, CliError> {
        self.model
            .as_ref()
            .ok_or_else(|| CliError::Config("no model given (use --model NAME or a config file)".into()))
    }

    /// SHA-256 of the resolved configuration, excluding output format and
    /// destination.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn parse_criteria(text: &str) -> Result<Vec<CriterionKind>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part == "all" {
            out.extend(CriterionKind::ALL);
            continue;
        }
        let c = part
            .parse::<CriterionKind>()
            .map_err(|e| CliError::Config(format!("criterion: {e}")))?;
        out.push(c);
    }
    if out.is_empty() {
        return Err(CliError::Config("criterion list is empty".into()));
    }
    let mut seen = Vec::new();
    out.retain(|c| {
        let fresh = !seen.contains(c);
        seen.push(*c);
        fresh
    });
    Ok(out)
}

/// One endpoint or point of a `q` grid: a number or `e^X`. Returns `ln q`.
fn parse_ln_q(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let bad = || CliError::Config(format!("q: cannot parse '{s}' (expected a number or e^X)"));
    let ln = if let Some(x) = s.strip_prefix("e^") {
        x.parse::<f64>().map_err(|_| bad())?
    } else {
        let q = s.parse::<f64>().map_err(|_| bad())?;
        if !(q > 0.0) {
            return Err(CliError::Config(format!("q must be positive, got {s}")));
        }
        q.ln()
    };
    if !ln.is_finite() {
        return Err(bad());
    }
    Ok(ln)
}

/// `a:b:n` is `n` log-spaced points from `a` to `b` inclusive.
fn expand(text: &str, point: impl Fn(&str) -> Result<f64, CliError>) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let pieces: Vec<&str> = part.split(':').collect();
        match pieces.as_slice() {
            [one] => out.push(point(one)?),
            [a, b, n] => {
                let (a, b) = (point(a)?, point(b)?);
                let n: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("range '{part}': count must be a positive integer")))?;
                if n == 0 {
                    return Err(CliError::Config(format!("range '{part}': count must be positive")));
                }
                if n == 1 {
                    out.push(a);
                } else {
                    out.extend((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64));
                }
            }
            _ => return Err(CliError::Config(format!("cannot parse grid entry '{part}' (use x or a:b:n)"))),
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("grid is empty".into()));
    }
    Ok(out)
}

pub fn parse_q_grid(text: &str) -> Result<Vec<Runtime>, CliError> {
    expand(text, parse_ln_q)?
        .into_iter()
        .map(|ln| Runtime::from_ln_q(ln).map_err(|_| CliError::Config(format!("q must be at least 1, got e^{ln}"))))
        .collect()
}

pub fn parse_m_grid(text: &str) -> Result<Vec<u64>, CliError> {
    let lns = expand(text, |s| {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("m: cannot parse '{s}'")))?;
        if !(v >= 1.0 && v.is_finite()) {
            return Err(CliError::Config(format!("m must be at least 1, got {s}")));
        }
        Ok(v.ln())
    })?;
    let mut out: Vec<u64> = Vec::new();
    for ln in lns {
        let m = ln.exp().round() as u64;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let q = parse_q_grid("2:32:5").unwrap();
        let qs: Vec<f64> = q.iter().map(|r| r.q()).collect();
        for (got, want) in qs.iter().zip([2.0, 4.0, 8.0, 16.0, 32.0]) {
            assert!((got - want).abs() < 1e-9 * want);
        }
        assert_eq!(parse_q_grid("e^20").unwrap()[0].ln_q, 20.0);
        assert_eq!(parse_m_grid("1:100:3,7,10").unwrap(), vec![1, 10, 100, 7]);
        assert!(parse_m_grid("0").is_err());
        assert!(parse_q_grid("0.5").is_err());
        assert!(parse_q_grid("").is_err());
    }

    #[test]
    fn precedence_and_hash() {
        let file: FileConfig = serde_json::from_str(r#"{"model":"mslr","q":[4,8],"epsilon":0.5,"seed":3}"#).unwrap();
        let cli = Overrides {
            epsilon: Some(0.2),
            ..Default::default()
        };
        let a = RunConfig::resolve(file.clone(), cli, POINT_DEFAULTS).unwrap();
        assert_eq!(a.epsilon, 0.2);
        assert_eq!(a.seed, 3);
        assert_eq!(a.q.len(), 2);
        assert_eq!(a.m, vec![4]);
        let b = RunConfig::resolve(file.clone(), Overrides::default(), POINT_DEFAULTS).unwrap();
        assert_ne!(a.hash(), b.hash());
        let c = RunConfig::resolve(
            file,
            Overrides {
                format: Some(Format::Json),
                ..Default::default()
            },
            POINT_DEFAULTS,
        )
        .unwrap();
        assert_eq!(b.hash(), c.hash());
        let err = serde_json::from_str::<FileConfig>(r#"{"modle":"x"}"#);
        assert!(err.is_err());
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::overlap_laws::ThresholdResult;

/// Proxy runtime `q`, stored as `ln q` so that `q = e^{D/2}` for large `D`
/// stays representable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Runtime {
    pub ln_q: f64,
}

impl Runtime {
    pub fn from_q(q: f64) -> Result<Self> {
        if !(q >= 1.0 && q.is_finite()) {
            return Err(arg(format!("q must be a finite number ≥ 1, got {q}")));
        }
        Ok(Runtime { ln_q: q.ln() })
    }

    pub fn from_ln_q(ln_q: f64) -> Result<Self> {
        if !(ln_q >= 0.0 && ln_q.is_finite()) {
            return Err(arg(format!("ln q must be finite and nonnegative, got {ln_q}")));
        }
        Ok(Runtime { ln_q })
    }

    pub fn q(self) -> f64 {
        self.ln_q.exp()
    }

    /// `q⁻²`, the mass of the atypical region.
    pub fn inv_q2(self) -> f64 {
        (-2.0 * self.ln_q).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    Fp,
    Gfp,
    RhoFp,
    Sq,
    Usq,
    Ld,
    Chi2,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 7] = [
        CriterionKind::Fp,
        CriterionKind::Gfp,
        CriterionKind::RhoFp,
        CriterionKind::Sq,
        CriterionKind::Usq,
        CriterionKind::Ld,
        CriterionKind::Chi2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CriterionKind::Fp => "fp",
            CriterionKind::Gfp => "gfp",
            CriterionKind::RhoFp => "rho_fp",
            CriterionKind::Sq => "sq",
            CriterionKind::Usq => "usq",
            CriterionKind::Ld => "ld",
            CriterionKind::Chi2 => "chi2",
        }
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        CriterionKind::ALL
            .into_iter()
            .find(|c| c.as_str() == key || (key == "rho" && *c == CriterionKind::RhoFp))
            .ok_or_else(|| arg(format!("unknown criterion '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Hard,
    NotHard,
    PremiseFailed,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Hard => "hard",
            Verdict::NotHard => "not-hard",
            Verdict::PremiseFailed => "premise-failed",
        })
    }
}

/// How a value was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Method {
    /// Exact weighted sum over the atoms of a discrete law.
    ExactSum,
    /// Exact event optimization (dynamic program over orbit atoms).
    ExactDp,
    /// Greedy feasible event with a fractional lower bracket.
    GreedyBracket,
    /// Adaptive quadrature against a continuous law.
    Quadrature,
    MonteCarlo { seed: u64, samples: u64 },
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::ExactSum => f.write_str("exact-sum"),
            Method::ExactDp => f.write_str("exact-dp"),
            Method::GreedyBracket => f.write_str("greedy-bracket"),
            Method::Quadrature => f.write_str("quadrature"),
            Method::MonteCarlo { seed, samples } => write!(f, "monte-carlo(seed={seed};n={samples})"),
        }
    }
}

/// Result of one criterion evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub model: String,
    pub criterion: CriterionKind,
    pub ln_q: Option<f64>,
    pub m: Option<u64>,
    pub epsilon: Option<f64>,
    /// Moment order for USQ, sample count `k` for LD.
    pub order: Option<u64>,
    /// Per-sample degree for LD (`None` is unbounded).
    pub degree: Option<usize>,
    pub threshold: Option<ThresholdResult>,
    /// Prior mass of the event the value integrates over.
    pub event_mass: Option<f64>,
    pub value: f64,
    /// `ln value` for nonnegative values; finite even when `value` overflows.
    pub ln_value: f64,
    pub verdict: Verdict,
    pub method: Method,
    pub error_bound: f64,
    /// Certified `[lower, upper]` enclosure of the exact optimum, when the
    /// reported value is not itself exact.
    pub bracket: Option<(f64, f64)>,
    pub notes: Vec<String>,
}

impl CriterionReport {
    pub fn q(&self) -> Option<f64> {
        self.ln_q.map(f64::exp)
    }

    /// `ln value > 700`: emit the log instead of the value.
    pub fn overflowed(&self) -> bool {
        self.ln_value > 700.0
    }
}

pub(crate) fn verdict_le(value: f64, bound: f64) -> Verdict {
    if value <= bound {
        Verdict::Hard
    } else {
        Verdict::NotHard
    }
}

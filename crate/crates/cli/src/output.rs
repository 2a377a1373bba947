//! CSV and JSON reports. Every report starts with metadata (tool version,
//! command, config hash, seed); CSV carries it as `#` comment lines. No
//! timestamps are written, so identical runs give identical bytes.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use gfp_core::criteria::CriterionReport;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// Values whose natural log exceeds this are written as their log.
pub const OVERFLOW_LN: f64 = 700.0;

/// A reported number: finite, or `overflow:L` meaning `e^L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Num {
    Value(f64),
    OverflowLn(f64),
}

impl Num {
    pub fn from_ln(value: f64, ln: f64) -> Self {
        if ln > OVERFLOW_LN {
            Num::OverflowLn(ln)
        } else {
            Num::Value(value)
        }
    }

    /// Natural log (`−∞` at zero, NaN for negative values).
    pub fn ln(self) -> f64 {
        match self {
            Num::Value(v) => v.ln(),
            Num::OverflowLn(l) => l,
        }
    }
}

fn fmt_f64(x: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    // shortest round-trip digits either way
    if x == 0.0 || (1e-5..1e16).contains(&x.abs()) {
        write!(f, "{x}")
    } else {
        write!(f, "{x:e}")
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Num::Value(v) => fmt_f64(v, f),
            Num::OverflowLn(l) => {
                f.write_str("overflow:")?;
                fmt_f64(l, f)
            }
        }
    }
}

impl FromStr for Num {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.parse::<f64>().map_err(|e| format!("bad number '{s}': {e}"));
        match s.strip_prefix("overflow:") {
            Some(l) => Ok(Num::OverflowLn(parse(l)?)),
            None => Ok(Num::Value(parse(s)?)),
        }
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Num::Value(v) => s.serialize_f64(v),
            Num::OverflowLn(_) => s.collect_str(self),
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or overflow:LN")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Num, E> {
                s.parse().map_err(E::custom)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Ok(Num::Value(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num::Value(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num::Value(v as f64))
            }
        }
        d.deserialize_any(V)
    }
}

/// One criterion evaluation, in the report schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub model: String,
    pub criterion: String,
    pub q: Option<Num>,
    pub m: Option<u64>,
    pub epsilon: Option<f64>,
    pub threshold: Option<f64>,
    pub achieved_mass: Option<f64>,
    pub value: Num,
    pub verdict: String,
    pub method: String,
    pub error_bound: f64,
}

/// `q` to 12 significant digits, so that `e^{ln 4}` prints as 4.
fn tidy(q: f64) -> f64 {
    format!("{q:.11e}").parse().unwrap_or(q)
}

impl From<&CriterionReport> for Row {
    fn from(r: &CriterionReport) -> Self {
        Row {
            model: r.model.clone(),
            criterion: r.criterion.to_string(),
            q: r.ln_q.map(|l| Num::from_ln(tidy(l.exp()), l)),
            m: r.m,
            epsilon: r.epsilon,
            threshold: r.threshold.map(|t| t.threshold),
            achieved_mass: r.threshold.map(|t| t.achieved_mass).or(r.event_mass),
            value: Num::from_ln(r.value, r.ln_value),
            verdict: r.verdict.to_string(),
            method: r.method.to_string(),
            error_bound: r.error_bound,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    /// Extra `key: value` lines (scenario constants, notes).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Metadata {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        Metadata {
            tool: "gfp".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_hash: cfg.hash(),
            seed: cfg.seed,
            notes: Vec::new(),
        }
    }
}

/// Writes a report to `--out` or stdout. `extra` adds top-level JSON
/// sections; in CSV they become comment lines.
pub fn emit<T: Serialize>(
    cfg: &RunConfig,
    meta: &Metadata,
    rows: &[T],
    extra: &[(&str, serde_json::Value)],
) -> Result<(), CliError> {
    let mut buf: Vec<u8> = Vec::new();
    match cfg.format {
        Format::Csv => {
            writeln!(buf, "# tool: {} {}", meta.tool, meta.version)?;
            writeln!(buf, "# command: {}", meta.command)?;
            writeln!(buf, "# config_hash: {}", meta.config_hash)?;
            writeln!(buf, "# seed: {}", meta.seed)?;
            for n in &meta.notes {
                writeln!(buf, "# {n}")?;
            }
            for (key, value) in extra {
                match value {
                    serde_json::Value::Array(items) => {
                        for item in items {
                            writeln!(buf, "# {key}: {}", serde_json::to_string(item)?)?;
                        }
                    }
                    other => writeln!(buf, "# {key}: {}", serde_json::to_string(other)?)?,
                }
            }
            let mut w = csv::Writer::from_writer(&mut buf);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("metadata".into(), serde_json::to_value(meta)?);
            for (key, value) in extra {
                obj.insert((*key).into(), value.clone());
            }
            obj.insert("rows".into(), serde_json::to_value(rows)?);
            serde_json::to_writer_pretty(&mut buf, &obj)?;
            buf.push(b'\n');
        }
    }
    match &cfg.out {
        Some(path) => std::fs::write(path, &buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

/// Parses rows back from CSV report text.
#[cfg(test)]
pub fn read_csv_rows<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, CliError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(CliError::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn num_round_trip() {
        for n in [
            Num::Value(0.0),
            Num::Value(1.0 / 3.0),
            Num::Value(1e300),
            Num::Value(2.5e-9),
            Num::OverflowLn(1234.5678),
        ] {
            let s = n.to_string();
            assert_eq!(s.parse::<Num>().unwrap(), n, "{s}");
        }
        assert_eq!(Num::from_ln(f64::INFINITY, 800.0).to_string(), "overflow:800");
        assert_eq!(tidy(4f64.ln().exp()), 4.0);
    }

    #[test]
    fn rows_round_trip_through_csv() {
        let rows = vec![
            Row {
                model: "a".into(),
                criterion: "fp".into(),
                q: Some(Num::Value(4.0)),
                m: Some(3),
                epsilon: Some(0.1),
                threshold: Some(0.125),
                achieved_mass: Some(0.0625),
                value: Num::Value(1.0 + 1e-13),
                verdict: "hard".into(),
                method: "exact-sum".into(),
                error_bound: 0.0,
            },
            Row {
                model: "b".into(),
                criterion: "chi2".into(),
                q: None,
                m: Some(10),
                epsilon: Some(0.0),
                threshold: None,
                achieved_mass: None,
                value: Num::OverflowLn(812.25),
                verdict: "not-hard".into(),
                method: "quadrature".into(),
                error_bound: 3.2e-14,
            },
        ];
        let mut buf = Vec::new();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            for r in &rows {
                w.serialize(r).unwrap();
            }
        }
        let text = format!("# comment\n{}", String::from_utf8(buf).unwrap());
        let back: Vec<Row> = read_csv_rows(&text).unwrap();
        assert_eq!(back, rows);
    }
}

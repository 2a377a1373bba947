//! `gfp check`: the correlation assumption on every built-in, the randomized
//! equivalence harness, the GAM and binomial-ratio side conditions and the
//! LD/χ² identity.

use gfp_core::criteria::{
    assumption_holds, check_equivalence_bounds, chi_squared, ld_samplewise, random_harness_case,
    CheckStatus, Runtime, ASSUMPTION_TOL,
};
use gfp_core::kernels::{builtin_models, GroupSpec, KernelSpec, ModelDescriptor, ModelSpec};
use gfp_core::overlap_laws::LawSpec;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;

const ASSUMPTION_K_MAX: u32 = 10;
const HARNESS_ATOMS: usize = 10;
const LD_TOL: f64 = 1e-10;
const LD_SAMPLES: [u64; 3] = [1, 10, 100];
const BINOMIAL_N_MAX: u64 = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub property: String,
    pub subject: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
    pub detail: String,
}

fn row(property: &str, subject: impl Into<String>, value: f64, bound: f64, pass: bool, detail: String) -> CheckRow {
    CheckRow {
        property: property.into(),
        subject: subject.into(),
        value,
        bound,
        pass,
        detail,
    }
}

fn assumption_row(model: &ModelSpec, property: &str) -> Result<CheckRow, CliError> {
    let a = assumption_holds(model, ASSUMPTION_K_MAX)?;
    let detail = match a.witness {
        Some((s, k)) => format!("minimum at t={s}, k={k}"),
        None => format!("k<={ASSUMPTION_K_MAX}, {} points skipped", a.skipped),
    };
    Ok(row(property, model.name.clone(), a.min, -ASSUMPTION_TOL, a.holds, detail))
}

/// Pairs `(n, t)` with `(t+1)(n−t+1) > 4t(n−t)`, `1 ≤ t ≤ n−1`, in exact
/// integer arithmetic.
fn binomial_ratio_failures(n_max: u64) -> Vec<(u64, u64)> {
    let mut bad = Vec::new();
    for n in 2..=n_max {
        for t in 1..n {
            if (t + 1) * (n - t + 1) > 4 * t * (n - t) {
                bad.push((n, t));
            }
        }
    }
    bad
}

/// Degree-one samplewise LD norm against `1 + m·χ²` of a single sample.
fn ld_rows(model: &ModelSpec, out: &mut Vec<CheckRow>) -> Result<(), CliError> {
    let chi1 = chi_squared(model, 1)?;
    for m in LD_SAMPLES {
        let ld = ld_samplewise(model, m, None, 1)?;
        let expect = 1.0 + m as f64 * chi1;
        let rel = (ld - expect).abs() / expect.abs();
        out.push(row(
            "ld-chi2-identity",
            format!("{} m={m}", model.name),
            rel,
            LD_TOL,
            rel <= LD_TOL,
            format!("ld={ld:e} 1+m*chi2={expect:e}"),
        ));
    }
    Ok(())
}

pub fn run(cfg: &RunConfig) -> Result<Vec<CheckRow>, CliError> {
    let mut out = Vec::new();
    let builtins: Vec<ModelSpec> = builtin_models()
        .iter()
        .map(|d| d.build())
        .collect::<Result<_, _>>()?;

    for m in &builtins {
        out.push(assumption_row(m, "correlation-assumption")?);
    }

    for seed in 0..cfg.harness_cases {
        let case = random_harness_case(seed, HARNESS_ATOMS)?;
        let rep = check_equivalence_bounds(&case.model, case.runtime, case.m, cfg.epsilon)?;
        let v = rep.violations();
        let premise = rep.checks.iter().filter(|c| c.status == CheckStatus::PremiseFailed).count();
        out.push(row(
            "equivalence-harness",
            format!("seed={seed}"),
            v as f64,
            0.0,
            v == 0,
            format!("q={} m={} checks={} premise-failed={premise}", case.runtime.q(), case.m, rep.checks.len()),
        ));
    }

    for i in 1..=20 {
        let lambda = f64::from(i) / 10.0;
        let model = ModelDescriptor {
            name: format!("gam lambda={lambda}"),
            kernel: KernelSpec::Gam { lambda },
            law: LawSpec::Sphere { n: 50 },
            group: GroupSpec::SignFlip,
        }
        .build()?;
        out.push(assumption_row(&model, "gam-assumption")?);
    }

    let bad = binomial_ratio_failures(BINOMIAL_N_MAX);
    out.push(row(
        "binomial-ratio",
        format!("2<=n<={BINOMIAL_N_MAX}"),
        bad.len() as f64,
        0.0,
        bad.is_empty(),
        match bad.first() {
            Some((n, t)) => format!("first failure at n={n}, t={t}"),
            None => "(t+1)(n-t+1) <= 4t(n-t) for all 1<=t<n".into(),
        },
    ));

    for m in &builtins {
        ld_rows(m, &mut out)?;
    }

    if let Some(d) = &cfg.model {
        let model = d.build()?;
        out.push(assumption_row(&model, "correlation-assumption")?);
        for &rt in &cfg.q {
            for &m in &cfg.m {
                let rep = check_equivalence_bounds(&model, rt, m, cfg.epsilon)?;
                for c in &rep.checks {
                    out.push(row(
                        &format!("equivalence {}", c.name),
                        format!("{} q={} m={m}", model.name, Runtime::q(rt)),
                        c.lhs,
                        c.rhs,
                        c.status != CheckStatus::Violated,
                        format!("{:?} {}", c.status, c.note).trim().to_string(),
                    ));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_ratio_holds_in_range() {
        assert!(binomial_ratio_failures(BINOMIAL_N_MAX).is_empty());
        // n = 1 has no interior t; n = 2 is the tight case
        assert_eq!((1 + 1) * (2 - 1 + 1), 4 * (2 - 1));
    }
}

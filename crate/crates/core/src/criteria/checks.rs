use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{chi_squared, gfp_value, r_of_q, rho_fp_value, sq_value, Runtime};
use crate::error::{arg, Result};
use crate::kernels::{group_avg_check, rho_g, GroupSpec, ModelSpec, SyntheticAtom};
use crate::overlap_laws::{OverlapLaw, Statistic};

/// Negative values down to this are treated as rounding.
pub const ASSUMPTION_TOL: f64 = 1e-12;
const SPHERE_GRID: usize = 4000;

/// Minimum of the orbit-averaged `(K − 1)^k` over the statistic domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub model: String,
    pub k_max: u32,
    pub min: f64,
    /// `(statistic, k)` where the minimum is attained, when it is negative.
    pub witness: Option<(Statistic, u32)>,
    /// Law-weighted negative part `E[min(0, avg (K−1)^k)]`, smallest over `k`
    /// (continuous laws only; catches dips between grid points).
    pub negative_part: Option<f64>,
    /// Points where the kernel could not be evaluated (singular endpoints).
    pub skipped: usize,
    pub holds: bool,
}

pub fn assumption_holds(model: &ModelSpec, k_max: u32) -> Result<AssumptionReport> {
    if k_max == 0 {
        return Err(arg("k_max must be positive"));
    }
    let kernel = &*model.kernel;
    let group = model.group;
    let points: Vec<Statistic> = match &*model.law {
        OverlapLaw::Discrete(_) => model
            .law
            .atoms()
            .unwrap_or(&[])
            .iter()
            .filter(|a| a.prob > 0.0)
            .map(|a| a.stat)
            .collect(),
        OverlapLaw::Sphere(_) => (0..=SPHERE_GRID)
            .map(|i| Statistic::Scalar(-1.0 + 2.0 * i as f64 / SPHERE_GRID as f64))
            .collect(),
    };
    let mut min = f64::INFINITY;
    let mut at = None;
    let mut skipped = 0;
    for &s in &points {
        for k in 1..=k_max {
            match group_avg_check(kernel, group, s, k) {
                Ok(v) if !v.is_nan() => {
                    if v < min {
                        min = v;
                        at = Some((s, k));
                    }
                }
                _ => {
                    skipped += 1;
                    break;
                }
            }
        }
    }
    let negative_part = if model.law.is_discrete() {
        None
    } else {
        let mut worst: f64 = 0.0;
        for k in 1..=k_max {
            let v = model.law.expect(|s| match group_avg_check(kernel, group, s, k) {
                Ok(v) if v.is_finite() => v.min(0.0),
                _ => 0.0,
            })?;
            worst = worst.min(v);
        }
        Some(worst)
    };
    let holds = min >= -ASSUMPTION_TOL && negative_part.is_none_or(|v| v >= -ASSUMPTION_TOL);
    Ok(AssumptionReport {
        model: model.name.clone(),
        k_max,
        min,
        witness: if min < 0.0 { at } else { None },
        negative_part,
        skipped,
        holds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Holds,
    Violated,
    /// The implication's premise is false, so nothing is asserted.
    Vacuous,
    /// The exact-mass condition the inequality needs does not hold.
    PremiseFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub status: CheckStatus,
    pub lhs: f64,
    pub rhs: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub model: String,
    pub ln_q: f64,
    pub m: u64,
    pub checks: Vec<InequalityCheck>,
}

impl EquivalenceReport {
    pub fn violations(&self) -> usize {
        self.checks.iter().filter(|c| c.status == CheckStatus::Violated).count()
    }
}

/// Relative slack for comparing two separately rounded evaluations.
fn le(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + 1e-10 * rhs.abs().max(1.0)
}

fn status(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Holds
    } else {
        CheckStatus::Violated
    }
}

/// Numerical checks of the SQ/ρ_G-FP and GFP/ρ_G-FP comparison inequalities.
///
/// (a) `SQ(q) ≤ 1/m ⇒ ρ_G-FP(q′, m′) ≤ 1 + e·|G|·m′/m`, `q′ = ⌊q/√2⌋ − 1`, `m′ = ⌊m/2⌋`.
/// (b) `GFP(q, m) ≤ ρ_G-FP(q, m)`.
/// (c) for even `m`, with the exact-mass premise:
///     `ρ_G-FP − P(ρ_G < r) ≤ 3|G|·(GFP − P(A*)) + m·χ²`.
pub fn check_equivalence_bounds(model: &ModelSpec, rt: Runtime, m: u64, eps: f64) -> Result<EquivalenceReport> {
    let g = model.group.order() as f64;
    let mut checks = Vec::new();

    let sq = sq_value(model, rt, Some(m))?;
    let q_prime = (rt.q() / std::f64::consts::SQRT_2).floor() - 1.0;
    let m_prime = m / 2;
    let bound_a = 1.0 + std::f64::consts::E * g * m_prime as f64 / m as f64;
    if sq.value > 1.0 / m as f64 {
        checks.push(InequalityCheck {
            name: "sq-implies-rho-fp".into(),
            status: CheckStatus::Vacuous,
            lhs: sq.value,
            rhs: 1.0 / m as f64,
            note: "SQ premise fails".into(),
        });
    } else if q_prime < 1.0 || m_prime < 1 {
        checks.push(InequalityCheck {
            name: "sq-implies-rho-fp".into(),
            status: CheckStatus::Vacuous,
            lhs: f64::NAN,
            rhs: bound_a,
            note: format!("q' = {q_prime}, m' = {m_prime}: no admissible reduced parameters"),
        });
    } else {
        let r = rho_fp_value(model, Runtime::from_q(q_prime)?, m_prime, eps)?;
        checks.push(InequalityCheck {
            name: "sq-implies-rho-fp".into(),
            status: status(le(r.value, bound_a)),
            lhs: r.value,
            rhs: bound_a,
            note: format!("q' = {q_prime}, m' = {m_prime}"),
        });
    }

    let gfp = gfp_value(model, rt, m, eps)?;
    let rho = rho_fp_value(model, rt, m, eps)?;
    let premise = rho.threshold.is_some_and(|t| t.exact);
    // a non-exact bracket is judged by its certified lower end
    let gfp_low = gfp.bracket.map_or(gfp.value, |b| b.0);
    let ok_b = le(gfp_low, rho.value);
    checks.push(InequalityCheck {
        name: "gfp-le-rho-fp".into(),
        status: match (ok_b, premise) {
            (true, _) => CheckStatus::Holds,
            (false, true) => CheckStatus::Violated,
            (false, false) => CheckStatus::PremiseFailed,
        },
        lhs: gfp.value,
        rhs: rho.value,
        note: if premise {
            String::new()
        } else {
            "r(q) does not cut mass q^-2 exactly".into()
        },
    });

    let gfp_mass = gfp.event_mass.unwrap_or(f64::NAN);
    let target = 1.0 - rt.inv_q2();
    let tight_mass = (gfp_mass - target).abs() <= 1e-9;
    if m % 2 == 1 {
        checks.push(InequalityCheck {
            name: "rho-fp-le-gfp".into(),
            status: CheckStatus::Vacuous,
            lhs: rho.value,
            rhs: f64::NAN,
            note: "needs even m".into(),
        });
    } else if !premise || !tight_mass {
        checks.push(InequalityCheck {
            name: "rho-fp-le-gfp".into(),
            status: CheckStatus::PremiseFailed,
            lhs: rho.value,
            rhs: f64::NAN,
            note: format!("exact-mass premise fails (optimal event mass {gfp_mass}, want {target})"),
        });
    } else {
        let chi = chi_squared(model, 1)?;
        let rho_mass = rho.event_mass.unwrap_or(f64::NAN);
        let lhs = rho.value - rho_mass;
        let rhs = 3.0 * g * (gfp.value - gfp_mass) + m as f64 * chi;
        checks.push(InequalityCheck {
            name: "rho-fp-le-gfp".into(),
            status: status(le(lhs, rhs)),
            lhs,
            rhs,
            note: "centered form: E[(K^m-1)1(rho<r)] <= 3|G| E[(K^m-1)1(A*)] + m chi2".into(),
        });
    }

    Ok(EquivalenceReport {
        model: model.name.clone(),
        ln_q: rt.ln_q,
        m,
        checks,
    })
}

/// One randomized instance for the equivalence harness.
#[derive(Debug, Clone)]
pub struct HarnessCase {
    pub model: ModelSpec,
    pub runtime: Runtime,
    pub m: u64,
}

/// Random discrete model with `num_atoms` atoms, trivial group and `K ≥ 1`
/// (so the correlation assumption holds), plus `(q, m)`.
///
/// `q⁻²` is set to the exact upper-tail mass of `ρ_G` at a random level, so
/// the exact-mass premise of the comparison inequalities holds. Kernel
/// deviations span several decades so that both SQ outcomes occur.
pub fn random_harness_case(seed: u64, num_atoms: usize) -> Result<HarnessCase> {
    if num_atoms < 2 {
        return Err(arg("need at least two atoms"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..num_atoms).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
    let total: f64 = weights.iter().sum();
    let scale = 10f64.powf(rng.gen_range(-4.0..0.5));
    let atoms: Vec<SyntheticAtom> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| SyntheticAtom {
            stat: i as f64,
            prob: w / total,
            kernel: 1.0 + scale * rng.gen::<f64>().powi(2),
        })
        .collect();
    let model = ModelSpec::synthetic(&format!("random-{seed}"), &atoms, GroupSpec::Trivial)?;

    // upper tails of ρ_G, largest level first, excluding the full mass
    let mut levels: Vec<(f64, f64)> = Vec::new();
    for a in model.law.atoms().unwrap_or(&[]) {
        levels.push((rho_g(&*model.kernel, model.group, a.stat)?, a.prob));
    }
    levels.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut tails = Vec::new();
    let mut acc = 0.0;
    for (i, (r, p)) in levels.iter().enumerate() {
        acc += p;
        let next_differs = levels.get(i + 1).is_some_and(|n| n.0 < *r);
        if next_differs && acc < 1.0 - 1e-9 {
            tails.push(acc);
        }
    }
    let mass = tails[rng.gen_range(0..tails.len())];
    let runtime = Runtime::from_ln_q(-0.5 * mass.ln())?;
    let m = 2 * rng.gen_range(1..=10u64);
    debug_assert!(r_of_q(&model, runtime).is_ok_and(|t| t.exact));
    Ok(HarnessCase { model, runtime, m })
}

//! Hardness functionals: FP, generalized FP, ρ_G-FP, SQ, unconditional SQ,
//! samplewise low-degree norm and χ², plus the correlation-assumption
//! certificate and the equivalence-inequality checker.
//!
//! Every kernel is the one-sample kernel; `m` samples enter as `K^m`,
//! computed as `exp(m·ln K)` throughout.

mod checks;
pub mod events;
mod report;

use crate::error::{arg, Error, Result};
use crate::kernels::{orbit_avg_ln_pow, rho_g, ModelSpec};
use crate::numerics::{binomial, log_sum_exp, NeumaierSum};
use crate::overlap_laws::{mass_slack, Event, OverlapLaw, Side, Statistic, ThresholdResult, MASS_TOL};

pub use checks::{
    assumption_holds, check_equivalence_bounds, random_harness_case, AssumptionReport, CheckStatus,
    EquivalenceReport, HarnessCase, InequalityCheck, ASSUMPTION_TOL,
};
pub use report::{CriterionKind, CriterionReport, Method, Runtime, Verdict};

type Transform<'a> = dyn Fn(Statistic) -> f64 + Sync + 'a;

/// `ln K(t)`, `−∞` for a zero kernel and NaN when the kernel cannot be read.
fn ln_k(model: &ModelSpec, s: Statistic) -> f64 {
    model.kernel.eval(s).map(|k| k.ln()).unwrap_or(f64::NAN)
}

fn method_of(law: &OverlapLaw) -> Method {
    if law.is_discrete() {
        Method::ExactSum
    } else {
        Method::Quadrature
    }
}

/// Nominal error of a continuous-law evaluation.
fn quad_error(law: &OverlapLaw, value: f64) -> f64 {
    match law {
        OverlapLaw::Sphere(s) => 10.0 * s.rel_tol * value.abs(),
        OverlapLaw::Discrete(_) => 0.0,
    }
}

fn check_m(m: u64) -> Result<()> {
    if m == 0 {
        Err(arg("m must be positive"))
    } else {
        Ok(())
    }
}

/// `ln E[K^m · 1(event)]`.
pub fn ln_moment_on(model: &ModelSpec, m: u64, event: Option<&Event<'_>>) -> Result<f64> {
    let mf = m as f64;
    match &*model.law {
        OverlapLaw::Discrete(_) => {
            let mut terms = Vec::new();
            for a in model.law.atoms().unwrap_or(&[]) {
                if a.prob == 0.0 || event.is_some_and(|e| !e.contains(a.stat)) {
                    continue;
                }
                let lk = model.kernel.eval(a.stat)?.ln();
                terms.push(a.prob.ln() + mf * lk);
            }
            if terms.is_empty() {
                return Ok(f64::NEG_INFINITY);
            }
            log_sum_exp(&terms)
        }
        law @ OverlapLaw::Sphere(_) => {
            let v = law.expect_on(|s| (mf * ln_k(model, s)).exp(), event)?;
            Ok(v.ln())
        }
    }
}

/// `ln E[K^m]`.
pub fn ln_moment(model: &ModelSpec, m: u64) -> Result<f64> {
    ln_moment_on(model, m, None)
}

/// `χ²(P^{⊗m} ‖ Q^{⊗m}) = E[K^m] − 1`.
pub fn chi_squared(model: &ModelSpec, m: u64) -> Result<f64> {
    check_m(m)?;
    let mf = m as f64;
    let ln_e = ln_moment(model, m)?;
    if ln_e > 0.5 {
        return Ok(ln_e.exp_m1());
    }
    // near zero, sum K^m − 1 directly to avoid cancellation
    match &*model.law {
        OverlapLaw::Discrete(_) => {
            let mut acc = NeumaierSum::default();
            for a in model.law.atoms().unwrap_or(&[]) {
                if a.prob > 0.0 {
                    acc.add(a.prob * (mf * model.kernel.eval(a.stat)?.ln()).exp_m1());
                }
            }
            Ok(acc.total())
        }
        law => law.expect(|s| (mf * ln_k(model, s)).exp_m1()),
    }
}

/// Inputs shared by the criterion evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inputs {
    pub runtime: Option<Runtime>,
    pub m: Option<u64>,
    pub epsilon: f64,
    /// USQ moment order.
    pub usq_order: Option<u64>,
    /// LD per-sample degree (`None` is unbounded) and sample count.
    pub ld_degree: Option<usize>,
    pub ld_samples: Option<u64>,
}

impl Default for Inputs {
    fn default() -> Self {
        Inputs {
            runtime: None,
            m: None,
            epsilon: 0.0,
            usq_order: None,
            ld_degree: None,
            ld_samples: None,
        }
    }
}

fn need<T>(v: Option<T>, what: &str, c: CriterionKind) -> Result<T> {
    v.ok_or_else(|| arg(format!("criterion {c} needs {what}")))
}

/// Dispatches one criterion.
pub fn evaluate(model: &ModelSpec, kind: CriterionKind, inp: &Inputs) -> Result<CriterionReport> {
    let eps = inp.epsilon;
    match kind {
        CriterionKind::Fp => fp_value(model, need(inp.runtime, "q", kind)?, need(inp.m, "m", kind)?, eps),
        CriterionKind::Gfp => gfp_value(model, need(inp.runtime, "q", kind)?, need(inp.m, "m", kind)?, eps),
        CriterionKind::RhoFp => rho_fp_value(model, need(inp.runtime, "q", kind)?, need(inp.m, "m", kind)?, eps),
        CriterionKind::Sq => sq_value(model, need(inp.runtime, "q", kind)?, inp.m),
        CriterionKind::Usq => usq_hard(model, need(inp.m, "m", kind)?, inp.usq_order.unwrap_or(2)),
        CriterionKind::Ld => {
            let m = need(inp.m, "m", kind)?;
            let k = inp.ld_samples.unwrap_or(m);
            let v = ld_samplewise(model, m, inp.ld_degree, k)?;
            let mut r = base_report(model, kind, v, eps);
            r.m = Some(m);
            r.order = Some(k);
            r.degree = inp.ld_degree;
            r.verdict = report::verdict_le(v, 1.0 + eps);
            r.error_bound = quad_error(&model.law, v);
            Ok(r)
        }
        CriterionKind::Chi2 => {
            let m = need(inp.m, "m", kind)?;
            let v = chi_squared(model, m)?;
            let mut r = base_report(model, kind, v, eps);
            r.m = Some(m);
            r.ln_value = ln_moment(model, m)?;
            r.verdict = report::verdict_le(v, eps);
            r.error_bound = quad_error(&model.law, v);
            r.notes.push("ln_value is ln(1 + chi2)".into());
            Ok(r)
        }
    }
}

fn base_report(model: &ModelSpec, kind: CriterionKind, value: f64, eps: f64) -> CriterionReport {
    CriterionReport {
        model: model.name.clone(),
        criterion: kind,
        ln_q: None,
        m: None,
        epsilon: Some(eps),
        order: None,
        degree: None,
        threshold: None,
        event_mass: None,
        value,
        ln_value: value.ln(),
        verdict: Verdict::Hard,
        method: method_of(&model.law),
        error_bound: 0.0,
        bracket: None,
        notes: Vec::new(),
    }
}

fn value_report(
    model: &ModelSpec,
    kind: CriterionKind,
    rt: Runtime,
    m: u64,
    eps: f64,
    ln_value: f64,
) -> CriterionReport {
    let value = ln_value.exp();
    let mut r = base_report(model, kind, value, eps);
    r.ln_value = ln_value;
    r.ln_q = Some(rt.ln_q);
    r.m = Some(m);
    r.verdict = report::verdict_le(value, 1.0 + eps);
    r.error_bound = quad_error(&model.law, value);
    r
}

fn abs_overlap(s: Statistic) -> f64 {
    s.overlap().map(f64::abs).unwrap_or(f64::NAN)
}

/// Franz–Parisi value `E[K^m · 1(|T| ≤ δ(q))]`, `δ(q)` the generalized
/// inverse of `|T|` at mass `q⁻²`.
pub fn fp_value(model: &ModelSpec, rt: Runtime, m: u64, eps: f64) -> Result<CriterionReport> {
    check_m(m)?;
    if let Some(atoms) = model.law.atoms() {
        if let Some(a) = atoms.iter().find(|a| a.stat.overlap().is_none()) {
            return Err(Error::Unsupported(format!(
                "FP needs a Euclidean overlap; model {} has statistic {}",
                model.name, a.stat
            )));
        }
    }
    let h: &Transform = &abs_overlap;
    let th = model.law.threshold_sup(rt.inv_q2(), Some(h))?;
    let ev = Event {
        transform: h,
        side: Side::AtMost,
        level: th.threshold,
    };
    let ln_v = ln_moment_on(model, m, Some(&ev))?;
    let mut r = value_report(model, CriterionKind::Fp, rt, m, eps, ln_v);
    r.threshold = Some(th);
    r.event_mass = Some(model.law.mass(&ev)?);
    Ok(r)
}

/// `r(q)` on the pushforward of the law through `ρ_G`.
pub fn r_of_q(model: &ModelSpec, rt: Runtime) -> Result<ThresholdResult> {
    let kernel = model.kernel.clone();
    let group = model.group;
    let rho = move |s: Statistic| rho_g(&*kernel, group, s).unwrap_or(f64::NAN);
    model.law.threshold_sup(rt.inv_q2(), Some(&rho))
}

/// `ρ_G`-FP value `E[K^m · 1(ρ_G < r(q))]` (strict inequality).
pub fn rho_fp_value(model: &ModelSpec, rt: Runtime, m: u64, eps: f64) -> Result<CriterionReport> {
    check_m(m)?;
    let kernel = model.kernel.clone();
    let group = model.group;
    let rho = move |s: Statistic| rho_g(&*kernel, group, s).unwrap_or(f64::NAN);
    let th = model.law.threshold_sup(rt.inv_q2(), Some(&rho))?;
    let ev = Event {
        transform: &rho,
        side: Side::Below,
        level: th.threshold,
    };
    let ln_v = ln_moment_on(model, m, Some(&ev))?;
    let mut r = value_report(model, CriterionKind::RhoFp, rt, m, eps, ln_v);
    r.event_mass = Some(model.law.mass(&ev)?);
    if !th.exact {
        r.notes.push(format!(
            "no level has survival mass exactly q^-2: P(rho_G < r) = {} < 1 - q^-2",
            r.event_mass.unwrap_or(f64::NAN)
        ));
    }
    r.threshold = Some(th);
    Ok(r)
}

/// Generalized FP value: infimum of `E[K^m·1(A)]` over group-invariant,
/// statistic-measurable events with `π²(A) ≥ 1 − q⁻²`.
pub fn gfp_value(model: &ModelSpec, rt: Runtime, m: u64, eps: f64) -> Result<CriterionReport> {
    check_m(m)?;
    let budget = rt.inv_q2();
    if budget > 1.0 + MASS_TOL {
        return Err(arg("q^-2 exceeds 1"));
    }
    match &*model.law {
        OverlapLaw::Discrete(_) => {
            let mf = m as f64;
            let mut items = Vec::new();
            for a in model.law.atoms().unwrap_or(&[]) {
                if a.prob == 0.0 {
                    continue;
                }
                let canon = model.group.canonical(a.stat)?;
                let lk = model.kernel.eval(a.stat)?.ln();
                items.push((canon, a.stat, a.prob, a.prob.ln() + mf * lk));
            }
            let orbits = events::merge_orbits(items);
            let sol = events::minimize_included(&orbits, budget + mass_slack(budget));
            let mut r = value_report(model, CriterionKind::Gfp, rt, m, eps, sol.ln_value);
            let total: f64 = orbits.iter().map(|o| o.prob).sum();
            r.event_mass = Some(total - sol.excluded_mass);
            if sol.exact {
                r.method = Method::ExactDp;
            } else {
                r.method = Method::GreedyBracket;
                r.bracket = Some((sol.ln_lower.exp(), sol.ln_value.exp()));
                r.error_bound = sol.ln_value.exp() - sol.ln_lower.exp();
            }
            let shown: Vec<String> = sol.excluded.iter().take(8).map(|s| s.to_string()).collect();
            r.notes.push(format!(
                "excluded {} orbit atom(s){}: {}",
                sol.excluded.len(),
                if sol.excluded.len() > 8 { ", first 8" } else { "" },
                shown.join(" ")
            ));
            Ok(r)
        }
        law @ OverlapLaw::Sphere(_) => {
            // exclude the top-q⁻² superlevel set of the orbit-averaged K^m;
            // a flat level set is split, which an atomless law permits
            let kernel = model.kernel.clone();
            let group = model.group;
            let h = move |s: Statistic| orbit_avg_ln_pow(&*kernel, group, s, m).unwrap_or(f64::NAN);
            let th = law.threshold_sup(budget, Some(&h))?;
            let ev = Event {
                transform: &h,
                side: Side::Below,
                level: th.threshold,
            };
            let below = law.mass(&ev)?;
            let ln_below = ln_moment_on(model, m, Some(&ev))?;
            let fill = (1.0 - budget - below).max(0.0);
            let ln_v = if fill > 0.0 {
                crate::numerics::log_add(ln_below, th.threshold + fill.ln())
            } else {
                ln_below
            };
            let mut r = value_report(model, CriterionKind::Gfp, rt, m, eps, ln_v);
            r.event_mass = Some(below + fill);
            r.threshold = Some(th);
            Ok(r)
        }
    }
}

/// Statistical-query value: mean of `|K − 1|` over the smallest superlevel
/// set of mass ≥ `q⁻²` (boundary level included whole). On discrete laws the
/// bracket's upper end is the value with divisible atoms.
pub fn sq_value(model: &ModelSpec, rt: Runtime, m: Option<u64>) -> Result<CriterionReport> {
    let kernel = model.kernel.clone();
    let dev = move |s: Statistic| kernel.eval(s).map(|k| k.minus_one().abs()).unwrap_or(f64::NAN);
    let budget = rt.inv_q2();
    let th = model.law.threshold_sup(budget, Some(&dev))?;
    let ev = Event {
        transform: &dev,
        side: Side::AtLeast,
        level: th.threshold,
    };
    let top = model.law.expect_on(&dev, Some(&ev))?;
    let top_mass = model.law.mass(&ev)?;
    let strict = Event {
        transform: &dev,
        side: Side::AtLeast,
        level: next_up(th.threshold),
    };
    let above = model.law.expect_on(&dev, Some(&strict))?;
    let above_mass = model.law.mass(&strict)?;
    let fractional = (above + (budget - above_mass).max(0.0) * th.threshold) / budget;
    let (value, event_mass) = match &*model.law {
        OverlapLaw::Discrete(_) => (top / top_mass, top_mass),
        OverlapLaw::Sphere(_) => (fractional, budget),
    };
    let mut r = base_report(model, CriterionKind::Sq, value, 0.0);
    r.epsilon = None;
    r.ln_q = Some(rt.ln_q);
    r.m = m;
    r.threshold = Some(th);
    r.event_mass = Some(event_mass);
    r.error_bound = quad_error(&model.law, value);
    if model.law.is_discrete() && fractional > value * (1.0 + 1e-12) {
        r.bracket = Some((value, fractional));
    }
    r.verdict = match m {
        Some(m) => report::verdict_le(value, 1.0 / m as f64),
        None => Verdict::Hard,
    };
    if m.is_none() {
        r.notes.push("no m given: verdict not evaluated".into());
    }
    Ok(r)
}

fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let b = x.to_bits();
    f64::from_bits(if x > 0.0 { b + 1 } else { b - 1 })
}

/// `(q, m)`-SQ hardness: `sq_value(q) ≤ 1/m`.
pub fn sq_hard(model: &ModelSpec, rt: Runtime, m: u64) -> Result<Verdict> {
    check_m(m)?;
    Ok(sq_value(model, rt, Some(m))?.verdict)
}

/// `E[(K − 1)^t]` for even `t`.
pub fn usq_moment(model: &ModelSpec, t: u64) -> Result<f64> {
    if t == 0 || t % 2 == 1 {
        return Err(arg(format!("USQ moment order must be positive and even, got {t}")));
    }
    let kernel = model.kernel.clone();
    model
        .law
        .expect(move |s| kernel.eval(s).map(|k| k.minus_one().powi(t as i32)).unwrap_or(f64::NAN))
}

/// `(m, t)`-USQ hardness: `E[(K−1)^t] ≤ m^{−t}`.
pub fn usq_hard(model: &ModelSpec, m: u64, t: u64) -> Result<CriterionReport> {
    check_m(m)?;
    let v = usq_moment(model, t)?;
    let mut r = base_report(model, CriterionKind::Usq, v, 0.0);
    r.epsilon = None;
    r.m = Some(m);
    r.order = Some(t);
    r.verdict = report::verdict_le(v, (m as f64).powi(-(t as i32)));
    r.error_bound = quad_error(&model.law, v);
    Ok(r)
}

/// Samplewise low-degree norm `Σ_{j≤k} C(m,j)·E[(K_d − 1)^j]`, with
/// `K_d` the degree-`d` truncation of the kernel series (`None`: no truncation).
pub fn ld_samplewise(model: &ModelSpec, m: u64, d: Option<usize>, k_deg: u64) -> Result<f64> {
    check_m(m)?;
    if d.is_some() && model.kernel.series().is_none() {
        return Err(Error::Unsupported(format!(
            "degree truncation needs a series kernel; {} has none",
            model.kernel.name()
        )));
    }
    let k = k_deg.min(m);
    let coef: Vec<f64> = (0..=k).map(|j| binomial(m, j)).collect();
    let kernel = model.kernel.clone();
    let poly = move |s: Statistic| -> f64 {
        let x = match kernel.truncated_minus_one(d, s) {
            Ok(x) => x,
            Err(_) => return f64::NAN,
        };
        let mut acc = 0.0;
        for c in coef.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    model.law.expect(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{GroupSpec, ModelDescriptor, SyntheticAtom};
    use crate::overlap_laws::LawSpec;

    fn synth(atoms: &[(f64, f64, f64)], g: GroupSpec) -> ModelSpec {
        let a: Vec<SyntheticAtom> = atoms
            .iter()
            .map(|&(stat, prob, kernel)| SyntheticAtom { stat, prob, kernel })
            .collect();
        ModelSpec::synthetic("synthetic", &a, g).unwrap()
    }

    fn gam(lambda: f64, law: LawSpec, g: GroupSpec) -> ModelSpec {
        ModelDescriptor {
            name: "gam".into(),
            kernel: crate::kernels::KernelSpec::Gam { lambda },
            law,
            group: g,
        }
        .build()
        .unwrap()
    }

    #[test]
    fn null_kernel_everywhere() {
        let m = gam(0.0, LawSpec::Hypergeometric { n: 30, k: 3 }, GroupSpec::Trivial);
        let rt = Runtime::from_q(3.0).unwrap();
        let fp = fp_value(&m, rt, 7, 0.0).unwrap();
        assert!((fp.value - fp.event_mass.unwrap()).abs() < 1e-15);
        assert_eq!(fp.verdict, Verdict::Hard);
        let g = gfp_value(&m, rt, 7, 0.0).unwrap();
        assert!(g.value <= 1.0 && g.value >= 1.0 - rt.inv_q2() - 1e-12);
        assert_eq!(sq_value(&m, rt, Some(5)).unwrap().value, 0.0);
        assert_eq!(usq_moment(&m, 4).unwrap(), 0.0);
        assert_eq!(chi_squared(&m, 9).unwrap(), 0.0);
        assert!((ld_samplewise(&m, 5, None, 0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fp_two_atom_example() {
        let m = synth(&[(0.0, 0.99, 1.0), (1.0, 0.01, 2.0)], GroupSpec::Trivial);
        let r = fp_value(&m, Runtime::from_q(5.0).unwrap(), 3, 0.0).unwrap();
        assert_eq!(r.threshold.unwrap().threshold, 0.0);
        assert!((r.value - 0.99).abs() < 1e-15);
    }

    #[test]
    fn gfp_three_atom_brute_force() {
        let atoms = [(0.0, 0.6, 1.0), (1.0, 0.3, 1.5), (2.0, 0.1, 3.0)];
        let m = synth(&atoms, GroupSpec::Trivial);
        for &q in &[1.0, 1.5, 2.0, 3.0, 3.3, 10.0] {
            let rt = Runtime::from_q(q).unwrap();
            let mm = 2u64;
            let r = gfp_value(&m, rt, mm, 0.0).unwrap();
            let mut best = f64::INFINITY;
            for mask in 0..8u32 {
                let mass: f64 = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| atoms[i].1).sum();
                if mass < 1.0 - rt.inv_q2() - 1e-12 {
                    continue;
                }
                let v: f64 = (0..3)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| atoms[i].1 * atoms[i].2.powi(mm as i32))
                    .sum();
                best = best.min(v);
            }
            assert!((r.value - best).abs() < 1e-12, "q={q}: {} vs {best}", r.value);
            assert_eq!(r.method, Method::ExactDp);
        }
    }

    #[test]
    fn sq_two_atom_tie_rule() {
        // |K−1| = 3 w.p. 0.1 and 0.5 w.p. 0.9, q⁻² = 0.2
        let m = synth(&[(1.0, 0.1, 4.0), (0.0, 0.9, 1.5)], GroupSpec::Trivial);
        let rt = Runtime::from_ln_q(-0.5 * 0.2f64.ln()).unwrap();
        let r = sq_value(&m, rt, Some(1)).unwrap();
        assert!((r.value - 0.75).abs() < 1e-12, "{}", r.value);
        let (lo, hi) = r.bracket.unwrap();
        assert!((lo - 0.75).abs() < 1e-12 && (hi - 1.75).abs() < 1e-12);
    }

    #[test]
    fn usq_examples() {
        let m = ModelDescriptor {
            name: "gam2".into(),
            kernel: crate::kernels::KernelSpec::Gam { lambda: 1.0 },
            law: LawSpec::Custom {
                atoms: vec![
                    crate::overlap_laws::Atom { stat: Statistic::Scalar(0.0), prob: 0.5 },
                    crate::overlap_laws::Atom { stat: Statistic::Scalar(1.0), prob: 0.5 },
                ],
            },
            group: GroupSpec::Trivial,
        }
        .build()
        .unwrap();
        let v = usq_moment(&m, 2).unwrap();
        assert!((v - 0.5 * (std::f64::consts::E - 1.0).powi(2)).abs() < 1e-14);
        assert!(usq_moment(&m, 3).is_err());
        let v4 = usq_moment(&m, 4).unwrap();
        assert!(v.sqrt() <= v4.powf(0.25) + 1e-15);
    }

    #[test]
    fn ld_degree_one_identity_and_full_binomial() {
        let m = gam(0.7, LawSpec::SignedSparse { n: 30, k: 4 }, GroupSpec::SignFlip);
        for &mm in &[1u64, 4, 13] {
            let ld1 = ld_samplewise(&m, mm, None, 1).unwrap();
            let chi = chi_squared(&m, 1).unwrap();
            assert!((ld1 - 1.0 - mm as f64 * chi).abs() < 1e-12);
            let full = ld_samplewise(&m, mm, None, mm).unwrap();
            let e = ln_moment(&m, mm).unwrap().exp();
            assert!((full - e).abs() <= 1e-12 * e);
        }
    }

    #[test]
    fn ld_truncated_gam_on_sphere() {
        let m = gam(0.5, LawSpec::Sphere { n: 50 }, GroupSpec::SignFlip);
        let v = ld_samplewise(&m, 2, Some(2), 2).unwrap();
        // independent: E[1 + 2x + x²] with x = 0.25t + 0.03125t², E t² = 1/50, E t⁴ = 3/(50·52)
        let (e2, e4) = (1.0 / 50.0, 3.0 / (50.0 * 52.0));
        let ex = 0.03125 * e2;
        let ex2 = 0.0625 * e2 + 0.03125f64.powi(2) * e4;
        let want = 1.0 + 2.0 * ex + ex2;
        assert!((v - want).abs() < 1e-12, "{v} vs {want}");
        let dirac = ModelDescriptor {
            name: "d".into(),
            kernel: crate::kernels::KernelSpec::Dirac { n: 10 },
            law: LawSpec::Diagonal { n: 10 },
            group: GroupSpec::Trivial,
        }
        .build()
        .unwrap();
        assert!(matches!(ld_samplewise(&dirac, 2, Some(2), 2), Err(Error::Unsupported(_))));
        assert!(matches!(
            fp_value(&dirac, Runtime::from_q(2.0).unwrap(), 1, 0.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn gfp_on_sphere_is_below_fp_and_rho_fp() {
        let m = gam(1.0, LawSpec::Sphere { n: 50 }, GroupSpec::SignFlip);
        let rt = Runtime::from_q(4.0).unwrap();
        let g = gfp_value(&m, rt, 3, 0.0).unwrap();
        let r = rho_fp_value(&m, rt, 3, 0.0).unwrap();
        let f = fp_value(&m, rt, 3, 0.0).unwrap();
        assert!(g.value <= r.value * (1.0 + 1e-9), "{} {}", g.value, r.value);
        assert!(g.value <= f.value * (1.0 + 1e-9));
        assert!((g.event_mass.unwrap() - (1.0 - rt.inv_q2())).abs() < 1e-8);
        // for GAM the three events coincide: all are {|t| below a level}
        assert!((g.value - f.value).abs() < 1e-6 * f.value);
    }
}

//! Independent validators for the closed-form kernels and criterion sums:
//! exact enumeration, bivariate-normal quadrature and seeded Monte Carlo
//! simulation of the generative models.
//!
//! Monte Carlo runs split the sample budget into fixed chunks; chunk `i` uses
//! ChaCha8 seeded with `seed` on stream `i`, so results do not depend on the
//! thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{CriterionKind, Inputs};
use crate::error::{arg, Error, Result};
use crate::kernels::{rho_g, LinkSpec, ModelSpec, MuSpec};
use crate::numerics::{binomial, gauss_hermite_rule, integrate, normal_cdf, normal_pdf, NeumaierSum, MAX_NODES};
use crate::overlap_laws::{Event, Side, Statistic};

mod validate;

pub use validate::{
    bimodal_mu, mslr_default_proposal, rho_grid, validate_kernel, ValidationOptions, ValidationRow, GRID_POINTS, NGCA_NODES,
    SERIES_TOL,
};

const CHUNK: u64 = 1 << 16;
/// Enumeration is refused beyond this many coordinates.
pub const MAX_ENUM_COORDS: u64 = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum OracleMethod {
    Enumeration,
    Quadrature { nodes: usize },
    AdaptiveQuadrature,
    MonteCarlo { seed: u64, samples: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub value: f64,
    /// Deterministic for quadrature and enumeration, 3 standard errors for
    /// Monte Carlo.
    pub error_bound: f64,
    pub method: OracleMethod,
}

impl OracleEstimate {
    /// Whether `x` lies within the error band (plus `slack`).
    pub fn covers(&self, x: f64, slack: f64) -> bool {
        (x - self.value).abs() <= self.error_bound + slack
    }
}

/// Running mean and variance (Chan's parallel merge).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        if o.n == 0.0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n / n,
            m2: self.m2 + o.m2 + d * d * self.n * o.n / n,
        }
    }

    fn estimate(self, seed: u64, samples: u64) -> OracleEstimate {
        let var = if self.n > 1.0 { self.m2 / (self.n - 1.0) } else { 0.0 };
        OracleEstimate {
            value: self.mean,
            error_bound: 3.0 * (var / self.n).sqrt(),
            method: OracleMethod::MonteCarlo { seed, samples },
        }
    }
}

/// Runs `draw` `samples` times in fixed chunks, chunk `i` on RNG stream `i`.
fn chunked_mc<F>(samples: u64, seed: u64, draw: F) -> Result<OracleEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if samples == 0 {
        return Err(arg("num_samples must be positive"));
    }
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let count = CHUNK.min(samples - i * CHUNK);
            let mut m = Moments::default();
            for _ in 0..count {
                m.push(draw(&mut rng));
            }
            m
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    if !total.mean.is_finite() {
        return Err(Error::Evaluation("Monte Carlo average is not finite".into()));
    }
    Ok(total.estimate(seed, samples))
}

/// Sampling distribution for the mSLR oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "proposal")]
pub enum Proposal {
    /// `(x, y) ~ Q`, the definition of `⟨L_u, L_v⟩_Q` read literally.
    Null,
    /// Importance sampling from `x_j ~ N(0, x_var)`, `y ~ N(0, y_var)`.
    /// Under `Q` the product `L_u L_v` has infinite variance once `k/σ²` is
    /// moderate; widening the proposal restores a finite one.
    Inflated { x_var: f64, y_var: f64 },
}

/// `ln L_u` at a given `a = ⟨x, u⟩` and `y`, from the two-branch likelihood
/// ratio with `λ = √(k/σ² + 1)`.
fn ln_lr_mslr(lambda: f64, sigma: f64, a: f64, y: f64) -> f64 {
    let common = 0.5 * y * y * (1.0 - lambda * lambda) - a * a / (2.0 * sigma * sigma);
    let z = (lambda * y * a / sigma).abs();
    // ln cosh z
    let lcosh = z + (-2.0 * z).exp().ln_1p() - std::f64::consts::LN_2;
    lambda.ln() + common + lcosh
}

fn support_check(w: &[bool], k: u64, what: &str) -> Result<()> {
    let nnz = w.iter().filter(|&&b| b).count() as u64;
    if nnz != k {
        return Err(arg(format!("{what} has {nnz} nonzeros, expected k = {k}")));
    }
    Ok(())
}

/// Monte Carlo estimate of `⟨L_u, L_v⟩_Q` for one mSLR sample.
pub fn mc_kernel_mslr(
    k: u64,
    sigma2: f64,
    u: &[bool],
    v: &[bool],
    num_samples: u64,
    seed: u64,
) -> Result<OracleEstimate> {
    mc_kernel_mslr_with(k, sigma2, u, v, num_samples, seed, Proposal::Null)
}

pub fn mc_kernel_mslr_with(
    k: u64,
    sigma2: f64,
    u: &[bool],
    v: &[bool],
    num_samples: u64,
    seed: u64,
    proposal: Proposal,
) -> Result<OracleEstimate> {
    if u.len() != v.len() {
        return Err(arg("u and v must have the same dimension"));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(arg(format!("sigma2 must be positive, got {sigma2}")));
    }
    support_check(u, k, "u")?;
    support_check(v, k, "v")?;
    let (xv, yv) = match proposal {
        Proposal::Null => (1.0, 1.0),
        Proposal::Inflated { x_var, y_var } => {
            if !(x_var > 0.0 && y_var > 0.0) {
                return Err(arg("proposal variances must be positive"));
            }
            (x_var, y_var)
        }
    };
    // only coordinates in supp u ∪ supp v enter L_u L_v
    let coords: Vec<(bool, bool)> = u.iter().zip(v).filter(|(a, b)| **a || **b).map(|(a, b)| (*a, *b)).collect();
    let lambda = (k as f64 / sigma2 + 1.0).sqrt();
    let sigma = sigma2.sqrt();
    let (sx, sy) = (xv.sqrt(), yv.sqrt());
    // ln of φ(w)/φ_s(w) = −w²/2·(1 − 1/s²) + ln s
    let lw_x = 0.5 * xv.ln();
    let lw_y = 0.5 * yv.ln();
    let cx = 0.5 * (1.0 - 1.0 / xv);
    let cy = 0.5 * (1.0 - 1.0 / yv);
    chunked_mc(num_samples, seed, |rng| {
        let (mut au, mut av, mut lw) = (0.0, 0.0, 0.0);
        for &(iu, iv) in &coords {
            let x: f64 = sx * rng.sample::<f64, _>(StandardNormal);
            if iu {
                au += x;
            }
            if iv {
                av += x;
            }
            lw += lw_x - cx * x * x;
        }
        let y: f64 = sy * rng.sample::<f64, _>(StandardNormal);
        lw += lw_y - cy * y * y;
        (ln_lr_mslr(lambda, sigma, au, y) + ln_lr_mslr(lambda, sigma, av, y) + lw).exp()
    })
}

/// Exact `⟨L_u, L_v⟩_Q` for the two-point counterexample by summing over all
/// `x ∈ {±1}^{n+1}`.
pub fn enum_kernel_counterexample(n: u64, r: f64, alpha_c: f64, u: &[bool], v: &[bool]) -> Result<OracleEstimate> {
    if n + 1 > MAX_ENUM_COORDS {
        return Err(Error::Resource(format!(
            "enumeration over 2^{} points refused (at most {MAX_ENUM_COORDS} coordinates)",
            n + 1
        )));
    }
    if u.len() as u64 != n + 1 || v.len() as u64 != n + 1 {
        return Err(arg(format!("u and v must have n + 1 = {} coordinates", n + 1)));
    }
    let d = (n + 1) as usize;
    let au: Vec<f64> = u.iter().map(|&b| if b { alpha_c } else { 1.0 }).collect();
    let av: Vec<f64> = v.iter().map(|&b| if b { alpha_c } else { 1.0 }).collect();
    let mut acc = NeumaierSum::default();
    for bits in 0u64..(1u64 << d) {
        let mut p = 1.0;
        for i in 0..d {
            let x = if bits >> i & 1 == 1 { 1.0 } else { -1.0 };
            p *= (1.0 + r * x * au[i]) * (1.0 + r * x * av[i]);
        }
        acc.add(p);
    }
    Ok(OracleEstimate {
        value: acc.total() / (1u64 << d) as f64,
        error_bound: 0.0,
        method: OracleMethod::Enumeration,
    })
}

fn ngca_gh(mu: &MuSpec, rho: f64, nodes: usize) -> Result<f64> {
    let rule = gauss_hermite_rule::<f64>(nodes)?;
    // log space: the ratio overflows where φ underflows
    let lr: Vec<f64> = rule.nodes.iter().map(|&z| mu.ln_density_ratio(z)).collect::<Result<_>>()?;
    let mut acc = NeumaierSum::default();
    if rho.abs() == 1.0 {
        for (i, &z) in rule.nodes.iter().enumerate() {
            acc.add((rule.log_weights[i] + lr[i] + mu.ln_density_ratio(rho * z)?).exp());
        }
        return Ok(acc.total());
    }
    let s = (1.0 - rho * rho).sqrt();
    for (i, &z1) in rule.nodes.iter().enumerate() {
        for (j, &z2) in rule.nodes.iter().enumerate() {
            let lt = rule.log_weights[i] + lr[i] + rule.log_weights[j] + mu.ln_density_ratio(rho * z1 + s * z2)?;
            acc.add(lt.exp());
        }
    }
    Ok(acc.total())
}

/// `E[(dμ/dφ)(S)·(dμ/dφ)(T)]` for standard normals `(S, T)` with correlation
/// `rho`, by tensor Gauss–Hermite on `S = Z₁`, `T = ρZ₁ + √(1−ρ²)Z₂`. The
/// value uses `2·num_nodes` nodes; the bound is twice the change from
/// `num_nodes`.
pub fn quad_kernel_ngca(mu: &MuSpec, rho: f64, num_nodes: usize) -> Result<OracleEstimate> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(arg(format!("rho must lie in [-1, 1], got {rho}")));
    }
    if 2 * num_nodes > MAX_NODES {
        return Err(arg(format!("num_nodes must be at most {}", MAX_NODES / 2)));
    }
    mu.ln_density_ratio(0.0)?;
    let coarse = ngca_gh(mu, rho, num_nodes)?;
    let fine = ngca_gh(mu, rho, 2 * num_nodes)?;
    if !fine.is_finite() {
        return Err(Error::Evaluation(format!("NGCA quadrature diverged at rho = {rho}")));
    }
    Ok(OracleEstimate {
        value: fine,
        error_bound: 2.0 * (fine - coarse).abs() + 4.0 * f64::EPSILON * fine.abs(),
        method: OracleMethod::Quadrature { nodes: 2 * num_nodes },
    })
}

/// Effective infinity for normal integrals.
const Z_CLIP: f64 = 40.0;

/// `P(Z₁ ∈ [a,b], Z₂ ∈ [c,d])` for standard normals with correlation `rho`.
fn bvn_box(a: f64, b: f64, c: f64, d: f64, rho: f64) -> Result<OracleEstimate> {
    let (lo, hi) = (a.max(-Z_CLIP), b.min(Z_CLIP));
    if lo >= hi {
        return Ok(OracleEstimate {
            value: 0.0,
            error_bound: 0.0,
            method: OracleMethod::AdaptiveQuadrature,
        });
    }
    if rho.abs() == 1.0 {
        // Z₂ = ±Z₁: the box reduces to an interval
        let (c2, d2) = if rho > 0.0 { (c, d) } else { (-d, -c) };
        let (l, h) = (lo.max(c2), hi.min(d2));
        let v = if l < h { normal_cdf(h) - normal_cdf(l) } else { 0.0 };
        return Ok(OracleEstimate {
            value: v,
            error_bound: 4.0 * f64::EPSILON,
            method: OracleMethod::AdaptiveQuadrature,
        });
    }
    let s = (1.0 - rho * rho).sqrt();
    let f = |z: f64| normal_pdf(z) * (normal_cdf((d - rho * z) / s) - normal_cdf((c - rho * z) / s));
    let r = integrate(f, lo, hi, 1e-13, 1e-15)?;
    Ok(OracleEstimate {
        value: r.value,
        error_bound: r.error,
        method: OracleMethod::AdaptiveQuadrature,
    })
}

/// `P(|Z₁| ≤ κ, |Z₂| ≤ κ)` for standard normals with correlation `rho`.
pub fn bvn_rectangle(kappa: f64, rho: f64) -> Result<OracleEstimate> {
    if !(kappa > 0.0) {
        return Err(arg(format!("kappa must be positive, got {kappa}")));
    }
    if !(-1.0..=1.0).contains(&rho) {
        return Err(arg(format!("rho must lie in [-1, 1], got {rho}")));
    }
    bvn_box(-kappa, kappa, -kappa, kappa, rho)
}

/// Single-index kernel for a deterministic quantized link,
/// `Σ_cells P(Z₁ ∈ C, Z₂ ∈ C) / P(C)`.
pub fn quad_kernel_si(link: &LinkSpec, rho: f64) -> Result<OracleEstimate> {
    let cuts = match link {
        LinkSpec::Sign => vec![0.0],
        LinkSpec::Quantized { cuts } => cuts.clone(),
        other => {
            return Err(Error::Unsupported(format!("no SI oracle for link {other:?}")));
        }
    };
    if !(-1.0..=1.0).contains(&rho) {
        return Err(arg(format!("rho must lie in [-1, 1], got {rho}")));
    }
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend(cuts);
    edges.push(f64::INFINITY);
    let (mut value, mut err) = (0.0, 0.0);
    for w in edges.windows(2) {
        let pc = normal_cdf(w[1].min(Z_CLIP)) - normal_cdf(w[0].max(-Z_CLIP));
        if pc == 0.0 {
            continue;
        }
        let b = bvn_box(w[0], w[1], w[0], w[1], rho)?;
        value += b.value / pc;
        err += b.error_bound / pc;
    }
    Ok(OracleEstimate {
        value,
        error_bound: err + 8.0 * f64::EPSILON * value,
        method: OracleMethod::AdaptiveQuadrature,
    })
}

/// Monte Carlo estimate of a criterion by sampling statistic pairs from the
/// prior. The event level comes from the exact threshold; only criteria that
/// are plain expectations are supported (FP, ρ_G-FP, USQ, LD with unbounded
/// degree, χ²).
pub fn mc_criterion(
    model: &ModelSpec,
    kind: CriterionKind,
    inputs: &Inputs,
    num_pairs: u64,
    seed: u64,
) -> Result<OracleEstimate> {
    if num_pairs == 0 {
        return Err(arg("num_pairs must be positive"));
    }
    let m = || inputs.m.ok_or_else(|| arg("m is required"));
    let kernel = model.kernel.clone();
    let group = model.group;
    let k_of = |s: Statistic| kernel.eval(s).map_err(|e| Error::Evaluation(e.to_string()));
    let integrand: Box<dyn Fn(Statistic) -> Result<f64> + Sync> = match kind {
        CriterionKind::Fp | CriterionKind::RhoFp => {
            let rt = inputs.runtime.ok_or_else(|| arg("q is required"))?;
            let mf = m()? as f64;
            let (level, side) = if kind == CriterionKind::Fp {
                let r = crate::criteria::fp_value(model, rt, m()?, inputs.epsilon)?;
                (r.threshold.map(|t| t.threshold).unwrap_or(f64::NAN), Side::AtMost)
            } else {
                (crate::criteria::r_of_q(model, rt)?.threshold, Side::Below)
            };
            let kernel = kernel.clone();
            Box::new(move |s| {
                let h = if kind == CriterionKind::Fp {
                    s.overlap().map(f64::abs).unwrap_or(f64::NAN)
                } else {
                    rho_g(&*kernel, group, s)?
                };
                let id = |_: Statistic| h;
                let ev = Event {
                    transform: &id,
                    side,
                    level,
                };
                if ev.contains(s) {
                    Ok((mf * kernel.eval(s)?.ln()).exp())
                } else {
                    Ok(0.0)
                }
            })
        }
        CriterionKind::Chi2 => {
            let mf = m()? as f64;
            Box::new(move |s| Ok((mf * k_of(s)?.ln()).exp_m1()))
        }
        CriterionKind::Usq => {
            let t = inputs.usq_order.unwrap_or(2);
            if t == 0 || t % 2 == 1 {
                return Err(arg("USQ order must be positive and even"));
            }
            Box::new(move |s| Ok(k_of(s)?.minus_one().powi(t as i32)))
        }
        CriterionKind::Ld => {
            if inputs.ld_degree.is_some() {
                return Err(Error::Unsupported("Monte Carlo LD needs unbounded degree".into()));
            }
            let mm = m()?;
            let kk = inputs.ld_samples.unwrap_or(mm).min(mm);
            let coef: Vec<f64> = (0..=kk).map(|j| binomial(mm, j)).collect();
            Box::new(move |s| {
                let x = k_of(s)?.minus_one();
                Ok(coef.iter().rev().fold(0.0, |acc, c| acc * x + c))
            })
        }
        CriterionKind::Gfp | CriterionKind::Sq => {
            return Err(Error::Unsupported(format!(
                "{kind} is an optimization over events, not an expectation"
            )));
        }
    };
    let chunks = num_pairs.div_ceil(CHUNK);
    let parts: Vec<Result<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let count = CHUNK.min(num_pairs - i * CHUNK);
            let chunk_seed = ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15)).gen::<u64>();
            let stats = model.law.sample(chunk_seed, count as usize)?;
            let mut mo = Moments::default();
            for s in stats {
                mo.push(integrand(s)?);
            }
            Ok(mo)
        })
        .collect();
    let mut total = Moments::default();
    for p in parts {
        total = total.merge(p?);
    }
    Ok(total.estimate(seed, num_pairs))
}

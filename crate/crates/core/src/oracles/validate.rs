//! Kernel-versus-oracle tables on a standard statistic grid per family.

use serde::{Deserialize, Serialize};

use super::{
    bvn_rectangle, enum_kernel_counterexample, mc_kernel_mslr_with, quad_kernel_ngca, quad_kernel_si, OracleEstimate,
    OracleMethod, Proposal, MAX_ENUM_COORDS,
};
use crate::error::{Error, Result};
use crate::kernels::{
    counterexample_kernel, gam_kernel, mslr_kernel, Kernel, KernelSpec, LinkSpec, MixtureComponent, MuSpec,
};
use crate::overlap_laws::Statistic;

/// Allowed gap between a series kernel and a quadrature oracle, on top of
/// the oracle's own error bound and the series truncation bound.
pub const SERIES_TOL: f64 = 1e-6;
/// Gauss–Hermite nodes for the coarse half of the NGCA node-doubling pair.
pub const NGCA_NODES: usize = 128;
pub const GRID_POINTS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    pub samples: u64,
    pub seed: u64,
    /// mSLR sampling distribution; `None` picks the null when its second
    /// moment is finite and an inflated proposal otherwise.
    pub proposal: Option<Proposal>,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 0,
            proposal: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub stat: Statistic,
    pub kernel: f64,
    pub oracle: OracleEstimate,
    pub diff: f64,
    pub bound: f64,
}

impl ValidationRow {
    fn new(stat: Statistic, kernel: f64, oracle: OracleEstimate, bound: f64) -> Self {
        Self {
            stat,
            kernel,
            oracle,
            diff: (kernel - oracle.value).abs(),
            bound,
        }
    }

    pub fn passes(&self) -> bool {
        self.diff <= self.bound
    }
}

/// `GRID_POINTS` evenly spaced correlations in `[−1, 1]`.
pub fn rho_grid() -> Vec<f64> {
    let h = (GRID_POINTS - 1) as f64 / 2.0;
    (0..GRID_POINTS).map(|i| (i as f64 - h) / h).collect()
}

/// Determinant of the quadratic form bounding the exponent of `E[L_u⁴·w]`
/// (`u = v`, the heaviest pair) in `(|y|, |⟨x,u⟩|)`, where `w` is the weight
/// of a proposal with variance `s`. The estimator's variance is finite iff
/// it is positive; for the null (`s = 1`) that is `σ² > 8k`.
fn mslr_variance_det(k: u64, sigma2: f64, s: f64) -> f64 {
    let kf = k as f64;
    let e = 0.5 * (1.0 - 1.0 / s);
    -2.0 / sigma2 + 0.25 / kf + e * (4.0 / sigma2 + 1.0 / kf) + e * e / kf
}

/// The null if its variance is finite, else the narrowest inflated proposal
/// (variances 2, 4, 8, …) whose determinant reaches that of the null at
/// `σ² → ∞`.
pub fn mslr_default_proposal(k: u64, sigma2: f64) -> Proposal {
    if mslr_variance_det(k, sigma2, 1.0) > 0.0 {
        return Proposal::Null;
    }
    let target = 0.25 / k as f64;
    let mut s = 2.0;
    while mslr_variance_det(k, sigma2, s) < target && s < 1024.0 {
        s *= 2.0;
    }
    Proposal::Inflated { x_var: s, y_var: s }
}

fn value_at(kernel: &dyn Kernel, t: Statistic) -> Result<f64> {
    Ok(kernel.eval(t)?.value())
}

fn series_rows(
    kernel: &dyn Kernel,
    oracle: impl Fn(f64) -> Result<OracleEstimate>,
) -> Result<Vec<ValidationRow>> {
    rho_grid()
        .into_iter()
        .map(|rho| {
            let t = Statistic::Scalar(rho);
            let o = oracle(rho)?;
            let tail = kernel.tail_bound(t).unwrap_or(0.0);
            Ok(ValidationRow::new(t, value_at(kernel, t)?, o, o.error_bound + tail + SERIES_TOL))
        })
        .collect()
}

fn exact(value: f64) -> OracleEstimate {
    OracleEstimate {
        value,
        error_bound: 0.0,
        method: OracleMethod::Enumeration,
    }
}

/// Compares the kernel built from `spec` against its independent oracle.
pub fn validate_kernel(spec: &KernelSpec, opts: &ValidationOptions) -> Result<Vec<ValidationRow>> {
    let kernel = spec.build()?;
    match spec {
        KernelSpec::Gam { lambda } => {
            // e^{λ²ρ} is the NGCA kernel of μ = N(λ, 1)
            let mu = MuSpec::Gaussian { mean: *lambda, var: 1.0 };
            let k = gam_kernel(*lambda)?;
            series_rows(&k, |rho| quad_kernel_ngca(&mu, rho, NGCA_NODES))
        }
        KernelSpec::Ngca { mu, .. } => series_rows(&*kernel, |rho| quad_kernel_ngca(mu, rho, NGCA_NODES)),
        KernelSpec::Slab { alpha, .. } => {
            let kappa = crate::numerics::normal_quantile(1.0 - alpha / 2.0)?;
            let norm = (1.0 - alpha).powi(2);
            series_rows(&*kernel, |rho| {
                let b = bvn_rectangle(kappa, rho)?;
                Ok(OracleEstimate {
                    value: b.value / norm,
                    error_bound: b.error_bound / norm,
                    method: b.method,
                })
            })
        }
        KernelSpec::Si { link, .. } => match link {
            LinkSpec::Sign | LinkSpec::Quantized { .. } => series_rows(&*kernel, |rho| quad_kernel_si(link, rho)),
            other => Err(Error::Unsupported(format!("no oracle for single-index link {other:?}"))),
        },
        KernelSpec::Mslr { k, sigma2, .. } => {
            let per_sample = mslr_kernel(*k, *sigma2, 1)?;
            let proposal = opts.proposal.unwrap_or_else(|| mslr_default_proposal(*k, *sigma2));
            let d = 2 * *k as usize;
            let u: Vec<bool> = (0..d).map(|i| i < *k as usize).collect();
            (0..=*k)
                .map(|l| {
                    // v overlaps u in its last l coordinates
                    let start = (*k - l) as usize;
                    let v: Vec<bool> = (0..d).map(|i| i >= start && i < start + *k as usize).collect();
                    let seed = opts.seed.wrapping_add(l);
                    let o = mc_kernel_mslr_with(*k, *sigma2, &u, &v, opts.samples, seed, proposal)?;
                    let t = Statistic::Scalar(l as f64);
                    Ok(ValidationRow::new(t, value_at(&per_sample, t)?, o, o.error_bound))
                })
                .collect()
        }
        KernelSpec::Counterexample { n, r, alpha_c, .. } => {
            if n + 1 > MAX_ENUM_COORDS {
                return Err(Error::Resource(format!(
                    "counterexample enumeration needs n + 1 ≤ {MAX_ENUM_COORDS}, got n = {n}"
                )));
            }
            let per_sample = counterexample_kernel(*n, *r, *alpha_c, 1)?;
            let d = (*n + 1) as usize;
            let mut rows = Vec::new();
            for c in 0..=d {
                for b in 0..=(d - c) {
                    let a = d - c - b;
                    // c shared ones, then b disagreements split between u and v
                    let bu = b.div_ceil(2);
                    let u: Vec<bool> = (0..d).map(|i| i < c + bu).collect();
                    let v: Vec<bool> = (0..d).map(|i| i < c || (i >= c + bu && i < c + b)).collect();
                    let o = enum_kernel_counterexample(*n, *r, *alpha_c, &u, &v)?;
                    let t = Statistic::Counts {
                        a: a as u64,
                        b: b as u64,
                        c: c as u64,
                    };
                    let kv = value_at(&per_sample, t)?;
                    rows.push(ValidationRow::new(t, kv, o, 1e-12 * kv.abs().max(1.0)));
                }
            }
            Ok(rows)
        }
        KernelSpec::DenseClique { n, p } => (0..=(*n).min(30))
            .map(|l| {
                // p^{−C(l,2)} by repeated division
                let pairs = l * l.saturating_sub(1) / 2;
                let direct = (0..pairs).fold(1.0, |acc, _| acc / p);
                let t = Statistic::Scalar(l as f64);
                let kv = value_at(&*kernel, t)?;
                let bound = 4.0 * (pairs as f64 + 1.0) * f64::EPSILON * direct;
                Ok(ValidationRow::new(t, kv, exact(direct), bound))
            })
            .collect(),
        KernelSpec::Dirac { n } => [true, false]
            .into_iter()
            .map(|eq| {
                let direct = if eq { 2f64.powi(*n as i32) } else { 0.0 };
                let t = Statistic::Equal(eq);
                let kv = value_at(&*kernel, t)?;
                Ok(ValidationRow::new(t, kv, exact(direct), 4.0 * f64::EPSILON * direct))
            })
            .collect(),
        KernelSpec::Table { entries } => entries
            .iter()
            .map(|&(t, v)| Ok(ValidationRow::new(t, value_at(&*kernel, t)?, exact(v), 4.0 * f64::EPSILON * v.abs())))
            .collect(),
    }
}

/// The bimodal NGCA marginal `½N(0.8, 0.36) + ½N(−0.8, 0.36)`, whose first
/// nonzero Hermite coefficient beyond degree 0 is at degree 4.
pub fn bimodal_mu() -> MuSpec {
    MuSpec::GaussianMixture {
        components: vec![
            MixtureComponent {
                weight: 0.5,
                mean: 0.8,
                var: 0.36,
            },
            MixtureComponent {
                weight: 0.5,
                mean: -0.8,
                var: 0.36,
            },
        ],
    }
}

//! Closed-form likelihood-ratio kernels `K(T) = ⟨L_u, L_v⟩_Q`, group actions on
//! the statistic, and the `ρ_G` functional.

mod closed;
mod hermite_models;
mod model;

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::overlap_laws::{OverlapLaw, Statistic};

pub use closed::{
    counterexample_kernel, dense_clique_kernel, dirac_kernel, gam_kernel, mslr_kernel,
    CounterexampleKernel, DenseCliqueKernel, DiracKernel, GamKernel, MslrKernel, TableKernel,
};
pub use hermite_models::{
    ngca_kernel, si_kernel, si_lambda_coeffs, slab_kernel, LinkSpec, MixtureComponent, MuSpec,
    NgcaKernel, SiKernel, SlabKernel, S_STAR_SCAN, S_STAR_TOL,
};
pub use model::{
    builtin, builtin_models, dense_clique_parameters, KernelSpec, ModelDescriptor, ModelSpec,
    SyntheticAtom,
};

/// Kernel value in log space, with an explicit tag for exact zeros.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelValue {
    Zero,
    Ln(f64),
}

impl KernelValue {
    pub fn one() -> Self {
        KernelValue::Ln(0.0)
    }

    pub fn from_value(v: f64) -> Result<Self> {
        if v == 0.0 {
            Ok(KernelValue::Zero)
        } else if v > 0.0 && v.is_finite() {
            Ok(KernelValue::Ln(v.ln()))
        } else {
            Err(Error::Domain(format!("kernel value {v} is not a finite nonnegative number")))
        }
    }

    pub fn ln(self) -> f64 {
        match self {
            KernelValue::Zero => f64::NEG_INFINITY,
            KernelValue::Ln(l) => l,
        }
    }

    pub fn value(self) -> f64 {
        self.ln().exp()
    }

    /// `K − 1`, accurate for `K` near one.
    pub fn minus_one(self) -> f64 {
        match self {
            KernelValue::Zero => -1.0,
            KernelValue::Ln(l) => l.exp_m1(),
        }
    }

    /// `ln K^m`, `−∞` for a zero kernel.
    pub fn ln_pow(self, m: u64) -> f64 {
        match self {
            KernelValue::Zero => f64::NEG_INFINITY,
            KernelValue::Ln(l) => m as f64 * l,
        }
    }

    pub fn pow(self, m: u64) -> KernelValue {
        match self {
            KernelValue::Zero => KernelValue::Zero,
            KernelValue::Ln(l) => KernelValue::Ln(m as f64 * l),
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, KernelValue::Zero)
    }
}

/// `K(t) − 1 = Σ_{i≥1} c_i t^i`, truncated at `coeffs.len() − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    /// `coeffs[0]` is always zero.
    pub coeffs: Vec<f64>,
    /// `Σ_{i≥1} c_i` of the untruncated series, when known in closed form.
    pub total_mass: Option<f64>,
}

impl PowerSeries {
    pub fn max_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `Σ_{1≤i≤d} c_i t^i`.
    pub fn partial(&self, d: usize, t: f64) -> f64 {
        let d = d.min(self.max_degree());
        let mut acc = 0.0;
        for i in (1..=d).rev() {
            acc = acc * t + self.coeffs[i];
        }
        acc * t
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.partial(self.max_degree(), t)
    }

    pub fn partial_mass(&self) -> f64 {
        self.coeffs.iter().skip(1).sum()
    }

    /// Bound on `|Σ_{i>D} c_i t^i|` from the Parseval deficit (requires `c_i ≥ 0`).
    pub fn tail_bound(&self, t: f64) -> Option<f64> {
        let m = self.total_mass?;
        let deficit = (m - self.partial_mass()).max(0.0);
        Some(deficit * t.abs().min(1.0).powi(self.max_degree() as i32 + 1))
    }
}

/// Likelihood-ratio inner product as a function of the overlap statistic.
pub trait Kernel: Debug + Send + Sync {
    fn name(&self) -> String;

    /// `ln K(t)` (or an exact zero).
    fn eval(&self, t: Statistic) -> Result<KernelValue>;

    /// Power-series form in a scalar overlap, for series-backed kernels.
    fn series(&self) -> Option<&PowerSeries> {
        None
    }

    /// `K_d(t) − 1 = Σ_{i≤d} c_i t^i`; `None` for `d = ∞`.
    fn truncated_minus_one(&self, d: Option<usize>, t: Statistic) -> Result<f64> {
        match d {
            None => Ok(self.eval(t)?.minus_one()),
            Some(d) => {
                let s = self.series().ok_or_else(|| {
                    Error::Unsupported(format!("{} has no series form for degree truncation", self.name()))
                })?;
                let x = scalar(t)?;
                Ok(s.partial(d, x))
            }
        }
    }

    /// Bound on the truncation error of [`Kernel::eval`] at `t`.
    fn tail_bound(&self, _t: Statistic) -> Option<f64> {
        None
    }
}

pub(crate) fn scalar(t: Statistic) -> Result<f64> {
    match t {
        Statistic::Scalar(x) => Ok(x),
        other => Err(Error::Unsupported(format!("statistic {other} is not a scalar overlap"))),
    }
}

/// Finite group acting on the statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GroupSpec {
    #[default]
    Trivial,
    /// `u ↦ −u`, acting on a scalar overlap by `t ↦ −t`.
    SignFlip,
}

impl GroupSpec {
    /// `|G|`.
    pub fn order(self) -> usize {
        match self {
            GroupSpec::Trivial => 1,
            GroupSpec::SignFlip => 2,
        }
    }

    /// Values of the statistic over `(g(u), g'(v))` for `(g, g') ∈ G²`, one per
    /// distinct orbit point; each appears equally often in `G²`.
    pub fn orbit(self, t: Statistic) -> Result<Vec<Statistic>> {
        match self {
            GroupSpec::Trivial => Ok(vec![t]),
            GroupSpec::SignFlip => {
                let x = scalar(t)?;
                if x == 0.0 {
                    Ok(vec![Statistic::Scalar(0.0), Statistic::Scalar(0.0)])
                } else {
                    Ok(vec![Statistic::Scalar(x), Statistic::Scalar(-x)])
                }
            }
        }
    }

    /// Canonical orbit representative, used to merge atoms.
    pub fn canonical(self, t: Statistic) -> Result<Statistic> {
        match self {
            GroupSpec::Trivial => Ok(t),
            GroupSpec::SignFlip => Ok(Statistic::Scalar(scalar(t)?.abs())),
        }
    }

    /// Whether the group preserves the law (checked on atoms for discrete laws).
    pub fn preserves(self, law: &OverlapLaw) -> bool {
        match (self, law) {
            (GroupSpec::Trivial, _) => true,
            (GroupSpec::SignFlip, OverlapLaw::Sphere(_)) => true,
            (GroupSpec::SignFlip, OverlapLaw::Discrete(_)) => {
                let atoms = law.atoms().unwrap_or(&[]);
                atoms.iter().all(|a| match a.stat {
                    Statistic::Scalar(x) => {
                        let mirror: f64 = atoms
                            .iter()
                            .filter(|b| b.stat == Statistic::Scalar(-x))
                            .map(|b| b.prob)
                            .sum();
                        let own: f64 = atoms
                            .iter()
                            .filter(|b| b.stat == Statistic::Scalar(x))
                            .map(|b| b.prob)
                            .sum();
                        (mirror - own).abs() <= 1e-12
                    }
                    _ => false,
                })
            }
        }
    }
}

/// `ρ_G(t) = max over the orbit of |K − 1|`.
pub fn rho_g(kernel: &dyn Kernel, group: GroupSpec, t: Statistic) -> Result<f64> {
    let mut best: f64 = 0.0;
    for s in group.orbit(t)? {
        best = best.max(kernel.eval(s)?.minus_one().abs());
    }
    Ok(best)
}

/// Orbit average of `(K − 1)^k`.
pub fn group_avg_check(kernel: &dyn Kernel, group: GroupSpec, t: Statistic, k: u32) -> Result<f64> {
    let orbit = group.orbit(t)?;
    let mut acc = 0.0;
    for s in &orbit {
        acc += kernel.eval(*s)?.minus_one().powi(k as i32);
    }
    Ok(acc / orbit.len() as f64)
}

/// Orbit average of `K^m`, in log space.
pub fn orbit_avg_ln_pow(kernel: &dyn Kernel, group: GroupSpec, t: Statistic, m: u64) -> Result<f64> {
    let orbit = group.orbit(t)?;
    let mut acc = f64::NEG_INFINITY;
    for s in &orbit {
        acc = crate::numerics::log_add(acc, kernel.eval(*s)?.ln_pow(m));
    }
    Ok(acc - (orbit.len() as f64).ln())
}

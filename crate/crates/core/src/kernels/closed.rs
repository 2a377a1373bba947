use serde::{Deserialize, Serialize};

use super::{scalar, Kernel, KernelValue, PowerSeries};
use crate::error::{arg, Error, Result};
use crate::overlap_laws::Statistic;

/// Gaussian additive model: `K(t) = e^{λ² t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GamKernel {
    pub lambda: f64,
    series: PowerSeries,
}

/// Series degree kept for the exponential kernel; `λ^{2i}/i!` is far below
/// rounding by then for any `λ` used at desk scale.
const GAM_SERIES_DEGREE: usize = 170;

pub fn gam_kernel(lambda: f64) -> Result<GamKernel> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(arg(format!("lambda must be a finite nonnegative number, got {lambda}")));
    }
    let l2 = lambda * lambda;
    let mut coeffs = vec![0.0; GAM_SERIES_DEGREE + 1];
    let mut c = 1.0;
    for (i, slot) in coeffs.iter_mut().enumerate().skip(1) {
        c *= l2 / i as f64;
        *slot = c;
    }
    Ok(GamKernel {
        lambda,
        series: PowerSeries {
            coeffs,
            total_mass: Some(l2.exp_m1()),
        },
    })
}

impl Kernel for GamKernel {
    fn name(&self) -> String {
        format!("gam(lambda={})", self.lambda)
    }

    fn eval(&self, t: Statistic) -> Result<KernelValue> {
        Ok(KernelValue::Ln(self.lambda * self.lambda * scalar(t)?))
    }

    fn series(&self) -> Option<&PowerSeries> {
        Some(&self.series)
    }
}

/// Mixed sparse linear regression with `m` samples folded in:
/// `K(ℓ) = (1 − (ℓ/(k+σ²))²)^{−m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MslrKernel {
    pub k: u64,
    pub sigma2: f64,
    pub m: u64,
}

pub fn mslr_kernel(k: u64, sigma2: f64, m: u64) -> Result<MslrKernel> {
    if k == 0 {
        return Err(arg("k must be positive"));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(arg(format!("sigma2 must be positive, got {sigma2}")));
    }
    if m == 0 {
        return Err(arg("m must be positive"));
    }
    Ok(MslrKernel { k, sigma2, m })
}

impl Kernel for MslrKernel {
    fn name(&self) -> String {
        format!("mslr(k={},sigma2={},m={})", self.k, self.sigma2, self.m)
    }

    fn eval(&self, t: Statistic) -> Result<KernelValue> {
        let l = scalar(t)?;
        let x = l / (self.k as f64 + self.sigma2);
        if x.abs() >= 1.0 {
            return Err(Error::Singular(format!(
                "overlap {l} reaches k + sigma2 = {}",
                self.k as f64 + self.sigma2
            )));
        }
        Ok(KernelValue::Ln(-(self.m as f64) * (-x * x).ln_1p()))
    }
}

/// Kernel of the two-point counterexample over the count triple `(a, b, c)`:
/// `m·[a·ln(1+r²) + b·ln(1+r²α) + c·ln(1+r²α²)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleKernel {
    pub n: u64,
    pub r: f64,
    pub alpha_c: f64,
    pub m: u64,
}

pub fn counterexample_kernel(n: u64, r: f64, alpha_c: f64, m: u64) -> Result<CounterexampleKernel> {
    if n == 0 || m == 0 {
        return Err(arg("n and m must be positive"));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(arg(format!("r must lie in (0,1), got {r}")));
    }
    if !(alpha_c > 0.0 && alpha_c < 1.0) {
        return Err(arg(format!("alpha_c must lie in (0,1), got {alpha_c}")));
    }
    Ok(CounterexampleKernel { n, r, alpha_c, m })
}

impl CounterexampleKernel {
    /// One-coordinate factors `ln(1 + r²α^j)` for `j = 0, 1, 2`.
    pub fn log_factors(&self) -> [f64; 3] {
        let r2 = self.r * self.r;
        [
            r2.ln_1p(),
            (r2 * self.alpha_c).ln_1p(),
            (r2 * self.alpha_c * self.alpha_c).ln_1p(),
        ]
    }
}

impl Kernel for CounterexampleKernel {
    fn name(&self) -> String {
        format!(
            "counterexample(n={},r={},alpha_c={},m={})",
            self.n, self.r, self.alpha_c, self.m
        )
    }

    fn eval(&self, t: Statistic) -> Result<KernelValue> {
        let Statistic::Counts { a, b, c } = t else {
            return Err(Error::Unsupported(format!("counterexample kernel needs counts, got {t}")));
        };
        if a + b + c != self.n + 1 {
            return Err(arg(format!(
                "counts ({a},{b},{c}) do not sum to n + 1 = {}",
                self.n + 1
            )));
        }
        let [l0, l1, l2] = self.log_factors();
        let per = a as f64 * l0 + b as f64 * l1 + c as f64 * l2;
        Ok(KernelValue::Ln(self.m as f64 * per))
    }
}

/// Dense planted clique: `K(ℓ) = p^{−C(ℓ,2)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseCliqueKernel {
    pub n: u64,
    pub p: f64,
}

pub fn dense_clique_kernel(n: u64, p: f64) -> Result<DenseCliqueKernel> {
    if n == 0 {
        return Err(arg("n must be positive"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(arg(format!("p must lie in (0,1), got {p}")));
    }
    Ok(DenseCliqueKernel { n, p })
}

impl Kernel for DenseCliqueKernel {
    fn name(&self) -> String {
        format!("dense-clique(n={},p={})", self.n, self.p)
    }

    fn eval(&self, t: Statistic) -> Result<KernelValue> {
        let l = scalar(t)?;
        if l < 0.0 || l.fract() != 0.0 || l > self.n as f64 {
            return Err(arg(format!("clique overlap must be an integer in 0..=n, got {l}")));
        }
        let pairs = l * (l - 1.0) / 2.0;
        Ok(KernelValue::Ln(-pairs * self.p.ln()))
    }
}

/// `K = 2^n·1(u = v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracKernel {
    pub n: u64,
}

pub fn dirac_kernel(n: u64) -> Result<DiracKernel> {
    if n == 0 {
        return Err(arg("n must be positive"));
    }
    Ok(DiracKernel { n })
}

impl Kernel for DiracKernel {
    fn name(&self) -> String {
        format!("dirac(n={})", self.n)
    }

    fn eval(&self, t: Statistic) -> Result<KernelValue> {
        match t {
            Statistic::Equal(true) => Ok(KernelValue::Ln(self.n as f64 * std::f64::consts::LN_2)),
            Statistic::Equal(false) => Ok(KernelValue::Zero),
            other => Err(Error::Unsupported(format!("dirac kernel needs the equality indicator, got {other}"))),
        }
    }
}

/// Kernel given by an explicit table of statistic values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableKernel {
    pub entries: Vec<(Statistic, f64)>,
}

impl TableKernel {
    pub fn new(entries: Vec<(Statistic, f64)>) -> Result<Self> {
        for (s, k) in &entries {
            if !(*k >= 0.0 && k.is_finite()) {
                return Err(arg(format!("kernel value {k} at {s} must be finite and nonnegative")));
            }
        }
        Ok(TableKernel { entries })
    }
}

impl Kernel for TableKernel {
    fn name(&self) -> String {
        format!("table({} entries)", self.entries.len())
    }

    fn eval(&self, t: Statistic) -> Result<KernelValue> {
        self.entries
            .iter()
            .find(|(s, _)| *s == t)
            .ok_or_else(|| Error::Domain(format!("no table entry for statistic {t}")))
            .and_then(|(_, k)| KernelValue::from_value(*k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val(k: &dyn Kernel, t: Statistic) -> f64 {
        k.eval(t).unwrap().value()
    }

    #[test]
    fn gam_values() {
        let k0 = gam_kernel(0.0).unwrap();
        assert_eq!(val(&k0, Statistic::Scalar(0.7)), 1.0);
        let k1 = gam_kernel(1.0).unwrap();
        assert_eq!(val(&k1, Statistic::Scalar(0.0)), 1.0);
        assert!((val(&k1, Statistic::Scalar(0.5)) - 0.5f64.exp()).abs() < 1e-15);
        let s = k1.series().unwrap();
        assert!((s.eval(0.5) - 0.5f64.exp_m1()).abs() < 1e-15);
        assert!((s.coeffs[3] - 1.0 / 6.0).abs() < 1e-16);
        assert!(gam_kernel(-1.0).is_err());
    }

    #[test]
    fn mslr_values() {
        let k = mslr_kernel(3, 1.0, 1).unwrap();
        assert_eq!(val(&k, Statistic::Scalar(0.0)), 1.0);
        assert!((val(&k, Statistic::Scalar(3.0)) - 16.0 / 7.0).abs() < 1e-14);
        assert!((val(&k, Statistic::Scalar(2.0)) - 1.0 / (1.0 - 0.25)).abs() < 1e-14);
        let k5 = mslr_kernel(3, 1.0, 5).unwrap();
        assert!((val(&k5, Statistic::Scalar(3.0)) - (16.0f64 / 7.0).powi(5)).abs() < 1e-11);
        let bad = mslr_kernel(3, 1.0, 1).unwrap();
        assert!(matches!(bad.eval(Statistic::Scalar(4.0)), Err(Error::Singular(_))));
    }

    #[test]
    fn counterexample_pairs() {
        let (n, r, a, m) = (8u64, 0.3, 0.2, 2u64);
        let k = counterexample_kernel(n, r, a, m).unwrap();
        let r2 = r * r;
        let diag1 = val(&k, Statistic::Counts { a: n, b: 0, c: 1 });
        let want = (1.0 + a * a * r2).powi(m as i32) * (1.0 + r2).powi((n * m) as i32);
        assert!((diag1 - want).abs() < 1e-12 * want);
        let off = val(&k, Statistic::Counts { a: 0, b: n + 1, c: 0 });
        let want = (1.0 + a * r2).powi(((n + 1) * m) as i32);
        assert!((off - want).abs() < 1e-12 * want);
        assert!(k.eval(Statistic::Counts { a: 1, b: 1, c: 1 }).is_err());
    }

    #[test]
    fn clique_and_dirac() {
        let k = dense_clique_kernel(100, 0.5).unwrap();
        assert_eq!(val(&k, Statistic::Scalar(0.0)), 1.0);
        assert_eq!(val(&k, Statistic::Scalar(1.0)), 1.0);
        assert!((val(&k, Statistic::Scalar(2.0)) - 2.0).abs() < 1e-15);
        assert!((val(&k, Statistic::Scalar(4.0)) - 64.0).abs() < 1e-12);
        let d = dirac_kernel(20).unwrap();
        assert_eq!(d.eval(Statistic::Equal(false)).unwrap(), KernelValue::Zero);
        assert!((val(&d, Statistic::Equal(true)) - 1048576.0).abs() < 1e-6);
    }

    #[test]
    fn table_lookup() {
        let t = TableKernel::new(vec![(Statistic::Scalar(0.0), 1.0), (Statistic::Scalar(1.0), 2.0)]).unwrap();
        assert!((val(&t, Statistic::Scalar(1.0)) - 2.0).abs() < 1e-15);
        assert!(t.eval(Statistic::Scalar(0.5)).is_err());
    }
}

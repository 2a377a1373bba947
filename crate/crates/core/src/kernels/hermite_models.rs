//! Kernels of the form `1 + Σ c_i t^i` with `c_i` squared Hermite weights:
//! non-Gaussian component analysis, single-index models and slab truncation.

use serde::{Deserialize, Serialize};

use super::{scalar, Kernel, KernelValue, PowerSeries};
use crate::error::{arg, Error, Result};
use crate::numerics::{hermite_values, interval_coeffs, log_sum_exp, normal_pdf, normal_quantile, DEFAULT_MAX_DEGREE};
use crate::overlap_laws::Statistic;

/// `|ν_i|` below this counts as zero when locating the generative exponent.
pub const S_STAR_TOL: f64 = 1e-10;
/// The exponent search is flagged when nothing shows up in this many degrees.
pub const S_STAR_SCAN: usize = 20;

/// `sup_n sup_x |h_n(x)| e^{−x²/4}` for the normalized Hermite functions.
const CRAMER: f64 = 1.086_435;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub var: f64,
}

/// One-dimensional planted marginal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mu", rename_all = "snake_case")]
pub enum MuSpec {
    Gaussian { mean: f64, var: f64 },
    GaussianMixture { components: Vec<MixtureComponent> },
    /// `[value, probability]` pairs.
    Atoms { atoms: Vec<[f64; 2]> },
}

impl MuSpec {
    fn components(&self) -> Result<Vec<MixtureComponent>> {
        match self {
            MuSpec::Gaussian { mean, var } => Ok(vec![MixtureComponent {
                weight: 1.0,
                mean: *mean,
                var: *var,
            }]),
            MuSpec::GaussianMixture { components } => Ok(components.clone()),
            MuSpec::Atoms { .. } => Err(Error::Unsupported("atomic marginal has no density".into())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_total = |total: f64| {
            if (total - 1.0).abs() > 1e-12 {
                Err(arg(format!("mixture weights sum to {total}, not 1")))
            } else {
                Ok(())
            }
        };
        match self {
            MuSpec::Atoms { atoms } => {
                if atoms.is_empty() {
                    return Err(arg("atomic marginal needs at least one atom"));
                }
                if atoms.iter().any(|a| !(a[1] >= 0.0) || !a[0].is_finite()) {
                    return Err(arg("atoms need finite values and nonnegative probabilities"));
                }
                check_total(atoms.iter().map(|a| a[1]).sum())
            }
            _ => {
                let comps = self.components()?;
                if comps.is_empty() {
                    return Err(arg("mixture needs at least one component"));
                }
                for c in &comps {
                    if !(c.var > 0.0) || !c.mean.is_finite() || !(c.weight >= 0.0) {
                        return Err(arg(format!("bad mixture component {c:?}")));
                    }
                }
                check_total(comps.iter().map(|c| c.weight).sum())
            }
        }
    }

    /// `ν_i = E_μ[h_i(z)]` for `i = 0..=max_degree`.
    pub fn nu(&self, max_degree: usize) -> Result<Vec<f64>> {
        self.validate()?;
        let mut out = vec![0.0; max_degree + 1];
        match self {
            MuSpec::Atoms { atoms } => {
                for a in atoms {
                    for (o, h) in out.iter_mut().zip(hermite_values(max_degree, a[0])) {
                        *o += a[1] * h;
                    }
                }
            }
            _ => {
                for c in self.components()? {
                    for (o, v) in out.iter_mut().zip(gaussian_nu(c.mean, c.var, max_degree)) {
                        *o += c.weight * v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(dμ/dφ)(x)`, for marginals with a density.
    pub fn density_ratio(&self, x: f64) -> Result<f64> {
        let comps = self.components()?;
        let mut acc = 0.0;
        for c in comps {
            let z = (x - c.mean) / c.var.sqrt();
            acc += c.weight * normal_pdf(z) / c.var.sqrt();
        }
        Ok(acc / normal_pdf(x))
    }

    /// `ln (dμ/dφ)(x)`, finite where `φ(x)` underflows.
    pub fn ln_density_ratio(&self, x: f64) -> Result<f64> {
        let comps = self.components()?;
        let terms: Vec<f64> = comps
            .iter()
            .filter(|c| c.weight > 0.0)
            .map(|c| {
                let z = (x - c.mean) / c.var.sqrt();
                c.weight.ln() - 0.5 * z * z - 0.5 * c.var.ln()
            })
            .collect();
        Ok(log_sum_exp(&terms)? + 0.5 * x * x)
    }

    /// `χ²(μ‖N(0,1)) = Σ_{i≥1} ν_i²`, when finite.
    pub fn chi_squared(&self) -> Option<f64> {
        let comps = self.components().ok()?;
        let mut total = 0.0;
        for c1 in &comps {
            for c2 in &comps {
                let a = 1.0 / c1.var + 1.0 / c2.var - 1.0;
                if a <= 0.0 {
                    return None;
                }
                let b = c1.mean / c1.var + c2.mean / c2.var;
                let c = c1.mean * c1.mean / (2.0 * c1.var) + c2.mean * c2.mean / (2.0 * c2.var);
                total += c1.weight * c2.weight * (b * b / (2.0 * a) - c).exp() / (a * c1.var * c2.var).sqrt();
            }
        }
        Some(total - 1.0)
    }

    /// Uniform bound on `ν_i²` from Cramér's inequality.
    pub fn coefficient_bound(&self) -> Option<f64> {
        let e = match self {
            MuSpec::Atoms { atoms } => atoms.iter().map(|a| a[1] * (a[0] * a[0] / 4.0).exp()).sum(),
            _ => {
                let mut acc = 0.0;
                for c in self.components().ok()? {
                    let s = 1.0 - c.var / 2.0;
                    if s <= 0.0 {
                        return None;
                    }
                    acc += c.weight * (c.mean * c.mean / (4.0 * s)).exp() / s.sqrt();
                }
                acc
            }
        };
        Some((CRAMER * e).powi(2))
    }
}

/// `E[h_n(X)]` for `X ~ N(mean, var)`, from the generating function
/// `exp(mean·s + (var−1)s²/2)`.
fn gaussian_nu(mean: f64, var: f64, max_degree: usize) -> Vec<f64> {
    let mut nu = vec![0.0; max_degree + 1];
    nu[0] = 1.0;
    if max_degree >= 1 {
        nu[1] = mean;
    }
    for n in 2..=max_degree {
        let nf = n as f64;
        nu[n] = mean * nu[n - 1] / nf.sqrt() + (var - 1.0) * nu[n - 2] * ((nf - 1.0) / nf).sqrt();
    }
    nu
}

fn first_nonzero(c: &[f64], tol: f64) -> (Option<usize>, bool) {
    let s = c.iter().enumerate().skip(1).find(|(_, v)| v.abs() > tol).map(|(i, _)| i);
    let flagged = s.map_or(true, |s| s > S_STAR_SCAN);
    (s, flagged)
}

fn series_tail(series: &PowerSeries, coeff_bound: Option<f64>, t: f64) -> Option<f64> {
    let a = t.abs();
    if series.total_mass.is_some() {
        return series.tail_bound(t);
    }
    if a >= 1.0 {
        return None;
    }
    coeff_bound.map(|b| b * a.powi(series.max_degree() as i32 + 1) / (1.0 - a))
}

fn eval_series(series: &PowerSeries, t: f64) -> Result<KernelValue> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("overlap {t} lies outside [-1, 1]")));
    }
    let s = series.eval(t);
    if s <= -1.0 {
        return KernelValue::from_value(0.0);
    }
    Ok(KernelValue::Ln(s.ln_1p()))
}

/// Non-Gaussian component analysis: `K(t) = 1 + Σ ν_i² t^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct NgcaKernel {
    pub mu: MuSpec,
    pub nu: Vec<f64>,
    /// Generative exponent: first degree with `|ν_i| > S_STAR_TOL`.
    pub s_star: Option<usize>,
    /// Set when no coefficient clears the tolerance within `S_STAR_SCAN` degrees.
    pub s_star_flagged: bool,
    series: PowerSeries,
    coeff_bound: Option<f64>,
}

pub fn ngca_kernel(mu: MuSpec, max_degree: usize) -> Result<NgcaKernel> {
    if max_degree == 0 {
        return Err(arg("max_degree must be positive"));
    }
    let nu = mu.nu(max_degree)?;
    let (s_star, s_star_flagged) = first_nonzero(&nu, S_STAR_TOL);
    let mut coeffs: Vec<f64> = nu.iter().map(|v| v * v).collect();
    coeffs[0] = 0.0;
    let series = PowerSeries {
        coeffs,
        total_mass: mu.chi_squared(),
    };
    let coeff_bound = mu.coefficient_bound();
    Ok(NgcaKernel {
        mu,
        nu,
        s_star,
        s_star_flagged,
        series,
        coeff_bound,
    })
}

impl Kernel for NgcaKernel {
    fn name(&self) -> String {
        format!("ngca({:?})", self.mu)
    }

    fn eval(&self, t: Statistic) -> Result<KernelValue> {
        eval_series(&self.series, scalar(t)?)
    }

    fn series(&self) -> Option<&PowerSeries> {
        Some(&self.series)
    }

    fn tail_bound(&self, t: Statistic) -> Option<f64> {
        series_tail(&self.series, self.coeff_bound, scalar(t).ok()?)
    }
}

/// Link from the hidden direction `z = ⟨u,x⟩` to the label `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "link", rename_all = "snake_case")]
pub enum LinkSpec {
    Independent,
    Identity,
    Sign,
    Abs,
    /// `y = z + √noise_var·ξ`.
    NoisyLinear { noise_var: f64 },
    /// `y` is the index of the cell of `z` among the sorted cut points.
    Quantized { cuts: Vec<f64> },
}

impl LinkSpec {
    fn validate(&self) -> Result<()> {
        match self {
            LinkSpec::NoisyLinear { noise_var } if !(*noise_var > 0.0) => {
                Err(arg(format!("noise_var must be positive, got {noise_var}")))
            }
            LinkSpec::Quantized { cuts } => {
                if cuts.is_empty() || cuts.windows(2).any(|w| !(w[0] < w[1])) || cuts.iter().any(|c| !c.is_finite()) {
                    Err(arg("cuts must be finite and strictly increasing"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// `Σ_{i≥1} λ_i²`, when finite.
    fn total_mass(&self) -> Option<f64> {
        match self {
            LinkSpec::Independent => Some(0.0),
            LinkSpec::Identity | LinkSpec::Abs => None,
            LinkSpec::Sign => Some(1.0),
            LinkSpec::NoisyLinear { noise_var } => Some(1.0 / noise_var),
            LinkSpec::Quantized { cuts } => Some(cuts.len() as f64),
        }
    }

    /// `λ_i² ≤ bound` for every `i`.
    fn coefficient_bound(&self) -> f64 {
        match self {
            LinkSpec::Independent => 0.0,
            _ => 1.0,
        }
    }
}

/// `λ_i = ‖E[h_i(z) | y]‖` for `i = 0..=max_degree`, and the first nonzero degree.
pub fn si_lambda_coeffs(link: &LinkSpec, max_degree: usize) -> Result<(Vec<f64>, Option<usize>)> {
    link.validate()?;
    let mut lambda = vec![0.0; max_degree + 1];
    lambda[0] = 1.0;
    match link {
        LinkSpec::Independent => {}
        LinkSpec::Identity => lambda.iter_mut().for_each(|l| *l = 1.0),
        LinkSpec::Abs => {
            for (i, l) in lambda.iter_mut().enumerate() {
                *l = if i % 2 == 0 { 1.0 } else { 0.0 };
            }
        }
        LinkSpec::NoisyLinear { noise_var } => {
            // E[h_i(z) | y] = (1+s²)^{−i/2} h_i(y/√(1+s²)) and y/√(1+s²) is standard normal
            let shrink = (1.0 + noise_var).sqrt().recip();
            for (i, l) in lambda.iter_mut().enumerate() {
                *l = shrink.powi(i as i32);
            }
        }
        LinkSpec::Sign => return si_lambda_coeffs(&LinkSpec::Quantized { cuts: vec![0.0] }, max_degree),
        LinkSpec::Quantized { cuts } => {
            // for a discrete label, λ_i² = Σ_y (∫_{cell y} h_i φ)² / P(y)
            let mut edges = vec![f64::NEG_INFINITY];
            edges.extend(cuts.iter().cloned());
            edges.push(f64::INFINITY);
            let mut sq = vec![0.0; max_degree + 1];
            for w in edges.windows(2) {
                let cell = interval_coeffs(w[0], w[1], max_degree)?;
                let p = cell.coefficients[0];
                if p <= 0.0 {
                    continue;
                }
                for (s, c) in sq.iter_mut().zip(cell.coefficients.iter()) {
                    *s += c * c / p;
                }
            }
            for (l, s) in lambda.iter_mut().zip(sq) {
                *l = s.sqrt();
            }
        }
    }
    let (s_star, _) = first_nonzero(&lambda, S_STAR_TOL);
    Ok((lambda, s_star))
}

/// Single-index model: `K(t) = 1 + Σ λ_i² t^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SiKernel {
    pub link: LinkSpec,
    pub lambda: Vec<f64>,
    pub s_star: Option<usize>,
    pub s_star_flagged: bool,
    series: PowerSeries,
}

pub fn si_kernel(link: LinkSpec, max_degree: usize) -> Result<SiKernel> {
    if max_degree == 0 {
        return Err(arg("max_degree must be positive"));
    }
    let (lambda, s_star) = si_lambda_coeffs(&link, max_degree)?;
    let s_star_flagged = s_star.map_or(true, |s| s > S_STAR_SCAN);
    let mut coeffs: Vec<f64> = lambda.iter().map(|l| l * l).collect();
    coeffs[0] = 0.0;
    let series = PowerSeries {
        coeffs,
        total_mass: link.total_mass(),
    };
    Ok(SiKernel {
        link,
        lambda,
        s_star,
        s_star_flagged,
        series,
    })
}

impl SiKernel {
    /// Closed form of the full series, for links that have one.
    fn closed_form(&self, t: f64) -> Option<Result<f64>> {
        let singular = |x: f64| {
            if x >= 1.0 {
                Err(Error::Singular(format!("kernel diverges at overlap {t}")))
            } else {
                Ok(1.0 / (1.0 - x))
            }
        };
        match &self.link {
            LinkSpec::Independent => Some(Ok(1.0)),
            LinkSpec::Identity => Some(singular(t)),
            LinkSpec::Abs => Some(singular(t * t)),
            LinkSpec::NoisyLinear { noise_var } => Some(singular(t / (1.0 + noise_var))),
            LinkSpec::Sign => Some(Ok(1.0 + std::f64::consts::FRAC_2_PI * t.asin())),
            LinkSpec::Quantized { .. } => None,
        }
    }
}

impl Kernel for SiKernel {
    fn name(&self) -> String {
        format!("si({:?})", self.link)
    }

    fn eval(&self, t: Statistic) -> Result<KernelValue> {
        let x = scalar(t)?;
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("overlap {x} lies outside [-1, 1]")));
        }
        match self.closed_form(x) {
            Some(v) => KernelValue::from_value(v?.max(0.0)),
            None => eval_series(&self.series, x),
        }
    }

    fn series(&self) -> Option<&PowerSeries> {
        Some(&self.series)
    }

    fn tail_bound(&self, t: Statistic) -> Option<f64> {
        let x = scalar(t).ok()?;
        if self.closed_form(x).is_some() {
            return Some(0.0);
        }
        series_tail(&self.series, Some(self.link.coefficient_bound()), x)
    }
}

/// Slab truncation `{x : |⟨x,v⟩| ≤ κ}` with Gaussian volume `1 − α`:
/// `K(ρ) = 1 + (1−α)^{−2} Σ_{i≥1} f_i² ρ^i`, `f_i` the Hermite coefficients
/// of the indicator of `[−κ, κ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabKernel {
    pub alpha: f64,
    pub kappa: f64,
    /// `f_0..f_max_degree`; odd entries vanish.
    pub f: Vec<f64>,
    /// Estimate of `Σ_{i>max_degree} f_i²`, from further coefficients plus an
    /// `i^{−3/2}` envelope fitted to the last of them.
    pub declared_tail: f64,
    series: PowerSeries,
}

pub fn slab_kernel(alpha: f64, max_degree: usize) -> Result<SlabKernel> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(arg(format!("alpha must lie in (0,1), got {alpha}")));
    }
    if max_degree == 0 || max_degree % 2 == 1 {
        return Err(arg(format!("max_degree must be positive and even, got {max_degree}")));
    }
    let kappa = normal_quantile(1.0 - alpha / 2.0)?;
    let far = DEFAULT_MAX_DEGREE.max(2 * max_degree);
    let full = interval_coeffs(-kappa, kappa, far)?.coefficients;
    let f = full[..=max_degree].to_vec();

    let band: f64 = full[max_degree + 1..].iter().map(|c| c * c).sum();
    let block = far / 8;
    let mut envelope: f64 = 0.0;
    for b in 0..4 {
        let lo = far / 2 + 1 + b * block;
        let hi = (lo + block).min(far + 1);
        let mean = (lo..hi).map(|i| full[i] * full[i] * (i as f64).powf(1.5)).sum::<f64>() / (hi - lo) as f64;
        envelope = envelope.max(mean);
    }
    let declared_tail = band + envelope * 2.0 / (far as f64).sqrt();

    let scale = (1.0 - alpha).powi(-2);
    let mut coeffs: Vec<f64> = f.iter().map(|c| c * c * scale).collect();
    coeffs[0] = 0.0;
    let series = PowerSeries {
        coeffs,
        total_mass: Some(alpha / (1.0 - alpha)),
    };
    Ok(SlabKernel {
        alpha,
        kappa,
        f,
        declared_tail,
        series,
    })
}

impl SlabKernel {
    /// `Σ_{1≤i≤d} f_i²`.
    pub fn parseval_sum(&self, d: usize) -> f64 {
        self.f.iter().take(d + 1).skip(1).map(|c| c * c).sum()
    }
}

impl Kernel for SlabKernel {
    fn name(&self) -> String {
        format!("slab(alpha={})", self.alpha)
    }

    fn eval(&self, t: Statistic) -> Result<KernelValue> {
        let rho = scalar(t)?;
        if rho.abs() == 1.0 {
            // identical (or mirrored) slab: Q(K)/Q(K)² exactly
            return Ok(KernelValue::Ln(-(1.0 - self.alpha).ln()));
        }
        eval_series(&self.series, rho)
    }

    fn series(&self) -> Option<&PowerSeries> {
        Some(&self.series)
    }

    fn tail_bound(&self, t: Statistic) -> Option<f64> {
        let rho = scalar(t).ok()?;
        if rho.abs() == 1.0 {
            return Some(0.0);
        }
        self.series.tail_bound(rho)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::hermite_eval;

    #[test]
    fn standard_normal_marginal_is_null() {
        let k = ngca_kernel(MuSpec::Gaussian { mean: 0.0, var: 1.0 }, 40).unwrap();
        assert!(k.nu.iter().skip(1).all(|v| *v == 0.0));
        assert_eq!(k.s_star, None);
        assert!(k.s_star_flagged);
        assert_eq!(k.eval(Statistic::Scalar(0.7)).unwrap().value(), 1.0);
    }

    #[test]
    fn gaussian_second_coefficient() {
        for &v in &[0.5, 2.0, 1.3] {
            let k = ngca_kernel(MuSpec::Gaussian { mean: 0.0, var: v }, 10).unwrap();
            assert!((k.nu[2] - (v - 1.0) / 2f64.sqrt()).abs() < 1e-15);
            assert_eq!(k.nu[1], 0.0);
            assert_eq!(k.s_star, Some(2));
        }
        // shifted gaussian: ν_1 is the mean
        let k = ngca_kernel(MuSpec::Gaussian { mean: 0.3, var: 1.0 }, 10).unwrap();
        assert!((k.nu[1] - 0.3).abs() < 1e-15);
        assert!((k.nu[2] - 0.09 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rademacher_marginal() {
        let mu = MuSpec::Atoms { atoms: vec![[1.0, 0.5], [-1.0, 0.5]] };
        let k = ngca_kernel(mu, 30).unwrap();
        assert!(k.nu[1].abs() < 1e-15 && k.nu[2].abs() < 1e-15 && k.nu[3].abs() < 1e-15);
        assert!((k.nu[4] + 2.0 / 24f64.sqrt()).abs() < 1e-14);
        assert_eq!(k.s_star, Some(4));
        assert!(!k.s_star_flagged);
        assert!(k.tail_bound(Statistic::Scalar(0.5)).unwrap() < 1e-8);
    }

    #[test]
    fn gaussian_nu_matches_atoms_quadrature() {
        use crate::numerics::gauss_hermite_rule;
        let rule = gauss_hermite_rule::<f64>(80).unwrap();
        let (m, v) = (0.4, 0.7);
        let nu = gaussian_nu(m, v, 12);
        for (i, &n) in nu.iter().enumerate() {
            let q = rule.expect(|z| hermite_eval(i, m + v.sqrt() * z).unwrap());
            assert!((q - n).abs() < 1e-12, "i={i} {q} {n}");
        }
    }

    #[test]
    fn chi_squared_closed_form_matches_series() {
        let mu = MuSpec::GaussianMixture {
            components: vec![
                MixtureComponent { weight: 0.5, mean: 0.8, var: 0.36 },
                MixtureComponent { weight: 0.5, mean: -0.8, var: 0.36 },
            ],
        };
        let k = ngca_kernel(mu.clone(), 400).unwrap();
        let total = mu.chi_squared().unwrap();
        let partial = k.series().unwrap().partial_mass();
        assert!((total - partial).abs() < 1e-9, "{total} vs {partial}");
        // odd coefficients vanish for a symmetric mixture; s* is 4 here
        assert!(k.nu[1].abs() < 1e-15 && k.nu[3].abs() < 1e-15);
        assert!(k.nu[2].abs() < 1e-10);
        assert_eq!(k.s_star, Some(4));
    }

    #[test]
    fn si_examples() {
        let (l, s) = si_lambda_coeffs(&LinkSpec::Independent, 10).unwrap();
        assert!(l.iter().skip(1).all(|x| *x == 0.0));
        assert_eq!(s, None);
        let (l, s) = si_lambda_coeffs(&LinkSpec::Identity, 10).unwrap();
        assert!(l.iter().all(|x| *x == 1.0));
        assert_eq!(s, Some(1));
        let (l, s) = si_lambda_coeffs(&LinkSpec::Sign, 200).unwrap();
        assert!((l[1] * l[1] - 2.0 / std::f64::consts::PI).abs() < 1e-14);
        assert!(l[2].abs() < 1e-15);
        assert_eq!(s, Some(1));
    }

    #[test]
    fn si_closed_forms_match_series() {
        for link in [LinkSpec::Sign, LinkSpec::NoisyLinear { noise_var: 0.5 }] {
            let k = si_kernel(link.clone(), 400).unwrap();
            for &t in &[-0.8, -0.3, 0.0, 0.2, 0.6] {
                let closed = k.eval(Statistic::Scalar(t)).unwrap().minus_one();
                let series = k.series().unwrap().eval(t);
                let bound = series_tail(k.series().unwrap(), Some(1.0), t).unwrap();
                assert!((closed - series).abs() <= bound + 1e-13, "{link:?} t={t}");
            }
        }
        // a single cut at zero is the sign link
        let q = si_kernel(LinkSpec::Quantized { cuts: vec![0.0] }, 100).unwrap();
        let s = si_kernel(LinkSpec::Sign, 100).unwrap();
        assert_eq!(q.lambda, s.lambda);
    }

    #[test]
    fn slab_endpoints_and_symmetry() {
        let k = slab_kernel(0.1, 200).unwrap();
        assert!((k.kappa - 1.6448536269514722).abs() < 1e-12);
        assert_eq!(k.eval(Statistic::Scalar(0.0)).unwrap().value(), 1.0);
        assert!((k.eval(Statistic::Scalar(1.0)).unwrap().value() - 1.0 / 0.9).abs() < 1e-15);
        assert!((k.eval(Statistic::Scalar(-1.0)).unwrap().value() - 1.0 / 0.9).abs() < 1e-15);
        assert!(k.f.iter().skip(1).step_by(2).all(|c| c.abs() < 1e-15));
        for &r in &[0.2, 0.5, 0.9] {
            let a = k.eval(Statistic::Scalar(r)).unwrap().ln();
            let b = k.eval(Statistic::Scalar(-r)).unwrap().ln();
            assert!((a - b).abs() < 1e-15);
        }
        assert!(slab_kernel(0.1, 101).is_err());
        assert!(slab_kernel(1.0, 100).is_err());
    }

    #[test]
    fn slab_parseval_with_declared_tail() {
        for &alpha in &[0.05, 0.1, 0.3] {
            let k = slab_kernel(alpha, 100).unwrap();
            let gap = (k.parseval_sum(100) - alpha * (1.0 - alpha)).abs();
            assert!(gap <= 1e-6 + k.declared_tail, "alpha={alpha} gap={gap} tail={}", k.declared_tail);
            // the declared tail is an estimate, not the exact deficit
            assert!(k.declared_tail < 2.0 * gap);
        }
    }
}

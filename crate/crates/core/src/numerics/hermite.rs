use super::normal::{normal_cdf, normal_pdf};
use super::quadrature::QuadratureRule;
use super::Scalar;
use crate::error::{arg, Error, Result};

pub const DEFAULT_MAX_DEGREE: usize = 512;

/// Normalized probabilists' Hermite polynomial `h_degree(x)`, so that
/// `E[h_i(Z) h_j(Z)] = δ_ij` for standard normal `Z`.
pub fn hermite_eval<T: Scalar>(degree: usize, x: T) -> Result<T> {
    hermite_eval_with_max(degree, x, DEFAULT_MAX_DEGREE)
}

pub fn hermite_eval_with_max<T: Scalar>(degree: usize, x: T, max_degree: usize) -> Result<T> {
    if degree > max_degree {
        return Err(Error::DegreeOutOfRange {
            degree,
            max: max_degree,
        });
    }
    let mut prev = T::zero();
    let mut cur = T::one();
    for n in 0..degree {
        let next = step(x, cur, prev, n);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Values `h_0(x), ..., h_max_degree(x)`.
pub fn hermite_values<T: Scalar>(max_degree: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(max_degree + 1);
    fill_values(x, &mut out, max_degree);
    out
}

fn fill_values<T: Scalar>(x: T, out: &mut Vec<T>, max_degree: usize) {
    out.clear();
    out.push(T::one());
    if max_degree == 0 {
        return;
    }
    out.push(x);
    for n in 1..max_degree {
        let next = step(x, out[n], out[n - 1], n);
        out.push(next);
    }
}

#[inline]
fn step<T: Scalar>(x: T, cur: T, prev: T, n: usize) -> T {
    let nf = T::lit(n as f64);
    (x * cur - nf.sqrt() * prev) / (nf + T::one()).sqrt()
}

/// Coefficients of a function in the normalized Hermite basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteSeries<T> {
    pub coefficients: Vec<T>,
    /// Parseval deficit: `‖f‖² − Σ c_i²`, an estimate of the mass beyond the
    /// last retained degree.
    pub tail: T,
}

impl<T: Scalar> HermiteSeries<T> {
    pub fn max_degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, x: T) -> T {
        let d = self.max_degree();
        let h = hermite_values(d, x);
        self.coefficients
            .iter()
            .zip(h.iter())
            .fold(T::zero(), |acc, (&c, &hv)| acc + c * hv)
    }

    /// `Σ_{lo ≤ i ≤ hi} c_i²`, clamped to the stored range.
    pub fn energy(&self, lo: usize, hi: usize) -> T {
        let hi = hi.min(self.max_degree());
        if lo > hi {
            return T::zero();
        }
        self.coefficients[lo..=hi]
            .iter()
            .fold(T::zero(), |acc, &c| acc + c * c)
    }
}

/// Projects `f` onto `h_0..h_max_degree` with the given Gauss–Hermite rule.
///
/// The rule needs more nodes than `max_degree` so that `E[h_i h_i]` is exact.
pub fn hermite_coeffs<T, F>(
    f: F,
    max_degree: usize,
    rule: &QuadratureRule<T>,
) -> Result<HermiteSeries<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if rule.len() <= max_degree {
        return Err(arg(format!(
            "rule with {} nodes cannot resolve degree {}",
            rule.len(),
            max_degree
        )));
    }
    let mut coeffs = vec![T::zero(); max_degree + 1];
    let mut norm = T::zero();
    let mut h = Vec::with_capacity(max_degree + 1);
    for (&z, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
        if w == T::zero() {
            continue;
        }
        let fz = f(z);
        if !fz.is_finite() {
            return Err(Error::Evaluation(format!("f({z})")));
        }
        norm = norm + w * fz * fz;
        fill_values(z, &mut h, max_degree);
        let wf = w * fz;
        for (c, &hv) in coeffs.iter_mut().zip(h.iter()) {
            *c = *c + wf * hv;
        }
    }
    let energy = coeffs.iter().fold(T::zero(), |acc, &c| acc + c * c);
    Ok(HermiteSeries {
        coefficients: coeffs,
        tail: (norm - energy).max(T::zero()),
    })
}

/// Exact coefficients of the indicator of `[a, b]` (either end may be
/// infinite), from `∫_a^b h_i φ = (h_{i−1}(a)φ(a) − h_{i−1}(b)φ(b)) / √i`.
pub fn interval_coeffs<T: Scalar>(a: T, b: T, max_degree: usize) -> Result<HermiteSeries<T>> {
    if a.is_nan() || b.is_nan() || a > b {
        return Err(arg(format!("interval [{a}, {b}] is empty or malformed")));
    }
    let mass = normal_cdf(b) - normal_cdf(a);
    let boundary = |x: T| -> (Vec<T>, T) {
        if x.is_infinite() {
            (Vec::new(), T::zero())
        } else {
            (hermite_values(max_degree.saturating_sub(1), x), normal_pdf(x))
        }
    };
    let (ha, pa) = boundary(a);
    let (hb, pb) = boundary(b);
    let mut coeffs = Vec::with_capacity(max_degree + 1);
    coeffs.push(mass);
    for i in 1..=max_degree {
        let ta = if ha.is_empty() { T::zero() } else { ha[i - 1] * pa };
        let tb = if hb.is_empty() { T::zero() } else { hb[i - 1] * pb };
        coeffs.push((ta - tb) / T::lit(i as f64).sqrt());
    }
    let energy = coeffs.iter().fold(T::zero(), |acc, &c| acc + c * c);
    Ok(HermiteSeries {
        coefficients: coeffs,
        tail: (mass - energy).max(T::zero()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gauss_hermite_rule;

    #[test]
    fn low_degree_values() {
        assert_eq!(hermite_eval(0, 3.7_f64).unwrap(), 1.0);
        assert!(hermite_eval(2, 1.0_f64).unwrap().abs() < 1e-15);
        // h3(x) = (x^3 - 3x)/sqrt(6)
        let h3 = hermite_eval(3, 2.0_f64).unwrap();
        assert!((h3 - 2.0 / 6f64.sqrt()).abs() < 1e-14);
        let h3f = hermite_eval(3, 2.0_f32).unwrap();
        assert!((h3f - 2.0 / 6f32.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn degree_bound_is_enforced() {
        assert!(matches!(
            hermite_eval(513, 0.1_f64),
            Err(Error::DegreeOutOfRange { degree: 513, max: 512 })
        ));
        assert!(hermite_eval(512, 0.1_f64).is_ok());
    }

    #[test]
    fn values_match_single_evaluation() {
        let v = hermite_values(40, 1.3_f64);
        for (d, &x) in v.iter().enumerate() {
            assert!((x - hermite_eval(d, 1.3).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn projection_of_simple_functions() {
        let rule = gauss_hermite_rule::<f64>(40).unwrap();
        let one = hermite_coeffs(|_| 1.0, 10, &rule).unwrap();
        assert!((one.coefficients[0] - 1.0).abs() < 1e-13);
        assert!(one.coefficients[1..].iter().all(|c| c.abs() < 1e-12));
        let id = hermite_coeffs(|z| z, 10, &rule).unwrap();
        assert!((id.coefficients[1] - 1.0).abs() < 1e-13);
        assert!(id.tail < 1e-12);
    }

    #[test]
    fn indicator_second_coefficient() {
        let kappa = 1.2_f64;
        let s = interval_coeffs(-kappa, kappa, 8).unwrap();
        // ∫_{-κ}^{κ} (z²−1)/√2 φ = −√2 κ φ(κ)
        let expected = -(2f64).sqrt() * kappa * normal_pdf(kappa);
        assert!((s.coefficients[2] - expected).abs() < 1e-14);
        assert!(s.coefficients[1].abs() < 1e-15);
    }

    #[test]
    fn rejects_underresolved_rule() {
        let rule = gauss_hermite_rule::<f64>(5).unwrap();
        assert!(hermite_coeffs(|z| z, 5, &rule).is_err());
    }
}

use super::Scalar;
use crate::error::{arg, Result};

/// `ln(e^a + e^b)`, tolerating `−∞` on either side.
pub fn log_add<T: Scalar>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

pub fn log_sum_exp<T: Scalar>(log_terms: &[T]) -> Result<T> {
    if log_terms.is_empty() {
        return Err(arg("log_sum_exp of an empty list"));
    }
    let hi = log_terms
        .iter()
        .cloned()
        .fold(T::neg_infinity(), |a, b| a.max(b));
    if hi == T::neg_infinity() || hi == T::infinity() {
        return Ok(hi);
    }
    let mut acc = NeumaierSum::default();
    for &t in log_terms {
        acc.add((t - hi).exp());
    }
    Ok(hi + acc.total().ln())
}

/// `Σ w_i · exp(m · log_values[i])`, accumulated in log space.
pub fn stable_pow_expect<T: Scalar>(log_values: &[T], weights: &[T], m: u64) -> Result<T> {
    if log_values.is_empty() {
        return Err(arg("stable_pow_expect of an empty list"));
    }
    if log_values.len() != weights.len() {
        return Err(arg("log_values and weights differ in length"));
    }
    if m == 0 {
        return Err(arg("m must be positive"));
    }
    let mf = T::lit(m as f64);
    let mut terms = Vec::with_capacity(weights.len());
    for (&lv, &w) in log_values.iter().zip(weights.iter()) {
        if w < T::zero() || w.is_nan() {
            return Err(arg(format!("negative weight {w}")));
        }
        if w > T::zero() {
            terms.push(w.ln() + mf * lv);
        }
    }
    if terms.is_empty() {
        return Ok(T::zero());
    }
    Ok(log_sum_exp(&terms)?.exp())
}

/// Compensated summation.
#[derive(Debug, Clone, Copy)]
pub struct NeumaierSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> Default for NeumaierSum<T> {
    fn default() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }
}

impl<T: Scalar> NeumaierSum<T> {
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn total(&self) -> T {
        self.sum + self.comp
    }
}

/// `ln C(n, k)`; exact products for small arguments, log-gamma otherwise.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if k < 30 {
        let mut acc = 0.0;
        for j in 0..k {
            acc += (((n - j) as f64) / ((j + 1) as f64)).ln();
        }
        return acc;
    }
    let nf = n as f64;
    let kf = k as f64;
    libm::lgamma(nf + 1.0) - libm::lgamma(kf + 1.0) - libm::lgamma(nf - kf + 1.0)
}

/// `C(n, k)` as a float; exact whenever the result fits in 53 bits.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        match acc.checked_mul((n - j) as u128) {
            Some(v) => acc = v / (j + 1) as u128,
            None => return ln_binomial(n, k).exp(),
        }
    }
    acc as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_basics() {
        let v = log_sum_exp(&[0.0_f64, 0.0]).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-15);
        assert!(log_sum_exp::<f64>(&[]).is_err());
        assert_eq!(
            log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]).unwrap(),
            f64::NEG_INFINITY
        );
        let big = log_sum_exp(&[1000.0_f64, 1000.0]).unwrap();
        assert!((big - 1000.0 - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn pow_expect() {
        assert_eq!(stable_pow_expect(&[0.0_f64], &[1.0], 100).unwrap(), 1.0);
        let v = stable_pow_expect(&[2f64.ln()], &[0.5], 3).unwrap();
        assert!((v - 4.0).abs() < 1e-14);
        assert!(stable_pow_expect(&[0.0_f64], &[-1.0], 1).is_err());
        assert!(stable_pow_expect::<f64>(&[], &[], 1).is_err());
    }

    #[test]
    fn pow_expect_matches_naive() {
        let lv = [0.1_f64, -0.3, 0.7, 0.02];
        let w = [0.1_f64, 0.2, 0.3, 0.4];
        for m in 1..40u64 {
            let naive: f64 = lv
                .iter()
                .zip(w.iter())
                .map(|(l, w)| w * (m as f64 * l).exp())
                .sum();
            let s = stable_pow_expect(&lv, &w, m).unwrap();
            assert!((s - naive).abs() <= 1e-12 * naive);
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), 120.0);
        assert_eq!(binomial(20, 18), 190.0);
        assert_eq!(binomial(5, 7), 0.0);
        assert!((ln_binomial(100, 50) - binomial(100, 50).ln()).abs() < 1e-12);
        assert!((ln_binomial(1000, 5) - binomial(1000, 5).ln()).abs() < 1e-12);
    }
}

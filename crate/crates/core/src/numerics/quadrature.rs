use super::Scalar;
use crate::error::{arg, Result};

pub const DEFAULT_NODES: usize = 200;
pub const MAX_NODES: usize = 512;

/// Gauss–Hermite rule for the standard normal weight.
///
/// `weights` are `exp(log_weights)`; for large rules the outermost weights
/// underflow to zero in `f64` while `log_weights` stay finite.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    pub log_weights: Vec<T>,
}

impl<T: Scalar> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `E[f(Z)]` for standard normal `Z`.
    pub fn expect<F: Fn(T) -> T>(&self, f: F) -> T {
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .filter(|(_, &w)| w > T::zero())
            .fold(T::zero(), |acc, (&z, &w)| acc + w * f(z))
    }
}

/// Nodes and weights of the `num_nodes`-point rule, exact for polynomials of
/// degree up to `2·num_nodes − 1` against the standard normal density.
pub fn gauss_hermite_rule<T: Scalar>(num_nodes: usize) -> Result<QuadratureRule<T>> {
    if num_nodes == 0 || num_nodes > MAX_NODES {
        return Err(arg(format!(
            "num_nodes must lie in 1..={MAX_NODES}, got {num_nodes}"
        )));
    }
    let (x, logw) = physicists(num_nodes);
    // change of variables z = √2 x, weight w / √π
    let shift = 0.5 * std::f64::consts::PI.ln();
    let mut nodes = Vec::with_capacity(num_nodes);
    let mut log_weights = Vec::with_capacity(num_nodes);
    for (xi, lw) in x.iter().zip(logw.iter()) {
        nodes.push(T::lit(std::f64::consts::SQRT_2 * xi));
        log_weights.push(T::lit(lw - shift));
    }
    let weights = log_weights.iter().map(|lw| lw.exp()).collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        log_weights,
    })
}

/// Roots and log-weights for the weight `e^{-x²}`, ascending. Eigenvalues of
/// the Jacobi matrix seed a Newton polish on the orthonormal recurrence; the
/// weights come from the derivative at each root.
fn physicists(n: usize) -> (Vec<f64>, Vec<f64>) {
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut d = vec![0.0_f64; n];
    let mut e: Vec<f64> = (1..=n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    e[n - 1] = 0.0;
    tridiagonal_eigenvalues(&mut d, &mut e);
    d.sort_by(|a, b| a.total_cmp(b));
    // symmetrize: keep the non-negative half and mirror it
    let half = n.div_ceil(2);
    let mut x = vec![0.0_f64; n];
    let mut lw = vec![0.0_f64; n];
    for i in 0..half {
        let j = n - 1 - i;
        let mut z = 0.5 * (d[j] - d[i]);
        if n % 2 == 1 && i == half - 1 {
            z = 0.0;
        }
        for _ in 0..3 {
            if z == 0.0 {
                break;
            }
            let (p, dp) = orthonormal(n, z, pim4);
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs() {
                break;
            }
        }
        let (_, dp) = orthonormal(n, z, pim4);
        let w = std::f64::consts::LN_2 - 2.0 * dp.abs().ln();
        x[i] = -z;
        x[j] = z;
        lw[i] = w;
        lw[j] = w;
    }
    (x, lw)
}

/// Implicit QL iteration on a symmetric tridiagonal matrix with diagonal `d`
/// and off-diagonal `e` (`e[i]` couples rows `i` and `i+1`); `d` is replaced
/// by the eigenvalues.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Value of the degree-n orthonormal polynomial and its derivative.
fn orthonormal(n: usize, z: f64, pim4: f64) -> (f64, f64) {
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial_odd(k: u32) -> f64 {
        (1..=k).map(|j| (2 * j - 1) as f64).product()
    }

    #[test]
    fn one_point_rule() {
        let r = gauss_hermite_rule::<f64>(1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn low_moments() {
        let r2 = gauss_hermite_rule::<f64>(2).unwrap();
        assert!((r2.expect(|z| z * z) - 1.0).abs() < 1e-15);
        let r3 = gauss_hermite_rule::<f64>(3).unwrap();
        assert!((r3.expect(|z| z.powi(4)) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn monomial_exactness() {
        for &n in &[1usize, 2, 3, 5, 8, 13, 20, 30] {
            let r = gauss_hermite_rule::<f64>(n).unwrap();
            assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for deg in 0..=(2 * n - 1) as u32 {
                let est = r.expect(|z| z.powi(deg as i32));
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    double_factorial_odd(deg / 2)
                };
                // odd moments cancel between mirrored nodes; scale by E|Z|^deg
                let scale = r.expect(|z| z.abs().powi(deg as i32)).max(1.0);
                assert!(
                    (est - exact).abs() <= 1e-10 * scale,
                    "n={n} deg={deg} est={est} exact={exact}"
                );
            }
        }
    }

    #[test]
    fn large_rules_are_well_formed() {
        for &n in &[100usize, 200, 361, 512] {
            let r = gauss_hermite_rule::<f64>(n).unwrap();
            assert_eq!(r.len(), n);
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(r.log_weights.iter().all(|lw| lw.is_finite()));
            assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12, "n={n}");
            assert!((r.expect(|z| z * z) - 1.0).abs() < 1e-12);
            assert!((r.expect(|z| z.powi(6)) - 15.0).abs() < 1e-10);
        }
    }

    #[test]
    fn f32_rule() {
        let r = gauss_hermite_rule::<f32>(6).unwrap();
        assert!((r.expect(|z| z * z) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn bad_sizes() {
        assert!(gauss_hermite_rule::<f64>(0).is_err());
        assert!(gauss_hermite_rule::<f64>(513).is_err());
    }
}

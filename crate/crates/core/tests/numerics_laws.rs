use gfp_core::numerics::{gauss_hermite_rule, hermite_coeffs, hermite_values, normal_quantile};
use gfp_core::overlap_laws::{make_law, LawSpec, OverlapLaw, Statistic};
use gfp_core::QuadratureRule;

fn double_factorial(k: u32) -> f64 {
    (1..=k).rev().step_by(2).map(f64::from).product()
}

#[test]
fn hermite_orthonormality_to_degree_20() {
    let rule: QuadratureRule = gauss_hermite_rule(40).unwrap();
    let mut gram = [[0.0f64; 21]; 21];
    for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let h = hermite_values(20, z);
        for i in 0..=20 {
            for j in 0..=20 {
                gram[i][j] += w * h[i] * h[j];
            }
        }
    }
    for (i, row) in gram.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((g - want).abs() < 1e-10, "E[h_{i} h_{j}] = {g}");
        }
    }
}

#[test]
fn quadrature_exact_on_monomials() {
    for &n in &[1usize, 2, 3, 8, 20] {
        let rule: QuadratureRule = gauss_hermite_rule(n).unwrap();
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
        for deg in 0..(2 * n as u32) {
            let got = rule.expect(|z| z.powi(deg as i32));
            let want = if deg % 2 == 1 { 0.0 } else { double_factorial(deg.saturating_sub(1)) };
            // odd moments cancel terms of size about E|Z|^deg
            let scale = double_factorial(deg).max(1.0);
            assert!((got - want).abs() <= 1e-10 * scale, "N={n}, degree {deg}: {got} vs {want}");
        }
    }
}

#[test]
fn projection_error_within_declared_tail() {
    let rule: QuadratureRule = gauss_hermite_rule(120).unwrap();
    let fine: QuadratureRule = gauss_hermite_rule(300).unwrap();
    let fs: [(&str, fn(f64) -> f64); 3] = [
        ("sin", f64::sin),
        ("exp(z/2)", |z| (0.5 * z).exp()),
        ("1/(1+z^2)", |z| 1.0 / (1.0 + z * z)),
    ];
    for (name, f) in fs {
        for &d in &[4usize, 10, 30] {
            let s = hermite_coeffs(f, d, &rule).unwrap();
            let err2 = fine.expect(|z| (f(z) - s.eval(z)).powi(2));
            // the tail is a deficit of two quadrature estimates; allow for the
            // coarse rule's error on ‖f‖²
            let norm2 = fine.expect(|z| f(z).powi(2));
            assert!(err2 <= s.tail + 1e-6 * norm2, "{name} d={d}: {err2} > {}", s.tail);
        }
    }
}

#[test]
fn quantile_inverts_cdf() {
    assert!((normal_quantile(0.975f64).unwrap() - 1.959964).abs() < 1e-5);
    assert!(normal_quantile(0.0f64).is_err());
}

fn pmf(law: &OverlapLaw) -> Vec<(f64, f64)> {
    law.atoms().unwrap().iter().map(|a| (a.stat.value(), a.prob)).collect()
}

#[test]
fn hypergeometric_tail_bound() {
    let (n, k) = (100u64, 5u64);
    let law = make_law(&LawSpec::Hypergeometric { n, k }).unwrap();
    let ratio = (k * k) as f64 / (n - k) as f64;
    for delta in 1..=8 {
        let s = law.survival(delta as f64, None);
        let bound = k as f64 * ratio.powi(delta);
        assert!(s <= bound, "delta={delta}: {s} > {bound}");
    }
    let mean: f64 = pmf(&law).iter().map(|(l, p)| l * p).sum();
    assert!((mean - 0.25).abs() < 1e-14);
}

#[test]
fn signed_sparse_tail_shape() {
    let c = 0.05;
    for n in (2..=40).step_by(2) {
        for k in 1..=6u64.min(n) {
            let law = make_law(&LawSpec::SignedSparse { n, k }).unwrap();
            for i in 1..=10 {
                let t = i as f64 / 10.0;
                let s = law.survival(t - 1e-12, None);
                let bound = (-c * f64::min(n as f64 * t * t, k as f64 * t)).exp();
                assert!(s <= bound, "n={n} k={k} t={t}: {s} > {bound}");
            }
        }
    }
}

/// Upper `p` quantile of χ²(df), Wilson–Hilferty.
fn chi2_quantile(df: f64, p: f64) -> f64 {
    let z: f64 = normal_quantile(p).unwrap();
    let a = 2.0 / (9.0 * df);
    df * (1.0 - a + z * a.sqrt()).powi(3)
}

fn goodness_of_fit(spec: LawSpec, seed: u64) {
    let law = make_law(&spec).unwrap();
    let atoms = law.atoms().unwrap().to_vec();
    let n = 1_000_000usize;
    let draws = law.sample(seed, n).unwrap();
    let mut counts = vec![0u64; atoms.len()];
    for d in &draws {
        let i = atoms.iter().position(|a| a.stat == *d).expect("draw outside support");
        counts[i] += 1;
    }
    // pool atoms with expected count below 5 into one cell
    let (mut stat, mut cells) = (0.0, 0);
    let (mut pool_e, mut pool_o) = (0.0, 0.0);
    for (a, &o) in atoms.iter().zip(&counts) {
        let e = a.prob * n as f64;
        if e < 5.0 {
            pool_e += e;
            pool_o += o as f64;
            continue;
        }
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
        let sd = (a.prob * (1.0 - a.prob) / n as f64).sqrt();
        assert!((o as f64 / n as f64 - a.prob).abs() <= 5.0 * sd, "{spec:?}: atom {}", a.stat);
    }
    if pool_e >= 5.0 {
        stat += (pool_o - pool_e).powi(2) / pool_e;
        cells += 1;
    }
    let crit = chi2_quantile((cells - 1) as f64, 1.0 - 1e-3);
    assert!(stat < crit, "{spec:?}: chi2 = {stat} >= {crit}");
}

#[test]
fn samplers_pass_chi_square() {
    goodness_of_fit(LawSpec::Hypergeometric { n: 100, k: 5 }, 11);
    goodness_of_fit(LawSpec::SignedSparse { n: 30, k: 4 }, 12);
    goodness_of_fit(LawSpec::RademacherMean { n: 50 }, 13);
    goodness_of_fit(LawSpec::PairCounts { n: 8, rho: 0.3 }, 14);
}

#[test]
fn sphere_sampler_matches_survival() {
    let law = make_law(&LawSpec::Sphere { n: 20 }).unwrap();
    let n = 200_000;
    let draws = law.sample(5, n).unwrap();
    for &t in &[-0.4, -0.1, 0.0, 0.2, 0.5] {
        let emp = draws.iter().filter(|s| matches!(s, Statistic::Scalar(x) if *x >= t)).count() as f64 / n as f64;
        let p = law.survival(t, None);
        assert!((emp - p).abs() <= 5.0 * (p * (1.0 - p) / n as f64).sqrt(), "t={t}: {emp} vs {p}");
    }
}

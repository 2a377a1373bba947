//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs with `harness = false` so every line is printed even
//! when earlier criteria fail.

use std::process::Command;
use std::time::{Duration, Instant};

use gfp_core::criteria::{
    assumption_holds, check_equivalence_bounds, chi_squared, ld_samplewise, random_harness_case, CheckStatus,
};
use gfp_core::kernels::{builtin, builtin_models, slab_kernel, KernelSpec, MuSpec};
use gfp_core::numerics::{binomial, ln_binomial, log_sum_exp, normal_cdf, normal_quantile};
use gfp_core::oracles::{bimodal_mu, bvn_rectangle, validate_kernel, ValidationOptions, ValidationRow};
use serde_json::Value;

type Outcome = (bool, String);

fn gfp(args: &[&str]) -> (i32, Vec<u8>, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_gfp")).args(args).output().expect("run gfp");
    (out.status.code().unwrap_or(-1), out.stdout, start.elapsed())
}

/// Runs a scenario and returns its failed assertion names and the elapsed time.
fn scenario(name: &str) -> (Vec<String>, Value, Duration) {
    let (_, stdout, t) = gfp(&["reproduce", name, "--format", "json"]);
    let v: Value = serde_json::from_slice(&stdout).expect("scenario json");
    let failed = v["assertions"]
        .as_array()
        .expect("assertions")
        .iter()
        .filter(|a| a["pass"] != Value::Bool(true))
        .map(|a| format!("{} ({} {} {})", a["name"], a["lhs"], a["op"], a["rhs"]))
        .collect();
    (failed, v, t)
}

fn worst(rows: &[ValidationRow]) -> (bool, f64) {
    let ok = rows.iter().all(ValidationRow::passes);
    (ok, rows.iter().map(|r| r.diff).fold(0.0, f64::max))
}

fn kernel_oracle_agreement() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();

    let start = Instant::now();
    for spec in [
        KernelSpec::Mslr { k: 4, sigma2: 1.0, m: 1 },
        KernelSpec::Mslr { k: 4, sigma2: 40.0, m: 1 },
        KernelSpec::Mslr { k: 2, sigma2: 1.0, m: 1 },
    ] {
        let rows = validate_kernel(&spec, &ValidationOptions { seed: 1, ..Default::default() }).unwrap();
        let (pass, _) = worst(&rows);
        ok &= pass;
        if !pass {
            notes.push(format!("{spec:?} outside 3 sigma"));
        }
    }
    let mslr_time = start.elapsed();
    ok &= mslr_time < Duration::from_secs(60);
    notes.push(format!("mslr {:.1}s", mslr_time.as_secs_f64()));

    let series = [
        KernelSpec::Ngca { mu: MuSpec::Gaussian { mean: 0.0, var: 0.5 }, max_degree: 512 },
        KernelSpec::Ngca { mu: bimodal_mu(), max_degree: 512 },
        KernelSpec::Slab { alpha: 0.1, max_degree: 512 },
    ];
    for spec in series {
        let rows = validate_kernel(&spec, &ValidationOptions::default()).unwrap();
        let (_, diff) = worst(&rows);
        ok &= rows.len() == 21 && diff <= 1e-6;
        notes.push(format!("series max diff {diff:.1e}"));
    }

    let rows = validate_kernel(
        &KernelSpec::Counterexample { n: 8, r: 0.3, alpha_c: 0.2, m: 1 },
        &ValidationOptions::default(),
    )
    .unwrap();
    let (_, diff) = worst(&rows);
    ok &= diff <= 1e-12;
    notes.push(format!("counterexample n=8 max diff {diff:.1e}"));
    (ok, notes.join("; "))
}

fn counterexample_separation() -> Outcome {
    let (failed, _, t) = scenario("counterexample");
    let fast = t < Duration::from_secs(1);
    (failed.is_empty() && fast, format!("{:.2}s; failed: {failed:?}", t.as_secs_f64()))
}

fn parseval() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for alpha in [0.05, 0.1, 0.3] {
        let k = slab_kernel(alpha, 100).unwrap();
        let gap = (k.parseval_sum(100) - alpha * (1.0 - alpha)).abs();
        ok &= gap <= 1e-6 + k.declared_tail;
        notes.push(format!("alpha={alpha}: gap {gap:.2e} tail {:.2e}", k.declared_tail));
    }
    (ok, notes.join("; "))
}

fn gaussian_correlation() -> Outcome {
    let mut worst_gap = f64::INFINITY;
    for alpha in [0.1, 0.3, 0.5] {
        let kappa = normal_quantile(1.0 - alpha / 2.0).unwrap();
        let vol = 2.0 * normal_cdf(kappa) - 1.0;
        for i in 0..41 {
            let rho = -1.0 + f64::from(i) / 20.0;
            let b = bvn_rectangle(kappa, rho).unwrap().value;
            worst_gap = worst_gap.min(b - vol * vol);
        }
    }
    (worst_gap >= -1e-10, format!("min P(K∩K') - P(K)^2 = {worst_gap:.2e} over 123 points"))
}

fn ld_identity() -> Outcome {
    let mut worst_rel: f64 = 0.0;
    for d in builtin_models() {
        let model = d.build().unwrap();
        let chi1 = chi_squared(&model, 1).unwrap();
        for m in [1u64, 10, 100] {
            let ld = ld_samplewise(&model, m, None, 1).unwrap();
            let expect = 1.0 + m as f64 * chi1;
            worst_rel = worst_rel.max((ld - expect).abs() / expect.abs());
        }
    }
    (worst_rel <= 1e-10, format!("max relative gap {worst_rel:.2e}"))
}

/// `K^m` against `Σ_j C(m,j)(K−1)^j` on every atom, in log space when every
/// term is positive and directly otherwise.
fn binomial_expansion() -> Outcome {
    let mut worst_rel: f64 = 0.0;
    let mut models = 0;
    for d in builtin_models() {
        let model = d.build().unwrap();
        let Some(atoms) = model.law.atoms() else { continue };
        models += 1;
        for a in atoms {
            let kv = model.kernel.eval(a.stat).unwrap();
            let k = kv.value();
            let x = k - 1.0;
            for m in 1..=20u64 {
                let rel = if x > 0.0 {
                    let terms: Vec<f64> = (0..=m).map(|j| ln_binomial(m, j) + j as f64 * x.ln()).collect();
                    (log_sum_exp(&terms).unwrap() - kv.ln_pow(m)).exp_m1().abs()
                } else {
                    let sum: f64 = (0..=m).map(|j| binomial(m, j) * x.powi(j as i32)).sum();
                    let scale: f64 = (0..=m).map(|j| binomial(m, j) * x.abs().powi(j as i32)).sum();
                    (sum - kv.pow(m).value()).abs() / scale
                };
                worst_rel = worst_rel.max(rel);
            }
        }
    }
    (
        worst_rel <= 1e-9,
        format!("{models} discrete models, m<=20, max relative gap {worst_rel:.2e}"),
    )
}

fn assumption() -> Outcome {
    let mut failures = Vec::new();
    for d in builtin_models() {
        let model = d.build().unwrap();
        let r = assumption_holds(&model, 10).unwrap();
        if !(r.holds && r.min >= -1e-12) {
            failures.push(format!("{} (min {}, witness {:?})", d.name, r.min, r.witness));
        }
    }
    (failures.is_empty(), format!("failing: {failures:?}"))
}

fn equivalence_harness() -> Outcome {
    let start = Instant::now();
    let mut violations = 0;
    let mut premise_failed = 0;
    for seed in 0..100 {
        let case = random_harness_case(seed, 10).unwrap();
        let rep = check_equivalence_bounds(&case.model, case.runtime, case.m, 0.0).unwrap();
        violations += rep
            .checks
            .iter()
            .filter(|c| c.name != "rho-fp-le-gfp" && c.status == CheckStatus::Violated)
            .count();
        premise_failed += rep.checks.iter().filter(|c| c.status == CheckStatus::PremiseFailed).count();
    }
    let t = start.elapsed();
    (
        violations == 0 && t < Duration::from_secs(60),
        format!("{violations} violations over 100 models, {premise_failed} premise-failed, {:.1}s", t.as_secs_f64()),
    )
}

fn countermodels() -> Outcome {
    let (dirac, _, _) = scenario("dirac");
    let (clique, _, _) = scenario("dense-clique");
    (
        dirac.is_empty() && clique.is_empty(),
        format!("dirac failed: {dirac:?}; dense-clique failed: {clique:?}"),
    )
}

fn mslr_desk_scale() -> Outcome {
    let (failed, _, t) = scenario("mslr");
    let fast = t < Duration::from_secs(10);
    (failed.is_empty() && fast, format!("{:.2}s; failed: {failed:?}", t.as_secs_f64()))
}

fn binomial_ratio() -> Outcome {
    let mut worst_ratio: f64 = 0.0;
    let mut exact_ok = true;
    for n in 3..=200u64 {
        for t in 1..n {
            exact_ok &= (t + 1) * (n - t + 1) <= 4 * t * (n - t);
            let ln_r = 2.0 * ln_binomial(n, t) - ln_binomial(n, t - 1) - ln_binomial(n, t + 1);
            worst_ratio = worst_ratio.max(ln_r.exp());
        }
    }
    (exact_ok && worst_ratio <= 4.0 + 1e-12, format!("max ratio {worst_ratio:.6}"))
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 4] = [
        &["sweep", "--model", "mslr", "--criterion", "all", "--q", "2:64:4", "--m", "1:100:3"],
        &["criterion", "--model", "counterexample", "--criterion", "fp,gfp,sq", "--q", "4,e^3", "--m", "8"],
        &["kernel", "--model", "mslr", "--seed", "5"],
        &["reproduce", "slab-truncation"],
    ];
    let mut differing = Vec::new();
    for args in runs {
        let (c1, a, _) = gfp(args);
        let (c2, b, _) = gfp(args);
        if c1 != c2 || a != b || a.is_empty() {
            differing.push(args.join(" "));
        }
    }
    (differing.is_empty(), format!("{} commands; differing: {differing:?}", runs.len()))
}

fn main() {
    // the built-in models used above must exist
    for name in ["mslr", "counterexample", "dense-clique", "dirac"] {
        builtin(name).unwrap();
    }
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("kernel-oracle agreement", kernel_oracle_agreement),
        ("counterexample separation", counterexample_separation),
        ("slab Parseval sum", parseval),
        ("Gaussian correlation instance", gaussian_correlation),
        ("LD / chi-squared identity", ld_identity),
        ("binomial expansion", binomial_expansion),
        ("correlation assumption on built-ins", assumption),
        ("equivalence inequality harness", equivalence_harness),
        ("Dirac and dense-clique countermodels", countermodels),
        ("mSLR desk scale", mslr_desk_scale),
        ("binomial ratio bound", binomial_ratio),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = f();
        failed += usize::from(!ok);
        println!("criterion {:>2} {}: {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

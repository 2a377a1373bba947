//! Laws of the overlap statistic `T(u,v)` for `u, v` drawn independently from
//! a prior, with survival, generalized-inverse and expectation access.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::numerics::{integrate, ln_binomial, NeumaierSum};

/// Mass comparisons treat values within this of each other as equal.
pub const MASS_TOL: f64 = 1e-12;

/// Slack for comparing a computed mass against a target of size `mass`.
/// Relative, so that targets like `q⁻² = e^{−40}` are not swamped.
pub fn mass_slack(mass: f64) -> f64 {
    MASS_TOL * mass.abs()
}

/// Value of the sufficient overlap statistic for one pair of signals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Statistic {
    /// Euclidean overlap `⟨u,v⟩` (or support intersection size).
    Scalar(f64),
    /// Coordinate agreement counts: `a` both zero, `b` disagreeing, `c` both one.
    Counts { a: u64, b: u64, c: u64 },
    /// Whether the two signals coincide.
    Equal(bool),
}

impl Statistic {
    /// The scalar read by the identity transform: the overlap itself, `c` for
    /// count triples (their Euclidean overlap) and 0/1 for equality.
    pub fn value(&self) -> f64 {
        match *self {
            Statistic::Scalar(t) => t,
            Statistic::Counts { c, .. } => c as f64,
            Statistic::Equal(e) => f64::from(u8::from(e)),
        }
    }

    /// Euclidean overlap, when the statistic carries one.
    pub fn overlap(&self) -> Option<f64> {
        match *self {
            Statistic::Scalar(t) => Some(t),
            Statistic::Counts { c, .. } => Some(c as f64),
            Statistic::Equal(_) => None,
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::Scalar(t) => write!(f, "{t}"),
            Statistic::Counts { a, b, c } => write!(f, "({a},{b},{c})"),
            Statistic::Equal(e) => write!(f, "{}", if *e { "u=v" } else { "u!=v" }),
        }
    }
}

/// Prior descriptor from which a law is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum LawSpec {
    /// Binary k-sparse signals: `|supp u ∩ supp v|`.
    Hypergeometric { n: u64, k: u64 },
    /// k-sparse signals with random signs, entries `±1/√k`: overlap on the grid `j/k`.
    SignedSparse { n: u64, k: u64 },
    /// Uniform unit vectors in `R^n`: overlap is one coordinate of a sphere point.
    Sphere { n: u64 },
    /// Uniform `{±1/√n}^n`: overlap is a mean of `n` signs.
    RademacherMean { n: u64 },
    /// Two-point prior (`u₁` w.p. `rho`); `values` are the statistic for the
    /// pair classes `(u₁,u₁)`, `(u₁,u₂)`, `(u₂,u₂)`.
    TwoPoint { rho: f64, values: [f64; 3] },
    /// The two-point prior on `u₁ = (1,0,…,0)`, `u₂ = (0,1,…,1)` in `{0,1}^{n+1}`,
    /// recorded through the count triple.
    PairCounts { n: u64, rho: f64 },
    /// Uniform over the `C(n, ⌊9n/10⌋)` binary vectors of weight `⌊9n/10⌋`,
    /// recorded through the equality indicator.
    Diagonal { n: u64 },
    /// Explicit atoms.
    Custom { atoms: Vec<Atom> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub stat: Statistic,
    pub prob: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub threshold: f64,
    pub achieved_mass: f64,
    /// Whether some level carries survival mass equal to the request.
    pub exact: bool,
}

/// Which side of a level an event keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `h(T) ≥ level`
    AtLeast,
    /// `h(T) < level`
    Below,
    /// `h(T) ≤ level`
    AtMost,
}

impl Side {
    fn keeps(self, h: f64, level: f64) -> bool {
        match self {
            Side::AtLeast => h >= level,
            Side::Below => h < level,
            Side::AtMost => h <= level,
        }
    }
}

/// Event `{h(T) ⋄ level}`.
pub struct Event<'a> {
    pub transform: &'a (dyn Fn(Statistic) -> f64 + Sync),
    pub side: Side,
    pub level: f64,
}

impl Event<'_> {
    pub fn contains(&self, s: Statistic) -> bool {
        self.side.keeps((self.transform)(s), self.level)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OverlapLaw {
    Discrete(DiscreteLaw),
    Sphere(SphereLaw),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLaw {
    spec: LawSpec,
    atoms: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereLaw {
    n: u64,
    ln_norm: f64,
    /// Relative tolerance for each adaptive quadrature piece.
    pub rel_tol: f64,
}

pub fn make_law(spec: &LawSpec) -> Result<OverlapLaw> {
    let atoms = match spec {
        LawSpec::Hypergeometric { n, k } => hypergeometric_atoms(*n, *k)?,
        LawSpec::SignedSparse { n, k } => signed_sparse_atoms(*n, *k)?,
        LawSpec::Sphere { n } => return SphereLaw::new(*n).map(OverlapLaw::Sphere),
        LawSpec::RademacherMean { n } => rademacher_atoms(*n)?,
        LawSpec::TwoPoint { rho, values } => {
            check_rho(*rho)?;
            let r = *rho;
            vec![
                atom(Statistic::Scalar(values[0]), r * r),
                atom(Statistic::Scalar(values[1]), 2.0 * r * (1.0 - r)),
                atom(Statistic::Scalar(values[2]), (1.0 - r) * (1.0 - r)),
            ]
        }
        LawSpec::PairCounts { n, rho } => {
            check_rho(*rho)?;
            if *n == 0 {
                return Err(arg("pair_counts requires n ≥ 1"));
            }
            let r = *rho;
            vec![
                atom(Statistic::Counts { a: *n, b: 0, c: 1 }, r * r),
                atom(
                    Statistic::Counts {
                        a: 0,
                        b: n + 1,
                        c: 0,
                    },
                    2.0 * r * (1.0 - r),
                ),
                atom(Statistic::Counts { a: 1, b: 0, c: *n }, (1.0 - r) * (1.0 - r)),
            ]
        }
        LawSpec::Diagonal { n } => {
            if *n == 0 {
                return Err(arg("diagonal law requires n ≥ 1"));
            }
            let p = (-ln_binomial(*n, diagonal_weight(*n))).exp();
            vec![atom(Statistic::Equal(true), p), atom(Statistic::Equal(false), 1.0 - p)]
        }
        LawSpec::Custom { atoms } => {
            if atoms.is_empty() {
                return Err(arg("custom law needs at least one atom"));
            }
            if atoms.iter().any(|a| !(a.prob >= 0.0) || !a.prob.is_finite()) {
                return Err(arg("custom atom probabilities must be finite and nonnegative"));
            }
            let total: f64 = atoms.iter().map(|a| a.prob).sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(arg(format!("custom atom probabilities sum to {total}")));
            }
            atoms.iter().map(|a| atom(a.stat, a.prob / total)).collect()
        }
    };
    Ok(OverlapLaw::Discrete(DiscreteLaw {
        spec: spec.clone(),
        atoms,
    }))
}

/// Weight `⌊9n/10⌋` of the signals under the diagonal prior.
pub fn diagonal_weight(n: u64) -> u64 {
    9 * n / 10
}

fn atom(stat: Statistic, prob: f64) -> Atom {
    Atom { stat, prob }
}

fn check_rho(rho: f64) -> Result<()> {
    if (0.0..=1.0).contains(&rho) {
        Ok(())
    } else {
        Err(arg(format!("rho must lie in [0,1], got {rho}")))
    }
}

fn check_nk(n: u64, k: u64) -> Result<()> {
    if n == 0 {
        return Err(arg("n must be positive"));
    }
    if k == 0 || k > n {
        return Err(arg(format!("need 1 ≤ k ≤ n, got k={k}, n={n}")));
    }
    Ok(())
}

/// `P(ℓ)` for `ℓ = 0..=k`, from the ratio recurrence in log space.
fn hypergeometric_pmf(n: u64, k: u64) -> Vec<f64> {
    let lo = (2 * k).saturating_sub(n);
    let mut logs = vec![f64::NEG_INFINITY; (k + 1) as usize];
    // P(lo) = C(k,lo) C(n−k,k−lo) / C(n,k)
    let mut cur = ln_binomial(k, lo) + ln_binomial(n - k, k - lo) - ln_binomial(n, k);
    logs[lo as usize] = cur;
    for l in lo..k {
        let num = ((k - l) as f64).powi(2);
        let den = ((l + 1) as f64) * ((n + l + 1 - 2 * k) as f64);
        cur += (num / den).ln();
        logs[(l + 1) as usize] = cur;
    }
    let hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = NeumaierSum::default();
    for &l in &logs {
        total.add((l - hi).exp());
    }
    let ln_total = hi + total.total().ln();
    logs.iter().map(|&l| (l - ln_total).exp()).collect()
}

fn hypergeometric_atoms(n: u64, k: u64) -> Result<Vec<Atom>> {
    check_nk(n, k)?;
    Ok(hypergeometric_pmf(n, k)
        .into_iter()
        .enumerate()
        .map(|(l, p)| atom(Statistic::Scalar(l as f64), p))
        .collect())
}

fn signed_sparse_atoms(n: u64, k: u64) -> Result<Vec<Atom>> {
    check_nk(n, k)?;
    let hyp = hypergeometric_pmf(n, k);
    let kk = k as i64;
    let mut probs = vec![0.0_f64; (2 * k + 1) as usize];
    for (l, &pl) in hyp.iter().enumerate() {
        if pl == 0.0 {
            continue;
        }
        let l = l as u64;
        // j = (#agree − #disagree) over the ℓ shared coordinates
        for plus in 0..=l {
            let j = 2 * plus as i64 - l as i64;
            let w = (ln_binomial(l, plus) - l as f64 * std::f64::consts::LN_2).exp();
            probs[(j + kk) as usize] += pl * w;
        }
    }
    Ok(probs
        .into_iter()
        .enumerate()
        .map(|(i, p)| atom(Statistic::Scalar((i as i64 - kk) as f64 / k as f64), p))
        .collect())
}

fn rademacher_atoms(n: u64) -> Result<Vec<Atom>> {
    if n == 0 {
        return Err(arg("n must be positive"));
    }
    let nf = n as f64;
    Ok((0..=n)
        .map(|b| {
            let t = (n as i64 - 2 * b as i64) as f64 / nf;
            let p = (ln_binomial(n, b) - nf * std::f64::consts::LN_2).exp();
            atom(Statistic::Scalar(t), p)
        })
        .collect())
}

impl SphereLaw {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(arg("sphere law needs n ≥ 2"));
        }
        let nf = n as f64;
        // ∫_0^π sin^{n−2}θ dθ = √π Γ((n−1)/2) / Γ(n/2)
        let ln_norm = 0.5 * std::f64::consts::PI.ln() - ln_gamma_half_step((nf - 1.0) / 2.0);
        Ok(SphereLaw {
            n,
            ln_norm,
            rel_tol: 1e-12,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Density of `θ = arccos T` on `[0, π]`.
    fn theta_density(&self, theta: f64) -> f64 {
        let s = theta.sin();
        if s <= 0.0 {
            return if self.n == 2 { (-self.ln_norm).exp() } else { 0.0 };
        }
        ((self.n as f64 - 2.0) * s.ln() - self.ln_norm).exp()
    }

    /// Density of `T` on `(−1, 1)`.
    pub fn density(&self, t: f64) -> f64 {
        if !(t > -1.0 && t < 1.0) {
            return 0.0;
        }
        let nf = self.n as f64;
        ((nf - 3.0) / 2.0 * (1.0 - t * t).ln() - self.ln_norm).exp()
    }

    /// Breakpoints in θ concentrating resolution where the mass sits.
    fn base_breaks(&self) -> Vec<f64> {
        let pi = std::f64::consts::PI;
        let mid = pi / 2.0;
        let s = 1.0 / (self.n as f64).sqrt();
        let mut b = vec![0.0, mid, pi];
        let mut j = 0.5;
        while j * s < mid {
            b.push(mid - j * s);
            b.push(mid + j * s);
            j *= 1.5;
        }
        b.sort_by(|x, y| x.total_cmp(y));
        b.dedup();
        b
    }

    /// `∫ f(cos θ) · density(θ)` over the θ-intervals where `keep` holds.
    fn integrate_region<F, K>(&self, f: &F, keep: &K) -> Result<f64>
    where
        F: Fn(f64) -> f64,
        K: Fn(f64) -> bool,
    {
        let pieces = self.region(keep);
        let mut acc = NeumaierSum::default();
        for (a, b) in pieces {
            let g = |theta: f64| {
                let d = self.theta_density(theta);
                if d == 0.0 {
                    0.0
                } else {
                    f(theta.cos()) * d
                }
            };
            let r = integrate(g, a, b, self.rel_tol, 0.0)?;
            acc.add(r.value);
        }
        Ok(acc.total())
    }

    /// Intervals in θ where `keep(cos θ)` holds, boundaries located by bisection.
    fn region<K: Fn(f64) -> bool>(&self, keep: &K) -> Vec<(f64, f64)> {
        let base = self.base_breaks();
        let mut grid = Vec::new();
        for w in base.windows(2) {
            let sub = 64;
            for i in 0..sub {
                grid.push(w[0] + (w[1] - w[0]) * i as f64 / sub as f64);
            }
        }
        grid.push(*base.last().unwrap());
        // classify cells by their midpoints; a change of state between two
        // neighbouring midpoints is refined to the boundary by bisection
        let mids: Vec<f64> = grid.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let cell: Vec<bool> = mids.iter().map(|&m| keep(m.cos())).collect();
        let mut cuts = vec![grid[0]];
        let mut states = vec![cell[0]];
        for i in 1..cell.len() {
            if cell[i] != cell[i - 1] {
                let (mut lo, mut hi) = (mids[i - 1], mids[i]);
                for _ in 0..80 {
                    let m = 0.5 * (lo + hi);
                    if m <= lo || m >= hi {
                        break;
                    }
                    if keep(m.cos()) == cell[i - 1] {
                        lo = m;
                    } else {
                        hi = m;
                    }
                }
                cuts.push(0.5 * (lo + hi));
                states.push(cell[i]);
            }
        }
        cuts.push(*grid.last().unwrap());
        // add the base breakpoints inside kept intervals for resolution
        let mut out = Vec::new();
        for (i, &st) in states.iter().enumerate() {
            if !st {
                continue;
            }
            let (a, b) = (cuts[i], cuts[i + 1]);
            if b <= a {
                continue;
            }
            let mut pts = vec![a];
            pts.extend(base.iter().copied().filter(|&x| x > a && x < b));
            pts.push(b);
            for w in pts.windows(2) {
                out.push((w[0], w[1]));
            }
        }
        out
    }
}

impl OverlapLaw {
    pub fn spec(&self) -> LawSpec {
        match self {
            OverlapLaw::Discrete(d) => d.spec.clone(),
            OverlapLaw::Sphere(s) => LawSpec::Sphere { n: s.n },
        }
    }

    pub fn atoms(&self) -> Option<&[Atom]> {
        match self {
            OverlapLaw::Discrete(d) => Some(&d.atoms),
            OverlapLaw::Sphere(_) => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, OverlapLaw::Discrete(_))
    }

    /// Whether the statistic is a real overlap (so `|T|` and sign flips make sense).
    pub fn is_scalar(&self) -> bool {
        match self {
            OverlapLaw::Discrete(d) => d.atoms.iter().all(|a| matches!(a.stat, Statistic::Scalar(_))),
            OverlapLaw::Sphere(_) => true,
        }
    }

    /// `P(h(T) ≥ r)`; `h` defaults to [`Statistic::value`].
    pub fn survival(&self, r: f64, transform: Option<&(dyn Fn(Statistic) -> f64 + Sync)>) -> f64 {
        let id = |s: Statistic| s.value();
        let h: &(dyn Fn(Statistic) -> f64 + Sync) = transform.unwrap_or(&id);
        if r == f64::NEG_INFINITY {
            return 1.0;
        }
        let ev = Event {
            transform: h,
            side: Side::AtLeast,
            level: r,
        };
        self.mass(&ev).unwrap_or(f64::NAN)
    }

    /// `P(T ∈ event)`.
    pub fn mass(&self, event: &Event<'_>) -> Result<f64> {
        self.expect_on(|_| 1.0, Some(event))
    }

    /// `E[f(T)]`.
    pub fn expect<F: Fn(Statistic) -> f64>(&self, f: F) -> Result<f64> {
        self.expect_on(f, None)
    }

    /// `E[f(T) · 1(T ∈ event)]`.
    pub fn expect_on<F: Fn(Statistic) -> f64>(&self, f: F, event: Option<&Event<'_>>) -> Result<f64> {
        match self {
            OverlapLaw::Discrete(d) => {
                let mut acc = NeumaierSum::default();
                for a in &d.atoms {
                    if a.prob == 0.0 {
                        continue;
                    }
                    if let Some(ev) = event {
                        if !ev.contains(a.stat) {
                            continue;
                        }
                    }
                    let v = f(a.stat);
                    if !v.is_finite() {
                        return Err(Error::Evaluation(format!("atom {}", a.stat)));
                    }
                    acc.add(a.prob * v);
                }
                Ok(acc.total())
            }
            OverlapLaw::Sphere(s) => {
                let g = |t: f64| f(Statistic::Scalar(t));
                match event {
                    None => s.integrate_region(&g, &|_| true),
                    Some(ev) => s.integrate_region(&g, &|t| ev.contains(Statistic::Scalar(t))),
                }
            }
        }
    }

    /// `sup{r : P(h(T) ≥ r) ≥ mass}`; for discrete laws this is an atom of `h(T)`.
    pub fn threshold_sup(
        &self,
        mass: f64,
        transform: Option<&(dyn Fn(Statistic) -> f64 + Sync)>,
    ) -> Result<ThresholdResult> {
        if !(mass > 0.0 && mass <= 1.0 + MASS_TOL) {
            return Err(arg(format!("mass must lie in (0,1], got {mass}")));
        }
        let id = |s: Statistic| s.value();
        let h: &(dyn Fn(Statistic) -> f64 + Sync) = transform.unwrap_or(&id);
        match self {
            OverlapLaw::Discrete(d) => {
                let mut levels: Vec<(f64, f64)> = Vec::with_capacity(d.atoms.len());
                for a in &d.atoms {
                    if a.prob > 0.0 {
                        levels.push((h(a.stat), a.prob));
                    }
                }
                if levels.iter().any(|(v, _)| v.is_nan()) {
                    return Err(Error::Evaluation("transform produced NaN".into()));
                }
                levels.sort_by(|x, y| y.0.total_cmp(&x.0));
                let mut acc = NeumaierSum::default();
                let mut i = 0;
                while i < levels.len() {
                    let v = levels[i].0;
                    while i < levels.len() && levels[i].0 == v {
                        acc.add(levels[i].1);
                        i += 1;
                    }
                    let s = acc.total();
                    if s >= mass - mass_slack(mass) {
                        return Ok(ThresholdResult {
                            threshold: v,
                            achieved_mass: s,
                            exact: (s - mass).abs() <= mass_slack(mass),
                        });
                    }
                }
                let last = levels.last().map(|l| l.0).unwrap_or(f64::NEG_INFINITY);
                Ok(ThresholdResult {
                    threshold: last,
                    achieved_mass: acc.total(),
                    exact: (acc.total() - mass).abs() <= mass_slack(mass),
                })
            }
            OverlapLaw::Sphere(_) => {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for i in 0..=4096 {
                    let t = -1.0 + 2.0 * i as f64 / 4096.0;
                    let v = h(Statistic::Scalar(t));
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                let surv = |r: f64| self.survival(r, Some(h));
                if surv(hi) >= mass {
                    let s = surv(hi);
                    return Ok(ThresholdResult {
                        threshold: hi,
                        achieved_mass: s,
                        exact: (s - mass).abs() <= 1e-9 * mass,
                    });
                }
                // survival(lo) = 1 ≥ mass
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if surv(mid) >= mass {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let s = surv(lo);
                Ok(ThresholdResult {
                    threshold: lo,
                    achieved_mass: s,
                    exact: (s - mass).abs() <= 1e-9 * mass,
                })
            }
        }
    }

    /// `count` independent statistic draws, simulated from the prior.
    pub fn sample(&self, seed: u64, count: usize) -> Result<Vec<Statistic>> {
        if count == 0 {
            return Err(arg("count must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = self.spec();
        let mut out = Vec::with_capacity(count);
        match &spec {
            LawSpec::Hypergeometric { n, k } => {
                for _ in 0..count {
                    out.push(Statistic::Scalar(draw_intersection(&mut rng, *n, *k) as f64));
                }
            }
            LawSpec::SignedSparse { n, k } => {
                for _ in 0..count {
                    let l = draw_intersection(&mut rng, *n, *k);
                    let mut j = 0i64;
                    for _ in 0..l {
                        j += if rng.gen::<bool>() { 1 } else { -1 };
                    }
                    out.push(Statistic::Scalar(j as f64 / *k as f64));
                }
            }
            LawSpec::Sphere { n } => {
                let chi = ChiSquared::new((*n - 1) as f64).map_err(|e| arg(e.to_string()))?;
                for _ in 0..count {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    let rest = chi.sample(&mut rng);
                    out.push(Statistic::Scalar(g / (g * g + rest).sqrt()));
                }
            }
            LawSpec::RademacherMean { n } => {
                let bin = Binomial::new(*n, 0.5).map_err(|e| arg(e.to_string()))?;
                for _ in 0..count {
                    let b = bin.sample(&mut rng);
                    out.push(Statistic::Scalar((*n as i64 - 2 * b as i64) as f64 / *n as f64));
                }
            }
            LawSpec::TwoPoint { rho, values } => {
                for _ in 0..count {
                    let u1 = rng.gen::<f64>() < *rho;
                    let v1 = rng.gen::<f64>() < *rho;
                    let idx = match (u1, v1) {
                        (true, true) => 0,
                        (false, false) => 2,
                        _ => 1,
                    };
                    out.push(Statistic::Scalar(values[idx]));
                }
            }
            LawSpec::PairCounts { n, rho } => {
                for _ in 0..count {
                    let u1 = rng.gen::<f64>() < *rho;
                    let v1 = rng.gen::<f64>() < *rho;
                    out.push(match (u1, v1) {
                        (true, true) => Statistic::Counts { a: *n, b: 0, c: 1 },
                        (false, false) => Statistic::Counts { a: 1, b: 0, c: *n },
                        _ => Statistic::Counts { a: 0, b: n + 1, c: 0 },
                    });
                }
            }
            LawSpec::Diagonal { n } => {
                let p = (-ln_binomial(*n, diagonal_weight(*n))).exp();
                for _ in 0..count {
                    out.push(Statistic::Equal(rng.gen::<f64>() < p));
                }
            }
            LawSpec::Custom { .. } => {
                let atoms = self.atoms().unwrap_or(&[]);
                let mut cdf = Vec::with_capacity(atoms.len());
                let mut acc = 0.0;
                for a in atoms {
                    acc += a.prob;
                    cdf.push(acc);
                }
                for _ in 0..count {
                    let u = rng.gen::<f64>() * acc;
                    let i = cdf.partition_point(|&c| c <= u).min(atoms.len() - 1);
                    out.push(atoms[i].stat);
                }
            }
        }
        Ok(out)
    }
}

/// `ln Γ(x + ½) − ln Γ(x)` without the cancellation of two large log-gammas.
fn ln_gamma_half_step(x: f64) -> f64 {
    if x < 30.0 {
        return libm::lgamma(x + 0.5) - libm::lgamma(x);
    }
    let corr = |z: f64| {
        let z2 = z * z;
        1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2)
            - 1.0 / (1680.0 * z * z2 * z2 * z2)
    };
    x * (0.5 / x).ln_1p() + 0.5 * x.ln() - 0.5 + corr(x + 0.5) - corr(x)
}

/// Size of the intersection of a fixed k-subset with a uniform k-subset of
/// `n`, drawing the second subset element by element.
fn draw_intersection<R: Rng>(rng: &mut R, n: u64, k: u64) -> u64 {
    let mut hits = 0;
    for j in 0..k {
        let p = (k - hits) as f64 / (n - j) as f64;
        if rng.gen::<f64>() < p {
            hits += 1;
        }
    }
    hits
}

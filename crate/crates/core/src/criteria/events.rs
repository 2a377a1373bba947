//! Event optimization for the generalized FP infimum on discrete laws.
//!
//! Events are unions of group orbits of atoms. Minimizing `E[K^m·1(A)]`
//! subject to `π²(A) ≥ 1 − q⁻²` is a 0/1 knapsack on the complement: exclude
//! orbit atoms of largest total contribution within excluded mass `q⁻²`.

use std::collections::BTreeMap;

use crate::numerics::{log_add, log_sum_exp};
use crate::overlap_laws::Statistic;

/// Exact search is used up to this many candidate orbit atoms.
pub const DP_MAX_ATOMS: usize = 64;
/// Pareto frontiers larger than this fall back to the bracket.
const STATE_CAP: usize = 400_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitAtom {
    pub rep: Statistic,
    pub prob: f64,
    /// `ln Σ_{atoms in orbit} p·K^m`; `−∞` for a zero kernel.
    pub ln_value: f64,
}

/// Merges atoms sharing a canonical representative.
pub fn merge_orbits(items: impl IntoIterator<Item = (Statistic, Statistic, f64, f64)>) -> Vec<OrbitAtom> {
    // (canonical, original, prob, ln contribution)
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut out: Vec<OrbitAtom> = Vec::new();
    for (canon, _orig, p, lv) in items {
        let key = format!("{canon}");
        match index.get(&key) {
            Some(&i) => {
                out[i].prob += p;
                out[i].ln_value = log_add(out[i].ln_value, lv);
            }
            None => {
                index.insert(key, out.len());
                out.push(OrbitAtom {
                    rep: canon,
                    prob: p,
                    ln_value: lv,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventSolution {
    /// `ln` of the included value of the best feasible event found.
    pub ln_value: f64,
    /// `ln` of a certified lower bound on the infimum.
    pub ln_lower: f64,
    pub excluded_mass: f64,
    pub excluded: Vec<Statistic>,
    pub exact: bool,
}

#[derive(Clone, Copy)]
struct State {
    mass: f64,
    ln_inc: f64,
    mask: u64,
}

/// Minimum included value over subsets with excluded mass ≤ `budget`.
pub fn minimize_included(atoms: &[OrbitAtom], budget: f64) -> EventSolution {
    let (forced, cands): (Vec<&OrbitAtom>, Vec<&OrbitAtom>) = atoms.iter().partition(|a| a.prob > budget);
    let base = forced.iter().fold(f64::NEG_INFINITY, |acc, a| log_add(acc, a.ln_value));
    let (ln_lower, greedy) = fractional_bracket(&cands, budget, base);
    if cands.len() <= DP_MAX_ATOMS {
        if let Some(sol) = pareto(&cands, budget, base) {
            return EventSolution {
                ln_lower: sol.ln_value,
                ..sol
            };
        }
    }
    EventSolution { ln_lower, ..greedy }
}

fn by_density(cands: &[&OrbitAtom]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..cands.len()).collect();
    let dens = |a: &OrbitAtom| {
        if a.prob == 0.0 {
            f64::INFINITY
        } else {
            a.ln_value - a.prob.ln()
        }
    };
    order.sort_by(|&i, &j| dens(cands[j]).total_cmp(&dens(cands[i])));
    order
}

fn pareto(cands: &[&OrbitAtom], budget: f64, base: f64) -> Option<EventSolution> {
    let order = by_density(cands);
    let mut states = vec![State {
        mass: 0.0,
        ln_inc: f64::NEG_INFINITY,
        mask: 0,
    }];
    for (bit, &j) in order.iter().enumerate() {
        let a = cands[j];
        let mut next = Vec::with_capacity(states.len() * 2);
        for s in &states {
            next.push(State {
                ln_inc: log_add(s.ln_inc, a.ln_value),
                ..*s
            });
            let m = s.mass + a.prob;
            if m <= budget {
                next.push(State {
                    mass: m,
                    ln_inc: s.ln_inc,
                    mask: s.mask | (1u64 << bit),
                });
            }
        }
        next.sort_by(|x, y| x.mass.total_cmp(&y.mass).then(x.ln_inc.total_cmp(&y.ln_inc)));
        let mut kept: Vec<State> = Vec::with_capacity(next.len());
        for s in next {
            match kept.last() {
                Some(last) if s.ln_inc >= last.ln_inc => {}
                _ => kept.push(s),
            }
        }
        if kept.len() > STATE_CAP {
            return None;
        }
        states = kept;
    }
    let best = *states.last()?;
    let excluded = order
        .iter()
        .enumerate()
        .filter(|(bit, _)| best.mask & (1u64 << bit) != 0)
        .map(|(_, &j)| cands[j].rep)
        .collect();
    Some(EventSolution {
        ln_value: log_add(base, best.ln_inc),
        ln_lower: f64::NEG_INFINITY,
        excluded_mass: best.mass,
        excluded,
        exact: true,
    })
}

/// Fractional relaxation (lower bound) and greedy-by-density (feasible).
fn fractional_bracket(cands: &[&OrbitAtom], budget: f64, base: f64) -> (f64, EventSolution) {
    let order = by_density(cands);
    // fractional: exclude in density order, splitting the first atom that does not fit
    let mut left = budget;
    let mut lower_terms = vec![base];
    let mut split_done = false;
    for &j in &order {
        let a = cands[j];
        if split_done {
            lower_terms.push(a.ln_value);
        } else if a.prob <= left {
            left -= a.prob;
        } else {
            let keep = 1.0 - left / a.prob;
            if keep > 0.0 {
                lower_terms.push(a.ln_value + keep.ln());
            }
            split_done = true;
        }
    }
    let ln_lower = log_sum_exp(&lower_terms).unwrap_or(f64::NEG_INFINITY);

    let mut left = budget;
    let mut inc = base;
    let mut excluded = Vec::new();
    let mut mass = 0.0;
    for &j in &order {
        let a = cands[j];
        if a.prob <= left {
            left -= a.prob;
            mass += a.prob;
            excluded.push(a.rep);
        } else {
            inc = log_add(inc, a.ln_value);
        }
    }
    (
        ln_lower,
        EventSolution {
            ln_value: inc,
            ln_lower,
            excluded_mass: mass,
            excluded,
            exact: false,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(t: f64, p: f64, v: f64) -> OrbitAtom {
        OrbitAtom {
            rep: Statistic::Scalar(t),
            prob: p,
            ln_value: (p * v).ln(),
        }
    }

    fn brute(atoms: &[OrbitAtom], budget: f64) -> f64 {
        let n = atoms.len();
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << n) {
            let mass: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| atoms[i].prob).sum();
            if mass > budget {
                continue;
            }
            let inc: f64 = (0..n).filter(|i| mask >> i & 1 == 0).map(|i| atoms[i].ln_value.exp()).sum();
            best = best.min(inc);
        }
        best
    }

    #[test]
    fn dp_matches_brute_force() {
        let atoms = vec![atom(0.0, 0.5, 1.0), atom(1.0, 0.3, 2.0), atom(2.0, 0.2, 5.0)];
        for &b in &[0.0, 0.1, 0.2, 0.25, 0.3, 0.5, 0.55] {
            let s = minimize_included(&atoms, b);
            assert!(s.exact);
            assert!((s.ln_value.exp() - brute(&atoms, b)).abs() < 1e-12, "b={b}");
        }
    }

    #[test]
    fn dp_beats_greedy_when_density_misleads() {
        // densest atom fits alone but blocks a better pair
        let atoms = vec![atom(0.0, 0.6, 1.0), atom(1.0, 0.11, 10.0), atom(2.0, 0.1, 9.0), atom(3.0, 0.1, 9.0)];
        let b = 0.2;
        let s = minimize_included(&atoms, b);
        let want = brute(&atoms, b);
        assert!((s.ln_value.exp() - want).abs() < 1e-12);
        let cands: Vec<&OrbitAtom> = atoms.iter().collect();
        let (lower, greedy) = fractional_bracket(&cands, b, f64::NEG_INFINITY);
        assert!(lower.exp() <= want + 1e-12 && greedy.ln_value.exp() >= want - 1e-12);
        assert!(greedy.ln_value.exp() > want + 1e-6);
    }

    #[test]
    fn merge_combines_orbits() {
        let items = vec![
            (Statistic::Scalar(1.0), Statistic::Scalar(1.0), 0.25, 0.0),
            (Statistic::Scalar(1.0), Statistic::Scalar(-1.0), 0.25, 0.0),
            (Statistic::Scalar(0.0), Statistic::Scalar(0.0), 0.5, 0.0),
        ];
        let m = merge_orbits(items);
        assert_eq!(m.len(), 2);
        assert!((m[0].prob - 0.5).abs() < 1e-15);
        assert!((m[0].ln_value - 2f64.ln()).abs() < 1e-15);
    }
}

use super::Scalar;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_SEGMENTS: usize = 4000;

fn kronrod<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Result<(T, T)> {
    let c = (a + b) * T::lit(0.5);
    let h = (b - a) * T::lit(0.5);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(Error::Evaluation(format!("{c}")));
    }
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = h * T::lit(XGK[j]);
        let (x1, x2) = (c - dx, c + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() || !f2.is_finite() {
            return Err(Error::Evaluation(format!("{x1} or {x2}")));
        }
        k = k + T::lit(WGK[j]) * (f1 + f2);
        if j % 2 == 1 {
            g = g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

/// Adaptive Gauss–Kronrod (7/15) integral of `f` over the finite interval
/// `[a, b]`, refined until the summed error estimate is below
/// `max(abs_tol, rel_tol·|value|)`.
pub fn integrate<T, F>(f: F, a: T, b: T, rel_tol: T, abs_tol: T) -> Result<Integral<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Argument("integration bounds must be finite".into()));
    }
    if a == b {
        return Ok(Integral {
            value: T::zero(),
            error: T::zero(),
        });
    }
    let (lo, hi, sign) = if a < b {
        (a, b, T::one())
    } else {
        (b, a, -T::one())
    };
    let (v0, e0) = kronrod(&f, lo, hi)?;
    let mut segs = vec![(lo, hi, v0, e0)];
    let mut total = v0;
    let mut err = e0;
    while err > abs_tol.max(rel_tol * total.abs()) {
        if segs.len() >= MAX_SEGMENTS {
            break;
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |best, (i, s)| {
                if s.3 > best.1 {
                    (i, s.3)
                } else {
                    best
                }
            });
        let (sa, sb, sv, se) = segs.swap_remove(idx);
        let mid = (sa + sb) * T::lit(0.5);
        if mid <= sa || mid >= sb {
            segs.push((sa, sb, sv, se));
            break;
        }
        let (v1, e1) = kronrod(&f, sa, mid)?;
        let (v2, e2) = kronrod(&f, mid, sb)?;
        total = total - sv + v1 + v2;
        err = err - se + e1 + e2;
        segs.push((sa, mid, v1, e1));
        segs.push((mid, sb, v2, e2));
    }
    // re-sum to shed drift from the incremental updates
    let value = segs.iter().fold(T::zero(), |acc, s| acc + s.2);
    let error = segs.iter().fold(T::zero(), |acc, s| acc + s.3);
    Ok(Integral {
        value: sign * value,
        error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_integrals() {
        let r = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 0.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        let r = integrate(|x: f64| (-x * x).exp(), -6.0, 6.0, 1e-13, 0.0).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reversed_bounds() {
        let r = integrate(|x: f64| x, 1.0, 0.0, 1e-12, 0.0).unwrap();
        assert!((r.value + 0.5).abs() < 1e-15);
    }

    #[test]
    fn kink_is_resolved() {
        let r = integrate(|x: f64| x.abs(), -1.0, 2.0, 1e-12, 1e-14).unwrap();
        assert!((r.value - 2.5).abs() < 1e-11);
    }
}

use super::Scalar;
use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub fn normal_pdf<T: Scalar>(x: T) -> T {
    (-(x * x) / T::lit(2.0) - T::lit(LN_SQRT_2PI)).exp()
}

pub fn normal_cdf<T: Scalar>(x: T) -> T {
    T::lit(0.5) * (-x / T::SQRT_2()).erfc()
}

/// Upper tail `1 − Φ(x)` without cancellation.
pub fn normal_sf<T: Scalar>(x: T) -> T {
    T::lit(0.5) * (x / T::SQRT_2()).erfc()
}

/// Inverse of [`normal_cdf`]: Wichura's AS241 followed by one Newton step.
pub fn normal_quantile<T: Scalar>(p: T) -> Result<T> {
    let pf = p.f64();
    if !(pf > 0.0 && pf < 1.0) {
        return Err(Error::Domain(format!("quantile requires p in (0,1), got {pf}")));
    }
    let mut x = as241(pf);
    // refine against the erfc-based cdf, working on the smaller tail
    let err = if x < 0.0 {
        0.5 * libm::erfc(-x / std::f64::consts::SQRT_2) - pf
    } else {
        (1.0 - pf) - 0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
    };
    let dens = (-(x * x) / 2.0 - LN_SQRT_2PI).exp();
    if dens > 0.0 {
        x -= err / dens;
    }
    Ok(T::lit(x))
}

fn as241(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r0 = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r0.ln()).sqrt();
    let val = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

fn poly(c: &[f64; 8], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

const A: [f64; 8] = [
    3.387_132_872_796_366_5,
    133.141_667_891_784_38,
    1_971.590_950_306_551_3,
    13_731.693_765_509_461,
    45_921.953_931_549_87,
    67_265.770_927_008_7,
    33_430.575_583_588_13,
    2_509.080_928_730_122_7,
];
const B: [f64; 8] = [
    1.0,
    42.313_330_701_600_91,
    687.187_007_492_057_9,
    5_394.196_021_424_751,
    21_213.794_301_586_597,
    39_307.895_800_092_71,
    28_729.085_735_721_943,
    5_226.495_278_852_545,
];
const C: [f64; 8] = [
    1.423_437_110_749_683_5,
    4.630_337_846_156_546,
    5.769_497_221_460_691,
    3.647_848_324_763_204_5,
    1.270_458_252_452_368_4,
    0.241_780_725_177_450_6,
    0.022_723_844_989_269_184,
    7.745_450_142_783_414e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_759,
    1.676_384_830_183_803_8,
    0.689_767_334_985_1,
    0.148_103_976_427_480_08,
    0.015_198_666_563_616_457,
    5.475_938_084_995_345e-4,
    1.050_750_071_644_416_9e-9,
];
const E: [f64; 8] = [
    6.657_904_643_501_103,
    5.463_784_911_164_114,
    1.784_826_539_917_291_3,
    0.296_560_571_828_504_9,
    0.026_532_189_526_576_124,
    0.001_242_660_947_388_078_4,
    2.711_555_568_743_487_6e-5,
    2.010_334_399_292_288_1e-7,
];
const F: [f64; 8] = [
    1.0,
    0.599_832_206_555_888,
    0.136_929_880_922_735_8,
    0.014_875_361_290_850_615,
    7.868_691_311_456_133e-4,
    1.846_318_317_510_054_8e-5,
    1.421_511_758_316_446e-7,
    2.043_131_374_655_793_3e-15,
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_points() {
        assert_eq!(normal_cdf(0.0_f64), 0.5);
        assert_eq!(normal_quantile(0.5_f64).unwrap(), 0.0);
    }

    #[test]
    fn known_quantile() {
        // 97.5% point of the standard normal
        let z = normal_quantile(0.975_f64).unwrap();
        assert!((z - 1.959_963_984_540_054).abs() < 1e-12);
    }

    #[test]
    fn round_trip() {
        let mut grid: Vec<f64> = (1..=12).map(|e| 10f64.powi(-e)).collect();
        grid.extend((1..=12).map(|e| 1.0 - 10f64.powi(-e)));
        grid.extend((1..100).map(|i| i as f64 / 100.0));
        for p in grid {
            let x = normal_quantile(p).unwrap();
            assert!((normal_cdf(x) - p).abs() <= 1e-10, "p={p}");
            if p < 0.5 {
                assert!((normal_cdf(x) - p).abs() <= 1e-12 * p, "relative, p={p}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(normal_quantile(0.0_f64).is_err());
        assert!(normal_quantile(1.0_f64).is_err());
        assert!(normal_quantile(f64::NAN).is_err());
    }
}

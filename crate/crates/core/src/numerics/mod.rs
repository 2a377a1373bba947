//! Special functions, Gauss–Hermite quadrature and log-domain arithmetic.
//!
//! Everything here is generic over [`Scalar`] (`f32` or `f64`). Node and
//! coefficient construction runs in `f64` and is cast down, so `f32` callers
//! get the same rules rounded once.

mod hermite;
mod integrate;
mod logspace;
mod normal;
mod quadrature;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub use hermite::{
    hermite_coeffs, hermite_eval, hermite_eval_with_max, hermite_values, interval_coeffs,
    HermiteSeries, DEFAULT_MAX_DEGREE,
};
pub use integrate::{integrate, Integral};
pub use logspace::{binomial, ln_binomial, log_add, log_sum_exp, stable_pow_expect, NeumaierSum};
pub use normal::{normal_cdf, normal_pdf, normal_quantile, normal_sf};
pub use quadrature::{gauss_hermite_rule, QuadratureRule, DEFAULT_NODES, MAX_NODES};

/// Floating-point type accepted by the numerics layer.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    fn erfc(self) -> Self;
    fn ln_gamma(self) -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().expect("finite cast")
    }
}

impl Scalar for f64 {
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
    fn ln_gamma(self) -> Self {
        libm::lgamma(self)
    }
}

impl Scalar for f32 {
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
    fn ln_gamma(self) -> Self {
        libm::lgammaf(self)
    }
}

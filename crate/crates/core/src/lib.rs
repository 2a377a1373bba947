//! Likelihood-ratio overlap kernels and the hardness functionals built on
//! them: Franz–Parisi (FP), generalized FP (GFP), ρ_G-FP, statistical-query
//! (SQ/USQ), samplewise low-degree norms and χ².
//!
//! Models are described by the law of a sufficient overlap statistic `T(u,v)`
//! under two independent prior draws, a kernel `K(T) = ⟨L_u, L_v⟩_Q`, and a
//! finite group acting on the statistic.

pub mod error;
pub mod criteria;
pub mod kernels;
pub mod numerics;
pub mod oracles;
pub mod overlap_laws;

pub use error::{Error, Result};

pub type QuadratureRule = numerics::QuadratureRule<f64>;
pub type HermiteSeries = numerics::HermiteSeries<f64>;

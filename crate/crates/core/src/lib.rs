//! Extreme first passage times of many independent diffusive searchers.
//!
//! Given the short-time behavior `1 - S(t) ~ A t^p exp(-C/t)` of a single
//! searcher's survival probability, the fastest of `N` searchers is
//! approximately Gumbel distributed with location `b_N` and scale `a_N`.
//! This crate provides:
//!
//! * [`specfun`]: erfc/erfcx, both real LambertW branches, digamma/trigamma
//!   and combinatorial helpers.
//! * [`models`]: survival models for a single searcher.
//! * [`evt`]: the Gumbel law, the k-th order statistic limit laws and the
//!   three constructions of `(a_N, b_N)`.
//! * [`exact`]: exact distributions and moments of `T_{k,N}` by quadrature,
//!   plus convergence diagnostics.
//! * [`mc`]: Monte Carlo validation with reproducible per-replicate streams.

// Coefficient tables keep every printed digit; `!(x > 0.0)` style checks
// are deliberate so that NaN is rejected along with the out-of-range values.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evt;
pub mod exact;
pub mod mc;
pub mod models;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};



pub use exact::{ErrorTableRow, OrderStatSpec};
pub use evt::{GumbelParams, RescalingPair, RescalingVariant};
pub use models::{ShortTimeParams, SurvivalModel, TailClass};
pub use specfun::Branch;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

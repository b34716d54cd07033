//! Special functions used throughout the crate.

mod erf;
mod gamma;
mod lambert;

pub use erf::{erf, erfc, erfcx};
pub use gamma::{digamma, gamma, harmonic, ln_binomial, ln_gamma, trigamma};
pub use lambert::{
    asymptotic_coefficient, lambert_w, lambert_w_asymptotic, lambert_w_from_ln,
    stirling_first_unsigned, Branch, MAX_ASYMPTOTIC_ORDER,
};

pub(crate) use erf::{erf_raw, erfc_raw, erfcx_raw};
pub(crate) use gamma::{digamma_raw, ln_binomial_raw, ln_gamma_raw, trigamma_raw, PI_SQ_OVER_6};

//! Gamma-family functions and combinatorial helpers.

use std::f64::consts::PI;

use crate::error::{domain, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2n} / (2n (2n - 1)), the Stirling series coefficients for ln Gamma.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

// B_{2n} for n = 1..8.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

const ASYMPTOTIC_FROM: f64 = 12.0;

/// Stirling-series correction `ln Gamma(x) - [(x - 1/2) ln x - x + ln(2 pi)/2]`
/// for `x >= ASYMPTOTIC_FROM`.
fn stirling_tail(x: f64) -> f64 {
    let r = 1.0 / (x * x);
    let mut pow = 1.0 / x;
    let mut sum = 0.0;
    for c in STIRLING {
        sum += c * pow;
        pow *= r;
    }
    sum
}

pub(crate) fn ln_gamma_raw(x: f64) -> f64 {
    let mut shift = 0.0;
    let mut y = x;
    let mut prod = 1.0;
    while y < ASYMPTOTIC_FROM {
        prod *= y;
        y += 1.0;
        if prod > 1e280 {
            shift += prod.ln();
            prod = 1.0;
        }
    }
    shift += prod.ln();
    (y - 0.5) * y.ln() - y + HALF_LN_2PI + stirling_tail(y) - shift
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("ln_gamma requires x > 0, got {x}"));
    }
    Ok(ln_gamma_raw(x))
}

/// `Gamma(x)` for `x > 0`; overflows to infinity past `x ~ 171.6`.
pub fn gamma(x: f64) -> Result<f64> {
    Ok(ln_gamma(x)?.exp())
}

pub(crate) fn digamma_raw(x: f64) -> f64 {
    let mut acc = 0.0;
    let mut y = x;
    while y < ASYMPTOTIC_FROM {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let r = 1.0 / (y * y);
    let mut pow = r;
    let mut series = 0.0;
    for (n, b) in BERNOULLI.iter().enumerate() {
        series += b / (2.0 * (n + 1) as f64) * pow;
        pow *= r;
    }
    acc + y.ln() - 0.5 / y - series
}

pub(crate) fn trigamma_raw(x: f64) -> f64 {
    let mut acc = 0.0;
    let mut y = x;
    while y < ASYMPTOTIC_FROM {
        acc += 1.0 / (y * y);
        y += 1.0;
    }
    let r = 1.0 / (y * y);
    let mut pow = r / y;
    let mut series = 0.0;
    for b in BERNOULLI {
        series += b * pow;
        pow *= r;
    }
    acc + 1.0 / y + 0.5 * r + series
}

/// Digamma function `psi(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("digamma requires x > 0, got {x}"));
    }
    Ok(digamma_raw(x))
}

/// Trigamma function `psi'(x)` for `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("trigamma requires x > 0, got {x}"));
    }
    Ok(trigamma_raw(x))
}

/// Harmonic number `H_k = 1 + 1/2 + ... + 1/k`, with `H_0 = 0`.
pub fn harmonic(k: u64) -> f64 {
    if k > 1_000 {
        // psi(k + 1) + gamma; the direct sum is slow and no more accurate
        return digamma_raw(k as f64 + 1.0) + crate::EULER_GAMMA;
    }
    (1..=k).rev().map(|r| 1.0 / r as f64).sum()
}

/// `ln Gamma(n + 1) - [(n + 1/2) ln n - n + ln(2 pi)/2]`.
fn stirling_error(n: f64) -> f64 {
    if n >= ASYMPTOTIC_FROM {
        stirling_tail(n)
    } else {
        ln_gamma_raw(n + 1.0) - (n + 0.5) * n.ln() + n - HALF_LN_2PI
    }
}

/// `ln C(n, j)`, accurate for `n` up to and beyond `10^9`.
pub fn ln_binomial(n: u64, j: u64) -> Result<f64> {
    if j > n {
        return domain(format!("ln_binomial requires j <= n, got n = {n}, j = {j}"));
    }
    Ok(ln_binomial_raw(n, j))
}

pub(crate) fn ln_binomial_raw(n: u64, j: u64) -> f64 {
    let j = j.min(n - j);
    if j == 0 {
        return 0.0;
    }
    if j <= 32 {
        let nf = n as f64;
        return (0..j)
            .map(|i| ((nf - i as f64) / (i + 1) as f64).ln())
            .sum();
    }
    let (nf, jf) = (n as f64, j as f64);
    let rest = nf - jf;
    // n ln n - j ln j - (n-j) ln(n-j) without cancellation
    let entropy = jf * (nf / jf).ln() - rest * (-jf / nf).ln_1p();
    entropy + 0.5 * (nf / (jf * rest)).ln() - HALF_LN_2PI + stirling_error(nf)
        - stirling_error(jf)
        - stirling_error(rest)
}

pub(crate) const PI_SQ_OVER_6: f64 = PI * PI / 6.0;

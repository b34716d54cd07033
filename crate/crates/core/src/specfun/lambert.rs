//! Real branches of the LambertW function, the inverse of `w -> w e^w`.

use std::sync::OnceLock;

use crate::error::{domain, Result};

/// Real branch of the LambertW function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `W_0`, defined on `[-1/e, inf)` with `W >= -1`.
    Principal,
    /// `W_{-1}`, defined on `[-1/e, 0)` with `W <= -1`.
    Lower,
}

// 1/e split into a double and its rounding remainder.
const INV_E_HI: f64 = 0.367_879_441_171_442_33;
const INV_E_LO: f64 = -1.242_875_367_278_836_3e-17;
const E: f64 = std::f64::consts::E;

/// Below this distance from the branch point the square-root series is used
/// as the final answer.
const BRANCH_SERIES_EPS: f64 = 1e-6;

const MAX_ITER: usize = 64;

/// Largest truncation order accepted by [`lambert_w_asymptotic`].
pub const MAX_ASYMPTOTIC_ORDER: usize = 20;

/// Series of `W` in `q = +-sqrt(2 (e z + 1))` around the branch point.
fn branch_point_series(q: f64) -> f64 {
    const C: [f64; 7] = [
        -1.0,
        1.0,
        -1.0 / 3.0,
        11.0 / 72.0,
        -43.0 / 540.0,
        769.0 / 17_280.0,
        -221.0 / 8_505.0,
    ];
    C.iter().rev().fold(0.0, |acc, &c| acc * q + c)
}

/// Halley iteration on `f(w) = w e^w - z`.
fn halley_direct(z: f64, mut w: f64) -> f64 {
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - z;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 2.0 * f64::EPSILON * w.abs().max(1.0) {
            break;
        }
    }
    w
}

/// Halley iteration on `h(w) = w + ln|w| - ln|z|`, used once `|w| > 1` is
/// bounded away from the branch point. Works for arguments whose `e^w` would
/// overflow or underflow.
fn halley_log(ln_abs_z: f64, mut w: f64) -> f64 {
    for _ in 0..MAX_ITER {
        let h = w + w.abs().ln() - ln_abs_z;
        if h == 0.0 {
            break;
        }
        let dh = (w + 1.0) / w;
        let d2h = -1.0 / (w * w);
        let step = h / dh / (1.0 - h * d2h / (2.0 * dh * dh));
        w -= step;
        if step.abs() <= 2.0 * f64::EPSILON * w.abs() {
            break;
        }
    }
    w
}

// ln 2 split so that `e * LN2_HI` is exact for any binary exponent `e`.
const LN2_HI: f64 = 6.931_471_803_691_238_164_9e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;

/// One Newton step on `w + ln|w| = ln|z|` with `ln|z|` carried in two parts.
/// The rounding of a plain `ln|z|` alone would cost up to one ulp of `w`
/// when `|w|` is in the hundreds.
fn refine_log(abs_z: f64, w: f64) -> f64 {
    let (scaled, shift) = if abs_z < f64::MIN_POSITIVE { (abs_z * 2f64.powi(64), -64) } else { (abs_z, 0) };
    let bits = scaled.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32 - 1023 + shift;
    let mantissa = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | 0x3ff0_0000_0000_0000);
    let e = exp as f64;
    let h = (w - e * LN2_HI) + (w.abs().ln() - mantissa.ln()) - e * LN2_LO;
    w - h * w / (w + 1.0)
}

/// Leading asymptotic guess `L1 - L2 + L2/L1`.
fn asymptotic_guess(l1: f64) -> f64 {
    let l2 = l1.abs().ln();
    l1 - l2 + l2 / l1
}

/// `W(z)` on the requested branch, with `|W e^W - z| <= 1e-13 max(1, |z|)`.
pub fn lambert_w(branch: Branch, z: f64) -> Result<f64> {
    if !z.is_finite() {
        return domain(format!("lambert_w requires a finite argument, got {z}"));
    }
    if z < -INV_E_HI {
        return domain(format!("lambert_w argument {z} is below -1/e"));
    }
    if branch == Branch::Lower && z >= 0.0 {
        return domain(format!("lower branch requires -1/e <= z < 0, got {z}"));
    }
    let eps = ((z + INV_E_HI) + INV_E_LO).max(0.0);
    let q = (2.0 * E * eps).sqrt();

    let w = match branch {
        Branch::Principal => {
            if z == 0.0 {
                0.0
            } else if eps < BRANCH_SERIES_EPS {
                branch_point_series(q)
            } else if z < -0.25 {
                halley_direct(z, branch_point_series(q))
            } else if z < 20.0 {
                halley_direct(z, z.ln_1p())
            } else {
                let l1 = z.ln();
                refine_log(z, halley_log(l1, asymptotic_guess(l1)))
            }
        }
        Branch::Lower => {
            if eps < BRANCH_SERIES_EPS {
                branch_point_series(-q)
            } else if z < -0.25 {
                halley_direct(z, branch_point_series(-q))
            } else {
                let l1 = (-z).ln();
                refine_log(-z, halley_log(l1, asymptotic_guess(l1)))
            }
        }
    };
    Ok(w)
}

/// `W` on the requested branch from `ln|z|`, for arguments whose magnitude
/// does not fit in a double. The principal branch takes `z > 0`; the lower
/// branch takes `z = -exp(ln_abs_z)` with `ln_abs_z < -1`.
pub fn lambert_w_from_ln(branch: Branch, ln_abs_z: f64) -> Result<f64> {
    if !ln_abs_z.is_finite() {
        return domain(format!("ln|z| must be finite, got {ln_abs_z}"));
    }
    match branch {
        Branch::Principal if ln_abs_z > 3.0 => {
            Ok(halley_log(ln_abs_z, asymptotic_guess(ln_abs_z)))
        }
        Branch::Principal => lambert_w(branch, ln_abs_z.exp()),
        Branch::Lower if ln_abs_z < -3.0 => {
            Ok(halley_log(ln_abs_z, asymptotic_guess(ln_abs_z)))
        }
        Branch::Lower => lambert_w(branch, -ln_abs_z.exp()),
    }
}

/// Unsigned Stirling numbers of the first kind `[n, k]` for
/// `n <= MAX_ASYMPTOTIC_ORDER`.
fn stirling_table() -> &'static Vec<Vec<u64>> {
    static TABLE: OnceLock<Vec<Vec<u64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n_max = MAX_ASYMPTOTIC_ORDER;
        let mut t = vec![vec![0u64; n_max + 1]; n_max + 1];
        t[0][0] = 1;
        for n in 1..=n_max {
            for k in 1..=n {
                t[n][k] = t[n - 1][k - 1] + (n as u64 - 1) * t[n - 1][k];
            }
        }
        t
    })
}

/// Unsigned Stirling number of the first kind `[n, k]`, `n <= 20`.
pub fn stirling_first_unsigned(n: usize, k: usize) -> Option<u64> {
    if n > MAX_ASYMPTOTIC_ORDER || k > n {
        return None;
    }
    Some(stirling_table()[n][k])
}

/// Coefficient `c_ij = (-1)^i / j! [i + j, i + 1]` of the large-argument
/// expansion.
pub fn asymptotic_coefficient(i: usize, j: usize) -> Option<f64> {
    let s = stirling_first_unsigned(i + j, i + 1)? as f64;
    let fact: f64 = (1..=j).map(|r| r as f64).product();
    let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some(sign * s / fact)
}

/// Truncated asymptotic expansion
/// `L1 - L2 + sum_{i >= 0, j >= 1, i + j <= order} c_ij L1^{-i-j} L2^j`.
///
/// Principal branch: `L1 = ln z`, `L2 = ln ln z`, requires `z > 1`.
/// Lower branch: `L1 = ln(-z)`, `L2 = ln(-ln(-z))`, requires `-1/e <= z < 0`.
/// Accuracy is only meaningful when `|ln|z||` is large.
pub fn lambert_w_asymptotic(branch: Branch, z: f64, order: usize) -> Result<f64> {
    if order > MAX_ASYMPTOTIC_ORDER {
        return domain(format!(
            "asymptotic order {order} exceeds the supported maximum {MAX_ASYMPTOTIC_ORDER}"
        ));
    }
    if !z.is_finite() {
        return domain(format!("argument must be finite, got {z}"));
    }
    let (l1, l2) = match branch {
        Branch::Principal => {
            if z <= 1.0 {
                return domain(format!("principal expansion needs z > 1, got {z}"));
            }
            let l1 = z.ln();
            (l1, l1.ln())
        }
        Branch::Lower => {
            if !(-INV_E_HI..0.0).contains(&z) {
                return domain(format!("lower expansion needs -1/e <= z < 0, got {z}"));
            }
            let l1 = (-z).ln();
            (l1, (-l1).ln())
        }
    };
    let mut sum = 0.0;
    for n in 1..=order {
        // all (i, j) with i + j = n, j >= 1
        let inv = l1.powi(-(n as i32));
        for j in 1..=n {
            let i = n - j;
            let c = asymptotic_coefficient(i, j).expect("order bounded by table size");
            sum += c * inv * l2.powi(j as i32);
        }
    }
    Ok(l1 - l2 + sum)
}

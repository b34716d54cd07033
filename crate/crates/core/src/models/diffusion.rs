//! Closed-form survival laws of free diffusion.

use std::f64::consts::PI;

use crate::specfun::{erf_raw, erfc_raw, erfcx_raw};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_286_9;

/// Relative size of the last retained series term.
const SERIES_TOL: f64 = 1e-16;
const SERIES_MAX_TERMS: usize = 200;

/// Dimensionless time `D t / L^2` at which the 3D model switches from the
/// image series to the eigenfunction series.
const SPHERE_SWITCH: f64 = 0.25;

fn scaled_distance(l: f64, d: f64, t: f64) -> f64 {
    l / (4.0 * d * t).sqrt()
}

pub(crate) fn point_survival(l: f64, d: f64, t: f64) -> f64 {
    erf_raw(scaled_distance(l, d, t))
}

pub(crate) fn point_one_minus(l: f64, d: f64, t: f64) -> f64 {
    erfc_raw(scaled_distance(l, d, t))
}

pub(crate) fn point_derivative(l: f64, d: f64, t: f64) -> f64 {
    let x = scaled_distance(l, d, t);
    -x * (-x * x).exp() * FRAC_1_SQRT_PI / t
}

/// `exp(kappa (kappa t + L) / D) erfc(y)` rewritten as `erfcx(y) exp(-x^2)`,
/// where `x = L / sqrt(4 D t)` and `y = x + kappa sqrt(t / D)`.
fn robin_args(l: f64, d: f64, kappa: f64, t: f64) -> (f64, f64) {
    let x = scaled_distance(l, d, t);
    (x, x + kappa * (t / d).sqrt())
}

fn robin_survival_direct(x: f64, y: f64) -> f64 {
    erf_raw(x) + erfcx_raw(y) * (-x * x).exp()
}

/// `erfc(x) - erfcx(y) e^{-x^2} = e^{-x^2} (erfcx(x) - erfcx(y))`
fn robin_complement(x: f64, y: f64) -> f64 {
    (-x * x).exp() * (erfcx_raw(x) - erfcx_raw(y))
}

pub(crate) fn robin_survival(l: f64, d: f64, kappa: f64, t: f64) -> f64 {
    let (x, y) = robin_args(l, d, kappa, t);
    if x > 0.5 {
        1.0 - robin_complement(x, y)
    } else {
        robin_survival_direct(x, y)
    }
}

pub(crate) fn robin_one_minus(l: f64, d: f64, kappa: f64, t: f64) -> f64 {
    let (x, y) = robin_args(l, d, kappa, t);
    if x > 0.5 {
        robin_complement(x, y)
    } else {
        1.0 - robin_survival_direct(x, y)
    }
}

/// `erfcx(y) - 1 / (sqrt(pi) y)`, which is negative for `y > 0`.
fn erfcx_minus_leading(y: f64) -> f64 {
    if y < 8.0 {
        return erfcx_raw(y) - FRAC_1_SQRT_PI / y;
    }
    // sum_{n >= 1} (-1)^n (2n-1)!! / (2 y^2)^n, scaled by 1 / (sqrt(pi) y)
    let r = 0.5 / (y * y);
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 1..60 {
        term *= -(2 * n - 1) as f64 * r;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    FRAC_1_SQRT_PI / y * sum
}

pub(crate) fn robin_derivative(l: f64, d: f64, kappa: f64, t: f64) -> f64 {
    let (x, y) = robin_args(l, d, kappa, t);
    // e^{-x^2} (kappa^2/D) (erfcx(y) - 1/(sqrt(pi) (y - x))), split so that no
    // two terms of opposite sign are subtracted
    let gap = y - x;
    let tail = erfcx_minus_leading(y) - FRAC_1_SQRT_PI * x / (y * gap);
    (-x * x).exp() * kappa * kappa / d * tail
}

/// `1 - S` for the 3D exit problem from the image series, `s = D t / L^2`:
/// `2 / sqrt(pi s) * sum_{j >= 0} exp(-(j + 1/2)^2 / s)`.
pub fn sphere_image_one_minus(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for j in 0..SERIES_MAX_TERMS {
        let u = j as f64 + 0.5;
        let term = (-u * u / s).exp();
        sum += term;
        if term <= SERIES_TOL * sum {
            break;
        }
    }
    2.0 * FRAC_1_SQRT_PI / s.sqrt() * sum
}

/// `S` for the 3D exit problem from the eigenfunction series,
/// `2 sum_{n >= 1} (-1)^{n+1} exp(-n^2 pi^2 s)`.
pub fn sphere_eigen_survival(s: f64) -> f64 {
    let mut sum = 0.0;
    for n in 1..SERIES_MAX_TERMS {
        let nf = n as f64;
        let term = (-nf * nf * PI * PI * s).exp();
        sum += if n % 2 == 1 { term } else { -term };
        if term <= SERIES_TOL * sum.abs() || term == 0.0 {
            break;
        }
    }
    2.0 * sum
}

fn sphere_image_one_minus_ds(s: f64) -> f64 {
    let mut sum = 0.0;
    for j in 0..SERIES_MAX_TERMS {
        let u = j as f64 + 0.5;
        let term = (-u * u / s).exp() * (u * u / (s * s) - 0.5 / s);
        sum += term;
        if term.abs() <= SERIES_TOL * sum.abs() {
            break;
        }
    }
    2.0 * FRAC_1_SQRT_PI / s.sqrt() * sum
}

fn sphere_eigen_ds(s: f64) -> f64 {
    let mut sum = 0.0;
    for n in 1..SERIES_MAX_TERMS {
        let k2 = (n * n) as f64 * PI * PI;
        let term = k2 * (-k2 * s).exp();
        sum += if n % 2 == 1 { term } else { -term };
        if term <= SERIES_TOL * sum.abs() || term == 0.0 {
            break;
        }
    }
    -2.0 * sum
}

pub(crate) fn sphere_survival(l: f64, d: f64, t: f64) -> f64 {
    let s = d * t / (l * l);
    if s < SPHERE_SWITCH {
        1.0 - sphere_image_one_minus(s)
    } else {
        sphere_eigen_survival(s)
    }
}

pub(crate) fn sphere_one_minus(l: f64, d: f64, t: f64) -> f64 {
    let s = d * t / (l * l);
    if s < SPHERE_SWITCH {
        sphere_image_one_minus(s)
    } else {
        1.0 - sphere_eigen_survival(s)
    }
}

pub(crate) fn sphere_derivative(l: f64, d: f64, t: f64) -> f64 {
    let scale = d / (l * l);
    let s = scale * t;
    if s < SPHERE_SWITCH {
        -scale * sphere_image_one_minus_ds(s)
    } else {
        scale * sphere_eigen_ds(s)
    }
}

//! Gumbel limit laws for extreme first passage times and the normalizing
//! sequences `(a_N, b_N)` that make `(T_N - b_N) / a_N` converge.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::models::{ShortTimeParams, SurvivalModel};
use crate::specfun::{digamma_raw, lambert_w_from_ln, ln_gamma_raw, trigamma_raw, Branch, PI_SQ_OVER_6};
use crate::EULER_GAMMA;

/// `Gumbel(b, a)` with survival `P(X > x) = exp(-exp((x - b) / a))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GumbelParams {
    location: f64,
    scale: f64,
}

impl GumbelParams {
    pub fn new(location: f64, scale: f64) -> Result<Self> {
        if !location.is_finite() {
            return domain(format!("Gumbel location must be finite, got {location}"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return domain(format!("Gumbel scale must be positive, got {scale}"));
        }
        Ok(Self { location, scale })
    }

    /// `Gumbel(0, 1)`.
    pub fn standard() -> Self {
        Self { location: 0.0, scale: 1.0 }
    }

    pub fn location(&self) -> f64 {
        self.location
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn z(&self, x: f64) -> f64 {
        (x - self.location) / self.scale
    }

    pub fn survival(&self, x: f64) -> f64 {
        (-self.z(x).exp()).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        -(-self.z(x).exp()).exp_m1()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let z = self.z(x);
        (z - z.exp()).exp() / self.scale
    }

    /// `b - gamma a`
    pub fn mean(&self) -> f64 {
        self.location - EULER_GAMMA * self.scale
    }

    /// `pi^2 a^2 / 6`
    pub fn variance(&self) -> f64 {
        PI_SQ_OVER_6 * self.scale * self.scale
    }

    /// `b + a ln ln 2`
    pub fn median(&self) -> f64 {
        self.location + self.scale * std::f64::consts::LN_2.ln()
    }

    pub fn mode(&self) -> f64 {
        self.location
    }

    /// `E[e^{tX}] = Gamma(1 + a t) e^{b t}`, defined for `1 + a t > 0`.
    pub fn mgf(&self, t: f64) -> Result<f64> {
        let arg = 1.0 + self.scale * t;
        if !(arg > 0.0) {
            return domain(format!("moment generating function has a pole: 1 + a t = {arg}"));
        }
        Ok((ln_gamma_raw(arg) + self.location * t).exp())
    }
}

/// How a [`RescalingPair`] was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RescalingVariant {
    /// Closed form through the LambertW function.
    LambertW,
    /// Elementary logarithmic expansion.
    Elementary,
    /// Numerical inversion of the short-time survival `S_0`.
    Numeric,
}

impl RescalingVariant {
    pub const ALL: [RescalingVariant; 3] =
        [RescalingVariant::LambertW, RescalingVariant::Elementary, RescalingVariant::Numeric];

    pub fn name(&self) -> &'static str {
        match self {
            RescalingVariant::LambertW => "lambertw",
            RescalingVariant::Elementary => "elementary",
            RescalingVariant::Numeric => "numeric",
        }
    }
}

impl fmt::Display for RescalingVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RescalingVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambertw" => Ok(RescalingVariant::LambertW),
            "elementary" => Ok(RescalingVariant::Elementary),
            "numeric" => Ok(RescalingVariant::Numeric),
            other => domain(format!(
                "unknown rescaling variant `{other}` (expected lambertw, elementary or numeric)"
            )),
        }
    }
}

/// Normalizing constants `(a_N, b_N)` for a given number of searchers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescalingPair {
    pub a_n: f64,
    pub b_n: f64,
    pub n: u64,
    pub variant: RescalingVariant,
}

impl RescalingPair {
    /// The approximating law `Gumbel(b_N, a_N)` of `T_N`.
    pub fn gumbel(&self) -> GumbelParams {
        GumbelParams { location: self.b_n, scale: self.a_n }
    }

    /// `(t - b_N) / a_N`
    pub fn rescale(&self, t: f64) -> f64 {
        (t - self.b_n) / self.a_n
    }

    /// `a_N x + b_N`
    pub fn unscale(&self, x: f64) -> f64 {
        self.a_n * x + self.b_n
    }
}

fn pair(a_n: f64, b_n: f64, n: u64, variant: RescalingVariant) -> Result<RescalingPair> {
    if !(a_n > 0.0 && a_n.is_finite() && b_n > 0.0 && b_n.is_finite()) {
        return Err(Error::Undefined {
            message: format!("{variant} rescaling at N = {n} gave a_N = {a_n}, b_N = {b_n}"),
            min_valid_n: None,
        });
    }
    Ok(RescalingPair { a_n, b_n, n, variant })
}

/// `ln|z|` of the LambertW argument `(C/p) (A N)^{1/p}`.
fn ln_lambert_arg(stp: &ShortTimeParams, n: f64) -> f64 {
    (stp.c() / stp.p().abs()).ln() + (stp.a().ln() + n.ln()) / stp.p()
}

/// Smallest `N >= 2` at which the LambertW construction is defined.
pub fn lambertw_min_n(stp: &ShortTimeParams) -> u64 {
    let p = stp.p();
    let bound = if p == 0.0 {
        // A N > 1
        1.0 / stp.a()
    } else if p > 0.0 {
        return 2;
    } else {
        // (C/|p|) (A N)^{1/p} < 1/e
        (-p * (1.0 + (stp.c() / p.abs()).ln())).exp() / stp.a()
    };
    let valid = |n: u64| -> bool {
        if p == 0.0 {
            stp.a() * n as f64 > 1.0
        } else {
            ln_lambert_arg(stp, n as f64) < -1.0
        }
    };
    let mut n = if bound.is_finite() && bound < 1.8e19 {
        (bound.floor() as u64).max(2)
    } else {
        u64::MAX
    };
    while n < u64::MAX && !valid(n) {
        n += 1;
    }
    n
}

/// `(a_N, b_N)` from the LambertW closed form.
///
/// `p = 0`: `b = C / ln(A N)`, `a = b / ln(A N)`. Otherwise
/// `b = C / (p W)`, `a = b / (p (1 + W))` with
/// `W = W_0((C/p)(A N)^{1/p})` for `p > 0` and `W_{-1}(...)` for `p < 0`.
pub fn rescaling_lambertw(stp: &ShortTimeParams, n: u64) -> Result<RescalingPair> {
    if n < 2 {
        return domain(format!("rescaling requires N >= 2, got {n}"));
    }
    let nf = n as f64;
    let (c, p) = (stp.c(), stp.p());
    if p == 0.0 {
        let ln_an = stp.a().ln() + nf.ln();
        if !(ln_an > 0.0) {
            return Err(Error::Undefined {
                message: format!("ln(A N) = {ln_an} must be positive"),
                min_valid_n: Some(lambertw_min_n(stp)),
            });
        }
        let b = c / ln_an;
        return pair(b / ln_an, b, n, RescalingVariant::LambertW);
    }
    let ln_z = ln_lambert_arg(stp, nf);
    let w = if p > 0.0 {
        lambert_w_from_ln(Branch::Principal, ln_z)?
    } else {
        if !(ln_z < -1.0) {
            let min_n = lambertw_min_n(stp);
            return Err(Error::Undefined {
                message: format!("LambertW argument -exp({ln_z:.6}) lies outside the lower branch at N = {n}"),
                min_valid_n: Some(min_n),
            });
        }
        lambert_w_from_ln(Branch::Lower, ln_z)?
    };
    let b = c / (p * w);
    pair(b / (p * (1.0 + w)), b, n, RescalingVariant::LambertW)
}

/// Elementary normalizers
/// `a' = C / (ln N)^2`,
/// `b' = C / ln N + C p ln ln N / (ln N)^2 - C ln(A C^p) / (ln N)^2`.
pub fn rescaling_elementary(stp: &ShortTimeParams, n: u64) -> Result<RescalingPair> {
    if n < 3 {
        return domain(format!("elementary rescaling requires N >= 3, got {n}"));
    }
    let l = (n as f64).ln();
    let c = stp.c();
    let a = c / (l * l);
    let b = c / l + c * stp.p() * l.ln() / (l * l) - c * stp.ln_a_cp() / (l * l);
    pair(a, b, n, RescalingVariant::Elementary)
}

/// Normalizers from the short-time law `S_0(t) = 1 - A t^p e^{-C/t}`:
/// `b_N = S_0^{-1}(1 - 1/N)` and `a_N = -1 / (N S_0'(b_N))`.
pub fn rescaling_numeric(model: &SurvivalModel, n: u64) -> Result<RescalingPair> {
    rescaling_numeric_params(model.short_time(), n)
}

/// [`rescaling_numeric`] given only the short-time constants.
pub fn rescaling_numeric_params(stp: &ShortTimeParams, n: u64) -> Result<RescalingPair> {
    if n < 2 {
        return domain(format!("rescaling requires N >= 2, got {n}"));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let (c, p) = (stp.c(), stp.p());
    // g(t) = ln(1 - S_0(t)) + ln N, increasing for t < C/|p| when p < 0
    let g = |t: f64| stp.a().ln() + p * t.ln() - c / t + ln_n;
    let dg = |t: f64| p / t + c / (t * t);
    let t_cap = if p < 0.0 { c / -p } else { f64::INFINITY };

    let mut lo = c / (10.0 * ln_n);
    let mut hi = (10.0 * c / ln_n).min(t_cap);
    let mut widen = 0;
    while g(lo) > 0.0 {
        lo *= 0.5;
        widen += 1;
        if widen > 200 {
            return Err(Error::Solver(format!("could not bracket b_N from below at N = {n}")));
        }
    }
    while g(hi) < 0.0 {
        if hi >= t_cap {
            return Err(Error::Solver(format!(
                "S_0(t) never reaches 1 - 1/N at N = {n}: no root below the turning point t = {t_cap}"
            )));
        }
        hi = (hi * 2.0).min(t_cap);
        widen += 1;
        if widen > 400 {
            return Err(Error::Solver(format!("could not bracket b_N from above at N = {n}")));
        }
    }
    while (hi - lo) > 1e-3 * lo {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    let target = 1.0 / nf;
    let residual = |t: f64| (stp.one_minus_s0(t) - target).abs();
    for _ in 0..50 {
        let step = g(t) / dg(t);
        let next = t - step;
        t = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        if g(t) < 0.0 {
            lo = lo.max(t);
        } else {
            hi = hi.min(t);
        }
        if residual(t) < 1e-13 * target.max(f64::MIN_POSITIVE) || step.abs() < 1e-16 * t {
            break;
        }
    }
    if !(residual(t) < 1e-13) {
        return Err(Error::Solver(format!("Newton polish for b_N did not converge at N = {n}")));
    }
    let a = -1.0 / (nf * stp.s0_derivative(t));
    pair(a, t, n, RescalingVariant::Numeric)
}

/// Dispatches to the requested construction.
pub fn rescaling(variant: RescalingVariant, model: &SurvivalModel, n: u64) -> Result<RescalingPair> {
    match variant {
        RescalingVariant::LambertW => rescaling_lambertw(model.short_time(), n),
        RescalingVariant::Elementary => rescaling_elementary(model.short_time(), n),
        RescalingVariant::Numeric => rescaling_numeric(model, n),
    }
}

/// Leading-order mean `C / ln N`, shared by every `k`.
pub fn baseline_mean(stp: &ShortTimeParams, n: u64) -> Result<f64> {
    if n < 2 {
        return domain(format!("baseline requires N >= 2, got {n}"));
    }
    Ok(stp.c() / (n as f64).ln())
}

fn check_k(k: u32) -> Result<()> {
    if k < 1 {
        return domain("order statistic index k must be >= 1");
    }
    Ok(())
}

/// Limit density of the rescaled k-th fastest time, `exp(k x - e^x) / (k-1)!`.
pub fn xk_pdf(k: u32, x: f64) -> Result<f64> {
    check_k(k)?;
    let kf = k as f64;
    Ok((kf * x - x.exp() - ln_gamma_raw(kf)).exp())
}

/// `E[X_k] = psi(k)`
pub fn xk_mean(k: u32) -> Result<f64> {
    check_k(k)?;
    Ok(digamma_raw(k as f64))
}

/// `Var[X_k] = psi'(k)`
pub fn xk_variance(k: u32) -> Result<f64> {
    check_k(k)?;
    Ok(trigamma_raw(k as f64))
}

/// Joint limit density of the `k` fastest rescaled times,
/// `exp(-e^{x_k}) prod e^{x_r}` on `x_1 <= ... <= x_k`, zero elsewhere.
pub fn xk_joint_pdf(xs: &[f64]) -> Result<f64> {
    let last = match xs.last() {
        Some(v) => *v,
        None => return domain("joint density needs at least one coordinate"),
    };
    if xs.windows(2).any(|w| w[0] > w[1]) {
        return Ok(0.0);
    }
    let sum: f64 = xs.iter().sum();
    Ok((sum - last.exp()).exp())
}

/// Gumbel-limit approximations of `E[T_{k,N}]` and `Var[T_{k,N}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxMoments {
    pub mean: f64,
    pub variance: f64,
}

/// `mean = b_N + psi(k) a_N`, `variance = psi'(k) a_N^2`.
pub fn approx_moments(r: &RescalingPair, k: u32) -> Result<ApproxMoments> {
    check_k(k)?;
    Ok(ApproxMoments {
        mean: r.b_n + xk_mean(k)? * r.a_n,
        variance: xk_variance(k)? * r.a_n * r.a_n,
    })
}

#[cfg(test)]
mod tests;

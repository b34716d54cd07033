//! Exact distributions and moments of `T_{k,N}`, the k-th fastest of `N`
//! iid first passage times, evaluated from a [`SurvivalModel`] by quadrature.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::evt::{rescaling_elementary, rescaling_lambertw, RescalingPair};
use crate::models::{ShortTimeParams, SurvivalModel, TailClass};
use crate::quad::{integrate, QuadOptions};
use crate::specfun::{digamma_raw, ln_binomial_raw};
use crate::EULER_GAMMA;

/// Which order statistic, and out of how many searchers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrderStatSpec {
    k: u32,
    n: u64,
}

impl OrderStatSpec {
    pub fn new(k: u32, n: u64) -> Result<Self> {
        if k < 1 || (k as u64) > n {
            return domain(format!("order statistic needs 1 <= k <= N, got k = {k}, N = {n}"));
        }
        Ok(Self { k, n })
    }

    /// The fastest of `n`.
    pub fn fastest(n: u64) -> Result<Self> {
        Self::new(1, n)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

/// `P(T_N > t) = S(t)^N`.
pub fn survival_tn(model: &SurvivalModel, n: u64, t: f64) -> Result<f64> {
    if n < 1 {
        return domain("N must be at least 1");
    }
    if !(t >= 0.0) {
        return domain(format!("time must be nonnegative, got {t}"));
    }
    Ok(tkn_survival(model, 1, n, t))
}

/// `P(T_{k,N} > t) = sum_{j<k} C(N,j) (1-S)^j S^{N-j}`.
pub fn survival_tkn(model: &SurvivalModel, spec: OrderStatSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return domain(format!("time must be nonnegative, got {t}"));
    }
    Ok(tkn_survival(model, spec.k, spec.n, t))
}

fn tkn_survival(model: &SurvivalModel, k: u32, n: u64, t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let ln_s = model.ln_survival(t);
    if k == 1 {
        return (n as f64 * ln_s).exp();
    }
    let ln_q = model.one_minus_survival(t).ln();
    binomial_head(k, n, ln_s, ln_q)
}

/// `sum_{j<k} C(n,j) q^j s^{n-j}` from `ln s` and `ln q`.
pub(crate) fn binomial_head(k: u32, n: u64, ln_s: f64, ln_q: f64) -> f64 {
    let top = (k as u64).min(n + 1);
    let mut terms = Vec::with_capacity(top as usize);
    for j in 0..top {
        let rest = (n - j) as f64;
        let mut v = ln_binomial_raw(n, j);
        if j > 0 {
            v += j as f64 * ln_q;
        }
        if rest > 0.0 {
            v += rest * ln_s;
        }
        terms.push(v);
    }
    let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return 0.0;
    }
    let sum: f64 = terms.iter().map(|v| (v - peak).exp()).sum();
    (peak + sum.ln()).exp().min(1.0)
}

const TAIL_TARGET: f64 = 1e-10;
const INNER_TOL: f64 = 1e-11;

/// `E[T_{k,N}^m] = int_0^inf m t^{m-1} P(T_{k,N} > t) dt`.
///
/// Refuses moments that diverge under the model's declared tail class.
pub fn moment_tkn(model: &SurvivalModel, spec: OrderStatSpec, m: f64) -> Result<f64> {
    if !(m > 0.0 && m.is_finite()) {
        return domain(format!("moment order must be positive, got {m}"));
    }
    let copies = spec.n - spec.k as u64 + 1;
    let tail = model.tail_class();
    if !tail.moment_is_finite(m, copies) {
        return Err(Error::InfiniteMoment(format!(
            "E[T^{m}] diverges for k = {}, N = {}: the survival of T_(k,N) decays like {}",
            spec.k,
            spec.n,
            match tail {
                TailClass::Power(alpha) => format!("t^-{}", alpha * copies as f64),
                TailClass::Exponential => "an exponential".into(),
            }
        )));
    }
    let (k, n) = (spec.k, spec.n);
    let c = model.short_time().c();
    let p = |t: f64| tkn_survival(model, k, n, t);
    let ln_n = (n.max(2) as f64).ln();
    let t_lo = c / (2.0 * ln_n + 20.0);
    let opts = QuadOptions { rel_tol: INNER_TOL, abs_tol: 1e-300, max_intervals: 4000 };

    // [0, t_lo]: t = t_lo v^{1/m} turns m t^{m-1} dt into t_lo^m dv
    let head = integrate(|v| p(t_lo * v.powf(1.0 / m)), 0.0, 1.0, opts)?.value * t_lo.powf(m);

    let mut t_hi = 2.0 * t_lo;
    let mut steps = 0;
    while p(t_hi) > TAIL_TARGET {
        t_hi *= 2.0;
        steps += 1;
        if steps > 2000 || !t_hi.is_finite() {
            return Err(Error::Solver(format!(
                "survival of T_(k,N) does not fall below {TAIL_TARGET} (k = {k}, N = {n})"
            )));
        }
    }
    let log_integrand = |s: f64| {
        let t = s.exp();
        m * t.powf(m) * p(t)
    };
    let body = integrate(log_integrand, t_lo.ln(), t_hi.ln(), opts)?.value;
    let total = head + body;
    let tail_opts = QuadOptions { abs_tol: 1e-3 * INNER_TOL * total, ..opts };

    let tail_part = match tail {
        TailClass::Exponential => {
            // stretch until the integrand is negligible against the total
            let mut t_end = t_hi;
            let mut steps = 0;
            while m * t_end.powf(m) * p(t_end) > 1e-18 * total && steps < 2000 {
                t_end *= 1.5;
                steps += 1;
            }
            if t_end > t_hi {
                integrate(log_integrand, t_hi.ln(), t_end.ln(), tail_opts)?.value
            } else {
                0.0
            }
        }
        TailClass::Power(alpha) => {
            // in log t the integrand decays like e^{-(beta - m) s}
            let decay = alpha * copies as f64 - m;
            let s_hi = t_hi.ln();
            let s_end = (s_hi + 40.0 / decay).min(690.0).max(s_hi);
            let mid = integrate(log_integrand, s_hi, s_end, tail_opts)?.value;
            let t_end = s_end.exp();
            mid + m * t_end.powf(m) * p(t_end) / decay
        }
    };
    let value = total + tail_part;
    if !value.is_finite() {
        return Err(Error::Solver(format!("moment quadrature returned {value}")));
    }
    Ok(value)
}

/// `Var[T_{k,N}] = E[T^2] - E[T]^2`.
pub fn variance_tkn(model: &SurvivalModel, spec: OrderStatSpec) -> Result<f64> {
    let m2 = moment_tkn(model, spec, 2.0)?;
    let m1 = moment_tkn(model, spec, 1.0)?;
    Ok(m2 - m1 * m1)
}

/// Density of `(T_N - b_N) / a_N` at `x`: `-a_N N S(t)^{N-1} S'(t)` with
/// `t = a_N x + b_N`.
pub fn rescaled_tn_pdf(model: &SurvivalModel, n: u64, r: &RescalingPair, x: f64) -> f64 {
    let t = r.unscale(x);
    if t <= 0.0 {
        return 0.0;
    }
    let bulk = ((n as f64 - 1.0) * model.ln_survival(t)).exp();
    let density = -r.a_n * n as f64 * bulk * model.survival_derivative_or_fd(t);
    density.max(0.0)
}

/// `sup |S(a_N x + b_N)^N - exp(-e^x)|` over 2001 points on `[-10, 10]`.
pub fn ks_distance_to_gumbel(model: &SurvivalModel, n: u64, r: &RescalingPair) -> Result<f64> {
    if n < 2 {
        return domain(format!("KS distance needs N >= 2, got {n}"));
    }
    let worst = (0..=2000)
        .map(|i| {
            let x = -10.0 + 0.01 * i as f64;
            let t = r.unscale(x);
            let exact = if t <= 0.0 { 1.0 } else { tkn_survival(model, 1, n, t) };
            (exact - (-x.exp()).exp()).abs()
        })
        .fold(0.0, f64::max);
    Ok(worst)
}

/// Relative errors of three approximations to `E[T_{k,N}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTableRow {
    pub n: u64,
    pub exact_mean: f64,
    /// `C / ln N`
    pub err_baseline: f64,
    /// `b'_N + psi(k) a'_N`
    pub err_elementary: f64,
    /// `b_N + psi(k) a_N`
    pub err_lambertw: f64,
}

fn error_row(model: &SurvivalModel, n: u64, k: u32) -> Result<ErrorTableRow> {
    let exact = moment_tkn(model, OrderStatSpec::new(k, n)?, 1.0)?;
    let stp = model.short_time();
    let psi = digamma_raw(k as f64);
    let baseline = stp.c() / (n as f64).ln();
    let e = rescaling_elementary(stp, n)?;
    let w = rescaling_lambertw(stp, n)?;
    let err = |approx: f64| ((exact - approx) / exact).abs();
    Ok(ErrorTableRow {
        n,
        exact_mean: exact,
        err_baseline: err(baseline),
        err_elementary: err(e.b_n + psi * e.a_n),
        err_lambertw: err(w.b_n + psi * w.a_n),
    })
}

/// One [`ErrorTableRow`] per entry of `ns`, in input order. Rows are
/// evaluated in parallel; each is computed independently of the others.
pub fn error_table(model: &SurvivalModel, ns: &[u64], k: u32) -> Result<Vec<ErrorTableRow>> {
    ns.par_iter().map(|&n| error_row(model, n, k)).collect()
}

/// Heuristic check of whether `N` is large enough for the Gumbel asymptotics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeDiagnostic {
    /// Approximate `E[T_N]` in units of `L^2 / D`, i.e. `(b_N - gamma a_N) / (4C)`.
    pub dimensionless_mean: f64,
    /// `|ln(A C^p)| / ln N`
    pub log_ratio: f64,
    pub in_regime: bool,
}

pub fn regime_diagnostic(model: &SurvivalModel, n: u64) -> Result<RegimeDiagnostic> {
    regime_diagnostic_params(model.short_time(), n)
}

/// [`regime_diagnostic`] from the short-time constants alone.
pub fn regime_diagnostic_params(stp: &ShortTimeParams, n: u64) -> Result<RegimeDiagnostic> {
    if n < 3 {
        return domain(format!("regime diagnostic needs N >= 3, got {n}"));
    }
    let r = match rescaling_lambertw(stp, n) {
        Ok(r) => r,
        Err(Error::Undefined { .. }) => rescaling_elementary(stp, n)?,
        Err(e) => return Err(e),
    };
    let log_ratio = stp.ln_a_cp().abs() / (n as f64).ln();
    Ok(RegimeDiagnostic {
        dimensionless_mean: (r.b_n - EULER_GAMMA * r.a_n) / (4.0 * stp.c()),
        log_ratio,
        in_regime: log_ratio < 0.5,
    })
}

#[cfg(test)]
mod tests;

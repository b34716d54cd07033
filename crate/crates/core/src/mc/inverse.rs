//! Inverse-transform sampling `tau = S^{-1}(u)` by bracketed root finding,
//! plus a precomputed Hermite table of the inverse for large runs.

use crate::error::{domain, Error, Result};
use crate::models::SurvivalModel;

/// Largest `|logit(u)|` covered by [`InverseTable`].
const LOGIT_SPAN: f64 = 35.0;
const KNOTS: usize = 2048;

/// `t` with `S(t) = u`; nonincreasing in `u`.
pub fn sample_fpt_inverse(model: &SurvivalModel, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return domain(format!("inverse sampling needs u in (0, 1), got {u}"));
    }
    solve(model, Level::from_survival(u))
}

/// `t` with `1 - S(t) = v`, accurate for `v` close to zero.
pub fn sample_fpt_inverse_complement(model: &SurvivalModel, v: f64) -> Result<f64> {
    if !(v > 0.0 && v < 1.0) {
        return domain(format!("inverse sampling needs 1 - u in (0, 1), got {v}"));
    }
    solve(model, Level::from_complement(v))
}

/// A survival level held in whichever of `ln S` or `ln(1 - S)` keeps precision.
#[derive(Debug, Clone, Copy)]
struct Level {
    /// Compare on `ln(1 - S)` when true, on `ln S` otherwise.
    early: bool,
    target: f64,
}

impl Level {
    fn from_survival(u: f64) -> Self {
        if u > 0.5 {
            Level { early: true, target: (-u).ln_1p() }
        } else {
            Level { early: false, target: u.ln() }
        }
    }

    fn from_complement(v: f64) -> Self {
        if v < 0.5 {
            Level { early: true, target: v.ln() }
        } else {
            Level { early: false, target: (-v).ln_1p() }
        }
    }

    /// Increasing in `t`: positive once `S(t)` has dropped below the level.
    fn residual(&self, model: &SurvivalModel, t: f64) -> f64 {
        if self.early {
            model.one_minus_survival(t).ln() - self.target
        } else {
            self.target - model.ln_survival(t)
        }
    }

    /// `d residual / d ln t`.
    fn slope(&self, model: &SurvivalModel, t: f64) -> f64 {
        let ds = model.survival_derivative_or_fd(t) * t;
        if self.early {
            -ds / model.one_minus_survival(t)
        } else {
            -ds / model.survival(t)
        }
    }
}

fn solve(model: &SurvivalModel, level: Level) -> Result<f64> {
    let c = model.short_time().c();
    let f = |s: f64| level.residual(model, s.exp());
    let (mut lo, mut hi) = (c.ln(), c.ln());
    let mut steps = 0;
    while f(lo) > 0.0 {
        lo -= std::f64::consts::LN_2;
        steps += 1;
        if steps > 2000 {
            return Err(Error::Solver("could not bracket the inverse from below".into()));
        }
    }
    while !(f(hi) >= 0.0) {
        hi += std::f64::consts::LN_2;
        steps += 1;
        if steps > 4000 || hi > 700.0 {
            return Err(Error::Solver(
                "could not bracket the inverse from above: survival does not fall to the level".into(),
            ));
        }
    }
    while hi - lo > 1e-15 * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Cubic Hermite table of `ln t` against `logit(u)` on `[-35, 35]`, with one
/// Newton step on the exact survival after interpolation.
#[derive(Debug, Clone)]
pub struct InverseTable {
    model: SurvivalModel,
    step: f64,
    ln_t: Vec<f64>,
    slope: Vec<f64>,
}

impl InverseTable {
    pub fn new(model: &SurvivalModel) -> Result<Self> {
        let step = 2.0 * LOGIT_SPAN / (KNOTS - 1) as f64;
        let mut ln_t = Vec::with_capacity(KNOTS);
        let mut slope = Vec::with_capacity(KNOTS);
        for i in 0..KNOTS {
            let x = -LOGIT_SPAN + step * i as f64;
            let t = solve(model, level_from_logit(x))?;
            // d ln t / d logit(u) = u (1 - u) / (t S'(t))
            let (u, v) = logistic(x);
            let d = model.survival_derivative_or_fd(t);
            slope.push(u * v / (t * d));
            ln_t.push(t.ln());
        }
        Ok(Self { model: model.clone(), step, ln_t, slope })
    }

    /// `t` with `1 - S(t) = v`.
    pub fn sample_complement(&self, v: f64) -> Result<f64> {
        if !(v > 0.0 && v < 1.0) {
            return domain(format!("inverse sampling needs 1 - u in (0, 1), got {v}"));
        }
        let x = (-v).ln_1p() - v.ln();
        let level = Level::from_complement(v);
        if x.abs() >= LOGIT_SPAN {
            return solve(&self.model, level);
        }
        let pos = (x + LOGIT_SPAN) / self.step;
        let i = (pos.floor() as usize).min(KNOTS - 2);
        let s = pos - i as f64;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
            s * (1.0 - s) * (1.0 - s),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        let guess = h00 * self.ln_t[i]
            + h10 * self.step * self.slope[i]
            + h01 * self.ln_t[i + 1]
            + h11 * self.step * self.slope[i + 1];
        let t = guess.exp();
        let d = level.slope(&self.model, t);
        if !(d > 0.0 && d.is_finite()) {
            return Ok(t);
        }
        Ok((guess - level.residual(&self.model, t) / d).exp())
    }
}

/// `(u, 1 - u)` for `u = 1 / (1 + e^{-x})`.
fn logistic(x: f64) -> (f64, f64) {
    let e = (-x.abs()).exp();
    let small = e / (1.0 + e);
    let big = 1.0 / (1.0 + e);
    if x >= 0.0 {
        (big, small)
    } else {
        (small, big)
    }
}

fn level_from_logit(x: f64) -> Level {
    if x > 0.0 {
        // ln(1 - u) = -x - ln(1 + e^{-x})
        Level { early: true, target: -x - (-x).exp().ln_1p() }
    } else {
        // ln u = x - ln(1 + e^x)
        Level { early: false, target: x - x.exp().ln_1p() }
    }
}

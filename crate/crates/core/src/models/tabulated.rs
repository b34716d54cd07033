use std::path::Path;

use serde::Deserialize;

use super::{ShortTimeParams, TailClass};
use crate::error::{Error, Result};

/// Survival values on a strictly increasing time grid, interpolated with a
/// shape-preserving cubic in `ln t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    ln_t: Vec<f64>,
    s: Vec<f64>,
    slopes: Vec<f64>,
    short_time: ShortTimeParams,
    tail: TailClass,
    /// Exponential decay rate used past the last node for exponential tails.
    tail_rate: f64,
}

/// Fritsch–Carlson style derivative estimates (weighted harmonic mean in the
/// interior, one-sided three-point formula at the ends).
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = y
        .windows(2)
        .zip(&h)
        .map(|(w, h)| (w[1] - w[0]) / h)
        .collect();
    let mut m = vec![0.0; n];
    for k in 1..n - 1 {
        let (d0, d1) = (delta[k - 1], delta[k]);
        if d0 * d1 <= 0.0 {
            continue;
        }
        let w1 = 2.0 * h[k] + h[k - 1];
        let w2 = h[k] + 2.0 * h[k - 1];
        m[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
    }
    let edge = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if d * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            d
        }
    };
    m[0] = edge(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    m
}

impl Table {
    pub(crate) fn new(
        ts: &[f64],
        ss: &[f64],
        short_time: ShortTimeParams,
        tail: TailClass,
    ) -> Result<Self> {
        if ts.len() != ss.len() {
            return Err(Error::Validation(format!(
                "{} times but {} survival values",
                ts.len(),
                ss.len()
            )));
        }
        if ts.len() < 4 {
            return Err(Error::Validation(format!(
                "at least 4 points required, got {}",
                ts.len()
            )));
        }
        if ts.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Validation("times must be positive and finite".into()));
        }
        if ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation("times must be strictly increasing".into()));
        }
        if ss.iter().any(|s| !(*s > 0.0 && *s <= 1.0)) {
            return Err(Error::Validation("survival values must lie in (0, 1]".into()));
        }
        if let Some(i) = ss.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::Validation(format!(
                "survival values must be nonincreasing (S[{}] = {} < S[{}] = {})",
                i,
                ss[i],
                i + 1,
                ss[i + 1]
            )));
        }
        if let TailClass::Power(alpha) = tail {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::Validation(format!(
                    "power tail exponent must be positive, got {alpha}"
                )));
            }
        }
        let tail_rate = ts
            .windows(2)
            .zip(ss.windows(2))
            .rev()
            .find(|(_, s)| s[1] < s[0])
            .map(|(t, s)| (s[0] / s[1]).ln() / (t[1] - t[0]))
            .ok_or_else(|| Error::Validation("survival values never decrease".into()))?;

        let ln_t: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
        let slopes = pchip_slopes(&ln_t, ss);
        Ok(Self {
            ln_t,
            s: ss.to_vec(),
            slopes,
            short_time,
            tail,
            tail_rate,
        })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    fn t_min(&self) -> f64 {
        self.ln_t[0].exp()
    }

    pub(crate) fn survival(&self, t: f64) -> f64 {
        let u = t.ln();
        let n = self.len();
        if u < self.ln_t[0] {
            return self.short_time.s0(t).max(0.0);
        }
        if u > self.ln_t[n - 1] {
            let (t_last, s_last) = (self.ln_t[n - 1].exp(), self.s[n - 1]);
            return match self.tail {
                TailClass::Power(alpha) => s_last * (t_last / t).powf(alpha),
                TailClass::Exponential => s_last * (-self.tail_rate * (t - t_last)).exp(),
            };
        }
        let k = match self
            .ln_t
            .binary_search_by(|probe| probe.partial_cmp(&u).expect("finite grid"))
        {
            Ok(i) => return self.s[i],
            Err(i) => i - 1,
        };
        let h = self.ln_t[k + 1] - self.ln_t[k];
        let r = (u - self.ln_t[k]) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * r) * (1.0 - r) * (1.0 - r),
            r * (1.0 - r) * (1.0 - r),
            r * r * (3.0 - 2.0 * r),
            r * r * (r - 1.0),
        );
        (h00 * self.s[k] + h10 * h * self.slopes[k] + h01 * self.s[k + 1] + h11 * h * self.slopes[k + 1])
            .clamp(0.0, 1.0)
    }

    pub(crate) fn one_minus_survival(&self, t: f64) -> f64 {
        if t < self.t_min() {
            self.short_time.one_minus_s0(t)
        } else {
            1.0 - self.survival(t)
        }
    }
}

#[derive(Debug, Deserialize)]
struct Row {
    t: f64,
    #[serde(rename = "S")]
    s: f64,
}

/// Reads a two-column CSV with header `t,S`.
pub fn read_survival_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?
        .clone();
    if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "S" {
        return Err(Error::Validation(format!(
            "{}: expected header `t,S`, found `{}`",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut ts = Vec::new();
    let mut ss = Vec::new();
    for (line, rec) in reader.deserialize::<Row>().enumerate() {
        let row = rec.map_err(|e| Error::Validation(format!("{} row {}: {e}", path.display(), line + 1)))?;
        ts.push(row.t);
        ss.push(row.s);
    }
    Ok((ts, ss))
}

//! Survival models `S(t) = P(tau > t)` for a single searcher.

mod diffusion;
mod tabulated;

use std::path::Path;

use crate::error::{Error, Result};

pub use diffusion::{sphere_eigen_survival, sphere_image_one_minus};
pub use tabulated::{read_survival_csv, Table};

/// Constants of the short-time behavior `1 - S(t) ~ A t^p exp(-C/t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortTimeParams {
    a: f64,
    p: f64,
    c: f64,
}

impl ShortTimeParams {
    pub fn new(a: f64, p: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("prefactor A must be positive, got {a}")));
        }
        if !p.is_finite() {
            return Err(Error::Domain(format!("power p must be finite, got {p}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("rate C must be positive, got {c}")));
        }
        Ok(Self { a, p, c })
    }

    /// Prefactor `A`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Power `p`.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Exponential rate `C` (units of time).
    pub fn c(&self) -> f64 {
        self.c
    }

    /// `ln(A C^p)`, the quantity that controls the finite-N corrections.
    pub fn ln_a_cp(&self) -> f64 {
        self.a.ln() + self.p * self.c.ln()
    }

    /// `1 - S_0(t) = A t^p exp(-C/t)`.
    pub fn one_minus_s0(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        (self.a.ln() + self.p * t.ln() - self.c / t).exp()
    }

    /// `S_0(t) = 1 - A t^p exp(-C/t)`.
    pub fn s0(&self, t: f64) -> f64 {
        1.0 - self.one_minus_s0(t)
    }

    /// `S_0'(t) = -A t^p exp(-C/t) (p/t + C/t^2)`.
    pub fn s0_derivative(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        -self.one_minus_s0(t) * (self.p / t + self.c / (t * t))
    }
}

/// Large-time behavior of `S(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailClass {
    /// `S(t)` decays exponentially.
    Exponential,
    /// `S(t) ~ const * t^(-alpha)`.
    Power(f64),
}

impl TailClass {
    /// Whether `E[T^m]` is finite when `P(T > t)` behaves like `S(t)^copies`.
    pub fn moment_is_finite(&self, m: f64, copies: u64) -> bool {
        match *self {
            TailClass::Exponential => true,
            TailClass::Power(alpha) => m < alpha * copies as f64,
        }
    }
}

/// Which concrete survival law a model evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    /// 1D searcher started at distance `l` from a perfectly absorbing target.
    Point1d { l: f64, d: f64 },
    /// Same geometry with a partially absorbing (Robin) target of reactivity `kappa`.
    Robin1d { l: f64, d: f64, kappa: f64 },
    /// Exit from a 3D ball of radius `l` around the starting point.
    Sphere3d { l: f64, d: f64 },
    /// User-supplied survival table.
    Tabulated(Table),
}

/// A single-searcher survival law together with its short-time constants.
///
/// Immutable after construction; evaluation is pure.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalModel {
    kind: ModelKind,
    short_time: ShortTimeParams,
    tail: TailClass,
    label: String,
}

/// Below this value `1 - S` is computed directly rather than as `1 - S`.
const DIRECT_COMPLEMENT: f64 = 1e-8;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {v}")))
    }
}

impl SurvivalModel {
    /// 1D diffusion from `L` to an absorbing origin: `S(t) = erf(L / sqrt(4 D t))`.
    pub fn point_1d(l: f64, d: f64) -> Result<Self> {
        check_positive("L", l)?;
        check_positive("D", d)?;
        let short_time = ShortTimeParams::new(
            (4.0 * d / (std::f64::consts::PI * l * l)).sqrt(),
            0.5,
            l * l / (4.0 * d),
        )?;
        Ok(Self {
            kind: ModelKind::Point1d { l, d },
            short_time,
            tail: TailClass::Power(0.5),
            label: format!("point1d(L={l}, D={d})"),
        })
    }

    /// 1D diffusion from `L` to a partially absorbing origin with reactivity `kappa`.
    pub fn robin_1d(l: f64, d: f64, kappa: f64) -> Result<Self> {
        check_positive("L", l)?;
        check_positive("D", d)?;
        check_positive("kappa", kappa)?;
        let a = 4.0 / std::f64::consts::PI.sqrt() * (kappa * l / d) * (d / (l * l)).powf(1.5);
        let short_time = ShortTimeParams::new(a, 1.5, l * l / (4.0 * d))?;
        Ok(Self {
            kind: ModelKind::Robin1d { l, d, kappa },
            short_time,
            tail: TailClass::Power(0.5),
            label: format!("robin1d(L={l}, D={d}, kappa={kappa})"),
        })
    }

    /// First exit from a 3D ball of radius `L` centered at the start.
    pub fn sphere_3d(l: f64, d: f64) -> Result<Self> {
        check_positive("L", l)?;
        check_positive("D", d)?;
        let short_time = ShortTimeParams::new(
            2.0 * (l * l / (std::f64::consts::PI * d)).sqrt(),
            -0.5,
            l * l / (4.0 * d),
        )?;
        Ok(Self {
            kind: ModelKind::Sphere3d { l, d },
            short_time,
            tail: TailClass::Exponential,
            label: format!("sphere3d(L={l}, D={d})"),
        })
    }

    /// Monotone interpolation of tabulated `(t, S)` pairs. Below the table
    /// the short-time form is used; above it, the declared tail.
    pub fn tabulated(
        ts: &[f64],
        ss: &[f64],
        short_time: ShortTimeParams,
        tail: TailClass,
    ) -> Result<Self> {
        let table = Table::new(ts, ss, short_time, tail)?;
        Ok(Self {
            label: format!("tabulated({} points)", ts.len()),
            kind: ModelKind::Tabulated(table),
            short_time,
            tail,
        })
    }

    /// Tabulated model read from a two-column `t,S` CSV file.
    pub fn from_csv(
        path: impl AsRef<Path>,
        short_time: ShortTimeParams,
        tail: TailClass,
    ) -> Result<Self> {
        let path = path.as_ref();
        let (ts, ss) = read_survival_csv(path)?;
        let mut model = Self::tabulated(&ts, &ss, short_time, tail)?;
        model.label = format!("tabulated({})", path.display());
        Ok(model)
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn short_time(&self) -> &ShortTimeParams {
        &self.short_time
    }

    pub fn tail_class(&self) -> TailClass {
        self.tail
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// True for the analytic models (everything except tabulated data).
    pub fn is_builtin(&self) -> bool {
        !matches!(self.kind, ModelKind::Tabulated(_))
    }

    /// `S(t)`; equals 1 for `t <= 0`.
    pub fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        if t == f64::INFINITY {
            return 0.0;
        }
        let s = match &self.kind {
            ModelKind::Point1d { l, d } => diffusion::point_survival(*l, *d, t),
            ModelKind::Robin1d { l, d, kappa } => diffusion::robin_survival(*l, *d, *kappa, t),
            ModelKind::Sphere3d { l, d } => diffusion::sphere_survival(*l, *d, t),
            ModelKind::Tabulated(table) => table.survival(t),
        };
        s.clamp(0.0, 1.0)
    }

    /// `1 - S(t)`, evaluated directly where it is tiny.
    pub fn one_minus_survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t == f64::INFINITY {
            return 1.0;
        }
        let q = match &self.kind {
            ModelKind::Point1d { l, d } => diffusion::point_one_minus(*l, *d, t),
            ModelKind::Robin1d { l, d, kappa } => diffusion::robin_one_minus(*l, *d, *kappa, t),
            ModelKind::Sphere3d { l, d } => diffusion::sphere_one_minus(*l, *d, t),
            ModelKind::Tabulated(table) => table.one_minus_survival(t),
        };
        q.clamp(0.0, 1.0)
    }

    /// `ln S(t)`, accurate when `S` is close to 1.
    pub fn ln_survival(&self, t: f64) -> f64 {
        let q = self.one_minus_survival(t);
        if q < DIRECT_COMPLEMENT {
            (-q).ln_1p()
        } else {
            self.survival(t).ln()
        }
    }

    /// `S'(t)` where an analytic form is available.
    pub fn survival_derivative(&self, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(0.0);
        }
        match &self.kind {
            ModelKind::Point1d { l, d } => Some(diffusion::point_derivative(*l, *d, t)),
            ModelKind::Robin1d { l, d, kappa } => {
                Some(diffusion::robin_derivative(*l, *d, *kappa, t))
            }
            ModelKind::Sphere3d { l, d } => Some(diffusion::sphere_derivative(*l, *d, t)),
            ModelKind::Tabulated(_) => None,
        }
    }

    /// `S'(t)`, falling back to a central difference when no analytic form exists.
    pub fn survival_derivative_or_fd(&self, t: f64) -> f64 {
        if let Some(v) = self.survival_derivative(t) {
            return v;
        }
        let h = t * 1e-5;
        let lo = (t - h).max(0.0);
        (self.survival(t + h) - self.survival(lo)) / (t + h - lo)
    }
}
